//! Lyapunov energies along trajectories, their residual functionals, and the
//! bijection that identifies the primal and mirror-dual residuals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cfom::{CoefficientSchedule, Trajectory};
use crate::dgf::Dgf;
use crate::error::{invalid, Error, Result};
use crate::methods::ThetaSequence;
use crate::objectives::SmoothObjective;
use crate::spaces::{pairing, DualVector, NormIndex, PrimalVector, Vector};

/// Slack used for every "nonnegative by construction" check.
pub const ENERGY_TOL: f64 = 1e-9;

/// Which inequality makes a subtracted term nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    /// `D_f(., .) >= 0`.
    Convexity,
    /// `D_f(x, y) >= ||grad f(x) - grad f(y)||^2 / (2L)`.
    Cocoercivity,
    /// `D_{h*}(y, y') >= (sigma/2) ||grad h*(y) - grad h*(y')||^2`.
    ConjugateCocoercivity,
    /// `h(x) + h*(y) - <y, x> >= 0`, or a Bregman divergence of `h*`.
    Fenchel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledTerm {
    pub kind: TermKind,
    /// Step index `k` of the transition `k -> k+1`.
    pub step: usize,
    pub value: f64,
}

/// Decomposition of the final energy value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FinalDecomposition {
    /// `U_N = u_N (f(x_N) - f(x)) + fenchel + pairing + residual`.
    Primal {
        gap: f64,
        fenchel: f64,
        pairing: f64,
        residual: f64,
    },
    /// `V_N = psi*(r_N) + D_{psi*}(0, r_0) + residual`.
    Dual {
        psi_star: f64,
        initial_bregman: f64,
        residual: f64,
    },
}

impl FinalDecomposition {
    /// `U_A` or `V_B` as extracted from the trajectory.
    pub fn residual(&self) -> f64 {
        match self {
            Self::Primal { residual, .. } | Self::Dual { residual, .. } => *residual,
        }
    }
}

/// Energy values `E_0..E_N` with the subtracted terms of each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyTrace {
    pub values: Vec<f64>,
    pub terms: Vec<LabeledTerm>,
    pub decomposition: FinalDecomposition,
    /// Bound on `f(x_N) - f(x)` (primal) or `psi*(r_N)` (dual) implied by
    /// the energy argument.
    pub certified_bound: Option<f64>,
}

impl EnergyTrace {
    /// Largest `E_{k+1} - E_k`.
    pub fn max_increase(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_term(&self) -> f64 {
        self.terms.iter().map(|t| t.value).fold(f64::INFINITY, f64::min)
    }

    pub fn is_monotone(&self) -> bool {
        self.values.len() < 2 || self.max_increase() <= ENERGY_TOL
    }

    pub fn terms_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| t.value >= -ENERGY_TOL)
    }
}

fn check_weights(w: &[f64], n: usize, name: &str, strict: bool) -> Result<()> {
    if w.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: w.len() });
    }
    if w.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(invalid(format!("{name} must be positive")));
    }
    let ok = w.windows(2).all(|p| if strict { p[1] > p[0] } else { p[1] >= p[0] });
    if !ok {
        return Err(invalid(format!(
            "{name} must be {}",
            if strict { "increasing" } else { "nondecreasing" }
        )));
    }
    Ok(())
}

/// `u_i = (sigma/L) theta_i^2`.
pub fn amd_u(theta: &ThetaSequence, l: f64, sigma: f64) -> Vec<f64> {
    (0..=theta.steps()).map(|i| sigma / l * theta.sq(i as isize)).collect()
}

/// `v_i = 1 / u_{N-i}`.
pub fn dual_weights(u: &[f64]) -> Vec<f64> {
    u.iter().rev().map(|x| 1.0 / x).collect()
}

/// Primal energy along a coupled run:
/// `U_0 = phi(x) + phi*(y_0) - <y_0, x> - u_0 D_f(x, x_0)` and
/// `U_{k+1} = U_k - (u_{k+1} - u_k) D_f(x, x_{k+1})
///   - u_k [D_f(x_k, x_{k+1}) - ||A_k - A_{k+1}||_q^2 / (2L)]
///   - [D_{phi*}(y_k, y_{k+1}) - (sigma/2) ||B_{k+1} - B_k||_p^2]`.
pub fn primal_energy_trace(
    traj: &Trajectory,
    x: &PrimalVector,
    u: &[f64],
    f: &SmoothObjective,
    phi: &Dgf,
    l: f64,
) -> Result<EnergyTrace> {
    let n = traj.steps();
    check_weights(u, n, "u", false)?;
    let (p, q) = (phi.norm().p(), phi.norm().q());
    let sigma = phi.sigma();
    let xs = &traj.points;
    let ys = &traj.duals;
    let a = &traj.grads;
    let b = &traj.mirrors;

    let fenchel0 = phi.fenchel_residual(x, &ys[0])?;
    let mut e = fenchel0 - u[0] * f.bregman(x, &xs[0])?;
    let mut values = vec![e];
    let mut terms = Vec::with_capacity(3 * n);
    for k in 0..n {
        let cvx = (u[k + 1] - u[k]) * f.bregman(x, &xs[k + 1])?;
        let coco = u[k] * (f.bregman(&xs[k], &xs[k + 1])? - (&a[k] - &a[k + 1]).norm(q).powi(2) / (2.0 * l));
        let mirror = phi.conjugate_bregman(&ys[k], &ys[k + 1])? - 0.5 * sigma * (&b[k + 1] - &b[k]).norm(p).powi(2);
        terms.push(LabeledTerm { kind: TermKind::Convexity, step: k, value: cvx });
        terms.push(LabeledTerm { kind: TermKind::Cocoercivity, step: k, value: coco });
        terms.push(LabeledTerm { kind: TermKind::ConjugateCocoercivity, step: k, value: mirror });
        e -= cvx + coco + mirror;
        values.push(e);
    }

    let gap = u[n] * (f.value(&xs[n])? - f.value(x)?);
    let fenchel = phi.fenchel_residual(x, &ys[n])?;
    let mut s = &ys[n] - &ys[0];
    for i in 0..=n {
        let prev = if i == 0 { 0.0 } else { u[i - 1] };
        s.axpy(u[i] - prev, &a[i]);
    }
    let pair = pairing(&s, x)?;
    terms.push(LabeledTerm { kind: TermKind::Fenchel, step: n, value: fenchel });
    let residual = e - gap - fenchel - pair;
    Ok(EnergyTrace {
        values,
        terms,
        decomposition: FinalDecomposition::Primal {
            gap,
            fenchel,
            pairing: pair,
            residual,
        },
        certified_bound: Some(fenchel0 / u[n]),
    })
}

/// Dual energy along a mirror-dual run:
/// `V_0 = v_0 (f(q_0) - f(q_N))` and
/// `V_{k+1} = V_k - (v_{k+1} - v_k) D_f(q_N, q_k)
///   - v_{k+1} [D_f(q_k, q_{k+1}) - ||C_k - C_{k+1}||_q^2 / (2L)]
///   - [D_{psi*}(r_k, r_{k+1}) - (sigma/2) ||D_k - D_{k+1}||_p^2]`.
pub fn dual_energy_trace(
    traj: &Trajectory,
    v: &[f64],
    f: &SmoothObjective,
    psi: &Dgf,
    l: f64,
    f_star: Option<f64>,
) -> Result<EnergyTrace> {
    let n = traj.steps();
    check_weights(v, n, "v", false)?;
    if !psi.is_unshifted() {
        return Err(Error::Unsupported("dual energy needs an unshifted psi".into()));
    }
    let (p, q) = (psi.norm().p(), psi.norm().q());
    let sigma = psi.sigma();
    let qs = &traj.points;
    let rs = &traj.duals;
    let c = &traj.grads;
    let d = &traj.mirrors;

    let mut e = v[0] * (f.value(&qs[0])? - f.value(&qs[n])?);
    let mut values = vec![e];
    let mut terms = Vec::with_capacity(3 * n);
    for k in 0..n {
        let cvx = (v[k + 1] - v[k]) * f.bregman(&qs[n], &qs[k])?;
        let coco = v[k + 1] * (f.bregman(&qs[k], &qs[k + 1])? - (&c[k] - &c[k + 1]).norm(q).powi(2) / (2.0 * l));
        let mirror = psi.conjugate_bregman(&rs[k], &rs[k + 1])? - 0.5 * sigma * (&d[k] - &d[k + 1]).norm(p).powi(2);
        terms.push(LabeledTerm { kind: TermKind::Convexity, step: k, value: cvx });
        terms.push(LabeledTerm { kind: TermKind::Cocoercivity, step: k, value: coco });
        terms.push(LabeledTerm { kind: TermKind::ConjugateCocoercivity, step: k, value: mirror });
        e -= cvx + coco + mirror;
        values.push(e);
    }
    let psi_star = psi.conjugate_value(&rs[n])?;
    let zero = DualVector::zeros(rs[0].len());
    let initial_bregman = psi.conjugate_bregman(&zero, &rs[0])?;
    terms.push(LabeledTerm { kind: TermKind::Fenchel, step: 0, value: initial_bregman });
    let residual = e - psi_star - initial_bregman;
    let certified_bound = f_star
        .map(|fs| Ok::<_, Error>(v[0] * (f.value(&qs[0])? - fs)))
        .transpose()?;
    Ok(EnergyTrace {
        values,
        terms,
        decomposition: FinalDecomposition::Dual {
            psi_star,
            initial_bregman,
            residual,
        },
        certified_bound,
    })
}

/// Free stand-ins `A_0..A_N` for the gradients and `B_0..B_N` for the
/// mirror images.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientScenario {
    pub a: Vec<DualVector>,
    pub b: Vec<PrimalVector>,
}

impl GradientScenario {
    pub fn new(a: Vec<DualVector>, b: Vec<PrimalVector>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len().max(1),
                found: b.len(),
            });
        }
        let dim = a[0].len();
        for v in &a {
            v.check_dim(dim)?;
        }
        for v in &b {
            v.check_dim(dim)?;
        }
        Ok(Self { a, b })
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            a: vec![DualVector::zeros(dim); n + 1],
            b: vec![PrimalVector::zeros(dim); n + 1],
        }
    }

    /// I.i.d. standard normal entries times `scale`.
    pub fn random<R: Rng + ?Sized>(n: usize, dim: usize, scale: f64, rng: &mut R) -> Self {
        let mut draw = || -> Vec<f64> {
            (0..dim)
                .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
                .collect()
        };
        let a = (0..=n).map(|_| Vector::from_raw(draw())).collect();
        let b = (0..=n).map(|_| Vector::from_raw(draw())).collect();
        Self { a, b }
    }

    /// `A_k = grad f(x_k)`, `B_k = grad phi*(y_k)` of a run.
    pub fn from_trajectory(t: &Trajectory) -> Self {
        Self {
            a: t.grads.clone(),
            b: t.mirrors.clone(),
        }
    }

    pub fn steps(&self) -> usize {
        self.a.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }

    fn check_steps(&self, n: usize) -> Result<()> {
        if self.steps() != n {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: self.a.len(),
            });
        }
        Ok(())
    }
}

fn dot_dp(a: &DualVector, b: &PrimalVector) -> f64 {
    crate::spaces::dot(a.as_slice(), b.as_slice())
}

/// Closed form of `U_A` in the gradient stand-ins:
/// `sum_{k<N} u_k/(2L) ||A_k - A_{k+1}||_q^2 + sum_{k<N} sigma/2 ||B_k - B_{k+1}||_p^2
///  + sum_{k<N} sum_{i<=k} a(k+1,i) <A_i, B_{k+1}>
///  + sum_{k<=N} <C_{N-k}, sum_{i<=k} b(k,i) B_i>`
/// with `C_{N-k} = u_k A_k + sum_{i>k} (u_i - u_{i-1}) A_i`.
pub fn evaluate_u(
    s: &CoefficientSchedule,
    u: &[f64],
    l: f64,
    sigma: f64,
    norm: NormIndex,
    sc: &GradientScenario,
) -> Result<f64> {
    let s = s.primal_form();
    let n = s.steps();
    sc.check_steps(n)?;
    if u.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: u.len() });
    }
    let (p, q) = (norm.p(), norm.q());
    let (a, b) = (&sc.a, &sc.b);
    let mut total = 0.0;
    for k in 0..n {
        total += u[k] / (2.0 * l) * (&a[k] - &a[k + 1]).norm(q).powi(2);
        total += 0.5 * sigma * (&b[k] - &b[k + 1]).norm(p).powi(2);
        for i in 0..=k {
            let c = s.a(k + 1, i);
            if c != 0.0 {
                total += c * dot_dp(&a[i], &b[k + 1]);
            }
        }
    }
    let c = transform_c(u, a);
    for k in 0..=n {
        let mut row = PrimalVector::zeros(sc.dim());
        for i in 0..=k {
            let coef = s.b(k, i);
            if coef != 0.0 {
                row.axpy(coef, &b[i]);
            }
        }
        total += dot_dp(&c[n - k], &row);
    }
    Ok(total)
}

/// `U_A` written with the reconstructed iterates
/// `x_k = -sum_{j<=k} sum_i b(j,i) B_i` and `y_k - y_{k+1} = sum_i a(k+1,i) A_i`:
/// `sum_k (u_k - u_{k-1}) <A_k, -x_k> + sum_{k<N} u_k (<A_{k+1}, x_k - x_{k+1}>
///  + ||A_k - A_{k+1}||^2/(2L)) + sum_{k<N} (<y_k - y_{k+1}, B_{k+1}> + sigma/2 ||B_{k+1} - B_k||^2)`.
pub fn evaluate_u_first_form(
    s: &CoefficientSchedule,
    u: &[f64],
    l: f64,
    sigma: f64,
    norm: NormIndex,
    sc: &GradientScenario,
) -> Result<f64> {
    let s = s.primal_form();
    let n = s.steps();
    sc.check_steps(n)?;
    if u.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: u.len() });
    }
    let (p, q) = (norm.p(), norm.q());
    let (a, b) = (&sc.a, &sc.b);
    let dim = sc.dim();
    let mut xs = Vec::with_capacity(n + 1);
    let mut x = PrimalVector::zeros(dim);
    for j in 0..=n {
        for i in 0..=j {
            let c = s.b(j, i);
            if c != 0.0 {
                x.axpy(-c, &b[i]);
            }
        }
        xs.push(x.clone());
    }
    let mut total = 0.0;
    for k in 0..=n {
        let prev = if k == 0 { 0.0 } else { u[k - 1] };
        total -= (u[k] - prev) * dot_dp(&a[k], &xs[k]);
    }
    for k in 0..n {
        total += u[k] * (dot_dp(&a[k + 1], &(&xs[k] - &xs[k + 1])) + (&a[k] - &a[k + 1]).norm(q).powi(2) / (2.0 * l));
        let mut dy = DualVector::zeros(dim);
        for i in 0..=k {
            let c = s.a(k + 1, i);
            if c != 0.0 {
                dy.axpy(c, &a[i]);
            }
        }
        total += dot_dp(&dy, &b[k + 1]) + 0.5 * sigma * (&b[k + 1] - &b[k]).norm(p).powi(2);
    }
    Ok(total)
}

/// Closed form of `V_B` in the transformed stand-ins `(C, D)`:
/// `sum_{k<N} v_{k+1}/(2L) ||C_k - C_{k+1}||_q^2 + sum_{k<N} sigma/2 ||D_k - D_{k+1}||_p^2
///  + sum_{k<=N} <sum_{i<=k} b(N-i,N-k) C_i, D_k>
///  + sum_{k<N} <v_{k+1} C_{k+1} - sum_{j<=k} (v_{j+1} - v_j) C_j, sum_{i<=k} a(N-i,N-1-k) D_i>`.
pub fn evaluate_v(
    s: &CoefficientSchedule,
    v: &[f64],
    l: f64,
    sigma: f64,
    norm: NormIndex,
    sc: &GradientScenario,
) -> Result<f64> {
    let d = s.dual_form();
    let n = d.steps();
    sc.check_steps(n)?;
    if v.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: v.len() });
    }
    let (p, q) = (norm.p(), norm.q());
    let (c, dd) = (&sc.a, &sc.b);
    let dim = sc.dim();
    let mut total = 0.0;
    for k in 0..n {
        total += v[k + 1] / (2.0 * l) * (&c[k] - &c[k + 1]).norm(q).powi(2);
        total += 0.5 * sigma * (&dd[k] - &dd[k + 1]).norm(p).powi(2);
    }
    for k in 0..=n {
        let mut row = DualVector::zeros(dim);
        for i in 0..=k {
            let coef = d.b(k, i);
            if coef != 0.0 {
                row.axpy(coef, &c[i]);
            }
        }
        total += dot_dp(&row, &dd[k]);
    }
    let mut acc = DualVector::zeros(dim);
    for k in 0..n {
        acc.axpy(v[k + 1] - v[k], &c[k]);
        let lhs = &c[k + 1].scaled(v[k + 1]) - &acc;
        let mut step = PrimalVector::zeros(dim);
        for i in 0..=k {
            let coef = d.a(k + 1, i);
            if coef != 0.0 {
                step.axpy(coef, &dd[i]);
            }
        }
        total += dot_dp(&lhs, &step);
    }
    Ok(total)
}

/// `C_{N-k} = u_k A_k + sum_{i>k} (u_i - u_{i-1}) A_i`, indexed by `N-k`.
fn transform_c(u: &[f64], a: &[DualVector]) -> Vec<DualVector> {
    let n = a.len() - 1;
    let mut c = Vec::with_capacity(n + 1);
    c.push(a[n].scaled(u[n]));
    for j in 1..=n {
        let i = n - j;
        let mut next = c[j - 1].clone();
        next.axpy(u[i], &(&a[i] - &a[i + 1]));
        c.push(next);
    }
    c
}

/// `C_0 = u_N A_N`, `C_{N-i} = C_{N-i-1} + u_i (A_i - A_{i+1})`, `D_i = B_{N-i}`.
pub fn duality_transform(u: &[f64], sc: &GradientScenario) -> Result<GradientScenario> {
    let n = sc.steps();
    check_weights(u, n, "u", false).or_else(|e| match e {
        // Only positivity matters for the bijection.
        Error::InvalidParameter(_) if u.iter().all(|x| x.is_finite() && *x > 0.0) => Ok(()),
        e => Err(e),
    })?;
    Ok(GradientScenario {
        a: transform_c(u, &sc.a),
        b: sc.b.iter().rev().cloned().collect(),
    })
}

/// Inverse of [`duality_transform`]:
/// `A_N = C_0 / u_N`, `A_i = A_{i+1} + (C_{N-i} - C_{N-i-1}) / u_i`.
pub fn inverse_duality_transform(u: &[f64], sc: &GradientScenario) -> Result<GradientScenario> {
    let n = sc.steps();
    if u.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: u.len() });
    }
    if u.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid("u must be positive"));
    }
    let c = &sc.a;
    let mut a = vec![DualVector::zeros(sc.dim()); n + 1];
    a[n] = c[0].scaled(1.0 / u[n]);
    for i in (0..n).rev() {
        let mut next = a[i + 1].clone();
        next.axpy(1.0 / u[i], &(&c[n - i] - &c[n - i - 1]));
        a[i] = next;
    }
    Ok(GradientScenario {
        a,
        b: sc.b.iter().rev().cloned().collect(),
    })
}

/// Options for [`check_mirror_duality`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualityCheckOptions {
    pub trials: usize,
    pub dim: usize,
    pub scale: f64,
    pub seed: u64,
    pub tol: f64,
    pub norm: NormIndex,
    /// Replaces `v_i = 1/u_{N-i}`; used to probe the hypothesis.
    pub v_override: Option<Vec<f64>>,
}

impl Default for DualityCheckOptions {
    fn default() -> Self {
        Self {
            trials: 1000,
            dim: 3,
            scale: 1.0,
            seed: 0,
            tol: 1e-9,
            norm: NormIndex::euclidean(),
            v_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityFailure {
    pub trial: usize,
    pub u_value: f64,
    pub v_value: f64,
    pub residual: f64,
}

/// `{max_residual, trials, failures}`; residuals are `|U - V| / (1 + |U|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub max_residual: f64,
    pub trials: usize,
    pub tol: f64,
    pub failures: Vec<DualityFailure>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares `U_A(A, B)` with `V_B(C, D)` over random scenarios.
pub fn check_mirror_duality(
    s: &CoefficientSchedule,
    u: &[f64],
    l: f64,
    sigma: f64,
    opts: &DualityCheckOptions,
) -> Result<DualityReport> {
    let n = s.steps();
    check_weights(u, n, "u", false)?;
    let v = match &opts.v_override {
        Some(v) => {
            if v.len() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, found: v.len() });
            }
            v.clone()
        }
        None => dual_weights(u),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut max_residual: f64 = 0.0;
    let mut failures = Vec::new();
    for trial in 0..opts.trials {
        let sc = GradientScenario::random(n, opts.dim, opts.scale, &mut rng);
        let uv = evaluate_u(s, u, l, sigma, opts.norm, &sc)?;
        let vv = evaluate_v(s, &v, l, sigma, opts.norm, &duality_transform(u, &sc)?)?;
        let residual = (uv - vv).abs() / (1.0 + uv.abs());
        max_residual = max_residual.max(residual);
        if !(residual <= opts.tol) {
            failures.push(DualityFailure {
                trial,
                u_value: uv,
                v_value: vv,
                residual,
            });
        }
    }
    Ok(DualityReport {
        max_residual,
        trials: opts.trials,
        tol: opts.tol,
        failures,
    })
}

/// Per-step terms
/// `u_k/(2L) ||A_k - A_{k+1}||_q^2 + sigma/2 ||B_k - B_{k+1}||_p^2
///  + (sigma/L)(theta_k^2 - theta_{k-1}^2) <A_k - A_{k+1}, B_{k+1} - B_k>`,
/// each nonnegative by Young's inequality when `theta_k^2 - theta_k <= theta_{k-1}^2`.
pub fn amd_termwise_certificate(
    theta: &ThetaSequence,
    l: f64,
    sigma: f64,
    norm: NormIndex,
    sc: &GradientScenario,
) -> Result<Vec<f64>> {
    let n = theta.steps();
    sc.check_steps(n)?;
    let u = amd_u(theta, l, sigma);
    let (p, q) = (norm.p(), norm.q());
    Ok((0..n)
        .map(|k| {
            let da = &sc.a[k] - &sc.a[k + 1];
            let db = &sc.b[k + 1] - &sc.b[k];
            let ki = k as isize;
            u[k] / (2.0 * l) * da.norm(q).powi(2)
                + 0.5 * sigma * db.norm(p).powi(2)
                + sigma / l * (theta.sq(ki) - theta.sq(ki - 1)) * dot_dp(&da, &db)
        })
        .collect())
}
