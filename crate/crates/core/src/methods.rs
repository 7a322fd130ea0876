//! Closed-form mirror descent, accelerated mirror descent and their
//! gradient-reducing mirror duals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cfom::{CoefficientSchedule, Trajectory};
use crate::dgf::{Dgf, DgfDescriptor};
use crate::error::{invalid, Error, Result};
use crate::objectives::{ObjectiveDescriptor, SmoothObjective};
use crate::spaces::{DualVector, PrimalVector, Vector};

/// `theta_0..theta_N` with `theta_j = 0` for `j < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSequence {
    values: Vec<f64>,
}

impl ThetaSequence {
    /// `theta_i = (1 + sqrt(1 + 4 theta_{i-1}^2)) / 2` for `1 <= i <= N-1`,
    /// `theta_N = theta_{N-1}`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N >= 1 required"));
        }
        let mut values = vec![1.0];
        for _ in 1..n {
            let prev: f64 = *values.last().unwrap();
            values.push(0.5 * (1.0 + (1.0 + 4.0 * prev * prev).sqrt()));
        }
        values.push(values[n - 1]);
        Ok(Self { values })
    }

    /// Accepts any nondecreasing `theta_0 = 1, ..., theta_N = theta_{N-1}`
    /// with `theta_i^2 - theta_i <= theta_{i-1}^2`.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = values.len().saturating_sub(1);
        if n == 0 {
            return Err(invalid("N >= 1 required"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "theta" });
        }
        if values[0] != 1.0 {
            return Err(invalid("theta_0 must be 1"));
        }
        if values[n] != values[n - 1] {
            return Err(invalid("theta_N must equal theta_{N-1}"));
        }
        for i in 1..n {
            if values[i] < values[i - 1] {
                return Err(invalid(format!("theta decreases at {i}")));
            }
            let t = values[i];
            if t * t - t > values[i - 1] * values[i - 1] + 1e-12 {
                return Err(invalid(format!("theta_{i}^2 - theta_{i} exceeds theta_{}^2", i - 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `theta_j`, zero for negative `j`.
    pub fn theta(&self, j: isize) -> f64 {
        if j < 0 {
            0.0
        } else {
            self.values[j as usize]
        }
    }

    /// `theta_j^2`.
    pub fn sq(&self, j: isize) -> f64 {
        let t = self.theta(j);
        t * t
    }

    /// `theta_i^2 - theta_i - theta_{i-1}^2` for `1 <= i <= N-1`.
    pub fn recursion_residuals(&self) -> Vec<f64> {
        (1..self.steps())
            .map(|i| {
                let t = self.values[i];
                t * t - t - self.values[i - 1] * self.values[i - 1]
            })
            .collect()
    }
}

pub fn theta_sequence(n: usize) -> Result<ThetaSequence> {
    ThetaSequence::new(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    Md,
    DualMd,
    Amd,
    DualAmd,
    Concat,
}

impl MethodKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Md => "md",
            Self::DualMd => "dual-md",
            Self::Amd => "amd",
            Self::DualAmd => "dual-amd",
            Self::Concat => "concat",
        }
    }

    /// Whether the method drives `psi*(grad f)` down rather than `f`.
    pub fn is_gradient_reducing(self) -> bool {
        matches!(self, Self::DualMd | Self::DualAmd)
    }
}

/// A closed-form run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub method: MethodKind,
    pub l: f64,
    pub sigma: f64,
    /// Step size for MD-type methods.
    pub alpha: Option<f64>,
    pub theta: Option<ThetaSequence>,
    pub trajectory: Trajectory,
    /// `f` at every point of the trajectory.
    pub values: Vec<f64>,
    /// Certified bound on `f(x_N) - f*` (primal methods) or `psi*(r_N)`
    /// (gradient-reducing methods), when the optimum is known.
    pub bound: Option<f64>,
}

impl Trace {
    pub fn steps(&self) -> usize {
        self.trajectory.steps()
    }

    pub fn last_point(&self) -> &PrimalVector {
        self.trajectory.last_point()
    }
}

/// `N` AMD steps followed by `N` dual-AMD steps from `q_0 = x_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcatTrace {
    pub primal: Trace,
    pub dual: Trace,
    /// Certified bound on `psi*(grad f(x_{2N}))`.
    pub bound: Option<f64>,
}

impl ConcatTrace {
    /// `x_{2N} = q_N`.
    pub fn final_point(&self) -> &PrimalVector {
        self.dual.last_point()
    }

    pub fn final_gradient(&self) -> &DualVector {
        self.dual.trajectory.last_grad()
    }
}

fn check_finite<S: crate::spaces::Space>(v: &Vector<S>, iteration: usize, what: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteIterate { iteration, what })
    }
}

fn values_along(f: &SmoothObjective, points: &[PrimalVector]) -> Result<Vec<f64>> {
    points.iter().map(|x| f.value(x)).collect()
}

/// Declared smoothness constant of `f` in the norm of `g`.
pub fn declared_l(f: &SmoothObjective, g: &Dgf) -> Result<f64> {
    f.smoothness_constant(g.norm().p())
}

fn check_step(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("step size must be positive, got {alpha}")))
    }
}

fn check_steps(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("N >= 1 required"))
    } else {
        Ok(())
    }
}

/// `D_phi(x*, x_0)` written as `phi(x*) + phi*(y_0) - <y_0, x*>`.
fn initial_distance(f: &SmoothObjective, phi: &Dgf, y0: &DualVector) -> Result<Option<f64>> {
    f.minimizer().map(|xs| phi.fenchel_residual(xs, y0)).transpose()
}

fn initial_gap(f: &SmoothObjective, q0: &PrimalVector) -> Result<Option<f64>> {
    f.optimal_value().map(|fs| Ok(f.value(q0)? - fs)).transpose()
}

/// `y_{k+1} = y_k - alpha grad f(x_k)`, `x_{k+1} = grad phi*(y_{k+1})`.
pub fn run_md(f: &SmoothObjective, phi: &Dgf, alpha: f64, y0: &DualVector, n: usize) -> Result<Trace> {
    check_step(alpha)?;
    check_steps(n)?;
    y0.check_dim(f.dim())?;
    let x0 = phi.conjugate_grad(y0)?;
    check_finite(&x0, 0, "x")?;
    let mut t = Trajectory {
        grads: vec![f.grad(&x0)?],
        mirrors: vec![x0.clone()],
        points: vec![x0],
        duals: vec![y0.clone()],
    };
    for k in 0..n {
        let mut y = t.duals[k].clone();
        y.axpy(-alpha, &t.grads[k]);
        check_finite(&y, k + 1, "y")?;
        let x = phi.conjugate_grad(&y)?;
        check_finite(&x, k + 1, "x")?;
        t.grads.push(f.grad(&x)?);
        t.mirrors.push(x.clone());
        t.points.push(x);
        t.duals.push(y);
    }
    let bound = initial_distance(f, phi, y0)?.map(|d| d / (alpha * n as f64));
    Ok(Trace {
        method: MethodKind::Md,
        l: f64::NAN,
        sigma: phi.sigma(),
        alpha: Some(alpha),
        theta: None,
        values: values_along(f, &t.points)?,
        trajectory: t,
        bound,
    })
}

/// `r_0 = grad f(q_0)`, `q_{k+1} = q_k - alpha grad psi*(r_k)`,
/// `r_{k+1} = grad f(q_{k+1})`.
pub fn run_dual_md(f: &SmoothObjective, psi: &Dgf, alpha: f64, q0: &PrimalVector, n: usize) -> Result<Trace> {
    check_step(alpha)?;
    check_steps(n)?;
    q0.check_dim(f.dim())?;
    let r0 = f.grad(q0)?;
    let mut t = Trajectory {
        mirrors: vec![psi.conjugate_grad(&r0)?],
        points: vec![q0.clone()],
        grads: vec![r0.clone()],
        duals: vec![r0],
    };
    for k in 0..n {
        let mut q = t.points[k].clone();
        q.axpy(-alpha, &t.mirrors[k]);
        check_finite(&q, k + 1, "q")?;
        let r = f.grad(&q)?;
        check_finite(&r, k + 1, "r")?;
        t.mirrors.push(psi.conjugate_grad(&r)?);
        t.grads.push(r.clone());
        t.duals.push(r);
        t.points.push(q);
    }
    let bound = initial_gap(f, q0)?.map(|g| g / (alpha * n as f64));
    Ok(Trace {
        method: MethodKind::DualMd,
        l: f64::NAN,
        sigma: psi.sigma(),
        alpha: Some(alpha),
        theta: None,
        values: values_along(f, &t.points)?,
        trajectory: t,
        bound,
    })
}

pub fn run_amd(f: &SmoothObjective, phi: &Dgf, y0: &DualVector, n: usize) -> Result<Trace> {
    run_amd_with(f, phi, y0, &ThetaSequence::new(n)?, declared_l(f, phi)?)
}

/// Accelerated mirror descent with an explicit theta sequence and `L`.
pub fn run_amd_with(
    f: &SmoothObjective,
    phi: &Dgf,
    y0: &DualVector,
    theta: &ThetaSequence,
    l: f64,
) -> Result<Trace> {
    check_l(l)?;
    y0.check_dim(f.dim())?;
    let n = theta.steps();
    let sigma = phi.sigma();
    let x0 = phi.conjugate_grad(y0)?;
    check_finite(&x0, 0, "x")?;
    let mut t = Trajectory {
        grads: vec![f.grad(&x0)?],
        mirrors: vec![x0.clone()],
        points: vec![x0],
        duals: vec![y0.clone()],
    };
    for k in 0..n {
        let ki = k as isize;
        let (s_prev, s_k, s_next) = (theta.sq(ki - 1), theta.sq(ki), theta.sq(ki + 1));
        let mut y = t.duals[k].clone();
        y.axpy(-(sigma / l) * (s_k - s_prev), &t.grads[k]);
        check_finite(&y, k + 1, "y")?;
        let b_next = phi.conjugate_grad(&y)?;
        let mut x = t.points[k].scaled(s_k / s_next);
        x.axpy((s_next - s_prev) / s_next, &b_next);
        x.axpy(-(s_k - s_prev) / s_next, &t.mirrors[k]);
        check_finite(&x, k + 1, "x")?;
        t.grads.push(f.grad(&x)?);
        t.mirrors.push(b_next);
        t.points.push(x);
        t.duals.push(y);
    }
    let tn = theta.sq(n as isize);
    let bound = initial_distance(f, phi, y0)?.map(|d| l * d / (sigma * tn));
    Ok(Trace {
        method: MethodKind::Amd,
        l,
        sigma,
        alpha: None,
        theta: Some(theta.clone()),
        values: values_along(f, &t.points)?,
        trajectory: t,
        bound,
    })
}

fn check_l(l: f64) -> Result<()> {
    if l > 0.0 && l.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("L must be positive, got {l}")))
    }
}

pub fn amd_schedule(n: usize, l: f64, sigma: f64) -> Result<CoefficientSchedule> {
    amd_schedule_with(&ThetaSequence::new(n)?, l, sigma)
}

/// Coefficient tables of AMD as a coupled method.
pub fn amd_schedule_with(theta: &ThetaSequence, l: f64, sigma: f64) -> Result<CoefficientSchedule> {
    check_l(l)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let n = theta.steps();
    let sq = |j: usize, shift: isize| theta.sq(j as isize - shift);
    let mut s = CoefficientSchedule::zeros(n)?;
    for k in 0..n {
        s.set_a(k + 1, k, (sigma / l) * (sq(k, 0) - sq(k, 1)))?;
        let inv_gap = 1.0 / sq(k, 0) - 1.0 / sq(k + 1, 0);
        for j in 1..k {
            s.set_b(k + 1, j, (sq(j, 1) - sq(j, 2)) * inv_gap)?;
        }
        s.set_b(
            k + 1,
            k,
            (sq(k, 0) - sq(k, 2)) / sq(k, 0) - (sq(k, 1) - sq(k, 2)) / sq(k + 1, 0),
        )?;
        s.set_b(k + 1, k + 1, -(sq(k + 1, 0) - sq(k, 1)) / sq(k + 1, 0))?;
    }
    Ok(s)
}

pub fn run_dual_amd(f: &SmoothObjective, psi: &Dgf, q0: &PrimalVector, n: usize) -> Result<Trace> {
    run_dual_amd_with(f, psi, q0, &ThetaSequence::new(n)?, declared_l(f, psi)?)
}

/// Dual accelerated mirror descent with an explicit theta sequence and `L`.
pub fn run_dual_amd_with(
    f: &SmoothObjective,
    psi: &Dgf,
    q0: &PrimalVector,
    theta: &ThetaSequence,
    l: f64,
) -> Result<Trace> {
    check_l(l)?;
    if !psi.is_unshifted() {
        return Err(Error::Unsupported(
            "gradient-reducing methods need an unshifted psi".into(),
        ));
    }
    q0.check_dim(f.dim())?;
    let n = theta.steps();
    let ni = n as isize;
    let sigma = psi.sigma();
    let grad0 = f.grad(q0)?;
    let r0 = grad0.scaled((theta.sq(ni) - theta.sq(ni - 2)) / theta.sq(ni));
    let mut g = grad0.scaled(1.0 / theta.sq(ni - 1));
    let mut t = Trajectory {
        mirrors: vec![psi.conjugate_grad(&r0)?],
        points: vec![q0.clone()],
        grads: vec![grad0],
        duals: vec![r0],
    };
    for k in 0..n {
        let j = ni - k as isize;
        let c1 = theta.sq(j - 1) - theta.sq(j - 2);
        let c2 = theta.sq(j - 2) - theta.sq(j - 3);
        let mut q = t.points[k].clone();
        q.axpy(-(sigma / l) * c1, &t.mirrors[k]);
        check_finite(&q, k + 1, "q")?;
        let grad = f.grad(&q)?;
        let dg = (&grad - &t.grads[k]).scaled(1.0 / theta.sq(j - 1));
        g.axpy(1.0, &dg);
        let mut r = t.duals[k].clone();
        r.axpy(c1, &dg);
        r.axpy(c2, &g);
        check_finite(&r, k + 1, "r")?;
        t.mirrors.push(psi.conjugate_grad(&r)?);
        t.grads.push(grad);
        t.points.push(q);
        t.duals.push(r);
    }
    let bound = initial_gap(f, q0)?.map(|gap| l * gap / (sigma * theta.sq(ni)));
    Ok(Trace {
        method: MethodKind::DualAmd,
        l,
        sigma,
        alpha: None,
        theta: Some(theta.clone()),
        values: values_along(f, &t.points)?,
        trajectory: t,
        bound,
    })
}

/// `N` steps of AMD with `phi`, then `N` steps of dual-AMD with `psi` from
/// the last AMD point. `L` is the larger of the two declared constants.
pub fn run_concat(f: &SmoothObjective, phi: &Dgf, psi: &Dgf, y0: &DualVector, n: usize) -> Result<ConcatTrace> {
    let l = declared_l(f, phi)?.max(declared_l(f, psi)?);
    run_concat_with(f, phi, psi, y0, &ThetaSequence::new(n)?, l)
}

pub fn run_concat_with(
    f: &SmoothObjective,
    phi: &Dgf,
    psi: &Dgf,
    y0: &DualVector,
    theta: &ThetaSequence,
    l: f64,
) -> Result<ConcatTrace> {
    let primal = run_amd_with(f, phi, y0, theta, l)?;
    let dual = run_dual_amd_with(f, psi, primal.last_point(), theta, l)?;
    let t4 = theta.sq(theta.steps() as isize).powi(2);
    let bound = initial_distance(f, phi, y0)?.map(|d| l * l * d / (phi.sigma() * psi.sigma() * t4));
    Ok(ConcatTrace { primal, dual, bound })
}

/// Outcome of a sampled convexity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexitySample {
    pub trials: usize,
    /// Smallest sampled Bregman gap; negative means a witnessed violation.
    pub min_gap: f64,
    pub passed: bool,
}

/// Samples `lambda D_phi(x, y) - D_f(x, y)` at random pairs. A negative value
/// witnesses that `lambda phi - f` is not convex; passing is necessary, not
/// sufficient.
pub fn sample_relative_smoothness<R: Rng + ?Sized>(
    f: &SmoothObjective,
    phi: &Dgf,
    lambda: f64,
    trials: usize,
    scale: f64,
    rng: &mut R,
) -> Result<ConvexitySample> {
    let mut min_gap = f64::INFINITY;
    for _ in 0..trials {
        let x = random_vector(f.dim(), scale, rng);
        let y = random_vector(f.dim(), scale, rng);
        let gap = lambda * phi.bregman(&x, &y)? - f.bregman(&x, &y)?;
        min_gap = min_gap.min(gap);
    }
    Ok(ConvexitySample {
        trials,
        min_gap,
        passed: min_gap >= -1e-9,
    })
}

/// Samples `tau D_{f*}(u, v) - D_{psi*}(u, v)`. Only objectives with a
/// closed-form conjugate are supported.
pub fn sample_dual_relative_smoothness<R: Rng + ?Sized>(
    f: &SmoothObjective,
    psi: &Dgf,
    tau: f64,
    trials: usize,
    scale: f64,
    rng: &mut R,
) -> Result<ConvexitySample> {
    let unsupported = || Error::Unsupported(format!("{} has no closed-form conjugate", f.name()));
    let mut min_gap = f64::INFINITY;
    for _ in 0..trials {
        let u: DualVector = random_vector(f.dim(), scale, rng);
        let v: DualVector = random_vector(f.dim(), scale, rng);
        let fu = f.conjugate_value(&u).ok_or_else(unsupported)??;
        let fv = f.conjugate_value(&v).ok_or_else(unsupported)??;
        let gv = f.conjugate_grad(&v).ok_or_else(unsupported)??;
        let d_fstar = fu - fv - crate::spaces::pairing(&(&u - &v), &gv)?;
        let gap = tau * d_fstar - psi.conjugate_bregman(&u, &v)?;
        min_gap = min_gap.min(gap);
    }
    Ok(ConvexitySample {
        trials,
        min_gap,
        passed: min_gap >= -1e-9,
    })
}

fn random_vector<S: crate::spaces::Space, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> Vector<S> {
    Vector::from_raw(
        (0..n)
            .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect(),
    )
}

/// Serialized run description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub method: MethodKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub objective: ObjectiveDescriptor,
    /// `phi` for primal methods, `psi` for gradient-reducing ones.
    /// Defaults to the Euclidean DGF.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dgf: Option<DgfDescriptor>,
    /// `psi` for `concat`; defaults to the Euclidean DGF.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_dgf: Option<DgfDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Relative smoothness constant for `md`; `alpha <= 1/lambda`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Dual relative smoothness constant for `dual-md`; `alpha <= 1/tau`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Overrides the declared smoothness constant.
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Starting point `x_0` (or `q_0`). Drawn from the seed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
}

/// Output of [`MethodConfig::run`].
#[derive(Debug, Clone, PartialEq)]
pub enum MethodRun {
    Single(Trace),
    Concat(ConcatTrace),
}

impl MethodRun {
    pub fn bound(&self) -> Option<f64> {
        match self {
            Self::Single(t) => t.bound,
            Self::Concat(c) => c.bound,
        }
    }
}

/// Everything a config resolves to before running.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub method: MethodKind,
    pub n: usize,
    pub objective: SmoothObjective,
    pub dgf: Dgf,
    pub dual_dgf: Option<Dgf>,
    pub start: PrimalVector,
    pub l: f64,
}

impl MethodConfig {
    pub fn resolve(&self, seed: u64) -> Result<ResolvedConfig> {
        check_steps(self.n)?;
        let objective = self.objective.build()?;
        let start = match &self.start {
            Some(v) => {
                let v = PrimalVector::from_slice(v)?;
                v.check_dim(objective.dim())?;
                v
            }
            None => random_vector(objective.dim(), 1.0, &mut ChaCha8Rng::seed_from_u64(seed)),
        };
        let build = |d: &Option<DgfDescriptor>, shift: Option<&PrimalVector>| match d {
            Some(d) => d.build(shift),
            None => Ok(Dgf::euclidean()),
        };
        let dgf = build(&self.dgf, Some(&start))?;
        let dual_dgf = match self.method {
            MethodKind::Concat => Some(build(&self.dual_dgf, None)?),
            _ => None,
        };
        if let Some(d) = &dual_dgf {
            if !d.is_unshifted() {
                return Err(invalid("dual_dgf must be unshifted"));
            }
        }
        let l = match self.l {
            Some(l) => {
                check_l(l)?;
                l
            }
            None => match (self.method, &dual_dgf) {
                (MethodKind::Md | MethodKind::DualMd, _) => f64::NAN,
                (_, Some(psi)) => declared_l(&objective, &dgf)?.max(declared_l(&objective, psi)?),
                (_, None) => declared_l(&objective, &dgf)?,
            },
        };
        Ok(ResolvedConfig {
            method: self.method,
            n: self.n,
            objective,
            dgf,
            dual_dgf,
            start,
            l,
        })
    }

    fn step(&self, cap: Option<f64>, cap_name: &str) -> Result<f64> {
        let alpha = self
            .alpha
            .ok_or_else(|| invalid(format!("{} needs alpha", self.method.name())))?;
        check_step(alpha)?;
        if let Some(c) = cap {
            check_step(c)?;
            if alpha > 1.0 / c * (1.0 + 1e-12) {
                return Err(invalid(format!("alpha must be at most 1/{cap_name}")));
            }
        }
        Ok(alpha)
    }

    pub fn run(&self, seed: u64) -> Result<MethodRun> {
        let rc = self.resolve(seed)?;
        let f = &rc.objective;
        Ok(match rc.method {
            MethodKind::Md => {
                let alpha = self.step(self.lambda, "lambda")?;
                let y0 = rc.dgf.grad(&rc.start)?;
                MethodRun::Single(run_md(f, &rc.dgf, alpha, &y0, rc.n)?)
            }
            MethodKind::DualMd => {
                let alpha = self.step(self.tau, "tau")?;
                MethodRun::Single(run_dual_md(f, &rc.dgf, alpha, &rc.start, rc.n)?)
            }
            MethodKind::Amd => {
                let y0 = rc.dgf.grad(&rc.start)?;
                MethodRun::Single(run_amd_with(f, &rc.dgf, &y0, &ThetaSequence::new(rc.n)?, rc.l)?)
            }
            MethodKind::DualAmd => MethodRun::Single(run_dual_amd_with(
                f,
                &rc.dgf,
                &rc.start,
                &ThetaSequence::new(rc.n)?,
                rc.l,
            )?),
            MethodKind::Concat => {
                let y0 = rc.dgf.grad(&rc.start)?;
                let psi = rc.dual_dgf.as_ref().expect("concat resolves psi");
                MethodRun::Concat(run_concat_with(f, &rc.dgf, psi, &y0, &ThetaSequence::new(rc.n)?, rc.l)?)
            }
        })
    }
}
