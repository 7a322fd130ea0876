use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which side of a primal/mirror-dual pair a coefficient table describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleRole {
    /// `b(0,0) = -1`; executed by [`run_cfom`](super::run_cfom).
    #[default]
    Primal,
    /// Anti-transposed tables; `b(N,N) = -1` and `b(0,0)` is the
    /// coefficient of the initial dual iterate.
    MirrorDual,
}

impl ScheduleRole {
    pub fn flipped(self) -> Self {
        match self {
            Self::Primal => Self::MirrorDual,
            Self::MirrorDual => Self::Primal,
        }
    }
}

/// Dense lower-triangular coefficient tables `a(k,i)`, `0 <= i < k <= N`,
/// and `b(k,i)`, `0 <= i <= k <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSchedule {
    n: usize,
    role: ScheduleRole,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl CoefficientSchedule {
    /// All coefficients zero apart from the fixed `-1` corner.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("N >= 1 required"));
        }
        let mut s = Self {
            n,
            role: ScheduleRole::Primal,
            a: vec![0.0; (n + 1) * (n + 1)],
            b: vec![0.0; (n + 1) * (n + 1)],
        };
        s.b[0] = -1.0;
        Ok(s)
    }

    /// Builds a primal schedule from coefficient functions. `b_fn` is not
    /// consulted at `(0, 0)`.
    pub fn from_fns(
        n: usize,
        a_fn: impl Fn(usize, usize) -> f64,
        b_fn: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        for k in 1..=n {
            for i in 0..k {
                s.set_a(k, i, a_fn(k, i))?;
            }
            for i in 0..=k {
                s.set_b(k, i, b_fn(k, i))?;
            }
        }
        Ok(s)
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn role(&self) -> ScheduleRole {
        self.role
    }

    fn idx(&self, k: usize, i: usize) -> usize {
        k * (self.n + 1) + i
    }

    /// `a(k, i)`; zero outside `0 <= i < k <= N`.
    pub fn a(&self, k: usize, i: usize) -> f64 {
        if i < k && k <= self.n {
            self.a[self.idx(k, i)]
        } else {
            0.0
        }
    }

    /// `b(k, i)`; zero outside `0 <= i <= k <= N`.
    pub fn b(&self, k: usize, i: usize) -> f64 {
        if i <= k && k <= self.n {
            self.b[self.idx(k, i)]
        } else {
            0.0
        }
    }

    fn fixed_corner(&self) -> usize {
        match self.role {
            ScheduleRole::Primal => 0,
            ScheduleRole::MirrorDual => self.n,
        }
    }

    pub fn set_a(&mut self, k: usize, i: usize, value: f64) -> Result<()> {
        if !(i < k && k <= self.n) {
            return Err(invalid(format!("a({k},{i}) outside 0 <= i < k <= {}", self.n)));
        }
        if !value.is_finite() {
            return Err(Error::NonFinite { what: "schedule coefficient" });
        }
        let at = self.idx(k, i);
        self.a[at] = value;
        Ok(())
    }

    pub fn set_b(&mut self, k: usize, i: usize, value: f64) -> Result<()> {
        if !(i <= k && k <= self.n) {
            return Err(invalid(format!("b({k},{i}) outside 0 <= i <= k <= {}", self.n)));
        }
        if !value.is_finite() {
            return Err(Error::NonFinite { what: "schedule coefficient" });
        }
        let c = self.fixed_corner();
        if k == c && i == c {
            if value != -1.0 {
                return Err(invalid(format!("b({c},{c}) is fixed to -1")));
            }
            return Ok(());
        }
        let at = self.idx(k, i);
        self.b[at] = value;
        Ok(())
    }

    /// The anti-transposed pair `a'(k,i) = a(N-i, N-k)`,
    /// `b'(k,i) = b(N-i, N-k)`. An exact involution.
    pub fn mirror_dual(&self) -> Self {
        let n = self.n;
        let mut out = Self {
            n,
            role: self.role.flipped(),
            a: vec![0.0; (n + 1) * (n + 1)],
            b: vec![0.0; (n + 1) * (n + 1)],
        };
        for k in 0..=n {
            for i in 0..=k {
                let at = out.idx(k, i);
                out.a[at] = self.a(n - i, n - k);
                out.b[at] = self.b(n - i, n - k);
            }
        }
        out
    }

    /// The same method viewed from the primal side.
    pub fn primal_form(&self) -> Self {
        match self.role {
            ScheduleRole::Primal => self.clone(),
            ScheduleRole::MirrorDual => self.mirror_dual(),
        }
    }

    /// The same method viewed from the mirror-dual side.
    pub fn dual_form(&self) -> Self {
        match self.role {
            ScheduleRole::Primal => self.mirror_dual(),
            ScheduleRole::MirrorDual => self.clone(),
        }
    }

    /// Coefficient of `grad f(q_0)` in `r_0 = -b(N,N) grad f(q_0)`.
    pub fn r0_coefficient(&self) -> f64 {
        -self.primal_form().b(self.n, self.n)
    }

    /// Row sums `sum_{j<=k} b(k,j)` of the primal form for `k = 1..=N`.
    pub fn validate(&self) -> ValidityReport {
        let p = self.primal_form();
        let mut residuals = Vec::with_capacity(self.n);
        let mut valid = true;
        for k in 1..=self.n {
            let row = (0..=k).map(|j| p.b(k, j));
            let (sum, mag) = row.fold((0.0, 0.0), |(s, m), v| (s + v, m + v.abs()));
            if sum.abs() > VALIDITY_TOL * mag.max(1.0) {
                valid = false;
            }
            residuals.push(sum);
        }
        let max_residual = residuals.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        ValidityReport {
            valid,
            max_residual,
            residuals,
        }
    }

    /// Errors with [`Error::ScheduleInvalid`] unless [`validate`](Self::validate) passes.
    pub fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            Ok(())
        } else {
            Err(Error::ScheduleInvalid {
                max_residual: report.max_residual,
            })
        }
    }

    /// Weights `w[k][j]` with `x_k = sum_j w[k][j] grad phi*(y_j)` for the
    /// primal form, `k = 0..=N`.
    pub fn hull_weights(&self) -> Vec<Vec<f64>> {
        let p = self.primal_form();
        let mut out = vec![vec![1.0]];
        for k in 0..self.n {
            let w = (0..=k + 1)
                .map(|j| {
                    let base = if j == 0 { 1.0 } else { 0.0 };
                    base - (j.saturating_sub(1)..=k).map(|i| p.b(i + 1, j)).sum::<f64>()
                })
                .collect();
            out.push(w);
        }
        out
    }

    pub fn to_file(&self) -> ScheduleFile {
        let corner = self.fixed_corner();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for k in 0..=self.n {
            for i in 0..=k {
                let av = self.a(k, i);
                if i < k && av != 0.0 {
                    a.push((k, i, av));
                }
                let bv = self.b(k, i);
                if bv != 0.0 && !(k == corner && i == corner) {
                    b.push((k, i, bv));
                }
            }
        }
        ScheduleFile {
            n: self.n,
            role: self.role,
            a,
            b,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScheduleFile =
            serde_json::from_str(text).map_err(|e| invalid(format!("schedule file: {e}")))?;
        file.build()
    }
}

const VALIDITY_TOL: f64 = 1e-12;

/// Per-row residuals of the convex-hull condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub max_residual: f64,
    /// `residuals[k-1] = sum_j b(k, j)`.
    pub residuals: Vec<f64>,
}

fn is_primal(role: &ScheduleRole) -> bool {
    *role == ScheduleRole::Primal
}

/// JSON schedule: `{"N": 3, "a": [[k,i,v],...], "b": [[k,i,v],...]}`.
/// Omitted entries are zero; the fixed `-1` corner is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default, skip_serializing_if = "is_primal")]
    pub role: ScheduleRole,
    #[serde(default)]
    pub a: Vec<(usize, usize, f64)>,
    #[serde(default)]
    pub b: Vec<(usize, usize, f64)>,
}

impl ScheduleFile {
    pub fn build(&self) -> Result<CoefficientSchedule> {
        let mut s = CoefficientSchedule::zeros(self.n)?;
        if self.role == ScheduleRole::MirrorDual {
            s.role = ScheduleRole::MirrorDual;
            s.b[0] = 0.0;
            let at = s.idx(self.n, self.n);
            s.b[at] = -1.0;
        }
        let corner = s.fixed_corner();
        let mut seen = BTreeMap::new();
        for &(k, i, v) in &self.a {
            if seen.insert(('a', k, i), ()).is_some() {
                return Err(invalid(format!("duplicate entry a({k},{i})")));
            }
            s.set_a(k, i, v)?;
        }
        for &(k, i, v) in &self.b {
            if seen.insert(('b', k, i), ()).is_some() {
                return Err(invalid(format!("duplicate entry b({k},{i})")));
            }
            if k == corner && i == corner {
                // Forced on load.
                continue;
            }
            s.set_b(k, i, v)?;
        }
        Ok(s)
    }
}
