use crate::error::{invalid, Error, Result};
use crate::objectives::SmoothObjective;
use crate::spaces::PrimalVector;

use super::schedule::{CoefficientSchedule, ScheduleRole};

/// Lower-triangular `N x N` step matrix of a fixed-step method
/// `x_{k+1} = x_k - (1/L) sum_{i<=k} H[k][i] grad f(x_i)` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct HMatrix {
    n: usize,
    data: Vec<f64>,
}

impl HMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut h = Self::zeros(n);
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (i, &v) in row.iter().enumerate() {
                if i > k && v != 0.0 {
                    return Err(invalid(format!("H[{k}][{i}] above the diagonal")));
                }
                h.data[k * n + i] = v;
            }
        }
        Ok(h)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.data[k * self.n + i]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(|r| r.to_vec()).collect()
    }

    /// `H^A[i][j] = H[N-1-j][N-1-i]`.
    pub fn anti_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = self.get(n - 1 - j, n - 1 - i);
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()))
    }
}

/// Step matrix of the schedule under Euclidean mirror maps.
///
/// Primal role: `H = -L * B C A` with `B[k][i] = b(k+1,i)`,
/// `C[i][j] = [j < i]`, `A[j][l] = a(j+1,l)`.
/// Mirror-dual role: `H[k][l] = -L sum_i a(k+1,i) sum_{j=l..=i} b(j,l)`.
pub fn to_h_matrix(s: &CoefficientSchedule, l: f64) -> Result<HMatrix> {
    s.require_valid()?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(invalid(format!("L must be positive, got {l}")));
    }
    let n = s.steps();
    let mut h = HMatrix::zeros(n);
    match s.role() {
        ScheduleRole::Primal => {
            // inner[i][l] = sum_{j=l..i-1} a(j+1, l)
            for k in 0..n {
                for col in 0..=k {
                    let mut acc = 0.0;
                    let mut inner = 0.0;
                    for i in col + 1..=k + 1 {
                        inner += s.a(i, col);
                        acc += s.b(k + 1, i) * inner;
                    }
                    h.data[k * n + col] = -l * acc;
                }
            }
        }
        ScheduleRole::MirrorDual => {
            // inner[i][l] = sum_{j=l..=i} b(j, l)
            for k in 0..n {
                for col in 0..=k {
                    let mut acc = 0.0;
                    let mut inner = 0.0;
                    for i in col..=k {
                        inner += s.b(i, col);
                        acc += s.a(k + 1, i) * inner;
                    }
                    h.data[k * n + col] = -l * acc;
                }
            }
        }
    }
    Ok(h)
}

/// `x_{k+1} = x_k - (1/L) sum_{i<=k} H[k][i] grad f(x_i)`.
pub fn run_fsfom(h: &HMatrix, f: &SmoothObjective, x0: &PrimalVector, l: f64) -> Result<Vec<PrimalVector>> {
    x0.check_dim(f.dim())?;
    let mut xs = vec![x0.clone()];
    let mut grads = Vec::with_capacity(h.size());
    for k in 0..h.size() {
        grads.push(f.grad(&xs[k])?);
        let mut x = xs[k].clone();
        for (i, g) in grads.iter().enumerate() {
            let c = h.get(k, i);
            if c != 0.0 {
                x.axpy(-c / l, &g.to_dual_coordinates());
            }
        }
        if !x.is_finite() {
            return Err(Error::NonFiniteIterate { iteration: k + 1, what: "x" });
        }
        xs.push(x);
    }
    Ok(xs)
}
