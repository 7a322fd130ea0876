//! Smooth convex test objectives with declared smoothness constants.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ot::{OtInstance, OtInstanceFile};
use crate::spaces::{pairing, DualVector, PrimalVector, Vector};

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// `1/2 (x-b)^T diag(d) (x-b)`, `d >= 0`.
    DiagQuadratic { d: Vec<f64>, b: PrimalVector },
    /// `1/2 (x-b)^T A (x-b)`, `A` symmetric PSD.
    DenseQuadratic {
        a: DMatrix<f64>,
        b: PrimalVector,
        spectral_norm: f64,
    },
    /// `r log sum_i exp(x_i / r)`.
    LogSumExp { r: f64, n: usize },
    /// Entropic OT dual `h(u, v)` over the stacked vector `(u, v)`.
    OtDual { instance: OtInstance, r: f64 },
}

/// A differentiable convex objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothObjective {
    kind: ObjectiveKind,
    dim: usize,
}

impl SmoothObjective {
    pub fn diag_quadratic(d: Vec<f64>, b: PrimalVector) -> Result<Self> {
        b.check_dim(d.len())?;
        if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("diagonal entries must be finite and nonnegative"));
        }
        if d.iter().all(|&v| v == 0.0) {
            return Err(invalid("diagonal quadratic needs some positive curvature (L > 0)"));
        }
        let dim = d.len();
        Ok(Self {
            kind: ObjectiveKind::DiagQuadratic { d, b },
            dim,
        })
    }

    pub fn dense_quadratic(a: DMatrix<f64>, b: PrimalVector) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(invalid("quadratic matrix must be square"));
        }
        b.check_dim(n)?;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "quadratic matrix" });
        }
        let scale = a.amax().max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(invalid("quadratic matrix must be symmetric"));
                }
            }
        }
        let eig = a.clone().symmetric_eigen();
        let min = eig.eigenvalues.min();
        let max = eig.eigenvalues.max();
        if min < -1e-10 * scale {
            return Err(invalid(format!(
                "quadratic matrix must be positive semidefinite (min eigenvalue {min:e})"
            )));
        }
        if max <= 0.0 {
            return Err(invalid("quadratic matrix must be nonzero (L > 0)"));
        }
        Ok(Self {
            kind: ObjectiveKind::DenseQuadratic {
                a,
                b,
                spectral_norm: max,
            },
            dim: n,
        })
    }

    pub fn log_sum_exp(r: f64, n: usize) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("temperature must be positive, got {r}")));
        }
        if n == 0 {
            return Err(Error::EmptyVector);
        }
        Ok(Self {
            kind: ObjectiveKind::LogSumExp { r, n },
            dim: n,
        })
    }

    pub fn ot_dual(instance: OtInstance, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("regularization must be positive, got {r}")));
        }
        let dim = instance.rows() + instance.cols();
        Ok(Self {
            kind: ObjectiveKind::OtDual { instance, r },
            dim,
        })
    }

    /// Random diagonal quadratic with curvatures in `[0.05, 10]` and a
    /// standard normal minimizer.
    pub fn random_diag_quadratic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let d = (0..n).map(|_| rng.random_range(0.05..10.0)).collect();
        let b = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Self::diag_quadratic(d, Vector::from_raw(b)).expect("valid random quadratic")
    }

    /// Random dense PSD quadratic `A = M^T M / n` with a standard normal
    /// minimizer.
    pub fn random_dense_quadratic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let m = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(rng));
        let mut a = m.transpose() * &m / n as f64;
        // Exact symmetry regardless of rounding in the product.
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = s;
                a[(j, i)] = s;
            }
        }
        let b = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Self::dense_quadratic(a, Vector::from_raw(b)).expect("valid random quadratic")
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ObjectiveKind::DiagQuadratic { .. } => "diag-quadratic",
            ObjectiveKind::DenseQuadratic { .. } => "dense-quadratic",
            ObjectiveKind::LogSumExp { .. } => "log-sum-exp",
            ObjectiveKind::OtDual { .. } => "ot-dual",
        }
    }

    pub fn value(&self, x: &PrimalVector) -> Result<f64> {
        x.check_dim(self.dim)?;
        Ok(match &self.kind {
            ObjectiveKind::DiagQuadratic { d, b } => d
                .iter()
                .zip(x.iter().zip(b.iter()))
                .map(|(di, (xi, bi))| 0.5 * di * (xi - bi) * (xi - bi))
                .sum(),
            ObjectiveKind::DenseQuadratic { a, b, .. } => {
                let z = DVector::from_column_slice((x - b).as_slice());
                0.5 * z.dot(&(a * &z))
            }
            ObjectiveKind::LogSumExp { r, .. } => log_sum_exp(x.as_slice(), *r),
            ObjectiveKind::OtDual { instance, r } => {
                let (u, v) = x.as_slice().split_at(instance.rows());
                crate::ot::ot_dual_value(instance, *r, u, v)?
            }
        })
    }

    pub fn grad(&self, x: &PrimalVector) -> Result<DualVector> {
        x.check_dim(self.dim)?;
        Ok(match &self.kind {
            ObjectiveKind::DiagQuadratic { d, b } => Vector::from_raw(
                d.iter()
                    .zip(x.iter().zip(b.iter()))
                    .map(|(di, (xi, bi))| di * (xi - bi))
                    .collect(),
            ),
            ObjectiveKind::DenseQuadratic { a, b, .. } => {
                let z = DVector::from_column_slice((x - b).as_slice());
                Vector::from_raw((a * z).as_slice().to_vec())
            }
            ObjectiveKind::LogSumExp { r, .. } => Vector::from_raw(softmax(x.as_slice(), *r)),
            ObjectiveKind::OtDual { instance, r } => {
                let (u, v) = x.as_slice().split_at(instance.rows());
                let (gu, gv) = crate::ot::ot_dual_grad(instance, *r, u, v)?;
                Vector::from_raw(gu.into_iter().chain(gv).collect())
            }
        })
    }

    /// Declared smoothness constant w.r.t. `l_p` (gradients measured in the
    /// dual `l_q` norm). `p` may be any value in `[1, inf]`.
    pub fn smoothness_constant(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(invalid(format!("norm exponent must be >= 1, got {p}")));
        }
        let unsupported = || {
            Err(Error::Unsupported(format!(
                "{} has no declared smoothness constant w.r.t. l_{p}",
                self.name()
            )))
        };
        match &self.kind {
            // ||D z||_q <= max d ||z||_q <= max d ||z||_p since q >= p.
            ObjectiveKind::DiagQuadratic { d, .. } => {
                if p <= 2.0 {
                    Ok(d.iter().cloned().fold(0.0, f64::max))
                } else {
                    unsupported()
                }
            }
            ObjectiveKind::DenseQuadratic { spectral_norm, .. } => {
                if p == 2.0 {
                    Ok(*spectral_norm)
                } else {
                    unsupported()
                }
            }
            // Smooth w.r.t. l_inf with constant 1/r, hence w.r.t. every l_p.
            ObjectiveKind::LogSumExp { r, .. } => Ok(1.0 / r),
            // The Hessian form is Var_P(u_i + v_j) / r. That is at most
            // ||(u,v)||_2^2 / r, but reaches 4 ||(u,v)||_inf^2 / r.
            ObjectiveKind::OtDual { r, .. } => Ok(if p <= 2.0 { 1.0 / r } else { 4.0 / r }),
        }
    }

    /// Analytic minimizer, when one is known.
    pub fn minimizer(&self) -> Option<&PrimalVector> {
        match &self.kind {
            ObjectiveKind::DiagQuadratic { b, .. } | ObjectiveKind::DenseQuadratic { b, .. } => {
                Some(b)
            }
            _ => None,
        }
    }

    /// Analytic optimal value, when one is known.
    pub fn optimal_value(&self) -> Option<f64> {
        match &self.kind {
            ObjectiveKind::DiagQuadratic { .. } | ObjectiveKind::DenseQuadratic { .. } => Some(0.0),
            _ => None,
        }
    }

    /// `f*(y)` for diagonal quadratics with strictly positive curvature:
    /// `1/2 sum y_i^2 / d_i + <y, b>`. `None` where the conjugate is not
    /// available in closed form.
    pub fn conjugate_value(&self, y: &DualVector) -> Option<Result<f64>> {
        match &self.kind {
            ObjectiveKind::DiagQuadratic { d, b } if d.iter().all(|&v| v > 0.0) => Some(
                y.check_dim(self.dim).and_then(|_| {
                    let quad: f64 = y.iter().zip(d).map(|(yi, di)| 0.5 * yi * yi / di).sum();
                    Ok(quad + pairing(y, b)?)
                }),
            ),
            _ => None,
        }
    }

    /// `grad f*(y) = b + y / d` for diagonal quadratics with strictly
    /// positive curvature.
    pub fn conjugate_grad(&self, y: &DualVector) -> Option<Result<PrimalVector>> {
        match &self.kind {
            ObjectiveKind::DiagQuadratic { d, b } if d.iter().all(|&v| v > 0.0) => Some(
                y.check_dim(self.dim).map(|_| {
                    Vector::from_raw(y.iter().zip(d).zip(b.iter()).map(|((yi, di), bi)| bi + yi / di).collect())
                }),
            ),
            _ => None,
        }
    }

    /// `D_f(x, y) = f(x) - f(y) - <grad f(y), x - y>`.
    pub fn bregman(&self, x: &PrimalVector, y: &PrimalVector) -> Result<f64> {
        let g = self.grad(y)?;
        Ok(self.value(x)? - self.value(y)? - pairing(&g, &(x - y))?)
    }

    pub fn descriptor(&self) -> ObjectiveDescriptor {
        match &self.kind {
            ObjectiveKind::DiagQuadratic { d, b } => ObjectiveDescriptor::DiagQuadratic {
                d: d.clone(),
                b: Some(b.as_slice().to_vec()),
            },
            ObjectiveKind::DenseQuadratic { a, b, .. } => ObjectiveDescriptor::DenseQuadratic {
                a: a.row_iter().map(|r| r.iter().cloned().collect()).collect(),
                b: Some(b.as_slice().to_vec()),
            },
            ObjectiveKind::LogSumExp { r, n } => ObjectiveDescriptor::LogSumExp { r: *r, n: *n },
            ObjectiveKind::OtDual { instance, r } => ObjectiveDescriptor::OtDual {
                instance: instance.to_file(),
                r: *r,
            },
        }
    }
}

/// `r log sum exp(x_i / r)` with max subtraction.
pub(crate) fn log_sum_exp(x: &[f64], r: f64) -> f64 {
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = x.iter().map(|v| ((v - m) / r).exp()).sum();
    m + r * s.ln()
}

pub(crate) fn softmax(x: &[f64], r: f64) -> Vec<f64> {
    let m = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| ((v - m) / r).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Serialized objective, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectiveDescriptor {
    DiagQuadratic {
        d: Vec<f64>,
        #[serde(default)]
        b: Option<Vec<f64>>,
    },
    DenseQuadratic {
        a: Vec<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<f64>>,
    },
    LogSumExp {
        r: f64,
        n: usize,
    },
    OtDual {
        instance: OtInstanceFile,
        r: f64,
    },
}

impl ObjectiveDescriptor {
    pub fn build(&self) -> Result<SmoothObjective> {
        let offset = |b: &Option<Vec<f64>>, n: usize| match b {
            Some(b) => PrimalVector::from_slice(b),
            None => Ok(PrimalVector::zeros(n)),
        };
        match self {
            Self::DiagQuadratic { d, b } => SmoothObjective::diag_quadratic(d.clone(), offset(b, d.len())?),
            Self::DenseQuadratic { a, b } => {
                let n = a.len();
                if n == 0 || a.iter().any(|row| row.len() != n) {
                    return Err(invalid("quadratic matrix must be a non-empty square array"));
                }
                let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);
                SmoothObjective::dense_quadratic(m, offset(b, n)?)
            }
            Self::LogSumExp { r, n } => SmoothObjective::log_sum_exp(*r, *n),
            Self::OtDual { instance, r } => SmoothObjective::ot_dual(instance.build()?, *r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{finite_difference_gradient, FD_STEP};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pv(v: &[f64]) -> PrimalVector {
        PrimalVector::from_slice(v).unwrap()
    }

    #[test]
    fn value_examples() {
        let f = SmoothObjective::diag_quadratic(vec![1.0, 4.0], PrimalVector::zeros(2)).unwrap();
        assert_abs_diff_eq!(f.value(&pv(&[1.0, 1.0])).unwrap(), 2.5, epsilon = 1e-15);

        let f = SmoothObjective::log_sum_exp(1.0, 2).unwrap();
        assert_abs_diff_eq!(f.value(&pv(&[0.0, 0.0])).unwrap(), 2f64.ln(), epsilon = 1e-15);

        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let f = SmoothObjective::dense_quadratic(a, PrimalVector::zeros(2)).unwrap();
        assert_abs_diff_eq!(f.value(&pv(&[1.0, 0.0])).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn grad_examples() {
        let f = SmoothObjective::diag_quadratic(vec![1.0, 4.0], PrimalVector::zeros(2)).unwrap();
        assert_eq!(f.grad(&pv(&[1.0, 1.0])).unwrap().as_slice(), &[1.0, 4.0]);
        let f = SmoothObjective::log_sum_exp(1.0, 2).unwrap();
        assert_eq!(f.grad(&pv(&[0.0, 0.0])).unwrap().as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn grads_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let objs = vec![
            SmoothObjective::random_diag_quadratic(5, &mut rng),
            SmoothObjective::random_dense_quadratic(4, &mut rng),
            SmoothObjective::log_sum_exp(0.7, 6).unwrap(),
        ];
        for f in &objs {
            for _ in 0..20 {
                let x: Vec<f64> = (0..f.dim()).map(|_| StandardNormal.sample(&mut rng)).collect();
                let x = PrimalVector::new(x).unwrap();
                let g = f.grad(&x).unwrap();
                let fd = finite_difference_gradient(|x: &PrimalVector| f.value(x).unwrap(), &x, FD_STEP)
                    .unwrap();
                let err = crate::spaces::lp_norm(&(&g - &fd).into_vec(), 2.0);
                assert!(err <= 1e-6 * g.norm(2.0).max(1.0), "{}: {err}", f.name());
            }
        }
    }

    #[test]
    fn smoothness_constants() {
        let f = SmoothObjective::diag_quadratic(vec![1.0, 4.0], PrimalVector::zeros(2)).unwrap();
        assert_eq!(f.smoothness_constant(2.0).unwrap(), 4.0);
        assert_eq!(f.smoothness_constant(1.5).unwrap(), 4.0);
        assert!(matches!(f.smoothness_constant(3.0), Err(Error::Unsupported(_))));

        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let f = SmoothObjective::dense_quadratic(a, PrimalVector::zeros(2)).unwrap();
        assert_abs_diff_eq!(f.smoothness_constant(2.0).unwrap(), 3.0, epsilon = 1e-12);
        assert!(f.smoothness_constant(1.5).is_err());
    }

    #[test]
    fn quadratic_optimum_is_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for f in [
            SmoothObjective::random_diag_quadratic(6, &mut rng),
            SmoothObjective::random_dense_quadratic(6, &mut rng),
        ] {
            let xs = f.minimizer().unwrap();
            assert!((f.value(xs).unwrap() - f.optimal_value().unwrap()).abs() <= 1e-10);
            assert!(f.grad(xs).unwrap().norm(2.0) <= 1e-8);
        }
    }

    #[test]
    fn rejects_bad_quadratics() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(SmoothObjective::dense_quadratic(a, PrimalVector::zeros(2)).is_err());
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(SmoothObjective::dense_quadratic(a, PrimalVector::zeros(2)).is_err());
        assert!(SmoothObjective::diag_quadratic(vec![1.0, -1.0], PrimalVector::zeros(2)).is_err());
        assert!(SmoothObjective::diag_quadratic(vec![0.0], PrimalVector::zeros(1)).is_err());
        assert!(SmoothObjective::log_sum_exp(0.0, 2).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let f = SmoothObjective::log_sum_exp(1.0, 3).unwrap();
        assert!(matches!(
            f.value(&pv(&[1.0])),
            Err(Error::DimensionMismatch { expected: 3, found: 1 })
        ));
    }

    #[test]
    fn conjugate_of_diag_quadratic() {
        let f = SmoothObjective::diag_quadratic(vec![2.0, 4.0], pv(&[1.0, -1.0])).unwrap();
        // f*(grad f(x)) = <grad f(x), x> - f(x)
        let x = pv(&[0.3, 0.7]);
        let g = f.grad(&x).unwrap();
        let lhs = f.conjugate_value(&g).unwrap().unwrap();
        let rhs = pairing(&g, &x).unwrap() - f.value(&x).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        assert!(SmoothObjective::log_sum_exp(1.0, 2).unwrap().conjugate_value(&g).is_none());
    }

    #[test]
    fn descriptor_builds() {
        let json = r#"{"kind":"diag-quadratic","d":[1.0,4.0]}"#;
        let d: ObjectiveDescriptor = serde_json::from_str(json).unwrap();
        let f = d.build().unwrap();
        assert_eq!(f.minimizer().unwrap(), &PrimalVector::zeros(2));
        let json = r#"{"kind":"dense-quadratic","a":[[2.0,1.0],[1.0,2.0]],"b":[1.0,1.0]}"#;
        let d: ObjectiveDescriptor = serde_json::from_str(json).unwrap();
        assert_eq!(d.build().unwrap().name(), "dense-quadratic");
    }
}
