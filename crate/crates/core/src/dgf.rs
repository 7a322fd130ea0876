//! Distance-generating functions and their mirror maps.
//!
//! Every DGF here is `phi(x) = 1/2 ||x - x0||_p^2` for some `p` in `(1, 2]`
//! and an optional shift `x0`, so `phi* (y) = 1/2 ||y||_q^2 + <y, x0>` and both
//! mirror maps are signed-power maps. The unshifted kinds satisfy
//! `phi*(0) = 0` with `0` the unique minimizer of `phi*`, which is what the
//! gradient-reducing methods need from `psi`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spaces::{pairing, DualVector, NormIndex, PrimalVector, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DgfKind {
    Euclidean,
    ShiftedEuclidean,
    SquaredLp,
    ShiftedSquaredLp,
}

/// A distance-generating function bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct Dgf {
    kind: DgfKind,
    norm: NormIndex,
    shift: Option<PrimalVector>,
    sigma: f64,
}

/// Gradient of `1/2 ||z||_t^2`: `||z||_t^{2-t} sign(z_i) |z_i|^{t-1}`,
/// evaluated as `||z|| sign(z_i) (|z_i| / ||z||)^{t-1}` to stay in range.
/// Zero maps to zero.
pub(crate) fn signed_power_map(z: &[f64], t: f64) -> Vec<f64> {
    if t == 2.0 {
        return z.to_vec();
    }
    let n = crate::spaces::lp_norm(z, t);
    if n == 0.0 {
        return vec![0.0; z.len()];
    }
    z.iter()
        .map(|&v| n * v.signum() * (v.abs() / n).powf(t - 1.0))
        .collect()
}

impl Dgf {
    /// `1/2 ||x||_2^2`, 1-strongly convex w.r.t. `l_2`.
    pub fn euclidean() -> Self {
        Self {
            kind: DgfKind::Euclidean,
            norm: NormIndex::euclidean(),
            shift: None,
            sigma: 1.0,
        }
    }

    /// `1/2 ||x - x0||_2^2`.
    pub fn shifted_euclidean(x0: PrimalVector) -> Self {
        Self {
            kind: DgfKind::ShiftedEuclidean,
            norm: NormIndex::euclidean(),
            shift: Some(x0),
            sigma: 1.0,
        }
    }

    /// `1/2 ||x||_p^2`, `(p-1)`-strongly convex w.r.t. `l_p` for `p` in `(1, 2]`.
    pub fn squared_lp(p: f64) -> Result<Self> {
        let norm = Self::lp_index(p)?;
        Ok(Self {
            kind: DgfKind::SquaredLp,
            norm,
            shift: None,
            sigma: p - 1.0,
        })
    }

    /// `1/2 ||x - x0||_p^2`.
    pub fn shifted_squared_lp(p: f64, x0: PrimalVector) -> Result<Self> {
        let norm = Self::lp_index(p)?;
        Ok(Self {
            kind: DgfKind::ShiftedSquaredLp,
            norm,
            shift: Some(x0),
            sigma: p - 1.0,
        })
    }

    fn lp_index(p: f64) -> Result<NormIndex> {
        let norm = NormIndex::new(p)?;
        // Above 2 the strong-convexity modulus is dimension dependent.
        if p > 2.0 {
            return Err(invalid(format!(
                "squared-lp DGF requires p in (1, 2], got {p}"
            )));
        }
        Ok(norm)
    }

    pub fn kind(&self) -> DgfKind {
        self.kind
    }

    pub fn norm(&self) -> NormIndex {
        self.norm
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn shift(&self) -> Option<&PrimalVector> {
        self.shift.as_ref()
    }

    /// True when `phi*(0) = 0` and `0` is its unique minimizer.
    pub fn is_unshifted(&self) -> bool {
        self.shift.is_none()
    }

    fn check_shift(&self, n: usize) -> Result<()> {
        match &self.shift {
            Some(s) => s.check_dim(n),
            None => Ok(()),
        }
    }

    /// `phi(x) = 1/2 ||x - x0||_p^2`.
    pub fn value(&self, x: &PrimalVector) -> Result<f64> {
        self.check_shift(x.len())?;
        let z = match &self.shift {
            Some(s) => x - s,
            None => x.clone(),
        };
        Ok(0.5 * z.norm(self.norm.p()).powi(2))
    }

    /// `phi*(y) = 1/2 ||y||_q^2 + <y, x0>`.
    pub fn conjugate_value(&self, y: &DualVector) -> Result<f64> {
        self.check_shift(y.len())?;
        let mut v = 0.5 * y.norm(self.norm.q()).powi(2);
        if let Some(s) = &self.shift {
            v += pairing(y, s)?;
        }
        Ok(v)
    }

    /// `grad phi*(y)`, the map from dual variables back to points.
    pub fn conjugate_grad(&self, y: &DualVector) -> Result<PrimalVector> {
        self.check_shift(y.len())?;
        let mut x = Vector::from_raw(signed_power_map(y.as_slice(), self.norm.q()));
        if let Some(s) = &self.shift {
            x.axpy(1.0, s);
        }
        Ok(x)
    }

    /// `grad phi(x)`.
    pub fn grad(&self, x: &PrimalVector) -> Result<DualVector> {
        self.check_shift(x.len())?;
        let z = match &self.shift {
            Some(s) => x - s,
            None => x.clone(),
        };
        Ok(Vector::from_raw(signed_power_map(z.as_slice(), self.norm.p())))
    }

    /// `D_phi(x, x0)`.
    pub fn bregman(&self, x: &PrimalVector, x0: &PrimalVector) -> Result<f64> {
        let g = self.grad(x0)?;
        Ok(self.value(x)? - self.value(x0)? - pairing(&g, &(x - x0))?)
    }

    /// `D_{phi*}(y, y0)`.
    pub fn conjugate_bregman(&self, y: &DualVector, y0: &DualVector) -> Result<f64> {
        let g = self.conjugate_grad(y0)?;
        Ok(self.conjugate_value(y)? - self.conjugate_value(y0)? - pairing(&(y - y0), &g)?)
    }

    /// `phi(x) + phi*(y) - <y, x>`, nonnegative by the Fenchel inequality and
    /// equal to `D_phi(x, grad phi*(y))`.
    pub fn fenchel_residual(&self, x: &PrimalVector, y: &DualVector) -> Result<f64> {
        Ok(self.value(x)? + self.conjugate_value(y)? - pairing(y, x)?)
    }

    pub fn descriptor(&self) -> DgfDescriptor {
        DgfDescriptor {
            kind: self.kind,
            p: match self.kind {
                DgfKind::Euclidean | DgfKind::ShiftedEuclidean => None,
                _ => Some(self.norm.p()),
            },
            x0: self.shift.as_ref().map(|s| s.as_slice().to_vec()),
        }
    }
}

/// Serialized form of a DGF: `{"kind": "squared-lp", "p": 1.5, "x0": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgfDescriptor {
    pub kind: DgfKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
}

impl DgfDescriptor {
    /// Builds the DGF. Shifted kinds without an explicit `x0` use
    /// `default_shift` (typically the run's start point).
    pub fn build(&self, default_shift: Option<&PrimalVector>) -> Result<Dgf> {
        let shift = || -> Result<PrimalVector> {
            match (&self.x0, default_shift) {
                (Some(v), _) => PrimalVector::from_slice(v),
                (None, Some(s)) => Ok(s.clone()),
                (None, None) => Err(invalid("shifted DGF needs x0")),
            }
        };
        let p = || self.p.ok_or_else(|| invalid("squared-lp DGF needs p"));
        match self.kind {
            DgfKind::Euclidean => Ok(Dgf::euclidean()),
            DgfKind::ShiftedEuclidean => Ok(Dgf::shifted_euclidean(shift()?)),
            DgfKind::SquaredLp => Dgf::squared_lp(p()?),
            DgfKind::ShiftedSquaredLp => Dgf::shifted_squared_lp(p()?, shift()?),
        }
    }
}
