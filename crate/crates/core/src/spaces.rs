//! Finite-dimensional primal and dual spaces.
//!
//! Points of `R^n` and covectors of `(R^n)*` are both stored as dense `f64`
//! arrays, but carry a marker type so that the compiler keeps them apart.
//! The only way to combine the two is the canonical pairing
//! `<u, x> = sum_i u_i x_i`.

use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Index, Neg, Sub};

use crate::error::{invalid, Error, Result};

/// A space marker. Each space knows its dual, and the dual of the dual is
/// the space itself.
pub trait Space: fmt::Debug + Copy + PartialEq + 'static {
    type Dual: Space<Dual = Self>;
    const NAME: &'static str;
}

/// Marker for the primal space `X = R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primal {}

/// Marker for the dual space `X* = (R^n)*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dual {}

impl Space for Primal {
    type Dual = Dual;
    const NAME: &'static str = "primal";
}

impl Space for Dual {
    type Dual = Primal;
    const NAME: &'static str = "dual";
}

/// A dense vector living in space `S`.
#[derive(Clone, PartialEq)]
pub struct Vector<S: Space> {
    data: Vec<f64>,
    _space: PhantomData<fn() -> S>,
}

pub type PrimalVector = Vector<Primal>;
pub type DualVector = Vector<Dual>;

impl<S: Space> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", S::NAME, self.data)
    }
}

impl<S: Space> Vector<S> {
    /// Builds a vector, rejecting empty input and non-finite entries.
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyVector);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: S::NAME });
        }
        Ok(Self::from_raw(data))
    }

    pub fn from_slice(data: &[f64]) -> Result<Self> {
        Self::new(data.to_vec())
    }

    /// Wraps arithmetic output without validation. Callers that need the
    /// finiteness invariant check [`Vector::is_finite`] afterwards.
    pub(crate) fn from_raw(data: Vec<f64>) -> Self {
        Self {
            data,
            _space: PhantomData,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_raw(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// `l_p` norm, `p` in `[1, inf]`.
    pub fn norm(&self, p: f64) -> f64 {
        lp_norm(&self.data, p)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_raw(self.data.iter().map(|v| alpha * v).collect())
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        assert_eq!(self.len(), other.len(), "axpy dimension mismatch");
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += alpha * o;
        }
    }

    /// Entrywise map, keeping the space.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.data.iter().map(|&v| f(v)).collect())
    }

    /// Reinterprets the coordinates as a vector of the dual space. Only
    /// meaningful where the space is identified with its dual through the
    /// Euclidean structure.
    pub fn to_dual_coordinates(&self) -> Vector<S::Dual> {
        Vector::from_raw(self.data.clone())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }
}

impl<S: Space> Index<usize> for Vector<S> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl<S: Space> Add for &Vector<S> {
    type Output = Vector<S>;
    fn add(self, rhs: &Vector<S>) -> Vector<S> {
        assert_eq!(self.len(), rhs.len(), "add dimension mismatch");
        Vector::from_raw(self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl<S: Space> Sub for &Vector<S> {
    type Output = Vector<S>;
    fn sub(self, rhs: &Vector<S>) -> Vector<S> {
        assert_eq!(self.len(), rhs.len(), "sub dimension mismatch");
        Vector::from_raw(self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl<S: Space> Neg for &Vector<S> {
    type Output = Vector<S>;
    fn neg(self) -> Vector<S> {
        self.scaled(-1.0)
    }
}

/// Exponent pair `(p, q)` with `1/p + 1/q = 1`, `p` in `(1, inf)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIndex {
    p: f64,
    q: f64,
}

impl NormIndex {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(invalid(format!("norm index p must lie in (1, inf), got {p}")));
        }
        Ok(Self {
            p,
            q: p / (p - 1.0),
        })
    }

    pub fn euclidean() -> Self {
        Self { p: 2.0, q: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// The index of the dual norm, `(q, p)`.
    pub fn conjugate(&self) -> Self {
        Self {
            p: self.q,
            q: self.p,
        }
    }
}

impl Default for NormIndex {
    fn default() -> Self {
        Self::euclidean()
    }
}

/// `l_p` norm of a slice for `p >= 1` or `p = inf`.
///
/// The sum is taken over entries rescaled by the largest magnitude, so huge
/// or tiny entries do not overflow or underflow the powers.
pub fn lp_norm(x: &[f64], p: f64) -> f64 {
    let max = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() {
        return max;
    }
    if max == 0.0 || max.is_nan() {
        return max;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        let s: f64 = x.iter().map(|v| (v / max) * (v / max)).sum();
        return max * s.sqrt();
    }
    let s: f64 = x.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * s.powf(1.0 / p)
}

/// Pairing between a vector of `S*` and a vector of `S`.
pub fn pair<S: Space>(u: &Vector<S::Dual>, x: &Vector<S>) -> Result<f64> {
    if u.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: u.len(),
        });
    }
    Ok(dot(u.as_slice(), x.as_slice()))
}

/// Canonical pairing `<u, x>` of a covector with a point.
pub fn pairing(u: &DualVector, x: &PrimalVector) -> Result<f64> {
    pair::<Primal>(u, x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Bregman divergence `h(x) - h(x0) - <grad h(x0), x - x0>`.
///
/// Works on either space: for `h` on `X*` the gradient lives in `X`.
pub fn bregman<S: Space>(
    h_value_at: impl Fn(&Vector<S>) -> f64,
    h_grad_at: impl Fn(&Vector<S>) -> Vector<S::Dual>,
    x: &Vector<S>,
    x0: &Vector<S>,
) -> Result<f64> {
    if x.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            found: x.len(),
        });
    }
    let g = h_grad_at(x0);
    if g.len() != x0.len() {
        return Err(Error::DimensionMismatch {
            expected: x0.len(),
            found: g.len(),
        });
    }
    if !g.is_finite() {
        return Err(Error::NonFinite {
            what: "Bregman gradient",
        });
    }
    let diff = x - x0;
    Ok(h_value_at(x) - h_value_at(x0) - pair::<S>(&g, &diff)?)
}

/// Default central-difference step.
pub const FD_STEP: f64 = 1e-5;

/// Componentwise central differences `(f(x + h e_i) - f(x - h e_i)) / 2h`.
pub fn finite_difference_gradient<S: Space>(
    f: impl Fn(&Vector<S>) -> f64,
    x: &Vector<S>,
    step: f64,
) -> Result<Vector<S::Dual>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("finite-difference step must be positive, got {step}")));
    }
    let mut probe = x.clone();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let xi = probe.data[i];
        probe.data[i] = xi + step;
        let fp = f(&probe);
        probe.data[i] = xi - step;
        let fm = f(&probe);
        probe.data[i] = xi;
        if !(fp.is_finite() && fm.is_finite()) {
            return Err(Error::NonFinite {
                what: "finite-difference evaluation",
            });
        }
        out.push((fp - fm) / (2.0 * step));
    }
    Ok(Vector::from_raw(out))
}
