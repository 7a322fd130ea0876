#![allow(dead_code)]

use mirrordual::ot::OtInstance;
use mirrordual::{CoefficientSchedule, DualVector, PrimalVector, Vector};
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub fn normal_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn primal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PrimalVector {
    Vector::new(normal_vec(n, rng)).unwrap()
}

pub fn dual<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DualVector {
    Vector::new(normal_vec(n, rng)).unwrap()
}

/// `theta_N` computed from scratch.
pub fn theta_last(n: usize) -> f64 {
    let mut t = 1.0f64;
    for _ in 1..n {
        t = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
    }
    t
}

pub fn l2sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn lp(v: &[f64], p: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `max_i |a_i - b_i| / (1 + max_i |b_i|)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = 1.0 + b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Valid primal schedule whose iterates stay in the convex hull of the
/// mirror images: row `k+1` of `b` is `w^(k) - w^(k+1)` for random simplex
/// weights `w^(k+1)` on `0..=k+1`.
pub fn random_hull_schedule<R: Rng + ?Sized>(n: usize, a_scale: f64, rng: &mut R) -> CoefficientSchedule {
    let mut s = CoefficientSchedule::zeros(n).unwrap();
    let mut w = vec![1.0];
    for k in 0..n {
        for i in 0..=k {
            s.set_a(k + 1, i, a_scale * rng.random::<f64>()).unwrap();
        }
        let next = simplex(k + 2, rng);
        for (j, nj) in next.iter().enumerate() {
            let prev = w.get(j).copied().unwrap_or(0.0);
            s.set_b(k + 1, j, prev - nj).unwrap();
        }
        w = next;
    }
    s
}

/// Positive nondecreasing weights.
pub fn random_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut u = Vec::with_capacity(n + 1);
    let mut acc = rng.random_range(0.1..2.0);
    for _ in 0..=n {
        u.push(acc);
        acc += rng.random_range(0.0..2.0);
    }
    u
}

pub fn random_ot<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> OtInstance {
    let marginal = |k: usize, rng: &mut R| {
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    let cost = (0..m)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mu = marginal(m, rng);
    let nu = marginal(n, rng);
    OtInstance::new(cost, mu, nu).unwrap()
}
