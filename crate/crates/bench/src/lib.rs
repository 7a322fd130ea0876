//! Seeded fixtures shared by the criterion benches.

use mirrordual::ot::OtInstance;
use mirrordual::{DualVector, PrimalVector, SmoothObjective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn diag_quadratic(n: usize, seed: u64) -> SmoothObjective {
    SmoothObjective::random_diag_quadratic(n, &mut rng(seed))
}

pub fn dense_quadratic(n: usize, seed: u64) -> SmoothObjective {
    SmoothObjective::random_dense_quadratic(n, &mut rng(seed))
}

pub fn start(n: usize, seed: u64) -> (PrimalVector, DualVector) {
    let mut r = rng(seed);
    let v: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
    (
        PrimalVector::from_slice(&v).unwrap(),
        DualVector::from_slice(&v).unwrap(),
    )
}

/// Random costs in `[0, 1)` with marginals bounded away from zero.
pub fn ot_instance(m: usize, n: usize, seed: u64) -> OtInstance {
    let mut r = rng(seed);
    let mut marginal = |k: usize| {
        let w: Vec<f64> = (0..k).map(|_| r.random_range(0.2..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect::<Vec<f64>>()
    };
    let mu = marginal(m);
    let nu = marginal(n);
    let cost = (0..m).map(|_| (0..n).map(|_| r.random::<f64>()).collect()).collect();
    OtInstance::new(cost, mu, nu).unwrap()
}
