use crate::dgf::Dgf;
use crate::error::{Error, Result};
use crate::objectives::SmoothObjective;
use crate::spaces::{DualVector, PrimalVector, Vector};

use super::schedule::{CoefficientSchedule, ScheduleRole};

/// Iterates of a coupled run with every oracle output kept.
///
/// Primal runs store `x_k`, `y_k`, `grad f(x_k)` and `grad phi*(y_k)`;
/// mirror-dual runs store `q_k`, `r_k`, `grad f(q_k)` and `grad psi*(r_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<PrimalVector>,
    pub duals: Vec<DualVector>,
    pub grads: Vec<DualVector>,
    pub mirrors: Vec<PrimalVector>,
}

impl Trajectory {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn last_point(&self) -> &PrimalVector {
        self.points.last().expect("non-empty trajectory")
    }

    pub fn last_dual(&self) -> &DualVector {
        self.duals.last().expect("non-empty trajectory")
    }

    pub fn last_grad(&self) -> &DualVector {
        self.grads.last().expect("non-empty trajectory")
    }
}

fn finite<S: crate::spaces::Space>(v: Vector<S>, iteration: usize, what: &'static str) -> Result<Vector<S>> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIterate { iteration, what })
    }
}

/// Runs `y_{k+1} = y_k - sum_{i<=k} a(k+1,i) grad f(x_i)` and
/// `x_{k+1} = x_k - sum_{i<=k+1} b(k+1,i) grad phi*(y_i)` from
/// `x_0 = grad phi*(y_0)`.
pub fn run_cfom(
    s: &CoefficientSchedule,
    f: &SmoothObjective,
    phi: &Dgf,
    y0: &DualVector,
) -> Result<Trajectory> {
    if s.role() != ScheduleRole::Primal {
        return Err(Error::Unsupported(
            "run_cfom needs a primal schedule; use run_mirror_dual".into(),
        ));
    }
    y0.check_dim(f.dim())?;
    let n = s.steps();
    let x0 = finite(phi.conjugate_grad(y0)?, 0, "x")?;
    let mut t = Trajectory {
        grads: vec![finite(f.grad(&x0)?, 0, "grad f")?],
        mirrors: vec![x0.clone()],
        points: vec![x0],
        duals: vec![y0.clone()],
    };
    for k in 0..n {
        let mut y = t.duals[k].clone();
        for i in 0..=k {
            let c = s.a(k + 1, i);
            if c != 0.0 {
                y.axpy(-c, &t.grads[i]);
            }
        }
        let y = finite(y, k + 1, "y")?;
        t.mirrors.push(finite(phi.conjugate_grad(&y)?, k + 1, "grad phi*")?);
        t.duals.push(y);
        let mut x = t.points[k].clone();
        for i in 0..=k + 1 {
            let c = s.b(k + 1, i);
            if c != 0.0 {
                x.axpy(-c, &t.mirrors[i]);
            }
        }
        let x = finite(x, k + 1, "x")?;
        t.grads.push(finite(f.grad(&x)?, k + 1, "grad f")?);
        t.points.push(x);
    }
    Ok(t)
}

/// Runs the mirror dual of `s` (either role) from `q_0`:
/// `r_0 = -b(N,N) grad f(q_0)`,
/// `q_{k+1} = q_k - sum_{i<=k} a'(k+1,i) grad psi*(r_i)`,
/// `r_{k+1} = r_k - sum_{i<=k+1} b'(k+1,i) grad f(q_i)`
/// with `(a', b')` the anti-transposed tables.
pub fn run_mirror_dual(
    s: &CoefficientSchedule,
    f: &SmoothObjective,
    psi: &Dgf,
    q0: &PrimalVector,
) -> Result<Trajectory> {
    q0.check_dim(f.dim())?;
    let d = s.dual_form();
    let n = d.steps();
    let g0 = finite(f.grad(q0)?, 0, "grad f")?;
    let r0 = g0.scaled(-d.b(0, 0));
    let mut t = Trajectory {
        mirrors: vec![finite(psi.conjugate_grad(&r0)?, 0, "grad psi*")?],
        points: vec![q0.clone()],
        duals: vec![r0],
        grads: vec![g0],
    };
    for k in 0..n {
        let mut q = t.points[k].clone();
        for i in 0..=k {
            let c = d.a(k + 1, i);
            if c != 0.0 {
                q.axpy(-c, &t.mirrors[i]);
            }
        }
        let q = finite(q, k + 1, "q")?;
        t.grads.push(finite(f.grad(&q)?, k + 1, "grad f")?);
        t.points.push(q);
        let mut r = t.duals[k].clone();
        for i in 0..=k + 1 {
            let c = d.b(k + 1, i);
            if c != 0.0 {
                r.axpy(-c, &t.grads[i]);
            }
        }
        let r = finite(r, k + 1, "r")?;
        t.mirrors.push(finite(psi.conjugate_grad(&r)?, k + 1, "grad psi*")?);
        t.duals.push(r);
    }
    Ok(t)
}
