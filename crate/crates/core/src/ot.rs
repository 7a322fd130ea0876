//! Entropy-regularized discrete optimal transport.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::dgf::Dgf;
use crate::error::{invalid, Error, Result};
use crate::methods::run_concat;
use crate::objectives::SmoothObjective;
use crate::spaces::{lp_norm, DualVector};

/// Cost matrix and marginals of a discrete transport problem.
#[derive(Debug, Clone, PartialEq)]
pub struct OtInstance {
    m: usize,
    n: usize,
    /// Row-major `m x n` costs.
    cost: Vec<f64>,
    mu: Vec<f64>,
    nu: Vec<f64>,
}

/// JSON form: `{"C": [[...]], "mu": [...], "nu": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OtInstanceFile {
    #[serde(rename = "C")]
    pub cost: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl OtInstanceFile {
    pub fn build(&self) -> Result<OtInstance> {
        OtInstance::new(self.cost.clone(), self.mu.clone(), self.nu.clone())
    }
}

fn check_marginal(v: &[f64], name: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(invalid(format!("{name} must have strictly positive finite entries")));
    }
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("{name} must sum to 1 (sum is {s})")));
    }
    Ok(())
}

impl OtInstance {
    pub fn new(cost: Vec<Vec<f64>>, mu: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        check_marginal(&mu, "mu")?;
        check_marginal(&nu, "nu")?;
        let (m, n) = (mu.len(), nu.len());
        if cost.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: cost.len() });
        }
        for row in &cost {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
        }
        let cost: Vec<f64> = cost.into_iter().flatten().collect();
        if cost.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(invalid("costs must be finite and nonnegative"));
        }
        Ok(Self { m, n, cost, mu, nu })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn cost(&self, i: usize, j: usize) -> f64 {
        self.cost[i * self.n + j]
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    /// Entrywise max `|C_ij|`.
    pub fn cost_inf_norm(&self) -> f64 {
        self.cost.iter().cloned().fold(0.0, f64::max)
    }

    pub fn to_file(&self) -> OtInstanceFile {
        OtInstanceFile {
            cost: self.cost.chunks(self.n).map(|r| r.to_vec()).collect(),
            mu: self.mu.clone(),
            nu: self.nu.clone(),
        }
    }

    fn check_duals(&self, r: f64, u: &[f64], v: &[f64]) -> Result<()> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid(format!("regularization must be positive, got {r}")));
        }
        if u.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: u.len() });
        }
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok(())
    }

    /// Exponents `(u_i + v_j - c_ij)/r` shifted by their max, exponentiated.
    /// Returns the unnormalized weights and the shift.
    fn shifted_kernel(&self, r: f64, u: &[f64], v: &[f64]) -> (Vec<f64>, f64) {
        let z: Vec<f64> = (0..self.m)
            .cartesian_product(0..self.n)
            .map(|(i, j)| (u[i] + v[j] - self.cost(i, j)) / r)
            .collect();
        let top = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (z.into_iter().map(|t| (t - top).exp()).collect(), top)
    }
}

/// `h(u, v) = r log sum exp((u_i + v_j - c_ij)/r) - <mu, u> - <nu, v>`.
pub fn ot_dual_value(inst: &OtInstance, r: f64, u: &[f64], v: &[f64]) -> Result<f64> {
    inst.check_duals(r, u, v)?;
    let (w, top) = inst.shifted_kernel(r, u, v);
    let s: f64 = w.iter().sum();
    let lin: f64 = crate::spaces::dot(&inst.mu, u) + crate::spaces::dot(&inst.nu, v);
    Ok(r * (top + s.ln()) - lin)
}

/// `(P 1 - mu, P^T 1 - nu)` with `P` the softmax plan.
pub fn ot_dual_grad(inst: &OtInstance, r: f64, u: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let plan = plan_from_dual(inst, r, u, v)?;
    let gu = plan.row_sums().iter().zip(&inst.mu).map(|(a, b)| a - b).collect();
    let gv = plan.col_sums().iter().zip(&inst.nu).map(|(a, b)| a - b).collect();
    Ok((gu, gv))
}

/// Nonnegative `m x n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl TransportPlan {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if m == 0 || n == 0 {
            return Err(Error::EmptyVector);
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.len() });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { what: "transport plan" });
        }
        Ok(Self { m, n, data })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.data.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.m).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// `<C, X>`.
    pub fn cost(&self, inst: &OtInstance) -> f64 {
        self.data.iter().zip(&inst.cost).map(|(x, c)| x * c).sum()
    }

    /// Max absolute deviation of the row and column sums from `mu`, `nu`.
    pub fn marginal_residual(&self, inst: &OtInstance) -> f64 {
        let (rs, cs) = (self.row_sums(), self.col_sums());
        let rows = rs.iter().zip(&inst.mu).map(|(a, b)| (a - b).abs());
        let cols = cs.iter().zip(&inst.nu).map(|(a, b)| (a - b).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn l1_distance(&self, other: &TransportPlan) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).sum()
    }
}

/// `X = B / sum(B)` with `B_ij = exp((u_i + v_j - c_ij)/r)`.
pub fn plan_from_dual(inst: &OtInstance, r: f64, u: &[f64], v: &[f64]) -> Result<TransportPlan> {
    inst.check_duals(r, u, v)?;
    let (w, _) = inst.shifted_kernel(r, u, v);
    let s: f64 = w.iter().sum();
    Ok(TransportPlan {
        m: inst.m,
        n: inst.n,
        data: w.into_iter().map(|x| x / s).collect(),
    })
}

/// Row cap, column cap, then a rank-one correction onto the marginals.
pub fn round_plan(inst: &OtInstance, x: &TransportPlan) -> Result<TransportPlan> {
    if x.m != inst.m || x.n != inst.n {
        return Err(Error::DimensionMismatch {
            expected: inst.m * inst.n,
            found: x.m * x.n,
        });
    }
    if x.data.iter().any(|v| *v < 0.0) {
        return Err(invalid("transport plan has negative entries"));
    }
    let mut out = x.data.clone();
    let n = inst.n;
    for (i, row) in out.chunks_mut(n).enumerate() {
        let s: f64 = row.iter().sum();
        if s > inst.mu[i] {
            let scale = inst.mu[i] / s;
            row.iter_mut().for_each(|v| *v *= scale);
        }
    }
    for j in 0..n {
        let s: f64 = (0..inst.m).map(|i| out[i * n + j]).sum();
        if s > inst.nu[j] {
            let scale = inst.nu[j] / s;
            (0..inst.m).for_each(|i| out[i * n + j] *= scale);
        }
    }
    let capped = TransportPlan { m: inst.m, n, data: out };
    let err_r: Vec<f64> = inst.mu.iter().zip(capped.row_sums()).map(|(a, b)| (a - b).max(0.0)).collect();
    let err_c: Vec<f64> = inst.nu.iter().zip(capped.col_sums()).map(|(a, b)| (a - b).max(0.0)).collect();
    let mass: f64 = err_r.iter().sum();
    if mass == 0.0 {
        return Ok(capped);
    }
    let mut data = capped.data;
    for i in 0..inst.m {
        for j in 0..n {
            data[i * n + j] += err_r[i] * err_c[j] / mass;
        }
    }
    Ok(TransportPlan { m: inst.m, n, data })
}

/// Solver options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtOptions {
    /// Budget of gradient evaluations across all doubling rounds.
    pub max_gradient_evals: usize,
}

impl Default for OtOptions {
    fn default() -> Self {
        Self { max_gradient_evals: 1 << 20 }
    }
}

/// Terms of the suboptimality chain for the returned plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    pub grad_l1: f64,
    pub tolerance: f64,
    pub gradient_evals: usize,
    /// `r log(mn)`.
    pub entropy_term: f64,
    /// `4 ||C||_inf ||grad h||_1`.
    pub gradient_term: f64,
    /// `entropy_term + gradient_term`; bounds `<C, X_hat> - OPT`.
    pub suboptimality_bound: f64,
    /// `||X_hat - X||_1`.
    pub rounding_distance: f64,
    /// `2 ||grad h||_1`.
    pub rounding_bound: f64,
    pub marginal_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OtSolution {
    pub plan: TransportPlan,
    /// Unrounded softmax plan at the final dual point.
    pub raw_plan: TransportPlan,
    pub cost: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub report: OtReport,
}

/// Result file: `{"cost", "N", "grad_l1", "plan", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtResultFile {
    pub cost: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub grad_l1: f64,
    pub plan: Vec<Vec<f64>>,
    pub report: OtReport,
}

impl OtSolution {
    pub fn to_file(&self) -> OtResultFile {
        OtResultFile {
            cost: self.cost,
            n: self.report.n,
            grad_l1: self.report.grad_l1,
            plan: self.plan.to_rows(),
            report: self.report.clone(),
        }
    }
}

pub fn solve_ot(inst: &OtInstance, eps: f64) -> Result<OtSolution> {
    solve_ot_with(inst, eps, OtOptions::default())
}

/// Runs the accelerated primal/dual concatenation on the dual objective from
/// the origin, doubling `N` until `||grad h||_1 <= eps / (8 ||C||_inf)`, then
/// rounds the softmax plan.
pub fn solve_ot_with(inst: &OtInstance, eps: f64, opts: OtOptions) -> Result<OtSolution> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid(format!("accuracy must be positive, got {eps}")));
    }
    let (m, n) = (inst.m, inst.n);
    let log_mn = ((m * n) as f64).ln();
    if log_mn <= 0.0 {
        return Err(invalid("transport problem needs at least two cells"));
    }
    let r = eps / (2.0 * log_mn);
    let c_inf = inst.cost_inf_norm();
    let tolerance = if c_inf > 0.0 { eps / (8.0 * c_inf) } else { f64::INFINITY };

    let f = SmoothObjective::ot_dual(inst.clone(), r)?;
    let phi = Dgf::euclidean();
    let y0 = DualVector::zeros(m + n);

    let mut steps = 1usize;
    let mut evals = 0usize;
    loop {
        // N AMD steps and N dual steps, each touching N + 1 gradients.
        let cost = 2 * (steps + 1);
        if evals + cost > opts.max_gradient_evals {
            return Err(Error::IterationCap {
                evaluations: evals + cost,
                cap: opts.max_gradient_evals,
            });
        }
        evals += cost;
        let run = run_concat(&f, &phi, &phi, &y0, steps)?;
        let z = run.final_point();
        let g = run.final_gradient();
        let grad_l1 = lp_norm(g.as_slice(), 1.0);
        if grad_l1 <= tolerance {
            let (u, v) = z.as_slice().split_at(m);
            let raw = plan_from_dual(inst, r, u, v)?;
            let plan = round_plan(inst, &raw)?;
            let report = OtReport {
                n: steps,
                r,
                grad_l1,
                tolerance,
                gradient_evals: evals,
                entropy_term: r * log_mn,
                gradient_term: 4.0 * c_inf * grad_l1,
                suboptimality_bound: r * log_mn + 4.0 * c_inf * grad_l1,
                rounding_distance: plan.l1_distance(&raw),
                rounding_bound: 2.0 * grad_l1,
                marginal_residual: plan.marginal_residual(inst),
            };
            return Ok(OtSolution {
                cost: plan.cost(inst),
                plan,
                raw_plan: raw,
                u: u.to_vec(),
                v: v.to_vec(),
                report,
            });
        }
        steps *= 2;
    }
}

/// Largest `m * n` handled by vertex enumeration.
pub const LP_ORACLE_MAX_CELLS: usize = 12;

/// Exact optimal transport cost for tiny instances.
pub fn lp_oracle(inst: &OtInstance) -> Result<f64> {
    let (m, n) = (inst.m, inst.n);
    if m == 2 && n == 2 {
        let (mu1, nu1) = (inst.mu[0], inst.nu[0]);
        let lo = (mu1 + nu1 - 1.0).max(0.0);
        let hi = mu1.min(nu1);
        let at = |t: f64| {
            inst.cost(0, 0) * t
                + inst.cost(0, 1) * (mu1 - t)
                + inst.cost(1, 0) * (nu1 - t)
                + inst.cost(1, 1) * (1.0 - mu1 - nu1 + t)
        };
        return Ok(at(lo).min(at(hi)));
    }
    if m * n > LP_ORACLE_MAX_CELLS {
        return Err(Error::InstanceTooLarge { m, n });
    }
    vertex_plans(inst)
        .into_iter()
        .map(|x| x.iter().zip(&inst.cost).map(|(a, c)| a * c).sum::<f64>())
        .min_by(f64::total_cmp)
        .ok_or_else(|| invalid("transportation polytope has no vertex"))
}

/// Basic feasible solutions: spanning trees of the bipartite row/column graph
/// whose tree-determined flows are nonnegative.
fn vertex_plans(inst: &OtInstance) -> Vec<Vec<f64>> {
    let (m, n) = (inst.m, inst.n);
    let mut out = Vec::new();
    for cells in (0..m * n).combinations(m + n - 1) {
        if let Some(x) = tree_flow(inst, &cells) {
            if x.iter().all(|v| *v >= -1e-12) {
                out.push(x.into_iter().map(|v| v.max(0.0)).collect());
            }
        }
    }
    out
}

/// Solves the marginal equations on the given cells by peeling leaves.
/// `None` when the cells do not form a spanning tree.
fn tree_flow(inst: &OtInstance, cells: &[usize]) -> Option<Vec<f64>> {
    let (m, n) = (inst.m, inst.n);
    // Nodes 0..m are rows, m..m+n are columns.
    let mut remaining: Vec<f64> = inst.mu.iter().chain(&inst.nu).cloned().collect();
    let mut open: Vec<bool> = vec![true; cells.len()];
    let ends = |c: usize| (c / n, m + c % n);
    let mut x = vec![0.0; m * n];
    for _ in 0..cells.len() {
        let mut degree = vec![0usize; m + n];
        for (k, &c) in cells.iter().enumerate() {
            if open[k] {
                let (a, b) = ends(c);
                degree[a] += 1;
                degree[b] += 1;
            }
        }
        let (k, leaf) = cells.iter().enumerate().find_map(|(k, &c)| {
            let (a, b) = ends(c);
            match (open[k], degree[a] == 1, degree[b] == 1) {
                (true, true, _) => Some((k, a)),
                (true, _, true) => Some((k, b)),
                _ => None,
            }
        })?;
        let (a, b) = ends(cells[k]);
        let other = if leaf == a { b } else { a };
        let flow = remaining[leaf];
        x[cells[k]] = flow;
        remaining[leaf] = 0.0;
        remaining[other] -= flow;
        open[k] = false;
    }
    // A cycle leaves no leaf and returns early above.
    if remaining.iter().any(|v| v.abs() > 1e-9) {
        return None;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_by_two(c: [[f64; 2]; 2], mu: [f64; 2], nu: [f64; 2]) -> OtInstance {
        OtInstance::new(
            c.iter().map(|r| r.to_vec()).collect(),
            mu.to_vec(),
            nu.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn dual_value_example() {
        let inst = two_by_two([[0.0; 2]; 2], [0.5, 0.5], [0.5, 0.5]);
        let h = ot_dual_value(&inst, 1.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(h, 4f64.ln(), epsilon = 1e-15);
        let (gu, gv) = ot_dual_grad(&inst, 1.0, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(gu.iter().chain(&gv).all(|g| g.abs() < 1e-15));
        assert!(ot_dual_value(&inst, 0.0, &[0.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn translation_invariance() {
        let inst = two_by_two([[0.3, 1.0], [2.0, 0.1]], [0.4, 0.6], [0.7, 0.3]);
        let (u, v) = ([0.2, -0.5], [1.0, 0.3]);
        let h = ot_dual_value(&inst, 0.2, &u, &v).unwrap();
        let t = 3.7;
        let h2 = ot_dual_value(&inst, 0.2, &[u[0] + t, u[1] + t], &[v[0] - t, v[1] - t]).unwrap();
        assert_abs_diff_eq!(h, h2, epsilon = 1e-10);
    }

    #[test]
    fn plan_example() {
        let inst = two_by_two([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5]);
        let x = plan_from_dual(&inst, 0.1, &[0.0, 0.0], &[0.0, 0.0]).unwrap();
        let e = (-10f64).exp();
        let z = 2.0 + 2.0 * e;
        assert_abs_diff_eq!(x.get(0, 0), 1.0 / z, epsilon = 1e-15);
        assert_abs_diff_eq!(x.get(0, 1), e / z, epsilon = 1e-15);
        assert_abs_diff_eq!(x.total(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn small_temperature_does_not_overflow() {
        let inst = two_by_two([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5]);
        let h = ot_dual_value(&inst, 1e-4, &[50.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(h.is_finite());
        let x = plan_from_dual(&inst, 1e-4, &[50.0, 0.0], &[0.0, 0.0]).unwrap();
        assert!(x.entries().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn rounding_example() {
        let inst = two_by_two([[0.0; 2]; 2], [0.5, 0.5], [0.5, 0.5]);
        let x = TransportPlan::new(vec![vec![0.3, 0.3], vec![0.2, 0.2]]).unwrap();
        let xh = round_plan(&inst, &x).unwrap();
        for v in xh.entries() {
            assert_abs_diff_eq!(*v, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn rounding_keeps_feasible_plans() {
        let inst = two_by_two([[0.0; 2]; 2], [0.4, 0.6], [0.5, 0.5]);
        let x = TransportPlan::new(vec![vec![0.2, 0.2], vec![0.3, 0.3]]).unwrap();
        assert_eq!(round_plan(&inst, &x).unwrap(), x);
        let bad = TransportPlan::new(vec![vec![-0.1, 0.2], vec![0.3, 0.6]]).unwrap();
        assert!(round_plan(&inst, &bad).is_err());
    }

    #[test]
    fn oracle_examples() {
        let inst = two_by_two([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5]);
        assert_eq!(lp_oracle(&inst).unwrap(), 0.0);
        let inst = two_by_two([[2.5; 2]; 2], [0.3, 0.7], [0.6, 0.4]);
        assert_abs_diff_eq!(lp_oracle(&inst).unwrap(), 2.5, epsilon = 1e-15);
        // t in [0, 0.3]: cost(t) = t + 2(0.3-t) + 3(0.6-t) + 4(0.1+t) = 2.8
        // independent of t.
        let inst = two_by_two([[1.0, 2.0], [3.0, 4.0]], [0.3, 0.7], [0.6, 0.4]);
        assert_abs_diff_eq!(lp_oracle(&inst).unwrap(), 2.8, epsilon = 1e-12);
    }

    #[test]
    fn enumeration_agrees_with_closed_form() {
        let inst = two_by_two([[0.7, 0.2], [0.1, 0.9]], [0.35, 0.65], [0.8, 0.2]);
        let best = vertex_plans(&inst)
            .into_iter()
            .map(|x| x.iter().zip(&inst.cost).map(|(a, c)| a * c).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(best, lp_oracle(&inst).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn oracle_rejects_large() {
        let inst = OtInstance::new(vec![vec![0.0; 4]; 4], vec![0.25; 4], vec![0.25; 4]).unwrap();
        assert!(matches!(lp_oracle(&inst), Err(Error::InstanceTooLarge { m: 4, n: 4 })));
    }

    #[test]
    fn instance_validation() {
        assert!(OtInstance::new(vec![vec![0.0, 1.0]], vec![1.0], vec![0.6, 0.6]).is_err());
        assert!(OtInstance::new(vec![vec![0.0, -1.0]], vec![1.0], vec![0.5, 0.5]).is_err());
        assert!(OtInstance::new(vec![vec![0.0, 1.0]], vec![1.0], vec![1.0, 0.0]).is_err());
        assert!(OtInstance::new(vec![vec![0.0]], vec![1.0], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn solve_two_by_two() {
        let inst = two_by_two([[0.0, 1.0], [1.0, 0.0]], [0.5, 0.5], [0.5, 0.5]);
        let sol = solve_ot(&inst, 0.05).unwrap();
        assert!(sol.cost <= 0.05);
        assert!(sol.report.marginal_residual <= 1e-10);
        assert!(sol.report.rounding_distance <= sol.report.rounding_bound + 1e-10);
        assert!(solve_ot(&inst, 0.0).is_err());
    }

    #[test]
    fn solve_respects_cap() {
        let inst = two_by_two([[0.0, 1.0], [1.0, 0.0]], [0.9, 0.1], [0.2, 0.8]);
        let r = solve_ot_with(&inst, 1e-3, OtOptions { max_gradient_evals: 8 });
        assert!(matches!(r, Err(Error::IterationCap { .. })));
    }

    #[test]
    fn zero_cost_needs_one_round() {
        let inst = two_by_two([[0.0; 2]; 2], [0.3, 0.7], [0.5, 0.5]);
        let sol = solve_ot(&inst, 0.1).unwrap();
        assert_eq!(sol.report.n, 1);
        assert_eq!(sol.cost, 0.0);
    }
}
