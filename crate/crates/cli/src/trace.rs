//! CSV trace schema: `#key=value` metadata lines, a header, then one row per
//! iterate with `k, f, grad_norm, psi_star, energy, bound`.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use mirrordual::certificates::{amd_u, dual_energy_trace, dual_weights, primal_energy_trace, ENERGY_TOL};
use mirrordual::methods::{MethodConfig, MethodKind, MethodRun, ResolvedConfig, Trace};
use mirrordual::{Dgf, SmoothObjective};

pub const HEADER: &str = "k,f,grad_norm,psi_star,energy,bound";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub k: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub psi_star: Option<f64>,
    pub energy: Option<f64>,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Row>,
}

/// Numbers the certificate checks need besides the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    /// `f(x_N) - f*` for value-reducing runs, `psi*(grad f(q_N))` otherwise.
    pub final_value: Option<f64>,
    pub bound: Option<f64>,
    pub energy_max_increase: Option<f64>,
    pub min_term: Option<f64>,
}

impl Summary {
    pub fn bound_ok(&self, tol: f64) -> bool {
        match (self.final_value, self.bound) {
            (Some(v), Some(b)) => v <= b + tol,
            _ => true,
        }
    }

    pub fn energy_ok(&self) -> bool {
        self.energy_max_increase.is_none_or(|x| x <= ENERGY_TOL) && self.min_term.is_none_or(|x| x >= -ENERGY_TOL)
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl TraceFile {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "#{k}={v}").unwrap();
        }
        writeln!(out, "{HEADER}").unwrap();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.k,
                num(r.f),
                num(r.grad_norm),
                cell(r.psi_star),
                cell(r.energy),
                cell(r.bound)
            )
            .unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        let mut lines = text.lines().enumerate();
        let mut header = None;
        for (no, line) in lines.by_ref() {
            if let Some(m) = line.strip_prefix('#') {
                let (k, v) = m
                    .split_once('=')
                    .with_context(|| format!("line {}: metadata must be #key=value", no + 1))?;
                meta.push((k.to_string(), v.to_string()));
            } else {
                header = Some(line);
                break;
            }
        }
        if header != Some(HEADER) {
            bail!("trace header must be `{HEADER}`");
        }
        let opt = |s: &str, no: usize| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse().with_context(|| format!("line {}: bad number `{s}`", no + 1))?))
            }
        };
        let mut rows = Vec::new();
        for (no, line) in lines {
            if line.is_empty() {
                continue;
            }
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 6 {
                bail!("line {}: expected 6 columns, found {}", no + 1, c.len());
            }
            let req = |s: &str| opt(s, no)?.with_context(|| format!("line {}: missing value", no + 1));
            rows.push(Row {
                k: c[0].parse().with_context(|| format!("line {}: bad k", no + 1))?,
                f: req(c[1])?,
                grad_norm: req(c[2])?,
                psi_star: opt(c[3], no)?,
                energy: opt(c[4], no)?,
                bound: opt(c[5], no)?,
            });
        }
        if rows.is_empty() {
            bail!("trace has no rows");
        }
        for (i, r) in rows.iter().enumerate() {
            if r.k != i {
                bail!("row {i}: k must count up from 0, found {}", r.k);
            }
        }
        Ok(Self { meta, rows })
    }
}

struct Segment<'a> {
    trace: &'a Trace,
    dgf: &'a Dgf,
    energy: Option<Vec<f64>>,
    /// Offset added to `k`; the first row is skipped when nonzero.
    offset: usize,
}

fn segment_rows(f: &SmoothObjective, seg: &Segment<'_>, bound: Option<f64>) -> Result<Vec<Row>> {
    let t = &seg.trace.trajectory;
    let q = seg.dgf.norm().q();
    let dual = seg.trace.method.is_gradient_reducing();
    let skip = usize::from(seg.offset > 0);
    let mut rows = Vec::new();
    for k in skip..=t.steps() {
        rows.push(Row {
            k: k + seg.offset,
            f: f.value(&t.points[k])?,
            grad_norm: t.grads[k].norm(q),
            psi_star: if dual { Some(seg.dgf.conjugate_value(&t.duals[k])?) } else { None },
            energy: seg.energy.as_ref().map(|e| e[k]),
            bound,
        });
    }
    Ok(rows)
}

struct EnergyStats {
    values: Vec<f64>,
    max_increase: f64,
    min_term: f64,
}

fn amd_energy(f: &SmoothObjective, phi: &Dgf, tr: &Trace) -> Result<Option<EnergyStats>> {
    let (Some(xs), Some(theta)) = (f.minimizer(), tr.theta.as_ref()) else {
        return Ok(None);
    };
    let u = amd_u(theta, tr.l, tr.sigma);
    let e = primal_energy_trace(&tr.trajectory, xs, &u, f, phi, tr.l)?;
    Ok(Some(EnergyStats {
        max_increase: e.max_increase(),
        min_term: e.min_term(),
        values: e.values,
    }))
}

fn dual_amd_energy(f: &SmoothObjective, psi: &Dgf, tr: &Trace) -> Result<Option<EnergyStats>> {
    let Some(theta) = tr.theta.as_ref() else {
        return Ok(None);
    };
    let v = dual_weights(&amd_u(theta, tr.l, tr.sigma));
    let e = dual_energy_trace(&tr.trajectory, &v, f, psi, tr.l, f.optimal_value())?;
    Ok(Some(EnergyStats {
        max_increase: e.max_increase(),
        min_term: e.min_term(),
        values: e.values,
    }))
}

fn merge(stats: &[&Option<EnergyStats>]) -> (Option<f64>, Option<f64>) {
    let present: Vec<&EnergyStats> = stats.iter().filter_map(|s| s.as_ref()).collect();
    if present.is_empty() {
        return (None, None);
    }
    (
        Some(present.iter().map(|s| s.max_increase).fold(f64::NEG_INFINITY, f64::max)),
        Some(present.iter().map(|s| s.min_term).fold(f64::INFINITY, f64::min)),
    )
}

fn psi_star_of_last_grad(psi: &Dgf, tr: &Trace) -> Result<f64> {
    Ok(psi.conjugate_value(tr.trajectory.last_grad())?)
}

fn fmt_p(d: &Dgf) -> String {
    num(d.norm().p())
}

/// Runs `cfg` with `seed` and lays the result out as a trace.
pub fn build(cfg: &MethodConfig, seed: u64) -> Result<(TraceFile, Summary)> {
    let rc: ResolvedConfig = cfg.resolve(seed)?;
    let run = cfg.run(seed)?;
    let f = &rc.objective;
    let bound = run.bound();
    let mut meta = vec![
        ("method".to_string(), rc.method.name().to_string()),
        ("N".to_string(), rc.n.to_string()),
    ];
    let (rows, summary) = match &run {
        MethodRun::Single(tr) => {
            if tr.l.is_finite() {
                meta.push(("L".into(), num(tr.l)));
            }
            if let Some(a) = tr.alpha {
                meta.push(("alpha".into(), num(a)));
            }
            meta.push(("sigma".into(), num(tr.sigma)));
            meta.push(("p".into(), fmt_p(&rc.dgf)));
            let stats = match tr.method {
                MethodKind::Amd => amd_energy(f, &rc.dgf, tr)?,
                MethodKind::DualAmd => dual_amd_energy(f, &rc.dgf, tr)?,
                _ => None,
            };
            let seg = Segment {
                trace: tr,
                dgf: &rc.dgf,
                energy: stats.as_ref().map(|s| s.values.clone()),
                offset: 0,
            };
            let rows = segment_rows(f, &seg, bound)?;
            let final_value = if tr.method.is_gradient_reducing() {
                Some(psi_star_of_last_grad(&rc.dgf, tr)?)
            } else {
                f.optimal_value().map(|fs| tr.values[tr.steps()] - fs)
            };
            let (energy_max_increase, min_term) = merge(&[&stats]);
            (
                rows,
                Summary {
                    final_value,
                    bound,
                    energy_max_increase,
                    min_term,
                },
            )
        }
        MethodRun::Concat(c) => {
            let psi = rc.dual_dgf.as_ref().expect("concat resolves psi");
            meta.push(("L".into(), num(c.primal.l)));
            meta.push(("sigma".into(), num(c.primal.sigma)));
            meta.push(("p".into(), fmt_p(&rc.dgf)));
            meta.push(("sigma_dual".into(), num(c.dual.sigma)));
            meta.push(("p_dual".into(), fmt_p(psi)));
            let su = amd_energy(f, &rc.dgf, &c.primal)?;
            let sv = dual_amd_energy(f, psi, &c.dual)?;
            let mut rows = segment_rows(
                f,
                &Segment {
                    trace: &c.primal,
                    dgf: &rc.dgf,
                    energy: su.as_ref().map(|s| s.values.clone()),
                    offset: 0,
                },
                bound,
            )?;
            rows.extend(segment_rows(
                f,
                &Segment {
                    trace: &c.dual,
                    dgf: psi,
                    energy: sv.as_ref().map(|s| s.values.clone()),
                    offset: rc.n,
                },
                bound,
            )?);
            let (energy_max_increase, min_term) = merge(&[&su, &sv]);
            (
                rows,
                Summary {
                    final_value: Some(psi_star_of_last_grad(psi, &c.dual)?),
                    bound,
                    energy_max_increase,
                    min_term,
                },
            )
        }
    };
    meta.push(("seed".into(), seed.to_string()));
    Ok((TraceFile { meta, rows }, summary))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn close_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => close(x, y, tol),
        (None, None) => true,
        _ => false,
    }
}

/// First cell where `got` deviates from `want` beyond `tol` (relative).
pub fn first_mismatch(got: &TraceFile, want: &TraceFile, tol: f64) -> Option<String> {
    for key in ["method", "N"] {
        if got.meta(key) != want.meta(key) {
            return Some(format!("metadata `{key}`: {:?} vs {:?}", got.meta(key), want.meta(key)));
        }
    }
    if got.rows.len() != want.rows.len() {
        return Some(format!("{} rows vs {} expected", got.rows.len(), want.rows.len()));
    }
    for (g, w) in got.rows.iter().zip(&want.rows) {
        let ok = close(g.f, w.f, tol)
            && close(g.grad_norm, w.grad_norm, tol)
            && close_opt(g.psi_star, w.psi_star, tol)
            && close_opt(g.energy, w.energy, tol)
            && close_opt(g.bound, w.bound, tol);
        if !ok {
            return Some(format!("row k={}", g.k));
        }
    }
    None
}
