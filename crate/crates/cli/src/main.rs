//! `mirrordual` command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 certified bound violated,
//! 3 duality residual above tolerance.

mod trace;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mirrordual::certificates::{amd_u, check_mirror_duality, DualityCheckOptions};
use mirrordual::methods::{amd_schedule, MethodConfig};
use mirrordual::ot::{lp_oracle, solve_ot_with, OtInstanceFile, OtOptions, LP_ORACLE_MAX_CELLS};
use mirrordual::{CoefficientSchedule, NormIndex, ThetaSequence};
use serde::Serialize;

use trace::TraceFile;

#[derive(Parser, Debug)]
#[command(name = "mirrordual", version, about = "Mirror descent, its accelerated variants and their mirror duals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a method config and write its trace as CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Slack allowed on the certified bound.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Recompute a trace from its config and check energies and bound.
    Certify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Compare the primal and mirror-dual residual functionals on random scenarios.
    DualityCheck {
        /// Schedule JSON file, or `amd`.
        #[arg(long)]
        schedule: String,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension of the random scenarios.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long = "L", default_value_t = 1.0)]
        l: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Primal norm index.
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Weights `u_0..u_N`, comma separated. Required with a schedule file.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Option<Vec<f64>>,
        /// Replaces `v_i = 1/u_{N-i}`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Option<Vec<f64>>,
        /// Report path; printed to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the mirror dual of a schedule.
    Dualize {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an optimal transport instance to accuracy `eps`.
    Ot {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        max_evals: Option<usize>,
    },
}

enum Status {
    Ok,
    BoundViolated,
    DualityFailed,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_config(path: &Path) -> Result<MethodConfig> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing config {}", path.display()))
}

fn cmd_run(config: &Path, out: &Path, seed: u64, tol: f64) -> Result<Status> {
    check_tol(tol)?;
    let cfg = load_config(config)?;
    let (t, s) = trace::build(&cfg, seed)?;
    write(out, &t.to_csv())?;
    if !s.bound_ok(tol) {
        eprintln!(
            "bound violated: final value {} exceeds certified bound {}",
            s.final_value.map(trace::num).unwrap_or_default(),
            s.bound.map(trace::num).unwrap_or_default()
        );
        return Ok(Status::BoundViolated);
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CertifyReport {
    rows: usize,
    final_value: Option<f64>,
    bound: Option<f64>,
    energy_max_increase: Option<f64>,
    min_term: Option<f64>,
    bound_ok: bool,
    energy_ok: bool,
}

fn cmd_certify(trace_path: &Path, config: &Path, tol: f64) -> Result<Status> {
    check_tol(tol)?;
    let got = TraceFile::parse(&read(trace_path)?).with_context(|| format!("parsing trace {}", trace_path.display()))?;
    let seed = match got.meta("seed") {
        Some(s) => s.parse().context("trace metadata `seed` is not an integer")?,
        None => bail!("trace has no `seed` metadata"),
    };
    let cfg = load_config(config)?;
    let (want, s) = trace::build(&cfg, seed)?;
    if let Some(m) = trace::first_mismatch(&got, &want, tol) {
        bail!("trace does not match its config: {m}");
    }
    // Energies as printed must also be nonincreasing.
    let printed_ok = got
        .rows
        .windows(2)
        .all(|w| match (w[0].energy, w[1].energy, w[0].psi_star.is_some() == w[1].psi_star.is_some()) {
            (Some(a), Some(b), true) => b <= a + tol,
            _ => true,
        });
    let report = CertifyReport {
        rows: got.rows.len(),
        final_value: s.final_value,
        bound: s.bound,
        energy_max_increase: s.energy_max_increase,
        min_term: s.min_term,
        bound_ok: s.bound_ok(tol),
        energy_ok: s.energy_ok() && printed_ok,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if report.bound_ok && report.energy_ok { Status::Ok } else { Status::BoundViolated })
}

#[allow(clippy::too_many_arguments)]
fn cmd_duality_check(
    schedule: &str,
    n: Option<usize>,
    trials: usize,
    tol: f64,
    seed: u64,
    dim: usize,
    l: f64,
    sigma: f64,
    p: f64,
    u: Option<Vec<f64>>,
    v: Option<Vec<f64>>,
    out: Option<&Path>,
) -> Result<Status> {
    check_tol(tol)?;
    if dim == 0 {
        bail!("--dim must be positive");
    }
    let (s, u) = if schedule == "amd" {
        let n = n.context("--N is required with `amd`")?;
        let s = amd_schedule(n, l, sigma)?;
        let u = match u {
            Some(u) => u,
            None => amd_u(&ThetaSequence::new(n)?, l, sigma),
        };
        (s, u)
    } else {
        let path = Path::new(schedule);
        let s = CoefficientSchedule::from_json(&read(path)?).with_context(|| format!("parsing schedule {schedule}"))?;
        if let Some(n) = n {
            if n != s.steps() {
                bail!("--N {n} disagrees with the schedule's N = {}", s.steps());
            }
        }
        let u = u.context("--u is required with a schedule file")?;
        (s, u)
    };
    let opts = DualityCheckOptions {
        trials,
        dim,
        scale: 1.0,
        seed,
        tol,
        norm: NormIndex::new(p)?,
        v_override: v,
    };
    let report = check_mirror_duality(&s, &u, l, sigma, &opts)?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => write(path, &(text + "\n"))?,
        None => println!("{text}"),
    }
    if report.max_residual <= tol && report.passed() {
        Ok(Status::Ok)
    } else {
        eprintln!("duality residual {:e} exceeds tolerance {tol:e}", report.max_residual);
        Ok(Status::DualityFailed)
    }
}

fn cmd_dualize(schedule: &Path, out: &Path) -> Result<Status> {
    let s = CoefficientSchedule::from_json(&read(schedule)?)
        .with_context(|| format!("parsing schedule {}", schedule.display()))?;
    write(out, &(s.mirror_dual().to_json() + "\n"))?;
    Ok(Status::Ok)
}

fn cmd_ot(instance: &Path, eps: f64, out: &Path, max_evals: Option<usize>) -> Result<Status> {
    let file: OtInstanceFile =
        serde_json::from_str(&read(instance)?).with_context(|| format!("parsing instance {}", instance.display()))?;
    let inst = file.build()?;
    let mut opts = OtOptions::default();
    if let Some(m) = max_evals {
        opts.max_gradient_evals = m;
    }
    let sol = solve_ot_with(&inst, eps, opts)?;
    write(out, &(serde_json::to_string_pretty(&sol.to_file())? + "\n"))?;
    println!("cost {} after N = {}", trace::num(sol.cost), sol.report.n);
    if inst.rows() * inst.cols() <= LP_ORACLE_MAX_CELLS {
        let opt = lp_oracle(&inst)?;
        println!("lp optimum {}, gap {}", trace::num(opt), trace::num(sol.cost - opt));
    }
    Ok(Status::Ok)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        bail!("tolerance must be positive, got {tol}")
    }
}

fn dispatch(cmd: Command) -> Result<Status> {
    match cmd {
        Command::Run { config, out, seed, tol } => cmd_run(&config, &out, seed, tol),
        Command::Certify { trace, config, tol } => cmd_certify(&trace, &config, tol),
        Command::DualityCheck {
            schedule,
            n,
            trials,
            tol,
            seed,
            dim,
            l,
            sigma,
            p,
            u,
            v,
            out,
        } => cmd_duality_check(&schedule, n, trials, tol, seed, dim, l, sigma, p, u, v, out.as_deref()),
        Command::Dualize { schedule, out } => cmd_dualize(&schedule, &out),
        Command::Ot {
            instance,
            eps,
            out,
            max_evals,
        } => cmd_ot(&instance, eps, &out, max_evals),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::BoundViolated) => ExitCode::from(2),
        Ok(Status::DualityFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
