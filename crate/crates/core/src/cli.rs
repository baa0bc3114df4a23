//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 divergence or no
//! convergence, 3 a certificate failed, 4 contraction condition violated,
//! 5 `H + ρM` not surjective.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::certify::{certificate_bundle, default_rho_grid, Bundle, Verdict};
use crate::error::{Error, Result};
use crate::instance_file;
use crate::instances::{self, evaluate_expectations, Outcome};
use crate::operator::InclusionInstance;
use crate::sampling::SamplePlan;
use crate::solver::{check_condition_vi, solve, ConditionReport, ConditionVerdict, ErrorSequence, SolveTrace, SolverConfig};
use crate::space::Vector;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;
pub const EXIT_CONDITION: i32 = 4;
pub const EXIT_NON_SURJECTIVE: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "proxvi", version, about = "Certify, check and solve generalized mixed variational inclusions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the proximal-point iteration and write its trace.
    Solve(SolveArgs),
    /// Certify every declared constant and surjectivity of H + rho M.
    Verify(VerifyArgs),
    /// Evaluate the contraction condition and theta.
    CheckCondition(ConditionArgs),
    /// Run the iteration and write the trace as CSV.
    TraceExport(TraceArgs),
    /// List the built-in instances.
    ListInstances(ListArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in instance name (see list-instances).
    #[arg(long)]
    instance: Option<String>,
    /// Path to an instance JSON file.
    #[arg(long)]
    instance_file: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Errors {
    Zero,
    Geometric,
}

#[derive(Args, Debug)]
struct SolverOpts {
    /// Override the instance's rho.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Starting point z0 as comma-separated coordinates (default all ones).
    #[arg(long, value_parser = parse_vector)]
    z0: Option<Vector>,
    /// Starting u0; replaces R(z0).
    #[arg(long, value_parser = parse_vector)]
    u0: Option<Vector>,
    #[arg(long, value_enum, default_value_t = Errors::Zero)]
    errors: Errors,
    /// Geometric error amplitude.
    #[arg(long, default_value_t = 0.1)]
    error_c0: f64,
    /// Geometric error decay factor in [0, 1).
    #[arg(long, default_value_t = 0.5)]
    error_factor: f64,
}

#[derive(Args, Debug)]
struct Output {
    /// Write to this file (atomically) instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    solver: SolverOpts,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct TraceArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    solver: SolverOpts,
    /// Also write the JSON summary to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    source: Source,
    /// Override the instance's rho.
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample pairs for sampled certificates.
    #[arg(long, default_value_t = 512)]
    samples: usize,
    /// Comma-separated rho values for the surjectivity check.
    #[arg(long, value_parser = parse_list)]
    rho_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ConditionArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ListArgs {
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

fn parse_vector(s: &str) -> std::result::Result<Vector, String> {
    Vector::new(parse_list(s)?).map_err(|e| e.to_string())
}

struct Loaded {
    name: String,
    inst: InclusionInstance,
    named: Option<instances::NamedInstance>,
}

fn load(source: &Source, rho: Option<f64>) -> Result<Loaded> {
    let mut loaded = match (&source.instance, &source.instance_file) {
        (Some(name), None) => {
            let named = instances::by_name(name)?;
            Loaded { name: named.name.clone(), inst: named.instance.clone(), named: Some(named) }
        }
        (None, Some(path)) => {
            let (name, inst) = instance_file::load(path)?;
            Loaded { name, inst, named: None }
        }
        _ => return Err(Error::Format("exactly one of --instance and --instance-file is required".into())),
    };
    if let Some(r) = rho {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("must be positive, got {r}") });
        }
        loaded.inst.rho = r;
    }
    Ok(loaded)
}

fn solver_config(inst: &InclusionInstance, o: &SolverOpts) -> Result<SolverConfig> {
    let mut cfg = SolverConfig { tol: o.tol, max_iters: o.max_iters, ..SolverConfig::for_instance(inst) };
    if let Some(z0) = &o.z0 {
        cfg.z0 = z0.clone();
    }
    cfg.u0 = o.u0.clone();
    if o.errors == Errors::Geometric {
        cfg.error_sequence = ErrorSequence::geometric(inst.dim(), o.error_c0, o.error_factor);
    }
    Ok(cfg)
}

/// Writes to a sibling temporary file, then renames it over `path`.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
    let tmp = path.with_file_name(format!(".{file_name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

fn emit(output: &Output, contents: &str, stdout: &mut dyn Write) -> Result<()> {
    match &output.output {
        Some(p) => write_atomic(p, contents),
        None => Ok(stdout.write_all(contents.as_bytes())?),
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn exit_for(err: &Error) -> i32 {
    match err {
        Error::NonSurjective(_) => EXIT_NON_SURJECTIVE,
        Error::Divergence { .. } | Error::ConvergenceFailure { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_for(&e)
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve(a) => cmd_solve(a, stdout, stderr),
        Command::TraceExport(a) => cmd_trace(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::CheckCondition(a) => cmd_condition(a, stdout),
        Command::ListInstances(a) => cmd_list(a, stdout),
    }
}

#[derive(Serialize)]
struct SolveReport<'a> {
    instance: &'a str,
    config: &'a SolverConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    trace: &'a SolveTrace,
}

/// Runs the solver; a divergence still yields its partial trace.
fn run_solver(inst: &InclusionInstance, cfg: &SolverConfig) -> Result<(SolveTrace, Option<String>)> {
    match solve(inst, cfg) {
        Ok(t) => Ok((t, None)),
        Err(Error::Divergence { iteration, reason, trace }) => Ok((*trace, Some(format!("diverged at iteration {iteration}: {reason}")))),
        Err(e) => Err(e),
    }
}

fn cmd_solve(a: SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let l = load(&a.source, a.solver.rho)?;
    let cfg = solver_config(&l.inst, &a.solver)?;
    let (trace, error) = run_solver(&l.inst, &cfg)?;
    let text = match a.format {
        Format::Json => json(&SolveReport { instance: &l.name, config: &cfg, error: error.clone(), trace: &trace })?,
        Format::Csv => trace.to_csv()?,
        Format::Human => human_solve(&l.name, &l.inst, &cfg, &trace, error.as_deref()),
    };
    emit(&a.output, &text, stdout)?;
    if let Some(e) = &error {
        let _ = writeln!(stderr, "error: {e}");
    }
    Ok(if trace.summary.converged && error.is_none() { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn cmd_trace(a: TraceArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let l = load(&a.source, a.solver.rho)?;
    let cfg = solver_config(&l.inst, &a.solver)?;
    let (trace, error) = run_solver(&l.inst, &cfg)?;
    emit(&a.output, &trace.to_csv()?, stdout)?;
    if let Some(p) = &a.summary {
        write_atomic(p, &json(&trace.summary)?)?;
    }
    if let Some(e) = &error {
        let _ = writeln!(stderr, "error: {e}");
    }
    Ok(if trace.summary.converged && error.is_none() { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    instance: &'a str,
    seed: u64,
    samples: usize,
    bundle: &'a Bundle,
    #[serde(skip_serializing_if = "Option::is_none")]
    expectations: Option<&'a [Outcome]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expectations_met: Option<bool>,
}

fn cmd_verify(a: VerifyArgs, stdout: &mut dyn Write) -> Result<i32> {
    let l = load(&a.source, a.rho)?;
    let plan = SamplePlan { seed: a.seed, pairs: a.samples, ..SamplePlan::default() };
    let grid = a.rho_grid.clone().unwrap_or_else(|| default_rho_grid(&l.inst));
    let bundle = certificate_bundle(&l.inst, &grid, &plan)?;
    let outcomes = match &l.named {
        Some(n) if a.rho.is_none() => Some(evaluate_expectations(n, &plan)?),
        _ => None,
    };
    let met = outcomes.as_ref().map(|o| o.iter().all(|x| x.met));
    let report = VerifyReport {
        instance: &l.name,
        seed: a.seed,
        samples: a.samples,
        bundle: &bundle,
        expectations: outcomes.as_deref(),
        expectations_met: met,
    };
    let text = match a.format {
        Format::Human => human_verify(&report),
        _ => json(&report)?,
    };
    emit(&a.output, &text, stdout)?;
    Ok(if bundle.verdict == Verdict::Fail { EXIT_CERTIFICATE } else { EXIT_OK })
}

fn cmd_condition(a: ConditionArgs, stdout: &mut dyn Write) -> Result<i32> {
    let l = load(&a.source, a.rho)?;
    let rep = check_condition_vi(&l.inst, l.inst.rho)?;
    let text = match a.format {
        Format::Human => human_condition(&rep),
        _ => json(&rep)?,
    };
    emit(&a.output, &text, stdout)?;
    Ok(if rep.verdict == ConditionVerdict::Satisfied { EXIT_OK } else { EXIT_CONDITION })
}

#[derive(Serialize)]
struct Listing {
    name: String,
    dim: usize,
    rho: f64,
    description: String,
}

fn cmd_list(a: ListArgs, stdout: &mut dyn Write) -> Result<i32> {
    let list: Vec<Listing> = instances::all()
        .into_iter()
        .map(|n| Listing { dim: n.instance.dim(), rho: n.instance.rho, description: n.description, name: n.name })
        .collect();
    let text = match a.format {
        Format::Human => {
            let mut s = String::new();
            for l in &list {
                let _ = writeln!(s, "{:<34} dim {:<2} rho {:<5} {}", l.name, l.dim, l.rho, l.description);
            }
            s
        }
        _ => json(&list)?,
    };
    stdout.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into())
}

fn human_condition(r: &ConditionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "contraction condition at rho = {} (q = {}, c_q = {})", r.rho, r.q, r.c_q);
    let _ = writeln!(s, "  tau^q                              = {:.6}", r.terms.tau_q);
    let _ = writeln!(s, "  + c_q rho^q (eps1 l1 + eps2 l2)^q  = {:.6}", r.terms.lipschitz);
    let _ = writeln!(s, "  - rho q (sigma + delta) tau^q      = {:.6}", r.terms.accretive);
    let _ = writeln!(s, "  radicand                           = {:.6}", r.radicand);
    let _ = writeln!(s, "  q-th root                          = {}", opt(r.root));
    let _ = writeln!(s, "  r = {:.6}, m = {:.6}, r + rho m = {:.6}", r.r, r.m, r.r_plus_rho_m);
    let _ = writeln!(s, "  theta                              = {}", opt(r.theta));
    let _ = writeln!(s, "  verdict: {}", serde_json::to_string(&r.verdict).unwrap_or_default().trim_matches('"'));
    for w in &r.hypothesis_warnings {
        let _ = writeln!(s, "  warning: {w}");
    }
    s
}

fn human_solve(name: &str, inst: &InclusionInstance, cfg: &SolverConfig, t: &SolveTrace, error: Option<&str>) -> String {
    let mut s = String::new();
    let sm = &t.summary;
    let _ = writeln!(s, "instance {name}, rho = {}, tol = {:e}", cfg.rho, cfg.tol);
    let _ = writeln!(s, "converged: {} after {} iterations", sm.converged, sm.iterations);
    let _ = writeln!(s, "final u: {}", t.last().u);
    let _ = writeln!(s, "final residual {:e}, fixed-point gap {:e}", sm.final_residual, sm.fixed_point_gap);
    let _ = writeln!(s, "observed rate {}, theta {}", opt(sm.observed_rate), opt(sm.theta));
    if let Some(n) = t.rows.iter().rev().find_map(|r| r.theta_n) {
        let _ = writeln!(s, "theta_n at last iteration {n:.6}");
    }
    let _ = writeln!(s, "final error norm {:e}", sm.final_error_norm);
    if let Ok(rep) = check_condition_vi(inst, cfg.rho) {
        s.push_str(&human_condition(&rep));
    }
    for w in &sm.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    if let Some(e) = error {
        let _ = writeln!(s, "error: {e}");
    }
    s
}

fn human_verify(r: &VerifyReport<'_>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "instance {}, seed {}, {} samples, rho grid {:?}", r.instance, r.seed, r.samples, r.bundle.rho_grid);
    for e in &r.bundle.entries {
        let c = &e.certificate;
        let name = serde_json::to_string(&c.property).unwrap_or_default();
        let verdict = serde_json::to_string(&c.verdict).unwrap_or_default();
        let form = c.form.map(|f| format!(" [{}]", serde_json::to_string(&f).unwrap_or_default().trim_matches('"'))).unwrap_or_default();
        let info = if e.informational { " (informational)" } else { "" };
        let _ = writeln!(
            s,
            "  {:<30} {:<34} claimed {:<10.6} constant {:<12.6} {}{}{}",
            name.trim_matches('"'),
            c.subject,
            c.claimed,
            c.constant,
            verdict.trim_matches('"'),
            form,
            info
        );
    }
    for k in &r.bundle.skipped {
        let _ = writeln!(s, "  skipped: {k}");
    }
    let _ = writeln!(s, "verdict: {}", serde_json::to_string(&r.bundle.verdict).unwrap_or_default().trim_matches('"'));
    if let Some(m) = r.expectations_met {
        let _ = writeln!(s, "built-in expectations met: {m}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("proxvi").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn requires_exactly_one_source() {
        assert_eq!(run_args(&["check-condition"]).0, EXIT_INPUT);
        let (code, _, _) = run_args(&["check-condition", "--instance", "example_4_7", "--instance-file", "x.json"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn rejects_bad_overrides() {
        assert_eq!(run_args(&["solve", "--instance", "example_4_7", "--tol", "abc"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["solve", "--instance", "example_4_7", "--rho", "-1"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["solve", "--instance", "example_4_7", "--z0", "1,2,3"]).0, EXIT_INPUT);
    }

    #[test]
    fn condition_exit_codes() {
        let (code, out, _) = run_args(&["check-condition", "--instance", "example_4_7", "--rho", "3.8"]);
        assert_eq!(code, EXIT_CONDITION);
        assert!(out.contains("violated_radicand"));
        let (code, out, _) = run_args(&["check-condition", "--instance", "example_4_7", "--format", "human"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("radicand") && out.contains("satisfied"));
    }

    #[test]
    fn unknown_instance_is_input_error() {
        let (code, _, err) = run_args(&["verify", "--instance", "nope"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("unknown built-in instance"));
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }
}
