//! Command implementations. Each one loads its inputs, runs the library
//! routine and hands a result payload to the report writer.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use opspec_core::families::{corpus, parse_family, parse_matrix, serialize_family, serialize_matrix, validate_a3, A3Options};
use opspec_core::perturb::certify_gap;
use opspec_core::spectra::{
    decomposition_check, eigencurves, resolvent_certify, spectrum_in, vm_certify, ResolventSubspace, Verdict, VmChoice,
};
use opspec_core::varbounds::verify_equality;
use opspec_core::{Error, Interval, OperatorFamily, SymMatrix};

use crate::output::{self, Report, Subject, Timings, SCHEMA_VERSION};
use crate::{Cli, Command, Common, DemoAction};

#[derive(Debug)]
pub enum CliError {
    /// Unusable input: exit code 2.
    Input(String),
    /// Could not write results: exit code 1.
    Output(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Output(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type Config = BTreeMap<&'static str, Value>;

/// Library results become payloads; verified failures still produce a
/// report, input errors abort.
fn payload<T: Serialize>(r: opspec_core::Result<T>, ok: impl FnOnce(&T) -> bool) -> Result<(Value, bool), CliError> {
    match r {
        Ok(t) => {
            let pass = ok(&t);
            let v = serde_json::to_value(&t).map_err(|e| CliError::Output(e.to_string()))?;
            Ok((v, pass))
        }
        Err(e) if e.is_input_error() => Err(e.into()),
        Err(e) => Ok((json!({ "error": e.to_string() }), false)),
    }
}

fn load_family(arg: &str) -> Result<OperatorFamily, CliError> {
    if let Some(name) = arg.strip_prefix("demo:") {
        return corpus::by_name(name)
            .ok_or_else(|| CliError::Input(format!("unknown demo family '{name}' (see `opspec demo list`)")));
    }
    let bytes = std::fs::read(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    parse_family(&bytes).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn load_matrix(arg: &str) -> Result<SymMatrix, CliError> {
    let (a, b) = corpus::perturbation_pair();
    match arg {
        "demo:perturb-a" => return Ok(a),
        "demo:perturb-b" => return Ok(b),
        _ if arg.starts_with("demo:") => {
            return Err(CliError::Input(format!("unknown demo matrix '{arg}' (demo:perturb-a or demo:perturb-b)")))
        }
        _ => {}
    }
    let bytes = std::fs::read(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    parse_matrix(&bytes).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

fn family_subject(f: &OperatorFamily) -> Subject {
    Subject {
        name: f.name().map(str::to_string),
        kind: f.kind().tag().to_string(),
        dim: f.dim(),
        digest: output::digest(&[&serialize_family(f)]),
    }
}

fn interval(v: &[f64]) -> Result<Interval, CliError> {
    match v {
        [a, b] => Ok(Interval::new(*a, *b, false, false)?),
        _ => Err(CliError::Input("--interval takes two numbers".into())),
    }
}

/// OPSPEC_SEED overrides --seed.
fn effective_seed(common: &Common) -> Result<(u64, &'static str), CliError> {
    match std::env::var("OPSPEC_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(|v| (v, "env"))
            .map_err(|_| CliError::Input(format!("OPSPEC_SEED must be an unsigned 64-bit integer, got '{s}'"))),
        Err(_) => Ok((common.seed, "flag")),
    }
}

struct Run {
    command: &'static str,
    config: Config,
    subject: Subject,
    result: Value,
    ok: bool,
    out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let run = match cli.command {
        Command::Demo { action } => return demo(action),
        Command::Spectrum { family, interval: iv, tol, common } => {
            let f = load_family(&family)?;
            let iv = interval(&iv)?;
            let (result, ok) = payload(spectrum_in(&f, &iv, tol), |_| true)?;
            let config = Config::from([("interval", json!([iv.lo, iv.hi])), ("bisect_rel", json!(tol))]);
            Run { command: "spectrum", config, subject: family_subject(&f), result, ok, out: common.out }
        }
        Command::Bounds { family, gamma, n, samples, common } => {
            let f = load_family(&family)?;
            let (seed, source) = effective_seed(&common)?;
            let (result, ok) = payload(verify_equality(&f, gamma, n, samples, seed), |r| r.pass)?;
            let config = Config::from([
                ("gamma", json!(gamma)),
                ("n", json!(n)),
                ("samples", json!(samples)),
                ("seed", json!(seed)),
                ("seed_source", json!(source)),
                ("eq_tol", json!(opspec_core::varbounds::EQ_TOL)),
                ("ineq_tol", json!(opspec_core::varbounds::INEQ_TOL)),
            ]);
            Run { command: "bounds", config, subject: family_subject(&f), result, ok, out: common.out }
        }
        Command::Certify { family, mu1, mu2, eps, delta, grid, common } => {
            let f = load_family(&family)?;
            let vm = match (eps, delta) {
                (Some(eps), Some(delta)) => VmChoice::Given { eps, delta },
                _ => VmChoice::default(),
            };
            let r = resolvent_certify(&f, mu1, mu2, &ResolventSubspace::Canonical, vm, grid);
            let (result, ok) = payload(r, |c| c.verdict == Verdict::Certified)?;
            let config = Config::from([
                ("mu1", json!(mu1)),
                ("mu2", json!(mu2)),
                ("eps", json!(eps)),
                ("delta", json!(delta)),
                ("grid", json!(grid)),
                ("subspace", json!("canonical")),
            ]);
            Run { command: "certify", config, subject: family_subject(&f), result, ok, out: common.out }
        }
        Command::Perturb { a, b, alpha, beta, b_grid, no_refine, common } => {
            let am = load_matrix(&a)?;
            let bm = load_matrix(&b)?;
            let (result, ok) = payload(certify_gap(&am, &bm, alpha, beta, &b_grid, !no_refine), |c| c.confirmed())?;
            let subject = Subject {
                name: None,
                kind: "matrix_pair".into(),
                dim: am.dim(),
                digest: output::digest(&[&serialize_matrix(&am), &serialize_matrix(&bm)]),
            };
            let config = Config::from([
                ("alpha", json!(alpha)),
                ("beta", json!(beta)),
                ("b_grid", json!(b_grid)),
                ("refine", json!(!no_refine)),
            ]);
            Run { command: "perturb", config, subject, result, ok, out: common.out }
        }
        Command::Decompose { family, alpha, beta, common } => {
            let f = load_family(&family)?;
            let (result, ok) = payload(decomposition_check(&f, alpha, beta), |r| r.pass)?;
            let config = Config::from([
                ("alpha", json!(alpha)),
                ("beta", json!(beta)),
                ("pass_tol", json!(opspec_core::spectra::DECOMP_PASS_TOL)),
            ]);
            Run { command: "decompose", config, subject: family_subject(&f), result, ok, out: common.out }
        }
        Command::Vm { family, interval: iv, eps, delta, grid, common } => {
            let f = load_family(&family)?;
            let iv = interval(&iv)?;
            let (result, ok) = payload(vm_certify(&f, &iv, eps, delta, grid), |c| c.verdict == Verdict::Certified)?;
            let config = Config::from([
                ("interval", json!([iv.lo, iv.hi])),
                ("eps", json!(eps)),
                ("delta", json!(delta)),
                ("grid", json!(grid)),
            ]);
            Run { command: "vm", config, subject: family_subject(&f), result, ok, out: common.out }
        }
        Command::Curves { family, interval: iv, grid, csv, svg, common } => {
            let f = load_family(&family)?;
            let iv = interval(&iv)?;
            let rows = eigencurves(&f, &iv, grid)?;
            if let Some(p) = &csv {
                output::write_atomic(p, output::curves_csv(&rows).as_bytes())?;
            }
            if let Some(p) = &svg {
                output::write_atomic(p, output::curves_svg(&rows).as_bytes())?;
            }
            let result = json!({
                "grid": rows.len(),
                "dim": f.dim(),
                "zero_crossings": output::zero_crossings(&rows),
            });
            let config = Config::from([
                ("interval", json!([iv.lo, iv.hi])),
                ("grid", json!(grid)),
                ("csv", json!(csv.as_ref().map(|p| p.display().to_string()))),
                ("svg", json!(svg.as_ref().map(|p| p.display().to_string()))),
            ]);
            Run { command: "curves", config, subject: family_subject(&f), result, ok: true, out: common.out }
        }
        Command::Validate { family, samples, grid, common } => {
            let f = load_family(&family)?;
            let (seed, source) = effective_seed(&common)?;
            let opts = A3Options { grid_n: grid, window: None };
            let (result, ok) = payload(validate_a3(&f, samples, seed, opts), |r| r.pass)?;
            let config = Config::from([
                ("samples", json!(samples)),
                ("grid", json!(grid)),
                ("seed", json!(seed)),
                ("seed_source", json!(source)),
            ]);
            Run { command: "validate", config, subject: family_subject(&f), result, ok, out: common.out }
        }
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: run.command,
        config: &run.config,
        family: &run.subject,
        status: if run.ok { "ok" } else { "verified_failure" },
        result: &run.result,
        timings: Timings { total_ms: start.elapsed().as_secs_f64() * 1e3 },
    };
    output::emit(&report, run.out.as_deref())?;
    Ok(run.ok)
}

fn demo(action: DemoAction) -> Result<bool, CliError> {
    match action {
        DemoAction::List => {
            for n in corpus::NAMES {
                println!("{n}");
            }
        }
        DemoAction::Export { name, out } => {
            let f = corpus::by_name(&name)
                .ok_or_else(|| CliError::Input(format!("unknown demo family '{name}' (see `opspec demo list`)")))?;
            let bytes = serialize_family(&f);
            match out {
                Some(p) => output::write_atomic(&p, &bytes)?,
                None => {
                    use std::io::Write;
                    std::io::stdout().write_all(&bytes).map_err(|e| CliError::Output(e.to_string()))?;
                }
            }
        }
    }
    Ok(true)
}
