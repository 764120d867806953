use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use qsym::freealg::FreeAlgebra;
use qsym::invariants;
use qsym::kmatrix::{CheckOutcome, CheckSet, KContext};
use qsym::qsp::{default_params, validate_params, ParamConfig, QSPParams, QspError};
use qsym::quasik::{compute_cached, default_cutoff, to_json};
use qsym::repcat::{build_irrep, parse_module, sparse_dump, Module};
use qsym::rootdata::{admissibility_report, catalog, catalog_entry, SatakeDatum, SatakeDescriptor};

#[derive(Parser)]
#[command(name = "qsym", version, about = "Quantum symmetric pairs: quasi K-matrices and universal K-matrices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Root datum, Satake data and admissibility report.
    Datum(Common),
    /// Quasi K-matrix components and the solvability log.
    Quasik(Common),
    /// Run the operator identity checks on modules.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Satake descriptor: a JSON file or a catalog name.
    #[arg(long)]
    datum: String,
    /// Parameter JSON file `{"c": {"1": "q^-1"}, "s": {...}}`; catalog defaults otherwise.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Height cutoff for the quasi K-matrix.
    #[arg(long)]
    cutoff: Option<i64>,
    /// Comma separated module descriptors such as `V(w1),V(w1+w2)`.
    #[arg(long)]
    modules: Option<String>,
    /// Comma separated checks, or `all`.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Output file; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent checks.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized structural sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Descriptor plus the catalog name it came from, if any.
fn load_descriptor(arg: &str) -> Result<(SatakeDescriptor, Option<String>), CliError> {
    if let Some(d) = catalog_entry(arg) {
        return Ok((d, Some(arg.to_string())));
    }
    let path = Path::new(arg);
    if !path.exists() {
        let names: Vec<&str> = catalog().iter().map(|(n, _)| *n).collect();
        return Err(usage(format!("{arg:?} is neither a file nor a catalog entry ({})", names.join(", "))));
    }
    let text = std::fs::read_to_string(path).map_err(usage)?;
    let d: SatakeDescriptor = serde_json::from_str(&text).map_err(|e| usage(format!("malformed datum JSON: {e}")))?;
    Ok((d, None))
}

fn load_params(c: &Common, catalog_name: Option<&str>) -> Result<ParamConfig, CliError> {
    match (&c.params, catalog_name) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(usage)?;
            ParamConfig::from_json(&text).map_err(|e| usage(format!("malformed params JSON: {e}")))
        }
        (None, Some(name)) => default_params(name).ok_or_else(|| usage(format!("no default parameters for {name}"))),
        (None, None) => Err(usage("--params is required for a datum file")),
    }
}

fn build_satake(desc: &SatakeDescriptor) -> Result<Arc<SatakeDatum>, CliError> {
    desc.build().map(Arc::new).map_err(|e| CliError::Failed(e.to_string()))
}

fn build_params(c: &Common) -> Result<Result<QSPParams, Value>, CliError> {
    let (desc, name) = load_descriptor(&c.datum)?;
    let sd = build_satake(&desc)?;
    let cfg = load_params(c, name.as_deref())?;
    let (cv, sv) = cfg.resolve(&sd).map_err(usage)?;
    let alg = Arc::new(FreeAlgebra::new(sd.datum.clone()));
    match validate_params(sd, alg, cv, sv) {
        Ok(p) => Ok(Ok(p)),
        Err(QspError::Constraints(failures)) => Ok(Err(json!({ "ok": false, "constraint_failures": failures }))),
        Err(e) => Err(CliError::Failed(e.to_string())),
    }
}

fn cmd_datum(c: &Common) -> Result<(Value, bool), CliError> {
    let (desc, name) = load_descriptor(&c.datum)?;
    let datum = desc.datum().map_err(|e| CliError::Failed(e.to_string()))?;
    let (x, tau) = desc.x_tau(datum.rank()).map_err(|e| CliError::Failed(e.to_string()))?;
    let report = admissibility_report(&datum, &x, &tau);
    let mut out = json!({
        "name": name.unwrap_or_else(|| datum.name.clone()),
        "cartan": datum.cartan,
        "symmetrizer": datum.eps,
        "form": datum.form,
        "d": datum.d,
        "X": x.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "tau": tau.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "admissible": report.admissible,
        "admissibility": report,
    });
    if report.admissible {
        let sd = build_satake(&desc)?;
        out["tau0"] = json!(sd.tau0.iter().map(|i| i + 1).collect::<Vec<_>>());
        out["tautau0"] = json!(sd.tautau0.iter().map(|i| i + 1).collect::<Vec<_>>());
        out["theta"] = json!(sd.theta.0);
        out["w0_word"] = json!(sd.w0_word.iter().map(|i| i + 1).collect::<Vec<_>>());
        out["wX_word"] = json!(sd.wx_word.iter().map(|i| i + 1).collect::<Vec<_>>());
        out["two_rho_X"] = json!(sd.two_rho_x);
        out["q_theta_basis"] = json!(sd.q_theta_basis());
    }
    let ok = report.admissible;
    Ok((out, ok))
}

fn cmd_quasik(c: &Common) -> Result<(Value, bool), CliError> {
    let p = match build_params(c)? {
        Ok(p) => p,
        Err(v) => return Ok((v, false)),
    };
    let cutoff = c.cutoff.unwrap_or_else(|| default_cutoff(p.rank()));
    if cutoff < 0 {
        return Err(usage("cutoff must be nonnegative"));
    }
    let start = Instant::now();
    match compute_cached(&p, cutoff) {
        Ok(k) => {
            let j = to_json(&p, &k).map_err(|e| CliError::Failed(e.to_string()))?;
            let log: Vec<Value> = k
                .log
                .iter()
                .map(|r| json!({ "weight": r.weight, "conditions_2a": r.conditions_2a, "conditions_2b": r.conditions_2b, "zero": r.zero }))
                .collect();
            Ok((json!({ "ok": true, "millis": start.elapsed().as_millis(), "quasik": j, "log": log }), true))
        }
        Err(e) => Ok((json!({ "ok": false, "error": e.to_string() }), false)),
    }
}

fn default_modules(sd: &SatakeDatum) -> String {
    (1..=sd.rank()).map(|i| if sd.rank() == 1 { "V(w)".to_string() } else { format!("V(w{i})") }).collect::<Vec<_>>().join(",")
}

fn cmd_verify(c: &Common) -> Result<(Value, bool), CliError> {
    let checks = CheckSet::parse(&c.checks).map_err(usage)?;
    let p = match build_params(c)? {
        Ok(p) => p,
        Err(v) => return Ok((v, false)),
    };
    let sd = p.satake.clone();
    let list = c.modules.clone().unwrap_or_else(|| default_modules(&sd));
    let mut modules: Vec<Module> = Vec::new();
    for desc in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let lam = parse_module(&sd.datum, desc).map_err(usage)?;
        modules.push(build_irrep(sd.datum.clone(), &lam).map_err(usage)?);
    }
    let ctx = KContext::new(Arc::new(p));
    // quasi-K first, to the largest height any pair needs
    let need = modules.iter().map(|m| m.weight_gap().iter().sum::<i64>()).max().unwrap_or(0) * 2;
    let need = c.cutoff.map_or(need, |h| h.max(need));
    ctx.quasik(need).map_err(|e| CliError::Failed(e.to_string()))?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(c.jobs.max(1)).build().map_err(usage)?;
    let start = Instant::now();
    let mut tasks: Vec<(usize, Option<usize>)> = Vec::new();
    if checks.any_module() {
        tasks.extend((0..modules.len()).map(|i| (i, None)));
    }
    if checks.any_pair() {
        for i in 0..modules.len() {
            for j in i..modules.len() {
                tasks.push((i, Some(j)));
            }
        }
    }
    let results: Vec<Result<Vec<CheckOutcome>, String>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, j)| match j {
                None => ctx.check_module(&modules[i], &checks),
                Some(j) => ctx.check_pair(&modules[i], &modules[j], &checks),
            }.map_err(|e| e.to_string()))
            .collect()
    });
    let mut outcomes = Vec::new();
    for r in results {
        outcomes.extend(r.map_err(CliError::Failed)?);
    }
    let mut operators = serde_json::Map::new();
    for m in &modules {
        let parts = ctx.build_kparts(m).map_err(|e| CliError::Failed(e.to_string()))?;
        operators.insert(m.label.clone(), json!({ "dim": m.dim(), "K": sparse_dump(&parts.k) }));
    }
    let samples = if checks.structural {
        invariants::sample(&ctx, c.seed, 64).map_err(|e| CliError::Failed(e.to_string()))?
    } else {
        Vec::new()
    };
    let failed_checks = outcomes.iter().filter(|o| !o.ok).count();
    let failed_samples: Vec<_> = samples.iter().filter(|s| !s.ok).collect();
    let ok = failed_checks == 0 && failed_samples.is_empty();
    let report = json!({
        "ok": ok,
        "datum": c.datum,
        "quasik_cutoff": need,
        "millis": start.elapsed().as_millis(),
        "checks": outcomes,
        "failed_checks": failed_checks,
        "structural": { "seed": c.seed, "samples": samples.len(), "failures": failed_samples },
        "operators": operators,
    });
    Ok((report, ok))
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Failed(e.to_string()))?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| CliError::Failed(e.to_string())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Failed(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (c, (value, ok)) = match &cli.cmd {
        Cmd::Datum(c) => (c, cmd_datum(c)?),
        Cmd::Quasik(c) => (c, cmd_quasik(c)?),
        Cmd::Verify(c) => (c, cmd_verify(c)?),
    };
    emit(&value, c.out.as_deref())?;
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qsym: {e}");
            ExitCode::from(e.code())
        }
    }
}
