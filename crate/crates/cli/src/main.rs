//! `qsing`: command-line front end for marked quiver settings.
//!
//! Every command prints one JSON report (or writes it to `--out FILE`).
//! Exit codes: 0 success, 1 domain error, 2 bad input or usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use qsing_core::classification::{
    defect, enumerate_with_progress, expected_dim, is_smooth_setting, singularity_types, EnumerationConfig,
};
use qsing_core::conifold::verify_battery;
use qsing_core::local::{classify_point, enumerate_decomposition_types, local_setting, DecompositionType};
use qsing_core::quiver::canonical_key;
use qsing_core::reduction::{reduce_with_options, ReduceOptions};
use qsing_core::toric::{
    central_fiber, is_theta_semistable, proj_atlas, semi_invariant_generators, semistable_via_semiinvariants,
    toric_relations, StabilityVector, DEFAULT_RELATION_DEGREE,
};
use qsing_core::{fixtures, Error, MarkedQuiverSetting};

const SCHEMA_VERSION: u32 = 1;
const BUDGET_ENV: &str = "QSING_BUDGET_SECS";

#[derive(Parser)]
#[command(name = "qsing", version, about = "Singularities of quiver settings and their moduli")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Output {
    /// Write the report to FILE instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a setting to its normal form.
    Reduce {
        setting: PathBuf,
        /// Warn when a vertex removal rests on a strict inequality.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Decide smoothness; with --dimx also report the defect.
    Classify {
        setting: PathBuf,
        #[arg(long)]
        dimx: Option<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Expected dimension of the setting.
    Dim {
        setting: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Local setting at a semisimple point of decomposition type TAU.
    Local {
        setting: PathBuf,
        /// JSON list of {"multiplicity": e, "beta": [..]}.
        #[arg(long)]
        tau: String,
        #[command(flatten)]
        output: Output,
    },
    /// Classify every decomposition type of the dimension vector.
    Strata {
        setting: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// All reduced singular settings of a given dimension.
    Enumerate {
        #[arg(long)]
        dim: i64,
        /// Wall-clock budget in seconds (default from QSING_BUDGET_SECS).
        #[arg(long)]
        budget: Option<u64>,
        /// Directory for one JSON file per setting plus summary.json.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Toric computations for settings with all dimensions 1.
    Toric {
        #[command(subcommand)]
        command: ToricCommand,
    },
    /// Verification battery for the conifold algebra.
    ConifoldVerify {
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Check the shipped worked examples.
    Selftest {
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct ToricArgs {
    setting: PathBuf,
    /// Stability weights, comma separated (e.g. -1,1).
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    theta: Option<Vec<i64>>,
    #[command(flatten)]
    output: Output,
}

#[derive(Subcommand)]
enum ToricCommand {
    /// Generators of the (semi-)invariant ring.
    Invariants(ToricArgs),
    /// Generators together with minimal binomial relations.
    Relations {
        #[command(flatten)]
        args: ToricArgs,
        #[arg(long, default_value_t = DEFAULT_RELATION_DEGREE)]
        degree_bound: u32,
    },
    /// King's criterion for the representation with the given arrow support.
    Semistable {
        #[command(flatten)]
        args: ToricArgs,
        /// 0/1 per arrow, comma separated; all arrows by default.
        #[arg(long, value_delimiter = ',')]
        support: Option<Vec<u8>>,
    },
    /// Affine charts of the moduli space and their gluing.
    Charts(ToricArgs),
    /// Strata of the moduli space over the origin.
    Fiber(ToricArgs),
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Dimension { .. }
            | Error::MalformedSetting(_)
            | Error::MalformedRepresentation(_)
            | Error::Shape(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<Value, Failure>;

#[derive(Serialize)]
struct Report<'a> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    input_digest: String,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Value>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn digest(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn read_setting(path: &Path) -> Result<(MarkedQuiverSetting, Vec<u8>), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let s: MarkedQuiverSetting =
        serde_json::from_slice(&bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let v = s.validate();
    if !v.is_ok() {
        let list: Vec<String> = v.violations.iter().map(ToString::to_string).collect();
        return Err(Failure::input(format!("{}: {}", path.display(), list.join("; "))));
    }
    Ok((s, bytes))
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn emit(command: &str, input: &[u8], result: Value, output: &Output, elapsed: Duration) -> Result<(), Failure> {
    let report = Report {
        schema_version: SCHEMA_VERSION,
        tool: "qsing",
        version: env!("CARGO_PKG_VERSION"),
        command,
        input_digest: digest(input),
        result,
        timings: output
            .timings
            .then(|| json!({ "elapsed_ms": elapsed.as_secs_f64() * 1000.0 })),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &output.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn theta_for(s: &MarkedQuiverSetting, theta: &Option<Vec<i64>>) -> Result<StabilityVector, Failure> {
    let t = theta.clone().unwrap_or_else(|| vec![0; s.vertex_count()]);
    Ok(StabilityVector::new(t, s)?)
}

fn cmd_reduce(s: &MarkedQuiverSetting, strict: bool) -> Outcome {
    let r = reduce_with_options(s, ReduceOptions { strict });
    let trace: Vec<String> = r.trace.iter().map(ToString::to_string).collect();
    Ok(json!({
        "reduced": r.reduced,
        "z": r.z,
        "moves": r.trace,
        "trace": trace,
        "warnings": r.warnings,
    }))
}

fn cmd_classify(s: &MarkedQuiverSetting, dimx: Option<i64>) -> Outcome {
    let report = is_smooth_setting(s);
    let mut v = to_value(&report);
    if let Some(d) = dimx {
        v["defect"] = json!(defect(s, d));
    }
    Ok(v)
}

fn cmd_local(s: &MarkedQuiverSetting, tau: &str) -> Outcome {
    let tau: DecompositionType =
        serde_json::from_str(tau).map_err(|e| Failure::input(format!("--tau: {e}")))?;
    let local = local_setting(s, &tau)?;
    let report = classify_point(s, &tau)?;
    Ok(json!({ "tau": tau, "local_setting": local, "classification": report }))
}

fn cmd_strata(s: &MarkedQuiverSetting) -> Outcome {
    let rows = enumerate_decomposition_types(s)?
        .into_iter()
        .map(|tau| {
            let report = classify_point(s, &tau)?;
            Ok(json!({
                "tau": tau,
                "local_setting": report.setting,
                "reduced": report.reduced,
                "expected_dim": report.expected_dim,
                "smooth": report.smooth,
                "azumaya": report.azumaya,
                "note": "occurrence not verified",
            }))
        })
        .collect::<Result<Vec<Value>, Failure>>()?;
    Ok(json!({ "strata": rows }))
}

fn budget_from(flag: Option<u64>) -> Result<Option<Duration>, Failure> {
    if let Some(b) = flag {
        return Ok(Some(Duration::from_secs(b)));
    }
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|b| Some(Duration::from_secs(b)))
            .map_err(|_| Failure::input(format!("{BUDGET_ENV} must be a whole number of seconds, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn cmd_enumerate(dim: i64, budget: Option<Duration>, dir: Option<&Path>) -> Result<(Value, bool), Failure> {
    let config = EnumerationConfig {
        budget,
        progress: Some(Arc::new(|done, total| eprintln!("checkpoint: {done}/{total} partitions"))),
    };
    let out = enumerate_with_progress(dim, &config)?;
    let types = singularity_types(&out.settings);
    let mut files = Vec::new();
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
        for (i, s) in out.settings.iter().enumerate() {
            let name = format!("setting_{:03}.json", i + 1);
            let text = serde_json::to_string_pretty(s).expect("settings serialize") + "\n";
            fs::write(dir.join(&name), text).map_err(|e| Failure::input(format!("{name}: {e}")))?;
            files.push(name);
        }
    }
    let keys: Vec<String> = out
        .settings
        .iter()
        .map(|s| canonical_key(s).map(|k| k.to_hex()))
        .collect::<Result<_, _>>()?;
    let result = json!({
        "dimension": out.dimension,
        "complete": out.complete,
        "partitions_completed": out.partitions_completed,
        "partitions_total": out.partitions_total,
        "count": out.settings.len(),
        "singularity_types": types.len(),
        "types": types,
        "settings": out.settings,
        "canonical_keys": keys,
        "files": files,
    });
    Ok((result, out.complete))
}

fn cmd_toric(c: &ToricCommand) -> Result<(Value, Vec<u8>), Failure> {
    let args = match c {
        ToricCommand::Invariants(a) | ToricCommand::Charts(a) | ToricCommand::Fiber(a) => a,
        ToricCommand::Relations { args, .. } | ToricCommand::Semistable { args, .. } => args,
    };
    let (s, bytes) = read_setting(&args.setting)?;
    let theta = theta_for(&s, &args.theta)?;
    let value = match c {
        ToricCommand::Invariants(_) => to_value(&semi_invariant_generators(&s, &theta)?),
        ToricCommand::Relations { degree_bound, .. } => {
            let mut algebra = semi_invariant_generators(&s, &theta)?;
            algebra.relations = toric_relations(&algebra.exponent_vectors(), *degree_bound);
            let mut v = to_value(&algebra);
            v["degree_bound"] = json!(degree_bound);
            v
        }
        ToricCommand::Semistable { support, .. } => {
            let n = s.arrow_count() as usize;
            let support: Vec<bool> = match support {
                Some(bits) => {
                    if bits.iter().any(|&b| b > 1) {
                        return Err(Failure::input("--support entries must be 0 or 1"));
                    }
                    bits.iter().map(|&b| b == 1).collect()
                }
                None => vec![true; n],
            };
            let verdict = is_theta_semistable(&s, &theta, &support)?;
            let via = semistable_via_semiinvariants(&s, &theta, &support, None)?;
            let mut v = to_value(&verdict);
            v["semistable_via_semi_invariants"] = json!(via);
            v
        }
        ToricCommand::Charts(_) => to_value(&proj_atlas(&s, &theta)?),
        ToricCommand::Fiber(_) => json!({ "strata": central_fiber(&s, &theta)? }),
    };
    Ok((value, bytes))
}

fn cmd_selftest() -> Outcome {
    let mut checks = Vec::new();
    let mut ok = true;
    for (name, s, dim_x, want) in fixtures::quantum_plane_defects() {
        let got = defect(&s, dim_x);
        ok &= got == want;
        checks.push(json!({ "fixture": name, "dim_x": dim_x, "defect": got, "expected": want }));
    }
    let conifold_dim = expected_dim(&fixtures::conifold());
    ok &= conifold_dim == 3;
    checks.push(json!({ "fixture": "conifold", "expected_dim": conifold_dim, "expected": 3 }));
    if !ok {
        return Err(Failure {
            code: 1,
            message: format!("self-test failed: {}", Value::Array(checks)),
        });
    }
    Ok(json!({ "passed": true, "checks": checks }))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let start = Instant::now();
    match &cli.command {
        Command::Reduce { setting, strict, output } => {
            let (s, bytes) = read_setting(setting)?;
            emit("reduce", &bytes, cmd_reduce(&s, *strict)?, output, start.elapsed())
        }
        Command::Classify { setting, dimx, output } => {
            let (s, bytes) = read_setting(setting)?;
            emit("classify", &bytes, cmd_classify(&s, *dimx)?, output, start.elapsed())
        }
        Command::Dim { setting, output } => {
            let (s, bytes) = read_setting(setting)?;
            emit("dim", &bytes, json!({ "expected_dim": expected_dim(&s) }), output, start.elapsed())
        }
        Command::Local { setting, tau, output } => {
            let (s, mut bytes) = read_setting(setting)?;
            bytes.extend(tau.as_bytes());
            emit("local", &bytes, cmd_local(&s, tau)?, output, start.elapsed())
        }
        Command::Strata { setting, output } => {
            let (s, bytes) = read_setting(setting)?;
            emit("strata", &bytes, cmd_strata(&s)?, output, start.elapsed())
        }
        Command::Enumerate {
            dim,
            budget,
            out,
            timings,
        } => {
            let budget = budget_from(*budget)?;
            let (result, complete) = cmd_enumerate(*dim, budget, out.as_deref())?;
            let output = Output {
                out: out.as_ref().map(|d| d.join("summary.json")),
                timings: *timings,
            };
            let input = format!("enumerate --dim {dim}");
            emit("enumerate", input.as_bytes(), result.clone(), &output, start.elapsed())?;
            if output.out.is_some() {
                // the summary also goes to stdout
                emit("enumerate", input.as_bytes(), result, &Output { out: None, timings: *timings }, start.elapsed())?;
            }
            if complete {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    message: format!("budget exhausted; partial results reported ({BUDGET_ENV} or --budget)"),
                })
            }
        }
        Command::Toric { command } => {
            let (value, bytes) = cmd_toric(command)?;
            let (name, output) = match command {
                ToricCommand::Invariants(a) => ("toric invariants", &a.output),
                ToricCommand::Relations { args, .. } => ("toric relations", &args.output),
                ToricCommand::Semistable { args, .. } => ("toric semistable", &args.output),
                ToricCommand::Charts(a) => ("toric charts", &a.output),
                ToricCommand::Fiber(a) => ("toric fiber", &a.output),
            };
            emit(name, &bytes, value, output, start.elapsed())
        }
        Command::ConifoldVerify { seed, samples, output } => {
            let report = verify_battery(*seed, *samples);
            let passed = report.all_passed();
            let input = format!("conifold-verify --seed {seed} --samples {samples}");
            let mut v = to_value(&report);
            v["passed"] = json!(passed);
            emit("conifold-verify", input.as_bytes(), v, output, start.elapsed())?;
            if passed {
                Ok(())
            } else {
                Err(Failure {
                    code: 1,
                    message: "conifold battery failed".into(),
                })
            }
        }
        Command::Selftest { output } => emit("selftest", b"selftest", cmd_selftest()?, output, start.elapsed()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
