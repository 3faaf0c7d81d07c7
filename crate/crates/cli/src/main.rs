//! `qbh`: runs one configured scenario and writes `result.kv`, an optional
//! `trace.csv` and `run.log` into the output directory.
//!
//! Exit status: 0 pass, 1 assertion failure, 2 validation failure or replay
//! mismatch, 3 numerical failure.

mod config;
mod report;
mod scenarios;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;

use config::{check_tol, ConfigError, Scenario, ScenarioConfig};
use report::{report_schema_version, schema_version_of, Report};
use scenarios::{Context, RunError};

const EXIT_PASS: u8 = 0;
const EXIT_ASSERTION: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qbh", version, about = "Scenario runner for quadratic bosonic Hamiltonians and their hole duals")]
struct Args {
    /// Scenario configuration (TOML).
    #[arg(long, required_unless_present = "list_scenarios")]
    config: Option<PathBuf>,

    /// Output directory; overrides the config's `out_dir`.
    #[arg(long, env = "QBH_OUT_DIR")]
    out_dir: Option<PathBuf>,

    /// Fock cutoff for truncating scenarios; overrides the config.
    #[arg(long)]
    cutoff: Option<usize>,

    /// Assertion tolerance; overrides the config.
    #[arg(long)]
    tol: Option<f64>,

    /// Print the scenario names and exit.
    #[arg(long)]
    list_scenarios: bool,

    /// Compare the new result.kv byte-for-byte with this earlier report.
    #[arg(long)]
    replay: Option<PathBuf>,
}

fn exit_code(e: &RunError) -> u8 {
    use qbh_core::Error as E;
    match e {
        RunError::Config(_) => EXIT_VALIDATION,
        RunError::Core(err) => match err {
            E::InvalidArgument(_)
            | E::InvalidCutoff(_)
            | E::InadequateCutoff { .. }
            | E::CutoffTooLarge { .. }
            | E::DimensionLimit { .. }
            | E::NonHermitian(_)
            | E::WrongChannel(_)
            | E::InvalidPartition(_)
            | E::ModeOutOfRange { .. }
            | E::NoNormalizableSteadyState { .. }
            | E::Unstable { .. }
            | E::Parse(_) => EXIT_VALIDATION,
            _ => EXIT_NUMERICAL,
        },
    }
}

struct Log {
    lines: Vec<String>,
}

impl Log {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::write(dir.join("run.log"), self.lines.join("\n") + "\n")
    }
}

fn fail_validation(msg: &str) -> ExitCode {
    eprintln!("qbh: {msg}");
    ExitCode::from(EXIT_VALIDATION)
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.list_scenarios {
        for s in Scenario::ALL {
            println!("{:<20} {}", s.name(), s.summary());
        }
        return ExitCode::from(EXIT_PASS);
    }
    let config_path = args.config.clone().expect("clap enforces --config");
    let cfg = match ScenarioConfig::load(&config_path) {
        Ok(c) => c,
        Err(e) => return fail_validation(&e.to_string()),
    };
    let tol = args.tol.or(cfg.tol).unwrap_or(cfg.scenario.default_tol());
    if let Err(ConfigError(msg)) = check_tol(tol) {
        return fail_validation(&msg);
    }
    let cutoff = args.cutoff.or(cfg.cutoff);
    if cutoff == Some(0) {
        return fail_validation("cutoff must be at least 1");
    }
    let out_dir = args.out_dir.clone().or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("qbh-out"));
    if let Err(e) = fs::create_dir_all(&out_dir) {
        return fail_validation(&format!("cannot create {}: {e}", out_dir.display()));
    }

    faer::set_global_parallelism(faer::Parallelism::None);

    let mut log = Log { lines: Vec::new() };
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    log.line(format!("started_unix = {started}"));
    log.line(format!("config = {}", config_path.display()));
    log.line(format!("scenario = {}", cfg.scenario));
    let clock = Instant::now();
    let outcome = scenarios::run(&cfg, &Context { tol, cutoff });
    log.line(format!("elapsed_s = {:.3}", clock.elapsed().as_secs_f64()));

    let (mut report, trace, code) = match outcome {
        Ok(o) => {
            for n in &o.notes {
                log.line(format!("note: {n}"));
            }
            let code = if o.passed { EXIT_PASS } else { EXIT_ASSERTION };
            (o.report, o.trace, code)
        }
        Err(e) => {
            let code = exit_code(&e);
            log.line(format!("error: {e}"));
            eprintln!("qbh: {e}");
            let mut r = Report::new();
            r.set("error", e.to_string());
            r.set("tol", tol);
            r.set("residual", f64::NAN);
            (r, None, code)
        }
    };
    report.set("schema_version", report_schema_version());
    report.set("scenario", cfg.scenario.name());
    report.set(
        "status",
        match code {
            EXIT_PASS => "pass",
            EXIT_ASSERTION => "fail",
            EXIT_VALIDATION => "invalid",
            _ => "error",
        },
    );
    let kv = report.to_kv();
    let mut code = code;
    let trace_path = out_dir.join("trace.csv");
    let written = fs::write(out_dir.join("result.kv"), &kv).and_then(|_| match &trace {
        Some(t) => fs::write(&trace_path, t),
        None if trace_path.exists() => fs::remove_file(&trace_path),
        None => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("qbh: cannot write outputs to {}: {e}", out_dir.display());
        return ExitCode::from(EXIT_VALIDATION);
    }

    if let Some(path) = &args.replay {
        match fs::read_to_string(path) {
            Ok(previous) => {
                let theirs = schema_version_of(&previous);
                if theirs.as_deref() != Some(report_schema_version()) {
                    log.line(format!(
                        "replay: schema version {} does not match {}",
                        theirs.unwrap_or_else(|| "<missing>".into()),
                        report_schema_version()
                    ));
                    code = EXIT_VALIDATION;
                } else if previous != kv {
                    log.line(format!("replay: result differs from {}", path.display()));
                    code = EXIT_VALIDATION;
                } else {
                    log.line(format!("replay: identical to {}", path.display()));
                }
            }
            Err(e) => {
                log.line(format!("replay: cannot read {}: {e}", path.display()));
                code = EXIT_VALIDATION;
            }
        }
    }
    log.line(format!("exit = {code}"));
    if let Err(e) = log.write(&out_dir) {
        eprintln!("qbh: cannot write run.log: {e}");
    }
    print!("{kv}");
    ExitCode::from(code)
}
