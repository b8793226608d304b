mod checks;
mod config;
mod exact;
mod output;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::checks::{model_lambda0, run_check, CheckOutcome, Context};
use crate::config::{quad_order, CheckName, RunConfig};

pub const SCHEMA_VERSION: &str = "1.0.0";

const EXIT_CHECK_FAILED: u8 = 2;
const EXIT_CONFIG: u8 = 1;

#[derive(Parser)]
#[command(
    name = "berezin",
    version,
    about = "Balanced metrics, coherent states and star-product checks on the disk, ball and polydisk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks listed in a JSON configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Also write SVG plots.
        #[arg(long)]
        plots: bool,
    },
    /// Print the balanced threshold λ₀ for given root data.
    Lambda0(Lambda0Args),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Lambda0Args {
    /// JSON file {"r", "p", "q", "b", "gamma"}.
    #[arg(long)]
    root_data: Option<PathBuf>,
    /// Symmetric domain parameters, e.g. `r=2,a=1,b=0`.
    #[arg(long)]
    symmetric: Option<String>,
}

#[derive(Serialize)]
struct CheckSummary {
    check: CheckName,
    passed: bool,
    report: String,
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: &'a str,
    domain: &'a Value,
    lambdas: &'a [f64],
    lambda0: f64,
    seed: u64,
    samples: usize,
    tol: f64,
    quad_order: usize,
    checks: Vec<CheckSummary>,
    all_passed: bool,
    berezin_quantization_certified: bool,
    certification_notes: Vec<String>,
}

/// Certified iff ε is balanced for every requested λ ≥ λ₀ and the diastasis,
/// hereditary and pullback checks all ran and passed.
fn certify(lambda0: f64, outcomes: &[CheckOutcome]) -> (bool, Vec<String>) {
    let mut notes = Vec::new();
    let find = |c: CheckName| outcomes.iter().find(|o| o.check == c);
    let balanced_ok = match find(CheckName::Balanced) {
        None => {
            notes.push("balanced check not run".to_string());
            false
        }
        Some(o) => {
            let results = o.body["results"].as_array().cloned().unwrap_or_default();
            let relevant: Vec<&Value> = results
                .iter()
                .filter(|r| r["lambda"].as_f64().is_some_and(|l| l >= lambda0))
                .collect();
            if relevant.is_empty() {
                notes.push(format!("no requested lambda is >= lambda0 = {lambda0}"));
            }
            let mut ok = !relevant.is_empty();
            for r in relevant {
                if r["is_balanced"] != Value::Bool(true) {
                    ok = false;
                    notes.push(format!("not balanced at lambda = {}", r["lambda"]));
                }
            }
            ok
        }
    };
    let mut ok = balanced_ok;
    for c in [CheckName::Diastasis, CheckName::Hereditary, CheckName::Pullback] {
        match find(c) {
            None => {
                ok = false;
                notes.push(format!("{c} check not run"));
            }
            Some(o) if !o.passed => {
                ok = false;
                notes.push(format!("{c} check failed"));
            }
            Some(_) => {}
        }
    }
    (ok, notes)
}

/// Prints a line, ignoring a closed stdout.
fn say(line: std::fmt::Arguments) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn run(config_path: &Path, plots: bool) -> Result<u8, (u8, anyhow::Error)> {
    let config = RunConfig::load(config_path).map_err(|e| (EXIT_CONFIG, e))?;
    let order = quad_order().map_err(|e| (EXIT_CONFIG, e))?;
    let model = config.model().map_err(|e| (EXIT_CONFIG, e))?;
    let lambda0 = model_lambda0(&model).map_err(|e| (EXIT_CONFIG, e.into()))?;
    std::fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))
        .map_err(|e| (EXIT_CONFIG, e))?;

    let domain = serde_json::to_value(model.descriptor()).expect("descriptor serializes");
    let ctx = Context {
        config: &config,
        model,
        lambda0,
        quad_order: order,
    };
    let io = |e: anyhow::Error| (EXIT_CONFIG, e);
    let mut outcomes = Vec::new();
    let mut checks = Vec::new();
    for check in config.ordered_checks() {
        let outcome = run_check(&ctx, check);
        let path = output::write_check(&config.out_dir, &outcome, &domain).map_err(io)?;
        if plots {
            output::write_plot(&config.out_dir, &outcome).map_err(io)?;
        }
        say(format_args!(
            "{:<12} {}",
            check.as_str(),
            if outcome.passed { "PASS" } else { "FAIL" }
        ));
        checks.push(CheckSummary {
            check,
            passed: outcome.passed,
            report: path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
        });
        outcomes.push(outcome);
    }

    let all_passed = outcomes.iter().all(|o| o.passed);
    let (certified, notes) = certify(lambda0, &outcomes);
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        domain: &domain,
        lambdas: &config.lambdas,
        lambda0,
        seed: config.seed,
        samples: config.samples,
        tol: config.tol,
        quad_order: order,
        checks,
        all_passed,
        berezin_quantization_certified: certified,
        certification_notes: notes,
    };
    output::write_json(&config.out_dir.join("summary.json"), &summary).map_err(io)?;
    say(format_args!("certified    {certified}"));
    Ok(if all_passed { 0 } else { EXIT_CHECK_FAILED })
}

fn lambda0_command(args: &Lambda0Args) -> Result<Value> {
    match (&args.root_data, &args.symmetric) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            exact::lambda0_from_root_data(&text)
        }
        (None, Some(text)) => exact::lambda0_from_symmetric(text),
        (None, None) => unreachable!("clap enforces one source"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run { config, plots } => match run(&config, plots) {
            Ok(code) => ExitCode::from(code),
            Err((code, e)) => {
                eprintln!("error: {e:#}");
                ExitCode::from(code)
            }
        },
        Command::Lambda0(args) => match lambda0_command(&args) {
            Ok(value) => {
                say(format_args!(
                    "{}",
                    serde_json::to_string_pretty(&value).expect("value serializes")
                ));
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
