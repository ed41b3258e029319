//! `thermolimit` subcommands. Exit codes: 0 success, 1 computation failure,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::estimator::{crb_report, EstimatorError, OutcomeModel, MIN_TRIALS};
use crate::models::ModelSpec;
use crate::scaling::{classify, WindowPolicy};
use crate::sweep::{run_sweep, SweepConfig, SweepError, SweepResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "thermolimit", version, about = "Fisher information for low-temperature thermometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a model over a temperature grid.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `output`; stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the low-temperature scaling of a sweep's QFI column.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        t_min: Option<f64>,
        /// Column to classify; `qfi`, else `fisher`.
        #[arg(long)]
        column: Option<String>,
        /// Lowest gap, used to check the window sits well below it.
        #[arg(long)]
        gap: Option<f64>,
        /// Keep the verdict even if the window check fails.
        #[arg(long)]
        force: bool,
    },
    /// Monte Carlo check of the Cramér-Rao bound.
    Simulate {
        /// Model JSON, inline or a path; may carry the temperature as `"T"`.
        #[arg(long)]
        model: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        nu: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(MIN_TRIALS as u64..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// True temperature; overrides `"T"` in the model JSON.
        #[arg(long = "temperature")]
        temperature: Option<f64>,
    },
    /// Write a gnuplot script for a sweep CSV.
    Plotscript {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Failure(_) => EXIT_FAILURE,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn read_input(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| failure(format!("{}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(failure),
    }
}

/// Sweep tables in CSV form; JSON is refused.
fn read_csv_table(path: &Path) -> Result<SweepResult, CliError> {
    let text = read_input(path)?;
    let looks_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || matches!(text.trim_start().chars().next(), Some('{' | '['));
    if looks_json {
        return Err(usage("csv required"));
    }
    SweepResult::from_csv(&text).map_err(usage)
}

pub fn cmd_sweep(config: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = SweepConfig::from_json(&read_input(config)?).map_err(usage)?;
    let res = run_sweep(&cfg).map_err(|e| match e {
        SweepError::Config(_) | SweepError::Mismatch { .. } => usage(e),
        other => failure(other),
    })?;
    let target = out.or(cfg.output.as_deref());
    write_output(target, &res.render(cfg.format), stdout)
}

pub fn cmd_classify(
    input: &Path,
    t_min: Option<f64>,
    t_max: f64,
    column: Option<&str>,
    gap: Option<f64>,
    force: bool,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let table = read_csv_table(input)?;
    let name = match column {
        Some(c) => c.to_string(),
        None => ["qfi", "fisher"]
            .into_iter()
            .find(|c| table.columns.iter().any(|x| x == c))
            .ok_or_else(|| usage("no qfi or fisher column"))?
            .to_string(),
    };
    let values = table.column(&name).ok_or_else(|| usage(format!("no column {name}")))?;
    let ts = table.column("T").ok_or_else(|| usage("no T column"))?;
    let lo = t_min.unwrap_or(f64::NEG_INFINITY);
    if !(t_max > lo) {
        return Err(usage(format!("empty window [{lo}, {t_max}]")));
    }
    let (wt, wf): (Vec<f64>, Vec<f64>) =
        ts.iter().zip(&values).filter(|(&t, _)| t >= lo && t <= t_max).map(|(&t, &f)| (t, f)).unzip();
    if wt.is_empty() {
        return Err(usage(format!("window [{lo}, {t_max}] holds no data")));
    }
    let policy = WindowPolicy {
        gap_proxy: gap,
        override_check: force,
    };
    let verdict = classify(&wt, &wf, policy).map_err(usage)?;
    let mut text = serde_json::to_string_pretty(&verdict).map_err(failure)?;
    text.push('\n');
    write_output(None, &text, stdout)
}

/// Splits an optional top-level `"T"` off a model record.
pub fn parse_model_arg(arg: &str) -> Result<(ModelSpec<f64>, Option<f64>), CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read_input(Path::new(arg))?
    };
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(usage)?;
    let t = match value.as_object_mut().and_then(|o| o.remove("T")) {
        Some(v) => Some(v.as_f64().ok_or_else(|| usage("\"T\" must be a number"))?),
        None => None,
    };
    let spec: ModelSpec<f64> = serde_json::from_value(value).map_err(usage)?;
    spec.validate().map_err(usage)?;
    Ok((spec, t))
}

pub fn cmd_simulate(
    model: &str,
    temperature: Option<f64>,
    nu: u64,
    trials: u64,
    seed: u64,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let (spec, t_json) = parse_model_arg(model)?;
    let t = temperature
        .or(t_json)
        .ok_or_else(|| usage("no temperature: pass --temperature or put \"T\" in the model JSON"))?;
    let om = OutcomeModel::from_model(t, &spec).map_err(|e| match e {
        EstimatorError::Model(crate::models::ModelError::Unsupported(_))
        | EstimatorError::Model(crate::models::ModelError::InvalidTemperature(_))
        | EstimatorError::Model(crate::models::ModelError::InvalidSpec(_)) => usage(e),
        other => failure(other),
    })?;
    let report = crb_report(&om, nu, trials as usize, seed).map_err(failure)?;
    let mut text = serde_json::to_string_pretty(&report).map_err(failure)?;
    text.push('\n');
    write_output(None, &text, stdout)?;
    if !report.bound_respected {
        return Err(failure("empirical variance fell below the Cramér-Rao bound"));
    }
    Ok(())
}

fn curve_title(column: &str) -> String {
    match column {
        "qfi" => "exact".into(),
        "qfi_low_t" => "low-T".into(),
        "qfi_thermodynamic" => "thermodynamic".into(),
        "qfi_asymptotic" => "asymptotic".into(),
        other => other.replace('_', " "),
    }
}

/// Log-log gnuplot script with one curve per quantity column.
pub fn plot_script(table: &SweepResult, data_path: &Path) -> Result<String, CliError> {
    if table.columns.len() < 2 {
        return Err(usage("no quantity columns to plot"));
    }
    let model = table.header_value("model").unwrap_or("sweep");
    let data = data_path.display().to_string().replace('\'', "''");
    let mut s = String::new();
    s.push_str(&format!("# {model}: {} curves\n", table.columns.len() - 1));
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set logscale xy\n");
    s.push_str("set format y '%g'\n");
    s.push_str("set xlabel 'T'\n");
    s.push_str(&format!("set title '{model}'\n"));
    s.push_str("set key top left\n");
    let curves: Vec<String> = table.columns[1..]
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let style = if c == "qfi" { "lw 2" } else { "dashtype 2" };
            format!(
                "'{data}' using 1:{} every ::1 with lines {style} title '{}'",
                i + 2,
                curve_title(c)
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&curves.join(", \\\n     "));
    s.push('\n');
    Ok(s)
}

pub fn cmd_plotscript(input: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = read_csv_table(input)?;
    let script = plot_script(&table, input)?;
    write_output(out, &script, stdout)
}

pub fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep { config, out } => cmd_sweep(&config, out.as_deref(), stdout),
        Command::Classify {
            input,
            t_max,
            t_min,
            column,
            gap,
            force,
        } => cmd_classify(&input, t_min, t_max, column.as_deref(), gap, force, stdout),
        Command::Simulate {
            model,
            nu,
            trials,
            seed,
            temperature,
        } => cmd_simulate(&model, temperature, nu, trials, seed, stdout),
        Command::Plotscript { input, out } => cmd_plotscript(&input, out.as_deref(), stdout),
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match dispatch(cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
