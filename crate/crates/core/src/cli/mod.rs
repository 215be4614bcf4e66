//! Command-line front end: `sweep`, `spectrum`, `threshold`, `plot`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 I/O failure.

pub mod config;
pub mod output;
pub mod svg;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::encodings::signal_operator;
use crate::error::Error;
use crate::harness::{run_sweep, threshold_report, ExperimentConfig, ResultRecord, ThresholdReport};
use crate::pauli::{pauli_decomposition, weight_spectrum, MAX_FULL_ENUMERATION_QUBITS};
pub use config::{ConfigFile, GridSpec};

/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "SIGNAL_HORIZON_OUT";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => CliError::Config(m),
            Error::QubitCount { .. }
            | Error::Locality { .. }
            | Error::Infeasible(_)
            | Error::NoiseParam(_)
            | Error::InvalidArgument(_)
            | Error::PauliParse(_) => CliError::Config(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "signal-horizon",
    version,
    about = "Noise-filtered k-local distinguishability of binary quantum encodings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the (p, k) sweep and write results.csv, results.json, manifest.json.
    Sweep(RunArgs),
    /// Weight-resolved spectrum and largest coefficients of the noiseless signal.
    Spectrum(SpectrumArgs),
    /// Breakdown threshold p★ per k, with the sampled crossing.
    Threshold(RunArgs),
    /// Render SVG figures from a results file.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON experiment config.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in config.
    #[arg(long, value_parser = ["fig1", "fig2"])]
    pub preset: Option<String>,
    /// Output directory (default: $SIGNAL_HORIZON_OUT or ./out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Admit noise levels in (0.75, 1].
    #[arg(long)]
    pub allow_extended_p: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Number of largest coefficients to list.
    #[arg(long, default_value_t = 16)]
    pub top: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// results.json or results.csv from a sweep.
    #[arg(long)]
    pub results: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    pub timestamp_unix: u64,
    pub config: Option<ConfigFile>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
    pub failures: usize,
}

fn out_dir(arg: &Option<PathBuf>) -> PathBuf {
    arg.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn workers(arg: Option<usize>) -> usize {
    arg.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1)
}

fn resolve_config(args: &RunArgs) -> Result<ConfigFile, CliError> {
    let mut cfg = match (&args.config, &args.preset) {
        (Some(path), _) => ConfigFile::load(path)?,
        (None, Some(name)) => ConfigFile::preset(name)?,
        (None, None) => return Err(CliError::Config("one of --config or --preset is required".into())),
    };
    if args.allow_extended_p {
        cfg.allow_extended_p = true;
    }
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<String>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    outputs.push(path.display().to_string());
    Ok(())
}

fn write_manifest(
    dir: &Path,
    command: &str,
    config: Option<ConfigFile>,
    mut outputs: Vec<String>,
    started: Instant,
    failures: usize,
) -> Result<(), CliError> {
    outputs.push(dir.join("manifest.json").display().to_string());
    let manifest = RunManifest {
        schema_version: output::SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config,
        outputs,
        duration_seconds: started.elapsed().as_secs_f64(),
        failures,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(dir, "manifest.json", &text, &mut Vec::new())
}

pub fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let file = resolve_config(args)?;
    let cfg = file.to_experiment()?;
    let dir = out_dir(&args.out);
    let result = run_sweep(&cfg, workers(args.workers))?;
    let mut outputs = Vec::new();
    write_file(&dir, "results.csv", &output::to_csv(&result.records), &mut outputs)?;
    write_file(
        &dir,
        "results.json",
        &output::to_json(&result.records, &result.failures),
        &mut outputs,
    )?;
    write_manifest(&dir, "sweep", Some(file), outputs, started, result.failures.len())?;
    println!(
        "{} records written to {} ({} failed points)",
        result.records.len(),
        dir.display(),
        result.failures.len()
    );
    if result.failures.is_empty() {
        Ok(())
    } else {
        for f in &result.failures {
            eprintln!("point p={} k={} failed: {}", f.p, f.k, f.message);
        }
        Err(CliError::Numerical(format!(
            "{} sweep points failed",
            result.failures.len()
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientEntry {
    pub pauli: String,
    pub weight: usize,
    /// `Tr(P Δρ)`.
    pub mu: f64,
    /// `2^{-n} Tr(P Δρ)`.
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub encoding: crate::encodings::EncodingSpec,
    #[serde(rename = "W")]
    pub w: Vec<f64>,
    pub top: Vec<CoefficientEntry>,
}

/// Noiseless weight spectrum and the `top` largest coefficients.
pub fn spectrum_report(cfg: &ExperimentConfig, top: usize) -> Result<SpectrumReport, CliError> {
    let n = cfg.encoding.n;
    if n > MAX_FULL_ENUMERATION_QUBITS {
        return Err(Error::Infeasible(format!(
            "full spectrum needs all 4^n strings; n={n} exceeds {MAX_FULL_ENUMERATION_QUBITS}"
        ))
        .into());
    }
    let (plus, minus) = cfg.encoding.prepare_pair::<f64>()?;
    let delta = signal_operator(&plus, &minus)?;
    let w = weight_spectrum(delta.matrix())?.values;
    let scale = (1u64 << n) as f64;
    let mut coeffs: Vec<_> = pauli_decomposition(delta.matrix())?
        .into_iter()
        .filter(|(p, c)| !p.is_identity() && c.abs() > 1e-12)
        .collect();
    coeffs.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then(a.0.cmp(&b.0)));
    let top = coeffs
        .into_iter()
        .take(top)
        .map(|(p, c)| CoefficientEntry {
            pauli: p.to_string(),
            weight: p.weight(),
            mu: output::round12(c * scale),
            c: output::round12(c),
        })
        .collect();
    Ok(SpectrumReport {
        encoding: cfg.encoding,
        w: w.into_iter().map(output::round12).collect(),
        top,
    })
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let file = resolve_config(&args.run)?;
    let cfg = file.to_experiment()?;
    let report = spectrum_report(&cfg, args.top)?;
    let dir = out_dir(&args.run.out);
    let mut outputs = Vec::new();
    let csv = output::csv_string(
        &["weight", "W"],
        report
            .w
            .iter()
            .enumerate()
            .map(|(l, v)| [l.to_string(), format!("{v:?}")]),
    );
    write_file(&dir, "spectrum.csv", &csv, &mut outputs)?;
    write_file(
        &dir,
        "spectrum.json",
        &serde_json::to_string_pretty(&report).expect("spectrum serializes"),
        &mut outputs,
    )?;
    write_manifest(&dir, "spectrum", Some(file), outputs, started, 0)?;
    println!("weight  W");
    for (l, v) in report.w.iter().enumerate() {
        println!("{l:>6}  {v:.12}");
    }
    println!("largest coefficients:");
    for e in &report.top {
        println!("  {}  w={}  mu={:+.12}", e.pauli, e.weight, e.mu);
    }
    Ok(())
}

fn fmt_none(x: Option<f64>) -> String {
    x.map(|v| format!("{:?}", output::round12(v)))
        .unwrap_or_else(|| "none".into())
}

pub fn threshold_csv(reports: &[ThresholdReport]) -> String {
    output::csv_string(
        &[
            "encoding",
            "n",
            "theta",
            "k",
            "epsilon",
            "p_star",
            "p_star_closed_form",
            "sampled_crossing",
        ],
        reports.iter().map(|r| {
            [
                r.encoding.to_string(),
                r.n.to_string(),
                format!("{:?}", output::round12(r.theta)),
                r.k.to_string(),
                format!("{:?}", output::round12(r.epsilon)),
                fmt_none(r.p_star),
                fmt_none(r.p_star_closed_form),
                fmt_none(r.sampled_crossing),
            ]
        }),
    )
}

pub fn cmd_threshold(args: &RunArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let file = resolve_config(args)?;
    let cfg = file.to_experiment()?;
    let sweep = run_sweep(&cfg, workers(args.workers))?;
    let reports = cfg
        .k_values
        .iter()
        .map(|&k| threshold_report(&cfg, k, Some(&sweep.records)))
        .collect::<Result<Vec<_>, _>>()?;
    let dir = out_dir(&args.out);
    let mut outputs = Vec::new();
    let csv = threshold_csv(&reports);
    write_file(&dir, "threshold.csv", &csv, &mut outputs)?;
    write_manifest(&dir, "threshold", Some(file), outputs, started, sweep.failures.len())?;
    print!("{csv}");
    Ok(())
}

/// Groups records by encoding configuration, in first-seen order.
pub fn group_by_encoding(records: &[ResultRecord]) -> Vec<(String, Vec<ResultRecord>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<ResultRecord>> = BTreeMap::new();
    for r in records {
        let mut name = format!("{}_n{}", r.encoding, r.n);
        if r.encoding == crate::encodings::EncodingKind::Entangling {
            name.push_str(&format!("_theta{:.4}", r.theta));
        }
        if !groups.contains_key(&name) {
            order.push(name.clone());
        }
        groups.entry(name).or_default().push(r.clone());
    }
    order
        .into_iter()
        .map(|name| {
            let recs = groups.remove(&name).expect("group exists");
            (name, recs)
        })
        .collect()
}

pub fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let records = output::read_results(&args.results)?;
    if records.is_empty() {
        return Err(CliError::Config(format!(
            "{} contains no records",
            args.results.display()
        )));
    }
    let dir = out_dir(&args.out);
    let mut outputs = Vec::new();
    for (name, recs) in group_by_encoding(&records) {
        write_file(&dir, &format!("{name}.svg"), &svg::render(&recs), &mut outputs)?;
    }
    for o in &outputs {
        println!("wrote {o}");
    }
    write_manifest(&dir, "plot", None, outputs, started, 0)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Threshold(a) => cmd_threshold(&a),
        Command::Plot(a) => cmd_plot(&a),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
