// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! The `unruh` command-line front end.
//!
//! Every subcommand reads its parameters from flags and, optionally, from a
//! JSON file given with `--config` whose keys are the long flag names.
//! Flags win over the file. Exit status is 0 on success, 1 on runtime or
//! numerical failure and 2 on usage or validation errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::estimation_theory::{fisher_surfaces, fock_qfi, FisherSurfacePoint};
use crate::fock_channel::{AccelerationParameter, DEFAULT_TAIL_TOLERANCE};
use crate::gaussian::{heterodyne_fisher_coherent, optimize_gaussian_qfi};
use crate::montecarlo::{run_experiment, ExperimentConfig, ExperimentReport, Strategy};
use crate::numerics::lin_space;
use crate::physical_units::{
    error_contour_grid, log_space, threshold_curve, ContourPoint, DerivedQuantities, OmegaConvention, Scenario,
    ScenarioSource, ThresholdPoint,
};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "unruh", version, about = "Fisher information and estimation of the Unruh-Hawking effect")]
pub struct Cli {
    /// JSON file with default values, keyed by long flag name.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file, or `-` for standard output.
    #[arg(long, global = true, value_name = "PATH|-")]
    pub output: Option<String>,
    /// Whether `--omega` is in rad/s (angular) or Hz (ordinary).
    #[arg(long, global = true, value_enum)]
    pub omega_convention: Option<OmegaConvention>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fisher information of a single strategy.
    Qfi(QfiArgs),
    /// Fisher-information surfaces over (r, n̄₀).
    Fig1(Fig1Args),
    /// Relative-error contour grid and threshold curve over (a, n̄₀).
    Fig2(Fig2Args),
    /// Monte Carlo maximum-likelihood experiment.
    Simulate(SimulateArgs),
    /// Convert one physical specification into all derived quantities.
    Convert(ConvertArgs),
}

/// Probe and measurement pair for `qfi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum QfiStrategy {
    /// Fock input, `4(1 + n₀)`.
    Fock,
    /// Best Gaussian input over the squeezing/displacement split.
    GaussianOpt,
    /// Coherent input with heterodyne detection.
    CoherentHet,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct QfiArgs {
    #[arg(long, value_enum)]
    pub strategy: Option<QfiStrategy>,
    /// Photon number of the Fock input.
    #[arg(long)]
    pub n0: Option<u64>,
    /// Mean photon number of the input.
    #[arg(long)]
    pub nbar: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Fig1Args {
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub nbar_min: Option<f64>,
    #[arg(long)]
    pub nbar_max: Option<f64>,
    /// Points per axis; the table has resolution² rows.
    #[arg(long)]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct Fig2Args {
    /// Smallest acceleration in units of g.
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub a_points: Option<usize>,
    #[arg(long)]
    pub nbar_min: Option<f64>,
    #[arg(long)]
    pub nbar_max: Option<f64>,
    #[arg(long)]
    pub nbar_points: Option<usize>,
    #[arg(long)]
    pub omega: Option<f64>,
    /// Number of experiment repetitions `N`.
    #[arg(long)]
    pub repetitions: Option<u64>,
    /// Where to write the threshold curve.
    #[arg(long, value_name = "PATH")]
    pub threshold_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    /// `n₀` for Fock probes, `|α₀|²` for coherent probes.
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Outcomes per experiment.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Independent experiments.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub tail_tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct ConvertArgs {
    /// Acceleration in m/s².
    #[arg(long)]
    pub accel: Option<f64>,
    /// Black-hole mass in kg.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Temperature in K.
    #[arg(long)]
    pub temp: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
}

const DEFAULT_OMEGA: f64 = 1e10;

/// Failure of a CLI invocation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Runtime(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(_) | Error::Domain(_) | Error::StepSize { .. } => Self::Usage(e.to_string()),
            _ => Self::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Runtime(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Runtime(format!("CSV error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Settings shared by every subcommand after merging config and flags.
#[derive(Debug, Clone, PartialEq)]
struct Globals {
    format: Option<Format>,
    output: Option<String>,
    omega_convention: OmegaConvention,
}

/// Parses `args`, runs the command and returns the exit status. Errors are
/// reported on `stderr`; data goes to `stdout` unless `--output` names a file.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = write!(stdout, "{}", e.render());
                return e.exit_code();
            }
            let text = e.render().to_string();
            let _ = write!(stderr, "{text}");
            if !text.contains("Usage:") {
                let _ = write!(stderr, "\n{}\n", Cli::command().render_usage());
            }
            return e.exit_code();
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_config(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Usage("config file must hold a JSON object".into())),
        Err(e) => Err(CliError::Usage(format!("malformed config {}: {e}", path.display()))),
    }
}

fn take_global<T: DeserializeOwned>(config: &mut Map<String, Value>, key: &str) -> CliResult<Option<T>> {
    config
        .remove(key)
        .map(|v| serde_json::from_value(v).map_err(|e| CliError::Usage(format!("config key `{key}`: {e}"))))
        .transpose()
}

/// Overlays the flags that were given onto the config values.
fn merge<T: Serialize + DeserializeOwned>(flags: &T, mut config: Map<String, Value>) -> CliResult<T> {
    if let Value::Object(given) = serde_json::to_value(flags).map_err(|e| CliError::Runtime(e.to_string()))? {
        config.extend(given.into_iter().filter(|(_, v)| !v.is_null()));
    }
    serde_json::from_value(Value::Object(config)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    let mut config = match &cli.config {
        Some(path) => read_config(path)?,
        None => Map::new(),
    };
    let globals = Globals {
        format: cli.format.or(take_global(&mut config, "format")?),
        output: cli.output.clone().or(take_global(&mut config, "output")?),
        omega_convention: cli
            .omega_convention
            .or(take_global(&mut config, "omega-convention")?)
            .unwrap_or_default(),
    };
    match &cli.command {
        Command::Qfi(a) => cmd_qfi(&merge(a, config)?, &globals, stdout),
        Command::Fig1(a) => cmd_fig1(&merge(a, config)?, &globals, stdout),
        Command::Fig2(a) => cmd_fig2(&merge(a, config)?, &globals, stdout),
        Command::Simulate(a) => cmd_simulate(&merge(a, config)?, &globals, stdout),
        Command::Convert(a) => cmd_convert(&merge(a, config)?, &globals, stdout),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required value --{flag}")))
}

fn open_output(target: Option<&str>, stdout: &mut dyn Write, body: &[u8]) -> CliResult<()> {
    match target {
        None | Some("-") => stdout.write_all(body)?,
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            w.write_all(body)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// Binary64 value with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn format_opt(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Value reported by `qfi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QfiReport {
    pub strategy: QfiStrategy,
    pub formula: &'static str,
    pub n_bar0: f64,
    pub r: Option<f64>,
    pub value: f64,
    pub x_star: Option<f64>,
}

/// Library evaluation behind `qfi`.
pub fn qfi_report(args: &QfiArgs) -> CliResult<QfiReport> {
    let strategy = required(args.strategy, "strategy")?;
    let n_bar0 = match (args.n0, args.nbar) {
        (Some(n0), _) => n0 as f64,
        (None, Some(n)) => n,
        (None, None) => return Err(CliError::Usage("one of --n0 or --nbar is required".into())),
    };
    let r_param = |r: Option<f64>| -> CliResult<AccelerationParameter> { Ok(AccelerationParameter::new(required(r, "r")?)?) };
    Ok(match strategy {
        QfiStrategy::Fock => {
            if n_bar0.fract() != 0.0 || n_bar0 < 0.0 {
                return Err(CliError::Usage(format!("Fock input needs an integral photon number, got {n_bar0}")));
            }
            QfiReport {
                strategy,
                formula: "H_fock = 4(1+n0)",
                n_bar0,
                r: args.r,
                value: fock_qfi(n_bar0 as u64),
                x_star: None,
            }
        }
        QfiStrategy::GaussianOpt => {
            let r = r_param(args.r)?;
            let opt = optimize_gaussian_qfi(n_bar0, r)?;
            QfiReport {
                strategy,
                formula: "H_gaussian_opt = max_x H_gaussian(nbar, x, r)",
                n_bar0,
                r: Some(r.value()),
                value: opt.qfi,
                x_star: Some(opt.x_star),
            }
        }
        QfiStrategy::CoherentHet => {
            let r = r_param(args.r)?;
            if n_bar0 < 0.0 {
                return Err(CliError::Usage(format!("mean photon number must be nonnegative, got {n_bar0}")));
            }
            QfiReport {
                strategy,
                formula: "I_coherent_het = 4(1+nbar/2)tanh^2(r)",
                n_bar0,
                r: Some(r.value()),
                value: heterodyne_fisher_coherent(n_bar0, r),
                x_star: None,
            }
        }
    })
}

fn cmd_qfi(args: &QfiArgs, g: &Globals, stdout: &mut dyn Write) -> CliResult<()> {
    let rep = qfi_report(args)?;
    let body = match g.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&rep)?,
        Format::Csv => {
            let strategy = rep.strategy.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
            csv_bytes(
                &["strategy", "formula", "n_bar0", "r", "value", "x_star"],
                [vec![
                    strategy,
                    rep.formula.to_owned(),
                    format_number(rep.n_bar0),
                    format_opt(rep.r),
                    format_number(rep.value),
                    format_opt(rep.x_star),
                ]],
            )?
        }
    };
    open_output(g.output.as_deref(), stdout, &body)
}

/// Library evaluation behind `fig1`.
pub fn fig1_table(args: &Fig1Args) -> CliResult<Vec<FisherSurfacePoint>> {
    let resolution = args.resolution.unwrap_or(30);
    if resolution == 0 {
        return Err(CliError::Usage("--resolution must be positive".into()));
    }
    let (r_lo, r_hi) = (args.r_min.unwrap_or(1e-3), args.r_max.unwrap_or(2.0));
    let (n_lo, n_hi) = (args.nbar_min.unwrap_or(0.0), args.nbar_max.unwrap_or(10.0));
    if !(r_lo >= 0.0 && r_hi >= r_lo) || !(n_lo >= 0.0 && n_hi >= n_lo) {
        return Err(CliError::Usage("ranges need 0 <= min <= max".into()));
    }
    Ok(fisher_surfaces(&lin_space(r_lo, r_hi, resolution), &lin_space(n_lo, n_hi, resolution))?)
}

fn cmd_fig1(args: &Fig1Args, g: &Globals, stdout: &mut dyn Write) -> CliResult<()> {
    let rows = fig1_table(args)?;
    let body = match g.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => csv_bytes(
            &["r", "n_bar0", "I_coherent_het", "H_gaussian_opt", "H_fock"],
            rows.iter().map(|p| {
                [p.r, p.n_bar0, p.i_coherent_het, p.h_gaussian_opt, p.h_fock].map(format_number).to_vec()
            }),
        )?,
    };
    open_output(g.output.as_deref(), stdout, &body)
}

/// Library evaluation behind `fig2`: contour grid and threshold curve.
pub fn fig2_tables(args: &Fig2Args, convention: OmegaConvention) -> CliResult<(Vec<ContourPoint>, Vec<ThresholdPoint>)> {
    let omega = convention.to_angular(args.omega.unwrap_or(DEFAULT_OMEGA));
    let a = log_space(args.a_min.unwrap_or(1e15), args.a_max.unwrap_or(1e28), args.a_points.unwrap_or(131))?;
    let n0 = log_space(args.nbar_min.unwrap_or(1e-6), args.nbar_max.unwrap_or(1e2), args.nbar_points.unwrap_or(81))?;
    let grid = error_contour_grid(&a, &n0, omega, args.repetitions.unwrap_or(1))?;
    let curve = threshold_curve(&n0, omega)?;
    Ok((grid, curve))
}

fn threshold_path(args: &Fig2Args, output: Option<&str>, format: Format) -> PathBuf {
    if let Some(p) = &args.threshold_output {
        return p.clone();
    }
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match output {
        Some(out) if out != "-" => {
            let p = Path::new(out);
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "fig2".into());
            p.with_file_name(format!("{stem}_threshold.{ext}"))
        }
        _ => PathBuf::from(format!("fig2_threshold.{ext}")),
    }
}

fn cmd_fig2(args: &Fig2Args, g: &Globals, stdout: &mut dyn Write) -> CliResult<()> {
    let (grid, curve) = fig2_tables(args, g.omega_convention)?;
    let format = g.format.unwrap_or(Format::Csv);
    let (main, side) = match format {
        Format::Json => (json_bytes(&grid)?, json_bytes(&curve)?),
        Format::Csv => (
            csv_bytes(
                &["a_over_g", "n_bar0", "n_T", "epsilon", "on_threshold_flag"],
                grid.iter().map(|p| {
                    vec![
                        format_number(p.a_over_g),
                        format_number(p.n_bar0),
                        format_number(p.n_t),
                        format_number(p.epsilon),
                        u8::from(p.on_threshold).to_string(),
                    ]
                }),
            )?,
            csv_bytes(
                &["n_bar0", "a_over_g", "acceleration", "temperature", "n_T", "r"],
                curve.iter().map(|p| {
                    [p.n_bar0, p.a_over_g, p.acceleration, p.temperature, p.n_t, p.r].map(format_number).to_vec()
                }),
            )?,
        ),
    };
    let side_path = threshold_path(args, g.output.as_deref(), format);
    open_output(Some(&side_path.to_string_lossy()), stdout, &side)?;
    open_output(g.output.as_deref(), stdout, &main)
}

/// Experiment configuration assembled from `simulate` parameters.
pub fn simulate_config(args: &SimulateArgs) -> ExperimentConfig {
    let d = ExperimentConfig::default();
    ExperimentConfig {
        strategy: args.strategy.unwrap_or(d.strategy),
        probe_energy: args.energy.unwrap_or(d.probe_energy),
        true_r: args.r.unwrap_or(d.true_r),
        samples: args.samples.unwrap_or(d.samples),
        trials: args.trials.unwrap_or(d.trials),
        seed: args.seed.unwrap_or(d.seed),
        estimator_bounds: (args.r_min.unwrap_or(d.estimator_bounds.0), args.r_max.unwrap_or(d.estimator_bounds.1)),
        tail_tolerance: args.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE),
    }
}

fn cmd_simulate(args: &SimulateArgs, g: &Globals, stdout: &mut dyn Write) -> CliResult<()> {
    let config = simulate_config(args);
    config.validate()?;
    let rep: ExperimentReport = run_experiment(&config)?;
    let body = match g.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&rep)?,
        Format::Csv => {
            let (lo, hi) = rep.confidence_interval_95.unzip();
            csv_bytes(
                &[
                    "strategy",
                    "probe_energy",
                    "true_r",
                    "samples",
                    "trials",
                    "seed",
                    "empirical_mean",
                    "bias",
                    "empirical_variance",
                    "crb",
                    "variance_ratio",
                    "ci95_low",
                    "ci95_high",
                    "boundary_hits",
                ],
                [vec![
                    rep.strategy.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default(),
                    format_number(rep.probe_energy),
                    format_number(rep.true_r),
                    rep.samples.to_string(),
                    rep.trials.to_string(),
                    rep.seed.to_string(),
                    format_number(rep.empirical_mean),
                    format_number(rep.bias),
                    format_opt(rep.empirical_variance),
                    format_opt(rep.crb),
                    format_opt(rep.variance_ratio),
                    format_opt(lo),
                    format_opt(hi),
                    rep.boundary_hits.to_string(),
                ]],
            )?
        }
    };
    open_output(g.output.as_deref(), stdout, &body)
}

/// Library evaluation behind `convert`.
pub fn convert_record(args: &ConvertArgs, convention: OmegaConvention) -> CliResult<DerivedQuantities> {
    let given: Vec<ScenarioSource> = [
        args.accel.map(ScenarioSource::Acceleration),
        args.mass.map(ScenarioSource::Mass),
        args.temp.map(ScenarioSource::Temperature),
        args.r.map(ScenarioSource::R),
    ]
    .into_iter()
    .flatten()
    .collect();
    let [source] = given[..] else {
        return Err(CliError::Usage(format!(
            "exactly one of --accel, --mass, --temp, --r is required, got {}",
            given.len()
        )));
    };
    let omega = convention.to_angular(args.omega.unwrap_or(DEFAULT_OMEGA));
    Ok(Scenario::new(omega, source)?.derive()?)
}

fn cmd_convert(args: &ConvertArgs, g: &Globals, stdout: &mut dyn Write) -> CliResult<()> {
    let d = convert_record(args, g.omega_convention)?;
    let body = match g.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&d)?,
        Format::Csv => csv_bytes(
            &["omega", "acceleration", "acceleration_over_g", "temperature", "r", "n_T", "mass"],
            [vec![
                format_number(d.omega),
                format_number(d.acceleration),
                format_number(d.acceleration_over_g),
                format_number(d.temperature),
                format_number(d.r),
                format_number(d.n_t),
                format_opt(d.mass),
            ]],
        )?,
    };
    open_output(g.output.as_deref(), stdout, &body)
}
