//! Command-line front end: orchestrates the experiments and emits
//! machine-readable CSV or JSON record tables.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, bad config
//! file, out-of-range parameters), 2 on numerical failures (tolerance not
//! met, fit rejected, unstable bound scan, I/O). All diagnostics go to
//! stderr; only the record table goes to the output.
//!
//! Every subcommand accepts `--config <file>` holding flat `key=value`
//! lines whose keys mirror the long flag names; explicit flags override
//! file entries, and unknown keys are rejected by name. Identical inputs
//! produce bitwise-identical outputs: the pipeline is deterministic and
//! float cells are printed with 17 significant digits.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::fit::{self, FitError};
use crate::multipliers::{self, DataSymbol, GaussianDatum};
use crate::quadrature::{self, QuadratureError, QuadratureSpec};
use crate::roots::{self, ModelParams, RootsError};
use crate::verifier::{self, BoundFamily, ExperimentConfig, ProfileKind, VerifierError};

#[derive(Debug)]
enum CliError {
    /// Rejected before any computation: exit code 1.
    Invalid(String),
    /// Failed during computation or output: exit code 2.
    Runtime(String),
}

impl From<VerifierError> for CliError {
    fn from(e: VerifierError) -> Self {
        match &e {
            VerifierError::InvalidConfig { .. } => CliError::Invalid(e.to_string()),
            VerifierError::Roots(RootsError::InvalidParams { .. }) => {
                CliError::Invalid(e.to_string())
            }
            VerifierError::Quadrature(QuadratureError::InvalidSpec { .. }) => {
                CliError::Invalid(e.to_string())
            }
            VerifierError::Fit(FitError::TooFewSamples(_) | FitError::InvalidSample(_)) => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<RootsError> for CliError {
    fn from(e: RootsError) -> Self {
        match &e {
            RootsError::InvalidParams { .. } | RootsError::OutsideZone { .. } => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<QuadratureError> for CliError {
    fn from(e: QuadratureError) -> Self {
        match &e {
            QuadratureError::InvalidSpec { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<multipliers::MultiplierError> for CliError {
    fn from(e: multipliers::MultiplierError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "thermoplate",
    version,
    about = "Spectral experiments for the thermoelastic plate with Newton cooling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the characteristic-root branches over a frequency grid.
    Roots(RootsOpts),
    /// L2-norm sweeps of the explicit diffusion kernels.
    Kernels(KernelsOpts),
    /// Exact symbol trajectory at one frequency against the ODE oracle.
    Simulate(SimulateOpts),
    /// Solution-norm decay/growth rates against the optimal envelope.
    Rates(RatesOpts),
    /// Profile-convergence ratios ||u - phi|| / B_n(t).
    Profile(ProfileOpts),
    /// Cross-model comparison table of fitted norm exponents.
    Table1(Table1Opts),
    /// Pointwise inequality scans with refinement stability checks.
    Bounds(BoundsOpts),
}

#[derive(Args, Debug)]
struct CommonOpts {
    /// Flat key=value config file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected 'csv' or 'json', got '{other}'")),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KernelKind {
    /// r^k exp(-c r^4 t).
    Power,
    /// t sinc(r^2 t) exp(-c r^4 t).
    Sine,
}

impl FromStr for KernelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "power" => Ok(KernelKind::Power),
            "sine" => Ok(KernelKind::Sine),
            other => Err(format!("expected 'power' or 'sine', got '{other}'")),
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ProfileArg {
    /// Full first-order profile (moment and coupling terms included).
    Full,
    /// Leading term J0 * P_u1 only.
    Simple,
}

impl FromStr for ProfileArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(ProfileArg::Full),
            "simple" => Ok(ProfileArg::Simple),
            other => Err(format!("expected 'full' or 'simple', got '{other}'")),
        }
    }
}

#[derive(Args, Debug)]
struct RootsOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Cooling coefficient sigma >= 0.
    #[arg(long)]
    sigma: Option<f64>,
    /// Lower end of the frequency grid.
    #[arg(long)]
    rmin: Option<f64>,
    /// Upper end of the frequency grid.
    #[arg(long)]
    rmax: Option<f64>,
    /// Number of log-spaced grid points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct KernelsOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Kernel shape.
    #[arg(long, value_enum)]
    kernel: Option<KernelKind>,
    /// Power of r in the power kernel.
    #[arg(long)]
    k: Option<u32>,
    /// Spatial dimension n >= 1.
    #[arg(long)]
    dim: Option<usize>,
    /// Damping rate c > 0 in exp(-c r^4 t).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    t_lo: Option<f64>,
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct SimulateOpts {
    #[command(flatten)]
    common: CommonOpts,
    #[arg(long)]
    sigma: Option<f64>,
    /// Frequency r = |xi| (required).
    #[arg(long)]
    r: Option<f64>,
    /// Initial displacement symbol value.
    #[arg(long)]
    u0: Option<f64>,
    /// Initial velocity symbol value.
    #[arg(long)]
    u1: Option<f64>,
    /// Initial temperature symbol value.
    #[arg(long)]
    theta0: Option<f64>,
    /// End of the linear time grid starting at 0.
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    /// ODE oracle tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct ExperimentFlags {
    #[arg(long)]
    sigma: Option<f64>,
    /// Spatial dimension n >= 1 (required).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    u0_amp: Option<f64>,
    #[arg(long)]
    u0_width: Option<f64>,
    #[arg(long)]
    u1_amp: Option<f64>,
    #[arg(long)]
    u1_width: Option<f64>,
    /// Center offset of the velocity datum (dimension 1 only).
    #[arg(long)]
    u1_shift: Option<f64>,
    #[arg(long)]
    theta0_amp: Option<f64>,
    #[arg(long)]
    theta0_width: Option<f64>,
    #[arg(long)]
    t_lo: Option<f64>,
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    /// Relative quadrature tolerance.
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Quadrature cutoff radius (default derived from data widths).
    #[arg(long)]
    r_max: Option<f64>,
}

#[derive(Args, Debug)]
struct RatesOpts {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    experiment: ExperimentFlags,
}

#[derive(Args, Debug)]
struct ProfileOpts {
    #[command(flatten)]
    common: CommonOpts,
    #[command(flatten)]
    experiment: ExperimentFlags,
    /// Which profile to subtract.
    #[arg(long, value_enum)]
    profile: Option<ProfileArg>,
}

#[derive(Args, Debug)]
struct Table1Opts {
    #[command(flatten)]
    common: CommonOpts,
    /// Comma-separated list of dimensions.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Comma-separated list of cooling coefficients.
    #[arg(long, value_delimiter = ',')]
    sigmas: Option<Vec<f64>>,
    /// Width of the Gaussian velocity datum.
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    t_lo: Option<f64>,
    #[arg(long)]
    t_hi: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct BoundsOpts {
    #[command(flatten)]
    common: CommonOpts,
    /// Family name (star1, est01..est05, large) or 'all'.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    u0: Option<f64>,
    #[arg(long)]
    u1: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
}

/// Entry point used by the binary and by tests. `argv` includes the
/// program name.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    crate::parallel::init_thread_cap_from_env();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Roots(o) => cmd_roots(o),
        Command::Kernels(o) => cmd_kernels(o),
        Command::Simulate(o) => cmd_simulate(o),
        Command::Rates(o) => cmd_rates(o),
        Command::Profile(o) => cmd_profile(o),
        Command::Table1(o) => cmd_table1(o),
        Command::Bounds(o) => cmd_bounds(o),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

// ---------------------------------------------------------------------------
// Config-file merging
// ---------------------------------------------------------------------------

struct ConfigMap {
    entries: BTreeMap<String, String>,
}

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        if let Some(p) = path {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Invalid(format!("config file {}: {e}", p.display())))?;
            for (idx, raw_line) in text.lines().enumerate() {
                let line = raw_line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::Invalid(format!(
                        "config file {} line {}: expected key=value, got '{line}'",
                        p.display(),
                        idx + 1
                    )));
                };
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    /// Every key must have been consumed by some flag resolution.
    fn finish(self) -> Result<(), CliError> {
        match self.entries.keys().next() {
            Some(key) => Err(CliError::Invalid(format!("unknown config key '{key}'"))),
            None => Ok(()),
        }
    }
}

/// Flag wins; otherwise the config value is parsed; otherwise None.
fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &mut ConfigMap,
    key: &str,
) -> Result<Option<T>, CliError>
where
    T::Err: fmt::Display,
{
    let file_value = cfg.take(key);
    if flag.is_some() {
        return Ok(flag);
    }
    match file_value {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|e| CliError::Invalid(format!("config key '{key}': {e} (value '{raw}')"))),
        None => Ok(None),
    }
}

/// Comma-separated list version of [`resolve`].
fn resolve_list<T: FromStr>(
    flag: Option<Vec<T>>,
    cfg: &mut ConfigMap,
    key: &str,
) -> Result<Option<Vec<T>>, CliError>
where
    T::Err: fmt::Display,
{
    let file_value = cfg.take(key);
    if flag.is_some() {
        return Ok(flag);
    }
    match file_value {
        Some(raw) => raw
            .split(',')
            .map(|item| {
                item.trim().parse::<T>().map_err(|e| {
                    CliError::Invalid(format!("config key '{key}': {e} (item '{item}')"))
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some),
        None => Ok(None),
    }
}

fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| {
        CliError::Invalid(format!(
            "missing required value: pass --{name} or config key '{name}'"
        ))
    })
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Invalid(msg()))
    }
}

struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

fn resolve_sink(common: &CommonOpts, cfg: &mut ConfigMap) -> Result<Sink, CliError> {
    let out = resolve(common.out.clone(), cfg, "out")?;
    let format = resolve(common.format, cfg, "format")?.unwrap_or(Format::Csv);
    Ok(Sink { out, format })
}

// ---------------------------------------------------------------------------
// Record tables and serialization
// ---------------------------------------------------------------------------

enum Value {
    Int(i64),
    Float(f64),
    Str(String),
    Null,
}

struct Table {
    columns: &'static [&'static str],
    rows: Vec<Vec<Value>>,
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Value {
    fn csv_cell(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(f) if f.is_finite() => fmt_float(*f),
            Value::Float(f) if f.is_nan() => "NaN".into(),
            Value::Float(f) => if *f > 0.0 { "inf" } else { "-inf" }.into(),
            Value::Str(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn json_cell(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(f) if f.is_finite() => fmt_float(*f),
            Value::Float(_) | Value::Null => "null".into(),
            Value::Str(s) => {
                let mut quoted = String::with_capacity(s.len() + 2);
                quoted.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => quoted.push_str("\\\""),
                        '\\' => quoted.push_str("\\\\"),
                        c if (c as u32) < 0x20 => quoted.push_str(&format!("\\u{:04x}", c as u32)),
                        c => quoted.push(c),
                    }
                }
                quoted.push('"');
                quoted
            }
        }
    }
}

fn write_csv<W: IoWrite>(table: &Table, w: W) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(w);
    let io_err = |e: csv::Error| CliError::Runtime(format!("writing csv: {e}"));
    writer.write_record(table.columns).map_err(io_err)?;
    for row in &table.rows {
        writer
            .write_record(row.iter().map(Value::csv_cell))
            .map_err(io_err)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Runtime(format!("writing csv: {e}")))
}

fn write_json<W: IoWrite>(table: &Table, mut w: W) -> Result<(), CliError> {
    let io_err = |e: io::Error| CliError::Runtime(format!("writing json: {e}"));
    writeln!(w, "[").map_err(io_err)?;
    for (i, row) in table.rows.iter().enumerate() {
        let fields: Vec<String> = table
            .columns
            .iter()
            .zip(row)
            .map(|(col, val)| format!("\"{col}\": {}", val.json_cell()))
            .collect();
        let comma = if i + 1 < table.rows.len() { "," } else { "" };
        writeln!(w, "  {{{}}}{comma}", fields.join(", ")).map_err(io_err)?;
    }
    writeln!(w, "]").map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn emit(table: &Table, sink: &Sink) -> Result<(), CliError> {
    match &sink.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Runtime(format!("creating {}: {e}", path.display())))?;
            let writer = BufWriter::new(file);
            match sink.format {
                Format::Csv => write_csv(table, writer),
                Format::Json => write_json(table, writer),
            }
        }
        None => {
            let stdout = io::stdout();
            let lock = stdout.lock();
            match sink.format {
                Format::Csv => write_csv(table, lock),
                Format::Json => write_json(table, lock),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_roots(o: RootsOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let sigma = resolve(o.sigma, &mut cfg, "sigma")?.unwrap_or(1.0);
    let rmin = resolve(o.rmin, &mut cfg, "rmin")?.unwrap_or(1e-3);
    let rmax = resolve(o.rmax, &mut cfg, "rmax")?.unwrap_or(1e3);
    let points = resolve(o.points, &mut cfg, "points")?.unwrap_or(200);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(sigma.is_finite() && sigma >= 0.0, || {
        format!("sigma must be finite and >= 0, got {sigma}")
    })?;
    check(rmin.is_finite() && rmin > 0.0, || {
        format!("rmin must be finite and > 0, got {rmin}")
    })?;
    check(rmax.is_finite() && rmax > rmin, || {
        format!("rmax must exceed rmin, got rmin={rmin}, rmax={rmax}")
    })?;
    check(points >= 2, || format!("points must be >= 2, got {points}"))?;

    let grid = fit::log_grid(rmin, rmax, points);
    let branches = roots::track_branches(&grid, sigma)?;
    let rows = branches
        .iter()
        .map(|b| {
            vec![
                Value::Float(b.r),
                Value::Float(b.lambda1),
                Value::Float(b.lambda_r),
                Value::Float(b.lambda_i),
            ]
        })
        .collect();
    emit(
        &Table {
            columns: &["r", "lambda1", "lambdaR", "lambdaI"],
            rows,
        },
        &sink,
    )
}

fn cmd_kernels(o: KernelsOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let kernel = resolve(o.kernel, &mut cfg, "kernel")?.unwrap_or(KernelKind::Power);
    let k = resolve(o.k, &mut cfg, "k")?.unwrap_or(0);
    let dim = resolve(o.dim, &mut cfg, "dim")?.unwrap_or(1);
    let c = resolve(o.c, &mut cfg, "c")?.unwrap_or(0.25);
    let t_lo = resolve(o.t_lo, &mut cfg, "t-lo")?.unwrap_or(1e2);
    let t_hi = resolve(o.t_hi, &mut cfg, "t-hi")?.unwrap_or(1e4);
    let t_points = resolve(o.t_points, &mut cfg, "t-points")?.unwrap_or(9);
    let rel_tol = resolve(o.rel_tol, &mut cfg, "rel-tol")?.unwrap_or(1e-8);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(dim >= 1, || format!("dim must be >= 1, got {dim}"))?;
    check(c.is_finite() && c > 0.0, || {
        format!("c must be finite and > 0, got {c}")
    })?;
    check(t_lo.is_finite() && t_lo > 0.0 && t_hi > t_lo, || {
        format!("need 0 < t-lo < t-hi, got t-lo={t_lo}, t-hi={t_hi}")
    })?;
    check(t_points >= 2, || {
        format!("t-points must be >= 2, got {t_points}")
    })?;
    QuadratureSpec::default().with_rel_tol(rel_tol).validate()?;

    let times = fit::log_grid(t_lo, t_hi, t_points);
    let sweep: Vec<(f64, f64)> = match kernel {
        KernelKind::Power => verifier::kernel_norm_sweep(k, dim, c, &times, rel_tol)?,
        KernelKind::Sine => times
            .iter()
            .map(|&t| Ok((t, verifier::sine_kernel_norm(dim, c, t, rel_tol)?)))
            .collect::<Result<_, VerifierError>>()?,
    };
    let rows = sweep
        .into_iter()
        .map(|(t, norm)| vec![Value::Float(t), Value::Float(norm)])
        .collect();
    emit(
        &Table {
            columns: &["t", "norm"],
            rows,
        },
        &sink,
    )
}

fn cmd_simulate(o: SimulateOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let sigma = resolve(o.sigma, &mut cfg, "sigma")?.unwrap_or(1.0);
    let r = require(resolve(o.r, &mut cfg, "r")?, "r")?;
    let u0 = resolve(o.u0, &mut cfg, "u0")?.unwrap_or(1.0);
    let u1 = resolve(o.u1, &mut cfg, "u1")?.unwrap_or(1.0);
    let theta0 = resolve(o.theta0, &mut cfg, "theta0")?.unwrap_or(1.0);
    let t_max = resolve(o.t_max, &mut cfg, "t-max")?.unwrap_or(10.0);
    let t_points = resolve(o.t_points, &mut cfg, "t-points")?.unwrap_or(101);
    let tol = resolve(o.tol, &mut cfg, "tol")?.unwrap_or(1e-10);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(sigma.is_finite() && sigma >= 0.0, || {
        format!("sigma must be finite and >= 0, got {sigma}")
    })?;
    check(r.is_finite() && r >= 0.0, || {
        format!("r must be finite and >= 0, got {r}")
    })?;
    check(r > 0.0 || sigma > 0.0, || {
        "r = 0 with sigma = 0 has no root decomposition".to_string()
    })?;
    check(t_max.is_finite() && t_max > 0.0, || {
        format!("t-max must be finite and > 0, got {t_max}")
    })?;
    check(t_points >= 2, || {
        format!("t-points must be >= 2, got {t_points}")
    })?;
    check((1e-13..=1e-3).contains(&tol), || {
        format!("tol must lie in [1e-13, 1e-3], got {tol}")
    })?;

    let rts = roots::solve_cubic(r, sigma)?;
    let data = DataSymbol::real(u0, u1, theta0);
    let mut rows = Vec::with_capacity(t_points);
    for i in 0..t_points {
        let t = t_max * i as f64 / (t_points - 1) as f64;
        let exact = multipliers::u_hat(t, &rts, &data)?;
        let oracle = multipliers::ode_oracle_system(t, r, sigma, &data, tol)?;
        rows.push(vec![
            Value::Float(t),
            Value::Float(exact.re),
            Value::Float(exact.im),
            Value::Float(oracle.re),
            Value::Float(oracle.im),
            Value::Float((exact - oracle).norm()),
        ]);
    }
    emit(
        &Table {
            columns: &["t", "u_re", "u_im", "oracle_re", "oracle_im", "abs_err"],
            rows,
        },
        &sink,
    )
}

/// Shared resolution of the Gaussian-data experiment flags.
fn resolve_experiment(
    flags: ExperimentFlags,
    cfg: &mut ConfigMap,
) -> Result<ExperimentConfig, CliError> {
    let sigma = resolve(flags.sigma, cfg, "sigma")?.unwrap_or(1.0);
    let dim = require(resolve(flags.dim, cfg, "dim")?, "dim")?;
    let u0_amp = resolve(flags.u0_amp, cfg, "u0-amp")?.unwrap_or(0.0);
    let u0_width = resolve(flags.u0_width, cfg, "u0-width")?.unwrap_or(0.5);
    let u1_amp = resolve(flags.u1_amp, cfg, "u1-amp")?.unwrap_or(1.0);
    let u1_width = resolve(flags.u1_width, cfg, "u1-width")?.unwrap_or(0.5);
    let u1_shift = resolve(flags.u1_shift, cfg, "u1-shift")?.unwrap_or(0.0);
    let theta0_amp = resolve(flags.theta0_amp, cfg, "theta0-amp")?.unwrap_or(0.0);
    let theta0_width = resolve(flags.theta0_width, cfg, "theta0-width")?.unwrap_or(0.5);
    let t_lo = resolve(flags.t_lo, cfg, "t-lo")?.unwrap_or(1e2);
    let t_hi = resolve(flags.t_hi, cfg, "t-hi")?.unwrap_or(1e4);
    let t_points = resolve(flags.t_points, cfg, "t-points")?.unwrap_or(12);
    let rel_tol = resolve(flags.rel_tol, cfg, "rel-tol")?.unwrap_or(1e-8);
    let r_max = resolve(flags.r_max, cfg, "r-max")?;

    for (name, width) in [
        ("u0-width", u0_width),
        ("u1-width", u1_width),
        ("theta0-width", theta0_width),
    ] {
        check(width.is_finite() && width > 0.0, || {
            format!("{name} must be finite and > 0, got {width}")
        })?;
    }
    for (name, amp) in [
        ("u0-amp", u0_amp),
        ("u1-amp", u1_amp),
        ("theta0-amp", theta0_amp),
    ] {
        check(amp.is_finite(), || {
            format!("{name} must be finite, got {amp}")
        })?;
    }
    check(t_lo.is_finite() && t_hi.is_finite() && t_hi > t_lo, || {
        format!("need t-lo < t-hi, got t-lo={t_lo}, t-hi={t_hi}")
    })?;
    check(t_points >= 2, || {
        format!("t-points must be >= 2, got {t_points}")
    })?;

    let params = ModelParams::new(sigma, dim)?;
    let u1 = if u1_shift != 0.0 {
        GaussianDatum::new(u1_amp, u1_width, vec![u1_shift])
    } else {
        GaussianDatum::radial(u1_amp, u1_width)
    };
    let default_r_max = [
        (u0_amp, u0_width),
        (u1_amp, u1_width),
        (theta0_amp, theta0_width),
    ]
    .iter()
    .filter(|(amp, _)| *amp != 0.0)
    .map(|&(_, w)| verifier::r_max_for_width(w))
    .fold(8.0f64, f64::max);
    let quad = QuadratureSpec::default()
        .with_rel_tol(rel_tol)
        .with_r_max(r_max.unwrap_or(default_r_max));
    quad.validate()?;

    let config = ExperimentConfig {
        params,
        u0: GaussianDatum::radial(u0_amp, u0_width),
        u1,
        theta0: GaussianDatum::radial(theta0_amp, theta0_width),
        time_grid: fit::log_grid(t_lo, t_hi, t_points),
        quad,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_rates(o: RatesOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let config = resolve_experiment(o.experiment, &mut cfg)?;
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    let report = verifier::check_theorem1(&config)?;
    eprintln!(
        "power-law fit: exponent={:.6} r_squared={:.6}",
        report.power.exponent, report.power.r_squared
    );
    eprintln!(
        "sqrt-log fit: slope={:.6} r_squared={:.6}",
        report.sqrt_log.exponent, report.sqrt_log.r_squared
    );
    eprintln!(
        "preferred={} envelope_drift={:.6}",
        report.preferred, report.envelope_drift
    );
    if let Some(lower) = &report.lower {
        eprintln!(
            "lower bound: min_ratio={:.6} trailing_slope={:.6}",
            lower.min_ratio, lower.trailing_slope
        );
    }
    let rows = report
        .points
        .iter()
        .map(|p| {
            let lower = if p.lower_ratio.is_nan() {
                Value::Null
            } else {
                Value::Float(p.lower_ratio)
            };
            vec![
                Value::Float(p.t),
                Value::Float(p.norm),
                Value::Float(p.envelope),
                lower,
            ]
        })
        .collect();
    emit(
        &Table {
            columns: &["t", "norm", "envelope", "lower_ratio"],
            rows,
        },
        &sink,
    )
}

fn cmd_profile(o: ProfileOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let config = resolve_experiment(o.experiment, &mut cfg)?;
    let which = resolve(o.profile, &mut cfg, "profile")?.unwrap_or(ProfileArg::Full);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(config.params.sigma > 0.0, || {
        format!("profile requires sigma > 0, got {}", config.params.sigma)
    })?;
    let kind = match which {
        ProfileArg::Full => ProfileKind::Full,
        ProfileArg::Simple => ProfileKind::Simple,
    };
    let mut rows = Vec::with_capacity(config.time_grid.len());
    for &t in &config.time_grid {
        let residual = verifier::profile_residual(t, &config, kind)?.value;
        let envelope = quadrature::decay_b(config.params.n, t)?;
        rows.push(vec![
            Value::Float(t),
            Value::Float(residual),
            Value::Float(envelope),
            Value::Float(residual / envelope),
        ]);
    }
    emit(
        &Table {
            columns: &["t", "residual", "envelope", "ratio"],
            rows,
        },
        &sink,
    )
}

fn cmd_table1(o: Table1Opts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let dims = resolve_list(o.dims, &mut cfg, "dims")?.unwrap_or_else(|| vec![1, 2, 3, 4, 5]);
    let sigmas = resolve_list(o.sigmas, &mut cfg, "sigmas")?.unwrap_or_else(|| vec![0.0, 1.0]);
    let width = resolve(o.width, &mut cfg, "width")?.unwrap_or(0.5);
    let t_lo = resolve(o.t_lo, &mut cfg, "t-lo")?.unwrap_or(1e2);
    let t_hi = resolve(o.t_hi, &mut cfg, "t-hi")?.unwrap_or(1e4);
    let t_points = resolve(o.t_points, &mut cfg, "t-points")?.unwrap_or(12);
    let rel_tol = resolve(o.rel_tol, &mut cfg, "rel-tol")?.unwrap_or(1e-8);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(!dims.is_empty(), || "dims must not be empty".to_string())?;
    check(dims.iter().all(|&n| n >= 1), || {
        format!("dims must all be >= 1, got {dims:?}")
    })?;
    check(sigmas.iter().all(|s| s.is_finite() && *s >= 0.0), || {
        format!("sigmas must be finite and >= 0, got {sigmas:?}")
    })?;
    check(width.is_finite() && width > 0.0, || {
        format!("width must be finite and > 0, got {width}")
    })?;
    check(t_lo.is_finite() && t_hi > t_lo, || {
        format!("need t-lo < t-hi, got t-lo={t_lo}, t-hi={t_hi}")
    })?;
    check(t_points >= 8, || {
        format!("t-points must be >= 8 for rate fits, got {t_points}")
    })?;
    let quad = QuadratureSpec::default().with_rel_tol(rel_tol);
    quad.validate()?;

    let times = fit::log_grid(t_lo, t_hi, t_points);
    let rows = verifier::table1_experiment(&dims, &sigmas, width, &times, &quad)?
        .into_iter()
        .map(|row| {
            vec![
                Value::Str(row.model),
                Value::Int(row.n as i64),
                Value::Str(row.fit_model),
                Value::Float(row.exponent),
                Value::Float(row.r_squared),
            ]
        })
        .collect();
    emit(
        &Table {
            columns: &["model", "n", "fit_model", "exponent", "r_squared"],
            rows,
        },
        &sink,
    )
}

fn cmd_bounds(o: BoundsOpts) -> Result<(), CliError> {
    let mut cfg = ConfigMap::load(o.common.config.as_deref())?;
    let family_raw = resolve(o.family, &mut cfg, "family")?.unwrap_or_else(|| "all".to_string());
    let sigma = resolve(o.sigma, &mut cfg, "sigma")?.unwrap_or(1.0);
    let u0 = resolve(o.u0, &mut cfg, "u0")?.unwrap_or(1.0);
    let u1 = resolve(o.u1, &mut cfg, "u1")?.unwrap_or(1.0);
    let theta0 = resolve(o.theta0, &mut cfg, "theta0")?.unwrap_or(1.0);
    let sink = resolve_sink(&o.common, &mut cfg)?;
    cfg.finish()?;

    check(sigma.is_finite() && sigma > 0.0, || {
        format!("sigma must be finite and > 0, got {sigma}")
    })?;
    let families: Vec<BoundFamily> = if family_raw == "all" {
        BoundFamily::ALL.to_vec()
    } else {
        vec![family_raw.parse().map_err(CliError::Invalid)?]
    };

    let data = DataSymbol::real(u0, u1, theta0);
    let mut rows = Vec::with_capacity(families.len());
    for family in families {
        let checkres = verifier::check_bound(family, sigma, &data)?;
        rows.push(vec![
            Value::Str(checkres.family.name().to_string()),
            Value::Float(checkres.rate),
            Value::Float(checkres.constant),
            Value::Float(checkres.worst_t),
            Value::Float(checkres.worst_r),
            Value::Float(checkres.refined_constant),
            Value::Float(checkres.growth),
            match checkres.spectral_gap {
                Some(gap) => Value::Float(gap),
                None => Value::Null,
            },
        ]);
    }
    emit(
        &Table {
            columns: &[
                "family",
                "rate",
                "constant",
                "worst_t",
                "worst_r",
                "refined_constant",
                "growth",
                "spectral_gap",
            ],
            rows,
        },
        &sink,
    )
}
