//! Command-line front end.
//!
//! Exit status: 0 on success, 2 for invalid flags or values, 1 for numerical
//! failures and I/O errors. `--config FILE` reads `key=value` lines whose keys
//! are long flag names; flags given on the command line take precedence.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::{
    dephasing_fixed_point, evolve_with_pulse, ChannelParams, DrivePulse, Liouvillian,
};
use crate::eraser::{
    average_concurrence, closed_form_average_concurrence, stationary_blocks_with,
    stationary_ghz_blocks_with, MeasurementBasis,
};
use crate::error::Error;
use crate::measures::{concurrence, concurrence_x, entropy_x, von_neumann_entropy};
use crate::output::{eraser_table, format_number, stationary_table, Table};
use crate::states::StateDescriptor;
use crate::sweep::{
    extrema_correspondence, linspace, sweep_eraser, sweep_stationary, SweepSpec,
    DEFAULT_GAMMA_T_MAX, DEFAULT_OMEGA_RATIO, DEFAULT_POINTS, DEFAULT_WINDOW,
};
use crate::verify::{run_checks, CHECK_NAMES};

#[derive(Debug, Parser)]
#[command(
    name = "dephasing",
    version,
    about = "Two qubits under collective dephasing with a finite drive"
)]
pub struct Cli {
    /// Read additional `key=value` settings from this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of a single driven evolution.
    Evolve(EvolveArgs),
    /// Stationary state for one pulse length.
    Stationary(StationaryArgs),
    /// Stationary concurrence and entropy over a γT grid.
    Sweep(SweepArgs),
    /// Average concurrence after the qubit-3 measurement over a (γT, θ) grid.
    EraserSweep(EraserArgs),
    /// Run the built-in numerical checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Physics {
    /// Drive amplitude in units of γ.
    #[arg(long, default_value_t = DEFAULT_OMEGA_RATIO)]
    pub omega_ratio: f64,
    /// Dephasing rate; sets the time unit.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// phi+, phi-, psi+, psi- or werner:<r>.
    #[arg(long)]
    pub state: StateDescriptor,
    #[command(flatten)]
    pub physics: Physics,
    /// Scaled pulse length γT.
    #[arg(long)]
    pub gamma_t: f64,
    /// Last scaled time γt of the series.
    #[arg(long, default_value_t = DEFAULT_GAMMA_T_MAX)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct StationaryArgs {
    /// phi+, phi-, psi+, psi-, werner:<r> or ghz.
    #[arg(long)]
    pub state: StateDescriptor,
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long)]
    pub gamma_t: f64,
    /// Measurement polar angle for the GHZ state.
    #[arg(long, default_value_t = FRAC_PI_2)]
    pub theta: f64,
    /// Measurement azimuth for the GHZ state.
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    pub gamma_t_min: f64,
    #[arg(long, default_value_t = DEFAULT_GAMMA_T_MAX)]
    pub gamma_t_max: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub state: StateDescriptor,
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Index window for matching concurrence maxima to entropy minima.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct EraserArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[command(flatten)]
    pub grid: GridArgs,
    /// θ grid covers [0, π] with this many points.
    #[arg(long, default_value_t = 61)]
    pub theta_points: usize,
    #[arg(long, default_value_t = 0.0)]
    pub phi: f64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these checks (repeatable).
    #[arg(long = "check", value_parser = clap::builder::PossibleValuesParser::new(CHECK_NAMES))]
    pub checks: Vec<String>,
    /// Replace every pinned tolerance with this value.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Failure classes mapped to exit statuses.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn numerical(e: Error) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    args.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            args.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Appends config-file settings as flags unless the flag is already present.
pub fn merge_config(mut args: Vec<String>, settings: &[(String, String)]) -> Vec<String> {
    let present = |key: &str| {
        let flag = format!("--{key}");
        args.iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")))
    };
    let extra: Vec<String> = settings
        .iter()
        .filter(|(k, _)| k != "config" && !present(k))
        .flat_map(|(k, v)| [format!("--{k}"), v.clone()])
        .collect();
    args.extend(extra);
    args
}

/// Entry point used by the binary; returns the exit status.
pub fn run_from_args(args: Vec<String>) -> u8 {
    let args = match config_path(&args) {
        Some(path) => match std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read config {path}: {e}"))
            .and_then(|t| parse_config(&t))
        {
            Ok(settings) => merge_config(args, &settings),
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        },
        None => args,
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code().clamp(0, 255) as u8;
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(&cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Dispatches a parsed command. Summaries go to `out`; tables go to the
/// output file, or to `out` when no file was given.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Evolve(a) => evolve(a, out),
        Command::Stationary(a) => stationary(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::EraserSweep(a) => eraser(a, out),
        Command::Verify(a) => verify(a, out),
    }
}

fn params(p: &Physics) -> Result<ChannelParams, CliError> {
    if !(p.omega_ratio.is_finite() && p.omega_ratio >= 0.0) {
        return Err(usage(format!(
            "--omega-ratio must be >= 0, got {}",
            p.omega_ratio
        )));
    }
    ChannelParams::new(p.gamma).map_err(usage)
}

fn emit(table: &Table, o: &Output, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match o.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &o.output {
        Some(path) => write_file(path, &text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Numerical(format!("write failed: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text)
        .map_err(|e| CliError::Numerical(format!("cannot write {}: {e}", path.display())))
}

fn line(out: &mut dyn Write, text: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(out, "{}", text.as_ref())
        .map_err(|e| CliError::Numerical(format!("write failed: {e}")))
}

fn evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = params(&a.physics)?;
    let rho0 = a
        .state
        .two_qubit()
        .map_err(usage)?
        .ok_or_else(|| usage("evolve needs a two-qubit state"))?;
    let pulse = DrivePulse::from_scaled(a.physics.omega_ratio, a.gamma_t, params).map_err(usage)?;
    if !(a.t_max.is_finite() && a.t_max >= 0.0) || a.points == 0 {
        return Err(usage("--t-max must be >= 0 and --points positive"));
    }
    let mut table = Table::new(&["gamma_t", "concurrence", "entropy", "purity"]);
    for gt in linspace(0.0, a.t_max, a.points) {
        let rho =
            evolve_with_pulse(&rho0, pulse, params, gt / params.gamma()).map_err(numerical)?;
        table.push(vec![
            gt,
            concurrence(&rho).map_err(numerical)?,
            von_neumann_entropy(&rho).map_err(numerical)?,
            rho.purity(),
        ]);
    }
    emit(&table, &a.out, out)?;
    if a.out.output.is_some() {
        line(out, table.summary())?;
    }
    Ok(0)
}

fn stationary(a: &StationaryArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let params = params(&a.physics)?;
    let pulse = DrivePulse::from_scaled(a.physics.omega_ratio, a.gamma_t, params).map_err(usage)?;
    let generator = Liouvillian::build(pulse.omega1(), params).map_err(numerical)?;
    match a.state.two_qubit().map_err(usage)? {
        Some(rho0) => {
            let x = generator
                .stationary_state(&rho0, pulse.duration())
                .map_err(numerical)?;
            let rho = dephasing_fixed_point(
                &generator
                    .propagate(&rho0, pulse.duration())
                    .map_err(numerical)?,
            );
            let (c, s) = (concurrence_x(&x), entropy_x(&x));
            line(out, format!("a = {}", format_number(x.a)))?;
            line(out, format!("b = {}", format_number(x.b)))?;
            line(out, format!("c = {}", format_number(x.c)))?;
            line(out, format!("d = {}", format_number(x.d)))?;
            line(out, format!("f = {}", format_complex(x.f)))?;
            line(out, format!("C_s = {}", format_number(c)))?;
            line(out, format!("S = {}", format_number(s)))?;
            line(
                out,
                format!(
                    "C_s (general) = {}",
                    format_number(concurrence(&rho).map_err(numerical)?)
                ),
            )?;
            line(
                out,
                format!(
                    "S (general) = {}",
                    format_number(von_neumann_entropy(&rho).map_err(numerical)?)
                ),
            )?;
            if a.out.output.is_some() {
                let mut table = Table::new(&[
                    "gamma_t",
                    "a",
                    "b",
                    "c",
                    "d",
                    "f_re",
                    "f_im",
                    "concurrence",
                    "entropy",
                ]);
                table.push(vec![a.gamma_t, x.a, x.b, x.c, x.d, x.f.re, x.f.im, c, s]);
                emit(&table, &a.out, out)?;
            }
        }
        None => {
            let basis = MeasurementBasis::new(a.theta, a.phi).map_err(usage)?;
            let z = stationary_blocks_with(&generator, pulse.duration()).map_err(numerical)?;
            let blocks =
                stationary_ghz_blocks_with(&generator, pulse.duration()).map_err(numerical)?;
            let brute = average_concurrence(&blocks, basis).map_err(numerical)?;
            let closed = closed_form_average_concurrence(&z, a.theta);
            let traced =
                concurrence(&blocks.trace_out_qubit3().map_err(numerical)?).map_err(numerical)?;
            line(out, format!("zeta_a = {}", format_number(z.zeta_a)))?;
            line(out, format!("zeta_b = {}", format_number(z.zeta_b)))?;
            line(out, format!("zeta_c = {}", format_number(z.zeta_c)))?;
            line(out, format!("zeta_d = {}", format_number(z.zeta_d)))?;
            line(out, format!("zeta_f = {}", format_complex(z.zeta_f)))?;
            line(out, format!("C_ave = {}", format_number(brute)))?;
            line(
                out,
                format!("C_ave (closed form) = {}", format_number(closed)),
            )?;
            line(
                out,
                format!("C (qubit 3 traced out) = {}", format_number(traced)),
            )?;
            if a.out.output.is_some() {
                let mut table = Table::new(&["gamma_t", "theta", "c_ave"]);
                table.push(vec![a.gamma_t, a.theta, brute]);
                emit(&table, &a.out, out)?;
            }
        }
    }
    Ok(0)
}

fn format_complex(z: crate::linalg::C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!(
        "{} {sign} {}i",
        format_number(z.re),
        format_number(z.im.abs())
    )
}

fn grid(g: &GridArgs) -> Result<Vec<f64>, CliError> {
    if g.points == 0 {
        return Err(usage("--points must be positive"));
    }
    if g.points > 1 && g.gamma_t_max <= g.gamma_t_min {
        return Err(usage("--gamma-t-max must exceed --gamma-t-min"));
    }
    Ok(linspace(g.gamma_t_min, g.gamma_t_max, g.points))
}

fn sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    params(&a.physics)?;
    if a.state == StateDescriptor::Ghz {
        return Err(usage(
            "sweep needs a two-qubit state; use eraser-sweep for ghz",
        ));
    }
    let mut spec = SweepSpec::stationary(a.state, a.physics.omega_ratio, grid(&a.grid)?);
    spec.gamma = a.physics.gamma;
    spec.validate().map_err(usage)?;
    let records = sweep_stationary(&spec).map_err(numerical)?;
    let table = stationary_table(&records);
    emit(&table, &a.out, out)?;
    if a.out.output.is_some() {
        line(
            out,
            format!(
                "{} records for {} at omega_ratio {}",
                records.len(),
                a.state,
                a.physics.omega_ratio
            ),
        )?;
        line(out, table.summary())?;
        match extrema_correspondence(&records, a.window) {
            Ok(report) => {
                let unmatched: Vec<usize> = report.unmatched().collect();
                line(
                    out,
                    format!(
                        "extrema correspondence (window {}): {} concurrence maxima, {} unmatched -> {}",
                        a.window,
                        report.matches.len(),
                        unmatched.len(),
                        if report.passed() { "PASS" } else { "FAIL" }
                    ),
                )?;
            }
            Err(e) => line(out, format!("extrema correspondence: not evaluated ({e})"))?,
        }
    }
    Ok(0)
}

fn eraser(a: &EraserArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    params(&a.physics)?;
    if a.theta_points == 0 {
        return Err(usage("--theta-points must be positive"));
    }
    let thetas = if a.theta_points == 1 {
        vec![FRAC_PI_2]
    } else {
        linspace(0.0, PI, a.theta_points)
    };
    let mut spec = SweepSpec::eraser(a.physics.omega_ratio, grid(&a.grid)?, thetas);
    spec.gamma = a.physics.gamma;
    spec.phi = a.phi;
    spec.validate().map_err(usage)?;
    MeasurementBasis::new(0.0, a.phi).map_err(usage)?;
    let records = sweep_eraser(&spec).map_err(numerical)?;
    let table = eraser_table(&records);
    emit(&table, &a.out, out)?;
    if a.out.output.is_some() {
        line(
            out,
            format!(
                "{} records at omega_ratio {}",
                records.len(),
                a.physics.omega_ratio
            ),
        )?;
        line(out, table.summary())?;
    }
    Ok(0)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    if let Some(t) = a.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(usage("--tolerance must be >= 0"));
        }
    }
    let outcomes = run_checks(&a.checks, a.tolerance).map_err(usage)?;
    let mut first_failure = None;
    for o in &outcomes {
        line(
            out,
            format!(
                "[{}] {:<20} {:>7.2}s  {}",
                if o.passed { "PASS" } else { "FAIL" },
                o.name,
                o.seconds,
                o.detail
            ),
        )?;
        if !o.passed && first_failure.is_none() {
            first_failure = Some(o.name);
        }
    }
    match first_failure {
        Some(name) => {
            line(out, format!("first failing check: {name}"))?;
            Ok(1)
        }
        None => {
            line(out, format!("all {} checks passed", outcomes.len()))?;
            Ok(0)
        }
    }
}
