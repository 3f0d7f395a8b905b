//! The `dirac8` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::QuantumParams;
use crate::chain::{
    characteristic_scales, continuum_convergence, run_mode_with_step, max_frequency, write_trajectory_csv,
    ChainBranch, ChainParams, ConvergenceFit, ModeMeasurement,
};
use crate::dispersion::{dispersion_table, group_velocity, linspace, write_dispersion_csv, Branch};
use crate::evolution::{
    evolve, init_packet, measure_group_velocity, rk4_step_bound, write_series_csv,
    write_snapshot_csv, EvolutionConfig, Method, PacketSpec,
};
use crate::output::fmt_f64;
use crate::plane_waves::{catalog, Spin};
use crate::verify::{run_all, Corruption, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dirac8",
    version,
    about = "Mass-in-mass chain, eight-component Dirac equation and its dispersion branches"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch energies on a momentum grid as CSV.
    Dispersion(DispersionArgs),
    /// Run the full invariant suite.
    Verify(VerifyArgs),
    /// Simulate a normal mode of the mass-in-mass chain.
    Chain(ChainArgs),
    /// The eight plane-wave solutions at one momentum as JSON.
    Solutions(SolutionsArgs),
    /// Evolve a wave packet and measure its group velocity.
    Evolve(EvolveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitSystem {
    /// hbar = c = m_e = 1.
    Natural,
    /// Values from --me, --c and --hbar.
    Custom,
}

#[derive(Debug, Clone, Args)]
pub struct UnitArgs {
    #[arg(long, value_enum, default_value = "natural")]
    pub units: UnitSystem,
    /// Electron rest mass (custom units).
    #[arg(long = "me", default_value_t = 1.0)]
    pub m_e: f64,
    /// Speed of light (custom units).
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Reduced Planck constant (custom units).
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

impl UnitArgs {
    fn resolve(&self, epsilon: f64) -> Result<QuantumParams, CliError> {
        let p = match self.units {
            UnitSystem::Natural => {
                if self.m_e != 1.0 || self.c != 1.0 || self.hbar != 1.0 {
                    return Err(CliError::Usage(
                        "--me, --c and --hbar require --units custom".into(),
                    ));
                }
                QuantumParams::natural(epsilon)
            }
            UnitSystem::Custom => QuantumParams {
                m_e: self.m_e,
                epsilon,
                c: self.c,
                hbar: self.hbar,
            },
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    fn header(&self, params: &QuantumParams, epsilons: &[f64]) -> String {
        let name = match self.units {
            UnitSystem::Natural => "natural",
            UnitSystem::Custom => "custom",
        };
        let eps = epsilons.iter().map(|e| fmt_f64(*e)).collect::<Vec<_>>().join(",");
        format!(
            "# units={name} m_e={} c={} hbar={} epsilon={eps}",
            fmt_f64(params.m_e),
            fmt_f64(params.c),
            fmt_f64(params.hbar)
        )
    }
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    /// Coupling ratio; repeat for several datasets.
    #[arg(long, default_values_t = [0.5])]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub pmin: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub pmax: f64,
    /// Number of momentum points.
    #[arg(long, default_value_t = 121)]
    pub n: usize,
    /// CSV destination (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub units: UnitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Inject a known fault to confirm the suite detects it.
    #[arg(long, hide = true)]
    pub corrupt: Option<Corruption>,
    #[command(flatten)]
    pub units: UnitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainBranchArg {
    Acoustic,
    Optical,
}

impl From<ChainBranchArg> for ChainBranch {
    fn from(b: ChainBranchArg) -> Self {
        match b {
            ChainBranchArg::Acoustic => ChainBranch::Acoustic,
            ChainBranchArg::Optical => ChainBranch::Optical,
        }
    }
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Inner mass.
    #[arg(long = "m", default_value_t = 1.0)]
    pub inner_mass: f64,
    /// Outer mass.
    #[arg(long = "M", default_value_t = 4.0)]
    pub outer_mass: f64,
    /// Inner-outer spring.
    #[arg(long = "K", default_value_t = 1.0)]
    pub coupling: f64,
    /// Spring between neighbouring inner masses.
    #[arg(long = "I", default_value_t = 1.0)]
    pub inner_spring: f64,
    /// Spring between neighbouring outer masses.
    #[arg(long = "J", default_value_t = 1.0)]
    pub outer_spring: f64,
    /// Lattice period.
    #[arg(long = "a", default_value_t = 1.0)]
    pub period: f64,
    /// Mode index on the ring.
    #[arg(long, default_value_t = 2)]
    pub mode: usize,
    /// Number of sites.
    #[arg(long, default_value_t = 128)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "acoustic")]
    pub branch: ChainBranchArg,
    #[arg(long, default_value_t = 1e-3)]
    pub amplitude: f64,
    /// Simulated periods of the mode, at least 3.
    #[arg(long, default_value_t = 10.0)]
    pub periods: f64,
    /// Verlet step (default 0.02/omega_max).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Products k*a for a continuum convergence sweep at fixed wavenumber.
    #[arg(long = "ka-sweep", value_delimiter = ',')]
    pub ka_sweep: Vec<f64>,
    /// Wavenumber of the convergence sweep.
    #[arg(long = "sweep-k", default_value_t = 0.5)]
    pub sweep_k: f64,
    /// Trajectory CSV destination.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Summary JSON destination (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolutionsArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub pz: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub units: UnitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Spectral,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Spectral => Method::SpectralExact,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value = "optical+")]
    pub branch: Branch,
    #[arg(long, default_value = "up")]
    pub spin: Spin,
    /// Central wavenumber.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub k0: f64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Packet width parameter.
    #[arg(long, default_value_t = 10.0)]
    pub sigma: f64,
    /// Initial centre (default: middle of the domain).
    #[arg(long)]
    pub center: Option<f64>,
    /// Grid points (power of two).
    #[arg(long = "grid", default_value_t = 1024)]
    pub n_grid: usize,
    /// Periodic domain length.
    #[arg(long, default_value_t = 200.0)]
    pub length: f64,
    #[arg(long = "t-end", default_value_t = 40.0)]
    pub t_end: f64,
    /// Centroid samples.
    #[arg(long, default_value_t = 41)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "spectral")]
    pub method: MethodArg,
    /// Intensity snapshots at the start and end of the run, as CSV.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Centroid and width time series, as CSV.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Summary JSON destination (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub units: UnitArgs,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid flags or ranges, exit code 2.
    Usage(String),
    /// A run that could not complete, exit code 1.
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

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(format!("i/o: {e}"))
    }
}

fn failure(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn to_file(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failure(format!("cannot create {}: {e}", path.display())))
}

/// Writes `body` to `path` or, without a path, to `stdout`.
fn emit(
    path: Option<&PathBuf>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = to_file(p)?;
            body(&mut f)?;
            f.flush()?;
        }
        None => body(stdout)?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(failure)
}

fn cmd_dispersion(a: &DispersionArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.n < 2 {
        return Err(CliError::Usage(format!("--n must be at least 2 (got {})", a.n)));
    }
    if !(a.pmin.is_finite() && a.pmax.is_finite() && a.pmax > a.pmin) {
        return Err(CliError::Usage(format!(
            "momentum range must satisfy pmin < pmax (got {} .. {})",
            a.pmin, a.pmax
        )));
    }
    let params = a.epsilon.iter().map(|&e| a.units.resolve(e)).collect::<Result<Vec<_>, _>>()?;
    let header = a.units.header(&params[0], &a.epsilon);
    let grid = linspace(a.pmin, a.pmax, a.n);
    writeln!(out, "{header}")?;
    emit(a.output.as_ref(), out, |w| {
        if a.output.is_some() {
            writeln!(w, "{header}")?;
        }
        for p in &params {
            writeln!(w, "# epsilon={}", fmt_f64(p.epsilon))?;
            write_dispersion_csv(&mut *w, &dispersion_table(p.epsilon, &grid, p))?;
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let params = a.units.resolve(a.epsilon)?;
    let opts = VerifyOptions {
        params,
        corruption: a.corrupt,
        seed: a.seed,
        ..VerifyOptions::default()
    };
    let report = run_all(&opts);
    let header = a.units.header(&params, &[a.epsilon]);
    writeln!(out, "{header}")?;
    emit(a.output.as_ref(), out, |w| match a.format {
        ReportFormat::Text => writeln!(w, "{report}"),
        ReportFormat::Json => {
            let json = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
            writeln!(w, "{json}")
        }
    })?;
    if report.all_passed() {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "verification failed:")?;
        for c in report.failures() {
            writeln!(err, "  {}: measured {:e}, tolerance {:e}", c.name, c.measured, c.tolerance)?;
        }
        Ok(EXIT_FAILURE)
    }
}

#[derive(Serialize)]
struct ChainSummary<'a> {
    params: ChainParams,
    epsilon: f64,
    omega_max: f64,
    #[serde(flatten)]
    mode: &'a ModeMeasurement,
    convergence: Option<ConvergenceFit>,
}

fn cmd_chain(a: &ChainArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = ChainParams::new(
        a.inner_mass,
        a.outer_mass,
        a.coupling,
        a.inner_spring,
        a.outer_spring,
        a.period,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    if !(a.periods.is_finite() && a.periods >= 3.0) {
        return Err(CliError::Usage(format!(
            "--periods must be at least 3 for a frequency measurement (got {})",
            a.periods
        )));
    }
    if a.ka_sweep.iter().any(|ka| !(ka.is_finite() && *ka > 0.0)) {
        return Err(CliError::Usage("--ka-sweep values must be positive".into()));
    }
    if !a.ka_sweep.is_empty() && a.ka_sweep.len() < 2 {
        return Err(CliError::Usage("--ka-sweep needs at least two values".into()));
    }
    let scales = characteristic_scales(&params);
    let header = format!(
        "# units=lattice m={} M={} K={} I={} J={} a={} epsilon={}",
        fmt_f64(params.inner_mass),
        fmt_f64(params.outer_mass),
        fmt_f64(params.coupling),
        fmt_f64(params.inner_spring),
        fmt_f64(params.outer_spring),
        fmt_f64(params.period),
        fmt_f64(scales.epsilon)
    );
    writeln!(out, "{header}")?;
    let omega_max = max_frequency(&params);
    let dt = a.dt.unwrap_or(0.02 / omega_max);
    let mode = run_mode_with_step(
        &params,
        a.n,
        a.mode,
        a.branch.into(),
        a.amplitude,
        a.periods,
        dt,
    )
    .map_err(failure)?;
    let convergence =
        (!a.ka_sweep.is_empty()).then(|| continuum_convergence(&params, a.sweep_k, &a.ka_sweep));
    if let Some(path) = &a.trajectory {
        let mut f = to_file(path)?;
        writeln!(f, "{header}")?;
        write_trajectory_csv(&mut f, &mode.trajectory)?;
        f.flush()?;
    }
    let summary = ChainSummary {
        params,
        epsilon: scales.epsilon,
        omega_max,
        mode: &mode,
        convergence,
    };
    let json = to_json(&summary)?;
    emit(a.output.as_ref(), out, |w| writeln!(w, "{json}"))?;
    Ok(EXIT_OK)
}

fn cmd_solutions(a: &SolutionsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !a.pz.is_finite() {
        return Err(CliError::Usage("--pz must be finite".into()));
    }
    let params = a.units.resolve(a.epsilon)?;
    writeln!(out, "{}", a.units.header(&params, &[a.epsilon]))?;
    let json = to_json(&catalog(a.pz, &params))?;
    emit(a.output.as_ref(), out, |w| writeln!(w, "{json}"))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EvolveSummary {
    branch: String,
    spin: Spin,
    method: Method,
    packet: PacketSpec,
    config: EvolutionConfig,
    velocity_measured: f64,
    velocity_analytic: f64,
    absolute_error: f64,
    /// Relative to `|v_analytic|`, or to `c` when the analytic value is zero.
    relative_error: f64,
    displacement: f64,
}

fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let params = a.units.resolve(a.epsilon)?;
    let header = a.units.header(&params, &[a.epsilon]);
    writeln!(out, "{header}")?;
    let spec = PacketSpec {
        k0: a.k0,
        sigma: a.sigma,
        branch: a.branch,
        spin: a.spin,
        center: a.center.unwrap_or(0.5 * a.length),
    };
    let config = EvolutionConfig {
        n_grid: a.n_grid,
        length: a.length,
        t_end: a.t_end,
        n_samples: a.samples,
        method: a.method.into(),
    };
    let m = measure_group_velocity(&spec, &config, &params).map_err(failure)?;
    let analytic = group_velocity(a.branch, a.k0, &params);
    let abs = (m.velocity - analytic).abs();
    let scale = if analytic == 0.0 { params.c } else { analytic.abs() };

    if let Some(path) = &a.snapshots {
        let s0 = init_packet(&spec, a.n_grid, a.length, &params).map_err(failure)?;
        let s1 = match config.method {
            Method::SpectralExact => evolve(&s0, a.t_end, 1, &params, Method::SpectralExact),
            Method::Rk4 => {
                let bound = 0.5 * rk4_step_bound(a.n_grid, a.length, &params);
                let n = (a.t_end.abs() / bound).ceil().max(1.0) as usize;
                evolve(&s0, a.t_end / n as f64, n, &params, Method::Rk4)
            }
        }
        .map_err(failure)?;
        let mut f = to_file(path)?;
        writeln!(f, "{header}")?;
        for s in [&s0, &s1] {
            writeln!(f, "# t={}", fmt_f64(s.t))?;
            write_snapshot_csv(&mut f, s)?;
        }
        f.flush()?;
    }
    if let Some(path) = &a.series {
        let mut f = to_file(path)?;
        writeln!(f, "{header}")?;
        write_series_csv(&mut f, &m.series)?;
        f.flush()?;
    }
    let summary = EvolveSummary {
        branch: a.branch.to_string(),
        spin: a.spin,
        method: config.method,
        packet: spec,
        config,
        velocity_measured: m.velocity,
        velocity_analytic: analytic,
        absolute_error: abs,
        relative_error: abs / scale,
        displacement: m.displacement,
    };
    let json = to_json(&summary)?;
    emit(a.output.as_ref(), out, |w| writeln!(w, "{json}"))?;
    Ok(EXIT_OK)
}

/// Caps the global rayon pool at `DIRAC8_THREADS` when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("DIRAC8_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("DIRAC8_THREADS must be a positive integer (got `{v}`)")))?;
        // a pool built earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs one parsed command, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Dispersion(a) => cmd_dispersion(a, out),
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Chain(a) => cmd_chain(a, out),
        Command::Solutions(a) => cmd_solutions(a, out),
        Command::Evolve(a) => cmd_evolve(a, out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            code
        }
    }
}
