//! The `vistest` command line.
//!
//! Every command writes one CSV. Its leading `#` lines record the tool
//! version and the fully resolved parameters, so reruns with the same flags
//! and seed are byte-identical. Output goes to `--out`, else to
//! `$VISTEST_OUT_DIR/<name>.csv` when that variable is set, else to stdout.
//!
//! `--config FILE` reads `key = value` lines whose keys are long flag names
//! of the chosen subcommand; flags given on the command line win.
//!
//! Exit status is 0 on success, 2 for usage errors and 3 for domain errors.
//! Failures print one line `vistest:error:<kind>:<message>` to stderr.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::chernoff::{
    chernoff_coherent_closed_form, chernoff_information, OutcomeDistributionPair,
};
use crate::energyopt::{
    coherent_map, linear_lattice, log_grid, optimal_energy, random_phase_map, resolution_curves,
    write_curves_csv, ScanOptions, StatisticsMode, DEFAULT_MAP_SIZE,
};
use crate::error::Error;
use crate::fingerprint::{
    crossover, revealed_information_curves, write_revealed_csv, CrossoverResult,
};
use crate::photostat::{
    joint_fixed_phase, joint_random_phase, marginal_difference, ComplexVisibility, DetectionParams,
};
use crate::simkit::{
    default_repetition_grid, error_curve, write_error_curve_csv, ExperimentConfig,
    DEFAULT_ENSEMBLE, DEFAULT_SEED,
};
use crate::tagio::{
    bin_counts, compare_to_theory, histogram, parse_tags, synthesize_tags, BinningConfig,
};

pub const OUT_DIR_ENV: &str = "VISTEST_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "vistest",
    version,
    about = "Visibility hypothesis testing for two-port photon counting",
    args_override_self = true
)]
pub struct Cli {
    /// `key = value` file with defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output file.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint photocount distribution.
    Dist(DistArgs),
    /// Chernoff information between two visibilities.
    Chernoff(ChernoffArgs),
    /// Energy per realization maximizing information per photon.
    Optimize(OptimizeArgs),
    /// Monte Carlo error rate against the number of realizations.
    Simulate(SimulateArgs),
    /// Code rates and quantum-advantage input lengths.
    Fingerprint(FingerprintArgs),
    /// Histogram of a tag file, optionally compared with theory.
    Ingest(IngestArgs),
    /// Synthetic random-phase tag file.
    Synth(SynthArgs),
    /// Data sets behind the standard figures.
    Figures(FiguresArgs),
}

#[derive(Debug, Args)]
pub struct DistArgs {
    /// Visibility magnitude.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.56)]
    pub v: f64,
    /// Mean detected photon number per realization.
    #[arg(long, allow_negative_numbers = true, default_value_t = 6.3)]
    pub energy: f64,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
    /// Mean dark counts per port and realization.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub dark: f64,
    /// Fixed global phase instead of a random one.
    #[arg(long, allow_negative_numbers = true, value_name = "PHI")]
    pub fixed_phase: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ChernoffArgs {
    #[arg(long, default_value_t = 0.98, allow_negative_numbers = true)]
    pub v1: f64,
    #[arg(long, default_value_t = 0.56, allow_negative_numbers = true)]
    pub v2: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 6.3)]
    pub energy: f64,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
    /// Shared phase reference; `--v1`/`--v2` are real parts in [-1, 1].
    #[arg(long)]
    pub coherent: bool,
    /// Use only the count difference.
    #[arg(long)]
    pub marginal_diff: bool,
    /// Limited photon number resolution.
    #[arg(long, value_name = "K")]
    pub truncate: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.98)]
    pub v1: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.56)]
    pub v2: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    pub lo: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 30.0)]
    pub hi: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.05)]
    pub tol: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.98)]
    pub v1: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.56)]
    pub v2: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 6.3)]
    pub energy: f64,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
    /// Comma-separated realizations per dataset.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Datasets per estimate.
    #[arg(long, default_value_t = DEFAULT_ENSEMBLE)]
    pub ensemble: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Comma-separated true `V2` values for the worst-case band.
    #[arg(long, allow_negative_numbers = true, value_delimiter = ',')]
    pub band: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct FingerprintArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.98)]
    pub v1: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.56)]
    pub v2: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-4)]
    pub eps: f64,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
    /// Total photon budget of the phase-referenced protocol; its curve is
    /// left empty when absent.
    #[arg(long, allow_negative_numbers = true)]
    pub coherent_energy: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e2)]
    pub n_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e12)]
    pub n_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Tag CSV file.
    pub tagfile: PathBuf,
    #[arg(long, default_value_t = 80_000)]
    pub window_ns: u64,
    #[arg(long, default_value_t = 15)]
    pub truncation: usize,
    /// Theory to compare with, as `VISIBILITY,ENERGY`.
    #[arg(long, value_name = "V,ENERGY")]
    pub theory: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.56)]
    pub v: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 6.3)]
    pub energy: f64,
    #[arg(long, default_value_t = 10_000)]
    pub windows: usize,
    #[arg(long, default_value_t = 80_000)]
    pub window_ns: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "2a")]
    F2a,
    #[value(name = "2b")]
    F2b,
    #[value(name = "2c")]
    F2c,
    #[value(name = "3")]
    F3,
    #[value(name = "4c")]
    F4c,
    #[value(name = "s2")]
    S2,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    pub figure: Figure,
    /// Lattice size of the visibility maps.
    #[arg(long, default_value_t = DEFAULT_MAP_SIZE)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_ENSEMBLE)]
    pub ensemble: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Total photon budget of the phase-referenced protocol (figure s2).
    #[arg(long, allow_negative_numbers = true)]
    pub coherent_energy: Option<f64>,
}

/// Failure of a command with its exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            kind: "usage".into(),
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_DOMAIN,
        };
        Self {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Error::Io(e).into()
    }
}

/// CSV body plus the resolved parameters for its header.
struct Output {
    name: String,
    params: Vec<(String, String)>,
    body: Vec<u8>,
}

impl Output {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            params: Vec::new(),
            body: Vec::new(),
        }
    }

    fn param(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    fn render(&self, command: &str) -> Vec<u8> {
        let mut out = format!(
            "# vistest {}\n# command = {command}\n",
            env!("CARGO_PKG_VERSION")
        );
        for (k, v) in &self.params {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        let mut bytes = out.into_bytes();
        bytes.extend_from_slice(&self.body);
        bytes
    }
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(
    args: I,
    out_dir: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match parse_with_config(&args) {
        Ok(cli) => cli,
        Err(Parsed::Clap(e)) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{}", e.render());
            } else {
                let first = e.to_string();
                let first = first
                    .lines()
                    .next()
                    .unwrap_or("")
                    .trim_start_matches("error: ");
                let _ = writeln!(stderr, "vistest:error:usage:{first}");
                let _ = write!(stderr, "{}", e.render());
            }
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
        Err(Parsed::Cli(e)) => return report(e, stderr),
    };
    match execute(&cli, out_dir.as_deref(), stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => report(e, stderr),
    }
}

fn report(e: CliError, stderr: &mut dyn Write) -> i32 {
    let message = e.message.replace('\n', " ");
    let _ = writeln!(stderr, "vistest:error:{}:{message}", e.kind);
    e.code
}

enum Parsed {
    Clap(clap::Error),
    Cli(CliError),
}

fn parse_with_config(args: &[OsString]) -> Result<Cli, Parsed> {
    let cli = Cli::try_parse_from(args).map_err(Parsed::Clap)?;
    let Some(path) = &cli.config else {
        return Ok(cli);
    };
    let text = fs::read_to_string(path).map_err(|e| {
        Parsed::Cli(CliError::usage(format!(
            "cannot read config {}: {e}",
            path.display()
        )))
    })?;
    let injected = config_args(&text).map_err(Parsed::Cli)?;
    let name = subcommand_name(&cli.command);
    let at = args
        .iter()
        .position(|a| a.to_str() == Some(name))
        .ok_or_else(|| Parsed::Cli(CliError::usage("subcommand not found")))?;
    let mut merged: Vec<OsString> = args[..=at].to_vec();
    merged.extend(injected.into_iter().map(OsString::from));
    merged.extend_from_slice(&args[at + 1..]);
    Cli::try_parse_from(merged).map_err(Parsed::Clap)
}

/// `key = value` lines as long-flag arguments. `true` and `false` toggle
/// switches.
pub fn config_args(text: &str) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() || key == "config" || key == "out" {
            return Err(CliError::usage(format!(
                "config line {}: key {key:?} not allowed",
                i + 1
            )));
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Dist(_) => "dist",
        Command::Chernoff(_) => "chernoff",
        Command::Optimize(_) => "optimize",
        Command::Simulate(_) => "simulate",
        Command::Fingerprint(_) => "fingerprint",
        Command::Ingest(_) => "ingest",
        Command::Synth(_) => "synth",
        Command::Figures(_) => "figures",
    }
}

fn execute(
    cli: &Cli,
    out_dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let command = subcommand_name(&cli.command);
    // A comparison may fail after the histogram is ready; emit it first.
    let (output, deferred) = match &cli.command {
        Command::Dist(a) => (cmd_dist(a)?, None),
        Command::Chernoff(a) => (cmd_chernoff(a)?, None),
        Command::Optimize(a) => (cmd_optimize(a)?, None),
        Command::Simulate(a) => (cmd_simulate(a)?, None),
        Command::Fingerprint(a) => (cmd_fingerprint(a)?, None),
        Command::Ingest(a) => cmd_ingest(a, stderr)?,
        Command::Synth(a) => (cmd_synth(a)?, None),
        Command::Figures(a) => (cmd_figures(a)?, None),
    };
    let bytes = output.render(command);
    match (&cli.out, out_dir) {
        (Some(path), _) => write_file(path, &bytes)?,
        (None, Some(dir)) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.csv", output.name));
            write_file(&path, &bytes)?;
            writeln!(stderr, "wrote {}", path.display())?;
        }
        (None, None) => stdout.write_all(&bytes)?,
    }
    match deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(bytes)?;
    f.flush()
}

fn cmd_dist(a: &DistArgs) -> Result<Output, CliError> {
    let params = DetectionParams::new(a.energy, a.dark, a.truncation)?;
    let dist = match a.fixed_phase {
        Some(phi) => joint_fixed_phase(params, ComplexVisibility::new(a.v, phi)?)?,
        None => joint_random_phase(params, a.v)?,
    };
    let mut out = Output::new("dist");
    out.param("v", a.v)
        .param("energy", a.energy)
        .param("truncation", a.truncation)
        .param("dark", a.dark)
        .param(
            "phase",
            a.fixed_phase
                .map_or("random".to_string(), |p| p.to_string()),
        );
    dist.write_csv(&mut out.body)?;
    Ok(out)
}

fn cmd_chernoff(a: &ChernoffArgs) -> Result<Output, CliError> {
    let mut out = Output::new("chernoff");
    out.param("v1", a.v1)
        .param("v2", a.v2)
        .param("energy", a.energy)
        .param("truncation", a.truncation)
        .param("coherent", a.coherent)
        .param("marginal_diff", a.marginal_diff)
        .param(
            "truncate",
            a.truncate.map_or("none".to_string(), |k| k.to_string()),
        );
    let result = if a.coherent {
        if a.marginal_diff || a.truncate.is_some() {
            return Err(CliError::usage(
                "--coherent uses full statistics; drop --marginal-diff and --truncate",
            ));
        }
        chernoff_coherent_closed_form(a.energy, a.v1, a.v2)?
    } else {
        let k = a.truncate.unwrap_or(a.truncation);
        let params = DetectionParams::ideal(a.energy, k)?;
        let p1 = joint_random_phase(params, a.v1)?;
        let p2 = joint_random_phase(params, a.v2)?;
        let pair = if a.marginal_diff {
            OutcomeDistributionPair::from_difference(
                &marginal_difference(&p1),
                &marginal_difference(&p2),
            )?
        } else {
            OutcomeDistributionPair::from_joint(&p1, &p2)?
        };
        chernoff_information(&pair)
    };
    let per_photon = if a.energy > 0.0 {
        result.nats() / a.energy
    } else {
        0.0
    };
    let body = &mut out.body;
    writeln!(body, "quantity,value")?;
    writeln!(body, "chernoff_information,{:.16e}", result.nats())?;
    writeln!(body, "information_per_photon,{per_photon:.16e}")?;
    writeln!(body, "alpha_star,{:.16e}", result.alpha_star)?;
    writeln!(body, "sigma,{:.16e}", result.sigma)?;
    Ok(out)
}

fn cmd_optimize(a: &OptimizeArgs) -> Result<Output, CliError> {
    let opts = ScanOptions {
        range: (a.lo, a.hi),
        tol: a.tol,
        grid_points: a.points,
        truncation: a.truncation,
        mode: StatisticsMode::Joint,
    };
    let scan = optimal_energy(a.v1, a.v2, &opts)?;
    let mut out = Output::new("optimize");
    out.param("v1", a.v1)
        .param("v2", a.v2)
        .param("lo", a.lo)
        .param("hi", a.hi)
        .param("tol", a.tol)
        .param("points", a.points)
        .param("truncation", scan.truncation)
        .param("optimum_energy", format!("{:.16e}", scan.optimum_energy))
        .param("optimum_ratio", format!("{:.16e}", scan.optimum_ratio));
    scan.write_csv(&mut out.body)?;
    Ok(out)
}

fn join<T: Display>(xs: &[T]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[allow(clippy::too_many_arguments)]
fn simulate_output(
    name: &str,
    v1: f64,
    v2: f64,
    energy: f64,
    truncation: usize,
    n_list: &[usize],
    ensemble: usize,
    seed: u64,
    band: Option<&[f64]>,
) -> Result<Output, CliError> {
    let base = ExperimentConfig {
        true_visibility: v1,
        energy,
        truncation,
        repetitions: 1,
        ensemble_size: ensemble,
        seed,
    };
    let points = error_curve(v1, v2, n_list, &base, band)?;
    let mut out = Output::new(name);
    out.param("v1", v1)
        .param("v2", v2)
        .param("energy", energy)
        .param("truncation", truncation)
        .param("n_list", join(n_list))
        .param("ensemble", ensemble)
        .param("seed", seed)
        .param("band", band.map_or("none".to_string(), join));
    write_error_curve_csv(&points, &mut out.body)?;
    Ok(out)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<Output, CliError> {
    let n_list = a.n_list.clone().unwrap_or_else(default_repetition_grid);
    simulate_output(
        "simulate",
        a.v1,
        a.v2,
        a.energy,
        a.truncation,
        &n_list,
        a.ensemble,
        a.seed,
        a.band.as_deref(),
    )
}

fn crossover_params(out: &mut Output, r: &CrossoverResult) {
    out.param("rate", format!("{:.6}", r.code.rate))
        .param("delta_min", format!("{:.6}", r.code.delta_min))
        .param("energy_per_rep", format!("{:.6}", r.energy_per_rep))
        .param("chernoff_information", format!("{:.6e}", r.chernoff_info))
        .param("repetitions", r.repetitions)
        .param("total_energy", format!("{:.6}", r.total_energy))
        .param(
            "n_vs_best_classical",
            format!("{:.6e}", r.n_vs_best_classical),
        )
        .param(
            "n_vs_classical_limit",
            format!("{:.6e}", r.n_vs_classical_limit),
        )
        .param(
            "m_vs_best_classical",
            format!("{:.6e}", r.pulses_vs_best_classical()),
        )
        .param(
            "m_vs_classical_limit",
            format!("{:.6e}", r.pulses_vs_classical_limit()),
        );
}

#[allow(clippy::too_many_arguments)]
fn fingerprint_output(
    name: &str,
    v1: f64,
    v2: f64,
    eps: f64,
    truncation: usize,
    coherent_energy: Option<f64>,
    range: (f64, f64),
    points: usize,
) -> Result<Output, CliError> {
    let r = crossover(v1, v2, eps, truncation)?;
    let curves = revealed_information_curves(&r, v1, v2, eps, coherent_energy, range, points)?;
    let mut out = Output::new(name);
    out.param("v1", v1)
        .param("v2", v2)
        .param("eps", eps)
        .param("truncation", truncation)
        .param(
            "coherent_energy",
            coherent_energy.map_or("none".to_string(), |e| e.to_string()),
        )
        .param("n_min", range.0)
        .param("n_max", range.1)
        .param("points", points);
    crossover_params(&mut out, &r);
    write_revealed_csv(&curves, &mut out.body)?;
    Ok(out)
}

fn cmd_fingerprint(a: &FingerprintArgs) -> Result<Output, CliError> {
    fingerprint_output(
        "fingerprint",
        a.v1,
        a.v2,
        a.eps,
        a.truncation,
        a.coherent_energy,
        (a.n_min, a.n_max),
        a.points,
    )
}

fn parse_theory(spec: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::usage(format!("--theory expects VISIBILITY,ENERGY, got {spec:?}"));
    let (v, e) = spec.split_once(',').ok_or_else(bad)?;
    Ok((
        v.trim().parse().map_err(|_| bad())?,
        e.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_ingest(
    a: &IngestArgs,
    stderr: &mut dyn Write,
) -> Result<(Output, Option<CliError>), CliError> {
    let theory = a.theory.as_deref().map(parse_theory).transpose()?;
    let config = BinningConfig {
        window_ns: a.window_ns,
        truncation: a.truncation,
        ..BinningConfig::default()
    };
    config.validate()?;
    let file = File::open(&a.tagfile)?;
    let stream = parse_tags(BufReader::new(file))?;
    let outcomes = bin_counts(&stream, &config);
    let hist = histogram(&outcomes, a.truncation);
    let mut out = Output::new("ingest");
    out.param("tagfile", a.tagfile.display())
        .param("window_ns", a.window_ns)
        .param("truncation", a.truncation)
        .param("tags", stream.records.len())
        .param("windows", hist.total());
    let mut deferred = None;
    if let Some((v, energy)) = theory {
        out.param("theory_v", v).param("theory_energy", energy);
        let dist = joint_random_phase(DetectionParams::ideal(energy, a.truncation)?, v)?;
        match compare_to_theory(&hist, &dist) {
            Ok(cmp) => {
                out.param("occupied_cells", cmp.occupied_cells)
                    .param("within_two_fraction", format!("{:.6}", cmp.within_two))
                    .param("total_variation", format!("{:.6e}", cmp.total_variation))
                    .param("consistent", cmp.is_consistent());
                if !cmp.is_consistent() {
                    writeln!(
                        stderr,
                        "vistest:warning:mismatch:only {:.1}% of occupied cells within 2 units",
                        100.0 * cmp.within_two
                    )?;
                }
            }
            Err(e) => {
                out.param("comparison", "refused");
                deferred = Some(e.into());
            }
        }
    }
    hist.write_csv(&mut out.body)?;
    Ok((out, deferred))
}

fn cmd_synth(a: &SynthArgs) -> Result<Output, CliError> {
    let config = BinningConfig {
        window_ns: a.window_ns,
        ..BinningConfig::default()
    };
    let mut rng = crate::simkit::dataset_rng(a.seed, 0);
    let syn = synthesize_tags(&mut rng, a.energy, a.v, &config, a.windows)?;
    let mut out = Output::new("tags");
    out.param("v", a.v)
        .param("energy", a.energy)
        .param("windows", a.windows)
        .param("window_ns", a.window_ns)
        .param("seed", a.seed);
    syn.stream.write_csv(&mut out.body)?;
    Ok(out)
}

fn cmd_figures(a: &FiguresArgs) -> Result<Output, CliError> {
    if a.grid < 2 {
        return Err(CliError::usage("--grid must be >= 2"));
    }
    match a.figure {
        Figure::F2a => {
            let map = coherent_map(&linear_lattice(-1.0, 1.0, a.grid))?;
            let mut out = Output::new("fig2a");
            out.param("figure", "2a").param("grid", a.grid);
            map.write_csv(&mut out.body)?;
            Ok(out)
        }
        Figure::F2b | Figure::F2c => {
            let opts = ScanOptions::default();
            let map = random_phase_map(&linear_lattice(0.0, 1.0, a.grid), &opts)?;
            let id = if a.figure == Figure::F2b { "2b" } else { "2c" };
            let mut out = Output::new(&format!("fig{id}"));
            out.param("figure", id)
                .param("grid", a.grid)
                .param("range", format!("{},{}", opts.range.0, opts.range.1))
                .param("tol", opts.tol)
                .param("points", opts.grid_points)
                .param("truncation", opts.scan_truncation());
            map.write_csv(&mut out.body)?;
            Ok(out)
        }
        Figure::F3 => {
            let energies = log_grid(0.05, 30.0, 80);
            let curves = resolution_curves(0.98, 0.56, &energies, 2)?;
            let mut out = Output::new("fig3");
            out.param("figure", "3")
                .param("v1", 0.98)
                .param("v2", 0.56)
                .param("resolved", 2)
                .param("energies", "80 log-spaced in [0.05, 30]");
            write_curves_csv(&curves, &mut out.body)?;
            Ok(out)
        }
        Figure::F4c => {
            let band = linear_lattice(0.0, 0.56, 8);
            let mut out = simulate_output(
                "fig4c",
                0.98,
                0.56,
                6.3,
                15,
                &default_repetition_grid(),
                a.ensemble,
                a.seed,
                Some(&band),
            )?;
            out.params.insert(0, ("figure".into(), "4c".into()));
            Ok(out)
        }
        Figure::S2 => {
            let mut out = fingerprint_output(
                "figs2",
                0.98,
                0.56,
                1e-4,
                15,
                a.coherent_energy,
                (1e2, 1e12),
                101,
            )?;
            out.params.insert(0, ("figure".into(), "s2".into()));
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("vistest").chain(args.iter().copied()),
            None,
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn dist_shapes() {
        let (code, out, _) = run_args(&["dist"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# vistest "));
        let rows = out.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(rows, 1 + 16 * 16);
        let (_, out, _) = run_args(&[
            "dist",
            "--v",
            "1",
            "--energy",
            "2",
            "--truncation",
            "4",
            "--fixed-phase",
            "0",
        ]);
        for line in out.lines().filter(|l| !l.starts_with('#')).skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            if f[1] != "0" {
                assert_eq!(f[2].parse::<f64>().unwrap(), 0.0, "{line}");
            }
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["nope"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["dist", "--energy", "abc"]).0, EXIT_USAGE);
        let (code, _, err) = run_args(&["dist", "--energy", "-1"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.starts_with("vistest:error:domain:"), "{err}");
        let (code, _, err) = run_args(&["optimize", "--v1", "0.5", "--v2", "0.5"]);
        assert_eq!(code, EXIT_DOMAIN);
        assert!(err.starts_with("vistest:error:indistinguishable:"), "{err}");
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn chernoff_reports() {
        let (code, out, _) = run_args(&[
            "chernoff",
            "--coherent",
            "--v1",
            "1",
            "--v2",
            "-1",
            "--energy",
            "2",
        ]);
        assert_eq!(code, 0);
        let per_photon = out
            .lines()
            .find_map(|l| l.strip_prefix("information_per_photon,"))
            .unwrap();
        assert!((per_photon.parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
        let (_, out, _) = run_args(&["chernoff", "--v1", "0.7", "--v2", "0.7"]);
        assert!(out.contains("chernoff_information,0.0000000000000000e0"));
    }

    #[test]
    fn config_file_and_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        fs::write(&cfg, "# defaults\nenergy = 2\ntruncation = 4\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, out, _) = run_args(&["dist", "--config", cfg]);
        assert_eq!(code, 0);
        assert!(out.contains("# energy = 2\n") && out.contains("# truncation = 4\n"));
        let (_, out, _) = run_args(&["dist", "--config", cfg, "--energy", "3"]);
        assert!(out.contains("# energy = 3\n"));
        fs::write(dir.path().join("bad.conf"), "bogus = 1\n").unwrap();
        let bad = dir.path().join("bad.conf");
        assert_eq!(
            run_args(&["dist", "--config", bad.to_str().unwrap()]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn output_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            ["vistest", "dist"],
            Some(dir.path().to_path_buf()),
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert!(dir.path().join("dist.csv").exists());
    }

    #[test]
    fn ingest_empty_and_synthetic() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        fs::write(&empty, "").unwrap();
        let (code, out, err) =
            run_args(&["ingest", empty.to_str().unwrap(), "--theory", "0.56,6.3"]);
        assert_eq!(code, EXIT_DOMAIN, "{err}");
        assert!(out.contains("# comparison = refused"));
        assert!(out.contains("\n0,0,0\n"));

        let tags = dir.path().join("tags.csv");
        let (code, _, _) = run_args(&[
            "synth",
            "--windows",
            "20000",
            "--out",
            tags.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let (code, out, _) = run_args(&["ingest", tags.to_str().unwrap(), "--theory", "0.56,6.3"]);
        assert_eq!(code, 0);
        assert!(out.contains("# windows = 20000\n"));
        assert!(out.contains("# consistent = true\n"), "{out}");
        let (code, out, err) =
            run_args(&["ingest", tags.to_str().unwrap(), "--theory", "0.98,6.3"]);
        assert_eq!(code, 0);
        assert!(out.contains("# consistent = false\n"));
        assert!(err.contains("vistest:warning:mismatch"));
    }
}
