//! Command-line front end.
//!
//! Every command reads a JSON [`RunConfig`] and writes its results into the
//! output directory. Exit codes: 0 success, 1 configuration error, 2
//! numerical non-convergence, 3 internal invariant violation.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::check::{run_all, CheckReport};
use crate::config::{Command, Format, ModelKind, RunConfig};
use crate::error::{Error, Result};
use crate::phase::{at_line, beta_dw, larkin_mass_finite_t, larkin_mass_zero_t, phase_diagram, rs_criterion, spherical_rs_criterion};
use crate::report::{phase_csv, phase_svg, stream_csv, to_json, write_file, PhaseCurves};
use crate::saddle::{observables, outer_maximize, solve_rs, solve_spherical, SaddleResult};
use crate::simulate::{run_chains, summarize, SimSummary};

/// Batches used for the standard errors of `simulate`.
pub const SUMMARY_BATCHES: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "elastic-manifold", version, about = "Free energies and phase diagrams of the disordered elastic manifold")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for scans and chains (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Overrides `sim.seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Output formats to write; may be repeated.
    #[arg(long = "format", global = true, value_enum)]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Sub {
    /// Solve the saddle point and write the free energy.
    FreeEnergy,
    /// Classify one parameter point as RS or RSB.
    Classify,
    /// Zero- and positive-temperature Larkin masses and β_DW.
    Larkin,
    /// RS/RSB boundaries along one inverse temperature.
    AtLine,
    /// Classify a (β, μ) grid and render the diagram.
    PhaseDiagram,
    /// Monte Carlo of the finite-N model.
    Simulate,
    /// Run the identity suite.
    Check,
}

impl Sub {
    fn command(self) -> Option<Command> {
        Some(match self {
            Sub::FreeEnergy => Command::FreeEnergy,
            Sub::Classify => Command::Classify,
            Sub::Larkin => Command::Larkin,
            Sub::AtLine => Command::AtLine,
            Sub::PhaseDiagram => Command::PhaseDiagram,
            Sub::Simulate => Command::Simulate,
            Sub::Check => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LarkinReport {
    pub mu_zero_t: f64,
    pub mu_beta: Option<f64>,
    pub beta_dw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub is_rs: bool,
    /// Replica-symmetric targets, absent in the RSB phase.
    pub radius_sq: Option<f64>,
    pub overlap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub summary: SimSummary,
    pub theory: Theory,
    pub step_sizes: Vec<f64>,
    pub swap_rate: Option<f64>,
    pub seed: u64,
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    /// One-line result printed on stdout.
    pub message: String,
    pub exit_code: i32,
}

struct Sink {
    dir: PathBuf,
    formats: Vec<Format>,
    written: Vec<PathBuf>,
}

impl Sink {
    fn wants(&self, f: Format) -> bool {
        self.formats.is_empty() || self.formats.contains(&f)
    }

    fn put(&mut self, f: Format, name: &str, contents: impl FnOnce() -> Result<String>) -> Result<()> {
        if self.wants(f) {
            let path = self.dir.join(name);
            write_file(&path, &contents()?)?;
            self.written.push(path);
        }
        Ok(())
    }
}

pub fn parse_from<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args)
}

/// Runs a parsed command line on a dedicated thread pool.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let config = match (cli.command.command(), &cli.config) {
        (None, _) => None,
        (Some(cmd), Some(path)) => {
            let c = RunConfig::load(path)?;
            c.validate_for(cmd)?;
            Some(c)
        }
        (Some(cmd), None) => return Err(Error::Config(format!("command {} needs --config", cmd.name()))),
    };
    let output = config.as_ref().and_then(|c| c.output.clone());
    let dir = cli
        .out
        .clone()
        .or_else(|| output.as_ref().and_then(|o| o.directory.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    let formats = if cli.formats.is_empty() { output.map(|o| o.formats).unwrap_or_default() } else { cli.formats.clone() };
    let mut sink = Sink { dir, formats, written: Vec::new() };
    let (message, exit_code) = match (cli.command, config) {
        (Sub::Check, _) => check(&mut sink)?,
        (Sub::FreeEnergy, Some(c)) => free_energy(&c, &mut sink)?,
        (Sub::Classify, Some(c)) => classify(&c, &mut sink)?,
        (Sub::Larkin, Some(c)) => larkin(&c, &mut sink)?,
        (Sub::AtLine, Some(c)) => at_line_cmd(&c, &mut sink)?,
        (Sub::PhaseDiagram, Some(c)) => diagram(&c, &mut sink)?,
        (Sub::Simulate, Some(c)) => simulate(&c, cli.seed, &mut sink)?,
        (_, None) => return Err(Error::Invariant("configuration was not loaded".into())),
    };
    Ok(Outcome { written: sink.written, message, exit_code })
}

/// Replica-symmetric closed form when the criterion passes, full saddle otherwise.
pub fn free_energy_euclidean(c: &RunConfig) -> Result<SaddleResult> {
    let p = c.euclidean()?;
    if rs_criterion(&p)?.is_rs {
        solve_rs(&p)
    } else {
        outer_maximize(&p, &c.solver())
    }
}

fn free_energy(c: &RunConfig, sink: &mut Sink) -> Result<(String, i32)> {
    let res = match c.model {
        ModelKind::Euclidean => free_energy_euclidean(c)?,
        ModelKind::Spherical => solve_spherical(&c.spherical()?, &c.solver())?,
    };
    sink.put(Format::Json, "free_energy.json", || to_json(&res))?;
    let code = if res.converged { 0 } else { 2 };
    Ok((serde_json::to_string(&res)?, code))
}

fn classify(c: &RunConfig, sink: &mut Sink) -> Result<(String, i32)> {
    let json = match c.model {
        ModelKind::Euclidean => to_json(&rs_criterion(&c.euclidean()?)?)?,
        ModelKind::Spherical => to_json(&spherical_rs_criterion(&c.spherical()?)?)?,
    };
    sink.put(Format::Json, "classify.json", || Ok(json.clone()))?;
    Ok((json, 0))
}

fn larkin(c: &RunConfig, sink: &mut Sink) -> Result<(String, i32)> {
    let (b, lat) = (c.disorder()?, c.lattice()?);
    let mu_beta = match c.beta {
        Some(beta) => larkin_mass_finite_t(&b, &lat, beta)?,
        None => None,
    };
    let report = LarkinReport { mu_zero_t: larkin_mass_zero_t(&b, &lat)?, mu_beta, beta_dw: beta_dw(&b, &lat)? };
    let json = to_json(&report)?;
    sink.put(Format::Json, "larkin.json", || Ok(json.clone()))?;
    Ok((json, 0))
}

fn at_line_cmd(c: &RunConfig, sink: &mut Sink) -> Result<(String, i32)> {
    let scan = c.scan.as_ref().ok_or_else(|| Error::Config("missing field `scan`".into()))?;
    let mus = scan.mu_grid.points()?;
    let lo = mus.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mus.iter().copied().fold(0.0, f64::max);
    let beta = c.beta.ok_or_else(|| Error::Config("missing field `beta`".into()))?;
    let line = at_line(&c.disorder()?, &c.lattice()?, beta, (lo, hi), mus.len())?;
    let json = to_json(&line)?;
    sink.put(Format::Json, "at_line.json", || Ok(json.clone()))?;
    Ok((serde_json::to_string(&line)?, 0))
}

fn diagram(c: &RunConfig, sink: &mut Sink) -> Result<(String, i32)> {
    let scan = c.scan.as_ref().ok_or_else(|| Error::Config("missing field `scan`".into()))?;
    let betas = scan
        .beta_grid
        .as_ref()
        .ok_or_else(|| Error::Config("missing field `scan.beta_grid`".into()))?
        .points()?;
    let d = phase_diagram(&c.disorder()?, &c.lattice()?, &betas, &scan.mu_grid.points()?)?;
    sink.put(Format::Csv, "phase_diagram.csv", || Ok(phase_csv(&d)))?;
    sink.put(Format::Json, "phase_diagram.json", || to_json(&PhaseCurves::from(&d)))?;
    sink.put(Format::Svg, "phase_diagram.svg", || Ok(phase_svg(&d)))?;
    let rsb = d.grid.iter().filter(|p| !p.is_rs).count();
    Ok((format!("{} points, {rsb} RSB, {} AT-line points, {} Larkin roots", d.grid.len(), d.at_line.len(), d.larkin_curve.len()), 0))
}

fn simulate(c: &RunConfig, seed: Option<u64>, sink: &mut Sink) -> Result<(String, i32)> {
    let p = c.euclidean()?;
    let mut opts = c.sim.clone().ok_or_else(|| Error::Config("missing field `sim`".into()))?;
    if let Some(s) = seed {
        opts.seed = s;
    }
    let out = run_chains(&p, &opts)?;
    let summary = summarize(&out, SUMMARY_BATCHES);
    let is_rs = rs_criterion(&p)?.is_rs;
    let theory = if is_rs {
        let (radius_sq, overlap) = observables(&solve_rs(&p)?, &p)?;
        Theory { is_rs, radius_sq: Some(radius_sq), overlap: Some(overlap.q_star()) }
    } else {
        Theory { is_rs, radius_sq: None, overlap: None }
    };
    let report = SimReport { summary, theory, step_sizes: out.step_sizes.clone(), swap_rate: out.swap_rate, seed: opts.seed };
    sink.put(Format::Csv, "simulate_streams.csv", || Ok(stream_csv(&out.records)))?;
    sink.put(Format::Json, "simulate_summary.json", || to_json(&report))?;
    Ok((serde_json::to_string(&report.summary)?, 0))
}

fn check(sink: &mut Sink) -> Result<(String, i32)> {
    let report: CheckReport = run_all();
    sink.put(Format::Json, "check.json", || to_json(&report))?;
    let lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {} error={:.3e} tolerance={:.1e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.error, c.tolerance))
        .collect();
    Ok((lines.join("\n"), if report.all_passed() { 0 } else { 3 }))
}

/// Parses `args`, runs the command and reports on stdout/stderr; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.message);
            for path in &outcome.written {
                eprintln!("wrote {}", display(path));
            }
            if outcome.exit_code == 2 {
                eprintln!("error: the solver did not reach its tolerances");
            }
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
