//! `ere4`: central configurations, reduction reports and Floquet stability
//! of four-body elliptic relative equilibria.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 collinear
//! configuration, 5 integrator failure.

mod input;
mod numfmt;
mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ere4::centralconfig::{solve_cc, SolverOptions};
use ere4::floquet::IntegratorOptions;
use ere4::linsys::OrbitParams;
use ere4::ode::OdeOptions;
use ere4::orbit::{energy_drift, ere_state, homographic_deviation, integrate_nbody, kepler_period, write_trajectory_csv};
use ere4::pipeline::Reduction;
use rayon::prelude::*;

use input::{check_eccentricity, from_family, parse_family, ConfigInput, Problem, ScanSpec};
use numfmt::{sci, to_json};
use report::{BetaReport, CcReport, MonodromyOutput, ReduceOutput, SolveCcOutput, StabilityOutput};

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Io(String),
    Core(ere4::Error),
}

impl From<ere4::Error> for CliError {
    fn from(e: ere4::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use ere4::Error::*;
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                InvalidMass { .. } | DegenerateGeometry { .. } | InvalidConfiguration(_) | InvalidParameter(_) => 2,
                NoConvergence { .. } | SingularJacobian { .. } | FGIdentityViolation { .. } => 3,
                CollinearDegeneracy => 4,
                Collision { .. } | CollisionDetected { .. } | StepUnderflow { .. } => 5,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "ere4", version, about = "Stability of four-body elliptic relative equilibria")]
struct Cli {
    /// Worker threads for `scan` (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for a central configuration.
    SolveCc(Source),
    /// Solve, build the reduction basis and report β coefficients and audits.
    Reduce(Source),
    /// Monodromy of the essential system at one eccentricity.
    Stability {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orbit: OrbitArgs,
        /// Integrator relative tolerance.
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        /// Integrator absolute tolerance.
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
    },
    /// Stability over a grid of mass parameters and eccentricities (CSV).
    Scan {
        /// Scan spec (JSON).
        #[arg(long)]
        input: PathBuf,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the nonlinear four-body problem from the homographic
    /// solution and write the trajectory (CSV).
    Orbit {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        orbit: OrbitArgs,
        /// Integration span in orbital periods.
        #[arg(long, default_value_t = 1.0)]
        periods: f64,
        /// Number of equal time intervals written to the CSV.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
}

#[derive(Args)]
struct Source {
    /// Configuration file (JSON); required with `--family custom`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// square | collinear | triangle_plus_center | rhombus | custom
    #[arg(long, default_value = "custom")]
    family: String,
    /// Parameter of the family's mass vector.
    #[arg(long, default_value_t = 1.0)]
    mass_param: f64,
    /// Central-configuration residual tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrbitArgs {
    /// Eccentricity, in [0, 0.99].
    #[arg(long, default_value_t = 0.0)]
    e: f64,
    /// Semi-latus rectum.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

impl Source {
    fn problem(&self) -> Result<Problem, CliError> {
        match (self.family.as_str(), &self.input) {
            ("custom", Some(path)) => ConfigInput::parse(&input::read(path)?)?.problem(),
            ("custom", None) => Err(CliError::Schema("--input is required unless --family names a family".into())),
            (name, None) => from_family(parse_family(name)?, self.mass_param),
            (_, Some(_)) => Err(CliError::Schema("--input and --family are mutually exclusive".into())),
        }
    }

    fn solver(&self) -> Result<SolverOptions, CliError> {
        if !(self.tol >= 0.0) {
            return Err(CliError::Schema(format!("tolerance must be nonnegative, got {}", self.tol)));
        }
        Ok(SolverOptions { tol: self.tol, ..Default::default() })
    }

    fn reduction(&self) -> Result<Reduction, CliError> {
        let problem = self.problem()?;
        let cc = solve_cc(&problem.masses, &problem.seed, &self.solver()?)?;
        Ok(Reduction::from_central(cc)?)
    }
}

impl OrbitArgs {
    fn params(&self) -> Result<OrbitParams, CliError> {
        check_eccentricity(self.e)?;
        Ok(OrbitParams::new(self.e, self.p)?)
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    to_json(value).map_err(|e| CliError::Io(e.to_string()))
}

fn stability_output(r: &Reduction, params: OrbitParams, opts: &IntegratorOptions) -> Result<StabilityOutput, CliError> {
    let rep = r.stability(params, opts)?;
    Ok(StabilityOutput {
        schema_version: input::SCHEMA_VERSION,
        e: params.e,
        p: params.p,
        betas: BetaReport::new(&r.betas),
        essential: MonodromyOutput::new(&rep.essential),
        decoupled: rep.decoupled.map(|[a, b]| [MonodromyOutput::new(&a), MonodromyOutput::new(&b)]),
    })
}

const SCAN_MODULI: usize = 8;

fn scan_header() -> String {
    let mut cols: Vec<String> = ["family", "mass_param", "e", "p", "beta2", "abs_beta11", "abs_beta12", "abs_beta22", "stability", "symplectic_defect", "det"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((1..=SCAN_MODULI).map(|k| format!("modulus_{k}")));
    cols.push("error".into());
    cols.join(",")
}

fn scan_row(family: &str, t: f64, e: f64, p: f64, result: Result<(Reduction, StabilityOutput), String>) -> String {
    let mut cols = vec![family.to_string(), sci(t), sci(e), sci(p)];
    match result {
        Ok((r, s)) => {
            let b = &r.betas;
            cols.extend([sci(b.beta2), sci(b.beta11.norm()), sci(b.beta12.norm()), sci(b.beta22.norm())]);
            cols.push(s.essential.stability.to_string());
            cols.push(sci(s.essential.symplectic_defect));
            cols.push(sci(s.essential.det));
            cols.extend(s.essential.eigenvalue_moduli.iter().map(|v| sci(*v)));
            cols.push(String::new());
        }
        Err(msg) => {
            cols.extend(std::iter::repeat_n(String::new(), 7 + SCAN_MODULI));
            // keep the CSV single-line and comma-free
            cols.push(msg.replace([',', '\n'], ";"));
        }
    }
    cols.join(",")
}

fn run_scan(spec: &ScanSpec) -> Result<String, CliError> {
    let family = parse_family(&spec.family)?;
    let solver = SolverOptions { tol: spec.tol.unwrap_or(1e-12), ..Default::default() };
    let defaults = IntegratorOptions::default();
    let opts = IntegratorOptions { rtol: spec.rtol.unwrap_or(defaults.rtol), atol: spec.atol.unwrap_or(defaults.atol), ..defaults };
    let reductions: Vec<Result<Reduction, String>> = spec
        .mass_params
        .par_iter()
        .map(|&t| {
            let problem = from_family(family, t).map_err(|e| e.to_string())?;
            let cc = solve_cc(&problem.masses, &problem.seed, &solver).map_err(|e| e.to_string())?;
            Reduction::from_central(cc).map_err(|e| e.to_string())
        })
        .collect();
    let points: Vec<(usize, f64)> = (0..spec.mass_params.len()).flat_map(|i| spec.e_grid.iter().map(move |&e| (i, e))).collect();
    let rows: Vec<String> = points
        .par_iter()
        .map(|&(i, e)| {
            let result = reductions[i].clone().and_then(|r| {
                let params = OrbitParams::new(e, spec.p).map_err(|e| e.to_string())?;
                let s = stability_output(&r, params, &opts).map_err(|e| e.to_string())?;
                Ok((r, s))
            });
            scan_row(family.name(), spec.mass_params[i], e, spec.p, result)
        })
        .collect();
    let mut text = scan_header();
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    Ok(text)
}

fn run_orbit(source: &Source, orbit: &OrbitArgs, periods: f64, samples: usize) -> Result<(), CliError> {
    if !(periods > 0.0) || samples == 0 {
        return Err(CliError::Schema("--periods must be positive and --samples nonzero".into()));
    }
    let params = orbit.params()?;
    let problem = source.problem()?;
    let cc = solve_cc(&problem.masses, &problem.seed, &source.solver()?)?;
    let horizon = periods * kepler_period(cc.mu, &params);
    let times: Vec<f64> = (0..=samples).map(|k| horizon * k as f64 / samples as f64).collect();
    let state0 = ere_state(0.0, &cc, &params);
    let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
    let traj = integrate_nbody(&state0, cc.masses().as_array(), &times, &opts)?;
    eprintln!(
        "max homographic deviation {}, relative energy drift {}",
        sci(homographic_deviation(&traj, &cc, &params)),
        sci(energy_drift(&traj))
    );
    let io_err = |e: io::Error| CliError::Io(e.to_string());
    match &source.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_trajectory_csv(BufWriter::new(file), &traj).map_err(io_err)
        }
        None => write_trajectory_csv(io::stdout().lock(), &traj).map_err(io_err),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Schema("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))?;
    }
    match cli.command {
        Command::SolveCc(source) => {
            let problem = source.problem()?;
            let cc = solve_cc(&problem.masses, &problem.seed, &source.solver()?)?;
            emit(&source.out, &json(&SolveCcOutput { schema_version: input::SCHEMA_VERSION, cc: CcReport::new(&cc) })?)
        }
        Command::Reduce(source) => {
            let r = source.reduction()?;
            emit(&source.out, &json(&ReduceOutput::new(&r))?)
        }
        Command::Stability { source, orbit, rtol, atol } => {
            let params = orbit.params()?;
            let r = source.reduction()?;
            let opts = IntegratorOptions { rtol, atol, ..Default::default() };
            emit(&source.out, &json(&stability_output(&r, params, &opts)?)?)
        }
        Command::Scan { input: path, out } => {
            let spec = ScanSpec::parse(&input::read(&path)?)?;
            emit(&out, &run_scan(&spec)?)
        }
        Command::Orbit { source, orbit, periods, samples } => run_orbit(&source, &orbit, periods, samples),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
