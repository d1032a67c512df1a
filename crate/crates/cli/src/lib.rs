//! Command-line front end: runs experiments and writes CSV/JSON artifacts
//! with a reproducibility manifest next to each output file.

pub mod args;
pub mod manifest;

use args::*;
use manifest::{manifest_path, RunManifest};
use rdl_core::estimators::{inequality_report, Ensemble, ReportTarget};
use rdl_core::heat_kernels::{radial_fokker_planck, KernelEval};
use rdl_core::sde::{simulate_halfplane, simulate_radial, SimConfig};
use rdl_core::{Manifold, Profile};
use rdl_gromov::{gromov_bracket, GromovError, PointedSpace, MIN_TOL};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// Inequality or equality check failed.
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io { .. } => EXIT_USAGE,
            Self::NotConverged(_) => EXIT_NOT_CONVERGED,
            Self::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<rdl_core::Error> for CliError {
    fn from(e: rdl_core::Error) -> Self {
        use rdl_core::Error as E;
        match e {
            E::InvalidPoint(_) | E::InvalidArgument(_) | E::NoKernel(_) | E::UnknownProfile(_) | E::Cfl { .. } => {
                Self::Usage(e.to_string())
            }
            E::Quadrature { .. } | E::NotNormalized { .. } | E::NonFinite(_) | E::NotConverged(_) => {
                Self::NotConverged(e.to_string())
            }
            E::Invariant(_) => Self::Internal(e.to_string()),
        }
    }
}

impl From<GromovError> for CliError {
    fn from(e: GromovError) -> Self {
        match e {
            GromovError::Core(c) => c.into(),
            other => Self::Usage(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Runs one command inside a pool of `--threads` workers; returns the exit code.
pub fn run(cli: Cli) -> Result<i32> {
    let threads = cli.threads;
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(|| dispatch(cli.command, threads)),
        None => dispatch(cli.command, threads),
    }
}

fn dispatch(command: Command, threads: Option<usize>) -> Result<i32> {
    let started = Instant::now();
    let (name, config, seed) = match &command {
        Command::Simulate(a) => ("simulate", to_value(a), Some(a.seed)),
        Command::Report(a) => ("report", to_value(a), None),
        Command::Gromov(a) => ("gromov", to_value(a), None),
        Command::Kernel(a) => ("kernel", to_value(a), None),
        Command::FokkerPlanck(a) => ("fokker-planck", to_value(a), None),
    };
    let mut manifest = RunManifest::new(name, config, seed, threads);
    let (code, primary) = match command {
        Command::Simulate(a) => cmd_simulate(&a, &mut manifest)?,
        Command::Report(a) => cmd_report(&a, &mut manifest)?,
        Command::Gromov(a) => cmd_gromov(&a, &mut manifest)?,
        Command::Kernel(a) => cmd_kernel(&a, &mut manifest)?,
        Command::FokkerPlanck(a) => cmd_fokker_planck(&a, &mut manifest)?,
    };
    if let Some(out) = primary {
        manifest.wall_time_s = started.elapsed().as_secs_f64();
        write_file(&manifest_path(&out), manifest.to_json().as_bytes())?;
    }
    Ok(code)
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("arguments serialize")
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes to `out` and records it, or prints to stdout.
fn emit(out: Option<&Path>, body: &str, manifest: &mut RunManifest) -> Result<()> {
    match out {
        Some(p) => {
            write_file(p, body.as_bytes())?;
            manifest.record(p, body.as_bytes());
        }
        None => print!("{body}"),
    }
    Ok(())
}

type Outcome = (i32, Option<std::path::PathBuf>);

/// 17 significant digits.
fn f(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_simulate(a: &SimulateArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let space = match (a.space, a.profile) {
        (Some(SimSpace::Halfplane), Some(_)) => {
            return Err(CliError::Usage("--profile applies to --space rotsym only".into()))
        }
        (Some(SimSpace::Rotsym), None) => return Err(CliError::Usage("--space rotsym needs --profile".into())),
        (None, Some(_)) => SimSpace::Rotsym,
        (s, _) => s.unwrap_or(SimSpace::Halfplane),
    };
    let mut cfg = SimConfig { seed: a.seed, n_paths: a.paths, dt: a.dt, t_max: a.t_max, ..Default::default() };
    let steps = cfg.steps()?;
    cfg.record_stride = match a.stride {
        Some(s) => s,
        None => (steps / 1000).max(1),
    };
    cfg.validate()?;

    let mut csv = String::new();
    match space {
        SimSpace::Halfplane => {
            let hp = Manifold::HalfPlane;
            let o = hp.basepoint();
            csv.push_str("path,t,x,y,d\n");
            for (i, p) in simulate_halfplane(&cfg, (0.0, 1.0))?.iter().enumerate() {
                for ((t, x), y) in p.times.iter().zip(&p.x).zip(&p.y) {
                    let d = hp.distance(&o, &[*x, *y])?.value;
                    let _ = writeln!(csv, "{i},{},{},{},{}", f(*t), f(*x), f(*y), f(d));
                }
            }
        }
        SimSpace::Rotsym => {
            let name = a.profile.expect("resolved above");
            let profile = Profile::builtin(name.label(), Some(a.kappa))?;
            csv.push_str("path,t,r,h_minus_t,tau,theta\n");
            for (i, p) in simulate_radial(&profile, &cfg, a.r0)?.iter().enumerate() {
                for j in 0..p.times.len() {
                    let _ = writeln!(
                        csv,
                        "{i},{},{},{},{},{}",
                        f(p.times[j]),
                        f(p.r[j]),
                        f(p.h_minus_t[j]),
                        f(p.tau[j]),
                        f(p.theta[j])
                    );
                }
            }
        }
    }
    emit(a.out.as_deref(), &csv, manifest)?;
    Ok((EXIT_OK, a.out.clone()))
}

fn space_of(s: &SpaceArgs) -> Result<Option<Manifold>> {
    let k = s.kappa;
    Ok(Some(match s.space {
        None => return Ok(None),
        Some(SpaceName::Euclidean) => Manifold::euclidean(s.dim)?,
        Some(SpaceName::Hyperbolic) => Manifold::hyperbolic(s.dim, k)?,
        Some(SpaceName::H2) => Manifold::hyperbolic(2, k)?,
        Some(SpaceName::H3) => Manifold::hyperbolic(3, k)?,
        Some(SpaceName::Halfplane) => Manifold::HalfPlane,
        Some(SpaceName::Kaimanovich) => Manifold::RotSym(Profile::kaimanovich()),
    }))
}

fn cmd_report(a: &ReportArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let target = match (space_of(&a.space)?, &a.ensemble_file) {
        (Some(space), None) => ReportTarget::Space(space),
        (None, Some(path)) => ReportTarget::Ensemble(Ensemble::from_json(&read_file(path)?)?),
        (Some(_), Some(_)) => return Err(CliError::Usage("give either --space or --ensemble-file".into())),
        (None, None) => return Err(CliError::Usage("report needs --space or --ensemble-file".into())),
    };
    let report = inequality_report(&target, a.t_grid.as_deref(), a.r_max)?;
    let json = report.to_json() + "\n";
    match &a.out {
        Some(p) => {
            emit(Some(p), &json, manifest)?;
            print!("{}", report.to_table());
        }
        None => {
            eprint!("{}", report.to_table());
            print!("{json}");
        }
    }
    let code = if !report.all_converged() {
        for d in &report.diagnostics {
            eprintln!("diagnostic: {d}");
        }
        eprintln!("estimator did not converge on the given t-grid");
        EXIT_NOT_CONVERGED
    } else if !report.passes() {
        eprintln!("one or more checks failed");
        EXIT_FAILED
    } else {
        EXIT_OK
    };
    Ok((code, a.out.clone()))
}

#[derive(Serialize)]
struct GromovResult {
    schema: &'static str,
    lo: f64,
    hi: f64,
    distance: f64,
    tol: f64,
    n_a: usize,
    n_b: usize,
}

fn load_space(path: &Path) -> Result<PointedSpace> {
    PointedSpace::from_json(&read_file(path)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cmd_gromov(a: &GromovArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    if !(a.tol >= MIN_TOL) {
        return Err(CliError::Usage(format!("--tol must be at least {MIN_TOL}")));
    }
    let (sa, sb) = (load_space(&a.a)?, load_space(&a.b)?);
    let (bracket, witness) = gromov_bracket(&sa, &sb, a.tol);
    let result = GromovResult {
        schema: "v1",
        lo: bracket.lo,
        hi: bracket.hi,
        distance: bracket.distance(),
        tol: a.tol,
        n_a: sa.len(),
        n_b: sb.len(),
    };
    let json = serde_json::to_string_pretty(&result).expect("result serializes") + "\n";
    eprintln!("d_GS in [{}, {}]", f(bracket.lo), f(bracket.hi));
    emit(a.out.as_deref(), &json, manifest)?;
    if let Some(path) = &a.witness {
        match witness {
            Some(c) => {
                c.validate(&sa, &sb).map_err(|e| CliError::Internal(format!("witness: {e}")))?;
                let body = c.to_json() + "\n";
                write_file(path, body.as_bytes())?;
                manifest.record(path, body.as_bytes());
            }
            None => eprintln!("no admissible extension below 1/2; witness not written"),
        }
    }
    Ok((EXIT_OK, a.out.clone()))
}

fn cmd_kernel(a: &KernelArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let space = space_of(&a.space)?.ok_or_else(|| CliError::Usage("kernel needs --space".into()))?;
    if a.samples < 2 || !(a.r_max > 0.0) {
        return Err(CliError::Usage("need --samples >= 2 and --r-max > 0".into()));
    }
    let kernel = KernelEval::new(&space)?;
    let mut csv = String::from("r,q\n");
    for i in 0..a.samples {
        let r = a.r_max * i as f64 / (a.samples - 1) as f64;
        let _ = writeln!(csv, "{},{}", f(r), f(kernel.q(a.t, r)?));
    }
    emit(a.out.as_deref(), &csv, manifest)?;
    Ok((EXIT_OK, a.out.clone()))
}

fn cmd_fokker_planck(a: &FokkerPlanckArgs, manifest: &mut RunManifest) -> Result<Outcome> {
    let profile = Profile::builtin(a.profile.label(), Some(a.kappa))?;
    let grid = radial_fokker_planck(&profile, a.r0, a.dt, a.dr, a.t_max, a.r_max)?;
    emit(a.out.as_deref(), &grid.to_csv(), manifest)?;
    Ok((EXIT_OK, a.out.clone()))
}
