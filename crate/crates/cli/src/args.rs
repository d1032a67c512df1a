use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rdl", version, about = "Brownian motion, asymptotic invariants and Gromov distances on model manifolds")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "RDL_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trajectories and write them as CSV.
    Simulate(SimulateArgs),
    /// Estimate ℓ, h, v, k and check the inequality chains.
    Report(ReportArgs),
    /// Gromov distance between two finite pointed metric spaces.
    Gromov(GromovArgs),
    /// Tabulate the heat kernel q(t, o, ·) against distance.
    Kernel(KernelArgs),
    /// Solve the radial Fokker–Planck equation on a grid.
    FokkerPlanck(FokkerPlanckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimSpace {
    /// Upper half-plane chart.
    Halfplane,
    /// Rotationally symmetric surface given by `--profile`.
    Rotsym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Euclid,
    Hyperbolic,
    Kaimanovich,
}

impl ProfileName {
    pub fn label(self) -> &'static str {
        match self {
            Self::Euclid => "euclid",
            Self::Hyperbolic => "hyperbolic",
            Self::Kaimanovich => "kaimanovich",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Defaults to `rotsym` when `--profile` is given, else `halfplane`.
    #[arg(long, value_enum)]
    pub space: Option<SimSpace>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileName>,
    /// Curvature scale of the hyperbolic profile.
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Starting radius of radial paths.
    #[arg(long, default_value_t = 1.0)]
    pub r0: f64,
    /// Record every n-th step; default keeps about 1000 rows per path.
    #[arg(long)]
    pub stride: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceName {
    Euclidean,
    Hyperbolic,
    H2,
    H3,
    Halfplane,
    Kaimanovich,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpaceArgs {
    #[arg(long, value_enum)]
    pub space: Option<SpaceName>,
    /// Dimension of `euclidean` and `hyperbolic`.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Curvature scale k (curvature −k²).
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    /// JSON mixture `{"components": [{"weight": w, "space": {...} | "drift": ℓ}]}`.
    #[arg(long, conflicts_with = "space")]
    pub ensemble_file: Option<PathBuf>,
    /// Comma-separated times; default {40,…,80}/k².
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// JSON destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GromovArgs {
    /// JSON `{"n": k, "basepoint": 0, "dist": [[...]]}`.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Write the cross matrix at the upper endpoint to this file.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// JSON destination for the bracket.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KernelArgs {
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FokkerPlanckArgs {
    #[arg(long, value_enum, default_value = "hyperbolic")]
    pub profile: ProfileName,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub r0: f64,
    #[arg(long, default_value_t = 4e-5)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dr: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 12.0)]
    pub r_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
