//! Gromov distance `d_GS` between finite pointed metric spaces, and the
//! Cauchy-chain gluing that builds limits of `d_GS`-Cauchy sequences.

pub mod chain;
pub mod error;
pub mod feasibility;
pub mod grid;
pub mod lp;
pub mod net;
pub mod space;

pub use chain::{chain_glue, GluedChain};
pub use error::{GromovError, Result};
pub use feasibility::{feasible, gromov_bracket, gromov_distance, Feasibility, GromovBracket, MIN_TOL, STRICT_DELTA};
pub use net::net_from_manifold;
pub use space::{AdmissibleExtension, FinitePointedSpace};

pub type PointedSpace = space::FinitePointedSpace<f64>;
pub type Extension = space::AdmissibleExtension<f64>;
pub type Chain = chain::GluedChain<f64>;
