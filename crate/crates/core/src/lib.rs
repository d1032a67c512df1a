//! Brownian motion on model Riemannian manifolds.
//!
//! Heat kernels use the generator Δ/2 throughout: `q(t,x,y) = p(t/2,x,y)`
//! where `p` is the fundamental solution of `∂_t u = Δu`.

pub mod busemann;
pub mod error;
pub mod estimators;
pub mod fit;
pub mod heat_kernels;
pub mod model_spaces;
pub mod quadrature;
pub mod scalar;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Manifold = model_spaces::ModelManifold<f64>;
pub type Profile = model_spaces::ProfileFunction<f64>;
pub type Kernel = heat_kernels::KernelEval<f64>;
pub type DensityGrid = heat_kernels::RadialDensityGrid<f64>;
pub type HalfPlanePath = sde::HalfPlanePath;
