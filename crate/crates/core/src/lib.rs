//! Topological measures on a raster of the plane and the quasi-linear
//! functionals they induce.

pub mod error;
pub mod field;
pub mod frame;
pub mod harness;
pub mod measure;
pub mod pwl;
pub mod quasi;
pub mod reconstruct;
pub mod region;
mod topology;

pub use error::{Error, Result};
pub use field::ScalarField;
pub use frame::Frame;
pub use measure::{count_points, tm_eval, Atom, DensityProfile, Mass, TopologicalMeasure};
pub use pwl::PiecewiseLinearMap;
pub use region::{Region, RegionRle, Role};
pub use topology::Connectivity;
pub use quasi::{
    distribution_function, extension_consistency, linear_oracle, quasi_integral, superlevel_region, DistributionFn,
    DistributionOptions, QuasiIntegralResult, QuasiIntegrator, Quadrature, Variant,
};
pub use reconstruct::{mu_rho, mu_rho_compact, mu_rho_open, roundtrip, BumpSchedule, ReconstructionReport};
