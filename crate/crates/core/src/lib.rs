//! Numerical checks for oscillatory integrals, dispersive propagators and
//! Strichartz-type estimates for orthonormal systems.

pub mod dispersive_kernels;
pub mod error;
pub mod grid;
pub mod par;
pub mod quadrature;
pub mod randomization;
pub mod special_integrals;
pub mod spectral_systems;
pub mod stats;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
