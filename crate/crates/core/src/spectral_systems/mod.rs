//! Orthonormal systems under the free flow: densities, mixed norms, Schatten
//! norms and the estimates linking them.

mod norms;
mod ratio;
mod schatten;
mod system;

pub use norms::{
    lalpha_norm, mixed_norm, schatten_norm, schatten_norm_matrix, singular_values, DensityField, MixedNormSpec,
    SchattenIndex,
};
pub use ratio::{critical_alpha, density_line, optimality_experiment, strichartz_ratio, OptimalityResult, StrichartzRatio};
pub use schatten::{
    dense_operator, duality_crosscheck, operator_singular_values, schatten_bound_check, schatten_vanishing,
    DualityCase, DualityReport, DualitySource, SchattenCheck, SchattenExponents, SpaceTimeField, VanishingTable,
    DENSE_LIMIT,
};
pub use system::{density, density_field, propagate, random_orthonormal_columns, OrthonormalSystem, Snapshots};
