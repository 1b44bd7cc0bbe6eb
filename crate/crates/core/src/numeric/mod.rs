//! Grids, multi-indices, quadrature and norms.

pub mod fft;
pub mod fit;
pub mod grid;
pub mod interp;
pub mod multi_index;
pub mod norms;
pub mod quadrature;

pub use fit::{decay_fit, DecayFit};
pub use grid::{DimensionSplit, Grid, GridFunction};
pub use multi_index::MultiIndex;
pub use norms::{mixed_norm, quad_integral, weighted_lp_norm, xp_norm, WeightSpec};
pub use quadrature::{BoxRule, GaussLegendre, PolarRule};
