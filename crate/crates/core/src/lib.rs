//! Moment expansions of anisotropic and Heisenberg heat flows, with the
//! numerical machinery needed to check their decay rates.

pub mod asymptotics;
pub mod error;
pub mod field;
pub mod heisenberg;
pub mod kernels;
pub mod moments;
pub mod numeric;
pub mod suites;

pub use error::{Error, Result};
pub use field::{FnField, GridSampled, PolyGaussian, ScalarField};
pub use kernels::KernelSpec;
pub use numeric::{DecayFit, DimensionSplit, Grid, GridFunction, MultiIndex, WeightSpec};
