//! Large-time expansions: approximants, errors, decay fits and the rate
//! experiments.

pub mod expansion;
pub mod experiment;
pub mod lambda;

pub use expansion::{
    approximant_from_moments, build_approximant, expansion_error, expansion_grid, heisenberg_expansion_error,
    identity_table, solve, source_grid, ErrorSample, ExpansionKind, ExpansionRule, FirstOrderFields, GridSettings,
};
pub use experiment::{run_theorem, Datum, Dimensions, Experiment, ExperimentReport, ExperimentSetup, TimeRecord};
pub use lambda::{lambda_lower_bound, lambda_set, LambdaSet};
pub use crate::numeric::{decay_fit, DecayFit};
