//! Group algebra, Taylor identity, decomposition and convolution on `ℍⁿ`.

pub mod convolution;
pub mod decomposition;
pub mod group;

pub use convolution::{h_convolve, h_solution_grid, HGridFunction};
pub use decomposition::{
    h_decomposition_check, h_decomposition_terms, h_remainder_f, h_remainder_fjk, h_remainder_fjk_scaled_theta,
    h_taylor_check, HDecompositionTerms,
};
pub use group::{
    apply_field, h_compose, h_dilate, h_exp, h_exp_log_check, h_field_apply, h_inverse, h_log, symplectic, HPoint,
};
