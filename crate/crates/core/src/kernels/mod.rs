//! Fundamental solutions of the isotropic, mixed-order and Heisenberg heat
//! equations, and their derivatives.

pub mod heisenberg;
pub mod spectral;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::numeric::DimensionSplit;

pub use heisenberg::{
    heisenberg_kernel, heisenberg_kernel_derivative, heisenberg_kernel_t, heisenberg_on_grid, GroupKernel, HField,
    HKernel, KernelTable, SigmaQuadrature, TableSpec,
};
pub use spectral::{
    derivative_decay_check, fft_solve, gaussian_kernel, kernel_derivative, kernel_grid, mixed_kernel,
};

/// Which heat flow a kernel belongs to.
///
/// The mixed-order flow is `u_t = −Δ²_x u + Δ_y u` on `ℝᵐ × ℝⁿ`, whose
/// kernel has Fourier symbol `e^{−t(|ξ|⁴ + |η|²)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelSpec {
    Isotropic { dim: usize },
    MixedOrder { m: usize, n: usize },
    Heisenberg { n: usize },
}

impl KernelSpec {
    pub fn mixed(split: DimensionSplit) -> Self {
        KernelSpec::MixedOrder { m: split.m(), n: split.n() }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Isotropic { dim } if dim == 0 => arg_err("isotropic kernel needs dim ≥ 1"),
            KernelSpec::MixedOrder { m, n } if m == 0 || n == 0 => arg_err("mixed-order kernel needs m, n ≥ 1"),
            KernelSpec::Heisenberg { n } if n == 0 => arg_err("heisenberg kernel needs n ≥ 1"),
            _ => Ok(()),
        }
    }

    /// Number of real coordinates.
    pub fn dims(&self) -> usize {
        match *self {
            KernelSpec::Isotropic { dim } => dim,
            KernelSpec::MixedOrder { m, n } => m + n,
            KernelSpec::Heisenberg { n } => 2 * n + 1,
        }
    }

    pub fn split(&self) -> Option<DimensionSplit> {
        match *self {
            KernelSpec::MixedOrder { m, n } => DimensionSplit::new(m, n).ok(),
            _ => None,
        }
    }

    /// Per-axis exponents `aᵢ` with `K_t(z) = t^{−Σaᵢ} K_1(z_i / t^{aᵢ})`.
    pub fn scaling_exponents(&self) -> Vec<f64> {
        match *self {
            KernelSpec::Isotropic { dim } => vec![0.5; dim],
            KernelSpec::MixedOrder { m, n } => {
                let mut v = vec![0.25; m];
                v.extend(std::iter::repeat(0.5).take(n));
                v
            }
            KernelSpec::Heisenberg { n } => {
                let mut v = vec![0.5; 2 * n];
                v.push(1.0);
                v
            }
        }
    }

    /// Exponent of the `t^{−e}` prefactor.
    pub fn prefactor_exponent(&self) -> f64 {
        self.scaling_exponents().iter().sum()
    }
}
