//! Moments, the explicit remainders of Taylor-type decompositions into
//! derivatives of the Dirac mass, and checks of those decompositions.

pub mod decomposition;
pub mod remainder;
pub mod taylor;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::field::{FnField, ScalarField};
use crate::numeric::{BoxRule, DimensionSplit, GridFunction, MultiIndex};

pub use decomposition::{decomposition_terms, pairing, verify_decomposition, DecompositionTerms};
pub use remainder::{
    field_mixed_norm, field_weighted_norm, remainder_f_alpha, remainder_f_gamma, remainder_norm,
    remainder_r_betagamma, split_remainder_norm,
};
pub use taylor::{taylor_check, taylor_split_check};

pub type SharedField = Arc<dyn ScalarField>;

/// Which decomposition of `f` into `D^α δ₀` terms plus remainders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionRule {
    /// Taylor of order `k` in all variables, remainders `D^α F_α` with
    /// `|α| = k+1`.
    Full,
    /// Taylor in `y` first, then in `x` for each y-moment; main terms
    /// `|β|+|γ| ≤ k`.
    Split,
    /// As `Split`, but one y-derivative counts as two x-derivatives: main
    /// terms `|β|+2|γ| ≤ k` for odd `k`.
    Anisotropic,
}

impl DecompositionRule {
    /// Checks `k` and the presence of a split.
    pub fn validate(&self, split: Option<DimensionSplit>, k: u32) -> Result<()> {
        match self {
            DecompositionRule::Full => Ok(()),
            DecompositionRule::Split if split.is_none() => arg_err("the split decomposition needs an (m, n) split"),
            DecompositionRule::Anisotropic if split.is_none() => {
                arg_err("the anisotropic decomposition needs an (m, n) split")
            }
            DecompositionRule::Anisotropic if k % 2 == 0 => arg_err(format!("k must be odd, got {k}")),
            _ => Ok(()),
        }
    }

    /// Indices of the moment terms, as full `(β, γ)` concatenations.
    pub fn main_indices(&self, dims: usize, split: Option<DimensionSplit>, k: u32) -> Vec<MultiIndex> {
        let all = MultiIndex::up_to(dims, k);
        match (self, split) {
            (DecompositionRule::Anisotropic, Some(s)) => all
                .into_iter()
                .filter(|a| {
                    let (b, g) = a.split_at(s.m());
                    b.order() + 2 * g.order() <= k
                })
                .collect(),
            _ => all,
        }
    }

    /// `(γ, |β|)` for every x-remainder `[ℛf]_{βγ}`.
    pub fn x_remainder_groups(&self, split: DimensionSplit, k: u32) -> Vec<(MultiIndex, u32)> {
        match self {
            DecompositionRule::Full => Vec::new(),
            DecompositionRule::Split => {
                MultiIndex::up_to(split.n(), k).into_iter().map(|g| {
                    let o = k + 1 - g.order();
                    (g, o)
                }).collect()
            }
            DecompositionRule::Anisotropic => MultiIndex::up_to(split.n(), (k - 1) / 2)
                .into_iter()
                .map(|g| {
                    let o = k + 1 - 2 * g.order();
                    (g, o)
                })
                .collect(),
        }
    }

    /// Taylor order `k'` of the y-remainder, whose indices have
    /// `|γ| = k' + 1`.
    pub fn y_remainder_order(&self, k: u32) -> Option<u32> {
        match self {
            DecompositionRule::Full => None,
            DecompositionRule::Split => Some(k),
            DecompositionRule::Anisotropic => Some((k - 1) / 2),
        }
    }
}

/// Resolution of the quadratures used by this module.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    /// Gauss–Legendre nodes per axis of a box rule in one or two dimensions.
    pub box_nodes: usize,
    /// Radial nodes of polar rules.
    pub radial: usize,
    /// Angular resolution of polar rules.
    pub angular: usize,
    /// Nodes of the one-dimensional scaling integrals.
    pub line: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings { box_nodes: 64, radial: 64, angular: 48, line: 64 }
    }
}

impl QuadSettings {
    /// A cheaper rule for randomized suites.
    pub fn coarse() -> Self {
        QuadSettings { box_nodes: 48, radial: 48, angular: 32, line: 48 }
    }

    pub(crate) fn box_nodes_for(&self, dim: usize) -> usize {
        match dim {
            0..=3 => self.box_nodes,
            _ => self.box_nodes.min(20),
        }
    }

    pub(crate) fn box_rule(&self, dim: usize, radius: f64) -> Result<BoxRule> {
        BoxRule::new(dim, radius, self.box_nodes_for(dim))
    }
}

pub(crate) fn finite_radius(f: &dyn ScalarField) -> Result<f64> {
    let r = f.radius();
    if !r.is_finite() {
        return arg_err("the function has no declared decay radius, so its moments may diverge");
    }
    Ok(r.max(1e-3))
}

/// `∫ f(z) z^α dz`.
pub fn moment(f: &dyn ScalarField, alpha: &MultiIndex, settings: &QuadSettings) -> Result<f64> {
    let table = MomentTable::compute(f, std::slice::from_ref(alpha), settings)?;
    Ok(table.entries[alpha])
}

/// Moments `∫ f z^α` over a set of indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    entries: BTreeMap<MultiIndex, f64>,
}

impl MomentTable {
    /// Quadrature over the box of radius `f.radius()`; one evaluation of
    /// `f` per node serves every index.
    pub fn compute(f: &dyn ScalarField, indices: &[MultiIndex], settings: &QuadSettings) -> Result<Self> {
        let dim = f.dim();
        check_indices(dim, indices)?;
        let rule = settings.box_rule(dim, finite_radius(f)?)?;
        let mut sums = vec![0.0; indices.len()];
        for (z, w) in rule.iter() {
            let v = f.eval(z) * w;
            if v == 0.0 {
                continue;
            }
            for (s, a) in sums.iter_mut().zip(indices) {
                *s += v * a.monomial(z);
            }
        }
        Ok(MomentTable { entries: indices.iter().cloned().zip(sums).collect() })
    }

    /// Trapezoid moments of grid data.
    pub fn from_grid(f: &GridFunction, indices: &[MultiIndex]) -> Result<Self> {
        let grid = f.grid();
        check_indices(grid.dims(), indices)?;
        f.check_finite()?;
        let mut sums = vec![0.0; indices.len()];
        let mut z = vec![0.0; grid.dims()];
        for (i, &v) in f.values().iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            grid.coords_into(i, &mut z);
            for (s, a) in sums.iter_mut().zip(indices) {
                *s += v * a.monomial(&z);
            }
        }
        let dv = grid.cell_volume();
        Ok(MomentTable { entries: indices.iter().cloned().zip(sums.into_iter().map(|s| s * dv)).collect() })
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<f64> {
        self.entries.get(alpha).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.entries.iter().map(|(k, &v)| (k, v))
    }

    /// Largest order present.
    pub fn max_order(&self) -> u32 {
        self.entries.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    /// Coefficients `(−1)^{|α|} m_α / α!` of the `D^α δ₀` terms.
    pub fn delta_coefficients(&self) -> BTreeMap<MultiIndex, f64> {
        self.entries.iter().map(|(a, &m)| (a.clone(), a.sign() * m / a.factorial())).collect()
    }
}

fn check_indices(dim: usize, indices: &[MultiIndex]) -> Result<()> {
    if let Some(a) = indices.iter().find(|a| a.dim() != dim) {
        return arg_err(format!("index {a} does not match dimension {dim}"));
    }
    Ok(())
}

/// `x ↦ ∫ f(x, y) y^γ dy`, by Gauss–Legendre over the y-box.
pub fn y_moment(f: SharedField, split: DimensionSplit, gamma: &MultiIndex, settings: &QuadSettings) -> Result<FnField> {
    if f.dim() != split.total() {
        return arg_err(format!("function has dimension {}, split {}+{}", f.dim(), split.m(), split.n()));
    }
    if gamma.dim() != split.n() {
        return arg_err(format!("γ has {} entries, the y-block has {}", gamma.dim(), split.n()));
    }
    let radius = finite_radius(&*f)?;
    let rule = settings.box_rule(split.n(), radius)?;
    let gamma = gamma.clone();
    let m = split.m();
    Ok(FnField::new(m, radius, move |x| {
        let mut z = x.to_vec();
        z.resize(m + gamma.dim(), 0.0);
        let mut acc = 0.0;
        for (y, w) in rule.iter() {
            z[m..].copy_from_slice(y);
            acc += w * f.eval(&z) * gamma.monomial(y);
        }
        acc
    }))
}

/// All y-moments in `gammas` of `f(x, ·)` at one `x`, sharing evaluations.
pub(crate) fn y_moments_at(
    f: &dyn ScalarField,
    x: &[f64],
    gammas: &[MultiIndex],
    rule: &BoxRule,
    z: &mut Vec<f64>,
    out: &mut [f64],
) {
    let m = x.len();
    z.clear();
    z.extend_from_slice(x);
    z.resize(m + rule.dim(), 0.0);
    out.iter_mut().for_each(|o| *o = 0.0);
    for (y, w) in rule.iter() {
        z[m..].copy_from_slice(y);
        let v = f.eval(z) * w;
        if v == 0.0 {
            continue;
        }
        for (o, g) in out.iter_mut().zip(gammas) {
            *o += v * g.monomial(y);
        }
    }
}
