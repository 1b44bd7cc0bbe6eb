//! The set `Λ(p,k) = {(a,b) : k+1−2N(1−1/p) ≤ a+2b, a+b ≤ k}` of split
//! orders whose terms decay slower than the remainder.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSet {
    pub p: f64,
    pub k: u32,
    pub dims: usize,
    pub pairs: BTreeSet<(u32, u32)>,
}

impl LambdaSet {
    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Lower bound `k+1−2N(1−1/p)` on `a+2b`.
pub fn lambda_lower_bound(p: f64, k: u32, dims: usize) -> f64 {
    (k + 1) as f64 - 2.0 * dims as f64 * (1.0 - 1.0 / p)
}

pub fn lambda_set(p: f64, k: u32, dims: usize) -> Result<LambdaSet> {
    if !(p >= 1.0) || !p.is_finite() {
        return arg_err(format!("p must satisfy 1 ≤ p < ∞, got {p}"));
    }
    let lo = lambda_lower_bound(p, k, dims);
    let mut pairs = BTreeSet::new();
    for b in 0..=k {
        // a ≥ lo − 2b, rounded up with a little slack for lo computed in floating point
        let need = (lo - 2.0 * b as f64 - 1e-12).ceil().max(0.0) as u32;
        for a in need..=k - b {
            pairs.insert((a, b));
        }
    }
    Ok(LambdaSet { p, k, dims, pairs })
}
