//! Tensor-trapezoid quadrature and the weighted, mixed and `𝒳^p` norms.

use serde::{Deserialize, Serialize};

use super::grid::{DimensionSplit, GridFunction};
use super::multi_index::MultiIndex;
use crate::error::{arg_err, Error, Result};

/// Polynomial weight attached to an `L^p` norm. Split weights treat the
/// first `m` axes as `x` and the remaining ones as `y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `|z|^a`
    RadialPower { a: f64 },
    /// `|x|^a |y|^b`
    SplitPower { m: usize, a: f64, b: f64 },
    /// `1 + |x|^a + |y|^b`
    Additive { m: usize, a: f64, b: f64 },
}

impl WeightSpec {
    pub const UNIT: WeightSpec = WeightSpec::RadialPower { a: 0.0 };

    pub fn validate(&self, dims: usize) -> Result<()> {
        let (a, b, m) = match *self {
            WeightSpec::RadialPower { a } => (a, 0.0, 0),
            WeightSpec::SplitPower { m, a, b } | WeightSpec::Additive { m, a, b } => (a, b, m),
        };
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return arg_err(format!("weight exponents must be finite and >= 0 (a={a}, b={b})"));
        }
        if m > dims {
            return arg_err(format!("weight split m={m} exceeds dimension {dims}"));
        }
        Ok(())
    }

    /// Evaluates the weight at `z`; `0^0` is taken as 1.
    pub fn eval(&self, z: &[f64]) -> f64 {
        match *self {
            WeightSpec::RadialPower { a } => pow(norm(z), a),
            WeightSpec::SplitPower { m, a, b } => pow(norm(&z[..m]), a) * pow(norm(&z[m..]), b),
            WeightSpec::Additive { m, a, b } => 1.0 + pow(norm(&z[..m]), a) + pow(norm(&z[m..]), b),
        }
    }
}

fn norm(z: &[f64]) -> f64 {
    z.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn pow(r: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        r.powf(a)
    }
}

/// `Σ values · Π h_i` over the grid.
pub fn quad_integral(f: &GridFunction) -> Result<f64> {
    f.check_finite()?;
    Ok(f.values().iter().sum::<f64>() * f.grid().cell_volume())
}

/// `(∫ w^p |f|^p)^{1/p}`
pub fn weighted_lp_norm(f: &GridFunction, w: &WeightSpec, p: f64) -> Result<f64> {
    check_p(p)?;
    w.validate(f.grid().dims())?;
    f.check_finite()?;
    let grid = f.grid();
    let mut z = vec![0.0; grid.dims()];
    let mut acc = 0.0;
    for (i, &v) in f.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        grid.coords_into(i, &mut z);
        acc += (w.eval(&z) * v.abs()).powf(p);
    }
    let integral = acc * grid.cell_volume();
    if !integral.is_finite() {
        return Err(Error::NumericDomain("weight overflowed on the grid".into()));
    }
    Ok(integral.powf(1.0 / p))
}

/// `(∫_{ℝ^m} |x|^{p|β|} ‖ |y|^{|γ|} f(x,·) ‖_{L¹}^p dx)^{1/p}`
pub fn mixed_norm(
    f: &GridFunction,
    split: DimensionSplit,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    p: f64,
) -> Result<f64> {
    if beta.dim() != split.m() || gamma.dim() != split.n() {
        return arg_err(format!(
            "mixed norm indices have lengths ({}, {}) but the split is ({}, {})",
            beta.dim(),
            gamma.dim(),
            split.m(),
            split.n()
        ));
    }
    mixed_norm_orders(f, split, beta.order() as f64, gamma.order() as f64, p)
}

/// Mixed norm in terms of the weight orders only; the norm depends on
/// `β`, `γ` through `|β|`, `|γ|`.
pub fn mixed_norm_orders(f: &GridFunction, split: DimensionSplit, bo: f64, go: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let grid = f.grid();
    if grid.dims() != split.total() {
        return arg_err(format!(
            "grid has {} axes but the split needs {}",
            grid.dims(),
            split.total()
        ));
    }
    f.check_finite()?;
    let gx = grid.sub_grid(0..split.m());
    let gy = grid.sub_grid(split.m()..split.total());
    let ny = gy.len();
    let hy = gy.cell_volume();
    let hx = gx.cell_volume();
    let y_weights: Vec<f64> = (0..ny).map(|j| pow(norm(&gy.coords(j)), go)).collect();
    let mut x = vec![0.0; split.m()];
    let mut acc = 0.0;
    for (ix, block) in f.values().chunks(ny).enumerate() {
        let inner: f64 = block.iter().zip(&y_weights).map(|(v, w)| w * v.abs()).sum::<f64>() * hy;
        if inner == 0.0 {
            continue;
        }
        gx.coords_into(ix, &mut x);
        acc += (pow(norm(&x), bo) * inner).powf(p);
    }
    Ok((acc * hx).powf(1.0 / p))
}

/// Norm of the intersection space controlling the split remainders:
/// `Σ_{g=0}^{k} ‖f‖_{L^p(|x|^{k+1-g}; L¹(|y|^g))} + ‖|y|^{k+1} f‖_{L^p}`.
/// One term per order `g = |γ|`.
pub fn xp_norm(f: &GridFunction, split: DimensionSplit, k: u32, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for g in 0..=k {
        total += mixed_norm_orders(f, split, (k + 1 - g) as f64, g as f64, p)?;
    }
    total += weighted_lp_norm(
        f,
        &WeightSpec::SplitPower { m: split.m(), a: 0.0, b: (k + 1) as f64 },
        p,
    )?;
    Ok(total)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return arg_err(format!("norm exponent p must satisfy 1 <= p < ∞, got {p}"));
    }
    Ok(())
}
