//! Taylor formulas with integral remainder, checked pointwise.

use crate::error::{arg_err, Result};
use crate::field::{PolyGaussian, ScalarField};
use crate::numeric::{DimensionSplit, GaussLegendre, MultiIndex};

const LINE_NODES: usize = 64;

fn at_scaled(phi: &PolyGaussian, z: &[f64], t: f64, from: usize) -> f64 {
    let p: Vec<f64> = z.iter().enumerate().map(|(i, v)| if i >= from { v * t } else { *v }).collect();
    phi.eval(&p)
}

/// `|φ(z) − [Σ_{|α|≤k} D^αφ(0) z^α/α! + (k+1) Σ_{|α|=k+1} z^α/α! ∫₀¹ (1−t)^k D^αφ(tz) dt]|`.
pub fn taylor_check(phi: &PolyGaussian, z: &[f64], k: u32) -> Result<f64> {
    let d = phi.dim();
    if z.len() != d {
        return arg_err(format!("point has {} coordinates, φ has {d}", z.len()));
    }
    let gl = GaussLegendre::new(LINE_NODES);
    let origin = vec![0.0; d];
    let mut rhs = 0.0;
    for a in MultiIndex::up_to(d, k) {
        rhs += phi.partial(&a).eval(&origin) * a.monomial(z) / a.factorial();
    }
    for a in MultiIndex::of_order(d, k + 1) {
        let da = phi.partial(&a);
        let integral = gl.integrate(0.0, 1.0, |t| (1.0 - t).powi(k as i32) * at_scaled(&da, z, t, 0));
        rhs += (k + 1) as f64 * a.monomial(z) / a.factorial() * integral;
    }
    Ok((phi.eval(z) - rhs).abs())
}

/// Residual of the split Taylor formula: Taylor of order `k` in `y` at
/// `(x, 0)`, then Taylor of order `k − |γ|` in `x` of each `D_y^γ φ(·, 0)`.
///
/// The x-remainders carry the weight `(1−t)^{k−|γ|}`.
pub fn taylor_split_check(phi: &PolyGaussian, split: DimensionSplit, z: &[f64], k: u32) -> Result<f64> {
    let (m, n) = (split.m(), split.n());
    if phi.dim() != m + n || z.len() != m + n {
        return arg_err("φ, the point and the split disagree in dimension");
    }
    let gl = GaussLegendre::new(LINE_NODES);
    let origin = vec![0.0; m + n];
    let (x, y) = z.split_at(m);
    let mut rhs = 0.0;
    for a in MultiIndex::up_to(m + n, k) {
        rhs += phi.partial(&a).eval(&origin) * a.monomial(z) / a.factorial();
    }
    for g in MultiIndex::up_to(n, k) {
        let ord = k - g.order();
        let mut bracket = 0.0;
        for b in MultiIndex::of_order(m, ord + 1) {
            let d = phi.partial(&b.concat(&g));
            let integral = gl.integrate(0.0, 1.0, |t| {
                let mut p: Vec<f64> = x.iter().map(|v| v * t).collect();
                p.resize(m + n, 0.0);
                (1.0 - t).powi(ord as i32) * d.eval(&p)
            });
            bracket += b.monomial(x) / b.factorial() * integral;
        }
        rhs += (ord + 1) as f64 * bracket * g.monomial(y) / g.factorial();
    }
    for g in MultiIndex::of_order(n, k + 1) {
        let d = phi.partial(&MultiIndex::zeros(m).concat(&g));
        let integral = gl.integrate(0.0, 1.0, |t| (1.0 - t).powi(k as i32) * at_scaled(&d, z, t, m));
        rhs += (k + 1) as f64 * g.monomial(y) / g.factorial() * integral;
    }
    Ok((phi.eval(z) - rhs).abs())
}
