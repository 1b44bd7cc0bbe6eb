//! The Heisenberg group `ℍⁿ = ℝ^{2n} × ℝ` in exponential coordinates.
//!
//! `(z,θ)∘(z′,θ′) = (z+z′, θ+θ′+2Σ_j (z_{n+j}z′_j − z_j z′_{n+j}))`, which is
//! the step-two law `θ+θ′+½⟨Bz,z′⟩` with `B = 4[[0,I],[−I,0]]`.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::field::{PolyGaussian, ScalarField};
use crate::kernels::HField;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub z: Vec<f64>,
    pub theta: f64,
}

impl HPoint {
    pub fn new(z: Vec<f64>, theta: f64) -> Result<Self> {
        if z.is_empty() || z.len() % 2 != 0 {
            return arg_err(format!("z must have 2n ≥ 2 coordinates, got {}", z.len()));
        }
        if !theta.is_finite() || z.iter().any(|v| !v.is_finite()) {
            return arg_err("group point has a non-finite coordinate");
        }
        Ok(HPoint { z, theta })
    }

    pub fn identity(n: usize) -> Self {
        HPoint { z: vec![0.0; 2 * n], theta: 0.0 }
    }

    /// Splits `[z…, θ]`.
    pub fn from_coords(c: &[f64]) -> Result<Self> {
        match c.split_last() {
            Some((&theta, z)) => HPoint::new(z.to_vec(), theta),
            None => arg_err("empty coordinate vector"),
        }
    }

    pub fn n(&self) -> usize {
        self.z.len() / 2
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut c = self.z.clone();
        c.push(self.theta);
        c
    }

    pub fn max_abs_diff(&self, other: &HPoint) -> f64 {
        self.z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b).abs())
            .fold((self.theta - other.theta).abs(), f64::max)
    }
}

/// `2Σ_j (z_{n+j}w_j − z_j w_{n+j})`.
pub fn symplectic(z: &[f64], w: &[f64]) -> f64 {
    let n = z.len() / 2;
    let mut s = 0.0;
    for j in 0..n {
        s += z[n + j] * w[j] - z[j] * w[n + j];
    }
    2.0 * s
}

pub fn h_compose(v: &HPoint, w: &HPoint) -> Result<HPoint> {
    if v.z.len() != w.z.len() {
        return arg_err(format!("cannot compose points of ℍ^{} and ℍ^{}", v.n(), w.n()));
    }
    let z = v.z.iter().zip(&w.z).map(|(a, b)| a + b).collect();
    Ok(HPoint { z, theta: v.theta + w.theta + symplectic(&v.z, &w.z) })
}

pub fn h_inverse(v: &HPoint) -> HPoint {
    HPoint { z: v.z.iter().map(|a| -a).collect(), theta: -v.theta }
}

/// `δ_λ(z,θ) = (λz, λ²θ)`.
pub fn h_dilate(lambda: f64, v: &HPoint) -> Result<HPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return arg_err(format!("dilation factor must be positive, got {lambda}"));
    }
    Ok(HPoint { z: v.z.iter().map(|a| lambda * a).collect(), theta: lambda * lambda * v.theta })
}

fn group_rank(u: &PolyGaussian) -> Result<usize> {
    let d = u.dim();
    if d < 3 || d % 2 == 0 {
        return arg_err(format!("a function on ℍⁿ has 2n+1 variables, got {d}"));
    }
    Ok((d - 1) / 2)
}

/// `(∂_j ± 2z_{j̄}∂_θ) u`, with the `+` sign for `Z_j`, `j < n`.
fn first_order(u: &PolyGaussian, n: usize, j: usize, left: bool) -> Result<PolyGaussian> {
    let (jb, e) = if j < n { (j + n, 1.0) } else { (j - n, -1.0) };
    let s = if left { 1.0 } else { -1.0 };
    u.derivative(j).add(&u.derivative(2 * n).times_coord(jb, 2.0 * s * e))
}

/// The field applied to `u`, exactly. `ZZ(j, k)` is `Z_j Z_k`.
pub fn apply_field(field: HField, u: &PolyGaussian) -> Result<PolyGaussian> {
    let n = group_rank(u)?;
    field.validate(n)?;
    match field {
        HField::Identity => Ok(u.clone()),
        HField::Theta => Ok(u.derivative(2 * n)),
        HField::Z(j) => first_order(u, n, j, true),
        HField::Y(j) => first_order(u, n, j, false),
        HField::ZZ(j, k) => first_order(&first_order(u, n, k, true)?, n, j, true),
    }
}

pub fn h_field_apply(field: HField, u: &PolyGaussian, p: &HPoint) -> Result<f64> {
    let n = group_rank(u)?;
    if p.n() != n {
        return arg_err(format!("point lies in ℍ^{}, function on ℍ^{n}", p.n()));
    }
    Ok(apply_field(field, u)?.eval(&p.coords()))
}

/// `Exp(Σ a_j Z_j + bΘ)`: the time-one flow of the left-invariant field
/// from the identity, integrated with RK4.
pub fn h_exp(algebra: &HPoint, steps: usize) -> HPoint {
    let n = algebra.n();
    let a = &algebra.z;
    let rhs = |g: &[f64]| -> f64 {
        // θ-velocity of Σ a_j Z_j + bΘ at g
        let mut v = algebra.theta;
        for j in 0..n {
            v += 2.0 * (a[j] * g[n + j] - a[n + j] * g[j]);
        }
        v
    };
    let steps = steps.max(1);
    let h = 1.0 / steps as f64;
    let mut z = vec![0.0; 2 * n];
    let mut theta = 0.0;
    let mut buf = vec![0.0; 2 * n];
    for _ in 0..steps {
        let k1 = rhs(&z);
        for (b, (zi, ai)) in buf.iter_mut().zip(z.iter().zip(a)) {
            *b = zi + 0.5 * h * ai;
        }
        let k2 = rhs(&buf);
        let k3 = k2;
        for (b, (zi, ai)) in buf.iter_mut().zip(z.iter().zip(a)) {
            *b = zi + h * ai;
        }
        let k4 = rhs(&buf);
        theta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        for (zi, ai) in z.iter_mut().zip(a) {
            *zi += h * ai;
        }
    }
    HPoint { z, theta }
}

/// Exponential coordinates: `Log` is the identity on coordinates.
pub fn h_log(v: &HPoint) -> HPoint {
    v.clone()
}

/// `max(|Exp(Log v) − v|, |Exp(s Log v) − s v|)`.
pub fn h_exp_log_check(v: &HPoint, s: f64) -> f64 {
    let round = h_exp(&h_log(v), 16).max_abs_diff(v);
    let l = h_log(v);
    let scaled = HPoint { z: l.z.iter().map(|a| s * a).collect(), theta: s * l.theta };
    let target = HPoint { z: v.z.iter().map(|a| s * a).collect(), theta: s * v.theta };
    round.max(h_exp(&scaled, 16).max_abs_diff(&target))
}
