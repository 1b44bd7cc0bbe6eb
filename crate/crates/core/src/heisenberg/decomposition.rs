//! First-order Taylor identity on `ℍⁿ` and the decomposition
//! `f = (∫f)δ − Σ(∫z_j f) Z_jδ + ΘF + Σ Z_jZ_k(F_{jk} ⊗ δ(θ))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::field::{FnField, PolyGaussian, ScalarField};
use crate::kernels::HField;
use crate::moments::{pairing, MomentTable, QuadSettings, SharedField};
use crate::moments::remainder::{polar_of, radial_weights};
use crate::numeric::{GaussLegendre, MultiIndex, PolarRule};

use super::group::{apply_field, HPoint};

const LINE_NODES: usize = 64;

fn rank_of(dim: usize) -> Result<usize> {
    if dim < 3 || dim % 2 == 0 {
        return arg_err(format!("a function on ℍⁿ has 2n+1 variables, got {dim}"));
    }
    Ok((dim - 1) / 2)
}

fn decay_radius(f: &dyn ScalarField) -> Result<f64> {
    let r = f.radius();
    if !r.is_finite() {
        return arg_err("the function has no declared decay radius");
    }
    Ok(r.max(1e-3))
}

/// `|φ(z,θ) − [φ(0) + Σ z_j Z_jφ(0) + ∫₀¹(1−s) Σ z_jz_k Z_jZ_kφ(sz,0) ds + ∫₀¹ θ Θφ(z,sθ) ds]|`.
pub fn h_taylor_check(phi: &PolyGaussian, p: &HPoint) -> Result<f64> {
    let n = rank_of(phi.dim())?;
    if p.n() != n {
        return arg_err(format!("point lies in ℍ^{}, φ on ℍ^{n}", p.n()));
    }
    let gl = GaussLegendre::new(LINE_NODES);
    let origin = vec![0.0; 2 * n + 1];
    let mut rhs = phi.eval(&origin);
    for j in 0..2 * n {
        rhs += p.z[j] * apply_field(HField::Z(j), phi)?.eval(&origin);
    }
    let mut second = Vec::new();
    for j in 0..2 * n {
        for k in 0..2 * n {
            let c = p.z[j] * p.z[k];
            if c != 0.0 {
                second.push((c, apply_field(HField::ZZ(j, k), phi)?));
            }
        }
    }
    let mut q = vec![0.0; 2 * n + 1];
    rhs += gl.integrate(0.0, 1.0, |s| {
        for (qi, zi) in q.iter_mut().zip(&p.z) {
            *qi = s * zi;
        }
        q[2 * n] = 0.0;
        (1.0 - s) * second.iter().map(|(c, d)| c * d.eval(&q)).sum::<f64>()
    });
    let dt = apply_field(HField::Theta, phi)?;
    let mut q = p.coords();
    rhs += gl.integrate(0.0, 1.0, |s| {
        q[2 * n] = s * p.theta;
        p.theta * dt.eval(&q)
    });
    Ok((phi.eval(&p.coords()) - rhs).abs())
}

/// `F(z,θ) = −∫₀¹ (θ/s) f(z,θ/s) ds/s`, integrated in `ln s` over
/// `[ln(|θ|/R), 0]` where `R` is the decay radius of `f`.
pub fn h_remainder_f(f: SharedField, settings: &QuadSettings) -> Result<FnField> {
    let dim = f.dim();
    let n = rank_of(dim)?;
    let radius = decay_radius(&*f)?;
    let gl = GaussLegendre::new(settings.line);
    Ok(FnField::new(dim, radius, move |p| {
        let theta = p[2 * n];
        if theta == 0.0 || theta.abs() >= radius {
            return 0.0;
        }
        let mut q = p.to_vec();
        -gl.integrate((theta.abs() / radius).ln(), 0.0, |v| {
            let u = theta * (-v).exp();
            q[2 * n] = u;
            u * f.eval(&q)
        })
    }))
}

/// `g(z) = ∫ f(z,θ) dθ`.
fn theta_marginal(f: &dyn ScalarField, z: &[f64], radius: f64, gl: &GaussLegendre, q: &mut Vec<f64>) -> f64 {
    q.clear();
    q.extend_from_slice(z);
    q.push(0.0);
    let last = z.len();
    gl.on(-radius, radius)
        .map(|(th, w)| {
            q[last] = th;
            w * f.eval(q)
        })
        .sum()
}

/// `∫₀¹ (1−s) s^{−2n−2} g(z/s) ds` in radial form; `F_{jk}(z) = z_j z_k` times this.
fn fjk_profile(f: &dyn ScalarField, z: &[f64], radius: f64, gl: &GaussLegendre, omega: &mut [f64]) -> f64 {
    let d = z.len();
    let rho = polar_of(z, omega);
    let mut p = vec![0.0; d];
    let mut q = Vec::with_capacity(d + 1);
    let total: f64 = radial_weights(rho, d, 1, radius, gl)
        .into_iter()
        .map(|(r, w)| {
            for (pi, o) in p.iter_mut().zip(omega.iter()) {
                *pi = r * o;
            }
            w * theta_marginal(f, &p, radius, gl, &mut q)
        })
        .sum();
    // the radial form carries ω_jω_k; divide by ρ² to return the z_jz_k factor
    if rho == 0.0 {
        0.0
    } else {
        total / (rho * rho)
    }
}

/// `F_{jk}(z) = ∫_ℝ ∫₀¹ (1−s)(z_j/s)(z_k/s) f(z/s, θ) ds/s^{2n} dθ`, with
/// `θ` left unscaled; zero-based `j, k < 2n`.
pub fn h_remainder_fjk(f: SharedField, j: usize, k: usize, settings: &QuadSettings) -> Result<FnField> {
    let n = rank_of(f.dim())?;
    if j >= 2 * n || k >= 2 * n {
        return arg_err(format!("indices ({j}, {k}) outside 0..{}", 2 * n));
    }
    let radius = decay_radius(&*f)?;
    let gl = GaussLegendre::new(settings.line);
    Ok(FnField::new(2 * n, radius, move |z| {
        let mut omega = vec![0.0; z.len()];
        z[j] * z[k] * fjk_profile(&*f, z, radius, &gl, &mut omega)
    }))
}

/// The same remainder with `f(z/s, θ/s)` inside the θ-integral. Without the
/// Jacobian `1/s` of `θ → θ/s` this differs from [`h_remainder_fjk`].
pub fn h_remainder_fjk_scaled_theta(
    f: SharedField,
    j: usize,
    k: usize,
    jacobian: bool,
    settings: &QuadSettings,
) -> Result<FnField> {
    let n = rank_of(f.dim())?;
    if j >= 2 * n || k >= 2 * n {
        return arg_err(format!("indices ({j}, {k}) outside 0..{}", 2 * n));
    }
    let radius = decay_radius(&*f)?;
    let gl = GaussLegendre::new(settings.line);
    Ok(FnField::new(2 * n, radius, move |z| {
        let rho = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rho == 0.0 || rho >= radius {
            return 0.0;
        }
        let mut q = vec![0.0; 2 * n + 1];
        // s = e^v, ds = s dv
        gl.integrate((rho / radius).ln(), 0.0, |v| {
            let s = v.exp();
            for (qi, zi) in q.iter_mut().zip(z) {
                *qi = zi / s;
            }
            let inner: f64 = gl
                .on(-s * radius, s * radius)
                .map(|(th, w)| {
                    q[2 * n] = th / s;
                    w * f.eval(&q)
                })
                .sum();
            let jac = if jacobian { 1.0 / s } else { 1.0 };
            s * (1.0 - s) * (z[j] / s) * (z[k] / s) * s.powi(-2 * n as i32) * inner * jac
        })
    }))
}

/// The pieces of `⟨f, φ⟩` on `ℍⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HDecompositionTerms {
    pub direct: f64,
    /// `(∫f)φ(0) + Σ(∫z_j f)(Z_jφ)(0)`.
    pub main: f64,
    /// `−∫ F Θφ`.
    pub theta_remainder: f64,
    /// `Σ ∫ F_{jk}(z) (Z_jZ_kφ)(z,0) dz`.
    pub z_remainders: f64,
}

impl HDecompositionTerms {
    pub fn reconstructed(&self) -> f64 {
        self.main + self.theta_remainder + self.z_remainders
    }

    pub fn residual(&self) -> f64 {
        (self.direct - self.reconstructed()).abs()
    }
}

pub fn h_decomposition_check(f: SharedField, phi: &PolyGaussian, settings: &QuadSettings) -> Result<f64> {
    Ok(h_decomposition_terms(f, phi, settings)?.residual())
}

pub fn h_decomposition_terms(f: SharedField, phi: &PolyGaussian, settings: &QuadSettings) -> Result<HDecompositionTerms> {
    let dim = f.dim();
    let n = rank_of(dim)?;
    if phi.dim() != dim {
        return arg_err("f and φ live in different dimensions");
    }
    let radius = decay_radius(&*f)?;
    let direct = pairing(&*f, phi, settings)?;

    let mut indices = vec![MultiIndex::zeros(dim)];
    indices.extend((0..2 * n).map(|j| MultiIndex::unit(dim, j)));
    let moments = MomentTable::compute(&*f, &indices, settings)?;
    let origin = vec![0.0; dim];
    let mut main = moments.get(&indices[0]).unwrap_or(0.0) * phi.eval(&origin);
    for j in 0..2 * n {
        main += moments.get(&indices[j + 1]).unwrap_or(0.0) * apply_field(HField::Z(j), phi)?.eval(&origin);
    }

    // −∫ F Θφ, split at θ = 0 where F jumps; partial sums are collected
    // before adding so the result does not depend on scheduling
    let big_f = h_remainder_f(f.clone(), settings)?;
    let dphi = apply_field(HField::Theta, phi)?;
    let zrule = settings.box_rule(2 * n, radius)?;
    let zpoints: Vec<(Vec<f64>, f64)> = zrule.iter().map(|(z, w)| (z.to_vec(), w)).collect();
    let gl = GaussLegendre::new(settings.line);
    let thetas: Vec<(f64, f64)> = gl.on(-radius, 0.0).chain(gl.on(0.0, radius)).collect();
    let theta_remainder: f64 = -zpoints
        .par_iter()
        .map(|(z, wz)| {
            let mut q = z.clone();
            q.push(0.0);
            let mut acc = 0.0;
            for &(th, wt) in &thetas {
                q[2 * n] = th;
                let d = dphi.eval(&q);
                if d != 0.0 {
                    acc += wt * d * big_f.eval(&q);
                }
            }
            wz * acc
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>();

    // Σ_{jk} ∫ F_{jk} (Z_jZ_kφ)(z,0) dz = ∫ Φ(z) Σ z_jz_k (Z_jZ_kφ)(z,0) dz
    let mut second = Vec::new();
    for j in 0..2 * n {
        for k in 0..2 * n {
            let d = apply_field(HField::ZZ(j, k), phi)?;
            if !d.is_zero() {
                second.push((j, k, d));
            }
        }
    }
    let z_remainders = if second.is_empty() {
        0.0
    } else {
        let polar = PolarRule::new(2 * n, radius, settings.radial, settings.angular)?;
        let points: Vec<(Vec<f64>, f64)> = polar.iter().map(|(z, w)| (z.to_vec(), w)).collect();
        points
            .par_iter()
            .map(|(z, w)| {
                let mut q = z.clone();
                q.push(0.0);
                let inner: f64 = second.iter().map(|(j, k, d)| z[*j] * z[*k] * d.eval(&q)).sum();
                if inner == 0.0 {
                    return 0.0;
                }
                let mut omega = vec![0.0; 2 * n];
                w * inner * fjk_profile(&*f, z, radius, &gl, &mut omega)
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    };
    Ok(HDecompositionTerms { direct, main, theta_remainder, z_remainders })
}
