//! Remainder functions of the Taylor-type decompositions.
//!
//! Each remainder has the form
//! `F(x) = C ∫₀¹ (1−t)^{k'} (x/t)^α g(x/t) dt/t^d` with `|α| = k'+1`. With
//! `ρ = |x|`, `ω = x/ρ` and `s = ρ/t` this becomes
//! `C ω^α ρ^{1−d} ∫_ρ^R (1 − ρ/s)^{k'} s^{k'+d−1} g(sω) ds`, where `R` is the
//! decay radius of `g`. The factor `ρ^{1−d}` makes `F` singular at the
//! origin for `d ≥ 2`; integrals of remainders therefore use polar rules.

use crate::error::{arg_err, Result};
use crate::field::{FnField, ScalarField};
use crate::numeric::{BoxRule, DimensionSplit, GaussLegendre, MultiIndex, PolarRule, WeightSpec};

use super::{finite_radius, y_moments_at, DecompositionRule, QuadSettings, SharedField};

/// `(k'+1)(−1)^{k'+1}/α!`.
pub(crate) fn remainder_coefficient(alpha: &MultiIndex, kp: u32) -> f64 {
    let sign = if (kp + 1) % 2 == 0 { 1.0 } else { -1.0 };
    (kp + 1) as f64 * sign / alpha.factorial()
}

/// Splits `x` into `(ρ, ω)`; at the origin `ω` is the first unit vector.
pub(crate) fn polar_of(x: &[f64], omega: &mut [f64]) -> f64 {
    let rho = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if rho == 0.0 {
        omega.iter_mut().for_each(|o| *o = 0.0);
        omega[0] = 1.0;
    } else {
        for (o, v) in omega.iter_mut().zip(x) {
            *o = v / rho;
        }
    }
    rho
}

/// Nodes `s` and weights of `ρ^{1−d} (1 − ρ/s)^{k'} s^{k'+d−1} ds` on `[ρ, R]`.
pub(crate) fn radial_weights(rho: f64, d: usize, kp: u32, radius: f64, gl: &GaussLegendre) -> Vec<(f64, f64)> {
    if rho >= radius {
        return Vec::new();
    }
    let pre = rho.powi(1 - d as i32);
    gl.on(rho, radius)
        .map(|(s, w)| (s, w * pre * (1.0 - rho / s).powi(kp as i32) * s.powi((kp + d as u32) as i32 - 1)))
        .collect()
}

fn check_order(alpha: &MultiIndex, kp: u32, what: &str) -> Result<()> {
    if alpha.order() != kp + 1 {
        return arg_err(format!("{what}: index {alpha} has order {}, expected {}", alpha.order(), kp + 1));
    }
    Ok(())
}

/// `F_α(x) = (k+1)((−1)^{k+1}/α!) ∫₀¹ (1−t)^k (x/t)^α f(x/t) dt/t^N`, `|α| = k+1`.
pub fn remainder_f_alpha(f: SharedField, alpha: &MultiIndex, k: u32, settings: &QuadSettings) -> Result<FnField> {
    check_order(alpha, k, "F_α")?;
    if alpha.dim() != f.dim() {
        return arg_err(format!("index {alpha} does not match dimension {}", f.dim()));
    }
    let radius = finite_radius(&*f)?;
    let d = f.dim();
    let gl = GaussLegendre::new(settings.line);
    let coef = remainder_coefficient(alpha, k);
    let alpha = alpha.clone();
    Ok(FnField::new(d, radius, move |x| {
        let mut omega = vec![0.0; d];
        let rho = polar_of(x, &mut omega);
        let mut p = vec![0.0; d];
        let mut acc = 0.0;
        for (s, w) in radial_weights(rho, d, k, radius, &gl) {
            for (pi, o) in p.iter_mut().zip(&omega) {
                *pi = s * o;
            }
            acc += w * f.eval(&p);
        }
        coef * alpha.monomial(&omega) * acc
    }))
}

/// `F_γ(x, y)`: the same construction in the y-block with `x` frozen.
///
/// With `half = false`, `|γ| = k+1` and the Taylor order is `k`. With
/// `half = true` (odd `k`), `|γ| = (k+1)/2` and the order is `(k−1)/2`.
pub fn remainder_f_gamma(
    f: SharedField,
    split: DimensionSplit,
    gamma: &MultiIndex,
    k: u32,
    half: bool,
    settings: &QuadSettings,
) -> Result<FnField> {
    if f.dim() != split.total() || gamma.dim() != split.n() {
        return arg_err("F_γ: dimensions of f, γ and the split disagree");
    }
    let kp = if half {
        if k % 2 == 0 {
            return arg_err(format!("k must be odd, got {k}"));
        }
        (k - 1) / 2
    } else {
        k
    };
    check_order(gamma, kp, "F_γ")?;
    let radius = finite_radius(&*f)?;
    let (m, n) = (split.m(), split.n());
    let gl = GaussLegendre::new(settings.line);
    let coef = remainder_coefficient(gamma, kp);
    let gamma = gamma.clone();
    Ok(FnField::new(m + n, radius, move |z| {
        let mut omega = vec![0.0; n];
        let rho = polar_of(&z[m..], &mut omega);
        let mut p = z.to_vec();
        let mut acc = 0.0;
        for (s, w) in radial_weights(rho, n, kp, radius, &gl) {
            for (pi, o) in p[m..].iter_mut().zip(&omega) {
                *pi = s * o;
            }
            acc += w * f.eval(&p);
        }
        coef * gamma.monomial(&omega) * acc
    }))
}

/// Checks the `(β, γ)` constraints of an x-remainder and returns `|β|`.
pub(crate) fn check_x_remainder(
    split: DimensionSplit,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    k: u32,
    rule: DecompositionRule,
) -> Result<u32> {
    if beta.dim() != split.m() || gamma.dim() != split.n() {
        return arg_err("[ℛf]_βγ: β must index the x-block and γ the y-block");
    }
    let (b, g) = (beta.order(), gamma.order());
    match rule {
        DecompositionRule::Split => {
            if b + g != k + 1 || g > k {
                return arg_err(format!("need |β|+|γ| = k+1 = {} with |γ| ≤ k, got |β| = {b}, |γ| = {g}", k + 1));
            }
        }
        DecompositionRule::Anisotropic => {
            if k % 2 == 0 {
                return arg_err(format!("k must be odd, got {k}"));
            }
            if b + 2 * g != k + 1 || 2 * g > k - 1 {
                return arg_err(format!(
                    "need |β|+2|γ| = k+1 = {} with |γ| ≤ (k−1)/2, got |β| = {b}, |γ| = {g}",
                    k + 1
                ));
            }
        }
        DecompositionRule::Full => return arg_err("the full decomposition has no x-remainders"),
    }
    Ok(b)
}

/// `[ℛf]_{βγ}(x) = ((−1)^{|β|}|β|/β!) ∫₀¹ (1−t)^{|β|−1} (x/t)^β [Mf]_γ(x/t) dt/t^m`.
pub fn remainder_r_betagamma(
    f: SharedField,
    split: DimensionSplit,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    k: u32,
    rule: DecompositionRule,
    settings: &QuadSettings,
) -> Result<FnField> {
    if f.dim() != split.total() {
        return arg_err("[ℛf]_βγ: f does not live on the split space");
    }
    let b = check_x_remainder(split, beta, gamma, k, rule)?;
    let radius = finite_radius(&*f)?;
    let m = split.m();
    let kp = b - 1;
    let gl = GaussLegendre::new(settings.line);
    let yrule = settings.box_rule(split.n(), radius)?;
    let coef = remainder_coefficient(beta, kp);
    let beta = beta.clone();
    let gammas = vec![gamma.clone()];
    Ok(FnField::new(m, radius, move |x| {
        let mut omega = vec![0.0; m];
        let rho = polar_of(x, &mut omega);
        let mut p = vec![0.0; m];
        let mut buf = Vec::new();
        let mut mom = [0.0];
        let mut acc = 0.0;
        for (s, w) in radial_weights(rho, m, kp, radius, &gl) {
            for (pi, o) in p.iter_mut().zip(&omega) {
                *pi = s * o;
            }
            y_moments_at(&*f, &p, &gammas, &yrule, &mut buf, &mut mom);
            acc += w * mom[0];
        }
        coef * beta.monomial(&omega) * acc
    }))
}

/// `‖F‖_{L^p(ℝ^d)}` of a function supported in the ball of `radius`,
/// by a polar rule (`d ≤ 3`).
pub fn remainder_norm(f: &dyn ScalarField, p: f64, radius: f64, settings: &QuadSettings) -> Result<f64> {
    if p < 1.0 {
        return arg_err(format!("p must be ≥ 1, got {p}"));
    }
    let rule = PolarRule::new(f.dim(), radius, settings.radial, settings.angular)?;
    Ok(rule.integrate(|z| f.eval(z).abs().powf(p)).powf(1.0 / p))
}

/// `‖F‖_{L^p(ℝ^{m+n})}` for a function singular along `y = 0`: box rule in
/// `x`, polar rule in `y`.
pub fn split_remainder_norm(
    f: &dyn ScalarField,
    split: DimensionSplit,
    p: f64,
    radius: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    if p < 1.0 {
        return arg_err(format!("p must be ≥ 1, got {p}"));
    }
    let xr = settings.box_rule(split.m(), radius)?;
    let yr = PolarRule::new(split.n(), radius, settings.radial, settings.angular)?;
    let m = split.m();
    let mut z = vec![0.0; split.total()];
    let mut acc = 0.0;
    for (x, wx) in xr.iter() {
        z[..m].copy_from_slice(x);
        for (y, wy) in yr.iter() {
            z[m..].copy_from_slice(y);
            acc += wx * wy * f.eval(&z).abs().powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// `‖w f‖_{L^p}` for a smooth decaying field, by box quadrature.
pub fn field_weighted_norm(f: &dyn ScalarField, w: &WeightSpec, p: f64, settings: &QuadSettings) -> Result<f64> {
    if p < 1.0 {
        return arg_err(format!("p must be ≥ 1, got {p}"));
    }
    w.validate(f.dim())?;
    let rule: BoxRule = settings.box_rule(f.dim(), finite_radius(f)?)?;
    Ok(rule.integrate(|z| (w.eval(z) * f.eval(z).abs()).powf(p)).powf(1.0 / p))
}

/// `(∫ |x|^{p·bo} ‖|y|^{go} f(x,·)‖_{L¹}^p dx)^{1/p}` for a field.
pub fn field_mixed_norm(
    f: &dyn ScalarField,
    split: DimensionSplit,
    bo: f64,
    go: f64,
    p: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    if p < 1.0 {
        return arg_err(format!("p must be ≥ 1, got {p}"));
    }
    let radius = finite_radius(f)?;
    let xr = settings.box_rule(split.m(), radius)?;
    let yr = settings.box_rule(split.n(), radius)?;
    let m = split.m();
    let mut z = vec![0.0; split.total()];
    let mut acc = 0.0;
    for (x, wx) in xr.iter() {
        z[..m].copy_from_slice(x);
        let mut inner = 0.0;
        for (y, wy) in yr.iter() {
            z[m..].copy_from_slice(y);
            let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            inner += wy * pow0(ny, go) * f.eval(&z).abs();
        }
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        acc += wx * (pow0(nx, bo) * inner).powf(p);
    }
    Ok(acc.powf(1.0 / p))
}

fn pow0(r: f64, a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        r.powf(a)
    }
}
