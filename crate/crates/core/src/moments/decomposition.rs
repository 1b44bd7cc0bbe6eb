//! Distributional checks of the decompositions: `⟨f, φ⟩` against the sum
//! of the moment terms and the remainder pairings.
//!
//! `⟨D^α δ₀, φ⟩ = (−1)^{|α|} D^αφ(0)`, so the moment terms contribute
//! `m_α D^αφ(0)/α!` and a remainder `D^α F` contributes `(−1)^{|α|} ∫ F D^αφ`.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::field::{PolyGaussian, ScalarField};
use crate::numeric::{DimensionSplit, GaussLegendre, MultiIndex, PolarRule};

use super::remainder::{polar_of, radial_weights, remainder_coefficient};
use super::{finite_radius, y_moments_at, DecompositionRule, MomentTable, QuadSettings};

/// The pieces of one decomposition check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerms {
    /// `⟨f, φ⟩` by direct quadrature.
    pub direct: f64,
    /// Sum of the moment terms.
    pub main: f64,
    /// Pairings of the remainders in all variables, or in `x` only.
    pub x_remainders: f64,
    /// Pairings of the y-remainders.
    pub y_remainders: f64,
}

impl DecompositionTerms {
    pub fn reconstructed(&self) -> f64 {
        self.main + self.x_remainders + self.y_remainders
    }

    pub fn residual(&self) -> f64 {
        (self.direct - self.reconstructed()).abs()
    }
}

/// `∫ f φ` over the box of `f`'s decay radius.
pub fn pairing(f: &dyn ScalarField, phi: &dyn ScalarField, settings: &QuadSettings) -> Result<f64> {
    if f.dim() != phi.dim() {
        return arg_err("f and φ live in different dimensions");
    }
    let rule = settings.box_rule(f.dim(), finite_radius(f)?)?;
    Ok(rule.integrate(|z| {
        let v = f.eval(z);
        if v == 0.0 {
            0.0
        } else {
            v * phi.eval(z)
        }
    }))
}

/// `|⟨f, φ⟩ − ⟨decomposition of f, φ⟩|`.
pub fn verify_decomposition(
    f: &dyn ScalarField,
    phi: &PolyGaussian,
    split: Option<DimensionSplit>,
    k: u32,
    rule: DecompositionRule,
    settings: &QuadSettings,
) -> Result<f64> {
    Ok(decomposition_terms(f, phi, split, k, rule, settings)?.residual())
}

pub fn decomposition_terms(
    f: &dyn ScalarField,
    phi: &PolyGaussian,
    split: Option<DimensionSplit>,
    k: u32,
    rule: DecompositionRule,
    settings: &QuadSettings,
) -> Result<DecompositionTerms> {
    rule.validate(split, k)?;
    let dims = f.dim();
    if phi.dim() != dims {
        return arg_err("f and φ live in different dimensions");
    }
    if let Some(s) = split {
        if s.total() != dims {
            return arg_err(format!("split {}+{} does not match dimension {dims}", s.m(), s.n()));
        }
    }
    let radius = finite_radius(f)?;
    let direct = pairing(f, phi, settings)?;

    let indices = rule.main_indices(dims, split, k);
    let moments = MomentTable::compute(f, &indices, settings)?;
    let origin = vec![0.0; dims];
    let main = moments
        .iter()
        .map(|(a, m)| m * phi.partial(a).eval(&origin) / a.factorial())
        .sum();

    let (x_remainders, y_remainders) = match (rule, split) {
        (DecompositionRule::Full, _) => (full_remainder_pairing(f, phi, k, radius, settings)?, 0.0),
        (_, Some(s)) => (
            x_remainder_pairing(f, phi, s, k, rule, radius, settings)?,
            y_remainder_pairing(f, phi, s, rule.y_remainder_order(k).unwrap_or(k), radius, settings)?,
        ),
        _ => unreachable!("validated above"),
    };
    Ok(DecompositionTerms { direct, main, x_remainders, y_remainders })
}

/// `Σ_{|α|=k+1} (−1)^{k+1} ∫ F_α D^αφ`.
fn full_remainder_pairing(
    f: &dyn ScalarField,
    phi: &PolyGaussian,
    k: u32,
    radius: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    let d = f.dim();
    let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let terms: Vec<(MultiIndex, f64, PolyGaussian)> = MultiIndex::of_order(d, k + 1)
        .into_iter()
        .map(|a| {
            let c = sign * remainder_coefficient(&a, k);
            let da = phi.partial(&a);
            (a, c, da)
        })
        .filter(|t| !t.2.is_zero())
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    let polar = PolarRule::new(d, radius, settings.radial, settings.angular)?;
    let gl = GaussLegendre::new(settings.line);
    let mut omega = vec![0.0; d];
    let mut p = vec![0.0; d];
    let mut total = 0.0;
    for (x, w) in polar.iter() {
        let rho = polar_of(x, &mut omega);
        let mut phi_r = 0.0;
        for (s, ws) in radial_weights(rho, d, k, radius, &gl) {
            for (pi, o) in p.iter_mut().zip(&omega) {
                *pi = s * o;
            }
            phi_r += ws * f.eval(&p);
        }
        if phi_r == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (a, c, da) in &terms {
            inner += c * a.monomial(&omega) * da.eval(x);
        }
        total += w * phi_r * inner;
    }
    Ok(total)
}

/// `Σ_{(β,γ)} (−1)^{|β|}/γ! ∫ [ℛf]_{βγ}(x) (D_x^β D_y^γ φ)(x, 0) dx`.
fn x_remainder_pairing(
    f: &dyn ScalarField,
    phi: &PolyGaussian,
    split: DimensionSplit,
    k: u32,
    rule: DecompositionRule,
    radius: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    let (m, n) = (split.m(), split.n());
    let groups = rule.x_remainder_groups(split, k);
    let gammas: Vec<MultiIndex> = groups.iter().map(|g| g.0.clone()).collect();
    // per group: (|β|, [(β, coefficient, D^{βγ}φ(·, 0))])
    let mut plan: Vec<(u32, Vec<(MultiIndex, f64, PolyGaussian)>)> = Vec::new();
    for (g, b) in &groups {
        let mut items = Vec::new();
        for beta in MultiIndex::of_order(m, *b) {
            let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign / g.factorial() * remainder_coefficient(&beta, b - 1);
            let psi = phi.partial(&beta.concat(g)).restrict_tail(&vec![0.0; n]);
            if !psi.is_zero() {
                items.push((beta, c, psi));
            }
        }
        plan.push((*b, items));
    }
    if plan.iter().all(|p| p.1.is_empty()) {
        return Ok(0.0);
    }
    let polar = PolarRule::new(m, radius, settings.radial, settings.angular)?;
    let gl = GaussLegendre::new(settings.line);
    let yrule = settings.box_rule(n, radius)?;
    let mut omega = vec![0.0; m];
    let mut p = vec![0.0; m];
    let mut buf = Vec::new();
    let mut total = 0.0;
    for (x, w) in polar.iter() {
        let rho = polar_of(x, &mut omega);
        if rho >= radius {
            continue;
        }
        // y-moments at every radial node, shared by all groups
        let nodes: Vec<(f64, f64)> = gl.on(rho, radius).collect();
        let mut moms = vec![vec![0.0; gammas.len()]; nodes.len()];
        for (j, &(s, _)) in nodes.iter().enumerate() {
            for (pi, o) in p.iter_mut().zip(&omega) {
                *pi = s * o;
            }
            y_moments_at(f, &p, &gammas, &yrule, &mut buf, &mut moms[j]);
        }
        for (gi, (b, items)) in plan.iter().enumerate() {
            if items.is_empty() {
                continue;
            }
            let weights = radial_weights(rho, m, b - 1, radius, &gl);
            let psi_r: f64 = weights.iter().zip(&moms).map(|((_, ws), mv)| ws * mv[gi]).sum();
            let mut inner = 0.0;
            for (beta, c, psi) in items {
                inner += c * beta.monomial(&omega) * psi.eval(x);
            }
            total += w * psi_r * inner;
        }
    }
    Ok(total)
}

/// `Σ_{|γ|=k'+1} (−1)^{|γ|} ∫ F_γ D_y^γ φ`.
fn y_remainder_pairing(
    f: &dyn ScalarField,
    phi: &PolyGaussian,
    split: DimensionSplit,
    kp: u32,
    radius: f64,
    settings: &QuadSettings,
) -> Result<f64> {
    let (m, n) = (split.m(), split.n());
    let sign = if (kp + 1) % 2 == 0 { 1.0 } else { -1.0 };
    let terms: Vec<(MultiIndex, f64, PolyGaussian)> = MultiIndex::of_order(n, kp + 1)
        .into_iter()
        .map(|g| {
            let c = sign * remainder_coefficient(&g, kp);
            let dg = phi.partial(&MultiIndex::zeros(m).concat(&g));
            (g, c, dg)
        })
        .filter(|t| !t.2.is_zero())
        .collect();
    if terms.is_empty() {
        return Ok(0.0);
    }
    let xrule = settings.box_rule(m, radius)?;
    let polar = PolarRule::new(n, radius, settings.radial, settings.angular)?;
    let gl = GaussLegendre::new(settings.line);
    let mut omega = vec![0.0; n];
    let mut z = vec![0.0; m + n];
    let mut p = vec![0.0; m + n];
    let mut total = 0.0;
    for (x, wx) in xrule.iter() {
        z[..m].copy_from_slice(x);
        p[..m].copy_from_slice(x);
        for (y, wy) in polar.iter() {
            let rho = polar_of(y, &mut omega);
            let mut phi_r = 0.0;
            for (s, ws) in radial_weights(rho, n, kp, radius, &gl) {
                for (pi, o) in p[m..].iter_mut().zip(&omega) {
                    *pi = s * o;
                }
                phi_r += ws * f.eval(&p);
            }
            if phi_r == 0.0 {
                continue;
            }
            z[m..].copy_from_slice(y);
            let mut inner = 0.0;
            for (g, c, dg) in &terms {
                inner += c * g.monomial(&omega) * dg.eval(&z);
            }
            total += wx * wy * phi_r * inner;
        }
    }
    Ok(total)
}
