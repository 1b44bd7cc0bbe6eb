//! One-dimensional Gauss–Legendre rules and a polar product rule for
//! integrands with an integrable point singularity at the origin.

use std::f64::consts::PI;

use crate::error::{arg_err, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Product rule `∫_{ℝ^d} g = ∫_{S^{d-1}} ∫_0^R g(rω) r^{d-1} dr dω` for
/// `d ∈ {1, 2, 3}`. The weights include `r^{d-1}`, so integrands that blow
/// up like `|z|^{1-d}` at the origin are integrated accurately.
#[derive(Clone, Debug)]
pub struct PolarRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl PolarRule {
    /// `radial` Gauss–Legendre nodes on `[0, radius]`; `angular` controls
    /// the resolution on the sphere (ignored for `d = 1`).
    pub fn new(dim: usize, radius: f64, radial: usize, angular: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return arg_err(format!("polar rule supports dimensions 1..=3, got {dim}"));
        }
        if !(radius > 0.0) {
            return arg_err("polar rule radius must be positive");
        }
        let directions: Vec<(Vec<f64>, f64)> = match dim {
            1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
            2 => (0..angular)
                .map(|j| {
                    let phi = 2.0 * PI * (j as f64 + 0.5) / angular as f64;
                    (vec![phi.cos(), phi.sin()], 2.0 * PI / angular as f64)
                })
                .collect(),
            _ => {
                let gl = GaussLegendre::new(angular);
                let n_phi = 2 * angular;
                let mut dirs = Vec::with_capacity(angular * n_phi);
                for (c, wc) in gl.on(-1.0, 1.0) {
                    let s = (1.0 - c * c).sqrt();
                    for j in 0..n_phi {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / n_phi as f64;
                        dirs.push((vec![s * phi.cos(), s * phi.sin(), c], wc * 2.0 * PI / n_phi as f64));
                    }
                }
                dirs
            }
        };
        let gl = GaussLegendre::new(radial);
        let radial_nodes: Vec<(f64, f64)> = gl.on(0.0, radius).collect();
        let mut points = Vec::with_capacity(dim * directions.len() * radial);
        let mut weights = Vec::with_capacity(directions.len() * radial);
        for (omega, wo) in &directions {
            for &(r, wr) in &radial_nodes {
                points.extend(omega.iter().map(|o| o * r));
                weights.push(wo * wr * r.powi(dim as i32 - 1));
            }
        }
        Ok(Self { dim, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.chunks(self.dim).zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Tensor Gauss–Legendre rule on the cube `[−R, R]^d`.
#[derive(Clone, Debug)]
pub struct BoxRule {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl BoxRule {
    pub fn new(dim: usize, radius: f64, nodes: usize) -> Result<Self> {
        if dim == 0 {
            return Ok(Self { dim, points: Vec::new(), weights: vec![1.0] });
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return arg_err(format!("box rule radius must be positive and finite, got {radius}"));
        }
        let line: Vec<(f64, f64)> = GaussLegendre::new(nodes).on(-radius, radius).collect();
        let total = nodes.pow(dim as u32);
        let mut points = Vec::with_capacity(total * dim);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            let mut w = 1.0;
            for &i in &idx {
                points.push(line[i].0);
                w *= line[i].1;
            }
            weights.push(w);
            for a in (0..dim).rev() {
                idx[a] += 1;
                if idx[a] < nodes {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Self { dim, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Points and weights; a zero-dimensional rule has one empty point.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        let d = self.dim;
        self.weights.iter().enumerate().map(move |(i, &w)| (&self.points[i * d..(i + 1) * d], w))
    }

    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_rule_gaussian() {
        let r = BoxRule::new(2, 8.0, 64).unwrap();
        let v = r.integrate(|z| (-z[0] * z[0] - 2.0 * z[1] * z[1]).exp());
        assert!((v - PI / 2f64.sqrt()).abs() < 1e-12);
        let empty = BoxRule::new(0, 1.0, 8).unwrap();
        assert_eq!(empty.integrate(|_| 3.0), 3.0);
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let gl = GaussLegendre::new(5);
        // exact up to degree 9
        for deg in 0..=9 {
            let q = gl.integrate(-1.0, 1.0, |x| x.powi(deg));
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
        let q = gl.integrate(0.0, 2.0, |x| x * x);
        assert!((q - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_large_rule() {
        let gl = GaussLegendre::new(96);
        let w: f64 = gl.on(-1.0, 1.0).map(|(_, w)| w).sum();
        assert!((w - 2.0).abs() < 1e-13);
        let q = gl.integrate(0.0, PI, f64::sin);
        assert!((q - 2.0).abs() < 1e-13);
    }

    #[test]
    fn polar_rule_gaussians() {
        for dim in 1..=3 {
            let rule = PolarRule::new(dim, 8.0, 64, 16).unwrap();
            let q = rule.integrate(|z| (-z.iter().map(|x| x * x).sum::<f64>()).exp());
            let exact = PI.powf(dim as f64 / 2.0);
            assert!((q - exact).abs() < 1e-12, "dim {dim}: {q}");
        }
    }

    #[test]
    fn polar_rule_singular_weight() {
        // ∫_{ℝ²} |z|^{-1} e^{-|z|²} dz = π^{3/2}
        let rule = PolarRule::new(2, 8.0, 64, 8).unwrap();
        let q = rule.integrate(|z| (z[0].hypot(z[1])).recip() * (-(z[0] * z[0] + z[1] * z[1])).exp());
        assert!((q - PI.powf(1.5)).abs() < 1e-12);
    }
}
