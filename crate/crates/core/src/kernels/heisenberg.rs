//! The heat kernel of the Heisenberg sub-Laplacian `Σ Z_j²`,
//!
//! `H(z, θ) = (4π)^{−(n+1)} ∫ (2σ/sinh 2σ)ⁿ exp(iσθ/2 − |z|² σ coth(2σ)/2) dσ`,
//!
//! and `H_t(z, θ) = t^{−(n+1)} H(z/√t, θ/t)`. Everything is expressed through
//! the profiles `F_{a,b}(ρ, θ) = ∂_ρ^a ∂_θ^b F` where `H = F(|z|², θ)`.

use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::numeric::interp::cubic_weights;
use crate::numeric::{Grid, GridFunction};

/// Trapezoid rule in σ on `[−S, S]`.
#[derive(Clone, Debug)]
pub struct SigmaQuadrature {
    n: usize,
    step: f64,
    sigma: Vec<f64>,
    /// `Δσ · (2σ/sinh 2σ)ⁿ`, with end weights halved.
    weight: Vec<f64>,
    /// `σ coth(2σ) / 2`.
    rate: Vec<f64>,
}

impl SigmaQuadrature {
    pub const DEFAULT_NODES: usize = 512;

    /// `S = max(20, 20/n)` keeps the neglected tail below `e^{−40}`.
    pub fn new(n: usize, nodes: usize) -> Result<Self> {
        Self::with_radius(n, nodes, 20.0f64.max(20.0 / n as f64))
    }

    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, Self::DEFAULT_NODES)
    }

    pub fn with_radius(n: usize, nodes: usize, radius: f64) -> Result<Self> {
        if n == 0 {
            return arg_err("heisenberg dimension n must be ≥ 1");
        }
        if nodes < 64 || nodes % 2 == 1 {
            return arg_err(format!("σ-quadrature needs an even node count ≥ 64, got {nodes}"));
        }
        if !(radius > 0.0) {
            return arg_err("σ-quadrature radius must be positive");
        }
        let step = 2.0 * radius / nodes as f64;
        let half = (nodes / 2) as i64;
        let mut sigma = Vec::with_capacity(nodes + 1);
        let mut weight = Vec::with_capacity(nodes + 1);
        let mut rate = Vec::with_capacity(nodes + 1);
        for q in -half..=half {
            let s = q as f64 * step;
            let (w, c) = if s.abs() < 1e-8 {
                (1.0, 0.25)
            } else {
                let two = 2.0 * s;
                (two / two.sinh(), s / two.tanh() / 2.0)
            };
            let end = if q.abs() == half { 0.5 } else { 1.0 };
            sigma.push(s);
            weight.push(end * step * w.powi(n as i32));
            rate.push(c);
        }
        Ok(SigmaQuadrature { n, step, sigma, weight, rate })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.sigma
    }

    /// Largest `|θ|` (at unit time) free of trapezoid aliasing. The rule is
    /// periodic in θ with period `4π/Δσ`, and the kernel needs `|θ| ≈ 70`
    /// to fall below `1e-14` of its peak uniformly in `ρ`.
    pub fn theta_limit(&self) -> f64 {
        4.0 * PI / self.step - 70.0
    }

    fn norm(&self) -> f64 {
        (4.0 * PI).powi(-(self.n as i32 + 1))
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        if theta.abs() > self.theta_limit() {
            return Err(Error::Quadrature(format!(
                "|θ| = {:.3} exceeds the aliasing-free range {:.3} of a {}-node σ rule",
                theta.abs(),
                self.theta_limit(),
                self.len() - 1
            )));
        }
        Ok(())
    }

    /// `F_{a,b}(ρ, θ)`, its imaginary companion (which vanishes by symmetry
    /// of the nodes) and the sum of absolute terms.
    pub fn profile_complex(&self, rho: f64, theta: f64, a: u32, b: u32) -> Result<(f64, f64, f64)> {
        self.check_theta(theta)?;
        let (mut re, mut im, mut mag) = (0.0, 0.0, 0.0);
        for q in 0..self.len() {
            let s = self.sigma[q];
            let c = self.rate[q];
            let amp = self.weight[q] * (-c).powi(a as i32) * (-rho * c).exp() * (s / 2.0).powi(b as i32);
            // (i)^b · e^{iσθ/2}
            let ph = s * theta / 2.0 + b as f64 * PI / 2.0;
            re += amp * ph.cos();
            im += amp * ph.sin();
            mag += amp.abs();
        }
        let nrm = self.norm();
        Ok((re * nrm, im * nrm, mag * nrm))
    }

    pub fn profile(&self, rho: f64, theta: f64, a: u32, b: u32) -> Result<f64> {
        let (re, im, mag) = self.profile_complex(rho, theta, a, b)?;
        if im.abs() > 1e-12 * mag {
            return Err(Error::Quadrature(format!("imaginary residue {im:.3e} in σ-integral")));
        }
        Ok(re)
    }

    /// `F_{a,b}` on a tensor grid of `ρ` and `θ` values, as a `ρ × θ` matrix.
    pub fn profile_matrix(&self, rhos: &[f64], thetas: &[f64], a: u32, b: u32) -> Result<Array2<f64>> {
        if let Some(&th) = thetas.iter().max_by(|x, y| x.abs().total_cmp(&y.abs())) {
            self.check_theta(th)?;
        }
        let q = self.len();
        let sign = match b % 4 {
            0 | 3 => 1.0,
            _ => -1.0,
        };
        let norm = self.norm() * sign;
        let left = Array2::from_shape_fn((rhos.len(), q), |(i, k)| {
            let c = self.rate[k];
            norm * self.weight[k] * (-c).powi(a as i32) * (-rhos[i] * c).exp() * (self.sigma[k] / 2.0).powi(b as i32)
        });
        let right = Array2::from_shape_fn((q, thetas.len()), |(k, j)| {
            let ph = self.sigma[k] * thetas[j] / 2.0;
            if b % 2 == 0 {
                ph.cos()
            } else {
                ph.sin()
            }
        });
        Ok(left.dot(&right))
    }
}

/// Operators applied to the kernel. Indices are zero-based: `Z(j)` for
/// `j < n` is `∂_{z_j} + 2z_{n+j}∂_θ` and for `j ≥ n` is `∂_{z_j} − 2z_{j−n}∂_θ`.
/// `Y(j)` are the right-invariant fields, with the opposite sign on `∂_θ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HField {
    Identity,
    Z(usize),
    Y(usize),
    Theta,
    ZZ(usize, usize),
}

impl HField {
    /// Degree of homogeneity under `δ_λ`.
    pub fn degree(&self) -> u32 {
        match self {
            HField::Identity => 0,
            HField::Z(_) | HField::Y(_) => 1,
            HField::Theta | HField::ZZ(..) => 2,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = |j: usize| j < 2 * n;
        let good = match *self {
            HField::Z(j) | HField::Y(j) => ok(j),
            HField::ZZ(j, k) => ok(j) && ok(k),
            _ => true,
        };
        if good {
            Ok(())
        } else {
            arg_err(format!("field {self:?} has an index outside 0..{}", 2 * n))
        }
    }

    /// Profiles `(a, b)` the field needs.
    pub fn profiles(&self) -> &'static [(u32, u32)] {
        match self {
            HField::Identity => &[(0, 0)],
            HField::Z(_) | HField::Y(_) => &[(1, 0), (0, 1)],
            HField::Theta => &[(0, 1)],
            HField::ZZ(..) => &[(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)],
        }
    }

    /// Combines profile values (in the order of [`HField::profiles`]) into
    /// the field applied to `F(|z|², θ)`, at unit time.
    pub fn combine(&self, n: usize, z: &[f64], p: &[f64]) -> f64 {
        let partner = |j: usize| if j < n { (j + n, 1.0) } else { (j - n, -1.0) };
        match *self {
            HField::Identity => p[0],
            HField::Theta => p[0],
            HField::Z(j) | HField::Y(j) => {
                let (jb, e) = partner(j);
                let s = if matches!(self, HField::Z(_)) { 1.0 } else { -1.0 };
                2.0 * z[j] * p[0] + 2.0 * s * e * z[jb] * p[1]
            }
            HField::ZZ(j, k) => {
                let (f_r, f_t, f_rr, f_rt, f_tt) = (p[0], p[1], p[2], p[3], p[4]);
                let (jb, ej) = partner(j);
                let (kb, ek) = partner(k);
                let mut v = 4.0 * z[j] * z[k] * f_rr
                    + 4.0 * (ek * z[kb] * z[j] + ej * z[jb] * z[k]) * f_rt
                    + 4.0 * ej * ek * z[jb] * z[kb] * f_tt;
                if j == k {
                    v += 2.0 * f_r;
                }
                if j == kb {
                    v += 2.0 * ek * f_t;
                }
                v
            }
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return arg_err(format!("time must be positive, got {t}"));
    }
    Ok(())
}

fn check_point(z: &[f64], quad: &SigmaQuadrature) -> Result<()> {
    if z.len() != 2 * quad.n() {
        return arg_err(format!("z has {} coordinates, expected {}", z.len(), 2 * quad.n()));
    }
    Ok(())
}

/// `H(z, θ)`.
pub fn heisenberg_kernel(z: &[f64], theta: f64, quad: &SigmaQuadrature) -> Result<f64> {
    check_point(z, quad)?;
    quad.profile(z.iter().map(|v| v * v).sum(), theta, 0, 0)
}

/// `H_t(z, θ) = t^{−(n+1)} H(z/√t, θ/t)`.
pub fn heisenberg_kernel_t(z: &[f64], theta: f64, t: f64, quad: &SigmaQuadrature) -> Result<f64> {
    heisenberg_kernel_derivative(HField::Identity, z, theta, t, quad)
}

/// `(P H_t)(z, θ)` for a field `P`, from analytic σ-integrals.
pub fn heisenberg_kernel_derivative(
    field: HField,
    z: &[f64],
    theta: f64,
    t: f64,
    quad: &SigmaQuadrature,
) -> Result<f64> {
    check_t(t)?;
    check_point(z, quad)?;
    let n = quad.n();
    field.validate(n)?;
    let st = t.sqrt();
    let zs: Vec<f64> = z.iter().map(|v| v / st).collect();
    let rho: f64 = zs.iter().map(|v| v * v).sum();
    let th = theta / t;
    let mut p = [0.0; 5];
    for (slot, &(a, b)) in field.profiles().iter().enumerate() {
        p[slot] = quad.profile(rho, th, a, b)?;
    }
    Ok(time_factor(n, field, t) * field.combine(n, &zs, &p))
}

fn time_factor(n: usize, field: HField, t: f64) -> f64 {
    t.powf(-(n as f64 + 1.0) - field.degree() as f64 / 2.0)
}

/// `P H_t` on every node of a `(2n+1)`-axis grid whose last axis is θ.
pub fn heisenberg_on_grid(field: HField, grid: &Grid, t: f64, quad: &SigmaQuadrature) -> Result<GridFunction> {
    check_t(t)?;
    let n = quad.n();
    field.validate(n)?;
    if grid.dims() != 2 * n + 1 {
        return arg_err(format!("grid has {} axes, the group has {}", grid.dims(), 2 * n + 1));
    }
    let zgrid = grid.sub_grid(0..2 * n);
    let st = t.sqrt();
    let zs: Vec<Vec<f64>> = (0..zgrid.len()).map(|i| zgrid.coords(i).iter().map(|v| v / st).collect()).collect();
    let rhos: Vec<f64> = zs.iter().map(|z| z.iter().map(|v| v * v).sum()).collect();
    let thetas: Vec<f64> = grid.axis_nodes(2 * n).iter().map(|v| v / t).collect();
    let mats = field
        .profiles()
        .iter()
        .map(|&(a, b)| quad.profile_matrix(&rhos, &thetas, a, b))
        .collect::<Result<Vec<_>>>()?;
    let tf = time_factor(n, field, t);
    let nt = thetas.len();
    let mut values = vec![0.0; grid.len()];
    let mut p = [0.0; 5];
    for (i, z) in zs.iter().enumerate() {
        for j in 0..nt {
            for (slot, m) in mats.iter().enumerate() {
                p[slot] = m[[i, j]];
            }
            values[i * nt + j] = tf * field.combine(n, z, &p);
        }
    }
    GridFunction::new(grid.clone(), values)
}

/// A kernel on the group that can be evaluated at time `t`.
pub trait GroupKernel: Sync {
    fn n(&self) -> usize;

    fn eval(&self, z: &[f64], theta: f64, t: f64) -> Result<f64>;

    /// Succeeds if every argument with `|z| ≤ z_max` and `|θ| ≤ θ_max` can
    /// be evaluated at time `t`.
    fn check_reach(&self, z_max: f64, theta_max: f64, t: f64) -> Result<()>;
}

/// Direct evaluation through the σ-integral.
#[derive(Clone, Debug)]
pub struct HKernel {
    pub field: HField,
    pub quad: SigmaQuadrature,
}

impl HKernel {
    pub fn new(field: HField, quad: SigmaQuadrature) -> Result<Self> {
        field.validate(quad.n())?;
        Ok(HKernel { field, quad })
    }
}

impl GroupKernel for HKernel {
    fn n(&self) -> usize {
        self.quad.n()
    }

    fn eval(&self, z: &[f64], theta: f64, t: f64) -> Result<f64> {
        heisenberg_kernel_derivative(self.field, z, theta, t, &self.quad)
    }

    fn check_reach(&self, _z_max: f64, theta_max: f64, t: f64) -> Result<()> {
        self.quad.check_theta(theta_max / t)
    }
}

/// Resolution and extent of a [`KernelTable`], in unit-time variables.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableSpec {
    pub d_rho: f64,
    pub d_theta: f64,
    pub rho_max: f64,
    pub theta_max: f64,
    pub sigma_nodes: usize,
}

impl Default for TableSpec {
    fn default() -> Self {
        TableSpec { d_rho: 0.1, d_theta: 0.05, rho_max: 160.0, theta_max: 80.0, sigma_nodes: 800 }
    }
}

/// Profiles of `P H` tabulated over `(ρ, θ)` with bicubic interpolation.
///
/// Only `θ ≥ 0` is stored; `F_{a,b}` is even or odd in θ with `b`.
#[derive(Clone, Debug)]
pub struct KernelTable {
    n: usize,
    field: HField,
    spec: TableSpec,
    n_rho: usize,
    n_theta: usize,
    tables: Vec<Vec<f64>>,
    certified: bool,
}

impl KernelTable {
    pub fn new(n: usize, field: HField, spec: TableSpec) -> Result<Self> {
        field.validate(n)?;
        if !(spec.d_rho > 0.0 && spec.d_theta > 0.0 && spec.rho_max > 0.0 && spec.theta_max > 0.0) {
            return arg_err("table spacings and extents must be positive");
        }
        let quad = SigmaQuadrature::new(n, spec.sigma_nodes)?;
        // two extra nodes on each side keep the 4-point stencil inside
        let n_rho = (spec.rho_max / spec.d_rho).ceil() as usize + 5;
        let n_theta = (spec.theta_max / spec.d_theta).ceil() as usize + 5;
        let rhos: Vec<f64> = (0..n_rho).map(|i| (i as f64 - 2.0) * spec.d_rho).collect();
        let thetas: Vec<f64> = (0..n_theta).map(|j| (j as f64 - 2.0) * spec.d_theta).collect();
        let tables = field
            .profiles()
            .iter()
            .map(|&(a, b)| quad.profile_matrix(&rhos, &thetas, a, b).map(|m| m.into_raw_vec_and_offset().0))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelTable { n, field, spec, n_rho, n_theta, tables, certified: false })
    }

    pub fn field(&self) -> HField {
        self.field
    }

    pub fn spec(&self) -> &TableSpec {
        &self.spec
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Checks that every profile is below `tol · peak` along the outer
    /// edges `ρ = ρ_max` and `θ = θ_max`. A certified table evaluates to 0
    /// outside its box instead of failing.
    pub fn certify(&mut self, tol: f64) -> Result<()> {
        let i_edge = self.n_rho - 3;
        let j_edge = self.n_theta - 3;
        for (slot, tab) in self.tables.iter().enumerate() {
            let peak = tab.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let mut edge = 0.0f64;
            for j in 0..self.n_theta {
                edge = edge.max(tab[i_edge * self.n_theta + j].abs());
            }
            for i in 0..self.n_rho {
                edge = edge.max(tab[i * self.n_theta + j_edge].abs());
            }
            if edge > tol * peak {
                return Err(Error::TableDomain(format!(
                    "profile {:?} is {:.3e} of its peak on the table edge, above {tol:.1e}",
                    self.field.profiles()[slot],
                    edge / peak
                )));
            }
        }
        self.certified = true;
        Ok(())
    }

    fn covers_unit(&self, rho: f64, theta_abs: f64) -> bool {
        rho <= self.spec.rho_max && theta_abs <= self.spec.theta_max
    }

    /// Interpolated profile values at unit time; `None` outside the box.
    fn profiles_at(&self, rho: f64, theta: f64, out: &mut [f64]) -> bool {
        let th = theta.abs();
        if !self.covers_unit(rho, th) {
            return false;
        }
        let u = rho / self.spec.d_rho + 2.0;
        let v = th / self.spec.d_theta + 2.0;
        let i0 = u.floor();
        let j0 = v.floor();
        let wu = cubic_weights(u - i0);
        let wv = cubic_weights(v - j0);
        let i0 = i0 as usize - 1;
        let j0 = j0 as usize - 1;
        for (slot, tab) in self.tables.iter().enumerate() {
            let mut acc = 0.0;
            for (a, wa) in wu.iter().enumerate() {
                let row = &tab[(i0 + a) * self.n_theta + j0..(i0 + a) * self.n_theta + j0 + 4];
                acc += wa * (wv[0] * row[0] + wv[1] * row[1] + wv[2] * row[2] + wv[3] * row[3]);
            }
            let b = self.field.profiles()[slot].1;
            out[slot] = if b % 2 == 1 && theta < 0.0 { -acc } else { acc };
        }
        true
    }
}

impl GroupKernel for KernelTable {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &[f64], theta: f64, t: f64) -> Result<f64> {
        let st = t.sqrt();
        let mut zs = [0.0; 16];
        let zs = &mut zs[..z.len()];
        let mut rho = 0.0;
        for (o, v) in zs.iter_mut().zip(z) {
            *o = v / st;
            rho += *o * *o;
        }
        let mut p = [0.0; 5];
        if !self.profiles_at(rho, theta / t, &mut p) {
            if self.certified {
                return Ok(0.0);
            }
            return Err(Error::TableDomain(format!(
                "argument (|z|² = {:.3}, θ = {:.3}) at t = {t} lies outside the kernel table",
                rho * t,
                theta
            )));
        }
        Ok(time_factor(self.n, self.field, t) * self.field.combine(self.n, zs, &p))
    }

    fn check_reach(&self, z_max: f64, theta_max: f64, t: f64) -> Result<()> {
        if self.certified || self.covers_unit(z_max * z_max / t, theta_max / t) {
            Ok(())
        } else {
            Err(Error::TableDomain(format!(
                "reachable box |z| ≤ {z_max:.3}, |θ| ≤ {theta_max:.3} at t = {t} exceeds the uncertified table"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quad_integral;

    #[test]
    fn value_at_origin_and_symmetry() {
        let q = SigmaQuadrature::standard(1).unwrap();
        let h0 = heisenberg_kernel(&[0.0, 0.0], 0.0, &q).unwrap();
        assert!((h0 - 0.015625).abs() < 1e-4, "{h0}");
        for &(x, y, th) in &[(0.3, -0.2, 1.1), (1.5, 0.4, 3.0)] {
            let a = heisenberg_kernel(&[x, y], th, &q).unwrap();
            let b = heisenberg_kernel(&[x, y], -th, &q).unwrap();
            assert!((a - b).abs() < 1e-16);
        }
        assert!(heisenberg_kernel(&[12.0, 0.0], 0.0, &q).unwrap().abs() < 1e-12);
    }

    #[test]
    fn grid_evaluation_matches_pointwise() {
        let q = SigmaQuadrature::standard(1).unwrap();
        let g = Grid::new(vec![3.0, 3.0, 6.0], vec![8, 8, 8]).unwrap();
        for field in [HField::Identity, HField::Z(1), HField::Theta, HField::ZZ(0, 1)] {
            let gf = heisenberg_on_grid(field, &g, 1.7, &q).unwrap();
            for i in [0, 77, 300, 511] {
                let c = g.coords(i);
                let v = heisenberg_kernel_derivative(field, &c[..2], c[2], 1.7, &q).unwrap();
                assert!((gf.values()[i] - v).abs() < 1e-15, "{field:?}");
            }
        }
    }

    #[test]
    fn unit_mass() {
        let q = SigmaQuadrature::standard(1).unwrap();
        let g = Grid::new(vec![10.0, 10.0, 40.0], vec![96, 96, 96]).unwrap();
        let h = heisenberg_on_grid(HField::Identity, &g, 1.0, &q).unwrap();
        assert!((quad_integral(&h).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn table_matches_direct_evaluation() {
        let spec = TableSpec { rho_max: 40.0, theta_max: 30.0, ..TableSpec::default() };
        let tab = KernelTable::new(1, HField::Z(0), spec).unwrap();
        let q = SigmaQuadrature::new(1, 400).unwrap();
        for &(x, y, th, t) in &[(0.3, -0.7, 0.4, 1.0), (1.2, 0.5, -2.5, 2.0), (-2.0, 1.0, 5.0, 4.0)] {
            let a = tab.eval(&[x, y], th, t).unwrap();
            let b = heisenberg_kernel_derivative(HField::Z(0), &[x, y], th, t, &q).unwrap();
            assert!((a - b).abs() < 1e-7 * 0.02, "{a} vs {b}");
        }
        assert!(matches!(tab.eval(&[10.0, 0.0], 0.0, 1.0), Err(Error::TableDomain(_))));
    }

    #[test]
    fn aliasing_guard() {
        let q = SigmaQuadrature::standard(1).unwrap();
        assert!(matches!(heisenberg_kernel(&[0.0, 0.0], 100.0, &q), Err(Error::Quadrature(_))));
        assert!(SigmaQuadrature::new(1, 32).is_err());
    }
}
