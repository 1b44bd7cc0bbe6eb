//! Moment-expansion approximants of heat flows and their errors.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};
use crate::field::{sample, ScalarField};
use crate::heisenberg::{h_convolve, h_solution_grid, HGridFunction};
use crate::kernels::{
    fft_solve, heisenberg_on_grid, kernel_derivative, kernel_grid, HField, KernelSpec, KernelTable, SigmaQuadrature,
    TableSpec,
};
use crate::moments::MomentTable;
use crate::numeric::{weighted_lp_norm, DimensionSplit, Grid, GridFunction, MultiIndex, WeightSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionKind {
    /// `|α| ≤ k`
    IsotropicFull,
    /// `|(β,γ)| ≤ k`, the same index set read in split variables
    SplitFull,
    /// `|β| + 2|γ| ≤ k`
    MixedOrder,
    /// mass and first z-moments on `ℍⁿ`
    HeisenbergFirstOrder,
}

/// Which first-order fields multiply the z-moments on `ℍⁿ`.
///
/// `u = f∗H_t` expands as `(∫f)H_t − Σ(∫z_j f) Y_j H_t` with the
/// right-invariant `Y_j`; the left-invariant `Z_j` leave an error of order
/// `t^{-1/2}` whenever a first moment is nonzero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstOrderFields {
    #[default]
    RightInvariant,
    LeftInvariant,
}

impl FirstOrderFields {
    pub fn field(&self, j: usize) -> HField {
        match self {
            FirstOrderFields::RightInvariant => HField::Y(j),
            FirstOrderFields::LeftInvariant => HField::Z(j),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRule {
    pub kind: ExpansionKind,
    pub k: u32,
    /// Exponent of the `L^p` norm the error is measured in.
    pub p: f64,
    #[serde(default)]
    pub fields: FirstOrderFields,
}

impl ExpansionRule {
    pub fn new(kind: ExpansionKind, k: u32, p: f64) -> Self {
        ExpansionRule { kind, k, p, fields: FirstOrderFields::default() }
    }

    /// Checks the rule against the kernel family.
    pub fn validate(&self, spec: &KernelSpec) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return arg_err(format!("p must satisfy 1 ≤ p < ∞, got {}", self.p));
        }
        let ok = matches!(
            (self.kind, spec),
            (ExpansionKind::IsotropicFull, KernelSpec::Isotropic { .. })
                | (ExpansionKind::IsotropicFull, KernelSpec::MixedOrder { .. })
                | (ExpansionKind::SplitFull, KernelSpec::MixedOrder { .. })
                | (ExpansionKind::MixedOrder, KernelSpec::MixedOrder { .. })
                | (ExpansionKind::HeisenbergFirstOrder, KernelSpec::Heisenberg { .. })
        );
        if !ok {
            return arg_err(format!("expansion rule {:?} does not apply to the {spec:?} kernel", self.kind));
        }
        if self.kind == ExpansionKind::HeisenbergFirstOrder && self.k != 1 {
            return arg_err("the first-order expansion on ℍⁿ has k = 1");
        }
        Ok(())
    }

    /// Moment indices over all variables of the kernel family.
    pub fn indices(&self, spec: &KernelSpec) -> Result<Vec<MultiIndex>> {
        self.validate(spec)?;
        let dims = spec.dims();
        Ok(match self.kind {
            ExpansionKind::IsotropicFull | ExpansionKind::SplitFull => MultiIndex::up_to(dims, self.k),
            ExpansionKind::MixedOrder => {
                let m = spec.split().map(|s| s.m()).unwrap_or(dims);
                MultiIndex::up_to(dims, self.k)
                    .into_iter()
                    .filter(|a| {
                        let (b, g) = a.split_at(m);
                        b.order() + 2 * g.order() <= self.k
                    })
                    .collect()
            }
            ExpansionKind::HeisenbergFirstOrder => {
                let mut v = vec![MultiIndex::zeros(dims)];
                v.extend((0..dims - 1).map(|j| MultiIndex::unit(dims, j)));
                v
            }
        })
    }
}

/// Grid resolution of the expansion experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSettings {
    /// Largest node spacing for the spectral families.
    pub spacing: f64,
    /// Nodes across the kernel's own extent; the spacing never exceeds
    /// `2·extent/kernel_points`.
    pub kernel_points: usize,
    /// Multiplies every half-width of the spectral grids.
    pub extent_scale: f64,
    /// Node spacing of the data grid on `ℍⁿ`.
    pub source_spacing: f64,
    /// Half-width of the data grid on `ℍⁿ`.
    pub source_radius: f64,
    pub z_points: usize,
    pub theta_points: usize,
    /// Refuse spectral grids with more nodes than this.
    pub max_points: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            spacing: 0.25,
            kernel_points: 128,
            extent_scale: 1.0,
            source_spacing: 0.5,
            source_radius: 4.0,
            z_points: 32,
            theta_points: 32,
            max_points: 1 << 23,
        }
    }
}

impl GridSettings {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(pos(self.spacing) && pos(self.extent_scale) && pos(self.source_spacing) && pos(self.source_radius)) {
            return arg_err("grid spacings, radii and scales must be positive");
        }
        if self.kernel_points < 8 || self.z_points < 8 || self.theta_points < 8 {
            return arg_err("grid point counts must be at least 8");
        }
        Ok(())
    }
}

fn even_count(len: f64, h: f64) -> usize {
    let m = (len / h).ceil() as usize;
    (m + m % 2).max(8)
}

/// Grid for `u(·,t)` with `f` of decay radius `radius`: half-widths cover
/// the kernel's extent plus `radius`, and nodes sit on multiples of the
/// spacing so that enlarging the box keeps every old node.
pub fn expansion_grid(spec: &KernelSpec, t: f64, radius: f64, settings: &GridSettings) -> Result<Grid> {
    settings.validate()?;
    if !radius.is_finite() {
        return arg_err("initial data need a finite decay radius");
    }
    let kernel = kernel_grid(spec, t, settings.kernel_points)?;
    let mut extents = Vec::new();
    let mut points = Vec::new();
    for &e in kernel.extents() {
        let h = settings.spacing.min(2.0 * e / settings.kernel_points as f64);
        let m = even_count(2.0 * settings.extent_scale * (e + radius), h);
        extents.push(0.5 * m as f64 * h);
        points.push(m);
    }
    let total = points.iter().try_fold(1usize, |acc, &m| acc.checked_mul(m)).unwrap_or(usize::MAX);
    if total > settings.max_points {
        return arg_err(format!(
            "grid for t = {t} needs {total} nodes ({points:?}), above max_points = {}; raise spacing or shorten the time list",
            settings.max_points
        ));
    }
    Grid::new(extents, points)
}

/// Cube grid carrying the data on `ℍⁿ`.
pub fn source_grid(n: usize, settings: &GridSettings) -> Result<Grid> {
    settings.validate()?;
    let m = even_count(2.0 * settings.source_radius, settings.source_spacing);
    Grid::cube(2 * n + 1, 0.5 * m as f64 * settings.source_spacing, m)
}

/// Unit-time table of `H`, built once per `n` and shared.
pub fn identity_table(n: usize) -> Result<Arc<KernelTable>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<KernelTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("table cache").get(&n) {
        return Ok(t.clone());
    }
    let mut table = KernelTable::new(n, HField::Identity, TableSpec::default())?;
    table.certify(1e-12)?;
    let table = Arc::new(table);
    cache.lock().expect("table cache").insert(n, table.clone());
    Ok(table)
}

/// `u(·,t)` on `grid`. Spectral families use the FFT on `grid`; on `ℍⁿ`
/// the data are sampled on [`source_grid`] and convolved directly.
pub fn solve(f: &dyn ScalarField, spec: &KernelSpec, t: f64, grid: &Grid) -> Result<GridFunction> {
    spec.validate()?;
    match spec {
        KernelSpec::Heisenberg { n } => {
            let src = HGridFunction::sample(f, &source_grid(*n, &GridSettings::default())?)?;
            Ok(h_convolve(&src, &*identity_table(*n)?, t, grid)?.into_data())
        }
        _ => fft_solve(&sample(f, grid)?, spec, t),
    }
}

/// `Σ ((−1)^{|α|}/α!) m_α D^α G_t` on `grid` from a table of moments.
pub fn approximant_from_moments(
    moments: &MomentTable,
    spec: &KernelSpec,
    rule: &ExpansionRule,
    t: f64,
    grid: &Grid,
) -> Result<GridFunction> {
    let indices = rule.indices(spec)?;
    let mut out = GridFunction::zeros(grid.clone());
    if let KernelSpec::Heisenberg { n } = spec {
        let quad = SigmaQuadrature::standard(*n)?;
        for (slot, a) in indices.iter().enumerate() {
            let m = moments.get(a).ok_or_else(|| crate::Error::Argument(format!("moment {a} missing")))?;
            if m == 0.0 {
                continue;
            }
            let (field, c) = if slot == 0 { (HField::Identity, m) } else { (rule.fields.field(slot - 1), -m) };
            out.add_scaled(c, &heisenberg_on_grid(field, grid, t, &quad)?)?;
        }
        return Ok(out);
    }
    let m = spec.split().map(|s| s.m()).unwrap_or(spec.dims());
    for a in &indices {
        let mo = moments.get(a).ok_or_else(|| crate::Error::Argument(format!("moment {a} missing")))?;
        if mo == 0.0 {
            continue;
        }
        let (beta, gamma) = match spec {
            KernelSpec::MixedOrder { .. } => a.split_at(m),
            _ => (a.clone(), MultiIndex::zeros(0)),
        };
        let d = kernel_derivative(spec, &beta, &gamma, t, grid)?;
        out.add_scaled(a.sign() * mo / a.factorial(), &d)?;
    }
    Ok(out)
}

/// The approximant built from the moments of the sampled datum `f`.
pub fn build_approximant(
    f: &GridFunction,
    spec: &KernelSpec,
    rule: &ExpansionRule,
    t: f64,
    grid: &Grid,
) -> Result<GridFunction> {
    if f.grid().dims() != spec.dims() {
        return arg_err("datum and kernel dimensions differ");
    }
    let moments = MomentTable::from_grid(f, &rule.indices(spec)?)?;
    approximant_from_moments(&moments, spec, rule, t, grid)
}

/// One error sample together with the grid it was measured on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub t: f64,
    pub error: f64,
    pub grid: Grid,
}

/// `‖w·(u(t) − approximant)‖_{L^p}` with `p` from the rule.
pub fn expansion_error(
    f: &dyn ScalarField,
    spec: &KernelSpec,
    rule: &ExpansionRule,
    t: f64,
    weight: &WeightSpec,
    settings: &GridSettings,
) -> Result<ErrorSample> {
    rule.validate(spec)?;
    if f.dim() != spec.dims() {
        return arg_err(format!("datum has dimension {}, kernel {}", f.dim(), spec.dims()));
    }
    if let KernelSpec::Heisenberg { n } = spec {
        let src = HGridFunction::sample(f, &source_grid(*n, settings)?)?;
        return heisenberg_expansion_error(&src, rule, t, weight, settings);
    }
    let grid = expansion_grid(spec, t, f.radius(), settings)?;
    let fg = sample(f, &grid)?;
    let u = fft_solve(&fg, spec, t)?;
    let approx = build_approximant(&fg, spec, rule, t, &grid)?;
    let error = weighted_lp_norm(&u.sub(&approx)?, weight, rule.p)?;
    Ok(ErrorSample { t, error, grid })
}

/// The same on `ℍⁿ` for data already on a source grid.
pub fn heisenberg_expansion_error(
    src: &HGridFunction,
    rule: &ExpansionRule,
    t: f64,
    weight: &WeightSpec,
    settings: &GridSettings,
) -> Result<ErrorSample> {
    let n = src.n();
    let spec = KernelSpec::Heisenberg { n };
    rule.validate(&spec)?;
    let grid = h_solution_grid(n, t, settings.z_points, settings.theta_points)?;
    let u = h_convolve(src, &*identity_table(n)?, t, &grid)?.into_data();
    let approx = build_approximant(src.data(), &spec, rule, t, &grid)?;
    let error = weighted_lp_norm(&u.sub(&approx)?, weight, rule.p)?;
    Ok(ErrorSample { t, error, grid })
}

/// The split read off a mixed-order kernel.
pub fn spec_split(spec: &KernelSpec) -> Result<DimensionSplit> {
    spec.split().ok_or_else(|| crate::Error::Argument(format!("{spec:?} has no x/y split")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PolyGaussian;
    use crate::kernels::mixed_kernel;
    use crate::numeric::quad_integral;

    #[test]
    fn index_sets() {
        let s = DimensionSplit::new(1, 1).unwrap();
        let spec = KernelSpec::mixed(s);
        let mixed = ExpansionRule::new(ExpansionKind::MixedOrder, 2, 1.0).indices(&spec).unwrap();
        let full = ExpansionRule::new(ExpansionKind::SplitFull, 2, 1.0).indices(&spec).unwrap();
        // |β|+2|γ| ≤ 2 keeps 1, x, y, x²
        assert_eq!(mixed.len(), 4);
        assert!(mixed.iter().all(|a| full.contains(a)));
        assert_eq!(full.len(), 6);
        let h = ExpansionRule::new(ExpansionKind::HeisenbergFirstOrder, 1, 1.0);
        assert_eq!(h.indices(&KernelSpec::Heisenberg { n: 2 }).unwrap().len(), 5);
        assert!(h.indices(&spec).is_err());
        assert!(ExpansionRule::new(ExpansionKind::MixedOrder, 1, 1.0)
            .indices(&KernelSpec::Isotropic { dim: 2 })
            .is_err());
    }

    #[test]
    fn order_zero_of_unit_mass_is_the_kernel() {
        let spec = KernelSpec::Isotropic { dim: 2 };
        let grid = Grid::cube(2, 10.0, 64).unwrap();
        let mut f = GridFunction::zeros(grid.clone());
        f.values_mut()[32 * 64 + 32] = 1.0 / grid.cell_volume();
        let rule = ExpansionRule::new(ExpansionKind::IsotropicFull, 0, 1.0);
        let a = build_approximant(&f, &spec, &rule, 2.0, &grid).unwrap();
        let g = kernel_derivative(&spec, &MultiIndex::zeros(2), &MultiIndex::zeros(0), 2.0, &grid).unwrap();
        assert!(a.sub(&g).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn kernel_datum_has_no_first_order_correction() {
        // f = G_s: the first moments vanish, so the k = 1 approximant is G_t
        let s = DimensionSplit::new(1, 1).unwrap();
        let spec = KernelSpec::mixed(s);
        let settings = GridSettings::default();
        let grid = expansion_grid(&spec, 4.0, 20.0, &settings).unwrap();
        let f = mixed_kernel(&grid, s, 1.0).unwrap();
        let rule = ExpansionRule::new(ExpansionKind::MixedOrder, 1, 1.0);
        let approx = build_approximant(&f, &spec, &rule, 4.0, &grid).unwrap();
        let g = mixed_kernel(&grid, s, 4.0).unwrap();
        assert!(approx.sub(&g).unwrap().max_abs() < 1e-10 * g.max_abs());
        let u = fft_solve(&f, &spec, 4.0).unwrap();
        let g5 = mixed_kernel(&grid, s, 5.0).unwrap();
        assert!(u.sub(&g5).unwrap().max_abs() < 1e-10 * g5.max_abs());
    }

    #[test]
    fn solve_conserves_mass_and_is_a_semigroup() {
        let f = PolyGaussian::new(vec![(1.0, vec![0, 0]), (0.5, vec![1, 0])], vec![1.0, 0.8], vec![0.3, -0.2]).unwrap();
        for spec in [KernelSpec::Isotropic { dim: 2 }, KernelSpec::mixed(DimensionSplit::new(1, 1).unwrap())] {
            let grid = expansion_grid(&spec, 3.0, f.radius(), &GridSettings::default()).unwrap();
            let f0 = sample(&f, &grid).unwrap();
            let m0 = quad_integral(&f0).unwrap();
            let u1 = solve(&f, &spec, 1.0, &grid).unwrap();
            let u3 = solve(&f, &spec, 3.0, &grid).unwrap();
            assert!((quad_integral(&u3).unwrap() - m0).abs() < 1e-8 * m0.abs());
            let u12 = fft_solve(&u1, &spec, 2.0).unwrap();
            assert!(u12.sub(&u3).unwrap().max_abs() < 1e-8 * u3.max_abs());
        }
    }

    #[test]
    fn short_times_approach_the_datum() {
        let f = PolyGaussian::standard(2);
        let spec = KernelSpec::Isotropic { dim: 2 };
        let grid = Grid::cube(2, 8.0, 256).unwrap();
        let f0 = sample(&f, &grid).unwrap();
        let mut last = f64::INFINITY;
        for j in 1..6 {
            let u = solve(&f, &spec, 2f64.powi(-j), &grid).unwrap();
            let d = weighted_lp_norm(&u.sub(&f0).unwrap(), &WeightSpec::UNIT, 1.0).unwrap();
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn doubling_the_box_keeps_errors() {
        let f = PolyGaussian::new(vec![(1.0, vec![0, 0]), (0.4, vec![0, 1])], vec![1.0, 1.1], vec![0.2, -0.1]).unwrap();
        let spec = KernelSpec::mixed(DimensionSplit::new(1, 1).unwrap());
        let rule = ExpansionRule::new(ExpansionKind::MixedOrder, 1, 1.0);
        let base = GridSettings::default();
        let wide = GridSettings { extent_scale: 2.0, ..base };
        for t in [1.0, 8.0] {
            let a = expansion_error(&f, &spec, &rule, t, &WeightSpec::UNIT, &base).unwrap().error;
            let b = expansion_error(&f, &spec, &rule, t, &WeightSpec::UNIT, &wide).unwrap().error;
            assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");
        }
    }
}
