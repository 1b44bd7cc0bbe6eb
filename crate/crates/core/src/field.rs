//! Scalar fields on ℝᴺ: closed-form test functions with exact derivatives,
//! grid-backed data and closures.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{arg_err, Result};
use crate::numeric::interp::interpolate;
use crate::numeric::{Grid, GridFunction, MultiIndex};

/// A real function on all of ℝᴺ.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, z: &[f64]) -> f64;

    /// Radius of a ball (about the origin) outside of which the field is
    /// below roughly 1e-14 in magnitude. Infinite for non-decaying fields.
    fn radius(&self) -> f64;
}

/// Samples a field on every node of a grid.
pub fn sample(field: &dyn ScalarField, grid: &Grid) -> Result<GridFunction> {
    if field.dim() != grid.dims() {
        return arg_err(format!("field has dimension {}, grid {}", field.dim(), grid.dims()));
    }
    let dims = grid.dims();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map_init(
            || vec![0.0; dims],
            |z, i| {
                grid.coords_into(i, z);
                field.eval(z)
            },
        )
        .collect();
    GridFunction::new(grid.clone(), values)
}

/// `P(z) · exp(−Σ aᵢ (zᵢ − cᵢ)²)` with `P` a sparse polynomial in `z`.
///
/// Some `aᵢ` may be zero, which gives polynomial growth along that axis.
/// Derivatives and multiplication by coordinates stay in the family, so
/// every derivative is exact.
#[derive(Clone, PartialEq)]
pub struct PolyGaussian {
    terms: BTreeMap<Vec<u32>, f64>,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl PolyGaussian {
    pub fn new(terms: Vec<(f64, Vec<u32>)>, a: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let dim = a.len();
        if c.len() != dim {
            return arg_err("gaussian rates and centers differ in length");
        }
        if a.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return arg_err("gaussian rates must be finite and nonnegative");
        }
        let mut map = BTreeMap::new();
        for (coef, e) in terms {
            if e.len() != dim {
                return arg_err(format!("monomial {e:?} does not have {dim} exponents"));
            }
            *map.entry(e).or_insert(0.0) += coef;
        }
        map.retain(|_, v| *v != 0.0);
        Ok(PolyGaussian { terms: map, a, c })
    }

    /// `exp(−Σ aᵢ (zᵢ − cᵢ)²)`.
    pub fn gaussian(a: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let dim = a.len();
        Self::new(vec![(1.0, vec![0; dim])], a, c)
    }

    /// `e^{−|z|²}` in dimension `dim`.
    pub fn standard(dim: usize) -> Self {
        Self::gaussian(vec![1.0; dim], vec![0.0; dim]).expect("valid")
    }

    /// A pure polynomial.
    pub fn polynomial(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        Self::new(terms, vec![0.0; dim], vec![0.0; dim])
    }

    pub fn zero(dim: usize) -> Self {
        PolyGaussian { terms: BTreeMap::new(), a: vec![0.0; dim], c: vec![0.0; dim] }
    }

    pub fn rates(&self) -> &[f64] {
        &self.a
    }

    pub fn centers(&self) -> &[f64] {
        &self.c
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &v)| (e.as_slice(), v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn same_envelope(&self, other: &Self) -> bool {
        self.a == other.a && self.c == other.c
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= s;
        }
        out.terms.retain(|_, v| *v != 0.0);
        out
    }

    /// Sum of two members sharing the same Gaussian envelope.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if !self.same_envelope(other) {
            return arg_err("cannot add test functions with different gaussian envelopes");
        }
        let mut out = self.clone();
        for (e, v) in &other.terms {
            *out.terms.entry(e.clone()).or_insert(0.0) += v;
        }
        out.terms.retain(|_, v| *v != 0.0);
        Ok(out)
    }

    /// Multiplies by `coef · z_axis`.
    pub fn times_coord(&self, axis: usize, coef: f64) -> Self {
        let mut terms = BTreeMap::new();
        for (e, v) in &self.terms {
            let mut e2 = e.clone();
            e2[axis] += 1;
            *terms.entry(e2).or_insert(0.0) += v * coef;
        }
        terms.retain(|_, v: &mut f64| *v != 0.0);
        PolyGaussian { terms, a: self.a.clone(), c: self.c.clone() }
    }

    /// `∂_axis`, exactly.
    pub fn derivative(&self, axis: usize) -> Self {
        let mut terms: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let a = self.a[axis];
        let c = self.c[axis];
        for (e, &v) in &self.terms {
            if e[axis] > 0 {
                let mut e2 = e.clone();
                e2[axis] -= 1;
                *terms.entry(e2).or_insert(0.0) += v * e[axis] as f64;
            }
            if a != 0.0 {
                let mut up = e.clone();
                up[axis] += 1;
                *terms.entry(up).or_insert(0.0) -= 2.0 * a * v;
                if c != 0.0 {
                    *terms.entry(e.clone()).or_insert(0.0) += 2.0 * a * c * v;
                }
            }
        }
        terms.retain(|_, v| *v != 0.0);
        PolyGaussian { terms, a: self.a.clone(), c: self.c.clone() }
    }

    /// `D^α`.
    pub fn partial(&self, alpha: &MultiIndex) -> Self {
        let mut out = self.clone();
        for (axis, &k) in alpha.exponents().iter().enumerate() {
            for _ in 0..k {
                out = out.derivative(axis);
            }
        }
        out
    }

    /// The same function with its last `dim − keep` variables frozen at
    /// `values`; used to restrict to hyperplanes such as `θ = 0`.
    pub fn restrict_tail(&self, values: &[f64]) -> Self {
        let keep = self.dim() - values.len();
        let mut terms = BTreeMap::new();
        let mut env = 0.0;
        for (i, &v) in values.iter().enumerate() {
            let d = v - self.c[keep + i];
            env -= self.a[keep + i] * d * d;
        }
        let env = env.exp();
        for (e, &v) in &self.terms {
            let mut coef = v * env;
            for (i, &x) in values.iter().enumerate() {
                coef *= x.powi(e[keep + i] as i32);
            }
            *terms.entry(e[..keep].to_vec()).or_insert(0.0) += coef;
        }
        terms.retain(|_, v: &mut f64| *v != 0.0);
        PolyGaussian { terms, a: self.a[..keep].to_vec(), c: self.c[..keep].to_vec() }
    }

    fn envelope(&self, z: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..z.len() {
            let d = z[i] - self.c[i];
            s += self.a[i] * d * d;
        }
        (-s).exp()
    }

    fn poly(&self, z: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, &v) in &self.terms {
            let mut m = v;
            for (x, &p) in z.iter().zip(e) {
                if p > 0 {
                    m *= x.powi(p as i32);
                }
            }
            acc += m;
        }
        acc
    }
}

impl ScalarField for PolyGaussian {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn eval(&self, z: &[f64]) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        let env = self.envelope(z);
        if env == 0.0 {
            return 0.0;
        }
        env * self.poly(z)
    }

    fn radius(&self) -> f64 {
        if self.terms.is_empty() {
            return 0.0;
        }
        if self.a.iter().any(|&a| a == 0.0) {
            return f64::INFINITY;
        }
        let amin = self.a.iter().cloned().fold(f64::INFINITY, f64::min);
        let cnorm = self.c.iter().map(|c| c * c).sum::<f64>().sqrt();
        let cmax: f64 = self.terms.values().map(|v| v.abs()).sum();
        // solve a r² − deg·ln(r + |c|) ≥ 33 + ln(max coefficient) crudely
        let deg = self.degree() as f64;
        let base = 33.0 + cmax.max(1.0).ln();
        let mut r: f64 = (base / amin).sqrt();
        for _ in 0..30 {
            r = ((base + deg * (r + cnorm + 1.0).ln()) / amin).sqrt();
        }
        r + cnorm
    }
}

impl fmt::Debug for PolyGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyGaussian {{ ")?;
        for (i, (e, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{v}·z^{e:?}")?;
        }
        write!(f, ", a = {:?}, c = {:?} }}", self.a, self.c)
    }
}

/// Grid data extended by cubic interpolation inside the box and zero outside.
#[derive(Clone, Debug)]
pub struct GridSampled {
    data: GridFunction,
    radius: f64,
}

impl GridSampled {
    pub fn new(data: GridFunction) -> Self {
        let g = data.grid();
        let radius = (0..g.dims())
            .map(|a| {
                let r = g.center()[a].abs() + g.extents()[a];
                r * r
            })
            .sum::<f64>()
            .sqrt();
        GridSampled { data, radius }
    }

    pub fn data(&self) -> &GridFunction {
        &self.data
    }
}

impl ScalarField for GridSampled {
    fn dim(&self) -> usize {
        self.data.grid().dims()
    }

    fn eval(&self, z: &[f64]) -> f64 {
        interpolate(&self.data, z).unwrap_or(0.0)
    }

    fn radius(&self) -> f64 {
        self.radius
    }
}

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A field given by a closure, with a declared decay radius.
#[derive(Clone)]
pub struct FnField {
    dim: usize,
    radius: f64,
    f: Arc<EvalFn>,
}

impl FnField {
    pub fn new(dim: usize, radius: f64, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        FnField { dim, radius, f: Arc::new(f) }
    }
}

impl ScalarField for FnField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, z: &[f64]) -> f64 {
        (self.f)(z)
    }

    fn radius(&self) -> f64 {
        self.radius
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnField").field("dim", &self.dim).field("radius", &self.radius).finish()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, z: &[f64]) -> f64 {
        (**self).eval(z)
    }

    fn radius(&self) -> f64 {
        (**self).radius()
    }
}
