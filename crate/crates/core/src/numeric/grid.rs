use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};

/// Partition `ℝ^N = ℝ^m × ℝ^n` of the coordinates into an x-block (first
/// `m` axes) and a y-block (last `n` axes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionSplit {
    m: usize,
    n: usize,
}

impl DimensionSplit {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return arg_err(format!("dimension split needs m, n >= 1 (got m={m}, n={n})"));
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.m + self.n
    }
}

/// Uniform tensor grid on the box `Π [c_i - L_i, c_i + L_i)` with `M_i`
/// nodes per axis, spacing `h_i = 2 L_i / M_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    extents: Vec<f64>,
    points: Vec<usize>,
    center: Vec<f64>,
}

impl Grid {
    pub fn new(extents: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let center = vec![0.0; extents.len()];
        Self::with_center(extents, points, center)
    }

    pub fn with_center(extents: Vec<f64>, points: Vec<usize>, center: Vec<f64>) -> Result<Self> {
        if extents.is_empty() || extents.len() != points.len() || center.len() != points.len() {
            return arg_err("grid extents, point counts and center must have equal nonzero length");
        }
        for (&l, &m) in extents.iter().zip(&points) {
            if !(l.is_finite() && l > 0.0) {
                return arg_err(format!("grid half-width must be positive, got {l}"));
            }
            if m < 8 || m % 2 != 0 {
                return arg_err(format!("grid point count must be even and >= 8, got {m}"));
            }
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::NumericDomain("grid center".into()));
        }
        Ok(Self { extents, points, center })
    }

    /// Same box and counts in every direction.
    pub fn cube(dims: usize, extent: f64, points: usize) -> Result<Self> {
        Self::new(vec![extent; dims], vec![points; dims])
    }

    pub fn dims(&self) -> usize {
        self.points.len()
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn is_centered(&self) -> bool {
        self.center.iter().all(|&c| c == 0.0)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * self.extents[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dims()).map(|a| self.spacing(a)).product()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate of node `j` along `axis`.
    pub fn node(&self, axis: usize, j: usize) -> f64 {
        self.center[axis] - self.extents[axis] + j as f64 * self.spacing(axis)
    }

    /// Node coordinates along one axis.
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|j| self.node(axis, j)).collect()
    }

    /// Row-major strides (last axis fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims()];
        for a in (0..self.dims().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.points[a + 1];
        }
        s
    }

    /// Writes the coordinates of the node with flat index `flat` into `out`.
    pub fn coords_into(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for a in (0..self.dims()).rev() {
            let m = self.points[a];
            out[a] = self.node(a, rem % m);
            rem /= m;
        }
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut z = vec![0.0; self.dims()];
        self.coords_into(flat, &mut z);
        z
    }

    /// Grid with every extent and count doubled (same spacing).
    pub fn doubled(&self) -> Grid {
        Grid {
            extents: self.extents.iter().map(|l| 2.0 * l).collect(),
            points: self.points.iter().map(|m| 2 * m).collect(),
            center: self.center.clone(),
        }
    }

    /// Grid restricted to a subset of the axes.
    pub fn sub_grid(&self, axes: std::ops::Range<usize>) -> Grid {
        Grid {
            extents: self.extents[axes.clone()].to_vec(),
            points: self.points[axes.clone()].to_vec(),
            center: self.center[axes].to_vec(),
        }
    }

    /// Translates the box by `shift`.
    pub fn shifted(&self, shift: &[f64]) -> Grid {
        Grid {
            extents: self.extents.clone(),
            points: self.points.clone(),
            center: self.center.iter().zip(shift).map(|(c, s)| c + s).collect(),
        }
    }
}

/// Samples of a scalar field on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return arg_err(format!(
                "value count {} does not match grid node count {}",
                values.len(),
                grid.len()
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Samples `f` at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut z = vec![0.0; grid.dims()];
        let values = (0..grid.len())
            .map(|i| {
                grid.coords_into(i, &mut z);
                f(&z)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// `self + c · other` on a common grid.
    pub fn axpy(&self, c: f64, other: &GridFunction) -> Result<GridFunction> {
        if self.grid != other.grid {
            return arg_err("grid functions live on different grids");
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.axpy(-1.0, other)
    }

    /// In-place `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return arg_err("grid functions live on different grids");
        }
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::NumericDomain(format!("grid value at node {i} is {}", self.values[i]))),
            None => Ok(()),
        }
    }
}
