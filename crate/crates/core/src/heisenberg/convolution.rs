//! Direct group convolution `(f∗K_t)(w) = ∫ f(v) K_t(v^{-1}∘w) dv` on grids.

use rayon::prelude::*;

use crate::error::{arg_err, Result};
use crate::field::{sample, ScalarField};
use crate::kernels::GroupKernel;
use crate::numeric::{Grid, GridFunction};

use super::group::symplectic;

/// Nodes of `f` below this fraction of `max|f|` are skipped.
const NEGLIGIBLE: f64 = 1e-15;

/// A grid function on `ℍⁿ`; the last axis is θ.
#[derive(Clone, Debug)]
pub struct HGridFunction {
    n: usize,
    data: GridFunction,
}

impl HGridFunction {
    pub fn new(data: GridFunction) -> Result<Self> {
        let d = data.grid().dims();
        if d < 3 || d % 2 == 0 {
            return arg_err(format!("a grid on ℍⁿ has 2n+1 axes, got {d}"));
        }
        Ok(HGridFunction { n: (d - 1) / 2, data })
    }

    pub fn sample(f: &dyn ScalarField, grid: &Grid) -> Result<Self> {
        HGridFunction::new(sample(f, grid)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta_axis(&self) -> usize {
        2 * self.n
    }

    pub fn grid(&self) -> &Grid {
        self.data.grid()
    }

    pub fn data(&self) -> &GridFunction {
        &self.data
    }

    pub fn into_data(self) -> GridFunction {
        self.data
    }
}

/// Grid for `u(·, t)`: half-widths `7√t` on the z-axes and `40t` on θ,
/// outside which `H_t` carries less than `1e-8` of its mass.
pub fn h_solution_grid(n: usize, t: f64, z_points: usize, theta_points: usize) -> Result<Grid> {
    if !(t > 0.0) {
        return arg_err(format!("time must be positive, got {t}"));
    }
    let mut extents = vec![7.0 * t.sqrt(); 2 * n];
    extents.push(40.0 * t);
    let mut points = vec![z_points; 2 * n];
    points.push(theta_points);
    Grid::new(extents, points)
}

fn corners(grid: &Grid) -> Vec<Vec<f64>> {
    let d = grid.dims();
    (0..1usize << d)
        .map(|mask| {
            (0..d)
                .map(|a| {
                    let j = if mask >> a & 1 == 1 { grid.points()[a] - 1 } else { 0 };
                    grid.node(a, j)
                })
                .collect()
        })
        .collect()
}

/// `u(w) = Σ_v f(v) K_t(v^{-1}∘w) Πh` over the nodes `w` of `out`.
pub fn h_convolve(f: &HGridFunction, kernel: &dyn GroupKernel, t: f64, out: &Grid) -> Result<HGridFunction> {
    let n = f.n();
    if kernel.n() != n {
        return arg_err(format!("kernel lives on ℍ^{}, data on ℍ^{n}", kernel.n()));
    }
    if out.dims() != 2 * n + 1 {
        return arg_err(format!("output grid has {} axes, expected {}", out.dims(), 2 * n + 1));
    }
    if !(t > 0.0) {
        return arg_err(format!("time must be positive, got {t}"));
    }
    let src = f.grid();
    let cell = src.cell_volume();
    let floor = f.data().max_abs() * NEGLIGIBLE;
    let mut support: Vec<(Vec<f64>, f64)> = Vec::new();
    for (i, &v) in f.data().values().iter().enumerate() {
        if v.abs() > floor {
            support.push((src.coords(i), v * cell));
        }
    }

    // the argument is affine in w, so its extremes sit at the corners of `out`
    let (mut z_max, mut th_max) = (0.0f64, 0.0f64);
    let cs = corners(out);
    for (v, _) in &support {
        for w in &cs {
            let dz: f64 = (0..2 * n).map(|a| (w[a] - v[a]).powi(2)).sum::<f64>().sqrt();
            let th = w[2 * n] - v[2 * n] - symplectic(&v[..2 * n], &w[..2 * n]);
            z_max = z_max.max(dz);
            th_max = th_max.max(th.abs());
        }
    }
    kernel.check_reach(z_max, th_max, t)?;

    let values = (0..out.len())
        .into_par_iter()
        .map_init(
            || (vec![0.0; 2 * n + 1], vec![0.0; 2 * n]),
            |(w, dz), i| -> Result<f64> {
                out.coords_into(i, w);
                let mut acc = 0.0;
                for (v, mass) in &support {
                    for a in 0..2 * n {
                        dz[a] = w[a] - v[a];
                    }
                    let th = w[2 * n] - v[2 * n] - symplectic(&v[..2 * n], &w[..2 * n]);
                    acc += mass * kernel.eval(dz, th, t)?;
                }
                Ok(acc)
            },
        )
        .collect::<Result<Vec<f64>>>()?;
    HGridFunction::new(GridFunction::new(out.clone(), values)?)
}
