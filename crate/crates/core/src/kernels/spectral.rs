//! Kernels and heat solves for the Fourier-diagonal flows.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::KernelSpec;
use crate::error::{arg_err, Error, Result};
use crate::numeric::fft::{fft_nd, signed_index};
use crate::numeric::norms::weighted_lp_norm;
use crate::numeric::{decay_fit, DecayFit, DimensionSplit, Grid, GridFunction, MultiIndex, WeightSpec};

const IMAG_TOL: f64 = 1e-10;

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return arg_err(format!("time must be positive, got {t}"));
    }
    Ok(())
}

/// Angular frequencies of an axis, in FFT order.
pub fn axis_frequencies(grid: &Grid, axis: usize) -> Vec<f64> {
    let m = grid.points()[axis];
    let period = 2.0 * grid.extents()[axis];
    (0..m).map(|i| 2.0 * PI * signed_index(i, m) as f64 / period).collect()
}

/// `exp(−t·P(ξ))` for the flow's symbol `P`.
fn heat_symbol(spec: &KernelSpec, t: f64, xi: &[f64]) -> Result<f64> {
    match *spec {
        KernelSpec::Isotropic { .. } => Ok((-t * xi.iter().map(|v| v * v).sum::<f64>()).exp()),
        KernelSpec::MixedOrder { m, .. } => {
            let x2: f64 = xi[..m].iter().map(|v| v * v).sum();
            let y2: f64 = xi[m..].iter().map(|v| v * v).sum();
            Ok((-t * (x2 * x2 + y2)).exp())
        }
        KernelSpec::Heisenberg { .. } => arg_err("the heisenberg kernel has no Fourier symbol in these coordinates"),
    }
}

fn i_pow(xi: f64, k: u32) -> Complex64 {
    let r = xi.powi(k as i32);
    match k % 4 {
        0 => Complex64::new(r, 0.0),
        1 => Complex64::new(0.0, r),
        2 => Complex64::new(-r, 0.0),
        _ => Complex64::new(0.0, -r),
    }
}

/// Visits every flat index of the grid with its per-axis index vector.
fn for_each_index(points: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = points.iter().product();
    let mut idx = vec![0usize; points.len()];
    for flat in 0..total {
        f(flat, &idx);
        for a in (0..points.len()).rev() {
            idx[a] += 1;
            if idx[a] < points[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

fn real_part(buf: &[Complex64], scale: f64, what: &str) -> Result<Vec<f64>> {
    let mut max_re = 0.0f64;
    let mut max_im = 0.0f64;
    for v in buf {
        max_re = max_re.max(v.re.abs());
        max_im = max_im.max(v.im.abs());
    }
    if max_im > IMAG_TOL * max_re.max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!(
            "{what}: imaginary residue {:.3e} relative to {:.3e}; grid too coarse or off-center",
            max_im * scale,
            max_re * scale
        )));
    }
    Ok(buf.iter().map(|v| v.re * scale).collect())
}

/// Samples `F⁻¹[mult(ξ)·symbol(ξ)]` on the grid nodes.
fn sample_inverse_transform(
    grid: &Grid,
    what: &str,
    value: impl Fn(&[f64], &[usize]) -> Result<Complex64>,
) -> Result<GridFunction> {
    let dims = grid.dims();
    let freqs: Vec<Vec<f64>> = (0..dims).map(|a| axis_frequencies(grid, a)).collect();
    // node x_j = c − L + j h, so the DFT of bin k picks up e^{i(c−L)ξ_k}
    let phases: Vec<Vec<Complex64>> = (0..dims)
        .map(|a| {
            let shift = grid.center()[a] - grid.extents()[a];
            freqs[a].iter().map(|&x| Complex64::from_polar(1.0, shift * x)).collect()
        })
        .collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut xi = vec![0.0; dims];
    let mut err = None;
    for_each_index(grid.points(), |flat, idx| {
        if err.is_some() {
            return;
        }
        let mut ph = Complex64::new(1.0, 0.0);
        for a in 0..dims {
            xi[a] = freqs[a][idx[a]];
            ph *= phases[a][idx[a]];
        }
        match value(&xi, idx) {
            Ok(v) => buf[flat] = v * ph,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    fft_nd(&mut buf, grid.points(), true);
    let scale: f64 = (0..dims).map(|a| 1.0 / (2.0 * grid.extents()[a])).product();
    let values = real_part(&buf, scale, what)?;
    GridFunction::new(grid.clone(), values)
}

/// Samples of `(4πt)^{−N/2} e^{−|z|²/4t}`.
pub fn gaussian_kernel(grid: &Grid, t: f64) -> Result<GridFunction> {
    check_t(t)?;
    let n = grid.dims() as f64;
    let c = (4.0 * PI * t).powf(-n / 2.0);
    Ok(GridFunction::from_fn(grid.clone(), |z| {
        c * (-z.iter().map(|v| v * v).sum::<f64>() / (4.0 * t)).exp()
    }))
}

/// Mixed-order kernel sampled by inverse FFT of `e^{−t(|ξ|⁴ + |η|²)}`.
pub fn mixed_kernel(grid: &Grid, split: DimensionSplit, t: f64) -> Result<GridFunction> {
    let m = split.m();
    let zeros = MultiIndex::zeros(m);
    kernel_derivative(&KernelSpec::mixed(split), &zeros, &MultiIndex::zeros(split.n()), t, grid)
}

/// `D_x^β D_y^γ` of an isotropic or mixed-order kernel, by Fourier
/// multiplier. For the isotropic family pass the full index in `beta` and
/// an empty `gamma`, or split it any way that concatenates correctly.
pub fn kernel_derivative(
    spec: &KernelSpec,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    t: f64,
    grid: &Grid,
) -> Result<GridFunction> {
    spec.validate()?;
    check_t(t)?;
    if let KernelSpec::Heisenberg { .. } = spec {
        return arg_err("heisenberg derivatives are evaluated by heisenberg_kernel_derivative");
    }
    if let (KernelSpec::MixedOrder { m, .. }, false) = (spec, gamma.dim() == 0) {
        if beta.dim() != *m {
            return arg_err(format!("β has {} entries, the x-block has {m}", beta.dim()));
        }
    }
    let alpha = beta.concat(gamma);
    if alpha.dim() != grid.dims() || spec.dims() != grid.dims() {
        return arg_err(format!(
            "index of length {} and kernel of dimension {} on a {}-axis grid",
            alpha.dim(),
            spec.dims(),
            grid.dims()
        ));
    }
    let exps = alpha.exponents().to_vec();
    let points = grid.points().to_vec();
    sample_inverse_transform(grid, "kernel derivative", |xi, idx| {
        let mut mult = Complex64::new(heat_symbol(spec, t, xi)?, 0.0);
        for (a, &k) in exps.iter().enumerate() {
            if k == 0 {
                continue;
            }
            // the Nyquist mode has no consistent sign for odd derivatives
            if k % 2 == 1 && idx[a] == points[a] / 2 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            mult *= i_pow(xi[a], k);
        }
        Ok(mult)
    })
}

/// Periodic heat solve `u = F⁻¹[e^{−tP(ξ)} f̂]` on the grid's box.
pub fn fft_solve(f: &GridFunction, spec: &KernelSpec, t: f64) -> Result<GridFunction> {
    spec.validate()?;
    check_t(t)?;
    f.check_finite()?;
    let grid = f.grid();
    if spec.dims() != grid.dims() {
        return arg_err("kernel and grid dimensions differ");
    }
    let dims = grid.dims();
    let freqs: Vec<Vec<f64>> = (0..dims).map(|a| axis_frequencies(grid, a)).collect();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, grid.points(), false);
    let mut xi = vec![0.0; dims];
    let mut err = None;
    for_each_index(grid.points(), |flat, idx| {
        for a in 0..dims {
            xi[a] = freqs[a][idx[a]];
        }
        match heat_symbol(spec, t, &xi) {
            Ok(s) => buf[flat] *= s,
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    fft_nd(&mut buf, grid.points(), true);
    let values = real_part(&buf, 1.0 / grid.len() as f64, "heat solve")?;
    GridFunction::new(grid.clone(), values)
}

/// A centered grid on which the kernel at time `t` fills a fixed fraction
/// of the box: extents grow like `t^{aᵢ}`.
pub fn kernel_grid(spec: &KernelSpec, t: f64, points: usize) -> Result<Grid> {
    check_t(t)?;
    let extents: Vec<f64> = match *spec {
        // the fourth-order kernel is oscillatory with a stretched-exponential
        // tail, |G_1(x)| ≈ 3e-11 at x = 30
        KernelSpec::MixedOrder { m, n } => {
            let mut v = vec![32.0 * t.powf(0.25); m];
            v.extend(std::iter::repeat(12.0 * t.sqrt()).take(n));
            v
        }
        KernelSpec::Isotropic { dim } => vec![12.0 * t.sqrt(); dim],
        KernelSpec::Heisenberg { .. } => return arg_err("use a heisenberg grid for the heisenberg kernel"),
    };
    let dims = extents.len();
    Grid::new(extents, vec![points; dims])
}

fn default_points(dims: usize) -> usize {
    if dims <= 2 {
        128
    } else {
        64
    }
}

/// Fits the decay of `‖D_x^β D_y^γ G_t‖_{L^q}` over `t_list`, each sampled on
/// a self-similar grid.
pub fn derivative_decay_check(
    spec: &KernelSpec,
    beta: &MultiIndex,
    gamma: &MultiIndex,
    q: f64,
    t_list: &[f64],
) -> Result<DecayFit> {
    if t_list.len() < 3 {
        return arg_err(format!("need at least 3 times for a decay fit, got {}", t_list.len()));
    }
    let points = default_points(spec.dims());
    let mut norms = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let grid = kernel_grid(spec, t, points)?;
        let d = kernel_derivative(spec, beta, gamma, t, &grid)?;
        norms.push(weighted_lp_norm(&d, &WeightSpec::UNIT, q)?);
    }
    decay_fit(t_list, &norms)
}
