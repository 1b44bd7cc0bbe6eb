use crate::error::{Error, Result};

use super::grid::GridFunction;

/// Four-point Lagrange weights for a node offset `s ∈ [0, 1)` relative to
/// the second stencil node.
pub fn cubic_weights(s: f64) -> [f64; 4] {
    let sm1 = s - 1.0;
    let sm2 = s - 2.0;
    let sp1 = s + 1.0;
    [
        -s * sm1 * sm2 / 6.0,
        sp1 * sm1 * sm2 / 2.0,
        -sp1 * s * sm2 / 2.0,
        sp1 * s * sm1 / 6.0,
    ]
}

/// Tensor-product cubic interpolation of grid data with zero extension
/// outside the box. Near the boundary the stencil reads zeros.
pub fn interpolate(f: &GridFunction, z: &[f64]) -> Result<f64> {
    let grid = f.grid();
    let dims = grid.dims();
    if z.len() != dims {
        return Err(Error::Argument(format!("point has {} coordinates, grid has {dims} axes", z.len())));
    }
    let mut base = vec![0i64; dims];
    let mut weights = vec![[0.0; 4]; dims];
    for a in 0..dims {
        let h = grid.spacing(a);
        let u = (z[a] - grid.node(a, 0)) / h;
        if !u.is_finite() {
            return Err(Error::NumericDomain("interpolation point".into()));
        }
        let i0 = u.floor();
        if i0 < -2.0 || i0 > grid.points()[a] as f64 {
            return Ok(0.0);
        }
        base[a] = i0 as i64 - 1;
        weights[a] = cubic_weights(u - i0);
    }
    let strides = grid.strides();
    let values = f.values();
    let total = 4usize.pow(dims as u32);
    let mut acc = 0.0;
    'stencil: for s in 0..total {
        let mut w = 1.0;
        let mut flat = 0usize;
        let mut rem = s;
        for a in 0..dims {
            let o = rem % 4;
            rem /= 4;
            let idx = base[a] + o as i64;
            if idx < 0 || idx >= grid.points()[a] as i64 {
                continue 'stencil;
            }
            w *= weights[a][o];
            flat += idx as usize * strides[a];
        }
        acc += w * values[flat];
    }
    Ok(acc)
}
