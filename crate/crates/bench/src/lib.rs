//! Inputs shared by the benchmarks.

use anisoheat::heisenberg::HGridFunction;
use anisoheat::{Grid, PolyGaussian};

/// A shifted Gaussian with a linear factor, in `dims` variables.
pub fn skewed_datum(dims: usize) -> PolyGaussian {
    let mut e = vec![0; dims];
    e[0] = 1;
    PolyGaussian::new(
        vec![(1.0, vec![0; dims]), (0.5, e)],
        (0..dims).map(|i| 1.5 + 0.25 * i as f64).collect(),
        (0..dims).map(|i| 0.3 - 0.25 * i as f64).collect(),
    )
    .expect("valid datum")
}

/// The skewed datum on a small cube of `ℍ¹`.
pub fn group_source(points: usize) -> HGridFunction {
    let grid = Grid::cube(3, 3.0, points).expect("valid grid");
    HGridFunction::sample(&skewed_datum(3), &grid).expect("sampled")
}
