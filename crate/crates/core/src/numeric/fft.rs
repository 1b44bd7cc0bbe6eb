//! Separable N-dimensional FFT over row-major complex buffers.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place N-dimensional transform, unnormalized in both directions
/// (`inverse` uses `e^{+2πi kj/M}`).
pub fn fft_nd(buf: &mut [Complex64], shape: &[usize], inverse: bool) {
    debug_assert_eq!(buf.len(), shape.iter().product::<usize>());
    let mut planner = FftPlanner::new();
    let dims = shape.len();
    for axis in 0..dims {
        let m = shape[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            fft.process(buf);
            continue;
        }
        let outer: usize = shape[..axis].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for o in 0..outer {
            let base = o * m * stride;
            for s in 0..stride {
                for (j, v) in line.iter_mut().enumerate() {
                    *v = buf[base + j * stride + s];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    buf[base + j * stride + s] = *v;
                }
            }
        }
    }
}

/// Signed integer wavenumber of FFT bin `i` out of `m` (`m` even).
pub fn signed_index(i: usize, m: usize) -> i64 {
    if i < m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}
