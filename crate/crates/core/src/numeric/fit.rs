use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};

/// Least-squares line through `(log t, log err)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual in log space.
    pub max_residual: f64,
    pub t_range: (f64, f64),
}

pub fn decay_fit(t: &[f64], err: &[f64]) -> Result<DecayFit> {
    if t.len() != err.len() {
        return arg_err("time and error lists differ in length");
    }
    if t.len() < 3 {
        return arg_err(format!("need at least 3 samples for a fit, got {}", t.len()));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) || t[0] <= 0.0 {
        return arg_err("times must be positive and strictly increasing");
    }
    if let Some(e) = err.iter().find(|&&e| !(e > 0.0) || !e.is_finite()) {
        return arg_err(format!("error value {e} is not positive; its logarithm is undefined"));
    }
    let x: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit { slope, intercept, max_residual, t_range: (t[0], t[t.len() - 1]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let t: Vec<f64> = (0..7).map(|k| 2f64.powi(k)).collect();
        let e: Vec<f64> = t.iter().map(|t| 7.0 / t).collect();
        let fit = decay_fit(&t, &e).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        let c = decay_fit(&t, &vec![3.0; 7]).unwrap();
        assert!(c.slope.abs() < 1e-14);
    }

    #[test]
    fn wobbly_power_law() {
        let t: Vec<f64> = (0..7).map(|k| 2f64.powi(k)).collect();
        let e: Vec<f64> = t.iter().map(|t| (1.0 + 0.1 * t.ln().sin()) / t).collect();
        let fit = decay_fit(&t, &e).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.1);
        assert!(fit.max_residual < 0.1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decay_fit(&[1.0, 2.0], &[1.0, 1.0]).is_err());
        assert!(decay_fit(&[1.0, 2.0, 3.0], &[1.0, 0.0, 1.0]).is_err());
    }
}
