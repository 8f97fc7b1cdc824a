use serde::Serialize;

use crate::error::{Error, Result};

/// Runtime in units of one application of the state-preparation circuit `A`.
///
/// `M` shots spread over depths `0..=Lmax`, each Grover layer costing two `A`
/// calls plus an `n_O`-CNOT reflection weighted by `1/n_A`.
pub fn runtime(shots: u64, lmax: u32, n_o: u32, n_a: u32) -> Result<f64> {
    if n_a == 0 {
        return Err(Error::InvalidParameter("n_A must be positive".into()));
    }
    let m = shots as f64;
    let l = lmax as f64;
    Ok(m * (l + 1.0) + m * n_o as f64 * l / (2.0 * n_a as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateSummary {
    pub mean: f64,
    pub bias: f64,
    pub rmse: f64,
    pub se_mean: f64,
    pub se_rmse: f64,
    pub runtime: f64,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Bias, RMSE and their standard errors over repeated estimates of `truth`.
///
/// The RMSE error bar propagates the standard error of the mean squared error
/// through the square root.
pub fn summarize(estimates: &[f64], truth: f64, runtime: f64) -> Result<EstimateSummary> {
    if estimates.len() < 2 {
        return Err(Error::NotEnoughPoints {
            needed: 2,
            got: estimates.len(),
        });
    }
    let (mean, se_mean) = mean_and_se(estimates);
    let sq: Vec<f64> = estimates.iter().map(|e| (e - truth).powi(2)).collect();
    let (mse, se_mse) = mean_and_se(&sq);
    let rmse = mse.sqrt();
    let se_rmse = if rmse > 0.0 { se_mse / (2.0 * rmse) } else { 0.0 };
    Ok(EstimateSummary {
        mean,
        bias: mean - truth,
        rmse,
        se_mean,
        se_rmse,
        runtime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::task_rng;
    use rand_distr::{Distribution, Normal};

    // Per-depth accounting: depth L costs (2L + 1) A-calls and L reflections.
    fn runtime_by_depth(shots: u64, lmax: u32, n_o: u32, n_a: u32) -> f64 {
        let per = shots as f64 / (lmax as f64 + 1.0);
        (0..=lmax)
            .map(|l| per * ((2 * l + 1) as f64 + l as f64 * n_o as f64 / n_a as f64))
            .sum()
    }

    #[test]
    fn runtime_closed_form() {
        assert_eq!(runtime(20_000, 2, 3, 3).unwrap(), 80_000.0);
        assert_eq!(runtime(1000, 0, 14, 4).unwrap(), 1000.0);
        for lmax in 0..8 {
            for (n_o, n_a) in [(3, 3), (14, 4), (0, 1), (7, 2)] {
                let a = runtime(12_345, lmax, n_o, n_a).unwrap();
                let b = runtime_by_depth(12_345, lmax, n_o, n_a);
                assert!((a - b).abs() < 1e-6 * b, "{a} vs {b}");
            }
        }
        assert!(runtime(1, 1, 1, 0).is_err());
    }

    #[test]
    fn summary_of_known_values() {
        let s = summarize(&[1.0, 2.0, 3.0], 1.5, 7.0).unwrap();
        assert!((s.mean - 2.0).abs() < 1e-15);
        assert!((s.bias - 0.5).abs() < 1e-15);
        // Squared errors 0.25, 0.25, 2.25.
        assert!((s.rmse - (2.75f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s.se_mean - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(s.runtime, 7.0);
        assert!(summarize(&[1.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn standard_errors_scale_as_inverse_root_n() {
        let normal = Normal::new(0.1, 0.5).unwrap();
        let draw = |n: usize, seed: u64| -> Vec<f64> {
            let mut rng = task_rng(seed, &[]);
            (0..n).map(|_| normal.sample(&mut rng)).collect()
        };
        let small = summarize(&draw(400, 1), 0.0, 0.0).unwrap();
        let large = summarize(&draw(40_000, 2), 0.0, 0.0).unwrap();
        let ratio_mean = small.se_mean / large.se_mean;
        let ratio_rmse = small.se_rmse / large.se_rmse;
        assert!((ratio_mean - 10.0).abs() < 1.5, "{ratio_mean}");
        assert!((ratio_rmse - 10.0).abs() < 2.0, "{ratio_rmse}");
        assert!((large.se_mean - 0.5 / 200.0).abs() < 2e-4);
    }
}
