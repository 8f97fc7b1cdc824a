use serde::Serialize;

use super::optimize::golden_section_max;
use super::p_even_model;
use crate::error::{Error, Result};

const SCAN_POINTS: usize = 2001;
const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub f: f64,
    pub r2: f64,
    /// Model value at each input point for the fitted `f`.
    pub predicted: Vec<f64>,
}

fn fit_f<M: Fn(f64, usize) -> f64>(observed: &[f64], model: M) -> Result<FitResult> {
    if observed.len() < MIN_POINTS {
        return Err(Error::NotEnoughPoints {
            needed: MIN_POINTS,
            got: observed.len(),
        });
    }
    if observed.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("observed probabilities must be finite".into()));
    }
    let ssr = |f: f64| -> f64 {
        observed
            .iter()
            .enumerate()
            .map(|(k, &p)| (p - model(f, k)).powi(2))
            .sum()
    };
    let step = 1.0 / (SCAN_POINTS - 1) as f64;
    let (k_best, _) = (0..SCAN_POINTS)
        .map(|k| (k, ssr(k as f64 * step)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let lo = (k_best as f64 - 1.0).max(0.0) * step;
    let hi = ((k_best + 1) as f64 * step).min(1.0);
    let (f, neg) = golden_section_max(|f| -ssr(f), lo, hi, 1e-13);
    let ss_res = -neg;

    let mean = observed.iter().sum::<f64>() / observed.len() as f64;
    let ss_tot: f64 = observed.iter().map(|p| (p - mean).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    Ok(FitResult {
        f,
        r2,
        predicted: (0..observed.len()).map(|k| model(f, k)).collect(),
    })
}

/// Least-squares layer fidelity from `(L, p_even)` points at known Π.
pub fn fit_layer_fidelity(points: &[(u32, f64)], pi_known: f64) -> Result<FitResult> {
    if !(-1.0..=1.0).contains(&pi_known) {
        return Err(Error::Domain(format!("Π = {pi_known} outside [-1, 1]")));
    }
    let observed: Vec<f64> = points.iter().map(|p| p.1).collect();
    fit_f(&observed, |f, k| p_even_model(pi_known, f, points[k].0))
}

/// Least-squares layer fidelity from `(Π, p_even)` points at a fixed layer count.
pub fn fit_sweep_fidelity(points: &[(f64, f64)], layers: u32) -> Result<FitResult> {
    if let Some(p) = points.iter().find(|p| !(-1.0..=1.0).contains(&p.0)) {
        return Err(Error::Domain(format!("Π = {} outside [-1, 1]", p.0)));
    }
    let observed: Vec<f64> = points.iter().map(|p| p.1).collect();
    fit_f(&observed, |f, k| p_even_model(points[k].0, f, layers))
}
