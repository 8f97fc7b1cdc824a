//! Likelihood model for enhanced-sampling parity data and the estimators built on it.
//!
//! For `L` Grover layers with layer fidelity `f`, the probability of parity `d` is
//! `½(1 + (−1)^d f^(L+½) cos((2L+1) arccos Π))`.

mod estimate;
mod fit;
mod optimize;
mod stats;

pub use estimate::{estimate, Estimate, EstimatorOptions};
pub use fit::{fit_layer_fidelity, fit_sweep_fidelity, FitResult};
pub use stats::{runtime, summarize, EstimateSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities are clamped to `[PROB_FLOOR, 1 − PROB_FLOOR]` before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Oscillating factor `cos((2L+1) arccos Π)`.
#[inline]
pub fn chebyshev_term(pi: f64, layers: u32) -> f64 {
    ((2 * layers + 1) as f64 * pi.clamp(-1.0, 1.0).acos()).cos()
}

/// Signal amplitude `f^(L+½)`.
#[inline]
pub fn decay_term(f: f64, layers: u32) -> f64 {
    f.powf(layers as f64 + 0.5)
}

/// Model probability of even parity.
#[inline]
pub fn p_even_model(pi: f64, f: f64, layers: u32) -> f64 {
    0.5 * (1.0 + decay_term(f, layers) * chebyshev_term(pi, layers))
}

fn check_domain(pi: f64, f: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&pi) {
        return Err(Error::Domain(format!("Π = {pi} outside [-1, 1]")));
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::Domain(format!("f = {f} outside [0, 1]")));
    }
    Ok(())
}

/// Probability of observing parity `d` from an `L`-layer circuit.
pub fn likelihood(d: Parity, pi: f64, f: f64, layers: u32) -> Result<f64> {
    check_domain(pi, f)?;
    let even = p_even_model(pi, f, layers);
    Ok(match d {
        Parity::Even => even,
        Parity::Odd => 1.0 - even,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRecord {
    pub layers: u32,
    pub shots: u64,
    pub even_count: u64,
}

impl ParityRecord {
    pub fn odd_count(&self) -> u64 {
        self.shots - self.even_count
    }
}

/// Per-layer parity counts; the sole input of the estimators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityDataset {
    records: Vec<ParityRecord>,
}

impl ParityDataset {
    pub fn new(mut records: Vec<ParityRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.layers);
        if records.windows(2).any(|w| w[0].layers == w[1].layers) {
            return Err(Error::InvalidParameter("layer counts must be distinct".into()));
        }
        if let Some(r) = records.iter().find(|r| r.even_count > r.shots) {
            return Err(Error::InvalidParameter(format!(
                "even count {} exceeds {} shots at L = {}",
                r.even_count, r.shots, r.layers
            )));
        }
        Ok(ParityDataset { records })
    }

    pub fn records(&self) -> &[ParityRecord] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn total_shots(&self) -> u64 {
        self.records.iter().map(|r| r.shots).sum()
    }

    /// Dataset with even and odd counts exchanged.
    pub fn complemented(&self) -> ParityDataset {
        ParityDataset {
            records: self
                .records
                .iter()
                .map(|r| ParityRecord {
                    even_count: r.odd_count(),
                    ..*r
                })
                .collect(),
        }
    }
}

#[inline]
fn record_log_likelihood(even: f64, odd: f64, p_even: f64) -> f64 {
    let p = p_even.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    let mut ll = 0.0;
    if even > 0.0 {
        ll += even * p.ln();
    }
    if odd > 0.0 {
        ll += odd * (1.0 - p).ln();
    }
    ll
}

/// Joint log-likelihood of every record in `ds`.
pub fn log_likelihood(ds: &ParityDataset, pi: f64, f: f64) -> Result<f64> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_domain(pi, f)?;
    Ok(ds
        .records
        .iter()
        .map(|r| {
            record_log_likelihood(
                r.even_count as f64,
                r.odd_count() as f64,
                p_even_model(pi, f, r.layers),
            )
        })
        .sum())
}

/// Estimated Π together with the layer fidelity `f = e^{−λ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LikelihoodParams {
    pub pi_hat: f64,
    pub f: f64,
    pub lambda: f64,
}

impl LikelihoodParams {
    pub fn new(pi_hat: f64, f: f64) -> Self {
        LikelihoodParams {
            pi_hat,
            f,
            lambda: -f.ln(),
        }
    }
}
