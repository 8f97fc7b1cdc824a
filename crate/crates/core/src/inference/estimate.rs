use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;

use super::optimize::golden_section_max;
use super::{chebyshev_term, decay_term, log_likelihood, record_log_likelihood, LikelihoodParams, ParityDataset};
use crate::error::{Error, Result};
use crate::seeding::task_rng;

/// Refinement stops once a full coordinate sweep moves by less than this.
const SWEEP_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 50;
const GOLDEN_TOL: f64 = 1e-11;
/// Half-width of each refinement bracket, in grid cells.
const BRACKET_CELLS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorOptions {
    pub pi_points: usize,
    pub f_points: usize,
    /// Number of refined starts averaged into the estimate.
    pub runs: usize,
    /// Pin the layer fidelity instead of fitting it.
    pub fixed_f: Option<f64>,
    /// A likelihood surface whose best value beats the `f = 0` value by no more than
    /// `flat_tol` per shot is reported as flat.
    pub flat_tol: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            pi_points: 2001,
            f_points: 501,
            runs: 64,
            fixed_f: None,
            flat_tol: 1e-9,
        }
    }
}

impl EstimatorOptions {
    pub fn with_fixed_f(mut self, f: f64) -> Self {
        self.fixed_f = Some(f);
        self
    }

    pub fn with_runs(mut self, runs: usize) -> Self {
        self.runs = runs;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pi_points < 2 {
            return Err(Error::InvalidParameter("pi grid needs at least 2 points".into()));
        }
        if self.fixed_f.is_none() && self.f_points < 2 {
            return Err(Error::InvalidParameter("f grid needs at least 2 points".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidParameter("at least one refinement run is required".into()));
        }
        if let Some(f) = self.fixed_f {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::Domain(format!("fixed f = {f} outside [0, 1]")));
            }
        }
        if self.flat_tol.is_nan() || self.flat_tol < 0.0 {
            return Err(Error::InvalidParameter("flat tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub params: LikelihoodParams,
    /// Best grid cell as `(Π, f)`.
    pub grid_best: (f64, f64),
    pub log_likelihood: f64,
    /// The data carry no information about Π; `params` is then the grid maximizer.
    pub flat: bool,
}

struct Grid {
    pi: Vec<f64>,
    f: Vec<f64>,
}

impl Grid {
    fn new(opts: &EstimatorOptions) -> Self {
        let p = opts.pi_points;
        // Integer numerators keep the grid exactly symmetric about zero.
        let pi = (0..p)
            .map(|i| (2 * i as i64 - (p as i64 - 1)) as f64 / (p - 1) as f64)
            .collect();
        let f = match opts.fixed_f {
            Some(f) => vec![f],
            None => (0..opts.f_points)
                .map(|j| j as f64 / (opts.f_points - 1) as f64)
                .collect(),
        };
        Grid { pi, f }
    }

    fn pi_step(&self) -> f64 {
        self.pi[1] - self.pi[0]
    }

    fn f_step(&self) -> f64 {
        if self.f.len() > 1 {
            self.f[1] - self.f[0]
        } else {
            0.0
        }
    }
}

/// Grid scan followed by `runs` jittered coordinate golden-section refinements of the
/// best cells; the estimate is the mean of the refined points.
pub fn estimate(ds: &ParityDataset, opts: &EstimatorOptions, seed: u64) -> Result<Estimate> {
    opts.validate()?;
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let grid = Grid::new(opts);
    let records = ds.records();
    let nf = grid.f.len();

    let cos_tab: Vec<Vec<f64>> = records
        .iter()
        .map(|r| grid.pi.iter().map(|&pi| chebyshev_term(pi, r.layers)).collect())
        .collect();
    let amp_tab: Vec<Vec<f64>> = records
        .iter()
        .map(|r| grid.f.iter().map(|&f| decay_term(f, r.layers)).collect())
        .collect();
    let counts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.even_count as f64, r.odd_count() as f64))
        .collect();

    let mut values = vec![0.0f64; grid.pi.len() * nf];
    values.par_chunks_mut(nf).enumerate().for_each(|(i, row)| {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = counts
                .iter()
                .enumerate()
                .map(|(k, &(e, o))| record_log_likelihood(e, o, 0.5 * (1.0 + amp_tab[k][j] * cos_tab[k][i])))
                .sum();
        }
    });

    // Higher likelihood first, then smaller |Π|, then grid order.
    let order = |a: &u32, b: &u32| -> Ordering {
        let (a, b) = (*a as usize, *b as usize);
        values[b]
            .total_cmp(&values[a])
            .then_with(|| grid.pi[a / nf].abs().total_cmp(&grid.pi[b / nf].abs()))
            .then_with(|| a.cmp(&b))
    };
    let mut idx: Vec<u32> = (0..values.len() as u32).collect();
    let top = opts.runs.min(idx.len());
    if top < idx.len() {
        idx.select_nth_unstable_by(top - 1, order);
        idx.truncate(top);
    }
    idx.sort_unstable_by(order);

    let best = idx[0] as usize;
    let grid_best = (grid.pi[best / nf], grid.f[best % nf]);
    let best_ll = values[best];

    let ll = |pi: f64, f: f64| -> f64 {
        records
            .iter()
            .zip(&counts)
            .map(|(r, &(e, o))| record_log_likelihood(e, o, 0.5 * (1.0 + decay_term(f, r.layers) * chebyshev_term(pi, r.layers))))
            .sum()
    };

    let floor_ll = ll(0.0, 0.0);
    let flat = best_ll - floor_ll <= opts.flat_tol * ds.total_shots().max(1) as f64;
    if flat {
        return Ok(Estimate {
            params: LikelihoodParams::new(grid_best.0, grid_best.1),
            grid_best,
            log_likelihood: best_ll,
            flat: true,
        });
    }

    let (dpi, df) = (grid.pi_step(), grid.f_step());
    let refined: Vec<(f64, f64)> = idx
        .par_iter()
        .enumerate()
        .map(|(run, &cell)| {
            let cell = cell as usize;
            let mut rng = task_rng(seed, &[run as u64]);
            let mut pi = (grid.pi[cell / nf] + dpi * rng.random_range(-0.5..0.5)).clamp(-1.0, 1.0);
            let mut f = grid.f[cell % nf];
            if opts.fixed_f.is_none() {
                f = (f + df * rng.random_range(-0.5..0.5)).clamp(0.0, 1.0);
            }
            for _ in 0..MAX_SWEEPS {
                let (pi0, f0) = (pi, f);
                let lo = (pi - BRACKET_CELLS * dpi).max(-1.0);
                let hi = (pi + BRACKET_CELLS * dpi).min(1.0);
                pi = golden_section_max(|x| ll(x, f), lo, hi, GOLDEN_TOL).0;
                if opts.fixed_f.is_none() {
                    let lo = (f - BRACKET_CELLS * df).max(0.0);
                    let hi = (f + BRACKET_CELLS * df).min(1.0);
                    f = golden_section_max(|y| ll(pi, y), lo, hi, GOLDEN_TOL).0;
                }
                if (pi - pi0).abs() < SWEEP_TOL && (f - f0).abs() < SWEEP_TOL {
                    break;
                }
            }
            (pi, f)
        })
        .collect();

    let n = refined.len() as f64;
    let pi_hat = refined.iter().map(|r| r.0).sum::<f64>() / n;
    let f_hat = refined.iter().map(|r| r.1).sum::<f64>() / n;
    Ok(Estimate {
        params: LikelihoodParams::new(pi_hat, f_hat),
        grid_best,
        log_likelihood: log_likelihood(ds, pi_hat.clamp(-1.0, 1.0), f_hat.clamp(0.0, 1.0))?,
        flat: false,
    })
}
