use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Arm, ExperimentConfig, Scenario};
use crate::ansatz::{build_enhanced_circuit, build_h2_ansatz, build_reflection_r0};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::inference::{
    estimate, fit_layer_fidelity, fit_sweep_fidelity, runtime, summarize, EstimatorOptions, ParityDataset,
    ParityRecord,
};
use crate::pauli::Observable;
use crate::seeding::{derive_seed, task_rng};
use crate::sim::{expectation, sample_parities_with, Simulator};
use crate::twirl::{make_ensemble, ManifestEntry};

// First element of every seed path, so streams for different purposes never collide.
const TAG_SAMPLE: u64 = 1;
const TAG_RC: u64 = 2;
const TAG_SWEEP: u64 = 3;
const TAG_ESTIMATE: u64 = 4;

const METHOD_SS: u64 = 0;
const METHOD_RAE: u64 = 1;
const METHOD_RC_RAE: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanLRow {
    pub arm: String,
    #[serde(rename = "L")]
    pub layers: u32,
    pub p_even_exact: f64,
    pub p_even_sampled: f64,
    pub f_fit: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPiRow {
    pub arm: String,
    pub theta0: f64,
    pub pi_exact: f64,
    pub p_even: f64,
    pub f_fit: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub method: String,
    #[serde(rename = "Lmax")]
    pub lmax: u32,
    pub mean: f64,
    pub bias: f64,
    pub rmse: f64,
    pub se_mean: f64,
    pub se_rmse: f64,
    #[serde(rename = "runtime_units_A")]
    pub runtime_units_a: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResultTable {
    ScanL(Vec<ScanLRow>),
    ScanPi(Vec<ScanPiRow>),
    Compare(Vec<CompareRow>),
}

impl ResultTable {
    pub fn scenario(&self) -> Scenario {
        match self {
            ResultTable::ScanL(_) => Scenario::ScanL,
            ResultTable::ScanPi(_) => Scenario::ScanPi,
            ResultTable::Compare(_) => Scenario::Compare,
        }
    }

    pub fn columns(&self) -> &'static [&'static str] {
        columns(self.scenario())
    }

    pub fn len(&self) -> usize {
        match self {
            ResultTable::ScanL(r) => r.len(),
            ResultTable::ScanPi(r) => r.len(),
            ResultTable::Compare(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn columns(scenario: Scenario) -> &'static [&'static str] {
    match scenario {
        Scenario::ScanL => &["arm", "L", "p_even_exact", "p_even_sampled", "f_fit", "r2"],
        Scenario::ScanPi => &["arm", "theta0", "pi_exact", "p_even", "f_fit", "r2"],
        Scenario::Compare => &["method", "Lmax", "mean", "bias", "rmse", "se_mean", "se_rmse", "runtime_units_A"],
    }
}

/// A result table plus scenario-specific facts for the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub table: ResultTable,
    pub details: Value,
}

struct Setup {
    ansatz: Circuit,
    observable: Observable,
    sim: Simulator,
    pi_exact: f64,
}

fn setup(cfg: &ExperimentConfig) -> Result<Setup> {
    let ansatz = cfg.ansatz.build()?;
    let observable = cfg.observable()?;
    let noise = cfg.noise_config()?;
    let sim = Simulator::new(cfg.num_qubits(), noise.as_ref())?;
    let pi_exact = noiseless_expectation(&ansatz, &observable)?;
    Ok(Setup {
        ansatz,
        observable,
        sim,
        pi_exact,
    })
}

fn noiseless_expectation(a: &Circuit, p: &Observable) -> Result<f64> {
    let rho = Simulator::noiseless(a.num_qubits())?.run(a)?;
    expectation(&rho, p)
}

fn expect_scenario(cfg: &ExperimentConfig, want: Scenario) -> Result<()> {
    if cfg.scenario != want {
        return Err(Error::config(
            "scenario",
            format!("config describes {} but {} was requested", cfg.scenario, want),
        ));
    }
    Ok(())
}

/// Parity counts of one circuit pooled over an RC ensemble.
struct Pooled {
    p_even_exact: f64,
    even_count: u64,
    manifest: Vec<ManifestEntry>,
}

fn pooled_rc(
    sim: &Simulator,
    c: &Circuit,
    p: &Observable,
    duplicates: u64,
    shots: u64,
    ensemble_seed: u64,
    sample_seed: u64,
) -> Result<Pooled> {
    let ens = make_ensemble(c, duplicates, shots, ensemble_seed)?;
    let per_dup = ens
        .duplicates
        .iter()
        .zip(&ens.shots_per_duplicate)
        .enumerate()
        .map(|(k, (dup, &m))| {
            let p_even = sim.p_even(dup, p)?.clamp(0.0, 1.0);
            let mut rng = task_rng(sample_seed, &[k as u64]);
            Ok((p_even, m, sample_parities_with(p_even, m, &mut rng)?.even_count))
        })
        .collect::<Result<Vec<_>>>()?;
    let p_even_exact = per_dup.iter().map(|&(p, m, _)| p * m as f64).sum::<f64>() / shots as f64;
    Ok(Pooled {
        p_even_exact,
        even_count: per_dup.iter().map(|d| d.2).sum(),
        manifest: ens.manifest(),
    })
}

fn arms(arm: Arm) -> Vec<&'static str> {
    let mut out = Vec::new();
    if arm.bare() {
        out.push("bare");
    }
    if arm.rc() {
        out.push("rc");
    }
    out
}

/// Exact and sampled even-parity probabilities for each layer count, with a
/// layer-fidelity fit per arm.
pub fn run_scan_l(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    expect_scenario(cfg, Scenario::ScanL)?;
    let s = setup(cfg)?;
    let layers = cfg.layer_list();
    let shots = cfg.shots / layers.len() as u64;
    let circuits = layers
        .par_iter()
        .map(|&l| build_enhanced_circuit(&s.ansatz, &s.observable, l as usize))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut ensembles = Vec::new();
    for arm in arms(cfg.arm) {
        let points = layers
            .par_iter()
            .zip(&circuits)
            .map(|(&l, c)| -> Result<(f64, u64, Vec<ManifestEntry>)> {
                if arm == "bare" {
                    let p = s.sim.p_even(c, &s.observable)?.clamp(0.0, 1.0);
                    let mut rng = task_rng(cfg.seed, &[TAG_SAMPLE, METHOD_RAE, l as u64]);
                    Ok((p, sample_parities_with(p, shots, &mut rng)?.even_count, Vec::new()))
                } else {
                    let pooled = pooled_rc(
                        &s.sim,
                        c,
                        &s.observable,
                        cfg.duplicates,
                        shots,
                        derive_seed(cfg.seed, &[TAG_RC, l as u64]),
                        derive_seed(cfg.seed, &[TAG_SAMPLE, METHOD_RC_RAE, l as u64]),
                    )?;
                    Ok((pooled.p_even_exact, pooled.even_count, pooled.manifest))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_layer_fidelity(
            &layers.iter().zip(&points).map(|(&l, p)| (l, p.0)).collect::<Vec<_>>(),
            s.pi_exact,
        )?;
        for (&l, (p, even, manifest)) in layers.iter().zip(points) {
            rows.push(ScanLRow {
                arm: arm.to_string(),
                layers: l,
                p_even_exact: p,
                p_even_sampled: even as f64 / shots as f64,
                f_fit: fit.f,
                r2: fit.r2,
            });
            if arm == "rc" {
                ensembles.push(json!({ "L": l, "duplicates": manifest }));
            }
        }
    }
    Ok(ScenarioOutput {
        table: ResultTable::ScanL(rows),
        details: json!({
            "pi_exact": s.pi_exact,
            "shots_per_layer": shots,
            "fit_source": "p_even_exact",
            "rc_ensembles": ensembles,
        }),
    })
}

/// Sweep of the hydrogen ansatz angle at a fixed layer count, with a layer-fidelity
/// fit per arm over the whole sweep.
pub fn run_scan_pi(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    expect_scenario(cfg, Scenario::ScanPi)?;
    let s = setup(cfg)?;
    let mut rng = task_rng(cfg.seed, &[TAG_SWEEP]);
    let thetas: Vec<f64> = (0..cfg.sweep_points).map(|_| rng.random_range(-PI..PI)).collect();
    let layer = cfg.layer;

    let points = thetas
        .par_iter()
        .enumerate()
        .map(|(k, &theta0)| -> Result<(f64, Option<f64>, Option<f64>)> {
            let a = build_h2_ansatz(theta0)?;
            let pi = noiseless_expectation(&a, &s.observable)?;
            let c = build_enhanced_circuit(&a, &s.observable, layer as usize)?;
            let bare = if cfg.arm.bare() {
                Some(s.sim.p_even(&c, &s.observable)?)
            } else {
                None
            };
            let rc = if cfg.arm.rc() {
                let pooled = pooled_rc(
                    &s.sim,
                    &c,
                    &s.observable,
                    cfg.duplicates,
                    cfg.shots,
                    derive_seed(cfg.seed, &[TAG_RC, k as u64]),
                    derive_seed(cfg.seed, &[TAG_SAMPLE, METHOD_RC_RAE, k as u64]),
                )?;
                Some(pooled.p_even_exact)
            } else {
                None
            };
            Ok((pi, bare, rc))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for arm in arms(cfg.arm) {
        let sweep: Vec<(f64, f64)> = points
            .iter()
            .map(|&(pi, bare, rc)| (pi, if arm == "bare" { bare } else { rc }.expect("arm computed")))
            .collect();
        let fit = fit_sweep_fidelity(&sweep, layer)?;
        rows.extend(thetas.iter().zip(&sweep).map(|(&theta0, &(pi, p))| ScanPiRow {
            arm: arm.to_string(),
            theta0,
            pi_exact: pi,
            p_even: p,
            f_fit: fit.f,
            r2: fit.r2,
        }));
    }
    Ok(ScenarioOutput {
        table: ResultTable::ScanPi(rows),
        details: json!({
            "layer": layer,
            "theta0_distribution": "uniform[-pi, pi)",
            "p_even_source": "exact, shot-weighted over the RC ensemble",
        }),
    })
}

fn sample_dataset<F>(depths: u32, shots: u64, mut counts: F) -> Result<ParityDataset>
where
    F: FnMut(u32) -> Result<u64>,
{
    let records = (0..=depths)
        .map(|l| {
            Ok(ParityRecord {
                layers: l,
                shots,
                even_count: counts(l)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ParityDataset::new(records)
}

/// Estimates from one repeat: `(SS, per-Lmax RAE, per-Lmax RC-RAE, flat flags)`.
type RepeatEstimates = (Option<f64>, Vec<f64>, Vec<f64>, usize);

/// Single-shot, RAE and RC-assisted RAE estimates of Π over independent datasets.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    expect_scenario(cfg, Scenario::Compare)?;
    let s = setup(cfg)?;
    let lmaxes = cfg.layer_list();
    let deepest = *lmaxes.last().expect("validated non-empty");
    let circuits = (0..=deepest)
        .into_par_iter()
        .map(|l| build_enhanced_circuit(&s.ansatz, &s.observable, l as usize))
        .collect::<Result<Vec<_>>>()?;
    let bare_p = circuits
        .par_iter()
        .map(|c| Ok(s.sim.p_even(c, &s.observable)?.clamp(0.0, 1.0)))
        .collect::<Result<Vec<f64>>>()?;

    let n_a = s.ansatz.two_qubit_gate_count() as u32;
    let n_o = match cfg.n_o {
        Some(n) => n,
        None => build_reflection_r0(cfg.num_qubits())?.two_qubit_gate_count() as u32,
    };
    let opts = cfg.estimator_options();
    let opts_for = |lmax: u32| -> EstimatorOptions {
        // A single depth cannot separate Π from f.
        if lmax == 0 {
            opts.with_fixed_f(1.0)
        } else {
            opts
        }
    };

    let per_repeat = (0..cfg.repeats as u64)
        .into_par_iter()
        .map(|r| -> Result<RepeatEstimates> {
            let mut flat = 0;
            let ss = if cfg.arm.bare() {
                let mut rng = task_rng(cfg.seed, &[TAG_SAMPLE, METHOD_SS, r]);
                let rec = sample_parities_with(bare_p[0], cfg.shots, &mut rng)?;
                Some(2.0 * rec.fraction_even() - 1.0)
            } else {
                None
            };
            let mut rae = Vec::new();
            let mut rc_rae = Vec::new();
            for &lmax in &lmaxes {
                let m = cfg.shots / (lmax as u64 + 1);
                let l64 = lmax as u64;
                if cfg.arm.bare() {
                    let ds = sample_dataset(lmax, m, |l| {
                        let mut rng = task_rng(cfg.seed, &[TAG_SAMPLE, METHOD_RAE, r, l64, l as u64]);
                        Ok(sample_parities_with(bare_p[l as usize], m, &mut rng)?.even_count)
                    })?;
                    let est = estimate(&ds, &opts_for(lmax), derive_seed(cfg.seed, &[TAG_ESTIMATE, METHOD_RAE, r, l64]))?;
                    flat += est.flat as usize;
                    rae.push(est.params.pi_hat);
                }
                if cfg.arm.rc() {
                    let ds = sample_dataset(lmax, m, |l| {
                        let path = [r, l64, l as u64];
                        let pooled = pooled_rc(
                            &s.sim,
                            &circuits[l as usize],
                            &s.observable,
                            cfg.duplicates,
                            m,
                            derive_seed(cfg.seed, &[&[TAG_RC][..], &path].concat()),
                            derive_seed(cfg.seed, &[&[TAG_SAMPLE, METHOD_RC_RAE][..], &path].concat()),
                        )?;
                        Ok(pooled.even_count)
                    })?;
                    let est = estimate(&ds, &opts_for(lmax), derive_seed(cfg.seed, &[TAG_ESTIMATE, METHOD_RC_RAE, r, l64]))?;
                    flat += est.flat as usize;
                    rc_rae.push(est.params.pi_hat);
                }
            }
            Ok((ss, rae, rc_rae, flat))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let row = |method: &str, lmax: u32, estimates: &[f64]| -> Result<CompareRow> {
        let sum = summarize(estimates, s.pi_exact, runtime(cfg.shots, lmax, n_o, n_a)?)?;
        Ok(CompareRow {
            method: method.to_string(),
            lmax,
            mean: sum.mean,
            bias: sum.bias,
            rmse: sum.rmse,
            se_mean: sum.se_mean,
            se_rmse: sum.se_rmse,
            runtime_units_a: sum.runtime,
        })
    };
    if cfg.arm.bare() {
        let ss: Vec<f64> = per_repeat.iter().filter_map(|r| r.0).collect();
        rows.push(row("SS", 0, &ss)?);
        for (k, &lmax) in lmaxes.iter().enumerate() {
            let est: Vec<f64> = per_repeat.iter().map(|r| r.1[k]).collect();
            rows.push(row("RAE", lmax, &est)?);
        }
    }
    if cfg.arm.rc() {
        for (k, &lmax) in lmaxes.iter().enumerate() {
            let est: Vec<f64> = per_repeat.iter().map(|r| r.2[k]).collect();
            rows.push(row("RC-RAE", lmax, &est)?);
        }
    }
    Ok(ScenarioOutput {
        table: ResultTable::Compare(rows),
        details: json!({
            "pi_exact": s.pi_exact,
            "n_A": n_a,
            "n_O": n_o,
            "shots_per_depth": lmaxes.iter().map(|&l| json!({"Lmax": l, "shots": cfg.shots / (l as u64 + 1)})).collect::<Vec<_>>(),
            "flat_estimates": per_repeat.iter().map(|r| r.3).sum::<usize>(),
            "ss_estimator": "direct average over all shots at L = 0",
            "lmax0_estimator": "f fixed to 1",
        }),
    })
}

/// Dispatches on the configured scenario.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ScenarioOutput> {
    match cfg.scenario {
        Scenario::ScanL => run_scan_l(cfg),
        Scenario::ScanPi => run_scan_pi(cfg),
        Scenario::Compare => run_compare(cfg),
    }
}
