use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ansatz::{build_h2_ansatz, build_ldca, H2_REFERENCE_THETA0, LDCA_REFERENCE_THETAS};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::inference::EstimatorOptions;
use crate::noise::{zz_khz_to_rad_per_s, NoiseConfig};
use crate::pauli::Observable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "scan_L")]
    ScanL,
    #[serde(rename = "scan_pi")]
    ScanPi,
    #[serde(rename = "compare")]
    Compare,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::ScanL => "scan_L",
            Scenario::ScanPi => "scan_pi",
            Scenario::Compare => "compare",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Bare,
    Rc,
    #[default]
    Both,
}

impl Arm {
    pub fn bare(self) -> bool {
        matches!(self, Arm::Bare | Arm::Both)
    }

    pub fn rc(self) -> bool {
        matches!(self, Arm::Rc | Arm::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum AnsatzSpec {
    H2 {
        #[serde(default = "default_theta0")]
        theta0: f64,
    },
    Ldca {
        #[serde(default = "default_thetas")]
        thetas: Vec<f64>,
    },
}

fn default_theta0() -> f64 {
    H2_REFERENCE_THETA0
}

fn default_thetas() -> Vec<f64> {
    LDCA_REFERENCE_THETAS.to_vec()
}

impl AnsatzSpec {
    pub fn num_qubits(&self) -> usize {
        match self {
            AnsatzSpec::H2 { .. } => 4,
            AnsatzSpec::Ldca { .. } => 2,
        }
    }

    pub fn build(&self) -> Result<Circuit> {
        match self {
            AnsatzSpec::H2 { theta0 } => build_h2_ansatz(*theta0),
            AnsatzSpec::Ldca { thetas } => build_ldca(thetas),
        }
    }

    fn default_observable(&self) -> &'static str {
        match self {
            AnsatzSpec::H2 { .. } => "XXXX",
            AnsatzSpec::Ldca { .. } => "XX",
        }
    }
}

/// Noise block of the config file. Units are carried in the key names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub t1_us: f64,
    pub t2_us: f64,
    #[serde(default = "default_t_step_ns")]
    pub t_step_ns: f64,
    #[serde(default = "default_t_gate_ns")]
    pub t_gate_ns: f64,
    /// Residual ZZ strength quoted as ξ/2π.
    #[serde(default)]
    pub zz_khz: f64,
    /// Coupled pairs; a linear chain when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zz_pairs: Option<Vec<[usize; 2]>>,
    #[serde(default = "default_true")]
    pub incoherent: bool,
    /// Defaults to on whenever `zz_khz` is non-zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherent: Option<bool>,
}

fn default_t_step_ns() -> f64 {
    100.0
}

fn default_t_gate_ns() -> f64 {
    400.0
}

fn default_true() -> bool {
    true
}

impl NoiseSpec {
    pub fn to_noise_config(&self, n: usize) -> Result<NoiseConfig> {
        let mut cfg = NoiseConfig::incoherent(self.t1_us * 1e-6, self.t2_us * 1e-6);
        cfg.t_step = self.t_step_ns * 1e-9;
        cfg.t_gate = self.t_gate_ns * 1e-9;
        cfg.incoherent = self.incoherent;
        let xi = zz_khz_to_rad_per_s(self.zz_khz);
        match &self.zz_pairs {
            None => cfg = cfg.with_chain_coupling(n, xi),
            Some(pairs) => {
                for (k, &[a, b]) in pairs.iter().enumerate() {
                    if a >= n || b >= n || a == b {
                        return Err(Error::config(
                            format!("noise.zz_pairs[{k}]"),
                            format!("pair ({a}, {b}) is not a pair of distinct qubits below {n}"),
                        ));
                    }
                    cfg = cfg.with_coupling(a, b, xi);
                }
            }
        }
        cfg.coherent = self.coherent.unwrap_or(self.zz_khz != 0.0);
        cfg.validate().map_err(|e| Error::config("noise", e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "default_pi_points")]
    pub pi_points: usize,
    #[serde(default = "default_f_points")]
    pub f_points: usize,
}

fn default_pi_points() -> usize {
    2001
}

fn default_f_points() -> usize {
    501
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            pi_points: default_pi_points(),
            f_points: default_f_points(),
        }
    }
}

/// One experiment, read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub ansatz: AnsatzSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<String>,
    /// Absent means noiseless evolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// Total shot budget `M`.
    #[serde(alias = "M")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lmax: Option<u32>,
    /// Explicit layer counts (scan_L) or Lmax values (compare); overrides `lmax`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<Vec<u32>>,
    /// Layer count of the scan_pi sweep.
    #[serde(default = "default_layer")]
    pub layer: u32,
    #[serde(default = "default_duplicates", alias = "N")]
    pub duplicates: u64,
    #[serde(default = "default_runs", alias = "B")]
    pub runs: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_sweep_points")]
    pub sweep_points: usize,
    #[serde(default)]
    pub grid: GridSpec,
    /// Override for the reflection CNOT count used in runtime accounting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_o: Option<u32>,
    #[serde(default)]
    pub arm: Arm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_layer() -> u32 {
    1
}

fn default_duplicates() -> u64 {
    20
}

fn default_runs() -> usize {
    64
}

fn default_repeats() -> usize {
    50
}

fn default_sweep_points() -> usize {
    200
}

impl ExperimentConfig {
    /// Parses and validates; errors name the offending field.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." || path == "?" { "<root>".to_string() } else { path };
            Error::config(field, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("<file>", format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn num_qubits(&self) -> usize {
        self.ansatz.num_qubits()
    }

    pub fn observable(&self) -> Result<Observable> {
        let label = self
            .observable
            .as_deref()
            .unwrap_or(self.ansatz.default_observable());
        let p: Observable = label
            .parse()
            .map_err(|e: Error| Error::config("observable", e.to_string()))?;
        if p.num_qubits() != self.num_qubits() {
            return Err(Error::config(
                "observable",
                format!(
                    "'{label}' acts on {} qubits but the ansatz has {}",
                    p.num_qubits(),
                    self.num_qubits()
                ),
            ));
        }
        if p.pauli().is_identity() {
            return Err(Error::config("observable", "the identity carries no information"));
        }
        Ok(p)
    }

    pub fn noise_config(&self) -> Result<Option<NoiseConfig>> {
        self.noise
            .as_ref()
            .map(|n| n.to_noise_config(self.num_qubits()))
            .transpose()
    }

    /// Layer counts for scan_L, or Lmax values for compare.
    pub fn layer_list(&self) -> Vec<u32> {
        match (&self.layers, self.lmax) {
            (Some(list), _) => {
                let set: BTreeSet<u32> = list.iter().copied().collect();
                set.into_iter().collect()
            }
            (None, Some(lmax)) => (0..=lmax).collect(),
            (None, None) => Vec::new(),
        }
    }

    pub fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            pi_points: self.grid.pi_points,
            f_points: self.grid.f_points,
            runs: self.runs,
            ..EstimatorOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::config("shots", "must be positive"));
        }
        if self.repeats == 0 {
            return Err(Error::config("repeats", "must be at least 1"));
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.arm.rc() && self.duplicates == 0 {
            return Err(Error::config("duplicates", "must be at least 1"));
        }
        if self.grid.pi_points < 2 {
            return Err(Error::config("grid.pi_points", "must be at least 2"));
        }
        if self.grid.f_points < 2 {
            return Err(Error::config("grid.f_points", "must be at least 2"));
        }
        match &self.ansatz {
            AnsatzSpec::H2 { theta0 } if !theta0.is_finite() => {
                return Err(Error::config("ansatz.theta0", "must be finite"));
            }
            AnsatzSpec::Ldca { thetas } if thetas.len() != 8 || thetas.iter().any(|t| !t.is_finite()) => {
                return Err(Error::config("ansatz.thetas", "expected 8 finite angles"));
            }
            _ => {}
        }
        self.observable()?;
        self.noise_config()?;
        if let Some(list) = &self.layers {
            if list.iter().collect::<BTreeSet<_>>().len() != list.len() {
                return Err(Error::config("layers", "entries must be distinct"));
            }
        }

        let layers = self.layer_list();
        match self.scenario {
            Scenario::ScanL => {
                if layers.len() < 3 {
                    return Err(Error::config("lmax", "scan_L needs at least 3 layer counts (set lmax or layers)"));
                }
                self.check_shots_per_layer(layers.len())?;
            }
            Scenario::ScanPi => {
                if !matches!(self.ansatz, AnsatzSpec::H2 { .. }) {
                    return Err(Error::config("ansatz.kind", "scan_pi sweeps theta0 and needs the h2 ansatz"));
                }
                if self.sweep_points < 3 {
                    return Err(Error::config("sweep_points", "must be at least 3"));
                }
                self.check_shots_per_layer(1)?;
            }
            Scenario::Compare => {
                if layers.is_empty() {
                    return Err(Error::config("lmax", "compare needs lmax or layers"));
                }
                if self.repeats < 2 {
                    return Err(Error::config("repeats", "compare needs at least 2 repeats for error bars"));
                }
                let deepest = *layers.last().expect("non-empty");
                self.check_shots_per_layer(deepest as usize + 1)?;
            }
        }
        Ok(())
    }

    fn check_shots_per_layer(&self, depths: usize) -> Result<()> {
        let per = self.shots / depths as u64;
        let needed = if self.arm.rc() { self.duplicates } else { 1 };
        if per < needed {
            return Err(Error::config(
                "shots",
                format!("{} shots over {depths} depths leaves {per} per depth, fewer than {needed}", self.shots),
            ));
        }
        Ok(())
    }
}
