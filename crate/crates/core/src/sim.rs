//! Dense density-matrix evolution of cycle-structured circuits.

use std::collections::HashMap;

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CycleKind, Gate, DENSE_QUBIT_LIMIT};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_cnot_cols, apply_cnot_rows, apply_single_left, apply_single_right_adjoint, bit,
    max_abs_diff, trace, Mat2, Matrix, ONE,
};
use crate::noise::{apply_channel_to_qubit, damping_kraus, noisy_cnot_unitary, KrausChannel, NoiseConfig};
use crate::pauli::Observable;
use crate::seeding::task_rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    rho: Matrix,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n: usize) -> Self {
        let dim = 1usize << n;
        let mut rho = Matrix::zeros(dim, dim);
        rho[(0, 0)] = ONE;
        DensityMatrix { num_qubits: n, rho }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        DensityMatrix {
            num_qubits: n,
            rho: Matrix::identity(dim, dim) / crate::linalg::real(dim as f64),
        }
    }

    /// Wraps a matrix after checking shape, Hermiticity and unit trace.
    pub fn from_matrix(rho: Matrix) -> Result<Self> {
        let dim = rho.nrows();
        if dim != rho.ncols() || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                actual: rho.ncols(),
            });
        }
        if max_abs_diff(&rho, &rho.adjoint()) > 1e-10 {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        if (trace(&rho).re - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter("density matrix trace is not 1".into()));
        }
        Ok(DensityMatrix {
            num_qubits: dim.trailing_zeros() as usize,
            rho,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &Matrix {
        &self.rho
    }

    pub fn matrix_mut(&mut self) -> &mut Matrix {
        &mut self.rho
    }

    pub fn trace(&self) -> f64 {
        trace(&self.rho).re
    }

    pub fn purity(&self) -> f64 {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.rho, &self.rho.adjoint())
    }

    pub fn apply_single(&mut self, u: &Mat2, qubit: usize) {
        apply_single_left(&mut self.rho, u, qubit, self.num_qubits);
        apply_single_right_adjoint(&mut self.rho, u, qubit, self.num_qubits);
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        apply_cnot_rows(&mut self.rho, control, target, self.num_qubits);
        apply_cnot_cols(&mut self.rho, control, target, self.num_qubits);
    }

    /// `ρ → U ρ U†` for a full-register unitary.
    pub fn apply_unitary(&mut self, u: &Matrix) {
        self.rho = u * &self.rho * u.adjoint();
    }

    pub fn apply_channel(&mut self, channel: &KrausChannel, qubit: usize) {
        apply_channel_to_qubit(self, channel, qubit);
    }
}

/// Noise compiled for a fixed register size: damping channels for both cycle
/// durations and the noisy CNOT unitary for every ordered qubit pair.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    step_channel: Option<KrausChannel>,
    gate_channel: Option<KrausChannel>,
    cnots: HashMap<(usize, usize), Matrix>,
}

impl NoiseModel {
    pub fn new(cfg: &NoiseConfig, n: usize) -> Result<Self> {
        cfg.validate()?;
        let (step_channel, gate_channel) = if cfg.incoherent {
            (
                Some(damping_kraus(cfg.t1, cfg.t2, cfg.t_step)?),
                Some(damping_kraus(cfg.t1, cfg.t2, cfg.t_gate)?),
            )
        } else {
            (None, None)
        };
        let mut cnots = HashMap::new();
        if cfg.coherent {
            for c in 0..n {
                for t in (0..n).filter(|t| *t != c) {
                    cnots.insert((c, t), noisy_cnot_unitary(c, t, cfg, n));
                }
            }
        }
        Ok(NoiseModel {
            step_channel,
            gate_channel,
            cnots,
        })
    }
}

/// Evolves circuits on a fixed register, optionally under noise.
#[derive(Debug, Clone)]
pub struct Simulator {
    num_qubits: usize,
    noise: Option<NoiseModel>,
}

impl Simulator {
    pub fn new(num_qubits: usize, cfg: Option<&NoiseConfig>) -> Result<Self> {
        if num_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::TooManyQubits {
                qubits: num_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let noise = cfg.map(|c| NoiseModel::new(c, num_qubits)).transpose()?;
        Ok(Simulator { num_qubits, noise })
    }

    pub fn noiseless(num_qubits: usize) -> Result<Self> {
        Self::new(num_qubits, None)
    }

    /// Runs `c` from `|0…0⟩`. After each easy cycle every qubit idles through the
    /// `t_step` damping channel, after each hard cycle through the `t_gate` one.
    pub fn run(&self, c: &Circuit) -> Result<DensityMatrix> {
        let n = self.num_qubits;
        if c.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: c.num_qubits(),
            });
        }
        let mut rho = DensityMatrix::zero_state(n);
        for cycle in c.cycles() {
            for gate in cycle.gates() {
                match *gate {
                    Gate::Single { qubit, op } => rho.apply_single(&op.matrix(), qubit),
                    Gate::Cnot { control, target } => {
                        match self.noise.as_ref().and_then(|m| m.cnots.get(&(control, target))) {
                            Some(u) => rho.apply_unitary(u),
                            None => rho.apply_cnot(control, target),
                        }
                    }
                }
            }
            let channel = self.noise.as_ref().and_then(|m| match cycle.kind() {
                CycleKind::Easy => m.step_channel.as_ref(),
                CycleKind::Hard => m.gate_channel.as_ref(),
            });
            if let Some(ch) = channel {
                for q in 0..n {
                    rho.apply_channel(ch, q);
                }
            }
            debug_assert!((rho.trace() - 1.0).abs() < 1e-9);
            debug_assert!(rho.hermiticity_error() < 1e-9);
        }
        Ok(rho)
    }

    /// Exact even-parity probability of `c` measured for `p`.
    pub fn p_even(&self, c: &Circuit, p: &Observable) -> Result<f64> {
        Ok(parity_distribution(&self.run(c)?, p))
    }
}

/// Runs `c` from `|0…0⟩`; `cfg = None` is noiseless evolution.
pub fn run(c: &Circuit, cfg: Option<&NoiseConfig>) -> Result<DensityMatrix> {
    Simulator::new(c.num_qubits(), cfg)?.run(c)
}

/// Probability of even parity over the support of `p`, read off the diagonal of
/// a state that has already been rotated into the measurement basis.
pub fn parity_distribution(rho: &DensityMatrix, p: &Observable) -> f64 {
    let n = rho.num_qubits();
    let support = p.pauli().support();
    let diag = rho.matrix().diagonal();
    let z_expect: f64 = diag
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let parity = support.iter().map(|q| bit(k, *q, n)).sum::<usize>() % 2;
            if parity == 0 {
                z.re
            } else {
                -z.re
            }
        })
        .sum();
    (0.5 * (1.0 + z_expect)).clamp(0.0, 1.0)
}

/// `tr(ρ P)`.
pub fn expectation(rho: &DensityMatrix, p: &Observable) -> Result<f64> {
    if p.num_qubits() != rho.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.num_qubits(),
            actual: p.num_qubits(),
        });
    }
    Ok(trace(&(rho.matrix() * p.matrix())).re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub even_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_even_exact: Option<f64>,
}

impl ShotRecord {
    pub fn odd_count(&self) -> u64 {
        self.shots - self.even_count
    }

    pub fn fraction_even(&self) -> f64 {
        if self.shots == 0 {
            0.5
        } else {
            self.even_count as f64 / self.shots as f64
        }
    }
}

/// Binomial draw of even-parity outcomes from `rng`.
pub fn sample_parities_with<R: rand::Rng + ?Sized>(p_even: f64, shots: u64, rng: &mut R) -> Result<ShotRecord> {
    if !(0.0..=1.0).contains(&p_even) {
        return Err(Error::Domain(format!("p_even = {p_even} outside [0, 1]")));
    }
    let even_count = Binomial::new(shots, p_even)
        .map_err(|e| Error::Domain(e.to_string()))?
        .sample(rng);
    Ok(ShotRecord {
        shots,
        even_count,
        p_even_exact: Some(p_even),
    })
}

/// Binomial draw of even-parity outcomes with a generator derived from `seed`.
pub fn sample_parities(p_even: f64, shots: u64, seed: u64) -> Result<ShotRecord> {
    sample_parities_with(p_even, shots, &mut task_rng(seed, &[]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_enhanced_circuit, build_h2_ansatz, build_ldca};
    use crate::circuit::unitary_of;
    use crate::noise::zz_khz_to_rad_per_s;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn h2() -> Circuit {
        build_h2_ansatz(-6.057).unwrap()
    }

    fn xxxx() -> Observable {
        "XXXX".parse().unwrap()
    }

    #[test]
    fn noiseless_h2_is_pure() {
        let rho = run(&h2(), None).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noiseless_run_matches_unitary() {
        let c = build_enhanced_circuit(&h2(), &xxxx(), 2).unwrap();
        let u = unitary_of(&c).unwrap();
        let psi = u.column(0).into_owned();
        let expected = &psi * psi.adjoint();
        let rho = run(&c, None).unwrap();
        assert!(max_abs_diff(rho.matrix(), &expected) < 1e-10);
    }

    #[test]
    fn maximally_mixed_parity_is_half() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!((parity_distribution(&rho, &xxxx()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn standard_sampling_parity_of_h2() {
        let c = build_enhanced_circuit(&h2(), &xxxx(), 0).unwrap();
        let p = parity_distribution(&run(&c, None).unwrap(), &xxxx());
        assert!((p - 0.6119).abs() < 5e-4, "{p}");
        let pi = expectation(&run(&h2(), None).unwrap(), &xxxx()).unwrap();
        assert!((p - 0.5 * (1.0 + pi)).abs() < 1e-10);
    }

    #[test]
    fn expectation_anchors() {
        let zero = DensityMatrix::zero_state(1);
        assert!((expectation(&zero, &"Z".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let pi = expectation(&run(&h2(), None).unwrap(), &xxxx()).unwrap();
        assert!((pi - 0.2238).abs() < 5e-4);
        let ldca = build_ldca(&[-1.491, 1.838, 1.977, 2.305, -3.124, 2.049, 1.254, -1.791]).unwrap();
        let pi = expectation(&run(&ldca, None).unwrap(), &"XX".parse().unwrap()).unwrap();
        assert!((pi - 0.39).abs() < 5e-3, "{pi}");
        assert!(expectation(&zero, &xxxx()).is_err());
    }

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        use rand::Rng;
        let mut rng = task_rng(seed, &[]);
        let dim = 1 << n;
        let a = Matrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let m = &a * a.adjoint();
        let tr = trace(&m);
        DensityMatrix::from_matrix(m / tr).unwrap()
    }

    #[test]
    fn parity_matches_outcome_enumeration() {
        for seed in 0..20 {
            let rho = random_density(3, seed);
            let p: Observable = "ZIZ".parse().unwrap();
            let mut even = 0.0;
            for k in 0..8usize {
                let b0 = (k >> 2) & 1;
                let b2 = k & 1;
                if (b0 + b2) % 2 == 0 {
                    even += rho.matrix()[(k, k)].re;
                }
            }
            let got = parity_distribution(&rho, &p);
            assert!((0.0..=1.0).contains(&got));
            assert!((got - even).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_edge_cases() {
        assert_eq!(sample_parities(1.0, 1000, 3).unwrap().even_count, 1000);
        assert_eq!(sample_parities(0.0, 1000, 3).unwrap().even_count, 0);
        let r = sample_parities(0.5, 1_000_000, 11).unwrap();
        assert!((r.fraction_even() - 0.5).abs() < 5e-3);
        assert!(sample_parities(1.5, 10, 0).is_err());
        assert_eq!(sample_parities(0.3, 5000, 42), sample_parities(0.3, 5000, 42));
    }

    #[test]
    fn damping_reduces_purity() {
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6);
        let c = build_enhanced_circuit(&h2(), &xxxx(), 1).unwrap();
        let sim = Simulator::new(4, Some(&cfg)).unwrap();
        let rho = sim.run(&c).unwrap();
        assert!(rho.purity() < 1.0);
        assert!(rho.min_eigenvalue() > -1e-10);
        assert!((rho.trace() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purity_never_increases_under_dephasing() {
        // Pure dephasing is unital, so purity is monotone cycle by cycle. With
        // amplitude damping the state relaxes toward |0…0> and purity may recover.
        let cfg = NoiseConfig::incoherent(f64::MAX, 25e-6);
        let sim = Simulator::new(4, Some(&cfg)).unwrap();
        let c = build_enhanced_circuit(&h2(), &xxxx(), 1).unwrap();
        let mut prev = 1.0;
        for k in 1..=c.cycles().len() {
            let prefix = Circuit::from_cycles(4, c.cycles()[..k].to_vec()).unwrap();
            let purity = sim.run(&prefix).unwrap().purity();
            assert!(purity <= prev + 1e-12, "cycle {k}");
            prev = purity;
        }
        assert!(prev < 1.0);
    }

    #[test]
    fn coherent_noise_keeps_state_valid() {
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6).with_chain_coupling(4, zz_khz_to_rad_per_s(75.0));
        let sim = Simulator::new(4, Some(&cfg)).unwrap();
        let rho = sim.run(&build_enhanced_circuit(&h2(), &xxxx(), 2).unwrap()).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        assert!(rho.hermiticity_error() < 1e-10);
        assert!(rho.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn simulator_checks_sizes() {
        assert!(Simulator::noiseless(DENSE_QUBIT_LIMIT + 1).is_err());
        let sim = Simulator::noiseless(2).unwrap();
        assert!(sim.run(&h2()).is_err());
    }

    proptest! {
        #[test]
        fn noiseless_pipeline_follows_chebyshev(theta in -3.1..3.1f64, layers in 0usize..=10) {
            let a = build_h2_ansatz(theta).unwrap();
            let p = xxxx();
            let pi = expectation(&run(&a, None).unwrap(), &p).unwrap();
            let c = build_enhanced_circuit(&a, &p, layers).unwrap();
            let got = parity_distribution(&run(&c, None).unwrap(), &p);
            let expected = 0.5 * (1.0 + ((2 * layers + 1) as f64 * pi.clamp(-1.0, 1.0).acos()).cos());
            prop_assert!((got - expected).abs() < 1e-9);
        }

        #[test]
        fn sampling_is_deterministic(p in 0.0..=1.0f64, shots in 0u64..10_000, seed in any::<u64>()) {
            let a = sample_parities(p, shots, seed).unwrap();
            prop_assert_eq!(a, sample_parities(p, shots, seed).unwrap());
            prop_assert!(a.even_count <= a.shots);
        }
    }
}
