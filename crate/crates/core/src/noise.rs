//! Incoherent amplitude/phase damping and coherent residual-ZZ CNOT errors.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_single_left, apply_single_right_adjoint, bit, embed_single, expm_i_hermitian, real, Mat2,
    Matrix, ONE, ZERO,
};
use crate::pauli::Pauli;
use crate::sim::DensityMatrix;

pub const DEFAULT_T_STEP: f64 = 100e-9;
pub const DEFAULT_T_GATE: f64 = 400e-9;

/// Converts a coupling quoted as `ξ/2π` in kHz into rad/s.
pub fn zz_khz_to_rad_per_s(khz: f64) -> f64 {
    2.0 * PI * khz * 1e3
}

/// Physical noise parameters. Times in seconds, couplings in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub t1: f64,
    pub t2: f64,
    pub t_step: f64,
    pub t_gate: f64,
    /// ZZ coupling strength keyed by `(min, max)` qubit pair.
    pub zz_couplings: BTreeMap<(usize, usize), f64>,
    pub incoherent: bool,
    pub coherent: bool,
}

impl NoiseConfig {
    /// Damping-only configuration with default step and gate durations.
    pub fn incoherent(t1: f64, t2: f64) -> Self {
        NoiseConfig {
            t1,
            t2,
            t_step: DEFAULT_T_STEP,
            t_gate: DEFAULT_T_GATE,
            zz_couplings: BTreeMap::new(),
            incoherent: true,
            coherent: false,
        }
    }

    /// Adds a uniform coupling `xi` (rad/s) on the linear chain `(i, i+1)` of `n` qubits
    /// and enables coherent errors.
    pub fn with_chain_coupling(mut self, n: usize, xi: f64) -> Self {
        for i in 0..n.saturating_sub(1) {
            self.zz_couplings.insert((i, i + 1), xi);
        }
        self.coherent = true;
        self
    }

    pub fn with_coupling(mut self, a: usize, b: usize, xi: f64) -> Self {
        self.zz_couplings.insert(pair_key(a, b), xi);
        self.coherent = true;
        self
    }

    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.zz_couplings.get(&pair_key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("T1", self.t1),
            ("T2", self.t2),
            ("t_step", self.t_step),
            ("t_gate", self.t_gate),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        for (&(a, b), xi) in &self.zz_couplings {
            if a == b || !xi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "bad ZZ coupling {xi} on pair ({a}, {b})"
                )));
            }
        }
        if self.incoherent {
            damping_kraus(self.t1, self.t2, self.t_step)?;
            damping_kraus(self.t1, self.t2, self.t_gate)?;
        }
        Ok(())
    }
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Mat2>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Mat2>) -> Self {
        KrausChannel { operators }
    }

    pub fn operators(&self) -> &[Mat2] {
        &self.operators
    }

    /// Largest deviation of `Σ E†E` from the identity.
    pub fn completeness_error(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Mat2::zeros(), |acc, e| acc + e.adjoint() * e);
        (sum - Mat2::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The three-operator damping channel
/// `E1 = diag(1, √(1−α−β))`, `E2 = √α |0⟩⟨1|`, `E3 = √β |1⟩⟨1|`
/// with `α = 1 − e^{−t/T1}` and `β = 1 − e^{−t/T2}`.
pub fn damping_kraus(t1: f64, t2: f64, t_step: f64) -> Result<KrausChannel> {
    if !(t1 > 0.0 && t2 > 0.0 && t_step >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "damping needs T1, T2 > 0 and t_step >= 0 (T1 = {t1}, T2 = {t2}, t_step = {t_step})"
        )));
    }
    let alpha = -(-t_step / t1).exp_m1();
    let beta = -(-t_step / t2).exp_m1();
    if alpha + beta > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha + beta = {} > 1 for T1 = {t1} s, T2 = {t2} s, t_step = {t_step} s",
            alpha + beta
        )));
    }
    Ok(KrausChannel::new(vec![
        Mat2::new(ONE, ZERO, ZERO, real((1.0 - alpha - beta).sqrt())),
        Mat2::new(ZERO, real(alpha.sqrt()), ZERO, ZERO),
        Mat2::new(ZERO, ZERO, ZERO, real(beta.sqrt())),
    ]))
}

/// Applies a single-qubit channel to one qubit of `rho`.
pub fn apply_channel_to_qubit(rho: &mut DensityMatrix, channel: &KrausChannel, qubit: usize) {
    let n = rho.num_qubits();
    let src = rho.matrix().clone();
    let mut acc = Matrix::zeros(src.nrows(), src.ncols());
    for e in channel.operators() {
        let mut term = src.clone();
        apply_single_left(&mut term, e, qubit, n);
        apply_single_right_adjoint(&mut term, e, qubit, n);
        acc += term;
    }
    *rho.matrix_mut() = acc;
}

/// The channel tensored over every qubit, applied one qubit at a time.
pub fn apply_incoherent(rho: &DensityMatrix, channel: &KrausChannel) -> DensityMatrix {
    let mut out = rho.clone();
    for q in 0..rho.num_qubits() {
        apply_channel_to_qubit(&mut out, channel, q);
    }
    out
}

/// Residual ZZ generator for a CNOT on `(control, target)`: the coupling of the
/// pair itself plus every configured coupling that touches either qubit.
pub fn zz_hamiltonian(control: usize, target: usize, cfg: &NoiseConfig, n: usize) -> Matrix {
    let dim = 1usize << n;
    let mut diag = vec![0.0; dim];
    for (&(a, b), &xi) in &cfg.zz_couplings {
        let touches = a == control || a == target || b == control || b == target;
        if !touches || xi == 0.0 || a >= n || b >= n {
            continue;
        }
        for (k, d) in diag.iter_mut().enumerate() {
            let sign = if bit(k, a, n) == bit(k, b, n) { 1.0 } else { -1.0 };
            *d += xi * sign;
        }
    }
    Matrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, diag.into_iter().map(real)))
}

/// CNOT built from the cross-resonance decomposition with the ZZ generator
/// switched on during the entangling window:
///
/// `e^{−iπ/4} e^{iπ/4 Z_c} exp(i(−Γ Z_c X_t + Ξ) t_gate) e^{iπ/4 X_t}`, `Γ = π / (4 t_gate)`.
///
/// The sign of the `Γ` term is the one that reproduces CNOT when `Ξ = 0`.
pub fn noisy_cnot_unitary(control: usize, target: usize, cfg: &NoiseConfig, n: usize) -> Matrix {
    let z = Pauli::Z.matrix();
    let x = Pauli::X.matrix();
    let gamma = PI / (4.0 * cfg.t_gate);
    let zx = embed_single(&z, control, n) * embed_single(&x, target, n);
    let generator = zx * real(-gamma) + zz_hamiltonian(control, target, cfg, n);
    let entangler = expm_i_hermitian(&generator, cfg.t_gate);
    let rot = |m: &Mat2, q: usize| {
        let (s, co) = FRAC_PI_4.sin_cos();
        let local = Mat2::identity() * real(co) + m * Complex64::new(0.0, s);
        embed_single(&local, q, n)
    };
    let global = Complex64::from_polar(1.0, -FRAC_PI_4);
    rot(&z, control) * entangler * rot(&x, target) * global
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{
        cnot_matrix, kron, mat2_to_dense, max_abs_diff, phase_aligned_distance, trace,
        unitarity_error,
    };
    use proptest::prelude::*;

    #[test]
    fn zero_step_is_identity_channel() {
        let ch = damping_kraus(84e-6, 110e-6, 0.0).unwrap();
        assert_eq!(ch.operators()[0], Mat2::identity());
        assert_eq!(ch.operators()[1], Mat2::zeros());
        assert_eq!(ch.operators()[2], Mat2::zeros());
    }

    #[test]
    fn device_parameters_give_complete_channel() {
        let (t1, t2, dt) = (84e-6, 110e-6, 100e-9);
        let ch = damping_kraus(t1, t2, dt).unwrap();
        let alpha = 1.0 - (-dt / t1).exp();
        let beta = 1.0 - (-dt / t2).exp();
        assert!((ch.operators()[1][(0, 1)].re - alpha.sqrt()).abs() < 1e-15);
        assert!((ch.operators()[2][(1, 1)].re - beta.sqrt()).abs() < 1e-15);
        assert!(ch.completeness_error() < 1e-14);
    }

    #[test]
    fn excessive_damping_is_rejected() {
        let err = damping_kraus(1e-6, 1e-6, 1e-5).unwrap_err();
        assert!(err.to_string().contains("T1"));
    }

    #[test]
    fn maximally_mixed_keeps_unit_trace() {
        let ch = damping_kraus(20e-6, 30e-6, 1e-6).unwrap();
        let rho = DensityMatrix::maximally_mixed(3);
        let out = apply_incoherent(&rho, &ch);
        assert!((trace(out.matrix()).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn amplitude_damping_of_excited_state() {
        // β = 0 needs T2 → ∞; use a huge T2.
        let ch = damping_kraus(10e-6, 1e300, 2e-6).unwrap();
        let alpha = 1.0 - (-0.2f64).exp();
        let mut rho = DensityMatrix::zero_state(1);
        rho.matrix_mut()[(0, 0)] = ZERO;
        rho.matrix_mut()[(1, 1)] = ONE;
        let out = apply_incoherent(&rho, &ch);
        assert!((out.matrix()[(0, 0)].re - alpha).abs() < 1e-14);
        assert!((out.matrix()[(1, 1)].re - (1.0 - alpha)).abs() < 1e-14);
    }

    fn random_state(n: usize, seed: u64) -> DensityMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let dim = 1 << n;
        let a = Matrix::from_fn(dim, dim, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let m = &a * a.adjoint();
        let tr = trace(&m);
        DensityMatrix::from_matrix(m / tr).unwrap()
    }

    fn tensor_sum(rho: &DensityMatrix, ch: &KrausChannel) -> Matrix {
        let n = rho.num_qubits();
        let ops: Vec<Matrix> = ch.operators().iter().map(mat2_to_dense).collect();
        let mut total = Matrix::zeros(1 << n, 1 << n);
        let combos = ops.len().pow(n as u32);
        for mut idx in 0..combos {
            let mut e = Matrix::identity(1, 1);
            for _ in 0..n {
                e = kron(&e, &ops[idx % ops.len()]);
                idx /= ops.len();
            }
            total += &e * rho.matrix() * e.adjoint();
        }
        total
    }

    #[test]
    fn sequential_equals_tensor_sum() {
        let ch = damping_kraus(30e-6, 45e-6, 3e-6).unwrap();
        for n in 1..=3 {
            let rho = random_state(n, 7 + n as u64);
            let seq = apply_incoherent(&rho, &ch);
            assert!(max_abs_diff(seq.matrix(), &tensor_sum(&rho, &ch)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn identity_channel_leaves_state() {
        let ch = damping_kraus(1.0, 1.0, 0.0).unwrap();
        let rho = random_state(2, 3);
        assert!(max_abs_diff(apply_incoherent(&rho, &ch).matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn empty_coupling_map_gives_zero_generator() {
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6);
        assert!(zz_hamiltonian(0, 1, &cfg, 3).iter().all(|z| *z == ZERO));
    }

    #[test]
    fn single_coupling_is_zz() {
        let xi = 1234.5;
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6).with_coupling(0, 1, xi);
        let z = mat2_to_dense(&Pauli::Z.matrix());
        let expected = kron(&z, &z) * real(xi);
        assert!(max_abs_diff(&zz_hamiltonian(0, 1, &cfg, 2), &expected) < 1e-12);
    }

    #[test]
    fn spectator_terms_follow_chain() {
        let xi = 2.0e5;
        let n = 4;
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6).with_chain_coupling(n, xi);
        let zz = |a: usize, b: usize| {
            embed_single(&Pauli::Z.matrix(), a, n) * embed_single(&Pauli::Z.matrix(), b, n)
        };
        let expected = (zz(0, 1) + zz(1, 2) + zz(2, 3)) * real(xi);
        assert!(max_abs_diff(&zz_hamiltonian(1, 2, &cfg, n), &expected) < 1e-9);
        // CNOT on (0, 1) only sees (0,1) and the spectator (1,2).
        let expected = (zz(0, 1) + zz(1, 2)) * real(xi);
        assert!(max_abs_diff(&zz_hamiltonian(0, 1, &cfg, n), &expected) < 1e-9);
    }

    #[test]
    fn noise_free_limit_is_cnot() {
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6);
        for (c, t, n) in [(0, 1, 2), (1, 0, 2), (2, 0, 4), (1, 3, 4)] {
            let u = noisy_cnot_unitary(c, t, &cfg, n);
            assert!(phase_aligned_distance(&u, &cnot_matrix(c, t, n)) < 1e-10);
        }
    }

    #[test]
    fn fidelity_decreases_with_coupling() {
        let ideal = cnot_matrix(0, 1, 2);
        let mut prev_fid = 1.0;
        let mut prev_dist = 0.0;
        for khz in [10.0, 45.0, 75.0] {
            let cfg = NoiseConfig::incoherent(84e-6, 110e-6)
                .with_coupling(0, 1, zz_khz_to_rad_per_s(khz));
            let u = noisy_cnot_unitary(0, 1, &cfg, 2);
            assert!(unitarity_error(&u) < 1e-10);
            let fid = trace(&(ideal.adjoint() * &u)).norm() / 4.0;
            let dist = phase_aligned_distance(&u, &ideal);
            assert!(fid < prev_fid && dist > prev_dist, "{khz} kHz");
            prev_fid = fid;
            prev_dist = dist;
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = NoiseConfig::incoherent(84e-6, 110e-6);
        assert!(cfg.validate().is_ok());
        cfg.t_gate = -1.0;
        assert!(cfg.validate().is_err());
        let cfg = NoiseConfig::incoherent(84e-6, 110e-6).with_coupling(2, 2, 1.0);
        assert!(cfg.validate().is_err());
    }

    proptest! {
        #[test]
        fn kraus_completeness(t1 in 1e-6..1e-3f64, t2 in 1e-6..1e-3f64, dt in 0.0..1e-6f64) {
            let ch = damping_kraus(t1, t2, dt).unwrap();
            prop_assert!(ch.completeness_error() < 1e-12);
        }

        #[test]
        fn noisy_cnot_is_unitary(khz in 0.0..500.0f64, c in 0usize..3, d in 1usize..3) {
            let t = (c + d) % 3;
            let cfg = NoiseConfig::incoherent(84e-6, 110e-6)
                .with_chain_coupling(3, zz_khz_to_rad_per_s(khz));
            prop_assert!(unitarity_error(&noisy_cnot_unitary(c, t, &cfg, 3)) < 1e-10);
        }

        #[test]
        fn channel_preserves_state_properties(seed in 0u64..1000, dt in 1e-8..5e-6f64) {
            let ch = damping_kraus(40e-6, 60e-6, dt).unwrap();
            let out = apply_incoherent(&random_state(2, seed), &ch);
            prop_assert!((trace(out.matrix()).re - 1.0).abs() < 1e-12);
            prop_assert!(max_abs_diff(out.matrix(), &out.matrix().adjoint()) < 1e-12);
            prop_assert!(out.min_eigenvalue() >= -1e-10);
        }
    }
}
