//! Builders for the state-preparation ansätze and the enhanced-sampling circuits.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Cycle, Gate, SingleQubitOp};
use crate::error::{Error, Result};
use crate::pauli::{Observable, Pauli};

/// Hydrogen ansatz angle giving `⟨XXXX⟩ ≈ 0.2238`.
pub const H2_REFERENCE_THETA0: f64 = -6.057;

/// LDCA angles giving `⟨XX⟩ ≈ 0.39`.
pub const LDCA_REFERENCE_THETAS: [f64; 8] = [-1.491, 1.838, 1.977, 2.305, -3.124, 2.049, 1.254, -1.791];

/// Four-qubit hydrogen ansatz: `X` on q0 and q1, `Ry(theta0)` on q2, then
/// CNOTs controlled by q2 onto q0, q1 and q3.
pub fn build_h2_ansatz(theta0: f64) -> Result<Circuit> {
    if !theta0.is_finite() {
        return Err(Error::InvalidParameter(format!("theta0 = {theta0} is not finite")));
    }
    let gates = [
        Gate::single(0, SingleQubitOp::X),
        Gate::single(1, SingleQubitOp::X),
        Gate::single(2, SingleQubitOp::Ry(theta0)),
        Gate::cnot(2, 0),
        Gate::cnot(2, 1),
        Gate::cnot(2, 3),
    ];
    Ok(Circuit::from_gates(4, gates)?.normalized())
}

/// Step of the two-qubit low-depth circuit ansatz. Angles are `scale * thetas[index]`.
#[derive(Clone, Copy)]
enum LdcaStep {
    Fixed(usize, SingleQubitOp),
    Rx(usize, f64),
    Rz { qubit: usize, index: usize, scale: f64 },
    Cx,
}

const fn rz(qubit: usize, index: usize, scale: f64) -> LdcaStep {
    LdcaStep::Rz { qubit, index, scale }
}

const LDCA_STEPS: [LdcaStep; 65] = {
    use LdcaStep::{Cx, Fixed, Rx};
    use SingleQubitOp::{H, X};
    const P: f64 = FRAC_PI_2;
    [
        Fixed(0, X), rz(0, 0, 1.0), Rx(0, P), rz(1, 1, 1.0), Fixed(1, H),
        Cx, rz(1, 2, 2.0), Cx,
        Rx(0, -P), Fixed(0, H), Fixed(1, H), Rx(1, P),
        Cx, rz(1, 2, -2.0), Cx,
        Fixed(0, H), Rx(1, -P),
        Cx, rz(1, 3, 2.0), Cx,
        Rx(0, P), Rx(1, P),
        Cx, rz(1, 4, 2.0), Cx,
        Rx(0, -P), Fixed(0, H), Rx(1, -P), Fixed(1, H),
        Cx, rz(1, 4, 2.0), Cx,
        Fixed(0, H), Fixed(1, H), Rx(0, P), Fixed(1, H),
        Cx, rz(1, 5, 2.0), Cx,
        Rx(0, -P), Fixed(0, H), Fixed(1, H), Rx(1, P),
        Cx, rz(1, 5, -2.0), Cx,
        Fixed(0, H), Rx(1, -P),
        Cx, rz(1, 6, 2.0), Cx,
        Rx(0, P), Rx(1, P),
        Cx, rz(1, 7, 2.0), Cx,
        Rx(0, -P), Fixed(0, H), Rx(1, -P), Fixed(1, H),
        Cx, rz(1, 7, 2.0), Cx,
        Fixed(0, H), Fixed(1, H),
    ]
};

/// Two-qubit low-depth circuit ansatz with 20 CNOTs (control q0, target q1).
pub fn build_ldca(thetas: &[f64]) -> Result<Circuit> {
    if thetas.len() != 8 {
        return Err(Error::InvalidParameter(format!(
            "LDCA takes 8 angles, got {}",
            thetas.len()
        )));
    }
    if let Some(bad) = thetas.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidParameter(format!("LDCA angle {bad} is not finite")));
    }
    let gates = LDCA_STEPS.iter().map(|step| match *step {
        LdcaStep::Fixed(q, op) => Gate::single(q, op),
        LdcaStep::Rx(q, a) => Gate::single(q, SingleQubitOp::Rx(a)),
        LdcaStep::Rz { qubit, index, scale } => {
            Gate::single(qubit, SingleQubitOp::Rz(scale * thetas[index]))
        }
        LdcaStep::Cx => Gate::cnot(0, 1),
    });
    Ok(Circuit::from_gates(2, gates)?.normalized())
}

/// Reflection about `|0…0⟩`, equal to `diag(1, −1, …, −1)` up to global phase.
///
/// Written as the phase polynomial `Π_S exp(−iπ 2^{−n} Z_S)` over all non-empty
/// qubit subsets S. Subsets sharing their highest qubit are walked in Gray-code
/// order with a CNOT parity ladder onto that qubit, giving `2^n − 2` CNOTs.
pub fn build_reflection_r0(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidParameter("reflection needs at least one qubit".into()));
    }
    let angle = 2.0 * PI / (1u64 << n) as f64;
    let mut gates = Vec::new();
    for target in 0..n {
        gates.push(Gate::single(target, SingleQubitOp::Rz(angle)));
        let walks = 1usize << target;
        for step in 1..walks {
            let flipped = step.trailing_zeros() as usize;
            gates.push(Gate::cnot(flipped, target));
            gates.push(Gate::single(target, SingleQubitOp::Rz(angle)));
        }
        if target > 0 {
            // Last Gray code word has only the top control bit set.
            gates.push(Gate::cnot(target - 1, target));
        }
    }
    Ok(Circuit::from_gates(n, gates)?.normalized())
}

fn pauli_cycle(p: &Observable) -> Result<Cycle> {
    Cycle::easy(
        p.pauli()
            .factors()
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != Pauli::I)
            .map(|(q, f)| Gate::single(q, SingleQubitOp::from_pauli(*f)))
            .collect(),
    )
}

/// Grover iterate `G = A · R0 · A† · P`, applied in the order P, A†, R0, A.
pub fn build_grover_iterate(a: &Circuit, p: &Observable) -> Result<Circuit> {
    let n = a.num_qubits();
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.num_qubits(),
        });
    }
    let mut g = Circuit::new(n);
    g.push_cycle(pauli_cycle(p)?)?;
    g.append(&a.inverse())?;
    g.append(&build_reflection_r0(n)?)?;
    g.append(a)?;
    Ok(g.normalized())
}

/// Easy cycle rotating the eigenbasis of `p` onto the computational basis:
/// `H` on X factors, `Rx(π/2)` on Y factors, nothing on Z and I.
pub fn basis_change(p: &Observable) -> Result<Cycle> {
    if p.pauli().is_identity() {
        return Err(Error::InvalidParameter(
            "cannot measure the identity observable".into(),
        ));
    }
    Cycle::easy(
        p.pauli()
            .factors()
            .iter()
            .enumerate()
            .filter_map(|(q, f)| match f {
                Pauli::X => Some(Gate::single(q, SingleQubitOp::H)),
                Pauli::Y => Some(Gate::single(q, SingleQubitOp::Rx(FRAC_PI_2))),
                _ => None,
            })
            .collect(),
    )
}

/// `A`, then `layers` Grover iterates, then the basis change for measuring `p`.
pub fn build_enhanced_circuit(a: &Circuit, p: &Observable, layers: usize) -> Result<Circuit> {
    let n = a.num_qubits();
    if p.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: p.num_qubits(),
        });
    }
    let mut c = a.clone();
    if layers > 0 {
        let g = build_grover_iterate(a, p)?;
        for _ in 0..layers {
            c.append(&g)?;
        }
    }
    c.push_cycle(basis_change(p)?)?;
    Ok(c.normalized())
}
