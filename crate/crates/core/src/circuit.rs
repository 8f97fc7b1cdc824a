//! Circuit IR built from alternating easy (single-qubit) and hard (CNOT) cycles.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{apply_cnot_rows, apply_single_left, c, real, Mat2, Matrix, ZERO};
use crate::pauli::Pauli;

/// Largest register for which dense matrices are built.
pub const DENSE_QUBIT_LIMIT: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitOp {
    I,
    X,
    Y,
    Z,
    H,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    /// Arbitrary 2×2 unitary, produced by gate fusion.
    Unitary(Mat2),
}

impl SingleQubitOp {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            SingleQubitOp::I => Pauli::I.matrix(),
            SingleQubitOp::X => Pauli::X.matrix(),
            SingleQubitOp::Y => Pauli::Y.matrix(),
            SingleQubitOp::Z => Pauli::Z.matrix(),
            SingleQubitOp::H => {
                let h = real(FRAC_1_SQRT_2);
                Mat2::new(h, h, h, -h)
            }
            SingleQubitOp::Rx(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Mat2::new(real(co), c(0.0, -s), c(0.0, -s), real(co))
            }
            SingleQubitOp::Ry(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Mat2::new(real(co), real(-s), real(s), real(co))
            }
            SingleQubitOp::Rz(a) => {
                let (s, co) = (a / 2.0).sin_cos();
                Mat2::new(c(co, -s), ZERO, ZERO, c(co, s))
            }
            SingleQubitOp::Unitary(m) => m,
        }
    }

    pub fn inverse(&self) -> SingleQubitOp {
        match *self {
            SingleQubitOp::Rx(a) => SingleQubitOp::Rx(-a),
            SingleQubitOp::Ry(a) => SingleQubitOp::Ry(-a),
            SingleQubitOp::Rz(a) => SingleQubitOp::Rz(-a),
            SingleQubitOp::Unitary(m) => SingleQubitOp::Unitary(m.adjoint()),
            other => other,
        }
    }

    pub fn from_pauli(p: Pauli) -> SingleQubitOp {
        match p {
            Pauli::I => SingleQubitOp::I,
            Pauli::X => SingleQubitOp::X,
            Pauli::Y => SingleQubitOp::Y,
            Pauli::Z => SingleQubitOp::Z,
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            SingleQubitOp::Rx(a) | SingleQubitOp::Ry(a) | SingleQubitOp::Rz(a) => Some(a),
            _ => None,
        }
    }

    fn same_axis(&self, other: &SingleQubitOp) -> bool {
        matches!(
            (self, other),
            (SingleQubitOp::Rx(_), SingleQubitOp::Rx(_))
                | (SingleQubitOp::Ry(_), SingleQubitOp::Ry(_))
                | (SingleQubitOp::Rz(_), SingleQubitOp::Rz(_))
        )
    }

    fn with_angle(&self, a: f64) -> SingleQubitOp {
        match self {
            SingleQubitOp::Rx(_) => SingleQubitOp::Rx(a),
            SingleQubitOp::Ry(_) => SingleQubitOp::Ry(a),
            SingleQubitOp::Rz(_) => SingleQubitOp::Rz(a),
            other => *other,
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            SingleQubitOp::Unitary(m) => m.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            op => op.angle().is_none_or(f64::is_finite),
        }
    }
}

/// Fuses a time-ordered run of single-qubit operations on one qubit.
///
/// A lone gate is kept as is, a run of rotations about one axis becomes a single
/// rotation, anything else becomes an explicit unitary.
pub fn fuse_ops(run: &[SingleQubitOp]) -> SingleQubitOp {
    match run {
        [] => SingleQubitOp::I,
        [op] => *op,
        [first, rest @ ..] if rest.iter().all(|op| op.same_axis(first)) => {
            first.with_angle(run.iter().filter_map(SingleQubitOp::angle).sum())
        }
        _ => SingleQubitOp::Unitary(
            run.iter()
                .fold(Mat2::identity(), |acc, op| op.matrix() * acc),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Single { qubit: usize, op: SingleQubitOp },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn single(qubit: usize, op: SingleQubitOp) -> Gate {
        Gate::Single { qubit, op }
    }

    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Single { qubit, .. } => vec![qubit],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Single { qubit, op } => Gate::Single {
                qubit,
                op: op.inverse(),
            },
            cnot => cnot,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match *self {
            Gate::Single { qubit, op } => {
                if qubit >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "qubit {qubit} out of range for {n} qubits"
                    )));
                }
                if !op.is_finite() {
                    return Err(Error::InvalidCircuit(format!(
                        "non-finite parameter in gate on qubit {qubit}"
                    )));
                }
            }
            Gate::Cnot { control, target } => {
                if control >= n || target >= n {
                    return Err(Error::InvalidCircuit(format!(
                        "cnot({control}->{target}) out of range for {n} qubits"
                    )));
                }
                if control == target {
                    return Err(Error::InvalidCircuit(format!(
                        "cnot control and target coincide on qubit {control}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CycleKind {
    Easy,
    Hard,
}

/// One layer of gates acting on disjoint qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    kind: CycleKind,
    gates: Vec<Gate>,
}

impl Cycle {
    pub fn easy(gates: Vec<Gate>) -> Result<Cycle> {
        let cycle = Cycle {
            kind: CycleKind::Easy,
            gates,
        };
        cycle.check_layout()?;
        Ok(cycle)
    }

    pub fn hard(gates: Vec<Gate>) -> Result<Cycle> {
        let cycle = Cycle {
            kind: CycleKind::Hard,
            gates,
        };
        cycle.check_layout()?;
        Ok(cycle)
    }

    pub fn kind(&self) -> CycleKind {
        self.kind
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn touches(&self, qubit: usize) -> bool {
        self.gates.iter().any(|g| g.qubits().contains(&qubit))
    }

    fn check_layout(&self) -> Result<()> {
        let mut seen = Vec::new();
        for gate in &self.gates {
            match (self.kind, gate) {
                (CycleKind::Easy, Gate::Cnot { .. }) => {
                    return Err(Error::InvalidCircuit("CNOT inside an easy cycle".into()))
                }
                (CycleKind::Hard, Gate::Single { .. }) => {
                    return Err(Error::InvalidCircuit(
                        "single-qubit gate inside a hard cycle".into(),
                    ))
                }
                _ => {}
            }
            for q in gate.qubits() {
                if seen.contains(&q) {
                    return Err(Error::InvalidCircuit(format!(
                        "qubit {q} used twice in one cycle"
                    )));
                }
                seen.push(q);
            }
        }
        Ok(())
    }

    /// Single-qubit operation applied to `qubit` by this easy cycle, if any.
    pub fn op_on(&self, qubit: usize) -> Option<SingleQubitOp> {
        self.gates.iter().find_map(|g| match *g {
            Gate::Single { qubit: q, op } if q == qubit => Some(op),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    cycles: Vec<Cycle>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        assert!(num_qubits > 0, "a circuit needs at least one qubit");
        Circuit {
            num_qubits,
            cycles: Vec::new(),
        }
    }

    pub fn from_gates<I: IntoIterator<Item = Gate>>(num_qubits: usize, gates: I) -> Result<Circuit> {
        let mut circuit = Circuit::new(num_qubits);
        for g in gates {
            circuit.push(g)?;
        }
        Ok(circuit)
    }

    /// Builds a circuit from explicit cycles, validating qubit ranges.
    pub fn from_cycles(num_qubits: usize, cycles: Vec<Cycle>) -> Result<Circuit> {
        for cycle in &cycles {
            for g in &cycle.gates {
                g.validate(num_qubits)?;
            }
        }
        Ok(Circuit { num_qubits, cycles })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn kinds(&self) -> Vec<CycleKind> {
        self.cycles.iter().map(Cycle::kind).collect()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> + '_ {
        self.cycles.iter().flat_map(|c| c.gates.iter())
    }

    /// Appends a gate to the last cycle if it fits there, otherwise opens a new cycle.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let kind = if gate.is_two_qubit() {
            CycleKind::Hard
        } else {
            CycleKind::Easy
        };
        match self.cycles.last_mut() {
            Some(last) if last.kind == kind && gate.qubits().iter().all(|q| !last.touches(*q)) => {
                last.gates.push(gate)
            }
            _ => self.cycles.push(Cycle {
                kind,
                gates: vec![gate],
            }),
        }
        Ok(())
    }

    pub fn push_cycle(&mut self, cycle: Cycle) -> Result<()> {
        for g in &cycle.gates {
            g.validate(self.num_qubits)?;
        }
        self.cycles.push(cycle);
        Ok(())
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        self.cycles.extend(other.cycles.iter().cloned());
        Ok(())
    }

    /// The inverse circuit: reversed cycle order with every gate inverted.
    pub fn inverse(&self) -> Circuit {
        let cycles = self
            .cycles
            .iter()
            .rev()
            .map(|c| Cycle {
                kind: c.kind,
                gates: c.gates.iter().map(Gate::inverse).collect(),
            })
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            cycles,
        }
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates().filter(|g| g.is_two_qubit()).count()
    }

    /// True when cycles strictly alternate easy/hard, starting and ending with easy.
    pub fn is_normalized(&self) -> bool {
        if self.cycles.is_empty() {
            return true;
        }
        self.cycles.len() % 2 == 1
            && self.cycles.iter().enumerate().all(|(i, c)| {
                c.kind
                    == if i % 2 == 0 {
                        CycleKind::Easy
                    } else {
                        CycleKind::Hard
                    }
            })
    }

    /// Re-layers the circuit as `E (H E)*` with at most one fused gate per qubit
    /// in every easy cycle.
    ///
    /// Gates are scheduled as early as their qubits allow. Slot `2k` is easy
    /// cycle k and slot `2k + 1` is hard cycle k.
    pub fn normalized(&self) -> Circuit {
        let n = self.num_qubits;
        let mut frontier = vec![0usize; n];
        let mut easy: Vec<Vec<Vec<SingleQubitOp>>> = Vec::new();
        let mut hard: Vec<Vec<Gate>> = Vec::new();
        let mut any = false;
        for gate in self.gates() {
            any = true;
            match *gate {
                Gate::Single { qubit, op } => {
                    let k = frontier[qubit] / 2;
                    if easy.len() <= k {
                        easy.resize_with(k + 1, || vec![Vec::new(); n]);
                    }
                    easy[k][qubit].push(op);
                }
                Gate::Cnot { control, target } => {
                    let slot = frontier[control].max(frontier[target]) + 1;
                    let k = slot / 2;
                    if hard.len() <= k {
                        hard.resize_with(k + 1, Vec::new);
                    }
                    hard[k].push(*gate);
                    frontier[control] = slot + 1;
                    frontier[target] = slot + 1;
                }
            }
        }
        if !any {
            return Circuit::new(n);
        }
        let num_hard = hard.len();
        easy.resize_with(num_hard + 1, || vec![Vec::new(); n]);
        let mut cycles = Vec::with_capacity(2 * num_hard + 1);
        for (k, runs) in easy.into_iter().enumerate() {
            let gates = runs
                .iter()
                .enumerate()
                .filter(|(_, run)| !run.is_empty())
                .map(|(q, run)| Gate::single(q, fuse_ops(run)))
                .collect();
            cycles.push(Cycle {
                kind: CycleKind::Easy,
                gates,
            });
            if k < num_hard {
                cycles.push(Cycle {
                    kind: CycleKind::Hard,
                    gates: hard[k].clone(),
                });
            }
        }
        Circuit {
            num_qubits: n,
            cycles,
        }
    }

    /// Dense unitary of the whole circuit.
    pub fn unitary(&self) -> Result<Matrix> {
        let n = self.num_qubits;
        if n > DENSE_QUBIT_LIMIT {
            return Err(Error::TooManyQubits {
                qubits: n,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let mut u = Matrix::identity(1 << n, 1 << n);
        for gate in self.gates() {
            match *gate {
                Gate::Single { qubit, op } => apply_single_left(&mut u, &op.matrix(), qubit, n),
                Gate::Cnot { control, target } => apply_cnot_rows(&mut u, control, target, n),
            }
        }
        Ok(u)
    }
}

/// Dense unitary of `c`.
pub fn unitary_of(c: &Circuit) -> Result<Matrix> {
    c.unitary()
}

pub fn two_qubit_gate_count(c: &Circuit) -> usize {
    c.two_qubit_gate_count()
}

pub fn normalize_cycles(c: &Circuit) -> Circuit {
    c.normalized()
}

// Text dump: a `qubits N` header line, then one cycle per line as
// `easy:` or `hard:` followed by space-separated gates `name(args)@qubits`.
// Names: i x y z h rx ry rz u cx. `u` carries eight numbers, the row-major
// real/imaginary parts of its matrix; `cx@c,t` lists control then target.

impl fmt::Display for SingleQubitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleQubitOp::I => write!(f, "i"),
            SingleQubitOp::X => write!(f, "x"),
            SingleQubitOp::Y => write!(f, "y"),
            SingleQubitOp::Z => write!(f, "z"),
            SingleQubitOp::H => write!(f, "h"),
            SingleQubitOp::Rx(a) => write!(f, "rx({a})"),
            SingleQubitOp::Ry(a) => write!(f, "ry({a})"),
            SingleQubitOp::Rz(a) => write!(f, "rz({a})"),
            SingleQubitOp::Unitary(m) => {
                let parts: Vec<String> = [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
                    .iter()
                    .flat_map(|z| [z.re.to_string(), z.im.to_string()])
                    .collect();
                write!(f, "u({})", parts.join(","))
            }
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Single { qubit, op } => write!(f, "{op}@{qubit}"),
            Gate::Cnot { control, target } => write!(f, "cx@{control},{target}"),
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for cycle in &self.cycles {
            let label = match cycle.kind {
                CycleKind::Easy => "easy:",
                CycleKind::Hard => "hard:",
            };
            write!(f, "{label}")?;
            for g in &cycle.gates {
                write!(f, " {g}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn parse_gate(token: &str) -> Result<Gate> {
    let err = |reason: &str| Error::Parse {
        input: token.to_string(),
        reason: reason.to_string(),
    };
    let (head, qubits) = token.split_once('@').ok_or_else(|| err("missing '@'"))?;
    let qubits = qubits
        .split(',')
        .map(|q| q.parse::<usize>().map_err(|_| err("bad qubit index")))
        .collect::<Result<Vec<_>>>()?;
    let (name, args) = match head.split_once('(') {
        Some((name, rest)) => {
            let inner = rest.strip_suffix(')').ok_or_else(|| err("unclosed '('"))?;
            let args = inner
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| err("bad number")))
                .collect::<Result<Vec<_>>>()?;
            (name, args)
        }
        None => (head, Vec::new()),
    };
    let one_qubit = |op: SingleQubitOp| match qubits.as_slice() {
        [q] => Ok(Gate::single(*q, op)),
        _ => Err(err("single-qubit gate needs exactly one qubit")),
    };
    let angle = || match args.as_slice() {
        [a] => Ok(*a),
        _ => Err(err("rotation needs exactly one angle")),
    };
    match name {
        "i" => one_qubit(SingleQubitOp::I),
        "x" => one_qubit(SingleQubitOp::X),
        "y" => one_qubit(SingleQubitOp::Y),
        "z" => one_qubit(SingleQubitOp::Z),
        "h" => one_qubit(SingleQubitOp::H),
        "rx" => one_qubit(SingleQubitOp::Rx(angle()?)),
        "ry" => one_qubit(SingleQubitOp::Ry(angle()?)),
        "rz" => one_qubit(SingleQubitOp::Rz(angle()?)),
        "u" => {
            if args.len() != 8 {
                return Err(err("u needs eight numbers"));
            }
            let z = |k: usize| c(args[2 * k], args[2 * k + 1]);
            one_qubit(SingleQubitOp::Unitary(Mat2::new(z(0), z(1), z(2), z(3))))
        }
        "cx" => match qubits.as_slice() {
            [ctl, tgt] => Ok(Gate::cnot(*ctl, *tgt)),
            _ => Err(err("cx needs control,target")),
        },
        _ => Err(err("unknown gate name")),
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Circuit> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse {
            input: String::new(),
            reason: "missing 'qubits N' header".into(),
        })?;
        let n = header
            .strip_prefix("qubits ")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Parse {
                input: header.to_string(),
                reason: "expected 'qubits N' with N > 0".into(),
            })?;
        let mut cycles = Vec::new();
        for line in lines {
            let (label, body) = line.split_once(':').ok_or_else(|| Error::Parse {
                input: line.to_string(),
                reason: "expected 'easy:' or 'hard:'".into(),
            })?;
            let gates = body
                .split_whitespace()
                .map(parse_gate)
                .collect::<Result<Vec<_>>>()?;
            let cycle = match label.trim() {
                "easy" => Cycle::easy(gates)?,
                "hard" => Cycle::hard(gates)?,
                other => {
                    return Err(Error::Parse {
                        input: other.to_string(),
                        reason: "unknown cycle kind".into(),
                    })
                }
            };
            cycles.push(cycle);
        }
        Circuit::from_cycles(n, cycles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cnot_matrix, max_abs_diff, phase_aligned_distance, ONE};
    use proptest::prelude::*;

    fn op_strategy() -> impl Strategy<Value = SingleQubitOp> {
        let angle = -7.0..7.0f64;
        prop_oneof![
            Just(SingleQubitOp::X),
            Just(SingleQubitOp::Y),
            Just(SingleQubitOp::Z),
            Just(SingleQubitOp::H),
            angle.clone().prop_map(SingleQubitOp::Rx),
            angle.clone().prop_map(SingleQubitOp::Ry),
            angle.prop_map(SingleQubitOp::Rz),
        ]
    }

    fn gate_strategy(n: usize) -> impl Strategy<Value = Gate> {
        prop_oneof![
            (0..n, op_strategy()).prop_map(|(q, op)| Gate::single(q, op)),
            (0..n, 1..n).prop_map(move |(c, d)| Gate::cnot(c, (c + d) % n)),
        ]
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(3);
        assert!(max_abs_diff(&c.unitary().unwrap(), &Matrix::identity(8, 8)) < 1e-15);
        assert_eq!(c.two_qubit_gate_count(), 0);
        assert!(c.normalized().cycles().is_empty());
    }

    #[test]
    fn single_cnot_unitary_is_permutation() {
        let c = Circuit::from_gates(2, [Gate::cnot(0, 1)]).unwrap();
        let u = c.unitary().unwrap();
        assert!(max_abs_diff(&u, &cnot_matrix(0, 1, 2)) < 1e-15);
        assert_eq!(u[(3, 2)], ONE);
        assert_eq!(u[(2, 3)], ONE);
    }

    #[test]
    fn hadamard_pair_fuses_to_identity() {
        let c = Circuit::from_gates(
            1,
            [Gate::single(0, SingleQubitOp::H), Gate::single(0, SingleQubitOp::H)],
        )
        .unwrap();
        let norm = c.normalized();
        assert_eq!(norm.cycles().len(), 1);
        let op = norm.cycles()[0].op_on(0).unwrap();
        let m = crate::linalg::mat2_to_dense(&op.matrix());
        assert!(max_abs_diff(&m, &Matrix::identity(2, 2)) < 1e-12);
    }

    #[test]
    fn same_axis_rotations_add() {
        let c = Circuit::from_gates(
            1,
            [
                Gate::single(0, SingleQubitOp::Rz(0.3)),
                Gate::single(0, SingleQubitOp::Rz(-1.1)),
            ],
        )
        .unwrap();
        match c.normalized().cycles()[0].op_on(0).unwrap() {
            SingleQubitOp::Rz(a) => assert!((a - (0.3 - 1.1)).abs() < 1e-15),
            other => panic!("expected Rz, got {other:?}"),
        }
    }

    #[test]
    fn normalization_rejects_nothing_and_alternates() {
        let c = Circuit::from_gates(
            3,
            [
                Gate::cnot(0, 1),
                Gate::cnot(1, 2),
                Gate::single(0, SingleQubitOp::H),
                Gate::cnot(0, 2),
            ],
        )
        .unwrap();
        let norm = c.normalized();
        assert!(norm.is_normalized());
        // cx(0,1) | cx(1,2) | cx(0,2) with h(0) in the easy cycle after the first hard.
        assert_eq!(norm.cycles().len(), 7);
        assert!(norm.cycles()[0].is_empty());
        assert_eq!(norm.cycles()[2].op_on(0), Some(SingleQubitOp::H));
    }

    #[test]
    fn invalid_gates_are_rejected() {
        assert!(Circuit::from_gates(2, [Gate::cnot(1, 1)]).is_err());
        assert!(Circuit::from_gates(2, [Gate::cnot(0, 2)]).is_err());
        assert!(Circuit::from_gates(2, [Gate::single(0, SingleQubitOp::Rx(f64::NAN))]).is_err());
        assert!(Cycle::easy(vec![Gate::cnot(0, 1)]).is_err());
        assert!(Cycle::hard(vec![Gate::cnot(0, 1), Gate::cnot(1, 2)]).is_err());
        assert!(Cycle::easy(vec![
            Gate::single(0, SingleQubitOp::X),
            Gate::single(0, SingleQubitOp::Z)
        ])
        .is_err());
    }

    #[test]
    fn unitary_size_limit() {
        let c = Circuit::new(DENSE_QUBIT_LIMIT + 1);
        assert!(matches!(c.unitary(), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn text_dump_round_trips() {
        let c = Circuit::from_gates(
            3,
            [
                Gate::single(0, SingleQubitOp::Rz(0.25)),
                Gate::single(1, SingleQubitOp::H),
                Gate::cnot(2, 0),
                Gate::single(0, SingleQubitOp::Ry(-1.5)),
                Gate::single(0, SingleQubitOp::X),
            ],
        )
        .unwrap()
        .normalized();
        let text = c.to_string();
        assert!(text.starts_with("qubits 3\neasy: rz(0.25)@0 h@1\nhard: cx@2,0\n"));
        let back: Circuit = text.parse().unwrap();
        assert_eq!(back, c);
        assert!("qubits 2\neasy: cx@0,1".parse::<Circuit>().is_err());
        assert!("easy: h@0".parse::<Circuit>().is_err());
    }

    #[test]
    fn inverse_undoes_circuit() {
        let c = Circuit::from_gates(
            2,
            [
                Gate::single(0, SingleQubitOp::Ry(0.4)),
                Gate::cnot(0, 1),
                Gate::single(1, SingleQubitOp::H),
            ],
        )
        .unwrap();
        let mut both = c.clone();
        both.append(&c.inverse()).unwrap();
        assert!(max_abs_diff(&both.unitary().unwrap(), &Matrix::identity(4, 4)) < 1e-14);
    }

    proptest! {
        #[test]
        fn fused_run_equals_product(ops in prop::collection::vec(op_strategy(), 5)) {
            let gates: Vec<Gate> = ops.iter().map(|op| Gate::single(0, *op)).collect();
            let c = Circuit::from_gates(1, gates).unwrap();
            let product = ops.iter().fold(Mat2::identity(), |acc, op| op.matrix() * acc);
            let fused = c.normalized().cycles()[0].op_on(0).unwrap().matrix();
            prop_assert!((fused - product).norm() < 1e-12);
        }

        #[test]
        fn normalization_preserves_unitary(gates in prop::collection::vec(gate_strategy(3), 0..25)) {
            let c = Circuit::from_gates(3, gates).unwrap();
            let norm = c.normalized();
            prop_assert!(norm.is_normalized());
            for cycle in norm.cycles() {
                prop_assert!(cycle.check_layout().is_ok());
            }
            prop_assert_eq!(norm.two_qubit_gate_count(), c.two_qubit_gate_count());
            let d = phase_aligned_distance(&norm.unitary().unwrap(), &c.unitary().unwrap());
            prop_assert!(d < 1e-10, "distance {}", d);
        }
    }
}
