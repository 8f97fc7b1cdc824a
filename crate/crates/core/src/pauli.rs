//! Pauli strings with tracked phase.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{embed_single, Mat2, Matrix, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => Mat2::new(ONE, ZERO, ZERO, ONE),
            Pauli::X => Mat2::new(ZERO, ONE, ONE, ZERO),
            Pauli::Y => Mat2::new(ZERO, -I, I, ZERO),
            Pauli::Z => Mat2::new(ONE, ZERO, ZERO, -ONE),
        }
    }

    /// Symplectic (x, z) bits.
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Single-qubit product `self * rhs = i^k * letter`, returned as `(k, letter)`.
    pub fn compose(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        let k = match (self, rhs) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        };
        let (x1, z1) = self.bits();
        let (x2, z2) = rhs.bits();
        (k, Pauli::from_bits(x1 ^ x2, z1 ^ z2))
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase `i^k`, k mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> num_complex::Complex64 {
        [ONE, I, -ONE, -I][self.0 as usize]
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

/// An n-qubit Pauli operator `phase * P_0 ⊗ P_1 ⊗ ... ⊗ P_{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
    phase: Phase,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>, phase: Phase) -> Self {
        Self { factors, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(vec![Pauli::I; n], Phase::PLUS_ONE)
    }

    /// Uniformly random element of the n-qubit Pauli group modulo phase.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let factors = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
        Self::new(factors, Phase::PLUS_ONE)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    pub fn factor(&self, qubit: usize) -> Pauli {
        self.factors[qubit]
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|p| *p == Pauli::I)
    }

    /// Qubits on which the string acts non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.factors.clone(), self.phase.conj())
    }

    /// Operator product `self * rhs` with phase tracking.
    pub fn mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                actual: rhs.len(),
            });
        }
        let mut k = self.phase.power() + rhs.phase.power();
        let factors = self
            .factors
            .iter()
            .zip(&rhs.factors)
            .map(|(a, b)| {
                let (dk, p) = a.compose(*b);
                k += dk;
                p
            })
            .collect();
        Ok(PauliString::new(factors, Phase::from_power(k)))
    }

    /// Dense `2^n × 2^n` matrix including the phase.
    pub fn matrix(&self) -> Matrix {
        let n = self.len();
        let mut m = Matrix::identity(1 << n, 1 << n);
        for (q, p) in self.factors.iter().enumerate() {
            if *p != Pauli::I {
                m = embed_single(&p.matrix(), q, n) * m;
            }
        }
        m * self.phase.value()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = ["+", "+i", "-", "-i"][self.phase.power() as usize];
        write!(f, "{sign}")?;
        for p in &self.factors {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses labels such as `XXXX`, `-ZIZ`, `+iXY`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (phase, body) = if let Some(rest) = s.strip_prefix("-i") {
            (Phase::MINUS_I, rest)
        } else if let Some(rest) = s.strip_prefix("+i") {
            (Phase::PLUS_I, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, rest)
        } else {
            (Phase::PLUS_ONE, s)
        };
        if body.is_empty() {
            return Err(parse_err("empty Pauli label"));
        }
        let factors = body
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(parse_err("letters must be one of I, X, Y, Z")),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::new(factors, phase))
    }
}

/// A Hermitian Pauli observable with eigenvalues ±1 (phase fixed to +1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observable {
    pauli: PauliString,
}

impl Observable {
    pub fn new(pauli: PauliString) -> Result<Self> {
        if pauli.phase() != Phase::PLUS_ONE {
            return Err(Error::InvalidParameter(format!(
                "observable {pauli} must carry phase +1"
            )));
        }
        Ok(Self { pauli })
    }

    pub fn pauli(&self) -> &PauliString {
        &self.pauli
    }

    pub fn num_qubits(&self) -> usize {
        self.pauli.len()
    }

    pub fn matrix(&self) -> Matrix {
        self.pauli.matrix()
    }
}

impl FromStr for Observable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Observable::new(s.parse()?)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.pauli.factors() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}
