//! Randomized compiling: Pauli frames inserted after easy cycles, undone after
//! the following hard cycle, and fused back so the cycle structure is unchanged.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{fuse_ops, Circuit, Cycle, CycleKind, Gate, SingleQubitOp};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::seeding::{derive_seed, task_rng};

/// Conjugation of `X⊗I`, `Y⊗I`, `Z⊗I` (control letter) and `I⊗X`, `I⊗Y`, `I⊗Z`
/// (target letter) by CNOT, as `(control, target)` letter pairs. No phases arise.
fn cnot_image(letter: Pauli, on_control: bool) -> (Pauli, Pauli) {
    use Pauli::*;
    match (letter, on_control) {
        (I, _) => (I, I),
        (X, true) => (X, X),
        (Y, true) => (Y, X),
        (Z, true) => (Z, I),
        (X, false) => (I, X),
        (Y, false) => (Z, Y),
        (Z, false) => (Z, Z),
    }
}

/// `H P† H†` for a hard cycle `H` of CNOTs.
pub fn pauli_conjugate_through_hard(hc: &Cycle, p: &PauliString) -> Result<PauliString> {
    if hc.kind() != CycleKind::Hard {
        return Err(Error::InvalidCircuit(
            "Pauli propagation needs a hard cycle".into(),
        ));
    }
    let adj = p.adjoint();
    let mut factors = adj.factors().to_vec();
    let mut k = adj.phase().power();
    for gate in hc.gates() {
        let Gate::Cnot { control, target } = *gate else {
            return Err(Error::InvalidCircuit("non-CNOT gate in hard cycle".into()));
        };
        if control >= factors.len() || target >= factors.len() {
            return Err(Error::DimensionMismatch {
                expected: factors.len(),
                actual: control.max(target) + 1,
            });
        }
        let (c1, t1) = cnot_image(factors[control], true);
        let (c2, t2) = cnot_image(factors[target], false);
        // (c1⊗t1)(c2⊗t2): the two images commute, multiply letterwise.
        let (kc, lc) = c1.compose(c2);
        let (kt, lt) = t1.compose(t2);
        k += kc + kt;
        factors[control] = lc;
        factors[target] = lt;
    }
    Ok(PauliString::new(factors, Phase::from_power(k)))
}

fn fuse_into(cycle: &Cycle, before: &PauliString, after: Option<&PauliString>, n: usize) -> Cycle {
    let gates = (0..n)
        .filter_map(|q| {
            let mut run = Vec::with_capacity(3);
            if before.factor(q) != Pauli::I {
                run.push(SingleQubitOp::from_pauli(before.factor(q)));
            }
            if let Some(op) = cycle.op_on(q) {
                run.push(op);
            }
            if let Some(p) = after.map(|a| a.factor(q)).filter(|p| *p != Pauli::I) {
                run.push(SingleQubitOp::from_pauli(p));
            }
            (!run.is_empty()).then(|| Gate::single(q, fuse_ops(&run)))
        })
        .collect();
    Cycle::easy(gates).expect("one fused gate per qubit")
}

/// Twirls `c` with the given frames, one per easy cycle that is followed by a
/// hard cycle. Conjugation phases are global and dropped.
pub fn twirl_with_frames(c: &Circuit, frames: &[PauliString]) -> Result<Circuit> {
    if !c.is_normalized() {
        return Err(Error::InvalidCircuit(
            "twirling needs a cycle-normalized circuit".into(),
        ));
    }
    let n = c.num_qubits();
    let cycles = c.cycles();
    let num_hard = cycles.len() / 2;
    if frames.len() != num_hard {
        return Err(Error::DimensionMismatch {
            expected: num_hard,
            actual: frames.len(),
        });
    }
    if let Some(bad) = frames.iter().find(|f| f.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: bad.len(),
        });
    }
    let mut correction = PauliString::identity(n);
    let mut out = Vec::with_capacity(cycles.len());
    for (i, cycle) in cycles.iter().enumerate() {
        match cycle.kind() {
            CycleKind::Easy => {
                let frame = frames.get(i / 2);
                out.push(fuse_into(cycle, &correction, frame, n));
            }
            CycleKind::Hard => {
                correction = pauli_conjugate_through_hard(cycle, &frames[i / 2])?
                    .with_phase(Phase::PLUS_ONE);
                out.push(cycle.clone());
            }
        }
    }
    Circuit::from_cycles(n, out)
}

pub fn twirl_with_rng<R: Rng + ?Sized>(c: &Circuit, rng: &mut R) -> Result<Circuit> {
    let frames: Vec<PauliString> = (0..c.cycles().len() / 2)
        .map(|_| PauliString::random(c.num_qubits(), rng))
        .collect();
    twirl_with_frames(c, &frames)
}

/// One random duplicate of `c`, with frames drawn uniformly from the Pauli group.
pub fn twirl_once(c: &Circuit, seed: u64) -> Result<Circuit> {
    twirl_with_rng(c, &mut task_rng(seed, &[]))
}

/// `N − 1` duplicates get `⌊M/N⌋` shots and the last one takes the remainder.
pub fn allocate_shots(total: u64, duplicates: u64) -> Result<Vec<u64>> {
    if duplicates == 0 || total < duplicates {
        return Err(Error::InvalidParameter(format!(
            "cannot split {total} shots over {duplicates} duplicates"
        )));
    }
    let base = total / duplicates;
    let mut shots = vec![base; duplicates as usize];
    shots[duplicates as usize - 1] = total - base * (duplicates - 1);
    Ok(shots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirledEnsemble {
    pub bare: Circuit,
    pub duplicates: Vec<Circuit>,
    pub shots_per_duplicate: Vec<u64>,
    pub seeds: Vec<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub seed: u64,
    pub shots: u64,
}

impl TwirledEnsemble {
    pub fn len(&self) -> usize {
        self.duplicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.duplicates.is_empty()
    }

    pub fn total_shots(&self) -> u64 {
        self.shots_per_duplicate.iter().sum()
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        self.seeds
            .iter()
            .zip(&self.shots_per_duplicate)
            .enumerate()
            .map(|(index, (&seed, &shots))| ManifestEntry { index, seed, shots })
            .collect()
    }

    pub fn manifest_json(&self) -> String {
        serde_json::to_string_pretty(&self.manifest()).expect("manifest serializes")
    }
}

/// `N` independently seeded duplicates of `c` sharing `M` shots.
pub fn make_ensemble(c: &Circuit, duplicates: u64, shots: u64, seed: u64) -> Result<TwirledEnsemble> {
    let shots_per_duplicate = allocate_shots(shots, duplicates)?;
    let bare = c.normalized();
    let seeds: Vec<u64> = (0..duplicates).map(|l| derive_seed(seed, &[l])).collect();
    let duplicates = seeds
        .par_iter()
        .map(|s| twirl_once(&bare, *s))
        .collect::<Result<Vec<_>>>()?;
    Ok(TwirledEnsemble {
        bare,
        duplicates,
        shots_per_duplicate,
        seeds,
        seed,
    })
}
