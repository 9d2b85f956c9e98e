//! Clifford simulation back-ends and the shared circuit vocabulary.
//!
//! [`Tableau`] is the scalable engine; [`StateVector`] is the dense oracle.
//! Both implement [`Backend`], so every protocol in this crate runs on either
//! and the two can be checked against each other branch by branch.

mod statevector;
mod tableau;

use alloc::boxed::Box;
use alloc::vec::Vec;

use rand::Rng as _;

pub use statevector::{fidelity, StateVector, DEFAULT_SV_CAP};
pub use tableau::{CanonicalForm, PauliRow, Tableau};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::rng::{self, Rng};

/// Probabilities below this are treated as zero.
pub const PROB_EPS: f64 = 1e-12;

/// Default limit on the number of measured bits in [`enumerate_branches`].
pub const DEFAULT_BRANCH_CAP: usize = 12;

/// A quantum register that supports the Clifford gate set and Z measurement.
///
/// Gate methods panic on out-of-range qubits; [`apply`] validates indices
/// first and reports [`Error::QubitOutOfRange`].
pub trait Backend: Clone {
    fn num_qubits(&self) -> usize;
    fn h(&mut self, q: usize);
    fn s(&mut self, q: usize);
    fn sdg(&mut self, q: usize);
    fn x(&mut self, q: usize);
    fn z(&mut self, q: usize);
    fn cnot(&mut self, control: usize, target: usize);
    fn cz(&mut self, a: usize, b: usize);

    /// Probability that a Z measurement of `q` yields 1.
    fn prob_one(&self, q: usize) -> f64;

    /// Projects `q` onto `|outcome⟩` and renormalizes. The outcome must have
    /// nonzero probability.
    fn collapse(&mut self, q: usize, outcome: u8);

    fn swap(&mut self, a: usize, b: usize) {
        self.cnot(a, b);
        self.cnot(b, a);
        self.cnot(a, b);
    }
}

/// Elements of a Clifford circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CliffordOp {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    /// Outcome `d` projects onto `|d⟩`.
    MeasureZ(usize),
    /// Outcome `a` projects onto `H|a⟩`.
    MeasureX(usize),
    /// Outcome `y` projects onto the `(−1)^y` eigenspace of `Y`.
    MeasureY(usize),
    /// Outcomes `(b, c)` project onto `|0c⟩ + (−1)^b |1c̄⟩`. Realized as
    /// `CNOT(q1→q2)`, `H(q1)`, then Z measurements of `q1` (→ b) and `q2`
    /// (→ c); both qubits are left in `|b⟩|c⟩`.
    BellMeasure(usize, usize),
}

impl CliffordOp {
    /// Number of classical bits the op produces.
    pub fn measured_bits(&self) -> usize {
        match self {
            CliffordOp::MeasureZ(_) | CliffordOp::MeasureX(_) | CliffordOp::MeasureY(_) => 1,
            CliffordOp::BellMeasure(..) => 2,
            _ => 0,
        }
    }

    fn qubits(&self) -> [Option<usize>; 2] {
        use CliffordOp::*;
        match *self {
            H(q) | S(q) | X(q) | Z(q) | MeasureZ(q) | MeasureX(q) | MeasureY(q) => [Some(q), None],
            Cnot(a, b) | Cz(a, b) | BellMeasure(a, b) => [Some(a), Some(b)],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        for q in self.qubits().into_iter().flatten() {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, qubits: n });
            }
        }
        if let [Some(a), Some(b)] = self.qubits() {
            if a == b {
                return Err(Error::QubitOutOfRange { index: b, qubits: n });
            }
        }
        Ok(())
    }

    /// Lowering to gates plus Z measurements.
    fn lower(&self) -> Vec<Primitive> {
        use Primitive as P;
        match *self {
            CliffordOp::H(q) => alloc::vec![P::H(q)],
            CliffordOp::S(q) => alloc::vec![P::S(q)],
            CliffordOp::X(q) => alloc::vec![P::X(q)],
            CliffordOp::Z(q) => alloc::vec![P::Z(q)],
            CliffordOp::Cnot(c, t) => alloc::vec![P::Cnot(c, t)],
            CliffordOp::Cz(a, b) => alloc::vec![P::Cz(a, b)],
            CliffordOp::MeasureZ(q) => alloc::vec![P::Measure(q)],
            CliffordOp::MeasureX(q) => alloc::vec![P::H(q), P::Measure(q), P::H(q)],
            CliffordOp::MeasureY(q) => {
                alloc::vec![P::Sdg(q), P::H(q), P::Measure(q), P::H(q), P::S(q)]
            }
            CliffordOp::BellMeasure(a, b) => {
                alloc::vec![P::Cnot(a, b), P::H(a), P::Measure(a), P::Measure(b)]
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Primitive {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Measure(usize),
}

impl Primitive {
    /// Applies a unitary primitive; returns the qubit for a measurement.
    fn apply_unitary<B: Backend>(self, state: &mut B) -> Option<usize> {
        match self {
            Primitive::H(q) => state.h(q),
            Primitive::S(q) => state.s(q),
            Primitive::Sdg(q) => state.sdg(q),
            Primitive::X(q) => state.x(q),
            Primitive::Z(q) => state.z(q),
            Primitive::Cnot(c, t) => state.cnot(c, t),
            Primitive::Cz(a, b) => state.cz(a, b),
            Primitive::Measure(q) => return Some(q),
        }
        None
    }
}

#[derive(Clone, Debug)]
enum OutcomeSource {
    Random(Box<Rng>),
    Forced(Vec<u8>),
}

/// Decides measurement outcomes: sampled from a seeded stream, or read from a
/// fixed list (used to walk one branch).
///
/// The policy also accumulates the Born probability of the outcomes it has
/// produced and the outcomes themselves.
#[derive(Clone, Debug)]
pub struct OutcomePolicy {
    source: OutcomeSource,
    consumed: usize,
    probability: f64,
    record: Vec<u8>,
}

impl OutcomePolicy {
    pub fn random(seed: u64) -> Self {
        Self::from_rng(rng::seeded(seed))
    }

    pub fn from_rng(rng: Rng) -> Self {
        OutcomePolicy {
            source: OutcomeSource::Random(Box::new(rng)),
            consumed: 0,
            probability: 1.0,
            record: Vec::new(),
        }
    }

    pub fn forced(bits: Vec<u8>) -> Self {
        OutcomePolicy {
            source: OutcomeSource::Forced(bits),
            consumed: 0,
            probability: 1.0,
            record: Vec::new(),
        }
    }

    /// Probability of the outcomes produced so far.
    pub fn branch_probability(&self) -> f64 {
        self.probability
    }

    /// Outcomes produced so far, in order.
    pub fn outcomes(&self) -> &[u8] {
        &self.record
    }

    /// Measures `q` in the Z basis on `state`.
    pub fn measure_z<B: Backend>(&mut self, state: &mut B, q: usize) -> Result<u8> {
        let p1 = state.prob_one(q);
        let outcome = match &mut self.source {
            OutcomeSource::Random(rng) => {
                if p1 <= PROB_EPS {
                    0
                } else if p1 >= 1.0 - PROB_EPS {
                    1
                } else {
                    u8::from(rng.random::<f64>() < p1)
                }
            }
            OutcomeSource::Forced(bits) => {
                let bit = *bits
                    .get(self.consumed)
                    .ok_or(Error::ForcedOutcomesExhausted(self.consumed))?;
                bit & 1
            }
        };
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p <= PROB_EPS {
            return Err(Error::ForcedOutcomeImpossible { qubit: q, outcome });
        }
        state.collapse(q, outcome);
        self.consumed += 1;
        self.probability *= p;
        self.record.push(outcome);
        Ok(outcome)
    }
}

/// Applies one op; returns the classical bits it produced.
pub fn apply<B: Backend>(state: &mut B, op: CliffordOp, policy: &mut OutcomePolicy) -> Result<Vec<u8>> {
    op.validate(state.num_qubits())?;
    let mut out = Vec::with_capacity(op.measured_bits());
    for prim in op.lower() {
        if let Some(q) = prim.apply_unitary(state) {
            out.push(policy.measure_z(state, q)?);
        }
    }
    Ok(out)
}

/// Applies a whole circuit; returns all classical bits in order.
pub fn run<B: Backend>(state: &mut B, circuit: &[CliffordOp], policy: &mut OutcomePolicy) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for &op in circuit {
        out.extend(apply(state, op, policy)?);
    }
    Ok(out)
}

/// Prepares `|G⟩` on `qubits` (vertex `v` ↦ `qubits[v]`), which must be in `|0⟩`.
pub fn prepare_graph_state<B: Backend>(state: &mut B, g: &Graph, qubits: &[usize]) -> Result<()> {
    if qubits.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: qubits.len(),
        });
    }
    if let Some(&q) = qubits.iter().find(|&&q| q >= state.num_qubits()) {
        return Err(Error::QubitOutOfRange {
            index: q,
            qubits: state.num_qubits(),
        });
    }
    for &q in qubits {
        state.h(q);
    }
    for (u, v) in g.edges() {
        state.cz(qubits[u], qubits[v]);
    }
    Ok(())
}

/// One measurement branch of a circuit.
#[derive(Clone, Debug)]
pub struct Branch<B> {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub state: B,
}

/// Every outcome sequence of `circuit` with nonzero probability, with the
/// post-measurement state of each.
pub fn enumerate_branches<B: Backend>(circuit: &[CliffordOp], initial: &B, cap: usize) -> Result<Vec<Branch<B>>> {
    let bits: usize = circuit.iter().map(CliffordOp::measured_bits).sum();
    if bits > cap {
        return Err(Error::CapacityExceeded {
            requested: bits,
            limit: cap,
        });
    }
    let n = initial.num_qubits();
    let mut prims = Vec::new();
    for op in circuit {
        op.validate(n)?;
        prims.extend(op.lower());
    }
    let mut out = Vec::new();
    let mut stack = alloc::vec![(0usize, initial.clone(), Vec::new(), 1.0f64)];
    while let Some((mut pc, mut state, outcomes, prob)) = stack.pop() {
        let mut measured = None;
        while pc < prims.len() {
            let prim = prims[pc];
            pc += 1;
            if let Some(q) = prim.apply_unitary(&mut state) {
                measured = Some(q);
                break;
            }
        }
        let Some(q) = measured else {
            out.push(Branch {
                outcomes,
                probability: prob,
                state,
            });
            continue;
        };
        let p1 = state.prob_one(q);
        // push 1 first so branch 0 is explored first
        for (outcome, p) in [(1u8, p1), (0u8, 1.0 - p1)] {
            if p > PROB_EPS {
                let mut next = state.clone();
                next.collapse(q, outcome);
                let mut o = outcomes.clone();
                o.push(outcome);
                stack.push((pc, next, o, prob * p));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_zero_state() {
        let mut t = Tableau::new(1);
        let mut p = OutcomePolicy::random(1);
        assert_eq!(apply(&mut t, CliffordOp::MeasureZ(0), &mut p).unwrap(), vec![0]);
        assert_eq!(p.branch_probability(), 1.0);
        assert_eq!(t.canonical_form(), Tableau::new(1).canonical_form());
    }

    #[test]
    fn measure_plus_in_x_basis() {
        let mut sv = StateVector::zeros(1).unwrap();
        sv.h(0);
        let mut p = OutcomePolicy::random(3);
        assert_eq!(apply(&mut sv, CliffordOp::MeasureX(0), &mut p).unwrap(), vec![0]);
    }

    #[test]
    fn forced_impossible_outcome() {
        let mut t = Tableau::new(1);
        let mut p = OutcomePolicy::forced(vec![1]);
        assert_eq!(
            apply(&mut t, CliffordOp::MeasureZ(0), &mut p),
            Err(Error::ForcedOutcomeImpossible { qubit: 0, outcome: 1 })
        );
    }

    #[test]
    fn forced_list_exhausted() {
        let mut t = Tableau::new(1);
        let mut p = OutcomePolicy::forced(vec![]);
        assert_eq!(
            apply(&mut t, CliffordOp::MeasureZ(0), &mut p),
            Err(Error::ForcedOutcomesExhausted(0))
        );
    }

    #[test]
    fn bad_indices_rejected() {
        let mut t = Tableau::new(2);
        let mut p = OutcomePolicy::random(0);
        assert!(apply(&mut t, CliffordOp::H(2), &mut p).is_err());
        assert!(apply(&mut t, CliffordOp::BellMeasure(1, 1), &mut p).is_err());
    }

    #[test]
    fn enumerate_plus_and_zero() {
        let mut plus = Tableau::new(1);
        plus.h(0);
        let b = enumerate_branches(&[CliffordOp::MeasureZ(0)], &plus, DEFAULT_BRANCH_CAP).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.iter().all(|br| (br.probability - 0.5).abs() < 1e-12));
        let zero = Tableau::new(1);
        let b = enumerate_branches(&[CliffordOp::MeasureZ(0)], &zero, DEFAULT_BRANCH_CAP).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].probability, 1.0);
    }

    #[test]
    fn enumeration_cap() {
        let circuit = vec![CliffordOp::MeasureZ(0); 13];
        assert!(matches!(
            enumerate_branches(&circuit, &Tableau::new(1), DEFAULT_BRANCH_CAP),
            Err(Error::CapacityExceeded { .. })
        ));
    }
}
