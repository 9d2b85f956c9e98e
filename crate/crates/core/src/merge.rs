//! Fusing two copies of a graph state into one.
//!
//! Copy 1 lives on qubits `0..n` and copy 2 on `n..2n` (vertex `v` of copy 2
//! is qubit `n + v`). The measurement map acts on copy 1's malicious qubits
//! and copy 2's honest qubits; the correction map acts on copy 1's honest
//! qubits. The merged state lives on copy 1's honest qubits together with
//! copy 2's malicious qubits.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2::{
    pivot_decompose, synthesize_cnot_swap, BitMat, BitVec, CnotSwapCircuit, LinearGate, PivotDecomposition,
};
use crate::graphs::{blocks, Graph, GraphBlocks, Partition, PauliCorrection};
use crate::sim::{apply, prepare_graph_state, Backend, CliffordOp, OutcomePolicy, PROB_EPS};

/// Everything the measurement map needs, computed once per graph and partition.
#[derive(Clone, Debug)]
pub struct MergePlan {
    graph: Graph,
    partition: Partition,
    blocks: GraphBlocks,
    pivot: PivotDecomposition,
    u_inv: BitMat,
    v_inv_circuit: CnotSwapCircuit,
    u_circuit: CnotSwapCircuit,
}

/// Basis a measured qubit was left in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// The qubit is in `|outcome⟩`.
    Z,
    /// The qubit is in `H|outcome⟩`.
    X,
}

/// Outcomes and the derived correction for the honest register of copy 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    pub a: BitVec,
    pub b: BitVec,
    pub c: BitVec,
    pub d: BitVec,
    pub correction: PauliCorrection,
    /// `(qubit, basis, outcome)` for every measured qubit.
    pub measured: Vec<(usize, Basis, u8)>,
}

/// Result of a complete merge on one backend.
#[derive(Clone, Debug)]
pub struct MergeRun<B> {
    pub state: B,
    pub outcome: MergeOutcome,
    /// Qubit holding vertex `v` of the merged state.
    pub output_qubits: Vec<usize>,
    /// Born probability of the branch taken.
    pub probability: f64,
}

pub fn plan(g: &Graph, p: &Partition) -> Result<MergePlan> {
    let blocks = blocks(g, p)?;
    let pivot = pivot_decompose(&blocks.gamma);
    let u_inv = pivot.u.invert()?;
    let v_inv_circuit = synthesize_cnot_swap(&pivot.v.invert()?)?;
    let u_circuit = synthesize_cnot_swap(&pivot.u)?;
    Ok(MergePlan {
        graph: g.clone(),
        partition: p.clone(),
        blocks,
        pivot,
        u_inv,
        v_inv_circuit,
        u_circuit,
    })
}

impl MergePlan {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn blocks(&self) -> &GraphBlocks {
        &self.blocks
    }

    pub fn pivot(&self) -> &PivotDecomposition {
        &self.pivot
    }

    pub fn v_inv_circuit(&self) -> &CnotSwapCircuit {
        &self.v_inv_circuit
    }

    pub fn u_circuit(&self) -> &CnotSwapCircuit {
        &self.u_circuit
    }

    /// With no honest vertices there is nothing to merge.
    pub fn is_trivial(&self) -> bool {
        self.partition.honest().is_empty()
    }

    fn n(&self) -> usize {
        self.graph.n()
    }

    /// Copy 1's malicious qubits, in partition order.
    pub fn m_register(&self) -> Vec<usize> {
        self.partition.malicious().to_vec()
    }

    /// Copy 2's honest qubits, in partition order.
    pub fn h_register(&self) -> Vec<usize> {
        self.partition.honest().iter().map(|&v| self.n() + v).collect()
    }

    /// Copy 1's honest qubits, which receive the correction.
    pub fn correction_register(&self) -> Vec<usize> {
        self.partition.honest().to_vec()
    }

    pub fn output_qubits(&self) -> Vec<usize> {
        (0..self.n())
            .map(|v| if self.partition.is_honest(v) { v } else { self.n() + v })
            .collect()
    }

    /// Number of measured bits; also the length of a forced outcome list.
    pub fn measured_bits(&self) -> usize {
        self.n()
    }

    /// `x = U⁻¹·[c ⊕ R·d ; 0]`, `z = Uᵀ·[b ; Rᵀ·b] ⊕ G_H·x`.
    pub fn correction(&self, b: &BitVec, c: &BitVec, d: &BitVec) -> Result<PauliCorrection> {
        let r = self.pivot.rank;
        let h = self.partition.honest().len();
        for (v, want) in [(b, r), (c, r), (d, h - r)] {
            if v.len() != want {
                return Err(Error::DimensionMismatch {
                    expected: want,
                    found: v.len(),
                });
            }
        }
        let top = c.xor(&self.pivot.r.mul_vec(d)?);
        let x = self.u_inv.mul_vec(&top.concat(&BitVec::zeros(h - r)))?;
        let w = b.concat(&self.pivot.r.transpose().mul_vec(b)?);
        let z = self.pivot.u.transpose().mul_vec(&w)?.xor(&self.blocks.g_h.mul_vec(&x)?);
        PauliCorrection::new(x, z)
    }
}

fn linear_ops(circuit: &CnotSwapCircuit, wires: &[usize]) -> Vec<CliffordOp> {
    let mut ops = Vec::new();
    for g in &circuit.gates {
        match *g {
            LinearGate::Cnot { control, target } => ops.push(CliffordOp::Cnot(wires[control], wires[target])),
            LinearGate::Swap(i, j) => {
                let (a, b) = (wires[i], wires[j]);
                ops.extend([CliffordOp::Cnot(a, b), CliffordOp::Cnot(b, a), CliffordOp::Cnot(a, b)]);
            }
        }
    }
    ops
}

fn check_register<B: Backend>(state: &B, qubits: &[usize]) -> Result<()> {
    match qubits.iter().find(|&&q| q >= state.num_qubits()) {
        Some(&q) => Err(Error::QubitOutOfRange {
            index: q,
            qubits: state.num_qubits(),
        }),
        None => Ok(()),
    }
}

fn run_ops<B: Backend>(state: &mut B, ops: &[CliffordOp], policy: &mut OutcomePolicy) -> Result<()> {
    for &op in ops {
        apply(state, op, policy)?;
    }
    Ok(())
}

/// The measurement map. `m_qubits` holds copy 1's malicious register and
/// `h_qubits` copy 2's honest register, both in partition order.
pub fn xi_sigma<B: Backend>(
    plan: &MergePlan,
    state: &mut B,
    m_qubits: &[usize],
    h_qubits: &[usize],
    policy: &mut OutcomePolicy,
) -> Result<MergeOutcome> {
    let (mlen, hlen) = (plan.partition.malicious().len(), plan.partition.honest().len());
    for (reg, want) in [(m_qubits, mlen), (h_qubits, hlen)] {
        if reg.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                found: reg.len(),
            });
        }
    }
    check_register(state, m_qubits)?;
    check_register(state, h_qubits)?;
    let r = plan.pivot.rank;

    let mut ops = Vec::new();
    for (reg, adj) in [(h_qubits, &plan.blocks.g_h), (m_qubits, &plan.blocks.g_m)] {
        for i in 0..reg.len() {
            for j in i + 1..reg.len() {
                if adj.get(i, j) {
                    ops.push(CliffordOp::Cz(reg[i], reg[j]));
                }
            }
        }
    }
    ops.extend(m_qubits.iter().map(|&q| CliffordOp::H(q)));
    ops.extend(linear_ops(&plan.v_inv_circuit, m_qubits));
    ops.extend(linear_ops(&plan.u_circuit, h_qubits));
    run_ops(state, &ops, policy)?;

    let mut measured = Vec::with_capacity(mlen + hlen);
    let (mut b, mut c) = (BitVec::zeros(r), BitVec::zeros(r));
    for i in 0..r {
        let bits = apply(state, CliffordOp::BellMeasure(m_qubits[i], h_qubits[i]), policy)?;
        b.set(i, bits[0] == 1);
        c.set(i, bits[1] == 1);
        measured.push((m_qubits[i], Basis::Z, bits[0]));
        measured.push((h_qubits[i], Basis::Z, bits[1]));
    }
    let mut a = BitVec::zeros(mlen - r);
    for (i, &q) in m_qubits[r..].iter().enumerate() {
        let bit = apply(state, CliffordOp::MeasureX(q), policy)?[0];
        a.set(i, bit == 1);
        measured.push((q, Basis::X, bit));
    }
    let mut d = BitVec::zeros(hlen - r);
    for (i, &q) in h_qubits[r..].iter().enumerate() {
        let bit = apply(state, CliffordOp::MeasureZ(q), policy)?[0];
        d.set(i, bit == 1);
        measured.push((q, Basis::Z, bit));
    }
    let correction = plan.correction(&b, &c, &d)?;
    Ok(MergeOutcome {
        a,
        b,
        c,
        d,
        correction,
        measured,
    })
}

/// The correction map: `Z^{z_i}` then `X^{x_i}` on qubit `qubits[i]`.
pub fn xi_h<B: Backend>(state: &mut B, qubits: &[usize], correction: &PauliCorrection) -> Result<()> {
    if correction.len() != qubits.len() {
        return Err(Error::DimensionMismatch {
            expected: qubits.len(),
            found: correction.len(),
        });
    }
    check_register(state, qubits)?;
    for (i, &q) in qubits.iter().enumerate() {
        if correction.z.get(i) {
            state.z(q);
        }
        if correction.x.get(i) {
            state.x(q);
        }
    }
    Ok(())
}

/// Returns measured qubits to `|0⟩` so the whole register can be compared
/// with a reference state.
pub fn reset_measured<B: Backend>(state: &mut B, measured: &[(usize, Basis, u8)]) {
    for &(q, basis, bit) in measured {
        if basis == Basis::X {
            state.h(q);
        }
        if bit == 1 {
            state.x(q);
        }
    }
}

/// Prepares two copies of `|G⟩` on `blank` (which must be `|0⟩^{2n}`), merges
/// them and resets the measured qubits.
pub fn merge_full<B: Backend>(plan: &MergePlan, mut blank: B, policy: &mut OutcomePolicy) -> Result<MergeRun<B>> {
    let n = plan.n();
    if blank.num_qubits() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: blank.num_qubits(),
        });
    }
    let copy1: Vec<usize> = (0..n).collect();
    let copy2: Vec<usize> = (n..2 * n).collect();
    prepare_graph_state(&mut blank, &plan.graph, &copy1)?;
    prepare_graph_state(&mut blank, &plan.graph, &copy2)?;
    let p0 = policy.branch_probability();
    let outcome = xi_sigma(plan, &mut blank, &plan.m_register(), &plan.h_register(), policy)?;
    xi_h(&mut blank, &plan.correction_register(), &outcome.correction)?;
    reset_measured(&mut blank, &outcome.measured);
    Ok(MergeRun {
        state: blank,
        outcome,
        output_qubits: plan.output_qubits(),
        probability: policy.branch_probability() / p0,
    })
}

/// `|G⟩` on `output_qubits` and `|0⟩` elsewhere, built on `blank`.
pub fn reference_state<B: Backend>(g: &Graph, output_qubits: &[usize], mut blank: B) -> Result<B> {
    prepare_graph_state(&mut blank, g, output_qubits)?;
    Ok(blank)
}

/// Runs [`merge_full`] once for every outcome sequence of nonzero probability.
pub fn merge_branches<B: Backend>(plan: &MergePlan, blank: &B) -> Result<Vec<MergeRun<B>>> {
    let bits = plan.measured_bits();
    if bits > 20 {
        return Err(Error::CapacityExceeded {
            requested: bits,
            limit: 20,
        });
    }
    let mut runs = Vec::new();
    for code in 0u64..1 << bits {
        let forced = (0..bits).map(|i| ((code >> i) & 1) as u8).collect();
        match merge_full(plan, blank.clone(), &mut OutcomePolicy::forced(forced)) {
            Ok(run) => runs.push(run),
            Err(Error::ForcedOutcomeImpossible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    debug_assert!((runs.iter().map(|r| r.probability).sum::<f64>() - 1.0).abs() < 1e-9);
    Ok(runs)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `qubits`, which must be in `|0⟩`.
pub fn prepare_ghz<B: Backend>(state: &mut B, qubits: &[usize]) -> Result<()> {
    check_register(state, qubits)?;
    if let Some((&first, rest)) = qubits.split_first() {
        state.h(first);
        for &q in rest {
            state.cnot(first, q);
        }
    }
    Ok(())
}

/// Merge for GHZ states held as copy 1 on `0..n` and copy 2 on `n..2n`.
///
/// One Bell measurement joins the last malicious qubit of copy 1 with the
/// first honest qubit of copy 2; every other measured qubit is read out in
/// the X basis. The correction is `X` on every honest qubit when the Bell
/// parity is 1, plus `Z` on the first honest qubit when the XOR of all phase
/// outcomes is 1. With no malicious vertices copy 2 is simply measured away.
pub fn ghz_merge<B: Backend>(
    n: usize,
    honest: &[usize],
    state: &mut B,
    policy: &mut OutcomePolicy,
) -> Result<MergeOutcome> {
    let p = Partition::new(n, honest)?;
    if p.honest().is_empty() {
        return Err(Error::EmptyHonestSet);
    }
    if state.num_qubits() < 2 * n {
        return Err(Error::QubitOutOfRange {
            index: 2 * n - 1,
            qubits: state.num_qubits(),
        });
    }
    let h1 = p.honest();
    let h2: Vec<usize> = h1.iter().map(|&v| n + v).collect();
    let m1 = p.malicious();
    let hlen = h1.len();
    let mut measured = Vec::new();
    let mut x = false;
    let mut z = false;
    let (mut b, mut c) = (BitVec::zeros(0), BitVec::zeros(0));
    let x_measured: Vec<usize> = match m1.split_last() {
        Some((&last, m_rest)) => {
            let bits = apply(state, CliffordOp::BellMeasure(last, h2[0]), policy)?;
            b = BitVec::from_bits(&bits[..1]);
            c = BitVec::from_bits(&bits[1..]);
            z ^= bits[0] == 1;
            x = bits[1] == 1;
            measured.push((last, Basis::Z, bits[0]));
            measured.push((h2[0], Basis::Z, bits[1]));
            m_rest.iter().chain(&h2[1..]).copied().collect()
        }
        None => h2.clone(),
    };
    let mut a = BitVec::zeros(x_measured.len());
    for (i, &q) in x_measured.iter().enumerate() {
        let bit = apply(state, CliffordOp::MeasureX(q), policy)?[0];
        a.set(i, bit == 1);
        measured.push((q, Basis::X, bit));
    }
    if !m1.is_empty() {
        z ^= a.count_ones() % 2 == 1;
    }
    let mut cz = BitVec::zeros(hlen);
    cz.set(0, z);
    let cx: BitVec = (0..hlen).map(|_| x).collect();
    Ok(MergeOutcome {
        a,
        b,
        c,
        d: BitVec::zeros(0),
        correction: PauliCorrection::new(cx, cz)?,
        measured,
    })
}

/// Prepares two GHZ copies on `blank`, runs [`ghz_merge`], applies the
/// correction and resets measured qubits. The output qubits are those of
/// [`MergePlan::output_qubits`] for the same partition.
pub fn ghz_merge_full<B: Backend>(
    n: usize,
    honest: &[usize],
    mut blank: B,
    policy: &mut OutcomePolicy,
) -> Result<MergeRun<B>> {
    let p = Partition::new(n, honest)?;
    if blank.num_qubits() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: blank.num_qubits(),
        });
    }
    prepare_ghz(&mut blank, &(0..n).collect::<Vec<_>>())?;
    prepare_ghz(&mut blank, &(n..2 * n).collect::<Vec<_>>())?;
    let p0 = policy.branch_probability();
    let outcome = ghz_merge(n, honest, &mut blank, policy)?;
    xi_h(&mut blank, p.honest(), &outcome.correction)?;
    reset_measured(&mut blank, &outcome.measured);
    let output_qubits = (0..n).map(|v| if p.is_honest(v) { v } else { n + v }).collect();
    Ok(MergeRun {
        state: blank,
        outcome,
        output_qubits,
        probability: policy.branch_probability() / p0,
    })
}

/// Every branch of [`ghz_merge_full`].
pub fn ghz_merge_branches<B: Backend>(n: usize, honest: &[usize], blank: &B) -> Result<Vec<MergeRun<B>>> {
    let bits = n;
    let mut runs = Vec::new();
    for code in 0u64..1 << bits {
        let forced = (0..bits).map(|i| ((code >> i) & 1) as u8).collect();
        match ghz_merge_full(n, honest, blank.clone(), &mut OutcomePolicy::forced(forced)) {
            Ok(run) if run.probability > PROB_EPS => runs.push(run),
            Ok(_) | Err(Error::ForcedOutcomeImpossible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(runs)
}
