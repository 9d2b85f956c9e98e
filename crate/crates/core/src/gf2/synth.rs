use alloc::vec::Vec;

use super::{BitMat, BitVec};
use crate::error::{Error, Result};

/// An element of a linear reversible circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinearGate {
    /// `x[target] ^= x[control]`
    Cnot {
        control: usize,
        target: usize,
    },
    Swap(usize, usize),
}

/// A CNOT/SWAP circuit acting on `wires` bits, gates applied in order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CnotSwapCircuit {
    pub wires: usize,
    pub gates: Vec<LinearGate>,
}

impl CnotSwapCircuit {
    /// GF(2) action on a basis-state label.
    pub fn apply(&self, x: &BitVec) -> Result<BitVec> {
        if x.len() != self.wires {
            return Err(Error::DimensionMismatch {
                expected: self.wires,
                found: x.len(),
            });
        }
        let mut y = x.clone();
        for g in &self.gates {
            match *g {
                LinearGate::Cnot { control, target } => {
                    if y.get(control) {
                        y.flip(target);
                    }
                }
                LinearGate::Swap(a, b) => {
                    let (va, vb) = (y.get(a), y.get(b));
                    y.set(a, vb);
                    y.set(b, va);
                }
            }
        }
        Ok(y)
    }

    /// The matrix whose columns are the images of the unit vectors.
    pub fn to_matrix(&self) -> BitMat {
        let cols: Vec<BitVec> = (0..self.wires)
            .map(|i| self.apply(&BitVec::unit(self.wires, i)).expect("width matches"))
            .collect();
        BitMat::from_columns(self.wires, &cols)
    }

    /// Same circuit with gates in reverse order; every gate is self-inverse.
    pub fn inverse(&self) -> CnotSwapCircuit {
        CnotSwapCircuit {
            wires: self.wires,
            gates: self.gates.iter().rev().copied().collect(),
        }
    }
}

/// Synthesizes `x ↦ u·x` from CNOT and SWAP gates only, without ancillas.
///
/// Gauss–Jordan elimination reduces `u` to the identity with row operations
/// `E_k ⋯ E_1 · u = I`. Each elementary operation is its own inverse, so
/// `u = E_1 ⋯ E_k` and the circuit applies `E_k` first.
pub fn synthesize_cnot_swap(u: &BitMat) -> Result<CnotSwapCircuit> {
    if !u.is_square() {
        return Err(Error::DimensionMismatch {
            expected: u.rows(),
            found: u.cols(),
        });
    }
    let n = u.rows();
    let mut m = u.clone();
    let mut ops = Vec::new();
    for c in 0..n {
        let p = (c..n).find(|&r| m.get(r, c)).ok_or(Error::SingularMatrix)?;
        if p != c {
            m.swap_rows(c, p);
            ops.push(LinearGate::Swap(c, p));
        }
        for r in 0..n {
            if r != c && m.get(r, c) {
                m.xor_row_into(c, r);
                ops.push(LinearGate::Cnot { control: c, target: r });
            }
        }
    }
    ops.reverse();
    Ok(CnotSwapCircuit { wires: n, gates: ops })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_empty() {
        let c = synthesize_cnot_swap(&BitMat::identity(5)).unwrap();
        assert!(c.gates.is_empty());
    }

    #[test]
    fn lower_triangular_is_one_cnot() {
        let u = BitMat::from_rows(&[&[1, 0], &[1, 1]]);
        let c = synthesize_cnot_swap(&u).unwrap();
        assert_eq!(c.gates, vec![LinearGate::Cnot { control: 0, target: 1 }]);
        // x ↦ (x0, x0 ⊕ x1) on both basis vectors
        assert_eq!(c.apply(&BitVec::from_bits(&[1, 0])).unwrap().to_bits(), vec![1, 1]);
        assert_eq!(c.apply(&BitVec::from_bits(&[0, 1])).unwrap().to_bits(), vec![0, 1]);
    }

    #[test]
    fn permutation_is_one_swap() {
        let u = BitMat::from_rows(&[&[0, 0, 1], &[0, 1, 0], &[1, 0, 0]]);
        let c = synthesize_cnot_swap(&u).unwrap();
        assert_eq!(c.gates, vec![LinearGate::Swap(0, 2)]);
        assert_eq!(c.to_matrix(), u);
    }

    #[test]
    fn singular_rejected() {
        let u = BitMat::from_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(synthesize_cnot_swap(&u), Err(Error::SingularMatrix));
    }

    #[test]
    fn inverse_circuit_inverts() {
        let u = BitMat::from_rows(&[&[1, 1, 0], &[0, 1, 1], &[1, 1, 1]]);
        let c = synthesize_cnot_swap(&u).unwrap();
        assert_eq!(c.to_matrix(), u);
        assert_eq!(c.inverse().to_matrix(), u.invert().unwrap());
    }
}
