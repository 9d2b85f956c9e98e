//! Linear algebra over GF(2).

mod bitmat;
mod bitvec;
mod pivot;
mod synth;

pub use bitmat::BitMat;
pub use bitvec::BitVec;
pub use pivot::{pivot_decompose, PivotDecomposition};
pub use synth::{synthesize_cnot_swap, CnotSwapCircuit, LinearGate};

/// Rank of `m`; agrees with `pivot_decompose(m).rank`.
pub fn rank(m: &BitMat) -> usize {
    m.rank()
}

/// Two-sided inverse of a square matrix.
pub fn invert(m: &BitMat) -> crate::Result<BitMat> {
    m.invert()
}
