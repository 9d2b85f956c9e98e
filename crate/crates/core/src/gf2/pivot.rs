use alloc::vec::Vec;

use super::{BitMat, BitVec};

/// `gamma = V · [[I_r, R], [0, 0]] · U` with `U`, `V` invertible.
///
/// For `gamma` of shape `m × n`: `U` is `n × n`, `V` is `m × m`, `R` is
/// `r × (n − r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotDecomposition {
    pub u: BitMat,
    pub v: BitMat,
    pub rank: usize,
    pub r: BitMat,
}

impl PivotDecomposition {
    /// `[[I_r, R], [0, 0]]` with the shape of the decomposed matrix.
    pub fn core(&self) -> BitMat {
        let m = self.v.rows();
        let n = self.u.rows();
        let rank = self.rank;
        BitMat::from_blocks(
            &BitMat::identity(rank),
            &self.r,
            &BitMat::zeros(m - rank, rank),
            &BitMat::zeros(m - rank, n - rank),
        )
    }

    /// `V · core · U`
    pub fn reconstruct(&self) -> BitMat {
        self.v
            .mul(&self.core())
            .and_then(|vc| vc.mul(&self.u))
            .expect("decomposition factors are conformable")
    }
}

/// Gaussian pivot decomposition.
///
/// Columns are scanned left to right; the pivot for a column is the first row
/// at or below the current pivot row holding a 1. The reduced row echelon
/// form `E·gamma` then has its pivot columns permuted to the front, so `U` is
/// a permutation matrix and `V = E⁻¹` is accumulated by the inverse column
/// operations.
pub fn pivot_decompose(gamma: &BitMat) -> PivotDecomposition {
    let (m, n) = (gamma.rows(), gamma.cols());
    let mut e = gamma.clone();
    let mut v = BitMat::identity(m);
    let mut pivots: Vec<usize> = Vec::new();

    for c in 0..n {
        let row = pivots.len();
        if row == m {
            break;
        }
        let Some(p) = (row..m).find(|&r| e.get(r, c)) else {
            continue;
        };
        if p != row {
            e.swap_rows(row, p);
            v.swap_cols(row, p);
        }
        for r in 0..m {
            if r != row && e.get(r, c) {
                // row_r ^= row_pivot is left multiplication by T = I + e_r e_row^T,
                // so V = E⁻¹ picks up T on the right: col_row ^= col_r.
                e.xor_row_into(row, r);
                v.xor_col_into(r, row);
            }
        }
        pivots.push(c);
    }

    let rank = pivots.len();
    let mut is_pivot = alloc::vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();

    // U·x = [x_pivots ; x_free]
    let mut u = BitMat::zeros(n, n);
    for (i, &c) in pivots.iter().chain(free.iter()).enumerate() {
        u.set(i, c, true);
    }

    let r = BitMat::from_row_vecs(
        free.len(),
        (0..rank)
            .map(|i| free.iter().map(|&c| e.get(i, c)).collect::<BitVec>())
            .collect(),
    );

    PivotDecomposition { u, v, rank, r }
}
