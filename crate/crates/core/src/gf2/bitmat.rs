use alloc::vec::Vec;
use core::fmt;

use super::BitVec;
use crate::error::{Error, Result};

/// Dense row-major matrix over GF(2). Zero-sized dimensions are legal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMat {
            rows,
            cols,
            data: (0..rows).map(|_| BitVec::zeros(cols)).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries. All rows must have `cols` entries.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_row_vecs(cols, rows.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    /// Panics if a row has the wrong length.
    pub fn from_row_vecs(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        BitMat {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn column(&self, c: usize) -> BitVec {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// `row[dst] ^= row[src]`
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.data[src].clone();
        self.data[dst].xor_assign(&s);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    /// `col[dst] ^= col[src]`
    pub fn xor_col_into(&mut self, src: usize, dst: usize) {
        for row in &mut self.data {
            if row.get(src) {
                row.flip(dst);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.data {
            let (x, y) = (row.get(a), row.get(b));
            row.set(a, y);
            row.set(b, x);
        }
    }

    pub fn transpose(&self) -> BitMat {
        let mut t = BitMat::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for (r, row) in self.data.iter().enumerate() {
            if row.dot(v) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BitMat) -> Result<BitMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = BitMat::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.iter_ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &BitMat) -> Result<BitMat> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        Ok(out)
    }

    /// Sub-block with rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> BitMat {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        BitMat::from_row_vecs(c1 - c0, self.data[r0..r1].iter().map(|r| r.slice(c0, c1)).collect())
    }

    /// `[[a, b], [c, d]]` from four conformable blocks.
    pub fn from_blocks(a: &BitMat, b: &BitMat, c: &BitMat, d: &BitMat) -> BitMat {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let top = a.data.iter().zip(&b.data).map(|(x, y)| x.concat(y));
        let bottom = c.data.iter().zip(&d.data).map(|(x, y)| x.concat(y));
        BitMat::from_row_vecs(a.cols + b.cols, top.chain(bottom).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == BitMat::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Two-sided inverse, or [`Error::SingularMatrix`].
    pub fn invert(&self) -> Result<BitMat> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = BitMat::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c)).ok_or(Error::SingularMatrix)?;
            m.swap_rows(c, p);
            inv.swap_rows(c, p);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.xor_row_into(c, r);
                    inv.xor_row_into(c, r);
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMat {}x{} [", self.rows, self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{r}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_inverse() {
        assert_eq!(BitMat::identity(4).invert().unwrap(), BitMat::identity(4));
    }

    #[test]
    fn two_by_two_inverse_matches_exhaustive_search() {
        let m = BitMat::from_rows(&[&[1, 1], &[0, 1]]);
        // all 16 candidates
        let found: Vec<BitMat> = (0u64..16)
            .map(|bits| {
                BitMat::from_rows(&[
                    &[(bits & 1) as u8, (bits >> 1 & 1) as u8],
                    &[(bits >> 2 & 1) as u8, (bits >> 3 & 1) as u8],
                ])
            })
            .filter(|c| m.mul(c).unwrap().is_identity() && c.mul(&m).unwrap().is_identity())
            .collect();
        assert_eq!(found.len(), 1);
        assert_eq!(m.invert().unwrap(), found[0]);
        assert_eq!(found[0], BitMat::from_rows(&[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn singular_is_rejected() {
        let m = BitMat::from_rows(&[&[1, 1], &[1, 1]]);
        assert_eq!(m.invert(), Err(Error::SingularMatrix));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BitMat::identity(3).rank(), 3);
        assert_eq!(BitMat::zeros(3, 5).rank(), 0);
        assert_eq!(BitMat::from_rows(&[&[1, 1], &[1, 1]]).rank(), 1);
        assert_eq!(BitMat::zeros(0, 4).rank(), 0);
        assert_eq!(BitMat::zeros(4, 0).rank(), 0);
    }

    #[test]
    fn empty_products_follow_conventions() {
        let a = BitMat::zeros(3, 0);
        let b = BitMat::zeros(0, 2);
        let p = a.mul(&b).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        assert!(p.is_zero());
        assert_eq!(b.mul_vec(&BitVec::zeros(2)).unwrap().len(), 0);
        assert_eq!(a.mul_vec(&BitVec::zeros(0)).unwrap(), BitVec::zeros(3));
    }

    #[test]
    fn mismatched_product_errors() {
        let a = BitMat::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch { .. })));
        assert!(a.mul_vec(&BitVec::zeros(2)).is_err());
    }

    #[test]
    fn blocks_round_trip() {
        let m = BitMat::from_rows(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]]);
        let a = m.submatrix(0, 1, 0, 2);
        let b = m.submatrix(0, 1, 2, 3);
        let c = m.submatrix(1, 3, 0, 2);
        let d = m.submatrix(1, 3, 2, 3);
        assert_eq!(BitMat::from_blocks(&a, &b, &c, &d), m);
        assert_eq!(m.transpose().transpose(), m);
    }
}
