//! Graphs, honest/malicious partitions and the correction algebra on them.
//!
//! A graph state `|G⟩` is stabilized by `X^x Z^{G·x}` for every `x`; the
//! partition `(H, M)` splits the adjacency matrix into `G_H`, `G_M` and the
//! biadjacency block `Γ` (rows indexed by `M`, columns by `H`).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2::{pivot_decompose, BitMat, BitVec, PivotDecomposition};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: BitMat,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: BitMat::zeros(n, n),
        }
    }

    /// Validates symmetry and a zero diagonal.
    pub fn from_adjacency(adj: BitMat) -> Result<Self> {
        if !adj.is_square() {
            return Err(Error::InvalidGraph(format!(
                "adjacency matrix is {}x{}",
                adj.rows(),
                adj.cols()
            )));
        }
        if !adj.is_symmetric() {
            return Err(Error::InvalidGraph("adjacency matrix is not symmetric".into()));
        }
        if let Some(v) = (0..adj.rows()).find(|&v| adj.get(v, v)) {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {v}")));
        }
        Ok(Graph { adj })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!(
                "edge ({u}, {v}) out of range for {n} vertices"
            )));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {u}")));
        }
        self.adj.set(u, v, true);
        self.adj.set(v, u, true);
        Ok(())
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).expect("complete-graph edges are valid")
    }

    /// Star centred on vertex 0; locally equivalent to the GHZ state.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Graph::from_edges(n, &edges).expect("star edges are valid")
    }

    /// Every labelled graph on `n` vertices, in order of the bitmask over
    /// vertex pairs `(0,1), (0,2), …, (n−2,n−1)`.
    pub fn enumerate(n: usize) -> impl Iterator<Item = Graph> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        assert!(pairs.len() < 64, "too many vertex pairs to enumerate");
        (0u64..1 << pairs.len()).map(move |mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Graph::from_edges(n, &edges).expect("enumerated edges are valid")
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.rows()
    }

    pub fn adjacency(&self) -> &BitMat {
        &self.adj
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u, v)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.adj.row(u).iter_ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row(v).iter_ones()
    }
}

/// Split of the vertices into an honest set `H` and its complement `M`.
///
/// Both lists are kept in ascending order; `perm[k]` is the vertex placed at
/// position `k` when `H` is ordered before `M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    h: Vec<usize>,
    m: Vec<usize>,
    perm: Vec<usize>,
}

impl Partition {
    /// `honest` must list distinct vertices below `n`.
    pub fn new(n: usize, honest: &[usize]) -> Result<Self> {
        let mut is_honest = vec![false; n];
        for &v in honest {
            if v >= n {
                return Err(Error::BadPartition(format!("vertex {v} out of range for {n} vertices")));
            }
            if is_honest[v] {
                return Err(Error::BadPartition(format!("vertex {v} listed twice")));
            }
            is_honest[v] = true;
        }
        let h: Vec<usize> = (0..n).filter(|&v| is_honest[v]).collect();
        let m: Vec<usize> = (0..n).filter(|&v| !is_honest[v]).collect();
        let perm = h.iter().chain(&m).copied().collect();
        Ok(Partition { n, h, m, perm })
    }

    /// Partition whose honest set is the bitmask `mask` (bit `v` ↔ vertex `v`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let honest: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        Partition::new(n, &honest).expect("mask vertices are in range")
    }

    /// All `2^n` partitions of `n` vertices.
    pub fn enumerate(n: usize) -> impl Iterator<Item = Partition> {
        (0u64..1 << n).map(move |mask| Partition::from_mask(n, mask))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn honest(&self) -> &[usize] {
        &self.h
    }

    pub fn malicious(&self) -> &[usize] {
        &self.m
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_honest(&self, v: usize) -> bool {
        self.h.binary_search(&v).is_ok()
    }

    /// Scatters `[x_H ; x_M]` back to vertex order.
    pub fn scatter(&self, x_h: &BitVec, x_m: &BitVec) -> BitVec {
        assert_eq!(x_h.len(), self.h.len());
        assert_eq!(x_m.len(), self.m.len());
        let mut out = BitVec::zeros(self.n);
        for (k, &v) in self.h.iter().enumerate() {
            out.set(v, x_h.get(k));
        }
        for (k, &v) in self.m.iter().enumerate() {
            out.set(v, x_m.get(k));
        }
        out
    }

    /// Restriction of a vertex-indexed vector to `H`.
    pub fn restrict_honest(&self, x: &BitVec) -> BitVec {
        self.h.iter().map(|&v| x.get(v)).collect()
    }

    pub fn restrict_malicious(&self, x: &BitVec) -> BitVec {
        self.m.iter().map(|&v| x.get(v)).collect()
    }

    fn check_graph(&self, g: &Graph) -> Result<()> {
        if g.n() != self.n {
            return Err(Error::BadPartition(format!(
                "partition covers {} vertices, graph has {}",
                self.n,
                g.n()
            )));
        }
        Ok(())
    }
}

/// `G = [[G_H, Γᵀ], [Γ, G_M]]` after reordering by the partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphBlocks {
    pub g_h: BitMat,
    pub g_m: BitMat,
    /// `|M| × |H|`
    pub gamma: BitMat,
}

impl GraphBlocks {
    /// Inverse of [`blocks`].
    pub fn reassemble(&self, p: &Partition) -> BitMat {
        let ordered = BitMat::from_blocks(&self.g_h, &self.gamma.transpose(), &self.gamma, &self.g_m);
        let mut adj = BitMat::zeros(p.n, p.n);
        for (i, &u) in p.perm.iter().enumerate() {
            for (j, &v) in p.perm.iter().enumerate() {
                adj.set(u, v, ordered.get(i, j));
            }
        }
        adj
    }
}

/// Block decomposition of `g` under `p`.
pub fn blocks(g: &Graph, p: &Partition) -> Result<GraphBlocks> {
    p.check_graph(g)?;
    let pick = |rows: &[usize], cols: &[usize]| {
        let mut b = BitMat::zeros(rows.len(), cols.len());
        for (i, &u) in rows.iter().enumerate() {
            for (j, &v) in cols.iter().enumerate() {
                b.set(i, j, g.has_edge(u, v));
            }
        }
        b
    };
    Ok(GraphBlocks {
        g_h: pick(&p.h, &p.h),
        g_m: pick(&p.m, &p.m),
        gamma: pick(&p.m, &p.h),
    })
}

/// Pauli operator `X^x Z^z` on a register.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliCorrection {
    pub x: BitVec,
    pub z: BitVec,
}

impl PauliCorrection {
    pub fn identity(len: usize) -> Self {
        PauliCorrection {
            x: BitVec::zeros(len),
            z: BitVec::zeros(len),
        }
    }

    pub fn new(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(PauliCorrection { x, z })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Componentwise XOR (product up to phase).
    pub fn compose(&self, other: &PauliCorrection) -> PauliCorrection {
        PauliCorrection {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        }
    }
}

/// The stabilizer `X^x Z^{G·x}` of `|G⟩`.
pub fn stabilizer_of(g: &Graph, x: &BitVec) -> Result<PauliCorrection> {
    let z = g.adjacency().mul_vec(x)?;
    Ok(PauliCorrection { x: x.clone(), z })
}

/// The correction validator `f` for one graph and partition.
///
/// `(x, z)` on the honest register is accepted iff the last `|H| − r` entries
/// of `U·x` vanish and `(Uᵀ)⁻¹·(z ⊕ G_H·x) = [b ; Rᵀ·b]` for some `b`.
#[derive(Clone, Debug)]
pub struct CorrectionValidator {
    blocks: GraphBlocks,
    pivot: PivotDecomposition,
    u_t_inv: BitMat,
    r_t: BitMat,
}

impl CorrectionValidator {
    pub fn new(g: &Graph, p: &Partition) -> Result<Self> {
        let blocks = blocks(g, p)?;
        let pivot = pivot_decompose(&blocks.gamma);
        let u_t_inv = pivot.u.transpose().invert()?;
        let r_t = pivot.r.transpose();
        Ok(CorrectionValidator {
            blocks,
            pivot,
            u_t_inv,
            r_t,
        })
    }

    pub fn blocks(&self) -> &GraphBlocks {
        &self.blocks
    }

    pub fn pivot(&self) -> &PivotDecomposition {
        &self.pivot
    }

    pub fn honest_len(&self) -> usize {
        self.blocks.g_h.rows()
    }

    /// Returns the witness `b` when accepted, `None` when rejected.
    pub fn check(&self, corr: &PauliCorrection) -> Result<Option<BitVec>> {
        let h = self.honest_len();
        for v in [&corr.x, &corr.z] {
            if v.len() != h {
                return Err(Error::DimensionMismatch {
                    expected: h,
                    found: v.len(),
                });
            }
        }
        let rank = self.pivot.rank;
        let ux = self.pivot.u.mul_vec(&corr.x)?;
        if !ux.slice(rank, h).is_zero() {
            return Ok(None);
        }
        let w = self.u_t_inv.mul_vec(&corr.z.xor(&self.blocks.g_h.mul_vec(&corr.x)?))?;
        let b = w.slice(0, rank);
        let t = w.slice(rank, h);
        Ok((self.r_t.mul_vec(&b)? == t).then_some(b))
    }

    /// Every accepted correction, for registers small enough to enumerate.
    pub fn accepted_set(&self) -> Vec<PauliCorrection> {
        let h = self.honest_len();
        assert!(2 * h < 64);
        (0u64..1 << (2 * h))
            .map(|bits| PauliCorrection {
                x: BitVec::from_u64(h, bits & ((1 << h) - 1)),
                z: BitVec::from_u64(h, bits >> h),
            })
            .filter(|c| matches!(self.check(c), Ok(Some(_))))
            .collect()
    }
}

/// One-shot form of [`CorrectionValidator::check`].
pub fn validate_f(g: &Graph, p: &Partition, corr: &PauliCorrection) -> Result<Option<BitVec>> {
    CorrectionValidator::new(g, p)?.check(corr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn triangle_blocks() {
        let b = blocks(&triangle(), &Partition::new(3, &[0, 1]).unwrap()).unwrap();
        assert_eq!(b.g_h, BitMat::from_rows(&[&[0, 1], &[1, 0]]));
        assert_eq!(b.g_m, BitMat::zeros(1, 1));
        assert_eq!(b.gamma, BitMat::from_rows(&[&[1, 1]]));
    }

    #[test]
    fn path_blocks() {
        let b = blocks(&Graph::path(3), &Partition::new(3, &[0, 2]).unwrap()).unwrap();
        assert!(b.g_h.is_zero() && b.g_h.rows() == 2);
        assert_eq!(b.gamma, BitMat::from_rows(&[&[1, 1]]));
    }

    #[test]
    fn all_honest_blocks_are_degenerate() {
        let p = Partition::new(3, &[0, 1, 2]).unwrap();
        let b = blocks(&triangle(), &p).unwrap();
        assert_eq!((b.gamma.rows(), b.gamma.cols()), (0, 3));
        assert_eq!((b.g_m.rows(), b.g_m.cols()), (0, 0));
        assert_eq!(b.reassemble(&p), *triangle().adjacency());
    }

    #[test]
    fn bad_partitions() {
        assert!(matches!(Partition::new(3, &[0, 0]), Err(Error::BadPartition(_))));
        assert!(matches!(Partition::new(3, &[3]), Err(Error::BadPartition(_))));
        let p = Partition::new(4, &[0]).unwrap();
        assert!(matches!(blocks(&triangle(), &p), Err(Error::BadPartition(_))));
    }

    #[test]
    fn invalid_graphs() {
        assert!(Graph::from_edges(2, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
        assert!(Graph::from_adjacency(BitMat::from_rows(&[&[0, 1], &[0, 0]])).is_err());
    }

    #[test]
    fn stabilizer_examples() {
        let s = stabilizer_of(&triangle(), &BitVec::zeros(3)).unwrap();
        assert!(s.is_identity());
        let s = stabilizer_of(&triangle(), &BitVec::unit(3, 0)).unwrap();
        assert_eq!(s.z.to_bits(), vec![0, 1, 1]);
        let s = stabilizer_of(&Graph::path(3), &BitVec::from_bits(&[1, 0, 1])).unwrap();
        assert_eq!(s.z.to_bits(), vec![0, 0, 0]);
        assert!(stabilizer_of(&triangle(), &BitVec::zeros(2)).is_err());
    }

    #[test]
    fn zero_correction_accepted() {
        let p = Partition::new(3, &[0, 1]).unwrap();
        let b = validate_f(&triangle(), &p, &PauliCorrection::identity(2)).unwrap();
        assert_eq!(b, Some(BitVec::zeros(1)));
    }

    #[test]
    fn validator_dimension_mismatch() {
        let p = Partition::new(3, &[0, 1]).unwrap();
        assert!(validate_f(&triangle(), &p, &PauliCorrection::identity(3)).is_err());
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(Graph::enumerate(4).count(), 64);
        assert_eq!(Partition::enumerate(3).count(), 8);
    }
}
