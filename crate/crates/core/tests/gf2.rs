use graphmerge_core::gf2::{pivot_decompose, synthesize_cnot_swap};
use graphmerge_core::graphs::stabilizer_of;
use graphmerge_core::{BitMat, BitVec, Graph};
use proptest::prelude::*;

fn matrix(max: usize) -> impl Strategy<Value = BitMat> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
            let mut m = BitMat::zeros(r, c);
            for (k, b) in bits.into_iter().enumerate() {
                m.set(k / c, k % c, b);
            }
            m
        })
    })
}

/// Invertible matrices as products of random elementary row operations.
fn invertible(max: usize) -> impl Strategy<Value = BitMat> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..4 * n * n).prop_map(move |ops| {
            let mut m = BitMat::identity(n);
            for (a, b, swap) in ops {
                if swap {
                    m.swap_rows(a, b);
                } else if a != b {
                    m.xor_row_into(a, b);
                }
            }
            m
        })
    })
}

fn column_space_rank(m: &BitMat) -> usize {
    // independent oracle: count distinct vectors in the row space
    let rows: Vec<u64> = (0..m.rows()).map(|r| m.row(r).to_u64()).collect();
    let mut span = std::collections::BTreeSet::from([0u64]);
    for r in rows {
        let shifted: Vec<u64> = span.iter().map(|v| v ^ r).collect();
        span.extend(shifted);
    }
    span.len().trailing_zeros() as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pivot_reconstructs(g in matrix(16)) {
        let d = pivot_decompose(&g);
        prop_assert_eq!(d.reconstruct(), g.clone());
        prop_assert!(d.u.invert().is_ok());
        prop_assert!(d.v.invert().is_ok());
        prop_assert_eq!(d.r.rows(), d.rank);
        prop_assert_eq!(d.r.cols(), g.cols() - d.rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn rank_matches_span_count(g in matrix(10)) {
        prop_assert_eq!(g.rank(), column_space_rank(&g));
        prop_assert_eq!(pivot_decompose(&g).rank, column_space_rank(&g));
    }

    #[test]
    fn inverse_is_two_sided(u in invertible(12)) {
        let inv = u.invert().unwrap();
        prop_assert!(u.mul(&inv).unwrap().is_identity());
        prop_assert!(inv.mul(&u).unwrap().is_identity());
    }

    #[test]
    fn synthesis_realizes_matrix(u in invertible(8)) {
        let circ = synthesize_cnot_swap(&u).unwrap();
        let n = u.rows();
        for code in 0..1u64 << n {
            let x = BitVec::from_u64(n, code);
            prop_assert_eq!(circ.apply(&x).unwrap(), u.mul_vec(&x).unwrap());
        }
        prop_assert!(circ.gates.len() <= 3 * n * n + n);
        let back = circ.inverse().to_matrix();
        prop_assert!(back.mul(&u).unwrap().is_identity());
    }

    #[test]
    fn stabilizer_map_is_linear(n in 1usize..8, edges in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .enumerate()
            .filter(|(i, _)| edges >> (i % 64) & 1 == 1)
            .map(|(_, e)| e)
            .collect();
        let g = Graph::from_edges(n, &pairs).unwrap();
        let mask = (1u64 << n) - 1;
        let (xa, xb) = (BitVec::from_u64(n, a & mask), BitVec::from_u64(n, b & mask));
        let sa = stabilizer_of(&g, &xa).unwrap();
        let sb = stabilizer_of(&g, &xb).unwrap();
        prop_assert_eq!(stabilizer_of(&g, &xa.xor(&xb)).unwrap(), sa.compose(&sb));
    }
}

#[test]
fn singular_matrix_has_no_inverse() {
    let m = BitMat::from_rows(&[&[1, 1], &[1, 1]]);
    assert!(m.invert().is_err());
    assert!(synthesize_cnot_swap(&m).is_err());
}
