use alloc::vec::Vec;

use super::Backend;
use crate::gf2::BitVec;

/// A signed Pauli string `(−1)^sign · ⊗_j P_j` with `P_j` read from
/// `(x_j, z_j)`: `00 → I`, `10 → X`, `11 → Y`, `01 → Z`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliRow {
    pub x: BitVec,
    pub z: BitVec,
    pub sign: bool,
}

impl PauliRow {
    pub fn identity(n: usize) -> Self {
        PauliRow {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            sign: false,
        }
    }

    pub fn commutes_with(&self, other: &PauliRow) -> bool {
        self.x.dot(&other.z) == self.z.dot(&other.x)
    }

    /// Left-multiplies `self` by `other` (`self ← other · self`), tracking the
    /// sign. Only meaningful when the two commute.
    fn absorb(&mut self, other: &PauliRow) {
        let mut plus = 0u32;
        let mut minus = 0u32;
        let words = self
            .x
            .words()
            .iter()
            .zip(self.z.words())
            .zip(other.x.words().iter().zip(other.z.words()));
        for ((&x2, &z2), (&x1, &z1)) in words {
            plus += ((x1 & z1 & !x2 & z2) | (x1 & !z1 & x2 & z2) | (!x1 & z1 & x2 & !z2)).count_ones();
            minus += ((x1 & z1 & x2 & !z2) | (x1 & !z1 & !x2 & z2) | (!x1 & z1 & x2 & z2)).count_ones();
        }
        let phase = (2 * u32::from(self.sign) + 2 * u32::from(other.sign) + plus + 4 * 64 - minus) % 4;
        self.sign = phase == 2;
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }
}

/// Stabilizer tableau with destabilizers (Aaronson–Gottesman).
///
/// Rows `0..n` are destabilizers, rows `n..2n` stabilizers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliRow>,
}

/// Row-reduced stabilizer generators with their signs. Two pure stabilizer
/// states are equal iff their canonical forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub n: usize,
    pub rows: Vec<PauliRow>,
}

impl Tableau {
    /// `|0…0⟩`
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut r = PauliRow::identity(n);
            r.x.set(i, true);
            rows.push(r);
        }
        for i in 0..n {
            let mut r = PauliRow::identity(n);
            r.z.set(i, true);
            rows.push(r);
        }
        Tableau { n, rows }
    }

    pub fn graph_state(g: &crate::graphs::Graph) -> Self {
        let mut t = Tableau::new(g.n());
        let qubits: Vec<usize> = (0..g.n()).collect();
        super::prepare_graph_state(&mut t, g, &qubits).expect("register matches graph");
        t
    }

    pub fn stabilizers(&self) -> &[PauliRow] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliRow] {
        &self.rows[..self.n]
    }

    /// Checks commutation relations: stabilizers commute pairwise, each
    /// destabilizer anticommutes only with its partner stabilizer.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (0..2 * n).all(|j| {
                let anti = i != j && (i % n == j % n) && (i < n) != (j < n);
                let destab_pair = i < n && j < n;
                self.rows[i].commutes_with(&self.rows[j]) != anti || destab_pair
            })
        })
    }

    fn deterministic_outcome(&self, q: usize) -> u8 {
        let mut scratch = PauliRow::identity(self.n);
        for i in 0..self.n {
            if self.rows[i].x.get(q) {
                scratch.absorb(&self.rows[i + self.n]);
            }
        }
        u8::from(scratch.sign)
    }

    fn random_pivot(&self, q: usize) -> Option<usize> {
        (self.n..2 * self.n).find(|&p| self.rows[p].x.get(q))
    }

    /// Eigenvalue of the Pauli `row` (sign ignored) if the state is one of its
    /// eigenstates: `Some(false)` for the `+1` eigenspace of `(−1)^{row.sign}·P`,
    /// `Some(true)` for `−1`. `None` when the outcome would be random.
    pub fn pauli_eigenvalue(&self, row: &PauliRow) -> Option<bool> {
        if self.stabilizers().iter().any(|s| !s.commutes_with(row)) {
            return None;
        }
        let mut acc = PauliRow::identity(self.n);
        for i in 0..self.n {
            if !self.rows[i].commutes_with(row) {
                acc.absorb(&self.rows[i + self.n]);
            }
        }
        debug_assert!(acc.x == row.x && acc.z == row.z);
        Some(acc.sign != row.sign)
    }

    /// Unique representative of the stabilizer group.
    pub fn canonical_form(&self) -> CanonicalForm {
        let n = self.n;
        let mut rows: Vec<PauliRow> = self.stabilizers().to_vec();
        let mut pivot_row = 0;
        for col in 0..2 * n {
            let bit = |r: &PauliRow| if col < n { r.x.get(col) } else { r.z.get(col - n) };
            let Some(p) = (pivot_row..n).find(|&r| bit(&rows[r])) else {
                continue;
            };
            rows.swap(pivot_row, p);
            let pivot = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && bit(row) {
                    row.absorb(&pivot);
                }
            }
            pivot_row += 1;
            if pivot_row == n {
                break;
            }
        }
        CanonicalForm { n, rows }
    }

    fn for_each_row(&mut self, mut f: impl FnMut(&mut PauliRow)) {
        for r in &mut self.rows {
            f(r);
        }
    }
}

impl Backend for Tableau {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn h(&mut self, q: usize) {
        self.for_each_row(|r| {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.sign ^= x & z;
            r.x.set(q, z);
            r.z.set(q, x);
        });
    }

    fn s(&mut self, q: usize) {
        self.for_each_row(|r| {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.sign ^= x & z;
            r.z.set(q, z ^ x);
        });
    }

    fn sdg(&mut self, q: usize) {
        self.for_each_row(|r| {
            let (x, z) = (r.x.get(q), r.z.get(q));
            r.sign ^= x & !z;
            r.z.set(q, z ^ x);
        });
    }

    fn x(&mut self, q: usize) {
        self.for_each_row(|r| r.sign ^= r.z.get(q));
    }

    fn z(&mut self, q: usize) {
        self.for_each_row(|r| r.sign ^= r.x.get(q));
    }

    fn cnot(&mut self, a: usize, b: usize) {
        assert_ne!(a, b);
        self.for_each_row(|r| {
            let (xa, za, xb, zb) = (r.x.get(a), r.z.get(a), r.x.get(b), r.z.get(b));
            r.sign ^= xa & zb & !(xb ^ za);
            r.x.set(b, xb ^ xa);
            r.z.set(a, za ^ zb);
        });
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.h(b);
        self.cnot(a, b);
        self.h(b);
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.for_each_row(|r| {
            let (xa, za, xb, zb) = (r.x.get(a), r.z.get(a), r.x.get(b), r.z.get(b));
            r.x.set(a, xb);
            r.x.set(b, xa);
            r.z.set(a, zb);
            r.z.set(b, za);
        });
    }

    fn prob_one(&self, q: usize) -> f64 {
        if self.random_pivot(q).is_some() {
            0.5
        } else {
            f64::from(self.deterministic_outcome(q))
        }
    }

    fn collapse(&mut self, q: usize, outcome: u8) {
        let n = self.n;
        let Some(p) = self.random_pivot(q) else {
            assert_eq!(
                self.deterministic_outcome(q),
                outcome,
                "collapse onto a zero-probability outcome"
            );
            return;
        };
        let pivot = self.rows[p].clone();
        for i in 0..2 * n {
            if i != p && self.rows[i].x.get(q) {
                self.rows[i].absorb(&pivot);
            }
        }
        self.rows[p - n] = pivot;
        let mut fresh = PauliRow::identity(n);
        fresh.z.set(q, true);
        fresh.sign = outcome == 1;
        self.rows[p] = fresh;
    }
}
