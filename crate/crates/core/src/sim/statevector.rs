use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::Backend;
use crate::error::{Error, Result};
use crate::graphs::Graph;

/// Largest register a [`StateVector`] accepts unless told otherwise.
pub const DEFAULT_SV_CAP: usize = 20;

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Dense amplitudes over `n` qubits. Qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩`, limited to [`DEFAULT_SV_CAP`] qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::zeros_with_cap(n, DEFAULT_SV_CAP)
    }

    pub fn zeros_with_cap(n: usize, cap: usize) -> Result<Self> {
        if n > cap {
            return Err(Error::CapacityExceeded {
                requested: n,
                limit: cap,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Normalizes the given amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidParameters("amplitude count is not a power of two".into()));
        }
        let n = amps.len().trailing_zeros() as usize;
        let mut sv = StateVector { n, amps };
        let norm = sv.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameters("zero vector".into()));
        }
        sv.scale(1.0 / norm);
        Ok(sv)
    }

    pub fn graph_state(g: &Graph) -> Result<Self> {
        let mut sv = Self::zeros(g.n())?;
        let qubits: Vec<usize> = (0..g.n()).collect();
        super::prepare_graph_state(&mut sv, g, &qubits)?;
        Ok(sv)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`
    pub fn ghz(n: usize) -> Result<Self> {
        let mut sv = Self::zeros(n)?;
        if n == 0 {
            return Ok(sv);
        }
        let last = sv.amps.len() - 1;
        sv.amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        sv.amps[last] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Ok(sv)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.amps.iter().map(Complex64::norm_sqr).sum())
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    fn scale(&mut self, k: f64) {
        for a in &mut self.amps {
            *a *= k;
        }
    }

    fn pairs(&self, q: usize) -> impl Iterator<Item = (usize, usize)> {
        let bit = 1usize << q;
        (0..self.amps.len())
            .filter(move |i| i & bit == 0)
            .map(move |i| (i, i | bit))
    }

    fn phase_where(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }
}

/// `|⟨a|b⟩|`; insensitive to global phase.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

impl Backend for StateVector {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn h(&mut self, q: usize) {
        assert!(q < self.n);
        for (i, j) in self.pairs(q).collect::<Vec<_>>() {
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = (a + b) * FRAC_1_SQRT_2;
            self.amps[j] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    fn s(&mut self, q: usize) {
        assert!(q < self.n);
        self.phase_where(1 << q, Complex64::new(0.0, 1.0));
    }

    fn sdg(&mut self, q: usize) {
        assert!(q < self.n);
        self.phase_where(1 << q, Complex64::new(0.0, -1.0));
    }

    fn x(&mut self, q: usize) {
        assert!(q < self.n);
        for (i, j) in self.pairs(q).collect::<Vec<_>>() {
            self.amps.swap(i, j);
        }
    }

    fn z(&mut self, q: usize) {
        assert!(q < self.n);
        self.phase_where(1 << q, Complex64::new(-1.0, 0.0));
    }

    fn cnot(&mut self, control: usize, target: usize) {
        assert!(control < self.n && target < self.n && control != target);
        let c = 1usize << control;
        for (i, j) in self.pairs(target).collect::<Vec<_>>() {
            if i & c != 0 {
                self.amps.swap(i, j);
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        assert!(a < self.n && b < self.n && a != b);
        self.phase_where((1 << a) | (1 << b), Complex64::new(-1.0, 0.0));
    }

    fn prob_one(&self, q: usize) -> f64 {
        assert!(q < self.n);
        let bit = 1usize << q;
        let p: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        p.clamp(0.0, 1.0)
    }

    fn collapse(&mut self, q: usize, outcome: u8) {
        let p = if outcome == 1 {
            self.prob_one(q)
        } else {
            1.0 - self.prob_one(q)
        };
        assert!(p > super::PROB_EPS, "collapse onto a zero-probability outcome");
        let bit = 1usize << q;
        let keep = if outcome == 1 { bit } else { 0 };
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != keep {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.scale(1.0 / libm::sqrt(p));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn cap_enforced() {
        assert!(StateVector::zeros(21).is_err());
        assert!(StateVector::zeros_with_cap(3, 2).is_err());
    }

    #[test]
    fn single_edge_amplitudes() {
        // CZ·(H⊗H)|00⟩ = (|00⟩+|01⟩+|10⟩−|11⟩)/2
        let sv = StateVector::graph_state(&Graph::path(2)).unwrap();
        let a = sv.amplitudes();
        assert!(close(a[0].re, 0.5) && close(a[1].re, 0.5) && close(a[2].re, 0.5) && close(a[3].re, -0.5));
    }

    #[test]
    fn star_is_local_ghz() {
        let mut sv = StateVector::graph_state(&Graph::star(3)).unwrap();
        sv.h(1);
        sv.h(2);
        let ghz = StateVector::ghz(3).unwrap();
        assert!(close(fidelity(&sv, &ghz).unwrap(), 1.0));
    }

    #[test]
    fn collapse_renormalizes() {
        let mut sv = StateVector::ghz(2).unwrap();
        sv.collapse(0, 1);
        assert!(close(sv.norm(), 1.0));
        assert!(close(sv.prob_one(1), 1.0));
    }

    #[test]
    fn y_measure_basis() {
        // S·H|0⟩ = |+i⟩
        let mut sv = StateVector::zeros(1).unwrap();
        sv.h(0);
        sv.s(0);
        sv.sdg(0);
        sv.h(0);
        assert!(close(sv.prob_one(0), 0.0));
    }
}
