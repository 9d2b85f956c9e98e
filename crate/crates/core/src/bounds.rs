//! Closed-form ε bounds for the verification protocols and the resulting
//! distinguishing advantage `2√(2ε − ε²)`.
//!
//! Values of ε above 1 are legal outputs of the formulas. They are reported
//! with `out_of_range` set and without a realization bound, never clamped.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GhzBoundInput {
    pub n: u64,
    pub s: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphBoundInput {
    pub j: u64,
    pub lambda: u64,
    pub c: f64,
    pub m: f64,
    pub n: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundResult {
    pub epsilon: f64,
    /// Present when ε is an exact rational.
    pub exact: Option<BigRational>,
    /// `2√(2ε − ε²)`, absent when ε lies outside `[0, 1]`.
    pub realization_epsilon: Option<f64>,
    pub out_of_range: bool,
    /// Named intermediate quantities.
    pub components: Vec<(&'static str, f64)>,
}

impl BoundResult {
    fn new(epsilon: f64, exact: Option<BigRational>, components: Vec<(&'static str, f64)>) -> Self {
        let realization_epsilon = realization_bound(epsilon).ok();
        BoundResult {
            epsilon,
            exact,
            out_of_range: realization_epsilon.is_none(),
            realization_epsilon,
            components,
        }
    }

    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|(k, _)| *k == name).map(|&(_, v)| v)
    }
}

/// `2√(2ε − ε²)` for `ε ∈ [0, 1]`.
pub fn realization_bound(epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfRange(epsilon));
    }
    Ok(2.0 * libm::sqrt(epsilon * (2.0 - epsilon)))
}

fn unit(v: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(Error::OutOfRange(v))
    }
}

/// `p·(1 − F)`
pub fn translate_fidelity(p: f64, fidelity: f64) -> Result<f64> {
    Ok(unit(p)? * (1.0 - unit(fidelity)?))
}

/// `δ + η²`
pub fn translate_eta_delta(eta: f64, delta: f64) -> Result<f64> {
    let eta = unit(eta)?;
    Ok(unit(delta)? + eta * eta)
}

/// `ε = (4n + 1) / 2^{S/2}`, exact when `S` is even.
pub fn ghz_epsilon(input: GhzBoundInput) -> Result<BoundResult> {
    if input.n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1".into()));
    }
    let numerator = 4 * input.n + 1;
    let (epsilon, exact) = if input.s.is_multiple_of(2) {
        let r = BigRational::new(BigInt::from(numerator), BigInt::one() << (input.s / 2) as usize);
        (r.to_f64().unwrap_or(0.0), Some(r))
    } else {
        (numerator as f64 * libm::exp2(-(input.s as f64) / 2.0), None)
    };
    Ok(BoundResult::new(
        epsilon,
        exact,
        alloc::vec![("numerator", numerator as f64)],
    ))
}

/// `ε = 1 − p₀ + 2η₀ − η₀²` from its two ingredients.
pub fn epsilon_from_components(p0: f64, eta0: f64) -> Result<BoundResult> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameters(alloc::format!("p0 = {p0} outside [0, 1]")));
    }
    if eta0.is_nan() || eta0 < 0.0 {
        return Err(Error::InvalidParameters(alloc::format!("eta0 = {eta0} is negative")));
    }
    let epsilon = (1.0 - p0) + eta0 * (2.0 - eta0);
    Ok(BoundResult::new(
        epsilon,
        None,
        alloc::vec![("p0", p0), ("one_minus_p0", 1.0 - p0), ("eta0", eta0)],
    ))
}

impl GraphBoundInput {
    fn validate(&self) -> Result<()> {
        if self.j == 0 || self.lambda == 0 || self.n == 0 {
            return Err(Error::InvalidParameters("J, lambda and n must be positive".into()));
        }
        if !(self.c > 0.0 && self.m > 0.0 && self.c.is_finite() && self.m.is_finite()) {
            return Err(Error::InvalidParameters("c and m must be positive and finite".into()));
        }
        Ok(())
    }

    /// `J^{−2cm/3} / n`
    fn q(&self) -> f64 {
        libm::pow(self.j as f64, -2.0 * self.c * self.m / 3.0) / self.n as f64
    }

    fn eta0(&self) -> f64 {
        let l = self.lambda as f64;
        (1.0 / l - 1.0 / (l * l)) + (1.0 + 1.0 / l) * (libm::sqrt(self.c) + 0.5) / self.j as f64
    }
}

/// Neumaier-compensated sum.
fn neumaier<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if libm::fabs(sum) >= libm::fabs(t) {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// `Σ_{x=0}^{λ} r^x q^{λ−x}` with `r = 1 − 1/n`, summed in log space.
fn tail_sum(input: &GraphBoundInput) -> f64 {
    let ln_q = libm::log(input.q());
    let ln_r = if input.n == 1 {
        f64::NEG_INFINITY
    } else {
        libm::log1p(-1.0 / input.n as f64)
    };
    let log_term = |x: u64| {
        let (a, b) = (x as f64, (input.lambda - x) as f64);
        // 0^0 = 1 for the degenerate n = 1 case
        let lr = if x == 0 { 0.0 } else { a * ln_r };
        lr + b * ln_q
    };
    let peak = (0..=input.lambda).map(log_term).fold(f64::NEG_INFINITY, f64::max);
    libm::exp(peak) * neumaier((0..=input.lambda).map(|x| libm::exp(log_term(x) - peak)))
}

/// `p₀ = [1 − Σ_{x=0}^{λ} (1 − 1/n)^x (J^{−2cm/3}/n)^{λ−x}]^J`,
/// `η₀ = (1/λ − 1/λ²) + (1 + 1/λ)(√c + ½)/J` and `ε = 1 − p₀ + 2η₀ − η₀²`.
pub fn graph_epsilon(input: GraphBoundInput) -> Result<BoundResult> {
    input.validate()?;
    let sum = tail_sum(&input);
    if !(0.0..=1.0).contains(&sum) {
        return Err(Error::InvalidParameters(alloc::format!(
            "p0 base 1 - {sum} outside [0, 1]"
        )));
    }
    let log_p0 = input.j as f64 * libm::log1p(-sum);
    let one_minus_p0 = -libm::expm1(log_p0);
    let p0 = libm::exp(log_p0);
    let eta0 = input.eta0();
    if eta0.is_nan() || eta0 < 0.0 {
        return Err(Error::InvalidParameters(alloc::format!("eta0 = {eta0} is negative")));
    }
    let epsilon = one_minus_p0 + eta0 * (2.0 - eta0);
    Ok(BoundResult::new(
        epsilon,
        None,
        alloc::vec![
            ("q", input.q()),
            ("sum", sum),
            ("p0", p0),
            ("one_minus_p0", one_minus_p0),
            ("eta0", eta0),
        ],
    ))
}

/// Binary fixed point with `BITS` fractional bits.
struct Fixed;

impl Fixed {
    const BITS: usize = 640;

    fn from_f64(v: f64) -> BigInt {
        let r = BigRational::from_float(v).expect("finite input");
        (r.numer() << Self::BITS) / r.denom()
    }

    fn one() -> BigInt {
        BigInt::one() << Self::BITS
    }

    fn mul(a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> Self::BITS
    }

    fn pow(base: &BigInt, mut e: u64) -> BigInt {
        let mut acc = Self::one();
        let mut sq = base.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = Self::mul(&acc, &sq);
            }
            sq = Self::mul(&sq, &sq);
            e >>= 1;
        }
        acc
    }

    fn to_f64(v: &BigInt) -> f64 {
        BigRational::new(v.clone(), Self::one()).to_f64().unwrap_or(f64::NAN)
    }
}

/// Re-evaluates [`graph_epsilon`] in 640-bit fixed point. The irrational
/// inputs `J^{−2cm/3}` and `√c` enter as their exact binary64 values, so the
/// comparison isolates the summation and exponentiation error.
pub fn graph_epsilon_fixed(input: GraphBoundInput) -> Result<BoundResult> {
    input.validate()?;
    let q = Fixed::from_f64(input.q());
    let one = Fixed::one();
    let r = if input.n == 1 {
        BigInt::zero()
    } else {
        one.clone() - (one.clone() / BigInt::from(input.n))
    };
    // S_k = Σ_{x≤k} r^x q^{k−x} obeys S_{k+1} = q·S_k + r^{k+1}
    let mut sum = one.clone();
    let mut r_pow = one.clone();
    for _ in 0..input.lambda {
        r_pow = Fixed::mul(&r_pow, &r);
        sum = Fixed::mul(&sum, &q) + &r_pow;
    }
    let sum_f = Fixed::to_f64(&sum);
    if sum > one || sum < BigInt::zero() {
        return Err(Error::InvalidParameters(alloc::format!(
            "p0 base 1 - {sum_f} outside [0, 1]"
        )));
    }
    let p0 = Fixed::pow(&(one.clone() - &sum), input.j);
    let one_minus_p0 = one.clone() - &p0;
    let l = BigInt::from(input.lambda);
    let inv_l = one.clone() / &l;
    let inv_l2 = one.clone() / (&l * &l);
    let half = one.clone() >> 1;
    let eta0 = (&inv_l - &inv_l2)
        + Fixed::mul(&(one.clone() + &inv_l), &(Fixed::from_f64(libm::sqrt(input.c)) + half)) / BigInt::from(input.j);
    let two = one.clone() << 1;
    let epsilon = &one_minus_p0 + Fixed::mul(&eta0, &(two - &eta0));
    Ok(BoundResult::new(
        Fixed::to_f64(&epsilon),
        None,
        alloc::vec![
            ("q", input.q()),
            ("sum", sum_f),
            ("p0", Fixed::to_f64(&p0)),
            ("one_minus_p0", Fixed::to_f64(&one_minus_p0)),
            ("eta0", Fixed::to_f64(&eta0)),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_example() {
        let r = ghz_epsilon(GhzBoundInput { n: 3, s: 20 }).unwrap();
        assert_eq!(r.exact, Some(BigRational::new(13.into(), 1024.into())));
        assert!(!r.out_of_range);
        let big = ghz_epsilon(GhzBoundInput { n: 1, s: 0 }).unwrap();
        assert_eq!(big.epsilon, 5.0);
        assert!(big.out_of_range && big.realization_epsilon.is_none());
        assert!(ghz_epsilon(GhzBoundInput { n: 2, s: 7 }).unwrap().exact.is_none());
    }

    #[test]
    fn realization_examples() {
        assert_eq!(realization_bound(0.0).unwrap(), 0.0);
        assert_eq!(realization_bound(1.0).unwrap(), 2.0);
        assert!((realization_bound(0.02).unwrap() - 0.397_994_974_842_648_4).abs() < 1e-12);
        assert_eq!(realization_bound(1.5), Err(Error::OutOfRange(1.5)));
    }

    #[test]
    fn translations() {
        assert_eq!(translate_fidelity(0.3, 1.0).unwrap(), 0.0);
        assert!((translate_fidelity(0.9, 0.99).unwrap() - 0.009).abs() < 1e-15);
        assert_eq!(translate_eta_delta(0.0, 0.0).unwrap(), 0.0);
        assert!(translate_eta_delta(1.2, 0.0).is_err());
    }

    #[test]
    fn forced_limit_is_zero() {
        assert_eq!(epsilon_from_components(1.0, 0.0).unwrap().epsilon, 0.0);
    }

    #[test]
    fn bad_graph_inputs() {
        let ok = GraphBoundInput {
            j: 16,
            lambda: 100,
            c: 1.0,
            m: 1.0,
            n: 4,
        };
        assert!(graph_epsilon(GraphBoundInput { c: -1.0, ..ok }).is_err());
        assert!(graph_epsilon(GraphBoundInput { lambda: 0, ..ok }).is_err());
    }
}
