//! Monte-Carlo simulation of the multipartite GHZ verification protocol.
//!
//! Each round a source distributes an `n`-qubit state. With probability
//! `2^{-S}` the round is an output round and the state is kept; otherwise it
//! is tested. In a test round the verifier draws inputs `x` with even weight,
//! party `i` measures `X` when `x_i = 0` and `Y` when `x_i = 1`, and the test
//! passes iff `⊕ y_i = (Σ x_i / 2) mod 2`. A failed test aborts the run.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::rng::{self, Rng};
use crate::sim::{apply, fidelity, Backend, CliffordOp, OutcomePolicy, StateVector};

/// Builds the state handed out in one round.
pub type SourceFn = dyn Fn(usize, &mut Rng) -> Result<StateVector> + Send + Sync;

#[derive(Clone)]
pub enum SourceModel {
    Honest,
    /// `cos θ |0…0⟩ + sin θ |1…1⟩`
    PureState {
        theta: f64,
    },
    Custom(Arc<SourceFn>),
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceModel::Honest => f.write_str("Honest"),
            SourceModel::PureState { theta } => write!(f, "PureState {{ theta: {theta} }}"),
            SourceModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// What a corrupted party reports instead of its measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartyStrategy {
    /// Reports a fresh uniform bit.
    RandomAnswer,
    /// Reports the opposite of what it measured.
    FlipAnswer,
}

/// How output rounds are scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RoundMode {
    /// Draw the number of test rounds before the output round up front.
    #[default]
    Geometric,
    /// Sample `r ∈ {0,1}^S` every round and stop when `r = 0…0`.
    ExactLoop,
}

#[derive(Clone, Debug)]
pub struct VerifConfig {
    pub n: usize,
    /// Security parameter: output rounds occur with probability `2^{-s}`.
    pub s: u32,
    pub seed: u64,
    /// Number of independent protocol runs.
    pub trials: u64,
    pub source: SourceModel,
    pub corruption: BTreeMap<usize, PartyStrategy>,
    pub mode: RoundMode,
    /// Keep a per-round transcript (memory grows with the round count).
    pub record: bool,
}

impl VerifConfig {
    pub fn new(n: usize, s: u32, seed: u64, trials: u64) -> Self {
        VerifConfig {
            n,
            s,
            seed,
            trials,
            source: SourceModel::Honest,
            corruption: BTreeMap::new(),
            mode: RoundMode::default(),
            record: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameters("at least two parties are required".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameters("trials must be at least 1".into()));
        }
        if self.s > 62 {
            return Err(Error::InvalidParameters("security parameter above 62".into()));
        }
        if let Some(&i) = self.corruption.keys().find(|&&i| i >= self.n) {
            return Err(Error::InvalidParameters(alloc::format!("party {i} out of range")));
        }
        Ok(())
    }

    fn produce(&self, rng: &mut Rng) -> Result<StateVector> {
        match &self.source {
            SourceModel::Honest => StateVector::ghz(self.n),
            SourceModel::PureState { theta } => theta_state(self.n, *theta),
            SourceModel::Custom(f) => {
                let sv = f(self.n, rng)?;
                if sv.num_qubits() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        found: sv.num_qubits(),
                    });
                }
                Ok(sv)
            }
        }
    }
}

/// `cos θ |0…0⟩ + sin θ |1…1⟩`
pub fn theta_state(n: usize, theta: f64) -> Result<StateVector> {
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); 1usize << n.min(63)];
    if n > crate::sim::DEFAULT_SV_CAP {
        return Err(Error::CapacityExceeded {
            requested: n,
            limit: crate::sim::DEFAULT_SV_CAP,
        });
    }
    let last = amps.len() - 1;
    amps[0] = Complex64::new(libm::cos(theta), 0.0);
    amps[last] += Complex64::new(libm::sin(theta), 0.0);
    StateVector::from_amplitudes(amps)
}

/// Result of one test round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOutcome {
    pub y: BitVec,
    /// `1` means the test failed.
    pub b_out: u8,
}

fn check_inputs(x: &BitVec, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if x.count_ones() % 2 == 1 {
        return Err(Error::OddInputSum);
    }
    Ok(())
}

fn target(x: &BitVec) -> u8 {
    ((x.count_ones() / 2) % 2) as u8
}

/// Measures every qubit of `state` per `x` and evaluates the parity test.
/// Only honest behaviour; see [`run_protocol`] for corrupted parties.
pub fn run_round<B: Backend>(state: &mut B, x: &BitVec, policy: &mut OutcomePolicy) -> Result<RoundOutcome> {
    check_inputs(x, state.num_qubits())?;
    let y: BitVec = (0..x.len())
        .map(|i| {
            let op = if x.get(i) {
                CliffordOp::MeasureY(i)
            } else {
                CliffordOp::MeasureX(i)
            };
            apply(state, op, policy).map(|o| o[0] == 1)
        })
        .collect::<Result<_>>()?;
    let parity = (y.count_ones() % 2) as u8;
    Ok(RoundOutcome {
        b_out: u8::from(parity != target(x)),
        y,
    })
}

/// Exact probability that an honest test with inputs `x` fails on `state`.
pub fn reject_probability(state: &StateVector, x: &BitVec) -> Result<f64> {
    check_inputs(x, state.num_qubits())?;
    // ⟨P⟩ for P = ⊗ (X or Y); Y = i·X·Z
    let mut image = state.clone();
    let mut phase = Complex64::new(1.0, 0.0);
    for i in 0..x.len() {
        if x.get(i) {
            image.z(i);
            phase *= Complex64::new(0.0, 1.0);
        }
        image.x(i);
    }
    let expectation = (state.inner(&image)? * phase).re;
    let sign = if target(x) == 1 { -1.0 } else { 1.0 };
    Ok((1.0 - sign * expectation) / 2.0)
}

/// Average of [`reject_probability`] over all even-weight inputs.
pub fn exact_reject_rate(state: &StateVector) -> Result<f64> {
    let n = state.num_qubits();
    if n >= 24 {
        return Err(Error::CapacityExceeded {
            requested: n,
            limit: 23,
        });
    }
    let mut total = 0.0;
    let mut count = 0u64;
    for code in 0u64..1 << n {
        if code.count_ones() % 2 == 0 {
            total += reject_probability(state, &BitVec::from_u64(n, code))?;
            count += 1;
        }
    }
    Ok(total / count as f64)
}

/// Trace distance `√(1 − |⟨GHZ|ψ⟩|²)` when nobody is corrupted.
pub fn tau_pure(state: &StateVector, corruption: &BTreeMap<usize, PartyStrategy>) -> Result<f64> {
    if !corruption.is_empty() {
        return Err(Error::UnsupportedCorruption);
    }
    let f = fidelity(&StateVector::ghz(state.num_qubits())?, state)?;
    Ok(libm::sqrt((1.0 - f * f).max(0.0)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RoundRecord {
    Output {
        trial: u64,
    },
    Test {
        trial: u64,
        verifier: usize,
        x: BitVec,
        reported: BitVec,
        b_out: u8,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunStats {
    pub rounds: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub outputs: u64,
}

impl RunStats {
    pub fn test_rounds(&self) -> u64 {
        self.accepts + self.rejects
    }

    /// Empirical per-test-round reject rate.
    pub fn reject_rate(&self) -> f64 {
        match self.test_rounds() {
            0 => 0.0,
            t => self.rejects as f64 / t as f64,
        }
    }

    /// Binomial standard error `√(p(1−p)/N)` of [`Self::reject_rate`].
    pub fn sigma(&self) -> f64 {
        match self.test_rounds() {
            0 => 0.0,
            t => {
                let p = self.reject_rate();
                libm::sqrt(p * (1.0 - p) / t as f64)
            }
        }
    }

    /// Half-width of the normal-approximation 95% interval.
    pub fn ci95(&self) -> f64 {
        1.96 * self.sigma()
    }

    pub fn rounds_per_output(&self) -> Option<f64> {
        (self.outputs > 0).then(|| self.rounds as f64 / self.outputs as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolRun {
    pub stats: RunStats,
    pub transcript: Vec<RoundRecord>,
}

fn even_inputs(n: usize, rng: &mut Rng) -> BitVec {
    let mut x: BitVec = (0..n).map(|_| rng.random::<bool>()).collect();
    if x.count_ones() % 2 == 1 {
        x.flip(n - 1);
    }
    x
}

/// Number of test rounds preceding the output round, `Geometric(2^{-s})`.
fn geometric(s: u32, rng: &mut Rng) -> u64 {
    if s == 0 {
        return 0;
    }
    let p = libm::ldexp(1.0, -(s as i32));
    let u: f64 = rng.random::<f64>();
    // inverse CDF of the number of failures before the first success
    libm::floor(libm::log1p(-u) / libm::log1p(-p)) as u64
}

/// Runs `config.trials` independent protocol executions. Each ends with
/// either an output round or a failed test.
pub fn run_protocol(config: &VerifConfig) -> Result<ProtocolRun> {
    config.validate()?;
    let mut stats = RunStats::default();
    let mut transcript = Vec::new();
    let mask = if config.s == 0 { 0 } else { (1u64 << config.s) - 1 };
    for trial in 0..config.trials {
        let mut choices = rng::stream(config.seed, 2 * trial);
        let mut policy = OutcomePolicy::from_rng(rng::stream(config.seed, 2 * trial + 1));
        let mut remaining_tests = match config.mode {
            RoundMode::Geometric => Some(geometric(config.s, &mut choices)),
            RoundMode::ExactLoop => None,
        };
        loop {
            let mut state = config.produce(&mut choices)?;
            stats.rounds += 1;
            let output = match &mut remaining_tests {
                Some(0) => true,
                Some(k) => {
                    *k -= 1;
                    false
                }
                None => choices.random::<u64>() & mask == 0,
            };
            if output {
                stats.outputs += 1;
                if config.record {
                    transcript.push(RoundRecord::Output { trial });
                }
                break;
            }
            let verifier = choices.random_range(0..config.n);
            let x = even_inputs(config.n, &mut choices);
            let honest = run_round(&mut state, &x, &mut policy)?;
            let reported: BitVec = (0..config.n)
                .map(|i| match config.corruption.get(&i) {
                    None => honest.y.get(i),
                    Some(PartyStrategy::FlipAnswer) => !honest.y.get(i),
                    Some(PartyStrategy::RandomAnswer) => choices.random::<bool>(),
                })
                .collect();
            let b_out = u8::from((reported.count_ones() % 2) as u8 != target(&x));
            if config.record {
                transcript.push(RoundRecord::Test {
                    trial,
                    verifier,
                    x,
                    reported,
                    b_out,
                });
            }
            if b_out == 1 {
                stats.rejects += 1;
                break;
            }
            stats.accepts += 1;
        }
    }
    Ok(ProtocolRun { stats, transcript })
}

/// Runs `rounds` independent test rounds on fresh source states and counts
/// failures, without output rounds or early stopping.
pub fn sample_test_rounds(config: &VerifConfig, rounds: u64) -> Result<RunStats> {
    config.validate()?;
    let mut choices = rng::stream(config.seed, 0);
    let mut policy = OutcomePolicy::from_rng(rng::stream(config.seed, 1));
    let mut stats = RunStats::default();
    for _ in 0..rounds {
        let mut state = config.produce(&mut choices)?;
        let x = even_inputs(config.n, &mut choices);
        let out = run_round(&mut state, &x, &mut policy)?;
        let reported = (0..config.n).fold(out.y.count_ones() % 2 == 1, |acc, i| match config.corruption.get(&i) {
            None => acc,
            Some(PartyStrategy::FlipAnswer) => !acc,
            Some(PartyStrategy::RandomAnswer) => acc ^ out.y.get(i) ^ choices.random::<bool>(),
        });
        stats.rounds += 1;
        if u8::from(reported) != target(&x) {
            stats.rejects += 1;
        } else {
            stats.accepts += 1;
        }
    }
    Ok(stats)
}
