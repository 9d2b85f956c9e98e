//! Executable ideal resources and the stabilizer twirl built on top of them.
//!
//! Sessions are strictly sequential and log every message in a
//! [`Transcript`]. Aborts are events, not errors: a session that aborts sends
//! `⊥` to every party on a single broadcast step, so honest parties can never
//! disagree about the outcome. Qubits are handed out as indices into the
//! session's backend state.
//!
//! Corrupted interfaces are driven by one adversary object per session, which
//! stands in for all corrupted parties and their private channel at once.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::graphs::{CorrectionValidator, Graph, Partition, PauliCorrection};
use crate::rng;
use crate::sim::{apply, prepare_graph_state, Backend, CliffordOp, OutcomePolicy, Tableau};

/// An interface of a resource.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartyId {
    Party(usize),
    Source,
}

/// `⊤` / `⊥`
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Top,
    Bottom,
}

/// A party's declaration to the correction-permitting resource: `0`, `1` or `⊥`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartyDecision {
    Honest,
    Corrupt,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Flag(Flag),
    Decision(PartyDecision),
    /// Handle of a delivered qubit.
    Qubit(usize),
    Correction {
        a: BitVec,
        b: BitVec,
    },
    Bits(BitVec),
    Abort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    ToResource,
    FromResource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub party: PartyId,
    pub direction: Direction,
    pub payload: Payload,
}

/// Ordered log of one session.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
    aborted: bool,
}

impl Transcript {
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn aborted(&self) -> bool {
        self.aborted
    }

    fn send(&mut self, party: PartyId, payload: Payload) {
        debug_assert!(!self.aborted, "no deliveries after an abort");
        self.events.push(Event {
            party,
            direction: Direction::FromResource,
            payload,
        });
    }

    fn receive(&mut self, party: PartyId, payload: Payload) {
        self.events.push(Event {
            party,
            direction: Direction::ToResource,
            payload,
        });
    }

    fn abort(&mut self, n: usize) {
        for i in 0..n {
            self.send(PartyId::Party(i), Payload::Abort);
        }
        self.aborted = true;
    }

    /// What the resource delivered to `party`, in order.
    pub fn deliveries(&self, party: usize) -> impl Iterator<Item = &Payload> {
        self.events
            .iter()
            .filter(move |e| e.party == PartyId::Party(party) && e.direction == Direction::FromResource)
            .map(|e| &e.payload)
    }

    /// Either every listed party got an abort and no output, or every listed
    /// party got an output and no abort.
    pub fn abort_is_total(&self, parties: &[usize]) -> bool {
        let status = |i: usize| {
            let mut got_abort = false;
            let mut got_output = false;
            for p in self.deliveries(i) {
                match p {
                    Payload::Abort => got_abort = true,
                    _ => got_output = true,
                }
            }
            (got_abort, got_output)
        };
        parties.iter().all(|&i| status(i) == (true, false)) || parties.iter().all(|&i| status(i) == (false, true))
    }
}

/// Which interfaces the adversary controls.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Corruption {
    pub source: bool,
    pub parties: BTreeSet<usize>,
}

impl Corruption {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn parties(parties: &[usize]) -> Self {
        Corruption {
            source: false,
            parties: parties.iter().copied().collect(),
        }
    }

    pub fn is_corrupt(&self, i: usize) -> bool {
        self.parties.contains(&i)
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.parties.iter().find(|&&i| i >= n) {
            Some(&i) => Err(Error::BadPartition(alloc::format!(
                "party {i} out of range for {n} parties"
            ))),
            None => Ok(()),
        }
    }
}

/// Hooks for the corrupted interfaces of the correction-permitting resource.
pub trait VerifFAdversary<B> {
    fn source(&mut self) -> Flag {
        Flag::Top
    }

    fn decision(&mut self, party: usize) -> PartyDecision;

    /// Early delivery of party `party`'s qubit.
    fn receive_qubit(&mut self, _state: &mut B, _party: usize, _qubit: usize) {}

    /// Corrections `(a_i, b_i)` for the honest register, in honest order.
    fn corrections(&mut self, party: usize, honest: &[usize]) -> (BitVec, BitVec);
}

/// Hooks for the two-round abort handshake shared by the clean resource and
/// the coin flip. `T` is what gets delivered early.
pub trait HandshakeAdversary<T> {
    fn first(&mut self, party: usize) -> Flag;
    fn deliver(&mut self, _party: usize, _item: &T) {}
    fn second(&mut self, party: usize) -> Flag;
}

/// An adversary that follows fixed instructions.
#[derive(Clone, Debug)]
pub struct ScriptedAdversary {
    pub source: Flag,
    pub decision: PartyDecision,
    /// Corrections for the first corrupted party; the rest send zeros.
    pub correction: Option<PauliCorrection>,
    pub first: Flag,
    pub second: Flag,
    pub received: Vec<usize>,
    correction_sent: bool,
}

impl ScriptedAdversary {
    /// Declares corruption and sends no corrections.
    pub fn passive() -> Self {
        ScriptedAdversary {
            source: Flag::Top,
            decision: PartyDecision::Corrupt,
            correction: None,
            first: Flag::Top,
            second: Flag::Top,
            received: Vec::new(),
            correction_sent: false,
        }
    }

    pub fn with_correction(correction: PauliCorrection) -> Self {
        ScriptedAdversary {
            correction: Some(correction),
            ..Self::passive()
        }
    }
}

impl<B> VerifFAdversary<B> for ScriptedAdversary {
    fn source(&mut self) -> Flag {
        self.source
    }

    fn decision(&mut self, _party: usize) -> PartyDecision {
        self.decision
    }

    fn receive_qubit(&mut self, _state: &mut B, _party: usize, qubit: usize) {
        self.received.push(qubit);
    }

    fn corrections(&mut self, _party: usize, honest: &[usize]) -> (BitVec, BitVec) {
        match (&self.correction, self.correction_sent) {
            (Some(c), false) => {
                self.correction_sent = true;
                (c.x.clone(), c.z.clone())
            }
            _ => (BitVec::zeros(honest.len()), BitVec::zeros(honest.len())),
        }
    }
}

impl<T> HandshakeAdversary<T> for ScriptedAdversary {
    fn first(&mut self, _party: usize) -> Flag {
        self.first
    }

    fn second(&mut self, _party: usize) -> Flag {
        self.second
    }
}

/// Outcome of a resource that hands out a state.
#[derive(Clone, Debug)]
pub struct StateSession<B> {
    pub transcript: Transcript,
    /// The joint state; qubit `i` belongs to party `i`.
    pub state: B,
    /// Parties that declared themselves corrupt (empty for the clean resource).
    pub malicious: Vec<usize>,
    /// Aggregated correction applied to the honest register, if any.
    pub correction: Option<PauliCorrection>,
}

impl<B> StateSession<B> {
    pub fn aborted(&self) -> bool {
        self.transcript.aborted()
    }
}

fn check_blank<B: Backend>(n: usize, blank: &B) -> Result<()> {
    if blank.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: blank.num_qubits(),
        });
    }
    Ok(())
}

/// The correction-permitting resource. `blank` must be `|0⟩^n`.
pub fn run_verif_f<B: Backend, A: VerifFAdversary<B>>(
    g: &Graph,
    corruption: &Corruption,
    adversary: &mut A,
    blank: B,
) -> Result<StateSession<B>> {
    let n = g.n();
    corruption.check(n)?;
    check_blank(n, &blank)?;
    let mut state = blank;
    let mut t = Transcript::default();
    let done = |t: Transcript, state: B, malicious: Vec<usize>, correction| StateSession {
        transcript: t,
        state,
        malicious,
        correction,
    };

    let c_s = if corruption.source {
        adversary.source()
    } else {
        Flag::Top
    };
    t.receive(PartyId::Source, Payload::Flag(c_s));
    if c_s == Flag::Bottom {
        t.abort(n);
        return Ok(done(t, state, Vec::new(), None));
    }

    let all: Vec<usize> = (0..n).collect();
    prepare_graph_state(&mut state, g, &all)?;

    let mut any_abort = false;
    let mut malicious = Vec::new();
    for i in 0..n {
        let c = if corruption.is_corrupt(i) {
            adversary.decision(i)
        } else {
            PartyDecision::Honest
        };
        t.receive(PartyId::Party(i), Payload::Decision(c));
        match c {
            PartyDecision::Abort => any_abort = true,
            PartyDecision::Corrupt => malicious.push(i),
            PartyDecision::Honest => {}
        }
    }
    if any_abort {
        t.abort(n);
        return Ok(done(t, state, malicious, None));
    }

    let honest: Vec<usize> = all.iter().copied().filter(|i| !malicious.contains(i)).collect();
    let partition = Partition::new(n, &honest)?;
    for &i in &malicious {
        t.send(PartyId::Party(i), Payload::Qubit(i));
        adversary.receive_qubit(&mut state, i, i);
    }

    let mut x = BitVec::zeros(honest.len());
    let mut z = BitVec::zeros(honest.len());
    for &i in &malicious {
        let (a, b) = adversary.corrections(i, &honest);
        for v in [&a, &b] {
            if v.len() != honest.len() {
                return Err(Error::DimensionMismatch {
                    expected: honest.len(),
                    found: v.len(),
                });
            }
        }
        x.xor_assign(&a);
        z.xor_assign(&b);
        t.receive(PartyId::Party(i), Payload::Correction { a, b });
    }
    let correction = PauliCorrection::new(x, z)?;
    if !malicious.is_empty() && CorrectionValidator::new(g, &partition)?.check(&correction)?.is_none() {
        t.abort(n);
        return Ok(done(t, state, malicious, Some(correction)));
    }

    for (k, &q) in honest.iter().enumerate() {
        if correction.z.get(k) {
            state.z(q);
        }
        if correction.x.get(k) {
            state.x(q);
        }
    }
    for &i in &honest {
        t.send(PartyId::Party(i), Payload::Qubit(i));
    }
    Ok(done(t, state, malicious, Some(correction)))
}

/// Runs the two-round handshake: parties answering `⊥` in the first round
/// get their item early and may then abort for everyone. Returns whether the
/// session went through.
fn handshake<T, A: HandshakeAdversary<T>>(
    n: usize,
    corruption: &Corruption,
    adversary: &mut A,
    t: &mut Transcript,
    item: impl Fn(usize) -> T,
    payload: impl Fn(&T) -> Payload,
) -> bool {
    let mut early = Vec::new();
    for i in 0..n {
        let c = if corruption.is_corrupt(i) {
            adversary.first(i)
        } else {
            Flag::Top
        };
        t.receive(PartyId::Party(i), Payload::Flag(c));
        if c == Flag::Bottom {
            early.push(i);
        }
    }
    for &i in &early {
        let it = item(i);
        t.send(PartyId::Party(i), payload(&it));
        adversary.deliver(i, &it);
    }
    let mut abort = false;
    for &i in &early {
        let c = adversary.second(i);
        t.receive(PartyId::Party(i), Payload::Flag(c));
        abort |= c == Flag::Bottom;
    }
    if abort {
        t.abort(n);
        return false;
    }
    for i in (0..n).filter(|i| !early.contains(i)) {
        t.send(PartyId::Party(i), payload(&item(i)));
    }
    true
}

/// The clean resource: `|G⟩` or a global abort.
pub fn run_verif<B: Backend, A: HandshakeAdversary<usize>>(
    g: &Graph,
    corruption: &Corruption,
    adversary: &mut A,
    blank: B,
) -> Result<StateSession<B>> {
    let n = g.n();
    corruption.check(n)?;
    check_blank(n, &blank)?;
    let mut state = blank;
    let all: Vec<usize> = (0..n).collect();
    prepare_graph_state(&mut state, g, &all)?;
    let mut t = Transcript::default();
    handshake(n, corruption, adversary, &mut t, |i| i, |&q| Payload::Qubit(q));
    Ok(StateSession {
        transcript: t,
        state,
        malicious: Vec::new(),
        correction: None,
    })
}

/// Outcome of a coin-flip session.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoinFlipSession {
    pub transcript: Transcript,
    pub value: Option<BitVec>,
}

/// Samples `x ∈ {0,1}^{n_bits}` for `n_parties` parties.
pub fn run_coinflip<A: HandshakeAdversary<BitVec>>(
    n_bits: usize,
    n_parties: usize,
    corruption: &Corruption,
    adversary: &mut A,
    seed: u64,
) -> Result<CoinFlipSession> {
    corruption.check(n_parties)?;
    let mut r = rng::seeded(seed);
    let x: BitVec = (0..n_bits).map(|_| r.random::<bool>()).collect();
    let mut t = Transcript::default();
    let ok = handshake(
        n_parties,
        corruption,
        adversary,
        &mut t,
        |_| x.clone(),
        |v| Payload::Bits(v.clone()),
    );
    Ok(CoinFlipSession {
        transcript: t,
        value: ok.then_some(x),
    })
}

/// Every honest party `i` applies `X^{x_i} Z^{(G·x)_i}` to its qubit.
///
/// The honest parties are those that did not declare themselves corrupt in
/// the correction-permitting session.
pub fn twirl_protocol<B: Backend>(g: &Graph, verif: &StateSession<B>, coin: &CoinFlipSession) -> Result<B> {
    let Some(x) = coin.value.as_ref().filter(|_| !verif.aborted()) else {
        return Err(Error::AbortedUpstream);
    };
    if x.len() != g.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            found: x.len(),
        });
    }
    let gx = g.adjacency().mul_vec(x)?;
    let mut state = verif.state.clone();
    for i in (0..g.n()).filter(|i| !verif.malicious.contains(i)) {
        if x.get(i) {
            state.x(i);
        }
        if gx.get(i) {
            state.z(i);
        }
    }
    Ok(state)
}

/// Extends an accepted honest correction to a full vector `x′` with
/// `(G·x′)_H = z_h`, so the honest-side Pauli equals a stabilizer times a
/// Pauli on the malicious side.
pub fn complete_correction(g: &Graph, p: &Partition, x_h: &BitVec, z_h: &BitVec) -> Result<BitVec> {
    let validator = CorrectionValidator::new(g, p)?;
    let corr = PauliCorrection::new(x_h.clone(), z_h.clone())?;
    let b = validator.check(&corr)?.ok_or(Error::InvalidCorrection)?;
    let pivot = validator.pivot();
    let m = p.malicious().len();
    let v_t_inv = pivot.v.transpose().invert()?;
    let x_m = v_t_inv.mul_vec(&b.concat(&BitVec::zeros(m - pivot.rank)))?;
    Ok(p.scatter(x_h, &x_m))
}

/// Equal-outcome rates of the Bell-pair distinguisher in both worlds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImpossibilityReport {
    pub trials: u64,
    pub real_equal_rate: f64,
    pub ideal_equal_rate: f64,
    pub advantage: f64,
    /// Half-width of the normal-approximation 95% interval on `advantage`.
    pub ci95: f64,
}

/// The distinguisher measures both halves of what should be a Bell pair in
/// the Z basis and guesses "real" when the outcomes agree.
///
/// In the real world the halves come from one Bell pair. In the simulated
/// world a black-box simulator can only stitch two independent pairs
/// together with an uncorrected Bell measurement, so agreement drops to 1/2.
pub fn impossibility_demo(trials: u64, seed: u64) -> Result<ImpossibilityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be at least 1".into()));
    }
    let bell = |t: &mut Tableau, a: usize, b: usize| {
        t.h(a);
        t.cnot(a, b);
    };
    let mut real_policy = OutcomePolicy::from_rng(rng::stream(seed, 0));
    let mut ideal_policy = OutcomePolicy::from_rng(rng::stream(seed, 1));
    let (mut real_eq, mut ideal_eq) = (0u64, 0u64);
    for _ in 0..trials {
        let mut t = Tableau::new(2);
        bell(&mut t, 0, 1);
        let u = apply(&mut t, CliffordOp::MeasureZ(0), &mut real_policy)?[0];
        let v = apply(&mut t, CliffordOp::MeasureZ(1), &mut real_policy)?[0];
        real_eq += u64::from(u == v);

        let mut t = Tableau::new(4);
        bell(&mut t, 0, 1);
        bell(&mut t, 2, 3);
        apply(&mut t, CliffordOp::BellMeasure(0, 2), &mut ideal_policy)?;
        let u = apply(&mut t, CliffordOp::MeasureZ(1), &mut ideal_policy)?[0];
        let v = apply(&mut t, CliffordOp::MeasureZ(3), &mut ideal_policy)?[0];
        ideal_eq += u64::from(u == v);
    }
    let nf = trials as f64;
    let (pr, pi) = (real_eq as f64 / nf, ideal_eq as f64 / nf);
    let var = (pr * (1.0 - pr) + pi * (1.0 - pi)) / nf;
    Ok(ImpossibilityReport {
        trials,
        real_equal_rate: pr,
        ideal_equal_rate: pi,
        advantage: pr - pi,
        ci95: 1.96 * libm::sqrt(var),
    })
}
