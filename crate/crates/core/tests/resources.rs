use graphmerge_core::graphs::CorrectionValidator;
use graphmerge_core::resources::{
    complete_correction, run_coinflip, run_verif, run_verif_f, twirl_protocol, Corruption, Flag, HandshakeAdversary,
    PartyDecision, ScriptedAdversary, VerifFAdversary,
};
use graphmerge_core::rng;
use graphmerge_core::sim::{Backend, Tableau};
use graphmerge_core::{BitVec, Graph, Partition, PauliCorrection};
use proptest::prelude::*;
use rand::Rng as _;

/// Answers every hook with a fresh random choice.
struct Chaotic(rng::Rng);

impl<B> VerifFAdversary<B> for Chaotic {
    fn source(&mut self) -> Flag {
        if self.0.random_range(0..5) == 0 {
            Flag::Bottom
        } else {
            Flag::Top
        }
    }

    fn decision(&mut self, _party: usize) -> PartyDecision {
        match self.0.random_range(0..6) {
            0 => PartyDecision::Abort,
            1 => PartyDecision::Honest,
            _ => PartyDecision::Corrupt,
        }
    }

    fn corrections(&mut self, _party: usize, honest: &[usize]) -> (BitVec, BitVec) {
        let mut bits = || (0..honest.len()).map(|_| self.0.random::<bool>()).collect::<BitVec>();
        (bits(), bits())
    }
}

impl<T> HandshakeAdversary<T> for Chaotic {
    fn first(&mut self, _party: usize) -> Flag {
        if self.0.random::<bool>() {
            Flag::Bottom
        } else {
            Flag::Top
        }
    }

    fn second(&mut self, _party: usize) -> Flag {
        if self.0.random_range(0..3) == 0 {
            Flag::Bottom
        } else {
            Flag::Top
        }
    }
}

fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, e)| e)
        .collect();
    Graph::from_edges(n, &edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn aborts_reach_every_honest_party(n in 1usize..6, mask in any::<u64>(), corrupt in any::<u8>(), source in any::<bool>(), seed in any::<u64>()) {
        let g = graph_from_mask(n, mask);
        let parties: Vec<usize> = (0..n).filter(|i| corrupt >> i & 1 == 1).collect();
        let honest: Vec<usize> = (0..n).filter(|i| !parties.contains(i)).collect();
        let corruption = Corruption { source, parties: parties.iter().copied().collect() };
        let mut adv = Chaotic(rng::seeded(seed));

        let s = run_verif_f(&g, &corruption, &mut adv, Tableau::new(n)).unwrap();
        prop_assert!(s.transcript.abort_is_total(&honest));
        let s = run_verif(&g, &corruption, &mut adv, Tableau::new(n)).unwrap();
        prop_assert!(s.transcript.abort_is_total(&honest));
        let c = run_coinflip(n, n, &corruption, &mut adv, seed).unwrap();
        prop_assert!(c.transcript.abort_is_total(&honest));
        prop_assert_eq!(c.value.is_none(), c.transcript.aborted());
    }
}

#[test]
fn coinflip_is_uniform() {
    // chi-squared over 3-bit values, 7 degrees of freedom; 99.9% quantile is 24.32
    let trials = 8000u64;
    let mut counts = [0u64; 8];
    for seed in 0..trials {
        let s = run_coinflip(3, 4, &Corruption::none(), &mut ScriptedAdversary::passive(), seed).unwrap();
        counts[s.value.unwrap().to_u64() as usize] += 1;
    }
    let expected = trials as f64 / 8.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 24.32, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn completed_corrections_are_stabilizers() {
    for n in 1..=4 {
        for g in Graph::enumerate(n) {
            let reference = Tableau::graph_state(&g).canonical_form();
            for p in Partition::enumerate(n) {
                for corr in CorrectionValidator::new(&g, &p).unwrap().accepted_set() {
                    let x = complete_correction(&g, &p, &corr.x, &corr.z).unwrap();
                    let gx = g.adjacency().mul_vec(&x).unwrap();
                    assert_eq!(p.restrict_honest(&x), corr.x);
                    assert_eq!(p.restrict_honest(&gx), corr.z);
                    let mut t = Tableau::graph_state(&g);
                    for q in 0..n {
                        if gx.get(q) {
                            t.z(q);
                        }
                        if x.get(q) {
                            t.x(q);
                        }
                    }
                    assert_eq!(t.canonical_form(), reference);
                }
            }
        }
    }
}

#[test]
fn rejected_correction_cannot_be_completed() {
    let g = Graph::path(3);
    let p = Partition::new(3, &[0, 2]).unwrap();
    let validator = CorrectionValidator::new(&g, &p).unwrap();
    let bad = (0..16u64)
        .map(|c| PauliCorrection::new(BitVec::from_u64(2, c & 3), BitVec::from_u64(2, c >> 2)).unwrap())
        .find(|c| validator.check(c).unwrap().is_none())
        .expect("some correction is rejected");
    assert!(complete_correction(&g, &p, &bad.x, &bad.z).is_err());
}

#[test]
fn twirl_without_corruption_keeps_graph_state() {
    let g = Graph::complete(4);
    let reference = Tableau::graph_state(&g).canonical_form();
    for seed in 0..32 {
        let verif = run_verif_f(
            &g,
            &Corruption::none(),
            &mut ScriptedAdversary::passive(),
            Tableau::new(4),
        )
        .unwrap();
        let coin = run_coinflip(4, 4, &Corruption::none(), &mut ScriptedAdversary::passive(), seed).unwrap();
        let out = twirl_protocol(&g, &verif, &coin).unwrap();
        assert_eq!(out.canonical_form(), reference);
    }
}

#[test]
fn accepted_correction_yields_graph_state_on_honest_side() {
    // a corrupted party sending an accepted correction leaves a state equal
    // to |G⟩ up to a Pauli on the corrupted qubit
    let g = Graph::path(3);
    let p = Partition::new(3, &[0, 2]).unwrap();
    for corr in CorrectionValidator::new(&g, &p).unwrap().accepted_set() {
        let mut adv = ScriptedAdversary::with_correction(corr.clone());
        let s = run_verif_f(&g, &Corruption::parties(&[1]), &mut adv, Tableau::new(3)).unwrap();
        assert!(!s.aborted());
        let x = complete_correction(&g, &p, &corr.x, &corr.z).unwrap();
        let gx = g.adjacency().mul_vec(&x).unwrap();
        let mut t = s.state.clone();
        // undo the malicious-side part of the stabilizer
        if gx.get(1) {
            t.z(1);
        }
        if x.get(1) {
            t.x(1);
        }
        assert_eq!(t.canonical_form(), Tableau::graph_state(&g).canonical_form());
    }
}
