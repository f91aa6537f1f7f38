//! k-to-1 purification circuits built from recurrence steps.
//!
//! A circuit with `k` inputs is a binary tree: leaves are raw pairs, every
//! internal node is one two-pair step that keeps its left input and sacrifices
//! its right one. Powers of two get a balanced recurrence tree; any remainder
//! is pumped into the running output one raw pair at a time. Intermediate
//! states are twirled back to Werner form after each step.

mod oracle;

pub use oracle::{oracle_simulate_step, DensityMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantmath::{NoiseParams, WernerFidelity};

/// Largest circuit in the family.
pub const MAX_PAIRS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitOutcome {
    pub f_out: WernerFidelity,
    /// Probability that every step of the circuit succeeds.
    pub p_succ: f64,
}

impl CircuitOutcome {
    /// Outcome of the identity circuit.
    pub fn unpurified(f: WernerFidelity) -> Self {
        CircuitOutcome { f_out: f, p_succ: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tree {
    Leaf,
    /// (kept, sacrificed)
    Step(Box<Tree>, Box<Tree>),
}

impl Tree {
    fn balanced(leaves: usize) -> Tree {
        if leaves == 1 {
            Tree::Leaf
        } else {
            let half = leaves / 2;
            Tree::Step(Box::new(Tree::balanced(half)), Box::new(Tree::balanced(half)))
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Tree::Leaf => 1,
            Tree::Step(a, b) => a.leaves() + b.leaves(),
        }
    }

    fn steps(&self) -> usize {
        match self {
            Tree::Leaf => 0,
            Tree::Step(a, b) => 1 + a.steps() + b.steps(),
        }
    }

    fn evaluate(&self, f_in: WernerFidelity, noise: NoiseParams) -> CircuitOutcome {
        match self {
            Tree::Leaf => CircuitOutcome::unpurified(f_in),
            Tree::Step(kept, sacrificed) => {
                let a = kept.evaluate(f_in, noise);
                // sibling subtrees that are identical need evaluating once
                let b = if kept == sacrificed {
                    a
                } else {
                    sacrificed.evaluate(f_in, noise)
                };
                let step = purify_pair(a.f_out, b.f_out, noise);
                CircuitOutcome {
                    f_out: step.f_out,
                    p_succ: a.p_succ * b.p_succ * step.p_succ,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PurificationCircuit {
    k: usize,
    tree: Tree,
}

impl PurificationCircuit {
    /// The family member consuming `k` pairs; `k = 1` is "no purification".
    pub fn new(k: usize) -> Result<Self> {
        if !(1..=MAX_PAIRS).contains(&k) {
            return Err(Error::InvalidCircuitSize(k));
        }
        let base = 1usize << (usize::BITS - 1 - k.leading_zeros());
        let tree = (base..k).fold(Tree::balanced(base), |running, _| {
            Tree::Step(Box::new(running), Box::new(Tree::Leaf))
        });
        Ok(PurificationCircuit { k, tree })
    }

    pub fn identity() -> Self {
        PurificationCircuit { k: 1, tree: Tree::Leaf }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn steps(&self) -> usize {
        self.tree.steps()
    }

    pub fn leaves(&self) -> usize {
        self.tree.leaves()
    }

    pub fn is_pumped(&self) -> bool {
        !self.k.is_power_of_two()
    }
}

/// One twirled recurrence step on Werner inputs `f1` (kept) and `f2`
/// (measured) under depolarizing gates and flipped measurements.
///
/// With probability `p2²` neither party's CNOT depolarizes and the pairs go
/// through the ideal bilateral CNOT; otherwise the whole four-qubit state is
/// maximally mixed (the reduced state of a Bell-diagonal pair is `I/2`),
/// which passes with probability 1/2 and leaves fidelity 1/4. Reported
/// outcomes agree with probability `eta² + (1-eta)²` when the true parities
/// agree and `2 eta (1-eta)` when they do not.
pub fn purify_pair(f1: WernerFidelity, f2: WernerFidelity, noise: NoiseParams) -> CircuitOutcome {
    let (a, b) = (f1.value(), f2.value());
    let (ea, eb) = ((1.0 - a) / 3.0, (1.0 - b) / 3.0);

    // true parities agree: Φ± on both pairs, or Ψ± on both
    let even = (a + ea) * (b + eb) + 4.0 * ea * eb;
    // kept pair ends in Φ+
    let good_even = a * b + ea * eb;
    let good_odd = a * eb + ea * eb;

    let eta = noise.eta();
    let agree = eta * eta + (1.0 - eta) * (1.0 - eta);
    let disagree = 2.0 * eta * (1.0 - eta);
    let clean = noise.p2() * noise.p2();

    let p_succ = clean * (agree * even + disagree * (1.0 - even)) + (1.0 - clean) * 0.5;
    let good = clean * (agree * good_even + disagree * good_odd) + (1.0 - clean) * 0.125;
    CircuitOutcome {
        f_out: WernerFidelity::from_computed(good / p_succ),
        p_succ,
    }
}

/// Folds [`purify_pair`] over the circuit tree with all leaves at `f_in`.
pub fn evaluate_circuit(circuit: &PurificationCircuit, f_in: WernerFidelity, noise: NoiseParams) -> CircuitOutcome {
    circuit.tree.evaluate(f_in, noise)
}

/// Expected purified pairs per timestep: `p_succ * floor(egr / k)`, or the raw
/// `egr` when nothing is purified.
pub fn post_purification_rate(egr: u32, circuit: &PurificationCircuit, outcome: &CircuitOutcome) -> f64 {
    if circuit.k == 1 {
        f64::from(egr)
    } else {
        outcome.p_succ * f64::from(egr / circuit.k as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn wf(f: f64) -> WernerFidelity {
        WernerFidelity::new(f).unwrap()
    }

    #[test]
    fn circuit_shapes() {
        for k in 1..=MAX_PAIRS {
            let c = PurificationCircuit::new(k).unwrap();
            assert_eq!(c.leaves(), k);
            assert_eq!(c.steps(), k - 1);
        }
        assert!(PurificationCircuit::new(0).is_err());
        assert!(PurificationCircuit::new(9).is_err());
        assert!(PurificationCircuit::new(6).unwrap().is_pumped());
        assert!(!PurificationCircuit::new(8).unwrap().is_pumped());
    }

    #[test]
    fn known_steps() {
        let out = purify_pair(wf(1.0), wf(1.0), NoiseParams::PERFECT);
        assert_eq!((out.f_out.value(), out.p_succ), (1.0, 1.0));

        let out = purify_pair(wf(0.25), wf(0.25), NoiseParams::PERFECT);
        assert_abs_diff_eq!(out.f_out.value(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(out.p_succ, 0.5, epsilon = 1e-15);

        let out = purify_pair(wf(0.7), wf(0.7), NoiseParams::PERFECT);
        assert_abs_diff_eq!(out.f_out.value(), 0.7352941176470588, epsilon = 1e-12);
        assert_abs_diff_eq!(out.p_succ, 0.68, epsilon = 1e-12);
    }

    #[test]
    fn noisy_step_matches_numpy_simulation() {
        let out = purify_pair(wf(0.8), wf(0.6), NoiseParams::uniform(0.99).unwrap());
        assert_abs_diff_eq!(out.f_out.value(), 0.7176339904534604, epsilon = 1e-12);
        assert_abs_diff_eq!(out.p_succ, 0.6610648424, epsilon = 1e-12);
    }

    #[test]
    fn circuit_evaluation() {
        let perfect = NoiseParams::PERFECT;
        let noisy = NoiseParams::uniform(0.99).unwrap();
        let id = evaluate_circuit(&PurificationCircuit::identity(), wf(0.9), noisy);
        assert_eq!((id.f_out.value(), id.p_succ), (0.9, 1.0));

        let two = evaluate_circuit(&PurificationCircuit::new(2).unwrap(), wf(0.7), perfect);
        assert_eq!(two, purify_pair(wf(0.7), wf(0.7), perfect));

        // numpy: two rounds of recurrence on f = 0.7
        let four = evaluate_circuit(&PurificationCircuit::new(4).unwrap(), wf(0.7), perfect);
        assert_abs_diff_eq!(four.f_out.value(), 0.7731707317073168, epsilon = 1e-12);
        assert_abs_diff_eq!(four.p_succ, 0.328, epsilon = 1e-12);

        // numpy: balanced pair of steps, then one pumping step
        let three = evaluate_circuit(&PurificationCircuit::new(3).unwrap(), wf(0.7), perfect);
        assert_abs_diff_eq!(three.f_out.value(), 0.754237288135593, epsilon = 1e-12);
        assert_abs_diff_eq!(three.p_succ, 0.472, epsilon = 1e-12);

        let eight = evaluate_circuit(&PurificationCircuit::new(8).unwrap(), wf(0.7), noisy);
        assert_abs_diff_eq!(eight.f_out.value(), 0.7758358488515013, epsilon = 1e-12);
        assert_abs_diff_eq!(eight.p_succ, 0.06727186819840056, epsilon = 1e-12);
    }

    #[test]
    fn rates() {
        let c8 = PurificationCircuit::new(8).unwrap();
        let outcome = CircuitOutcome {
            f_out: wf(0.9),
            p_succ: 0.6,
        };
        assert_abs_diff_eq!(post_purification_rate(20, &c8, &outcome), 1.2, epsilon = 1e-15);
        assert_eq!(post_purification_rate(7, &c8, &outcome), 0.0);
        let id = PurificationCircuit::identity();
        assert_eq!(
            post_purification_rate(20, &id, &CircuitOutcome::unpurified(wf(0.9))),
            20.0
        );
    }

    #[test]
    fn fixed_points_and_gain_region() {
        let perfect = NoiseParams::PERFECT;
        for f in [0.25, 1.0] {
            let out = purify_pair(wf(f), wf(f), perfect);
            assert_abs_diff_eq!(out.f_out.value(), f, epsilon = 1e-15);
        }
        for i in 1..=50 {
            let f = 0.5 + 0.5 * i as f64 / 51.0;
            assert!(purify_pair(wf(f), wf(f), perfect).f_out.value() > f, "no gain at {f}");
        }
    }

    #[test]
    fn noise_never_helps() {
        let levels = [1.0, 0.995, 0.99, 0.97, 0.9];
        for i in 0..=10 {
            for j in 0..=10 {
                let (a, b) = (wf(0.5 + 0.05 * i as f64), wf(0.5 + 0.05 * j as f64));
                for pair in levels.windows(2) {
                    let (hi, lo) = (pair[0], pair[1]);
                    let base = purify_pair(a, b, NoiseParams::new(hi, hi).unwrap());
                    for noise in [NoiseParams::new(lo, hi).unwrap(), NoiseParams::new(hi, lo).unwrap()] {
                        let worse = purify_pair(a, b, noise);
                        assert!(worse.f_out.value() <= base.f_out.value() + 1e-15);
                        assert!(worse.p_succ <= base.p_succ + 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn yield_never_exceeds_input() {
        let noise = NoiseParams::uniform(0.99).unwrap();
        for k in 1..=MAX_PAIRS {
            let c = PurificationCircuit::new(k).unwrap();
            let out = evaluate_circuit(&c, wf(0.8), noise);
            for egr in 0..100u32 {
                let rate = post_purification_rate(egr, &c, &out);
                assert!(rate <= f64::from(egr));
                if k >= 2 {
                    assert!(rate <= f64::from(egr) / k as f64);
                }
            }
        }
    }

    #[test]
    fn oracle_agrees_on_sample_points() {
        for noise in [NoiseParams::PERFECT, NoiseParams::uniform(0.99).unwrap()] {
            for (a, b) in [(0.7, 0.7), (0.8, 0.6), (0.55, 0.95)] {
                let analytic = purify_pair(wf(a), wf(b), noise);
                let simulated = oracle_simulate_step(wf(a), wf(b), noise);
                assert_abs_diff_eq!(analytic.f_out.value(), simulated.f_out.value(), epsilon = 1e-12);
                assert_abs_diff_eq!(analytic.p_succ, simulated.p_succ, epsilon = 1e-12);
            }
        }
    }
}
