#![allow(dead_code)]

use qrepeater::chainopt::{enumerate_segmentations, evaluate_plan, Chain, Link, PlanEvaluation, PurificationPlan};
use qrepeater::netgraph::NodeId;
use qrepeater::quantmath::{NoiseParams, WernerFidelity};
use rand::Rng;

/// Best plan over every segmentation and every k-vector with entries in
/// `1..=max_k`, by plain enumeration.
pub fn brute_force(chain: &Chain, max_k: usize) -> (PurificationPlan, PlanEvaluation) {
    let mut best: Option<(PurificationPlan, PlanEvaluation)> = None;
    for lengths in enumerate_segmentations(chain.hops()).unwrap() {
        let n = lengths.len();
        for code in 0..max_k.pow(n as u32) {
            let ks: Vec<usize> = (0..n).map(|i| code / max_k.pow(i as u32) % max_k + 1).collect();
            let plan = PurificationPlan::from_parts(&lengths, &ks).unwrap();
            let eval = evaluate_plan(chain, &plan).unwrap();
            if best.as_ref().is_none_or(|(_, b)| eval.d_total > b.d_total) {
                best = Some((plan, eval));
            }
        }
    }
    best.unwrap()
}

pub fn chain_of(links: Vec<Link>, noise: NoiseParams) -> Chain {
    let nodes = (0..=links.len() as u32).map(NodeId).collect();
    Chain::new(nodes, links, noise).unwrap()
}

pub fn random_chain(rng: &mut impl Rng, max_hops: usize, noise: NoiseParams) -> Chain {
    let hops = rng.gen_range(1..=max_hops);
    let links = (0..hops)
        .map(|_| Link {
            egr: rng.gen_range(1..=40),
            fidelity: WernerFidelity::new(rng.gen_range(0.85..=1.0)).unwrap(),
        })
        .collect();
    chain_of(links, noise)
}
