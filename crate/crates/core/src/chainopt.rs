//! Purification planning on a fixed repeater chain.
//!
//! A plan cuts the chain's hops into contiguous segments of at most three
//! hops. Within a segment the raw links are swapped into one long pair and a
//! single purification circuit runs on those pairs; the purified segment
//! pairs are then swapped end to end. The end-to-end rate is the slowest
//! segment's post-purification rate.
//!
//! [`optimize_chain`] visits every segmentation and, for each, starts all
//! segments at the most selective circuit and repeatedly relaxes the
//! rate-bottleneck segments, keeping the best plan seen.

use std::cmp::Ordering;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{Network, NodeId};
use crate::purification::{evaluate_circuit, post_purification_rate, CircuitOutcome, PurificationCircuit, MAX_PAIRS};
use crate::quantmath::{distillable, swap_fidelity, swap_w, NoiseParams, WernerFidelity};

/// Longest chain the optimizer accepts.
pub const MAX_CHAIN_HOPS: usize = 10;
/// Longest span one purification round may cover.
pub const MAX_SEGMENT_HOPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub egr: u32,
    pub fidelity: WernerFidelity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    noise: NoiseParams,
}

impl Chain {
    pub fn new(nodes: Vec<NodeId>, links: Vec<Link>, noise: NoiseParams) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::MalformedChain("a chain needs at least one hop".into()));
        }
        if nodes.len() != links.len() + 1 {
            return Err(Error::MalformedChain(format!(
                "{} nodes cannot carry {} links",
                nodes.len(),
                links.len()
            )));
        }
        Ok(Chain { nodes, links, noise })
    }

    /// `hops` identical links on nodes `0..=hops`.
    pub fn uniform(hops: usize, egr: u32, fidelity: WernerFidelity, noise: NoiseParams) -> Result<Self> {
        let nodes = (0..=hops as u32).map(NodeId).collect();
        Chain::new(nodes, vec![Link { egr, fidelity }; hops], noise)
    }

    /// The chain traced by `path` through `net`, using the network's noise.
    pub fn from_path(net: &Network, path: &[NodeId]) -> Result<Self> {
        for &n in path {
            net.check_node(n)?;
        }
        let links = net
            .path_channels(path)?
            .into_iter()
            .map(|ch| {
                let c = net.channel(ch);
                Link {
                    egr: c.egr,
                    fidelity: c.raw_fidelity,
                }
            })
            .collect();
        Chain::new(path.to_vec(), links, net.noise())
    }

    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn noise(&self) -> NoiseParams {
        self.noise
    }
}

/// One purification round over hops `start..start + hops`, consuming `k`
/// swapped pairs per output pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub hops: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PurificationPlan {
    segments: Vec<Segment>,
}

impl PurificationPlan {
    pub fn new(segments: Vec<Segment>) -> Self {
        PurificationPlan { segments }
    }

    /// Builds consecutive segments from their lengths and circuit sizes.
    pub fn from_parts(lengths: &[usize], ks: &[usize]) -> Result<Self> {
        if lengths.len() != ks.len() {
            return Err(Error::MalformedPlan(format!(
                "{} segment lengths but {} circuits",
                lengths.len(),
                ks.len()
            )));
        }
        let mut start = 0;
        let segments = lengths
            .iter()
            .zip(ks)
            .map(|(&hops, &k)| {
                let seg = Segment { start, hops, k };
                start += hops;
                seg
            })
            .collect();
        Ok(PurificationPlan { segments })
    }

    /// Plain swapping over the whole chain, grouped into maximal segments.
    pub fn unpurified(hops: usize) -> Self {
        let lengths: Vec<usize> = (0..hops)
            .step_by(MAX_SEGMENT_HOPS)
            .map(|s| (hops - s).min(MAX_SEGMENT_HOPS))
            .collect();
        let ks = vec![1; lengths.len()];
        Self::from_parts(&lengths, &ks).expect("lengths and ks agree")
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.hops).collect()
    }

    pub fn ks(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.k).collect()
    }

    /// Longest segment that actually purifies, or 0 if none does.
    pub fn max_purified_span(&self) -> usize {
        self.segments
            .iter()
            .filter(|s| s.k > 1)
            .map(|s| s.hops)
            .max()
            .unwrap_or(0)
    }

    /// Compact "hops:kK" list, e.g. `2:k4|1:k1`.
    pub fn summary(&self) -> String {
        self.segments
            .iter()
            .map(|s| format!("{}:k{}", s.hops, s.k))
            .collect::<Vec<_>>()
            .join("|")
    }

    pub fn validate(&self, hops: usize) -> Result<()> {
        let mut expected = 0;
        for seg in &self.segments {
            if seg.start != expected {
                return Err(Error::MalformedPlan(format!(
                    "segment starts at hop {} but hop {expected} is next",
                    seg.start
                )));
            }
            if !(1..=MAX_SEGMENT_HOPS).contains(&seg.hops) {
                return Err(Error::MalformedPlan(format!("segment of {} hops", seg.hops)));
            }
            if !(1..=MAX_PAIRS).contains(&seg.k) {
                return Err(Error::MalformedPlan(format!("circuit size {}", seg.k)));
            }
            expected += seg.hops;
        }
        if expected != hops {
            return Err(Error::MalformedPlan(format!(
                "segments cover {expected} hops of a {hops}-hop chain"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanEvaluation {
    pub final_fidelity: WernerFidelity,
    /// Expected end-to-end pairs per timestep.
    pub rate: f64,
    /// Distillable entanglement in ebits per timestep.
    pub d_total: f64,
}

impl PlanEvaluation {
    pub const NONE: PlanEvaluation = PlanEvaluation {
        final_fidelity: WernerFidelity::MIXED,
        rate: 0.0,
        d_total: 0.0,
    };
}

/// All ordered compositions of `n_hops` into parts of at most three hops.
pub fn enumerate_segmentations(n_hops: usize) -> Result<Vec<Vec<usize>>> {
    if !(1..=MAX_CHAIN_HOPS).contains(&n_hops) {
        return Err(Error::HopsOutOfRange {
            hops: n_hops,
            max: MAX_CHAIN_HOPS,
        });
    }
    fn extend(remaining: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in 1..=remaining.min(MAX_SEGMENT_HOPS) {
            prefix.push(part);
            extend(remaining - part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    extend(n_hops, &mut Vec::new(), &mut out);
    Ok(out)
}

fn cached_segmentations(n_hops: usize) -> Result<&'static [Vec<usize>]> {
    static TABLE: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (1..=MAX_CHAIN_HOPS)
            .map(|n| enumerate_segmentations(n).expect("length in range"))
            .collect()
    });
    if !(1..=MAX_CHAIN_HOPS).contains(&n_hops) {
        return Err(Error::HopsOutOfRange {
            hops: n_hops,
            max: MAX_CHAIN_HOPS,
        });
    }
    Ok(&table[n_hops - 1])
}

/// A segment purified with a given circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SegmentOption {
    k: usize,
    f_out: WernerFidelity,
    rate: f64,
}

struct Circuits(Vec<PurificationCircuit>);

impl Circuits {
    fn shared() -> &'static Circuits {
        static CIRCUITS: OnceLock<Circuits> = OnceLock::new();
        CIRCUITS.get_or_init(|| {
            Circuits(
                (1..=MAX_PAIRS)
                    .map(|k| PurificationCircuit::new(k).expect("k in range"))
                    .collect(),
            )
        })
    }

    fn get(&self, k: usize) -> &PurificationCircuit {
        &self.0[k - 1]
    }
}

/// Circuit outcomes for every `k`, memoized by input fidelity within one
/// optimizer run (uniform chains reuse the same few inputs).
struct OutcomeCache<'a> {
    circuits: &'a Circuits,
    noise: NoiseParams,
    entries: Vec<(u64, Vec<CircuitOutcome>)>,
}

impl<'a> OutcomeCache<'a> {
    fn new(circuits: &'a Circuits, noise: NoiseParams) -> Self {
        OutcomeCache {
            circuits,
            noise,
            entries: Vec::new(),
        }
    }

    /// Outcomes of every circuit up to [`MAX_PAIRS`] for this input.
    fn outcomes(&mut self, f_in: WernerFidelity) -> &[CircuitOutcome] {
        let key = f_in.value().to_bits();
        let idx = match self.entries.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                let outs = self
                    .circuits
                    .0
                    .iter()
                    .map(|c| evaluate_circuit(c, f_in, self.noise))
                    .collect();
                self.entries.push((key, outs));
                self.entries.len() - 1
            }
        };
        &self.entries[idx].1
    }
}

fn segment_options(
    chain: &Chain,
    start: usize,
    hops: usize,
    cache: &mut OutcomeCache,
    ks: &[usize],
) -> Vec<SegmentOption> {
    let links = &chain.links[start..start + hops];
    let fids: Vec<WernerFidelity> = links.iter().map(|l| l.fidelity).collect();
    let f_in = swap_fidelity(&fids, chain.noise).expect("segment is non-empty");
    // swapping is 1:1, so the weakest link sets the pair count
    let egr = links.iter().map(|l| l.egr).min().expect("segment is non-empty");
    let circuits = cache.circuits;
    let outcomes = cache.outcomes(f_in);
    ks.iter()
        .map(|&k| {
            let outcome = &outcomes[k - 1];
            SegmentOption {
                k,
                f_out: outcome.f_out,
                rate: post_purification_rate(egr, circuits.get(k), outcome),
            }
        })
        .collect()
}

/// Swaps the purified segment pairs together. Performs the same arithmetic,
/// in the same order, as [`swap_fidelity`] so that every caller gets
/// bit-identical results for the same plan.
fn combine<'o>(
    options: impl ExactSizeIterator<Item = &'o SegmentOption> + Clone,
    noise: NoiseParams,
) -> PlanEvaluation {
    let rate = options.clone().map(|o| o.rate).fold(f64::INFINITY, f64::min);
    let final_fidelity = if options.len() == 1 {
        options.clone().next().expect("one segment").f_out
    } else {
        WernerFidelity::from_computed(0.25 + 0.75 * swap_w(options.map(|o| o.f_out.w()), noise))
    };
    PlanEvaluation {
        final_fidelity,
        rate,
        d_total: distillable(rate, final_fidelity),
    }
}

pub fn evaluate_plan(chain: &Chain, plan: &PurificationPlan) -> Result<PlanEvaluation> {
    plan.validate(chain.hops())?;
    let mut cache = OutcomeCache::new(Circuits::shared(), chain.noise);
    let options: Vec<SegmentOption> = plan
        .segments
        .iter()
        .map(|s| segment_options(chain, s.start, s.hops, &mut cache, &[s.k])[0])
        .collect();
    Ok(combine(options.iter(), chain.noise))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimizerOptions {
    /// Most selective circuit considered; relaxation starts here.
    pub max_k: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { max_k: MAX_PAIRS }
    }
}

/// Circuits for one segment that are not beaten on both rate and fidelity
/// by a less selective circuit, ordered from most to least selective.
///
/// Dropping dominated choices never lowers the optimum, and along what
/// remains fidelity falls strictly while rate rises strictly, which is the
/// ordering relaxation relies on.
fn relaxation_ladder(options: &[SegmentOption]) -> Vec<SegmentOption> {
    let dominated = |o: &SegmentOption| {
        options.iter().any(|p| {
            p.k != o.k && p.rate >= o.rate && p.f_out >= o.f_out && (p.rate > o.rate || p.f_out > o.f_out || p.k < o.k)
        })
    };
    let mut ladder: Vec<SegmentOption> = options.iter().copied().filter(|o| !dominated(o)).collect();
    ladder.sort_by(|a, b| b.f_out.partial_cmp(&a.f_out).unwrap_or(Ordering::Equal));
    ladder
}

/// Better plans sort first: higher `d_total`, then higher fidelity, then
/// fewer segments, then smaller circuit sizes, then shorter leading segments.
fn compare_candidates(a: (&PlanEvaluation, &[usize], &[usize]), b: (&PlanEvaluation, &[usize], &[usize])) -> Ordering {
    let (ea, la, ka) = a;
    let (eb, lb, kb) = b;
    eb.d_total
        .total_cmp(&ea.d_total)
        .then_with(|| eb.final_fidelity.value().total_cmp(&ea.final_fidelity.value()))
        .then_with(|| la.len().cmp(&lb.len()))
        .then_with(|| ka.cmp(kb))
        .then_with(|| la.cmp(lb))
}

pub fn optimize_chain(chain: &Chain) -> Result<(PurificationPlan, PlanEvaluation)> {
    optimize_chain_with(chain, OptimizerOptions::default())
}

pub fn optimize_chain_with(chain: &Chain, opts: OptimizerOptions) -> Result<(PurificationPlan, PlanEvaluation)> {
    let hops = chain.hops();
    let segmentations = cached_segmentations(hops)?;
    if !(1..=MAX_PAIRS).contains(&opts.max_k) {
        return Err(Error::InvalidCircuitSize(opts.max_k));
    }
    let mut cache = OutcomeCache::new(Circuits::shared(), chain.noise);
    let ks: Vec<usize> = (1..=opts.max_k).collect();

    // ladders[start][len - 1]
    let ladders: Vec<Vec<Vec<SegmentOption>>> = (0..hops)
        .map(|start| {
            (1..=MAX_SEGMENT_HOPS.min(hops - start))
                .map(|len| relaxation_ladder(&segment_options(chain, start, len, &mut cache, &ks)))
                .collect()
        })
        .collect();

    let mut best: Option<(PlanEvaluation, Vec<usize>, Vec<usize>)> = None;
    let mut current: Vec<SegmentOption> = Vec::with_capacity(hops);
    let mut current_ks: Vec<usize> = Vec::with_capacity(hops);
    for lengths in segmentations {
        let mut start = 0;
        let rungs: Vec<&[SegmentOption]> = lengths
            .iter()
            .map(|&len| {
                let r = ladders[start][len - 1].as_slice();
                start += len;
                r
            })
            .collect();
        // no point on this ladder beats the best rate paired with the best
        // fidelity; the slack absorbs rounding differences
        if let Some((be, _, _)) = &best {
            current.clear();
            current.extend(rungs.iter().map(|r| r[0]));
            let top = combine(current.iter(), chain.noise);
            let max_rate = rungs.iter().map(|r| r[r.len() - 1].rate).fold(f64::INFINITY, f64::min);
            if distillable(max_rate, top.final_fidelity) * (1.0 + 1e-9) < be.d_total {
                continue;
            }
        }
        let mut position = vec![0usize; rungs.len()];
        current.clear();
        current.extend(rungs.iter().map(|r| r[0]));
        loop {
            let eval = combine(current.iter(), chain.noise);
            let contender = match &best {
                None => true,
                Some((be, _, _)) => eval.d_total >= be.d_total,
            };
            if contender {
                current_ks.clear();
                current_ks.extend(current.iter().map(|o| o.k));
                let better = match &best {
                    None => true,
                    Some((be, bl, bk)) => {
                        compare_candidates((&eval, lengths, &current_ks), (be, bl, bk)) == Ordering::Less
                    }
                };
                if better {
                    best = Some((eval, lengths.clone(), current_ks.clone()));
                }
            }

            // relax every segment tied at the lowest rate among those that
            // still have a less selective circuit to move to
            let mut bottleneck = f64::INFINITY;
            for (i, o) in current.iter().enumerate() {
                if position[i] + 1 < rungs[i].len() && o.rate < bottleneck {
                    bottleneck = o.rate;
                }
            }
            if bottleneck == f64::INFINITY {
                break;
            }
            for i in 0..current.len() {
                if current[i].rate == bottleneck && position[i] + 1 < rungs[i].len() {
                    position[i] += 1;
                    current[i] = rungs[i][position[i]];
                }
            }
        }
    }
    let (eval, lengths, ks) = best.expect("at least one segmentation");
    Ok((PurificationPlan::from_parts(&lengths, &ks)?, eval))
}

/// Upper bound on `d_total / m` over every plan for a chain of `hops` links
/// that all have fidelity `fidelity`, where `m` is the chain's weakest EGR.
///
/// The segment holding the weakest link delivers at most `m * p / k` pairs,
/// and the final fidelity is at most what that segment's circuit allows with
/// every other segment at its best fidelity. Over-long chains are swapped
/// unpurified, so their ratio is exact.
pub fn yield_bound(hops: usize, fidelity: WernerFidelity, noise: NoiseParams) -> Result<f64> {
    if hops > MAX_CHAIN_HOPS {
        let chain = Chain::uniform(hops, 1, fidelity, noise)?;
        return Ok(evaluate_plan(&chain, &PurificationPlan::unpurified(hops))?.d_total);
    }
    let circuits = Circuits::shared();
    // per segment length: (w_out, rate ratio) for every k, and the best w_out
    let mut options: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut best_w: Vec<f64> = Vec::new();
    for len in 1..=MAX_SEGMENT_HOPS {
        let f_in = swap_fidelity(&vec![fidelity; len], noise)?;
        let opts: Vec<(f64, f64)> = circuits
            .0
            .iter()
            .map(|c| {
                let out = evaluate_circuit(c, f_in, noise);
                let ratio = if c.k() == 1 { 1.0 } else { out.p_succ / c.k() as f64 };
                (out.f_out.w(), ratio)
            })
            .collect();
        best_w.push(opts.iter().map(|o| o.0).fold(0.0, f64::max));
        options.push(opts);
    }
    let factor = noise.swap_factor();
    let mut bound = 0.0f64;
    for lengths in cached_segmentations(hops)? {
        let swaps = factor.powi(lengths.len() as i32 - 1);
        for (j, &len_j) in lengths.iter().enumerate() {
            let others: f64 = lengths
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, &len)| best_w[len - 1])
                .product();
            for &(w, ratio) in &options[len_j - 1] {
                let f = WernerFidelity::from_computed(0.25 + 0.75 * swaps * others * w);
                bound = bound.max(distillable(ratio, f));
            }
        }
    }
    Ok(bound)
}
