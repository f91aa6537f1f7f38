//! Path selection: bounded exhaustive search, weighted shortest paths and
//! greedy edge-disjoint multipath routing. Every candidate path is scored by
//! the chain optimizer.

mod dijkstra;
mod paths;

pub use dijkstra::{path_cost, shortest_weighted_path};
pub use paths::{enumerate_paths, for_each_path};

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use serde::{Deserialize, Serialize};

use crate::chainopt::{
    evaluate_plan, optimize_chain, yield_bound, Chain, PlanEvaluation, PurificationPlan, MAX_CHAIN_HOPS,
};
use crate::error::{Error, Result};
use crate::netgraph::{Network, NodeId};
use crate::par::Exec;

/// Default hop cutoff for exhaustive search.
pub const DEFAULT_CUTOFF: usize = 10;

/// Per-channel weight for shortest-path search. Depends on EGR only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkCost {
    Hop,
    InvEgr,
    InvEgrSq,
}

impl LinkCost {
    pub const ALL: [LinkCost; 3] = [LinkCost::Hop, LinkCost::InvEgr, LinkCost::InvEgrSq];

    pub fn cost(self, egr: u32) -> f64 {
        let e = f64::from(egr);
        match self {
            LinkCost::Hop => 1.0,
            LinkCost::InvEgr => 1.0 / e,
            LinkCost::InvEgrSq => 1.0 / (e * e),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkCost::Hop => "hop",
            LinkCost::InvEgr => "inv-egr",
            LinkCost::InvEgrSq => "inv-egr-sq",
        }
    }
}

impl std::fmt::Display for LinkCost {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedPath {
    pub path: Vec<NodeId>,
    pub plan: PurificationPlan,
    pub eval: PlanEvaluation,
}

impl RoutedPath {
    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }
}

/// Best-first order: higher `d_total`, then fewer hops, then the
/// lexicographically smaller node sequence.
pub fn compare_routes(a: &RoutedPath, b: &RoutedPath) -> Ordering {
    b.eval
        .d_total
        .total_cmp(&a.eval.d_total)
        .then_with(|| a.path.len().cmp(&b.path.len()))
        .then_with(|| a.path.cmp(&b.path))
}

/// Optimizes the purification plan along `path`.
///
/// Paths longer than the optimizer's hop limit are only swapped, without
/// purification.
pub fn route_path(net: &Network, path: &[NodeId]) -> Result<RoutedPath> {
    let chain = Chain::from_path(net, path)?;
    let (plan, eval) = if chain.hops() <= MAX_CHAIN_HOPS {
        optimize_chain(&chain)?
    } else {
        let plan = PurificationPlan::unpurified(chain.hops());
        let eval = evaluate_plan(&chain, &plan)?;
        (plan, eval)
    };
    Ok(RoutedPath {
        path: path.to_vec(),
        plan,
        eval,
    })
}

fn check_endpoints(net: &Network, s: NodeId, d: NodeId) -> Result<()> {
    net.check_node(s)?;
    net.check_node(d)?;
    if s == d {
        return Err(Error::MalformedChain(format!("source and destination are both {s}")));
    }
    Ok(())
}

/// Highest-`d_total` route among all simple paths of at most `cutoff` hops.
pub fn best_path_exhaustive(net: &Network, s: NodeId, d: NodeId, cutoff: usize) -> Result<RoutedPath> {
    best_path_exhaustive_with(net, s, d, cutoff, Exec::default())
}

/// [`best_path_exhaustive`] with an explicit execution mode.
///
/// Subtrees hanging off each two-hop prefix are searched independently. A
/// prefix is pruned once no completion of it can reach the best `d_total`
/// found anywhere: its weakest EGR times the best yield of any chain long
/// enough to reach `d`. Pruning is strict, so the result does not depend on
/// the order in which workers finish.
pub fn best_path_exhaustive_with(net: &Network, s: NodeId, d: NodeId, cutoff: usize, exec: Exec) -> Result<RoutedPath> {
    check_endpoints(net, s, d)?;
    let to_dest = net.hop_distances(d);
    let ratios = yield_ratios(net, cutoff)?;
    // any real path is a valid starting bound; the cheap heuristics are
    // usually close to the optimum
    let mut seed = 0.0f64;
    for cost in LinkCost::ALL {
        if let Ok(route) = route_weighted(net, s, d, cost) {
            if route.hops() <= cutoff {
                seed = seed.max(route.eval.d_total);
            }
        }
    }
    let bound = AtomicU64::new(seed.to_bits());
    let below_bound = |min_egr: u32, hops: usize, last: NodeId| match to_dest[last.index()] {
        Some(rest) if hops + rest <= cutoff => {
            f64::from(min_egr) * ratios[hops + rest] < f64::from_bits(bound.load(AtomicOrdering::Relaxed))
        }
        _ => true,
    };

    let mut prefixes = Vec::new();
    for &(a, _) in net.neighbors(s) {
        if a == d || cutoff < 2 {
            prefixes.push(vec![s, a]);
            continue;
        }
        for &(b, _) in net.neighbors(a) {
            if b != s {
                prefixes.push(vec![s, a, b]);
            }
        }
    }

    let results = exec.map(&prefixes, |prefix| -> Result<Option<RoutedPath>> {
        let mut best: Option<RoutedPath> = None;
        let mut failure = None;
        paths::search_from_prefix(net, prefix, d, cutoff, &below_bound, &mut |path, min_egr| {
            if failure.is_some() || below_bound(min_egr, path.len() - 1, d) {
                return;
            }
            match route_path(net, path) {
                Ok(route) => {
                    bound.fetch_max(route.eval.d_total.to_bits(), AtomicOrdering::Relaxed);
                    if best
                        .as_ref()
                        .is_none_or(|b| compare_routes(&route, b) == Ordering::Less)
                    {
                        best = Some(route);
                    }
                }
                Err(e) => failure = Some(e),
            }
        });
        match failure {
            Some(e) => Err(e),
            None => Ok(best),
        }
    });

    let mut best: Option<RoutedPath> = None;
    for candidate in results {
        if let Some(route) = candidate? {
            if best
                .as_ref()
                .is_none_or(|b| compare_routes(&route, b) == Ordering::Less)
            {
                best = Some(route);
            }
        }
    }
    best.ok_or(Error::NoPath(s, d))
}

/// `ratios[h]` bounds `d_total / min_egr` for every path of at least `h`
/// hops (and at most `cutoff`). Mixed link fidelities fall back to the
/// trivial bound of one ebit per pair.
fn yield_ratios(net: &Network, cutoff: usize) -> Result<Vec<f64>> {
    let mut fidelities = net.channels().iter().map(|c| c.raw_fidelity);
    let uniform = match fidelities.next() {
        Some(first) => fidelities.all(|f| f == first).then_some(first),
        None => None,
    };
    let mut ratios = vec![1.0; cutoff + 1];
    if let Some(f) = uniform {
        for (h, ratio) in ratios.iter_mut().enumerate().skip(1) {
            // slack covers rounding between the bound and the optimizer
            *ratio = (yield_bound(h, f, net.noise())? * (1.0 + 1e-9)).min(1.0);
        }
        for h in (1..cutoff).rev() {
            ratios[h] = ratios[h].max(ratios[h + 1]);
        }
    }
    Ok(ratios)
}

/// Routes along the minimum-cost path under `cost`.
pub fn route_weighted(net: &Network, s: NodeId, d: NodeId, cost: LinkCost) -> Result<RoutedPath> {
    let path = shortest_weighted_path(net, s, d, cost)?;
    route_path(net, &path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipathResult {
    /// Routes in discovery order.
    pub routes: Vec<RoutedPath>,
    /// `cumulative[i]` is the summed `d_total` of the first `i + 1` routes.
    pub cumulative: Vec<f64>,
}

impl MultipathResult {
    pub fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

/// Greedy edge-disjoint routing: take the cheapest path, optimize it, delete
/// its channels, repeat until `max_paths` routes or disconnection.
pub fn multipath_greedy(
    net: &Network,
    s: NodeId,
    d: NodeId,
    max_paths: usize,
    cost: LinkCost,
) -> Result<MultipathResult> {
    check_endpoints(net, s, d)?;
    if max_paths == 0 {
        return Err(Error::config("max_paths", "must be at least 1"));
    }
    let mut removed = vec![false; net.channels().len()];
    let mut result = MultipathResult {
        routes: Vec::new(),
        cumulative: Vec::new(),
    };
    while result.routes.len() < max_paths {
        let Some(path) = dijkstra::search(net, s, d, cost, &removed) else {
            break;
        };
        for ch in net.path_channels(&path)? {
            removed[ch] = true;
        }
        let route = route_path(net, &path)?;
        result.cumulative.push(result.total() + route.eval.d_total);
        result.routes.push(route);
    }
    Ok(result)
}
