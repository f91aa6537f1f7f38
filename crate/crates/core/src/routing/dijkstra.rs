//! Shortest weighted paths with deterministic tie-breaking.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::LinkCost;
use crate::error::{Error, Result};
use crate::netgraph::{Network, NodeId};

#[derive(Debug, Clone, PartialEq)]
struct Label {
    cost: f64,
    path: Vec<NodeId>,
}

impl Eq for Label {}

impl Ord for Label {
    /// Cost, then hop count, then node sequence.
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.len().cmp(&other.path.len()))
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total cost of a path; `None` if it leaves the network.
pub fn path_cost(net: &Network, path: &[NodeId], cost: LinkCost) -> Option<f64> {
    let channels = net.path_channels(path).ok()?;
    Some(channels.into_iter().map(|ch| cost.cost(net.channel(ch).egr)).sum())
}

/// Minimum-cost path from `s` to `d`. Equal costs go to fewer hops, then to
/// the lexicographically smaller node sequence.
pub fn shortest_weighted_path(net: &Network, s: NodeId, d: NodeId, cost: LinkCost) -> Result<Vec<NodeId>> {
    net.check_node(s)?;
    net.check_node(d)?;
    let removed = vec![false; net.channels().len()];
    search(net, s, d, cost, &removed).ok_or(Error::NoPath(s, d))
}

/// Label-setting search that skips channels flagged in `removed`.
pub(super) fn search(net: &Network, s: NodeId, d: NodeId, cost: LinkCost, removed: &[bool]) -> Option<Vec<NodeId>> {
    let n = net.node_count();
    let mut settled = vec![false; n];
    let mut tentative: Vec<Option<Label>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    let start = Label {
        cost: 0.0,
        path: vec![s],
    };
    tentative[s.index()] = Some(start.clone());
    heap.push(Reverse(start));

    while let Some(Reverse(label)) = heap.pop() {
        let u = *label.path.last().unwrap();
        if settled[u.index()] || tentative[u.index()].as_ref() != Some(&label) {
            continue;
        }
        settled[u.index()] = true;
        if u == d {
            return Some(label.path);
        }
        for &(v, ch) in net.neighbors(u) {
            if removed[ch] || settled[v.index()] {
                continue;
            }
            let mut path = label.path.clone();
            path.push(v);
            let next = Label {
                cost: label.cost + cost.cost(net.channel(ch).egr),
                path,
            };
            if tentative[v.index()].as_ref().is_none_or(|t| next < *t) {
                tentative[v.index()] = Some(next.clone());
                heap.push(Reverse(next));
            }
        }
    }
    None
}
