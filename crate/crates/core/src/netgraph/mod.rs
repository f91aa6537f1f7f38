//! Repeater network model and lattice generators.

mod document;
mod lattice;

pub use document::{ChannelRecord, NetworkDocument, NoiseRecord, DOCUMENT_VERSION};
pub use lattice::{
    endpoints_for_separation, generate_network, scaled_channel_range, Extent, Lattice, LatticeKind, TopologySpec,
    GENERATOR,
};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantmath::{NoiseParams, WernerFidelity};

/// Index of a repeater within its network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Index of a channel within [`Network::channels`].
pub type ChannelId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    /// Stored with the smaller id first.
    pub endpoints: (NodeId, NodeId),
    /// Raw pairs generated per timestep.
    pub egr: u32,
    pub raw_fidelity: WernerFidelity,
}

impl Channel {
    pub fn new(a: NodeId, b: NodeId, egr: u32, raw_fidelity: WernerFidelity) -> Result<Self> {
        if a == b {
            return Err(Error::Topology(format!("self-loop on node {a}")));
        }
        if egr == 0 {
            return Err(Error::Topology(format!("channel {a}-{b} has zero EGR")));
        }
        Ok(Channel {
            endpoints: (a.min(b), a.max(b)),
            egr,
            raw_fidelity,
        })
    }

    pub fn other(&self, node: NodeId) -> NodeId {
        if self.endpoints.0 == node {
            self.endpoints.1
        } else {
            self.endpoints.0
        }
    }
}

/// Undirected simple graph of repeaters, immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    channels: Vec<Channel>,
    /// Per node, (neighbor, channel) sorted by neighbor.
    adjacency: Vec<Vec<(NodeId, ChannelId)>>,
    noise: NoiseParams,
    seed: Option<u64>,
}

impl Network {
    pub fn new(node_count: usize, channels: Vec<Channel>, noise: NoiseParams) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut seen = BTreeSet::new();
        for (id, ch) in channels.iter().enumerate() {
            let (a, b) = ch.endpoints;
            if b.index() >= node_count {
                return Err(Error::UnknownNode(b));
            }
            if !seen.insert(ch.endpoints) {
                return Err(Error::Topology(format!("duplicate channel {a}-{b}")));
            }
            adjacency[a.index()].push((b, id));
            adjacency[b.index()].push((a, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Network {
            channels,
            adjacency,
            noise,
            seed: None,
        })
    }

    pub fn with_noise(mut self, noise: NoiseParams) -> Self {
        self.noise = noise;
        self
    }

    pub(crate) fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.adjacency.len() as u32).map(NodeId)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn channel(&self, id: ChannelId) -> &Channel {
        &self.channels[id]
    }

    pub fn noise(&self) -> NoiseParams {
        self.noise
    }

    /// Seed the network was generated from, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.adjacency.len()
    }

    pub fn check_node(&self, node: NodeId) -> Result<()> {
        if self.contains(node) {
            Ok(())
        } else {
            Err(Error::UnknownNode(node))
        }
    }

    /// Neighbors with the connecting channel, in ascending neighbor order.
    pub fn neighbors(&self, node: NodeId) -> &[(NodeId, ChannelId)] {
        &self.adjacency[node.index()]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node.index()].len()
    }

    pub fn channel_between(&self, a: NodeId, b: NodeId) -> Option<ChannelId> {
        let list = self.adjacency.get(a.index())?;
        list.binary_search_by_key(&b, |&(n, _)| n).ok().map(|i| list[i].1)
    }

    /// Sum of incident channel EGRs.
    pub fn repeater_egr(&self, node: NodeId) -> Result<u64> {
        self.check_node(node)?;
        Ok(self
            .neighbors(node)
            .iter()
            .map(|&(_, ch)| u64::from(self.channels[ch].egr))
            .sum())
    }

    pub fn mean_channel_egr(&self) -> f64 {
        if self.channels.is_empty() {
            return 0.0;
        }
        let total: u64 = self.channels.iter().map(|c| u64::from(c.egr)).sum();
        total as f64 / self.channels.len() as f64
    }

    /// Hop distances from `source` by breadth-first search; `None` when unreachable.
    pub fn hop_distances(&self, source: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = std::collections::VecDeque::new();
        dist[source.index()] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap_or_default();
            for &(v, _) in self.neighbors(u) {
                if dist[v.index()].is_none() {
                    dist[v.index()] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() == 0 || self.hop_distances(NodeId(0)).iter().all(Option::is_some)
    }

    /// Channels along a node sequence, or an error if two consecutive nodes
    /// are not adjacent.
    pub fn path_channels(&self, path: &[NodeId]) -> Result<Vec<ChannelId>> {
        path.windows(2)
            .map(|w| {
                self.channel_between(w[0], w[1])
                    .ok_or_else(|| Error::MalformedChain(format!("nodes {} and {} are not adjacent", w[0], w[1])))
            })
            .collect()
    }
}
