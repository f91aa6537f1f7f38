//! Triangular, square and hexagonal grids with seeded channel EGRs.
//!
//! Nodes are laid out row-major on a `rows x cols` grid. The square lattice
//! joins horizontal and vertical neighbors. The triangular lattice adds one
//! diagonal per cell, `(r, c)-(r+1, c+1)`, giving interior degree 6. The
//! hexagonal (honeycomb) lattice is drawn as a brick wall: every horizontal
//! edge, and vertical edges only where `r + c` is even, giving interior
//! degree 3.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Channel, Network, NodeId};
use crate::error::{Error, Result};
use crate::quantmath::{NoiseParams, WernerFidelity};

/// Name of the pseudo-random generator behind every seeded draw.
pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Triangular,
    Square,
    Hexagonal,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [LatticeKind::Triangular, LatticeKind::Square, LatticeKind::Hexagonal];

    pub fn interior_degree(self) -> u32 {
        match self {
            LatticeKind::Triangular => 6,
            LatticeKind::Square => 4,
            LatticeKind::Hexagonal => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Triangular => "triangular",
            LatticeKind::Square => "square",
            LatticeKind::Hexagonal => "hexagonal",
        }
    }
}

impl std::fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extent {
    pub rows: usize,
    pub cols: usize,
}

impl Extent {
    /// Smallest grid holding `separation` hops along a row, padded by two
    /// rings of nodes on every side.
    pub fn for_separation(separation: usize) -> Extent {
        Extent {
            rows: 1 + 4,
            cols: separation + 1 + 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub kind: LatticeKind,
    pub extent: Extent,
    pub egr_min: u32,
    pub egr_max: u32,
    pub raw_fidelity: WernerFidelity,
    pub seed: u64,
    #[serde(default)]
    pub noise: NoiseParams,
}

impl TopologySpec {
    fn validate(&self) -> Result<()> {
        let Extent { rows, cols } = self.extent;
        if rows == 0 || cols == 0 || rows * cols < 2 {
            return Err(Error::Topology(format!(
                "extent {rows}x{cols} holds fewer than 2 nodes"
            )));
        }
        if self.egr_min == 0 || self.egr_min > self.egr_max {
            return Err(Error::Topology(format!(
                "EGR range [{}, {}] must satisfy 1 <= min <= max",
                self.egr_min, self.egr_max
            )));
        }
        Ok(())
    }
}

/// A generated grid together with its row-major geometry.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub extent: Extent,
    pub network: Network,
}

impl Lattice {
    pub fn node_at(&self, row: usize, col: usize) -> NodeId {
        assert!(row < self.extent.rows && col < self.extent.cols);
        NodeId((row * self.extent.cols + col) as u32)
    }
}

fn lattice_edges(kind: LatticeKind, Extent { rows, cols }: Extent) -> Vec<(NodeId, NodeId)> {
    let id = |r: usize, c: usize| NodeId((r * cols + c) as u32);
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                let vertical = match kind {
                    LatticeKind::Hexagonal => (r + c) % 2 == 0,
                    _ => true,
                };
                if vertical {
                    edges.push((id(r, c), id(r + 1, c)));
                }
                if kind == LatticeKind::Triangular && c + 1 < cols {
                    edges.push((id(r, c), id(r + 1, c + 1)));
                }
            }
        }
    }
    edges
}

/// Draws one EGR per channel, independently and uniformly from
/// `[egr_min, egr_max]`, in canonical edge order.
pub fn generate_network(spec: &TopologySpec) -> Result<Lattice> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let channels = lattice_edges(spec.kind, spec.extent)
        .into_iter()
        .map(|(a, b)| {
            let egr = rng.gen_range(spec.egr_min..=spec.egr_max);
            Channel::new(a, b, egr, spec.raw_fidelity)
        })
        .collect::<Result<Vec<_>>>()?;
    let node_count = spec.extent.rows * spec.extent.cols;
    let network = Network::new(node_count, channels, spec.noise)?.with_seed(Some(spec.seed));
    Ok(Lattice {
        kind: spec.kind,
        extent: spec.extent,
        network,
    })
}

/// Source and destination on the middle row, `separation` hops apart and
/// centred horizontally. Fails if the grid is too narrow or if the lattice
/// offers a shortcut between them.
pub fn endpoints_for_separation(lattice: &Lattice, separation: usize) -> Result<(NodeId, NodeId)> {
    let Extent { rows, cols } = lattice.extent;
    if separation == 0 || separation + 1 > cols {
        return Err(Error::Topology(format!(
            "cannot place endpoints {separation} hops apart on {rows}x{cols}"
        )));
    }
    let row = rows / 2;
    let col = (cols - separation - 1) / 2;
    let (s, d) = (lattice.node_at(row, col), lattice.node_at(row, col + separation));
    let dist = lattice.network.hop_distances(s)[d.index()];
    if dist != Some(separation) {
        return Err(Error::Topology(format!(
            "endpoints {s} and {d} are {dist:?} hops apart, expected {separation}"
        )));
    }
    Ok((s, d))
}

/// Channel EGR range that gives every interior repeater of `kind` the
/// repeater-EGR range `[repeater_min, repeater_max]`. Dividing by the
/// interior degree yields the 2:3:4 triangular:square:hexagonal ratio.
pub fn scaled_channel_range(kind: LatticeKind, repeater_min: u32, repeater_max: u32) -> (u32, u32) {
    let degree = f64::from(kind.interior_degree());
    let scale = |x: u32| ((f64::from(x) / degree).round() as u32).max(1);
    (scale(repeater_min), scale(repeater_max))
}
