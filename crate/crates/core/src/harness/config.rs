//! Declarative experiment configs, read from TOML.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chainopt::MAX_CHAIN_HOPS;
use crate::error::{Error, Result};
use crate::netgraph::{endpoints_for_separation, generate_network, Extent, LatticeKind, TopologySpec};
use crate::quantmath::{NoiseParams, WernerFidelity};
use crate::routing::{LinkCost, DEFAULT_CUTOFF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ChainSweep,
    RouteCompare,
    MultipathCompare,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ChainSweep => "chain-sweep",
            ExperimentKind::RouteCompare => "route-compare",
            ExperimentKind::MultipathCompare => "multipath-compare",
        }
    }
}

/// How channel EGRs are made comparable across lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equivalence {
    /// Every lattice draws channel EGRs from the same range.
    Channel,
    /// Channel ranges are scaled by interior degree so repeaters see the
    /// same total EGR.
    Repeater,
}

impl Equivalence {
    pub fn name(self) -> &'static str {
        match self {
            Equivalence::Channel => "channel",
            Equivalence::Repeater => "repeater",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default = "default_chain_hops")]
    pub hops: usize,
    /// EGR of every link when `egr_range` is absent.
    #[serde(default = "default_chain_egr")]
    pub egr: u32,
    /// Draw link EGRs uniformly from this inclusive range, once per seed.
    #[serde(default)]
    pub egr_range: Option<[u32; 2]>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            hops: default_chain_hops(),
            egr: default_chain_egr(),
            egr_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyConfig {
    /// Lattices to run; defaults to triangular for routing and all three for
    /// multipath.
    #[serde(default)]
    pub kinds: Option<Vec<LatticeKind>>,
    /// Grid size; defaults to [`Extent::for_separation`].
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    #[serde(default = "default_egr_min")]
    pub egr_min: u32,
    #[serde(default = "default_egr_max")]
    pub egr_max: u32,
    #[serde(default = "default_repeater_egr")]
    pub repeater_egr: [u32; 2],
    #[serde(default = "default_separation")]
    pub hop_separation: usize,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            kinds: None,
            rows: None,
            cols: None,
            egr_min: default_egr_min(),
            egr_max: default_egr_max(),
            repeater_egr: default_repeater_egr(),
            hop_separation: default_separation(),
        }
    }
}

impl TopologyConfig {
    pub fn extent(&self) -> Extent {
        let fallback = Extent::for_separation(self.hop_separation);
        Extent {
            rows: self.rows.unwrap_or(fallback.rows),
            cols: self.cols.unwrap_or(fallback.cols),
        }
    }
}

/// A fully resolved experiment. Build one with [`ExperimentConfig::from_toml`]
/// or [`ExperimentConfig::defaults`] so that kind-dependent defaults are
/// filled in and the whole thing is validated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub name: String,
    pub seeds: Vec<u64>,
    /// Each value sets both the two-qubit gate and the measurement fidelity.
    pub gate_fidelities: Vec<f64>,
    pub channel_fidelities: Vec<f64>,
    pub chain: ChainConfig,
    pub topology: TopologyConfig,
    pub costs: Vec<LinkCost>,
    pub cutoff: usize,
    pub max_paths: usize,
    pub multipath_cost: LinkCost,
    pub equivalences: Vec<Equivalence>,
    /// Where the CLI writes results when `--out` is not given. Not part of
    /// the config hash.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// The on-disk form: every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<ExperimentKind>,
    name: Option<String>,
    seeds: Option<Vec<u64>>,
    gate_fidelities: Option<Vec<f64>>,
    channel_fidelities: Option<Vec<f64>>,
    #[serde(default)]
    chain: ChainConfig,
    #[serde(default)]
    topology: TopologyConfig,
    costs: Option<Vec<LinkCost>>,
    cutoff: Option<usize>,
    max_paths: Option<usize>,
    multipath_cost: Option<LinkCost>,
    equivalences: Option<Vec<Equivalence>>,
    output: Option<PathBuf>,
}

fn default_chain_hops() -> usize {
    6
}
fn default_chain_egr() -> u32 {
    20
}
fn default_egr_min() -> u32 {
    8
}
fn default_egr_max() -> u32 {
    32
}
fn default_repeater_egr() -> [u32; 2] {
    [16, 128]
}
fn default_separation() -> usize {
    4
}

pub const DEFAULT_SEED_COUNT: u64 = 100;

impl ExperimentConfig {
    /// Parses a TOML document. `kind` fills in a missing `kind` key and must
    /// agree with it when both are present.
    pub fn from_toml(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::config("config", e.message().to_string()))?;
        let kind = match (raw.kind, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::config(
                    "kind",
                    format!("config is a {} experiment, expected {}", a.name(), b.name()),
                ))
            }
            (Some(a), _) | (None, Some(a)) => a,
            (None, None) => return Err(Error::config("kind", "missing")),
        };
        let mut cfg = Self::defaults(kind);
        let RawConfig {
            kind: _,
            name,
            seeds,
            gate_fidelities,
            channel_fidelities,
            chain,
            topology,
            costs,
            cutoff,
            max_paths,
            multipath_cost,
            equivalences,
            output,
        } = raw;
        let default_kinds = cfg.topology.kinds.take();
        cfg.chain = chain;
        cfg.topology = topology;
        if cfg.topology.kinds.is_none() {
            cfg.topology.kinds = default_kinds;
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = $field {
                    cfg.$field = v;
                }
            )*};
        }
        take!(
            name,
            seeds,
            gate_fidelities,
            channel_fidelities,
            costs,
            cutoff,
            max_paths,
            multipath_cost,
            equivalences
        );
        cfg.output = output;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The stock experiment of each kind.
    pub fn defaults(kind: ExperimentKind) -> Self {
        // the chain colormap sweeps gate fidelity finely; the network studies
        // compare perfect and imperfect processors
        let (gate_fidelities, channel_fidelities, kinds) = match kind {
            ExperimentKind::ChainSweep => (vec![1.0, 0.995, 0.99, 0.985], vec![0.99, 0.98, 0.97, 0.96, 0.95], None),
            ExperimentKind::RouteCompare => (vec![1.0, 0.99], vec![0.99], Some(vec![LatticeKind::Triangular])),
            ExperimentKind::MultipathCompare => (vec![1.0, 0.99], vec![0.91], Some(LatticeKind::ALL.to_vec())),
        };
        ExperimentConfig {
            kind,
            name: kind.name().to_string(),
            seeds: (0..DEFAULT_SEED_COUNT).collect(),
            gate_fidelities,
            channel_fidelities,
            chain: ChainConfig::default(),
            topology: TopologyConfig {
                kinds,
                ..TopologyConfig::default()
            },
            costs: LinkCost::ALL.to_vec(),
            cutoff: DEFAULT_CUTOFF,
            max_paths: 6,
            multipath_cost: LinkCost::InvEgr,
            equivalences: vec![Equivalence::Channel, Equivalence::Repeater],
            output: None,
        }
    }

    /// Replaces the seed list with the same number of consecutive seeds
    /// starting at `first`.
    pub fn override_seeds(&mut self, first: u64) {
        let n = self.seeds.len() as u64;
        self.seeds = (0..n).map(|i| first.wrapping_add(i)).collect();
    }

    pub fn lattice_kinds(&self) -> &[LatticeKind] {
        self.topology.kinds.as_deref().unwrap_or(&[])
    }

    /// Hex SHA-256 of the resolved config's canonical JSON form.
    pub fn hash(&self) -> String {
        let mut hashed = self.clone();
        hashed.output = None;
        let bytes = serde_json::to_vec(&hashed).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        let mut seen = BTreeSet::new();
        for (i, s) in self.seeds.iter().enumerate() {
            if !seen.insert(*s) {
                return Err(Error::config(format!("seeds[{i}]"), format!("seed {s} is repeated")));
            }
        }
        non_empty("gate_fidelities", &self.gate_fidelities)?;
        for (i, &g) in self.gate_fidelities.iter().enumerate() {
            NoiseParams::uniform(g).map_err(|e| Error::config(format!("gate_fidelities[{i}]"), e.to_string()))?;
        }
        non_empty("channel_fidelities", &self.channel_fidelities)?;
        for (i, &f) in self.channel_fidelities.iter().enumerate() {
            WernerFidelity::new(f).map_err(|e| Error::config(format!("channel_fidelities[{i}]"), e.to_string()))?;
        }
        match self.kind {
            ExperimentKind::ChainSweep => self.validate_chain(),
            ExperimentKind::RouteCompare => {
                non_empty("costs", &self.costs)?;
                self.validate_topology()
            }
            ExperimentKind::MultipathCompare => {
                non_empty("equivalences", &self.equivalences)?;
                if self.max_paths == 0 {
                    return Err(Error::config("max_paths", "must be at least 1"));
                }
                self.validate_topology()
            }
        }
    }

    fn validate_chain(&self) -> Result<()> {
        let c = &self.chain;
        if !(1..=MAX_CHAIN_HOPS).contains(&c.hops) {
            return Err(Error::config(
                "chain.hops",
                format!("must be between 1 and {MAX_CHAIN_HOPS}"),
            ));
        }
        if c.egr == 0 {
            return Err(Error::config("chain.egr", "must be positive"));
        }
        if let Some([lo, hi]) = c.egr_range {
            check_range("chain.egr_range", lo, hi)?;
        }
        Ok(())
    }

    fn validate_topology(&self) -> Result<()> {
        let t = &self.topology;
        non_empty("topology.kinds", self.lattice_kinds())?;
        check_range("topology.egr_min", t.egr_min, t.egr_max)?;
        if self.kind == ExperimentKind::MultipathCompare && self.equivalences.contains(&Equivalence::Repeater) {
            check_range("topology.repeater_egr", t.repeater_egr[0], t.repeater_egr[1])?;
        }
        if t.hop_separation == 0 {
            return Err(Error::config("topology.hop_separation", "must be at least 1"));
        }
        if self.cutoff < t.hop_separation {
            return Err(Error::config(
                "cutoff",
                format!(
                    "{} is shorter than the hop separation {}",
                    self.cutoff, t.hop_separation
                ),
            ));
        }
        // the endpoints depend on shape only, so any EGRs will do
        for &kind in self.lattice_kinds() {
            let spec = TopologySpec {
                kind,
                extent: t.extent(),
                egr_min: 1,
                egr_max: 1,
                raw_fidelity: WernerFidelity::PERFECT,
                seed: 0,
                noise: NoiseParams::PERFECT,
            };
            let lattice = generate_network(&spec).map_err(|e| Error::config("topology", e.to_string()))?;
            endpoints_for_separation(&lattice, t.hop_separation)
                .map_err(|e| Error::config("topology.hop_separation", e.to_string()))?;
        }
        Ok(())
    }
}

fn non_empty<T>(field: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "must not be empty"));
    }
    Ok(())
}

fn check_range(field: &str, lo: u32, hi: u32) -> Result<()> {
    if lo == 0 {
        return Err(Error::config(field, "EGRs must be positive"));
    }
    if lo > hi {
        return Err(Error::config(field, format!("empty range {lo}..={hi}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn defaults_validate() {
        for kind in [
            ExperimentKind::ChainSweep,
            ExperimentKind::RouteCompare,
            ExperimentKind::MultipathCompare,
        ] {
            ExperimentConfig::defaults(kind).validate().unwrap();
        }
    }

    #[test]
    fn minimal_document_gets_kind_defaults() {
        let cfg = ExperimentConfig::from_toml("kind = \"multipath-compare\"", None).unwrap();
        assert_eq!(cfg, ExperimentConfig::defaults(ExperimentKind::MultipathCompare));
        assert_eq!(cfg.lattice_kinds().len(), 3);
        assert_eq!(cfg.seeds.len(), 100);
    }

    #[test]
    fn kind_comes_from_either_side() {
        let a = ExperimentConfig::from_toml("", Some(ExperimentKind::RouteCompare)).unwrap();
        assert_eq!(a.kind, ExperimentKind::RouteCompare);
        let err =
            ExperimentConfig::from_toml("kind = \"chain-sweep\"", Some(ExperimentKind::RouteCompare)).unwrap_err();
        assert_eq!(field_of(err), "kind");
        assert_eq!(field_of(ExperimentConfig::from_toml("", None).unwrap_err()), "kind");
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (
                "kind = \"chain-sweep\"\ngate_fidelities = [1.0, 1.5]",
                "gate_fidelities[1]",
            ),
            ("kind = \"chain-sweep\"\nchannel_fidelities = []", "channel_fidelities"),
            ("kind = \"chain-sweep\"\nseeds = [1, 2, 1]", "seeds[2]"),
            ("kind = \"chain-sweep\"\n[chain]\nhops = 11", "chain.hops"),
            ("kind = \"route-compare\"\ncutoff = 3", "cutoff"),
            ("kind = \"route-compare\"\n[topology]\negr_min = 40", "topology.egr_min"),
            (
                "kind = \"route-compare\"\n[topology]\nrows = 3\ncols = 3\nhop_separation = 6",
                "topology.hop_separation",
            ),
            ("kind = \"multipath-compare\"\nmax_paths = 0", "max_paths"),
            ("kind = \"chain-sweep\"\nbogus = 1", "config"),
        ];
        for (doc, field) in cases {
            assert_eq!(
                field_of(ExperimentConfig::from_toml(doc, None).unwrap_err()),
                field,
                "{doc}"
            );
        }
    }

    #[test]
    fn hash_tracks_content_not_output() {
        let a = ExperimentConfig::defaults(ExperimentKind::ChainSweep);
        let mut b = a.clone();
        b.output = Some("elsewhere.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.override_seeds(7);
        assert_ne!(a.hash(), b.hash());
        assert_eq!(b.seeds.len(), a.seeds.len());
        assert_eq!(b.seeds[0], 7);
        assert_eq!(a.hash().len(), 64);
    }
}
