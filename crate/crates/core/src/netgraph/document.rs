//! Versioned JSON form of a [`Network`].

use serde::{Deserialize, Serialize};

use super::{Channel, Network, NodeId};
use crate::error::{Error, Result};
use crate::quantmath::{NoiseParams, WernerFidelity};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub u: u32,
    pub v: u32,
    pub egr: u32,
    pub fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub p2: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub version: u32,
    pub nodes: Vec<u32>,
    pub channels: Vec<ChannelRecord>,
    pub noise: NoiseRecord,
    pub seed: Option<u64>,
}

impl Network {
    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            version: DOCUMENT_VERSION,
            nodes: self.nodes().map(|n| n.0).collect(),
            channels: self
                .channels()
                .iter()
                .map(|c| ChannelRecord {
                    u: c.endpoints.0 .0,
                    v: c.endpoints.1 .0,
                    egr: c.egr,
                    fidelity: c.raw_fidelity.value(),
                })
                .collect(),
            noise: NoiseRecord {
                p2: self.noise().p2(),
                eta: self.noise().eta(),
            },
            seed: self.seed(),
        }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<Network> {
        if doc.version != DOCUMENT_VERSION {
            return Err(Error::Document(format!(
                "unsupported version {} (expected {DOCUMENT_VERSION})",
                doc.version
            )));
        }
        let expected: Vec<u32> = (0..doc.nodes.len() as u32).collect();
        if doc.nodes != expected {
            return Err(Error::Document("nodes must be numbered 0..n in order".into()));
        }
        let channels = doc
            .channels
            .iter()
            .map(|r| Channel::new(NodeId(r.u), NodeId(r.v), r.egr, WernerFidelity::new(r.fidelity)?))
            .collect::<Result<Vec<_>>>()?;
        let noise = NoiseParams::new(doc.noise.p2, doc.noise.eta)?;
        Ok(Network::new(doc.nodes.len(), channels, noise)?.with_seed(doc.seed))
    }

    pub fn export_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("network document serializes")
    }

    pub fn import_json(text: &str) -> Result<Network> {
        let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        Network::from_document(&doc)
    }
}
