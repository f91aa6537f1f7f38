//! CSV and JSON writers.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ResultRow};
use crate::error::{Error, Result};
use crate::netgraph::GENERATOR;

pub const ARTIFACT_VERSION: &str = concat!("qrepeater ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Provenance attached to every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub config_hash: String,
    pub generator: String,
    pub artifact_version: String,
    pub experiment: String,
    pub seed_count: usize,
}

impl Metadata {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Metadata {
            config_hash: format!("sha256:{}", cfg.hash()),
            generator: GENERATOR.to_string(),
            artifact_version: ARTIFACT_VERSION.to_string(),
            experiment: cfg.kind.name().to_string(),
            seed_count: cfg.seeds.len(),
        }
    }
}

/// Formats `x` with 12 significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    round12(x).to_string()
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn write_results(rows: &[ResultRow], meta: &Metadata, format: Format, path: Option<&Path>) -> Result<()> {
    let bytes = match format {
        Format::Csv => to_csv(rows, meta),
        Format::Json => to_json(rows, meta),
    };
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| Error::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout().write_all(&bytes).map_err(|source| Error::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn to_csv(rows: &[ResultRow], meta: &Metadata) -> Vec<u8> {
    let mut out = Vec::new();
    for (key, value) in [
        ("config_hash", meta.config_hash.as_str()),
        ("generator", meta.generator.as_str()),
        ("artifact_version", meta.artifact_version.as_str()),
        ("experiment", meta.experiment.as_str()),
    ] {
        out.extend_from_slice(format!("# {key}: {value}\n").as_bytes());
    }
    out.extend_from_slice(format!("# seed_count: {}\n", meta.seed_count).as_bytes());

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(ResultRow::COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.experiment_id.clone(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.topology.clone(),
            format_float(r.gate_fidelity),
            format_float(r.channel_fidelity),
            r.cost_variant.clone(),
            r.path_length.to_string(),
            r.plan_summary.clone(),
            format_float(r.rate),
            format_float(r.final_fidelity),
            format_float(r.d_total),
            format_float(r.normalized_d_total),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn to_json(rows: &[ResultRow], meta: &Metadata) -> Vec<u8> {
    #[derive(Serialize)]
    struct Document<'a> {
        metadata: &'a Metadata,
        rows: Vec<ResultRow>,
    }
    let rows = rows
        .iter()
        .map(|r| ResultRow {
            gate_fidelity: round12(r.gate_fidelity),
            channel_fidelity: round12(r.channel_fidelity),
            rate: round12(r.rate),
            final_fidelity: round12(r.final_fidelity),
            d_total: round12(r.d_total),
            normalized_d_total: round12(r.normalized_d_total),
            ..r.clone()
        })
        .collect();
    let mut out = serde_json::to_vec_pretty(&Document { metadata: meta, rows }).expect("rows serialize");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(0.7352941176470587), "0.735294117647");
        assert_eq!(format_float(20.0), "20");
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0 / 3.0 * 1e-5), "0.00000333333333333");
        assert_eq!(format_float(123456789012345.0), "123456789012000");
    }
}
