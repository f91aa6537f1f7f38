//! Parameter sweeps over chains and lattices, written as plot-ready tables.
//!
//! Every experiment expands into independent tasks (one per grid point, seed
//! and lattice) which may run in parallel; rows are put back in canonical
//! order before anything is written.

mod config;
mod output;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{ChainConfig, Equivalence, ExperimentConfig, ExperimentKind, TopologyConfig, DEFAULT_SEED_COUNT};
pub use output::{format_float, write_results, Format, Metadata, ARTIFACT_VERSION};

use crate::chainopt::{optimize_chain, Chain, Link, PlanEvaluation};
use crate::error::{Error, Result};
use crate::netgraph::{
    endpoints_for_separation, generate_network, scaled_channel_range, Lattice, LatticeKind, TopologySpec,
};
use crate::par::Exec;
use crate::quantmath::{NoiseParams, WernerFidelity};
use crate::routing::{best_path_exhaustive_with, multipath_greedy, route_weighted, RoutedPath};

/// One line of output. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// The config name. Multipath rows append `/<equivalence>/<path count>`.
    pub experiment_id: String,
    /// Absent for deterministic chain sweeps.
    pub seed: Option<u64>,
    pub topology: String,
    pub gate_fidelity: f64,
    pub channel_fidelity: f64,
    /// `exhaustive` or a link cost name; empty for chain sweeps.
    pub cost_variant: String,
    pub path_length: usize,
    pub plan_summary: String,
    pub rate: f64,
    pub final_fidelity: f64,
    pub d_total: f64,
    /// `d_total` over the instance's mean channel EGR.
    pub normalized_d_total: f64,
}

impl ResultRow {
    pub const COLUMNS: [&'static str; 12] = [
        "experiment_id",
        "seed",
        "topology",
        "gate_fidelity",
        "channel_fidelity",
        "cost_variant",
        "path_length",
        "plan_summary",
        "rate",
        "final_fidelity",
        "d_total",
        "normalized_d_total",
    ];
}

/// Position of a row in the canonical output order: seed, grid point,
/// lattice, equivalence, variant, path index.
type RowKey = (u64, usize, usize, usize, usize, usize);

struct Task {
    seed: Option<u64>,
    grid: usize,
    gate: f64,
    channel: f64,
    lattice: usize,
    equivalence: usize,
}

struct Point<'a> {
    task: &'a Task,
    topology: String,
    mean_egr: f64,
}

impl Point<'_> {
    fn row(
        &self,
        id: String,
        cost_variant: &str,
        path_length: usize,
        plan: String,
        eval: &PlanEvaluation,
    ) -> ResultRow {
        let t = self.task;
        ResultRow {
            experiment_id: id,
            seed: t.seed,
            topology: self.topology.clone(),
            gate_fidelity: t.gate,
            channel_fidelity: t.channel,
            cost_variant: cost_variant.to_string(),
            path_length,
            plan_summary: plan,
            rate: eval.rate,
            final_fidelity: eval.final_fidelity.value(),
            d_total: eval.d_total,
            normalized_d_total: if self.mean_egr > 0.0 {
                eval.d_total / self.mean_egr
            } else {
                0.0
            },
        }
    }

    fn route_row(&self, id: String, cost_variant: &str, route: Option<&RoutedPath>) -> ResultRow {
        match route {
            Some(r) => self.row(id, cost_variant, r.hops(), r.plan.summary(), &r.eval),
            None => self.row(id, cost_variant, 0, String::new(), &PlanEvaluation::NONE),
        }
    }
}

/// Runs `cfg` with the default execution mode.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment_with(cfg, Exec::default())
}

/// Runs `cfg`. Output is identical for every `exec`.
pub fn run_experiment_with(cfg: &ExperimentConfig, exec: Exec) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let tasks = expand(cfg);
    let keyed = exec.map(&tasks, |task| run_task(cfg, task));
    let mut rows: Vec<(RowKey, ResultRow)> = Vec::new();
    for r in keyed {
        rows.extend(r?);
    }
    rows.sort_by_key(|a| a.0);
    Ok(rows.into_iter().map(|(_, row)| row).collect())
}

fn expand(cfg: &ExperimentConfig) -> Vec<Task> {
    let grid: Vec<(f64, f64)> = cfg
        .gate_fidelities
        .iter()
        .flat_map(|&g| cfg.channel_fidelities.iter().map(move |&c| (g, c)))
        .collect();
    let seeds: Vec<Option<u64>> = match cfg.kind {
        ExperimentKind::ChainSweep if cfg.chain.egr_range.is_none() => vec![None],
        _ => cfg.seeds.iter().copied().map(Some).collect(),
    };
    let (lattices, equivalences) = match cfg.kind {
        ExperimentKind::ChainSweep => (1, 1),
        ExperimentKind::RouteCompare => (cfg.lattice_kinds().len(), 1),
        ExperimentKind::MultipathCompare => (cfg.lattice_kinds().len(), cfg.equivalences.len()),
    };
    let mut tasks = Vec::new();
    for &seed in &seeds {
        for (grid_idx, &(gate, channel)) in grid.iter().enumerate() {
            for lattice in 0..lattices {
                for equivalence in 0..equivalences {
                    tasks.push(Task {
                        seed,
                        grid: grid_idx,
                        gate,
                        channel,
                        lattice,
                        equivalence,
                    });
                }
            }
        }
    }
    tasks
}

fn run_task(cfg: &ExperimentConfig, task: &Task) -> Result<Vec<(RowKey, ResultRow)>> {
    let noise = NoiseParams::uniform(task.gate)?;
    let fidelity = WernerFidelity::new(task.channel)?;
    let key = |variant: usize, path: usize| {
        (
            task.seed.unwrap_or(0),
            task.grid,
            task.lattice,
            task.equivalence,
            variant,
            path,
        )
    };
    match cfg.kind {
        ExperimentKind::ChainSweep => {
            let chain = sweep_chain(cfg, task.seed, fidelity, noise)?;
            let mean_egr = chain.links().iter().map(|l| f64::from(l.egr)).sum::<f64>() / chain.hops() as f64;
            let point = Point {
                task,
                topology: "chain".to_string(),
                mean_egr,
            };
            let (plan, eval) = optimize_chain(&chain)?;
            let row = point.row(cfg.name.clone(), "", chain.hops(), plan.summary(), &eval);
            Ok(vec![(key(0, 0), row)])
        }
        ExperimentKind::RouteCompare => {
            let kind = cfg.lattice_kinds()[task.lattice];
            let (lo, hi) = (cfg.topology.egr_min, cfg.topology.egr_max);
            let (lattice, point) = instance(cfg, task, kind, lo, hi, fidelity, noise)?;
            let (s, d) = endpoints_for_separation(&lattice, cfg.topology.hop_separation)?;
            let net = &lattice.network;
            let mut rows = Vec::new();
            // the search itself is sequential; tasks are already spread out
            let exhaustive = no_path_as_none(best_path_exhaustive_with(net, s, d, cfg.cutoff, Exec::Sequential))?;
            rows.push((
                key(0, 0),
                point.route_row(cfg.name.clone(), "exhaustive", exhaustive.as_ref()),
            ));
            for (i, &cost) in cfg.costs.iter().enumerate() {
                let route = no_path_as_none(route_weighted(net, s, d, cost))?;
                rows.push((
                    key(i + 1, 0),
                    point.route_row(cfg.name.clone(), cost.name(), route.as_ref()),
                ));
            }
            Ok(rows)
        }
        ExperimentKind::MultipathCompare => {
            let kind = cfg.lattice_kinds()[task.lattice];
            let equivalence = cfg.equivalences[task.equivalence];
            let (lo, hi) = match equivalence {
                Equivalence::Channel => (cfg.topology.egr_min, cfg.topology.egr_max),
                Equivalence::Repeater => {
                    let [lo, hi] = cfg.topology.repeater_egr;
                    scaled_channel_range(kind, lo, hi)
                }
            };
            let (lattice, point) = instance(cfg, task, kind, lo, hi, fidelity, noise)?;
            let (s, d) = endpoints_for_separation(&lattice, cfg.topology.hop_separation)?;
            let result = multipath_greedy(&lattice.network, s, d, cfg.max_paths, cfg.multipath_cost)?;
            let id = |paths: usize| format!("{}/{}/{}", cfg.name, equivalence.name(), paths);
            let variant = cfg.multipath_cost.name();
            if result.routes.is_empty() {
                return Ok(vec![(key(0, 0), point.route_row(id(0), variant, None))]);
            }
            let rows = result
                .routes
                .iter()
                .zip(&result.cumulative)
                .enumerate()
                .map(|(i, (route, &total))| {
                    // the row describes the newest path; d_total accumulates
                    let mut row = point.route_row(id(i + 1), variant, Some(route));
                    row.d_total = total;
                    row.normalized_d_total = if point.mean_egr > 0.0 {
                        total / point.mean_egr
                    } else {
                        0.0
                    };
                    (key(0, i + 1), row)
                })
                .collect();
            Ok(rows)
        }
    }
}

fn sweep_chain(
    cfg: &ExperimentConfig,
    seed: Option<u64>,
    fidelity: WernerFidelity,
    noise: NoiseParams,
) -> Result<Chain> {
    let c = &cfg.chain;
    match (c.egr_range, seed) {
        (Some([lo, hi]), Some(seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let links = (0..c.hops)
                .map(|_| Link {
                    egr: rng.gen_range(lo..=hi),
                    fidelity,
                })
                .collect();
            let nodes = (0..=c.hops as u32).map(crate::netgraph::NodeId).collect();
            Chain::new(nodes, links, noise)
        }
        _ => Chain::uniform(c.hops, c.egr, fidelity, noise),
    }
}

#[allow(clippy::too_many_arguments)]
fn instance<'a>(
    cfg: &'a ExperimentConfig,
    task: &'a Task,
    kind: LatticeKind,
    egr_min: u32,
    egr_max: u32,
    fidelity: WernerFidelity,
    noise: NoiseParams,
) -> Result<(Lattice, Point<'a>)> {
    let spec = TopologySpec {
        kind,
        extent: cfg.topology.extent(),
        egr_min,
        egr_max,
        raw_fidelity: fidelity,
        seed: task.seed.unwrap_or(0),
        noise,
    };
    let lattice = generate_network(&spec)?;
    let point = Point {
        task,
        topology: kind.name().to_string(),
        mean_egr: lattice.network.mean_channel_egr(),
    };
    Ok((lattice, point))
}

fn no_path_as_none(r: Result<RoutedPath>) -> Result<Option<RoutedPath>> {
    match r {
        Ok(route) => Ok(Some(route)),
        Err(Error::NoPath(..)) => Ok(None),
        Err(e) => Err(e),
    }
}
