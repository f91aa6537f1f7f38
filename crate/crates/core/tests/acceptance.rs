//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrepeater::chainopt::{optimize_chain, optimize_chain_with, Chain, OptimizerOptions};
use qrepeater::harness::{
    run_experiment, write_results, ExperimentConfig, ExperimentKind, Format, Metadata, ResultRow,
};
use qrepeater::purification::{oracle_simulate_step, purify_pair};
use qrepeater::quantmath::{distillable_per_pair, swap_fidelity, NoiseParams, WernerFidelity};

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.pass &= ok;
        self.details
            .push(format!("{} {detail}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn wf(f: f64) -> WernerFidelity {
    WernerFidelity::new(f).unwrap()
}

fn noise(g: f64) -> NoiseParams {
    NoiseParams::uniform(g).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let mut out = Outcome::new();
    for (g, tol) in [(1.0, 1e-9), (0.99, 1e-6)] {
        let n = noise(g);
        let (mut df, mut dp) = (0.0f64, 0.0f64);
        for i in 0..=20 {
            for j in 0..=20 {
                let f1 = wf(0.5 + 0.025 * i as f64);
                let f2 = wf(0.5 + 0.025 * j as f64);
                let a = purify_pair(f1, f2, n);
                let b = oracle_simulate_step(f1, f2, n);
                df = df.max((a.f_out.value() - b.f_out.value()).abs());
                dp = dp.max((a.p_succ - b.p_succ).abs());
            }
        }
        out.check(
            df < tol && dp < tol,
            format!("p2=eta={g}: max |dF| {df:.2e}, max |dp| {dp:.2e} (tol {tol:.0e})"),
        );
    }
    out
}

fn swap_calculus() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for g in [1.0, 0.99] {
        let n = noise(g);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let len = rng.gen_range(1..=8);
            let fids: Vec<WernerFidelity> = (0..len).map(|_| wf(rng.gen_range(0.25..=1.0))).collect();
            let whole = swap_fidelity(&fids, n).unwrap().value();
            let folded = fids[1..]
                .iter()
                .fold(fids[0], |acc, &f| swap_fidelity(&[acc, f], n).unwrap());
            worst = worst.max((whole - folded.value()).abs());
        }
        out.check(
            worst < 1e-12,
            format!("p2=eta={g}: 1000 lists, max deviation {worst:.2e} (tol 1e-12)"),
        );
    }
    let anchor = swap_fidelity(&[wf(0.99), wf(0.99)], NoiseParams::PERFECT)
        .unwrap()
        .value();
    out.check(
        (anchor - 0.980133).abs() < 1e-6,
        format!("swap(0.99, 0.99) = {anchor:.9} (want 0.980133 +/- 1e-6)"),
    );
    out
}

fn hashing_threshold() -> Outcome {
    let mut out = Outcome::new();
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if distillable_per_pair(wf(mid)) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.check(
        (hi - 0.8107).abs() <= 0.0005,
        format!("F* = {hi:.10} (want 0.8107 +/- 0.0005)"),
    );
    out
}

fn chain_trend() -> Outcome {
    let mut out = Outcome::new();
    let mut spans = Vec::new();
    for g in [1.0, 0.995, 0.99, 0.985] {
        let chain = Chain::uniform(6, 20, wf(0.97), noise(g)).unwrap();
        let (plan, eval) = optimize_chain(&chain).unwrap();
        let longest = plan.lengths().into_iter().max().unwrap();
        out.details.push(format!(
            "     g={g}: plan {} longest segment {longest} d_total {:.6}",
            plan.summary(),
            eval.d_total
        ));
        // a plan with no distillable output says nothing about segment length
        if eval.d_total > 0.0 {
            spans.push((g, longest));
        }
    }
    let monotone = spans.windows(2).all(|w| w[1].1 >= w[0].1);
    out.check(
        monotone && spans.len() >= 2,
        format!(
            "longest segment non-decreasing as gate fidelity falls over {} distillable points",
            spans.len()
        ),
    );
    let corner = Chain::uniform(6, 20, wf(0.95), noise(0.985)).unwrap();
    let d = optimize_chain(&corner).unwrap().1.d_total;
    out.details
        .push(format!("     lowest corner (F=0.95, g=0.985): d_total {d:.6}"));
    out
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn routing() -> Outcome {
    let mut out = Outcome::new();
    let cfg = ExperimentConfig::defaults(ExperimentKind::RouteCompare);
    let rows = run_experiment(&cfg).unwrap();
    // (gate, seed) -> variant -> d_total
    let mut instances: BTreeMap<(u64, u64), BTreeMap<String, f64>> = BTreeMap::new();
    for r in &rows {
        instances
            .entry((r.gate_fidelity.to_bits(), r.seed.unwrap()))
            .or_default()
            .insert(r.cost_variant.clone(), r.d_total);
    }
    let count = instances.len() / cfg.gate_fidelities.len();
    let violations = instances
        .values()
        .filter(|v| v.iter().any(|(name, &d)| name != "exhaustive" && d > v["exhaustive"]))
        .count();
    out.check(
        violations == 0 && count >= 100,
        format!(
            "(a) exhaustive >= every heuristic on {} instances: {violations} violations",
            instances.len()
        ),
    );
    for &g in &cfg.gate_fidelities {
        let means: BTreeMap<&str, f64> = ["exhaustive", "hop", "inv-egr", "inv-egr-sq"]
            .into_iter()
            .map(|name| {
                let ds: Vec<f64> = instances
                    .iter()
                    .filter(|((gb, _), _)| *gb == g.to_bits())
                    .map(|(_, v)| v[name])
                    .collect();
                (name, mean(&ds))
            })
            .collect();
        out.details.push(format!(
            "     g={g}: means exhaustive {:.4} hop {:.4} inv-egr {:.4} inv-egr-sq {:.4} over {count} seeds",
            means["exhaustive"], means["hop"], means["inv-egr"], means["inv-egr-sq"]
        ));
        let hop = means["hop"];
        out.check(
            hop <= means["inv-egr"] && hop <= means["inv-egr-sq"],
            format!(
                "(b) g={g}: mean hop {hop:.4} <= inv-egr {:.4} and <= inv-egr-sq {:.4}",
                means["inv-egr"], means["inv-egr-sq"]
            ),
        );
        let (hi, lo) = if g == 1.0 {
            ("inv-egr-sq", "inv-egr")
        } else {
            ("inv-egr", "inv-egr-sq")
        };
        out.check(
            means[hi] >= means[lo],
            format!("(c) g={g}: mean {hi} {:.4} >= {lo} {:.4}", means[hi], means[lo]),
        );
    }
    out
}

fn small_oracle() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mismatches = 0;
    for i in 0..200 {
        let n = if i % 2 == 0 { NoiseParams::PERFECT } else { noise(0.99) };
        let chain = common::random_chain(&mut rng, 3, n);
        let (_, fast) = optimize_chain_with(&chain, OptimizerOptions { max_k: 4 }).unwrap();
        let (_, slow) = common::brute_force(&chain, 4);
        if fast.d_total != slow.d_total {
            mismatches += 1;
        }
    }
    out.check(
        mismatches == 0,
        format!("200 chains of <= 3 hops, k <= 4: {mismatches} mismatches"),
    );
    out
}

fn topology() -> Outcome {
    let mut out = Outcome::new();
    let cfg = ExperimentConfig::defaults(ExperimentKind::MultipathCompare);
    let rows = run_experiment(&cfg).unwrap();
    // (gate, equivalence, topology, seed) -> cumulative d_total by path count
    let mut series: BTreeMap<(u64, String, String, u64), Vec<f64>> = BTreeMap::new();
    for r in &rows {
        let mut parts = r.experiment_id.rsplit('/');
        let paths: usize = parts.next().unwrap().parse().unwrap();
        let equivalence = parts.next().unwrap().to_string();
        let s = series
            .entry((
                r.gate_fidelity.to_bits(),
                equivalence,
                r.topology.clone(),
                r.seed.unwrap(),
            ))
            .or_default();
        if paths > 0 {
            s.push(r.d_total);
        }
    }
    let ensemble = |g: f64, eq: &str, topo: &str, at_one: bool| -> f64 {
        let ds: Vec<f64> = series
            .iter()
            .filter(|((gb, e, t, _), _)| *gb == g.to_bits() && e == eq && t == topo)
            .map(|(_, s)| if at_one { s.first() } else { s.last() }.copied().unwrap_or(0.0))
            .collect();
        assert!(ds.len() >= 100);
        mean(&ds)
    };
    for &g in &cfg.gate_fidelities {
        let (tri, sq, hex) = (
            ensemble(g, "channel", "triangular", false),
            ensemble(g, "channel", "square", false),
            ensemble(g, "channel", "hexagonal", false),
        );
        out.check(
            tri > sq && sq > hex,
            format!("g={g} channel EGR, max paths: triangular {tri:.5} > square {sq:.5} > hexagonal {hex:.5}"),
        );
        let one: Vec<f64> = ["triangular", "square", "hexagonal"]
            .iter()
            .map(|t| ensemble(g, "repeater", t, true))
            .collect();
        out.check(
            one[2] > one[0] && one[2] > one[1],
            format!(
                "g={g} repeater EGR, one path: hexagonal {:.5} best (triangular {:.5}, square {:.5})",
                one[2], one[0], one[1]
            ),
        );
        let many: Vec<f64> = ["triangular", "square", "hexagonal"]
            .iter()
            .map(|t| ensemble(g, "repeater", t, false))
            .collect();
        out.check(
            many[1] > many[0] && many[1] > many[2],
            format!(
                "g={g} repeater EGR, max paths: square {:.5} best (triangular {:.5}, hexagonal {:.5})",
                many[1], many[0], many[2]
            ),
        );
    }
    out
}

fn csv_bytes(cfg: &ExperimentConfig, rows: &[ResultRow], dir: &std::path::Path, name: &str) -> Vec<u8> {
    let path = dir.join(name);
    write_results(rows, &Metadata::for_config(cfg), Format::Csv, Some(&path)).unwrap();
    std::fs::read(path).unwrap()
}

fn determinism() -> Outcome {
    let mut out = Outcome::new();
    let dir = tempfile::tempdir().unwrap();
    for kind in [
        ExperimentKind::ChainSweep,
        ExperimentKind::RouteCompare,
        ExperimentKind::MultipathCompare,
    ] {
        let mut cfg = ExperimentConfig::defaults(kind);
        cfg.seeds = (0..10).collect();
        let a = csv_bytes(&cfg, &run_experiment(&cfg).unwrap(), dir.path(), "a.csv");
        let b = csv_bytes(&cfg, &run_experiment(&cfg).unwrap(), dir.path(), "b.csv");
        out.check(
            a == b,
            format!("{}: two runs, {} bytes each, identical", kind.name(), a.len()),
        );
    }
    out
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "purification oracle equivalence",
            Duration::from_secs(10),
            oracle_equivalence,
        ),
        ("swap calculus", Duration::from_secs(1), swap_calculus),
        ("hashing threshold", Duration::from_secs(1), hashing_threshold),
        ("chain trend", Duration::from_secs(300), chain_trend),
        ("routing dominance and cost ordering", Duration::from_secs(900), routing),
        (
            "small-instance optimizer oracle",
            Duration::from_secs(120),
            small_oracle,
        ),
        ("topology orderings", Duration::from_secs(1200), topology),
        ("determinism", Duration::from_secs(3600), determinism),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        outcome.check(elapsed <= *budget, format!("runtime {elapsed:.2?} (budget {budget:?})"));
        println!(
            "criterion {}: {name} ... {}",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" }
        );
        for d in &outcome.details {
            println!("    {d}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
