//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.
//!
//! Replica counts for the longer sweeps are pinned below so the whole
//! target finishes in a bounded time on a single core.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use contwalk_core::experiments::{
    length_grid, oracle_check, run_kappa_sweep, run_message_sweep, stationary_check,
    ExperimentRecord, SweepSpec, SweptParam,
};
use contwalk_core::graph::build_routing;
use contwalk_core::rng::{stream, Purpose};
use contwalk_core::sim::audit_bandwidth;
use contwalk_core::walk::doubling::build_doubling_tables;
use contwalk_core::{
    generate, naive_walk, pre_processing, sample_source_by_degree, Capacity, ContinuousConfig,
    ContinuousWalker, Family, GeneratorSpec, Graph, LambdaRule, Network, RoutingMode, WalkResult,
};
use rand::Rng;

const SEED: u64 = 20_240_601;

const TV_TOLERANCE: f64 = 0.02;
const ORACLE_SAMPLES: usize = 100_000;
const STATIONARY_REQUESTS: usize = 100_000;
const KAPPA_REPLICAS: usize = 10;
const KAPPA_ALL_FAMILIES: f64 = 0.4;
const KAPPA_EXPANDERS: f64 = 0.55;
const MESSAGE_CONSTANT: f64 = 5.0;
const MESSAGE_REPLICAS: usize = 2;
const MONOTONICITY_REPLICAS: usize = 2;
const ROUND_FORMULA_BUILDS: u64 = 100;
const DOUBLING_REQUESTS: usize = 1000;
const DOUBLING_MAX_LENGTH: u32 = 1000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn graph(family: Family, n: usize, seed: u64) -> Graph {
    generate(&GeneratorSpec::new(family, n, seed)).expect("generator").graph
}

fn distribution_correctness() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let g = graph(family, 20, SEED + i as u64);
        for length in [4u32, 8] {
            let check = oracle_check(
                &g,
                0,
                length,
                ORACLE_SAMPLES,
                1.0,
                LambdaRule::default(),
                Capacity::Limited(1),
                SEED ^ length as u64,
            )
            .expect("oracle check");
            let label = format!("{family}/l={length}");
            if check.tv > TV_TOLERANCE {
                failures.push(format!("{label} tv={:.4}", check.tv));
            }
            if check.tv > worst.0 {
                worst = (check.tv, label);
            }
        }
    }
    let mut detail = format!(
        "max tv {:.4} ({}) over 10 cases, {ORACLE_SAMPLES} samples each, tolerance {TV_TOLERANCE}",
        worst.0, worst.1
    );
    if !failures.is_empty() {
        detail += &format!("; over tolerance: {}", failures.join(", "));
    }
    Outcome::new(failures.is_empty(), detail)
}

fn stationary_pooling() -> Outcome {
    let mut worst = (0.0f64, String::new());
    let mut failures = Vec::new();
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let g = graph(family, 50, SEED + 100 + i as u64);
        let length = 50;
        let check = stationary_check(&g, ContinuousConfig::new(length), STATIONARY_REQUESTS, SEED)
            .expect("stationary check");
        if check.tv > TV_TOLERANCE {
            failures.push(format!("{family} tv={:.4}", check.tv));
        }
        if check.tv > worst.0 {
            worst = (check.tv, family.to_string());
        }
    }
    let mut detail = format!(
        "max tv {:.4} ({}) over 5 families, {STATIONARY_REQUESTS} requests each, tolerance {TV_TOLERANCE}",
        worst.0, worst.1
    );
    if !failures.is_empty() {
        detail += &format!("; over tolerance: {}", failures.join(", "));
    }
    Outcome::new(failures.is_empty(), detail)
}

fn sweep(param: SweptParam, values: Vec<f64>, replicas: usize) -> Vec<ExperimentRecord> {
    let spec = SweepSpec { n: 1000, replicas, seed: SEED, ..SweepSpec::new(param, values) };
    run_kappa_sweep(&spec).expect("sweep")
}

fn cell_errors(records: &[ExperimentRecord]) -> Vec<String> {
    records
        .iter()
        .flat_map(|r| r.errors().map(move |e| format!("{}@{}: {e}", r.family, r.value)))
        .collect()
}

fn kappa_utilization() -> Outcome {
    let records = sweep(SweptParam::Length, vec![1000.0], KAPPA_REPLICAS);
    let errors = cell_errors(&records);
    let mut pass = errors.is_empty();
    let mut parts = Vec::new();
    for r in &records {
        let threshold = match r.family {
            Family::GnpExpander | Family::TwoTier => KAPPA_EXPANDERS,
            _ => KAPPA_ALL_FAMILIES,
        };
        let ok = r.kappa_mean >= threshold;
        pass &= ok;
        parts.push(format!(
            "{} {:.3}{}",
            r.family,
            r.kappa_mean,
            if ok { String::new() } else { format!(" < {threshold}") }
        ));
    }
    parts.extend(errors);
    Outcome::new(pass, format!("mean kappa over {KAPPA_REPLICAS} replicas: {}", parts.join(", ")))
}

fn message_optimality() -> Outcome {
    let grid = length_grid(1000, &[0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2]);
    let spec = SweepSpec {
        n: 1000,
        replicas: MESSAGE_REPLICAS,
        seed: SEED,
        ..SweepSpec::new(SweptParam::Length, grid)
    };
    let records = run_message_sweep(&spec).expect("sweep");
    let errors = cell_errors(&records);
    let mut worst = (0.0f64, String::new());
    let mut violations = Vec::new();
    for r in &records {
        for rep in &r.replicas {
            if rep.error.is_some() {
                continue;
            }
            let bound = MESSAGE_CONSTANT * (rep.length as f64 + rep.diameter as f64);
            let ratio = rep.amortized_messages / bound;
            let label = format!("{}@l={} rep{}", r.family, rep.length, rep.replica);
            if ratio > 1.0 {
                violations.push(format!("{label} {:.0} > {bound:.0}", rep.amortized_messages));
            }
            if ratio > worst.0 {
                worst = (ratio, label);
            }
        }
    }
    let mut detail = format!(
        "worst messages/(5(l+D)) = {:.3} ({}) over 8 lengths x {MESSAGE_REPLICAS} replicas",
        worst.0, worst.1
    );
    for v in violations.iter().chain(&errors) {
        detail += &format!("; {v}");
    }
    Outcome::new(violations.is_empty() && errors.is_empty(), detail)
}

fn naive_exactness() -> Outcome {
    let g = graph(Family::GnpExpander, 200, SEED);
    let mut net = Network::new(&g, Capacity::Limited(1)).expect("network");
    let mut rng = stream(SEED, Purpose::Walk, &[]);
    let mut bad = Vec::new();
    for length in [1u32, 10, 1000] {
        let r = naive_walk(&mut net, 0, length, &mut rng).expect("naive walk");
        let (rounds, messages) = (r.cost.total_rounds(), r.cost.total_messages());
        if rounds != 2 * length as u64 || messages != 2 * length as u64 {
            bad.push(format!("l={length}: rounds={rounds} messages={messages}"));
        }
    }
    let detail = if bad.is_empty() {
        "rounds = messages = 2l for l in {1, 10, 1000}".to_string()
    } else {
        bad.join(", ")
    };
    Outcome::new(bad.is_empty(), detail)
}

fn round_formula() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..ROUND_FORMULA_BUILDS {
        let family = Family::ALL[seed as usize % Family::ALL.len()];
        let g = graph(family, 60, SEED + seed);
        let lambda = 1 + (seed % 12) as u32;
        let mut net = Network::new(&g, Capacity::Unbounded).expect("network");
        let mut rng = stream(SEED, Purpose::Preprocess, &[seed]);
        let pre = pre_processing(&mut net, 1.0, lambda, 0, &mut rng).expect("pre-processing");
        let expected = lambda as u64 + pre.table.r_max() as u64;
        if pre.forward_rounds != expected {
            bad.push(format!("seed {seed}: {} != {expected}", pre.forward_rounds));
        }
    }
    let detail = if bad.is_empty() {
        format!("forward rounds = lambda + r_max in all {ROUND_FORMULA_BUILDS} builds")
    } else {
        bad.join(", ")
    };
    Outcome::new(bad.is_empty(), detail)
}

/// Every attempt (failed ones included) made during a run, tagged with the
/// epoch of the table it drew from.
struct InvariantRun {
    attempts: Vec<(u64, WalkResult)>,
    table_used: (u64, usize),
    balance: (u64, u64),
    idle: bool,
    audit: Option<(u64, u32, u32, usize)>,
    deliveries: usize,
}

fn invariant_run(g: &Graph, length: u32, requests: usize, seed: u64) -> InvariantRun {
    let oracle = build_routing(g, RoutingMode::ShortestPath);
    let config = ContinuousConfig::new(length);
    let mut walker = ContinuousWalker::new(g, &oracle, config, stream(seed, Purpose::Walk, &[]))
        .expect("walker");
    walker.network_mut().enable_log();
    walker.rebuild().expect("rebuild");
    let mut source_rng = stream(seed, Purpose::Sources, &[]);
    let mut attempts = Vec::new();
    for _ in 0..requests {
        let source = sample_source_by_degree(g, &mut source_rng);
        loop {
            if walker.current_epoch().closed {
                walker.rebuild().expect("rebuild");
            }
            let epoch = walker.current_epoch().epoch;
            let r = walker.try_serve(source).expect("request");
            let ok = r.is_ok();
            attempts.push((epoch, r));
            if ok {
                break;
            }
        }
    }
    let net = walker.network();
    let log = net.log().expect("log enabled");
    InvariantRun {
        attempts,
        table_used: (walker.current_epoch().epoch, walker.table().used()),
        balance: net.token_balance(),
        idle: net.is_idle(),
        audit: audit_bandwidth(log, net.capacity()),
        deliveries: log.len(),
    }
}

fn invariant_suite() -> Outcome {
    let mut bad = Vec::new();
    for (i, family) in Family::ALL.into_iter().enumerate() {
        let g = graph(family, 200, SEED + 200 + i as u64);
        let length = 200;
        let lambda = LambdaRule::default().resolve(length, g.node_count(), 0);
        let run = invariant_run(&g, length, 400, SEED + i as u64);

        let served: Vec<&WalkResult> =
            run.attempts.iter().map(|(_, r)| r).filter(|r| r.is_ok()).collect();
        if served.iter().any(|r| r.walked_steps() != length as u64 || r.destination.is_none()) {
            bad.push(format!("{family}: length conservation"));
        }
        if run
            .attempts
            .iter()
            .flat_map(|(_, r)| &r.stitched)
            .any(|&(_, l)| l < lambda || l >= 2 * lambda)
        {
            bad.push(format!("{family}: short-walk length outside [lambda, 2 lambda)"));
        }

        let mut seen = HashSet::new();
        let mut reused = false;
        let mut in_last_epoch = 0;
        for (epoch, r) in &run.attempts {
            for &(walk_id, _) in &r.stitched {
                reused |= !seen.insert((*epoch, walk_id));
                if *epoch == run.table_used.0 {
                    in_last_epoch += 1;
                }
            }
        }
        if reused || in_last_epoch != run.table_used.1 {
            bad.push(format!("{family}: no-reuse audit"));
        }
        if let Some((round, u, v, count)) = run.audit {
            bad.push(format!("{family}: {count} tokens on ({u},{v}) in round {round}"));
        }
        if run.balance.0 != run.balance.1 || !run.idle {
            bad.push(format!("{family}: token conservation {:?}", run.balance));
        }

        let again = invariant_run(&g, length, 400, SEED + i as u64);
        let same = again.attempts == run.attempts
            && again.balance == run.balance
            && again.deliveries == run.deliveries;
        if !same {
            bad.push(format!("{family}: rerun differs"));
        }
    }
    let detail = if bad.is_empty() {
        "length, no-reuse, bandwidth, token conservation and determinism hold on all 5 families"
            .to_string()
    } else {
        bad.join(", ")
    };
    Outcome::new(bad.is_empty(), detail)
}

fn non_increasing(records: &[ExperimentRecord], family: Family) -> (bool, Vec<f64>) {
    let means: Vec<f64> =
        records.iter().filter(|r| r.family == family).map(|r| r.messages_mean).collect();
    (means.windows(2).all(|w| w[1] <= w[0]), means)
}

fn monotonicity() -> Outcome {
    let eta = sweep(SweptParam::Eta, vec![0.25, 0.5, 1.0, 2.0, 4.0], MONOTONICITY_REPLICAS);
    let lambda = sweep(SweptParam::Lambda, vec![0.25, 0.5, 1.0], MONOTONICITY_REPLICAS);
    let mut bad = cell_errors(&eta);
    bad.extend(cell_errors(&lambda));
    for family in Family::ALL {
        for (name, records) in [("eta", &eta), ("lambda", &lambda)] {
            let (ok, means) = non_increasing(records, family);
            if !ok {
                let shown: Vec<String> = means.iter().map(|m| format!("{m:.0}")).collect();
                bad.push(format!("{family} in {name}: [{}]", shown.join(", ")));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!(
            "messages non-increasing in eta and lambda on all 5 families ({MONOTONICITY_REPLICAS} replicas)"
        )
    } else {
        format!("increase found: {}", bad.join("; "))
    };
    Outcome::new(bad.is_empty(), detail)
}

fn doubling_bound() -> Outcome {
    let g = graph(Family::GnpExpander, 100, SEED);
    let oracle = build_routing(&g, RoutingMode::ShortestPath);
    let mut net = Network::new(&g, Capacity::Limited(1)).expect("network");
    let mut rng = stream(SEED, Purpose::Walk, &[]);
    let (mut tables, _) = build_doubling_tables(
        &mut net,
        &oracle,
        DOUBLING_MAX_LENGTH,
        1.0,
        LambdaRule::default(),
        &mut rng,
    )
    .expect("doubling tables");
    let mut bad = Vec::new();
    for _ in 0..DOUBLING_REQUESTS {
        let l = rng.random_range(1..=DOUBLING_MAX_LENGTH);
        let source = sample_source_by_degree(&g, &mut rng);
        let served = tables.served_length(l).expect("served length");
        let r = tables.serve(&mut net, &oracle, source, l, &mut rng).expect("serve");
        let within = served >= l && (served < 2 * l || served == l);
        if !within || r.walked_steps() != served as u64 {
            bad.push(format!("l={l} served={served} walked={}", r.walked_steps()));
        }
    }
    let detail = if bad.is_empty() {
        format!("l <= served < 2l for all {DOUBLING_REQUESTS} requests")
    } else {
        format!("{} violations, e.g. {}", bad.len(), bad[..bad.len().min(5)].join(", "))
    };
    Outcome::new(bad.is_empty(), detail)
}

type Criterion = fn() -> Outcome;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("distribution correctness", distribution_correctness),
        ("stationary pooling", stationary_pooling),
        ("kappa utilization", kappa_utilization),
        ("amortized message bound", message_optimality),
        ("naive baseline exactness", naive_exactness),
        ("pre-processing round formula", round_formula),
        ("invariant suite", invariant_suite),
        ("monotonicity in eta and lambda", monotonicity),
        ("doubling tables", doubling_bound),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {number} {verdict}: {name}: {} [{:.1}s]",
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
        if !outcome.pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
