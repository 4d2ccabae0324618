use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::ExperimentError;
use crate::graph::{generate, Family, GeneratorSpec, RoutingMode, RoutingOracle};
use crate::rng::{derive_seed, stream, Purpose};
use crate::sim::Capacity;
use crate::walk::continuous::{degree_proportional_sources, ContinuousConfig, ContinuousWalker};
use crate::walk::LambdaRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptParam {
    /// Walk length `l` (absolute values).
    Length,
    /// Node count `n`.
    Nodes,
    /// Short walks per unit of `deg(v) log2 n`.
    Eta,
    /// Short-walk length as a multiple of `sqrt(l)`.
    Lambda,
}

impl SweptParam {
    pub fn name(self) -> &'static str {
        match self {
            SweptParam::Length => "l",
            SweptParam::Nodes => "n",
            SweptParam::Eta => "eta",
            SweptParam::Lambda => "lambda",
        }
    }
}

impl fmt::Display for SweptParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweptParam {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "l" | "length" | "ell" => Ok(SweptParam::Length),
            "n" | "nodes" => Ok(SweptParam::Nodes),
            "eta" => Ok(SweptParam::Eta),
            "lambda" => Ok(SweptParam::Lambda),
            other => {
                Err(ExperimentError::InvalidSpec(format!("unknown swept parameter {other:?}")))
            }
        }
    }
}

/// Walk length used when `l` is not the swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthSetting {
    /// `l = n` (the requested `n`, before any generator rounding).
    EqualsN,
    Fixed(u32),
}

impl LengthSetting {
    fn resolve(self, n: usize) -> u32 {
        match self {
            LengthSetting::EqualsN => n as u32,
            LengthSetting::Fixed(l) => l,
        }
    }
}

/// A sweep over one parameter, for several families, with replication.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweptParam,
    pub values: Vec<f64>,
    pub n: usize,
    pub length: LengthSetting,
    pub eta: f64,
    /// Lambda when the swept parameter is not `lambda`.
    pub lambda: LambdaRule,
    pub families: Vec<Family>,
    pub replicas: usize,
    pub seed: u64,
    pub capacity: Capacity,
    pub routing: RoutingMode,
}

impl SweepSpec {
    /// Defaults: `n = 10^4`, `l = n`, `eta = 1`, `lambda = ceil(sqrt l)`, all
    /// five families, ten replicas.
    pub fn new(param: SweptParam, values: Vec<f64>) -> Self {
        Self {
            param,
            values,
            n: 10_000,
            length: LengthSetting::EqualsN,
            eta: 1.0,
            lambda: LambdaRule::default(),
            families: Family::ALL.to_vec(),
            replicas: 10,
            seed: 0,
            capacity: Capacity::default(),
            routing: RoutingMode::ShortestPath,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::InvalidSpec(m.to_string()));
        if self.values.is_empty() {
            return bad("value grid is empty");
        }
        if self.replicas == 0 {
            return bad("replicas must be at least 1");
        }
        if self.families.is_empty() {
            return bad("no graph families selected");
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("grid values must be positive");
        }
        if matches!(self.param, SweptParam::Length | SweptParam::Nodes)
            && self.values.iter().any(|v| v.fract() != 0.0)
        {
            return bad("length and node grids must be integers");
        }
        Ok(())
    }

    /// Concrete `(n, l, eta, lambda)` for one grid value.
    pub fn point(&self, value: f64) -> (usize, u32, f64, LambdaRule) {
        let (mut n, mut length, mut eta, mut lambda) =
            (self.n, self.length.resolve(self.n), self.eta, self.lambda);
        match self.param {
            SweptParam::Length => length = value as u32,
            SweptParam::Nodes => {
                n = value as usize;
                length = self.length.resolve(n);
            }
            SweptParam::Eta => eta = value,
            SweptParam::Lambda => lambda = LambdaRule::SqrtLength(value),
        }
        (n, length, eta, lambda)
    }
}

/// Walk lengths `round(n^e)` for each exponent.
pub fn length_grid(n: usize, exponents: &[f64]) -> Vec<f64> {
    exponents.iter().map(|e| (n as f64).powf(*e).round().max(1.0)).collect()
}

/// One (family, value, replica) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub replica: usize,
    pub kappa: f64,
    pub amortized_rounds: f64,
    pub amortized_messages: f64,
    pub walks_served: u64,
    pub diameter: u32,
    pub effective_n: usize,
    pub lambda: u32,
    pub length: u32,
    /// Phase-summed messages of the epoch.
    pub total_messages: u64,
    pub error: Option<String>,
}

/// Replica aggregate for one (family, value) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub family: Family,
    pub param: SweptParam,
    pub value: f64,
    pub kappa_mean: f64,
    pub kappa_std: f64,
    pub rounds_mean: f64,
    pub rounds_std: f64,
    pub messages_mean: f64,
    pub messages_std: f64,
    pub walks_served_mean: f64,
    pub diameter_mean: f64,
    pub replicas: Vec<ReplicaOutcome>,
}

impl ExperimentRecord {
    fn aggregate(
        family: Family,
        param: SweptParam,
        value: f64,
        replicas: Vec<ReplicaOutcome>,
    ) -> Self {
        let ok: Vec<&ReplicaOutcome> = replicas.iter().filter(|r| r.error.is_none()).collect();
        let (kappa_mean, kappa_std) = mean_std(ok.iter().map(|r| r.kappa));
        let (rounds_mean, rounds_std) = mean_std(ok.iter().map(|r| r.amortized_rounds));
        let (messages_mean, messages_std) = mean_std(ok.iter().map(|r| r.amortized_messages));
        let (walks_served_mean, _) = mean_std(ok.iter().map(|r| r.walks_served as f64));
        let (diameter_mean, _) = mean_std(ok.iter().map(|r| r.diameter as f64));
        Self {
            family,
            param,
            value,
            kappa_mean,
            kappa_std,
            rounds_mean,
            rounds_std,
            messages_mean,
            messages_std,
            walks_served_mean,
            diameter_mean,
            replicas,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &str> {
        self.replicas.iter().filter_map(|r| r.error.as_deref())
    }
}

/// Mean and sample standard deviation; NaN mean for an empty input.
fn mean_std(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let xs: Vec<f64> = xs.collect();
    if xs.is_empty() {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Runs one cell: build the graph, serve degree-proportional requests until
/// the first table fails, and measure that epoch.
///
/// The graph and random streams depend on `(seed, family, n, replica)` only,
/// so cells that differ in `l`, `eta` or `lambda` share graph and sources.
pub fn run_cell(
    spec: &SweepSpec,
    family: Family,
    value: f64,
    replica: usize,
) -> Result<ReplicaOutcome, ExperimentError> {
    let (n, length, eta, lambda) = spec.point(value);
    let tag = [family as u64, n as u64, replica as u64];
    let graph_seed = derive_seed(spec.seed, Purpose::Replica, &tag);
    let graph = generate(&GeneratorSpec::new(family, n, graph_seed))?.graph;
    let oracle = RoutingOracle::new(&graph, spec.routing);
    let config = ContinuousConfig {
        length,
        eta,
        lambda,
        capacity: spec.capacity,
        ..ContinuousConfig::new(length)
    };
    let mut walker =
        ContinuousWalker::new(&graph, &oracle, config, stream(spec.seed, Purpose::Walk, &tag))?;
    let sources = degree_proportional_sources(&graph, stream(spec.seed, Purpose::Sources, &tag));
    let epoch = walker.run_until_failure(sources)?;
    Ok(ReplicaOutcome {
        replica,
        kappa: epoch.kappa,
        amortized_rounds: epoch.amortized_rounds(),
        amortized_messages: epoch.amortized_messages(),
        walks_served: epoch.walks_served,
        diameter: oracle.diameter(),
        effective_n: graph.node_count(),
        lambda: walker.lambda(),
        length,
        total_messages: epoch.total_cost().total_messages(),
        error: None,
    })
}

/// Runs every (family, value, replica) cell on the rayon pool and
/// aggregates in cell order. Failing cells are recorded, not fatal.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    spec.validate()?;
    let cells: Vec<(Family, usize, usize)> = spec
        .families
        .iter()
        .flat_map(|&f| {
            (0..spec.values.len()).flat_map(move |v| (0..spec.replicas).map(move |r| (f, v, r)))
        })
        .collect();
    let outcomes: Vec<ReplicaOutcome> = cells
        .par_iter()
        .map(|&(family, v, replica)| {
            run_cell(spec, family, spec.values[v], replica).unwrap_or_else(|e| ReplicaOutcome {
                replica,
                kappa: f64::NAN,
                amortized_rounds: f64::NAN,
                amortized_messages: f64::NAN,
                walks_served: 0,
                diameter: 0,
                effective_n: 0,
                lambda: 0,
                length: 0,
                total_messages: 0,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let mut outcomes = outcomes.into_iter();
    let mut records = Vec::new();
    for &family in &spec.families {
        for &value in &spec.values {
            let reps: Vec<ReplicaOutcome> = outcomes.by_ref().take(spec.replicas).collect();
            records.push(ExperimentRecord::aggregate(family, spec.param, value, reps));
        }
    }
    Ok(records)
}

/// Sweep reporting utilization at the first failure.
pub fn run_kappa_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    run_sweep(spec)
}

/// Sweep reporting amortized messages per served walk. Same cells as
/// [`run_kappa_sweep`]; only the reported metric differs.
pub fn run_message_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    run_sweep(spec)
}
