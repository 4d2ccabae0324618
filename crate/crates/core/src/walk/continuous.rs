//! Continuous serving: one pre-processing table answers requests until a
//! connector runs out of short walks, then the table is rebuilt and the
//! failed request is rerun from scratch.

use std::io::Write;

use rand::Rng;

use super::{
    pre_processing, single_random_walk_with, LambdaRule, ShortWalkTable, WalkError, WalkResult,
};
use crate::graph::{sample_source_by_degree, Graph, NodeId, RoutingOracle};
use crate::rng::SimRng;
use crate::sim::{Capacity, CostRecord, Network};

/// Consecutive fresh tables a single request may fail on before giving up.
pub const DEFAULT_REBUILD_LIMIT: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousConfig {
    pub length: u32,
    pub eta: f64,
    pub lambda: LambdaRule,
    pub capacity: Capacity,
    pub notify_source: bool,
    pub rebuild_limit: u32,
}

impl ContinuousConfig {
    pub fn new(length: u32) -> Self {
        Self {
            length,
            eta: 1.0,
            lambda: LambdaRule::default(),
            capacity: Capacity::default(),
            notify_source: false,
            rebuild_limit: DEFAULT_REBUILD_LIMIT,
        }
    }
}

/// Statistics for one table lifetime.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: u64,
    pub lambda: u32,
    pub total_entries: usize,
    pub used_entries: usize,
    /// Used fraction; final once `closed`.
    pub kappa: f64,
    pub walks_served: u64,
    pub failed_requests: u64,
    pub preprocess_cost: CostRecord,
    pub forward_rounds: u64,
    pub r_max: u32,
    /// Cost of every request attempt made against this table, failed ones
    /// included.
    pub request_cost: CostRecord,
    pub closed: bool,
}

impl EpochRecord {
    pub fn total_cost(&self) -> CostRecord {
        self.preprocess_cost + self.request_cost
    }

    /// All messages of the epoch divided by the walks it served.
    pub fn amortized_messages(&self) -> f64 {
        self.total_cost().total_messages() as f64 / self.walks_served.max(1) as f64
    }

    pub fn amortized_rounds(&self) -> f64 {
        self.total_cost().total_rounds() as f64 / self.walks_served.max(1) as f64
    }
}

/// One line of the per-request cost log.
#[derive(Debug, Clone, PartialEq)]
pub struct RequestLogEntry {
    pub epoch: u64,
    pub request_index: u64,
    pub source: NodeId,
    pub destination: Option<NodeId>,
    pub rounds: u64,
    pub messages: u64,
    pub stitches: usize,
    pub status: super::WalkStatus,
}

/// Long-lived serving state for one graph.
pub struct ContinuousWalker<'g> {
    oracle: &'g RoutingOracle,
    net: Network<'g>,
    config: ContinuousConfig,
    lambda: u32,
    table: ShortWalkTable,
    epochs: Vec<EpochRecord>,
    log: Vec<RequestLogEntry>,
    requests: u64,
    rng: SimRng,
}

impl<'g> ContinuousWalker<'g> {
    /// Resolves lambda and builds the first table.
    pub fn new(
        graph: &'g Graph,
        oracle: &'g RoutingOracle,
        config: ContinuousConfig,
        rng: SimRng,
    ) -> Result<Self, WalkError> {
        if config.length == 0 {
            return Err(WalkError::InvalidParameter("walk length must be at least 1".into()));
        }
        if oracle.graph().node_count() != graph.node_count() {
            return Err(WalkError::InvalidParameter("oracle was built for another graph".into()));
        }
        let lambda = config.lambda.resolve(config.length, graph.node_count(), oracle.diameter());
        let net = Network::new(graph, config.capacity)?;
        let placeholder = ShortWalkTable {
            lambda,
            epoch: 0,
            offsets: vec![0; graph.node_count() + 1],
            entries: Vec::new(),
            unused: Vec::new(),
            used: 0,
        };
        let mut walker = Self {
            oracle,
            net,
            config,
            lambda,
            table: placeholder,
            epochs: Vec::new(),
            log: Vec::new(),
            requests: 0,
            rng,
        };
        walker.rebuild()?;
        Ok(walker)
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn config(&self) -> &ContinuousConfig {
        &self.config
    }

    pub fn table(&self) -> &ShortWalkTable {
        &self.table
    }

    pub fn network(&self) -> &Network<'g> {
        &self.net
    }

    pub fn network_mut(&mut self) -> &mut Network<'g> {
        &mut self.net
    }

    pub fn epochs(&self) -> &[EpochRecord] {
        &self.epochs
    }

    pub fn current_epoch(&self) -> &EpochRecord {
        self.epochs.last().expect("at least one epoch")
    }

    pub fn request_log(&self) -> &[RequestLogEntry] {
        &self.log
    }

    /// Builds a fresh table and opens a new epoch.
    pub fn rebuild(&mut self) -> Result<(), WalkError> {
        let epoch = self.epochs.len() as u64;
        let pre =
            pre_processing(&mut self.net, self.config.eta, self.lambda, epoch, &mut self.rng)?;
        self.epochs.push(EpochRecord {
            epoch,
            lambda: self.lambda,
            total_entries: pre.table.total(),
            used_entries: 0,
            kappa: 0.0,
            walks_served: 0,
            failed_requests: 0,
            preprocess_cost: pre.cost,
            forward_rounds: pre.forward_rounds,
            r_max: pre.table.r_max(),
            request_cost: CostRecord::default(),
            closed: false,
        });
        self.table = pre.table;
        Ok(())
    }

    /// Attempts one request against the current table without rebuilding.
    /// A failure closes the current epoch; the next call to this method
    /// must be preceded by [`rebuild`](Self::rebuild).
    pub fn try_serve(&mut self, source: NodeId) -> Result<WalkResult, WalkError> {
        if self.current_epoch().closed {
            return Err(WalkError::InvalidParameter("epoch is closed; rebuild first".into()));
        }
        let result = single_random_walk_with(
            &mut self.net,
            &mut self.table,
            self.oracle,
            source,
            self.config.length,
            self.config.notify_source,
            &mut self.rng,
        )?;
        let (used, kappa) = (self.table.used(), self.table.kappa());
        let epoch = self.epochs.last_mut().expect("at least one epoch");
        epoch.request_cost += result.cost;
        epoch.used_entries = used;
        epoch.kappa = kappa;
        if result.is_ok() {
            epoch.walks_served += 1;
        } else {
            epoch.failed_requests += 1;
            epoch.closed = true;
        }
        self.log.push(RequestLogEntry {
            epoch: epoch.epoch,
            request_index: self.requests,
            source,
            destination: result.destination,
            rounds: result.cost.total_rounds(),
            messages: result.cost.total_messages(),
            stitches: result.stitches(),
            status: result.status,
        });
        Ok(result)
    }

    /// Serves a request, rebuilding the table and rerunning from scratch as
    /// often as needed.
    pub fn serve(&mut self, source: NodeId) -> Result<WalkResult, WalkError> {
        let mut failures = 0;
        let result = loop {
            if self.current_epoch().closed {
                self.rebuild()?;
            }
            let result = self.try_serve(source)?;
            if result.is_ok() {
                break result;
            }
            failures += 1;
            if failures >= self.config.rebuild_limit {
                return Err(WalkError::RebuildLimit { source_node: source, attempts: failures });
            }
        };
        self.requests += 1;
        Ok(result)
    }

    /// Serves sources from `sources` until the current table fails for the
    /// first time and returns the closed epoch. No rebuild happens.
    pub fn run_until_failure<I>(&mut self, sources: I) -> Result<EpochRecord, WalkError>
    where
        I: IntoIterator<Item = NodeId>,
    {
        for s in sources {
            let r = self.try_serve(s)?;
            if r.is_ok() {
                self.requests += 1;
            } else {
                return Ok(self.current_epoch().clone());
            }
        }
        Ok(self.current_epoch().clone())
    }
}

/// Everything produced by [`continuous_random_walk`].
#[derive(Debug, Clone)]
pub struct ContinuousReport {
    pub results: Vec<WalkResult>,
    pub epochs: Vec<EpochRecord>,
    pub log: Vec<RequestLogEntry>,
    pub lambda: u32,
}

/// Serves `requests` walks drawn from `sources`.
pub fn continuous_random_walk<I>(
    graph: &Graph,
    oracle: &RoutingOracle,
    config: ContinuousConfig,
    sources: I,
    requests: usize,
    rng: SimRng,
) -> Result<ContinuousReport, WalkError>
where
    I: IntoIterator<Item = NodeId>,
{
    let mut walker = ContinuousWalker::new(graph, oracle, config, rng)?;
    let mut results = Vec::with_capacity(requests);
    for s in sources.into_iter().take(requests) {
        results.push(walker.serve(s)?);
    }
    Ok(ContinuousReport {
        results,
        epochs: walker.epochs.clone(),
        log: walker.log.clone(),
        lambda: walker.lambda,
    })
}

/// Endless stream of sources drawn with probability `deg(v) / 2m`.
pub fn degree_proportional_sources<'a, R: Rng + 'a>(
    graph: &'a Graph,
    mut rng: R,
) -> impl Iterator<Item = NodeId> + 'a {
    std::iter::repeat_with(move || sample_source_by_degree(graph, &mut rng))
}

/// Per-request cost log as CSV:
/// `epoch,request_index,source,destination,rounds,messages,stitches,status`.
pub fn write_request_log<W: Write>(log: &[RequestLogEntry], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "epoch",
        "request_index",
        "source",
        "destination",
        "rounds",
        "messages",
        "stitches",
        "status",
    ])?;
    for e in log {
        w.write_record([
            e.epoch.to_string(),
            e.request_index.to_string(),
            e.source.to_string(),
            e.destination.map(|d| d.to_string()).unwrap_or_default(),
            e.rounds.to_string(),
            e.messages.to_string(),
            e.stitches.to_string(),
            e.status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
