use super::ExperimentError;
use crate::graph::{Graph, NodeId, RoutingMode, RoutingOracle};
use crate::rng::{stream, Purpose};
use crate::sim::{Capacity, Network};
use crate::stats::{
    count_samples, empirical_from_counts, exact_walk_distribution, tv_distance, DistributionVector,
};
use crate::walk::continuous::{
    continuous_random_walk, degree_proportional_sources, ContinuousConfig,
};
use crate::walk::{pre_processing, single_random_walk, LambdaRule, WalkError};

/// Result of comparing sampled walk endpoints with their exact law.
#[derive(Debug, Clone)]
pub struct DistCheck {
    pub tv: f64,
    pub samples: usize,
    pub expected: DistributionVector,
    pub observed: DistributionVector,
}

/// Samples `samples` stitched walks of `length` from `source`, each on a
/// freshly pre-processed table, and measures the total-variation distance
/// of their endpoints from the exact `length`-step distribution.
#[allow(clippy::too_many_arguments)]
pub fn oracle_check(
    graph: &Graph,
    source: NodeId,
    length: u32,
    samples: usize,
    eta: f64,
    lambda: LambdaRule,
    capacity: Capacity,
    seed: u64,
) -> Result<DistCheck, ExperimentError> {
    let expected = exact_walk_distribution(graph, source, length)?;
    let oracle = RoutingOracle::new(graph, RoutingMode::ShortestPath);
    let lambda = lambda.resolve(length, graph.node_count(), oracle.diameter());
    let mut net = Network::new(graph, capacity).map_err(WalkError::from)?;
    let mut rng = stream(seed, Purpose::Walk, &[source as u64, length as u64]);
    let mut endpoints = Vec::with_capacity(samples);
    for i in 0..samples {
        let destination = loop {
            let mut table = pre_processing(&mut net, eta, lambda, i as u64, &mut rng)?.table;
            let r = single_random_walk(&mut net, &mut table, &oracle, source, length, &mut rng)?;
            if let Some(d) = r.destination {
                break d;
            }
        };
        endpoints.push(destination);
    }
    let observed = empirical_from_counts(&count_samples(&endpoints, graph.node_count())?)?;
    let tv = tv_distance(&expected, &observed)?;
    Ok(DistCheck { tv, samples, expected, observed })
}

/// Serves `requests` continuous walks from degree-proportional sources and
/// compares the pooled endpoints with the stationary law `deg(v) / 2m`.
pub fn stationary_check(
    graph: &Graph,
    config: ContinuousConfig,
    requests: usize,
    seed: u64,
) -> Result<DistCheck, ExperimentError> {
    let expected = DistributionVector::stationary(graph);
    let oracle = RoutingOracle::new(graph, RoutingMode::ShortestPath);
    let sources = degree_proportional_sources(graph, stream(seed, Purpose::Sources, &[]));
    let report = continuous_random_walk(
        graph,
        &oracle,
        config,
        sources,
        requests,
        stream(seed, Purpose::Walk, &[]),
    )?;
    let endpoints: Vec<NodeId> = report.results.iter().filter_map(|r| r.destination).collect();
    let observed = empirical_from_counts(&count_samples(&endpoints, graph.node_count())?)?;
    let tv = tv_distance(&expected, &observed)?;
    Ok(DistCheck { tv, samples: endpoints.len(), expected, observed })
}
