//! Ground-truth walk distributions and distances between distributions.

use std::io::Write;

use thiserror::Error;

use crate::graph::{Graph, NodeId};

/// Largest graph for which dense distribution vectors are computed.
pub const MAX_DENSE_NODES: usize = 10_000;

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("graph has {0} nodes; dense distributions are limited to {MAX_DENSE_NODES}")]
    TooLarge(usize),
    #[error("distributions have different supports ({0} vs {1} nodes)")]
    MismatchedSupport(usize, usize),
    #[error("cannot build a distribution from an empty sample")]
    EmptySample,
    #[error("node {0} is outside the graph")]
    UnknownNode(NodeId),
    #[error("not a probability vector: {0}")]
    Invalid(String),
}

/// Probability mass per node.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector(Vec<f64>);

impl DistributionVector {
    /// Validates non-negativity and unit mass (within 1e-9).
    pub fn new(mass: Vec<f64>) -> Result<Self, StatsError> {
        if let Some(x) = mass.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(StatsError::Invalid(format!("entry {x}")));
        }
        let total: f64 = mass.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(StatsError::Invalid(format!("total mass {total}")));
        }
        Ok(Self(mass))
    }

    pub fn point_mass(n: usize, v: NodeId) -> Self {
        let mut mass = vec![0.0; n];
        mass[v as usize] = 1.0;
        Self(mass)
    }

    /// `deg(v) / 2m`.
    pub fn stationary(g: &Graph) -> Self {
        let two_m = g.directed_edge_count() as f64;
        Self(g.nodes().map(|v| g.degree(v) as f64 / two_m).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.0[v as usize]
    }

    pub fn total_mass(&self) -> f64 {
        self.0.iter().sum()
    }

    /// One application of the simple-random-walk transition operator.
    pub fn step(&self, g: &Graph) -> Self {
        let mut next = vec![0.0; self.0.len()];
        for u in g.nodes() {
            let p = self.0[u as usize];
            if p == 0.0 {
                continue;
            }
            let share = p / g.degree(u) as f64;
            for &v in g.neighbors(u) {
                next[v as usize] += share;
            }
        }
        Self(next)
    }

    /// CSV dump with header `node,probability`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w =
            csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["node", "probability"])?;
        for (v, p) in self.0.iter().enumerate() {
            w.write_record([v.to_string(), format!("{p:.12}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Law of the endpoint of a `length`-step simple random walk from `source`.
pub fn exact_walk_distribution(
    g: &Graph,
    source: NodeId,
    length: u32,
) -> Result<DistributionVector, StatsError> {
    let n = g.node_count();
    if n > MAX_DENSE_NODES {
        return Err(StatsError::TooLarge(n));
    }
    if source as usize >= n {
        return Err(StatsError::UnknownNode(source));
    }
    let mut dist = DistributionVector::point_mass(n, source);
    for _ in 0..length {
        dist = dist.step(g);
    }
    Ok(dist)
}

/// Half the L1 distance.
pub fn tv_distance(p: &DistributionVector, q: &DistributionVector) -> Result<f64, StatsError> {
    if p.len() != q.len() {
        return Err(StatsError::MismatchedSupport(p.len(), q.len()));
    }
    let l1: f64 = p.0.iter().zip(&q.0).map(|(a, b)| (a - b).abs()).sum();
    Ok((0.5 * l1).clamp(0.0, 1.0))
}

/// Normalized visit counts of `samples` over the nodes of `g`.
pub fn empirical_distribution(
    samples: &[NodeId],
    g: &Graph,
) -> Result<DistributionVector, StatsError> {
    empirical_from_counts(&count_samples(samples, g.node_count())?)
}

pub(crate) fn count_samples(samples: &[NodeId], n: usize) -> Result<Vec<u64>, StatsError> {
    let mut counts = vec![0u64; n];
    for &s in samples {
        *counts.get_mut(s as usize).ok_or(StatsError::UnknownNode(s))? += 1;
    }
    Ok(counts)
}

pub fn empirical_from_counts(counts: &[u64]) -> Result<DistributionVector, StatsError> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(StatsError::EmptySample);
    }
    Ok(DistributionVector(counts.iter().map(|&c| c as f64 / total as f64).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_steps_is_point_mass() {
        let g = Graph::cycle(5);
        assert_eq!(
            exact_walk_distribution(&g, 3, 0).unwrap(),
            DistributionVector::point_mass(5, 3)
        );
    }

    #[test]
    fn path_center_two_steps() {
        let d = exact_walk_distribution(&Graph::path(3), 1, 2).unwrap();
        assert_eq!(d.as_slice(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn four_cycle_two_steps() {
        let d = exact_walk_distribution(&Graph::cycle(4), 0, 2).unwrap();
        assert_eq!(d.as_slice(), &[0.5, 0.0, 0.5, 0.0]);
    }

    #[test]
    fn tv_examples() {
        let a = DistributionVector::new(vec![0.5, 0.5]).unwrap();
        let b = DistributionVector::new(vec![1.0, 0.0]).unwrap();
        let c = DistributionVector::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(tv_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(tv_distance(&b, &c).unwrap(), 1.0);
        assert_eq!(tv_distance(&a, &b).unwrap(), 0.5);
        let d = DistributionVector::point_mass(3, 0);
        assert_eq!(tv_distance(&a, &d), Err(StatsError::MismatchedSupport(2, 3)));
    }

    #[test]
    fn empirical_examples() {
        let g = Graph::path(3);
        assert_eq!(
            empirical_distribution(&[2, 2, 2], &g).unwrap(),
            DistributionVector::point_mass(3, 2)
        );
        assert_eq!(empirical_distribution(&[0, 1], &g).unwrap().as_slice(), &[0.5, 0.5, 0.0]);
        assert_eq!(empirical_distribution(&[], &g), Err(StatsError::EmptySample));
        assert_eq!(empirical_distribution(&[7], &g), Err(StatsError::UnknownNode(7)));
    }

    #[test]
    fn rejects_invalid_vectors_and_large_graphs() {
        assert!(DistributionVector::new(vec![0.5, 0.4]).is_err());
        assert!(DistributionVector::new(vec![1.5, -0.5]).is_err());
        let big = Graph::path(MAX_DENSE_NODES + 1);
        assert_eq!(
            exact_walk_distribution(&big, 0, 1),
            Err(StatsError::TooLarge(MAX_DENSE_NODES + 1))
        );
    }

    #[test]
    fn csv_dump() {
        let mut buf = Vec::new();
        DistributionVector::point_mass(2, 1).write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "node,probability\n0,0.000000000000\n1,1.000000000000\n"
        );
    }
}
