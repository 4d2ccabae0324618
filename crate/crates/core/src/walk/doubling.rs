//! One short-walk table per power-of-two walk length, so requests of any
//! length up to `l_max` are answered at a length within a factor two.

use rand::Rng;

use super::{
    pre_processing, single_random_walk, LambdaRule, ShortWalkTable, WalkError, WalkResult,
};
use crate::graph::{NodeId, RoutingOracle};
use crate::sim::{CostRecord, Network};

#[derive(Debug, Clone)]
pub struct DoublingLevel {
    pub length: u32,
    pub table: ShortWalkTable,
    pub rebuilds: u32,
}

#[derive(Debug, Clone)]
pub struct DoublingTables {
    eta: f64,
    max_length: u32,
    levels: Vec<DoublingLevel>,
}

/// Lengths `1, 2, 4, ...` up to the first power of two `>= max_length`.
pub fn doubling_lengths(max_length: u32) -> Vec<u32> {
    let top = max_length.max(1).next_power_of_two();
    std::iter::successors(Some(1u32), |&l| (l < top).then(|| l * 2)).collect()
}

/// Builds one table per doubling length, each with its own lambda.
pub fn build_doubling_tables<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    oracle: &RoutingOracle,
    max_length: u32,
    eta: f64,
    lambda: LambdaRule,
    rng: &mut R,
) -> Result<(DoublingTables, CostRecord), WalkError> {
    if max_length == 0 {
        return Err(WalkError::InvalidParameter("maximum length must be at least 1".into()));
    }
    let n = net.graph().node_count();
    let mut cost = CostRecord::default();
    let mut levels = Vec::new();
    for length in doubling_lengths(max_length) {
        let l = lambda.resolve(length, n, oracle.diameter());
        let pre = pre_processing(net, eta, l, 0, rng)?;
        cost += pre.cost;
        levels.push(DoublingLevel { length, table: pre.table, rebuilds: 0 });
    }
    Ok((DoublingTables { eta, max_length, levels }, cost))
}

impl DoublingTables {
    pub fn levels(&self) -> &[DoublingLevel] {
        &self.levels
    }

    pub fn max_length(&self) -> u32 {
        self.max_length
    }

    fn level_index(&self, length: u32) -> Result<usize, WalkError> {
        if length == 0 || length > self.max_length {
            return Err(WalkError::LengthOutOfRange { requested: length, max: self.max_length });
        }
        Ok(self.levels.partition_point(|lvl| lvl.length < length))
    }

    /// Length actually walked for a request of `length`: the smallest table
    /// length not below it.
    pub fn served_length(&self, length: u32) -> Result<u32, WalkError> {
        Ok(self.levels[self.level_index(length)?].length)
    }

    /// Serves `length` at [`served_length`](Self::served_length). A failing
    /// level is rebuilt on its own and the request rerun.
    pub fn serve<R: Rng + ?Sized>(
        &mut self,
        net: &mut Network<'_>,
        oracle: &RoutingOracle,
        source: NodeId,
        length: u32,
        rng: &mut R,
    ) -> Result<WalkResult, WalkError> {
        let idx = self.level_index(length)?;
        let served = self.levels[idx].length;
        for _ in 0..super::continuous::DEFAULT_REBUILD_LIMIT {
            let level = &mut self.levels[idx];
            let r = single_random_walk(net, &mut level.table, oracle, source, served, rng)?;
            if r.is_ok() {
                return Ok(r);
            }
            let lambda = level.table.lambda();
            let epoch = level.table.epoch() + 1;
            level.table = pre_processing(net, self.eta, lambda, epoch, rng)?.table;
            level.rebuilds += 1;
        }
        Err(WalkError::RebuildLimit {
            source_node: source,
            attempts: super::continuous::DEFAULT_REBUILD_LIMIT,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_routing, generate, Family, GeneratorSpec, RoutingMode};
    use crate::rng::{stream, Purpose};
    use crate::sim::Capacity;

    #[test]
    fn lengths_double_up_to_max() {
        assert_eq!(doubling_lengths(16), vec![1, 2, 4, 8, 16]);
        assert_eq!(doubling_lengths(1), vec![1]);
        assert_eq!(doubling_lengths(20), vec![1, 2, 4, 8, 16, 32]);
    }

    #[test]
    fn serves_within_factor_two() {
        let g = generate(&GeneratorSpec::new(Family::GnpExpander, 40, 5)).unwrap().graph;
        let oracle = build_routing(&g, RoutingMode::ShortestPath);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(5, Purpose::Preprocess, &[]);
        let (mut tables, cost) =
            build_doubling_tables(&mut net, &oracle, 16, 1.0, LambdaRule::default(), &mut rng)
                .unwrap();
        assert_eq!(tables.levels().len(), 5);
        assert!(cost.total_messages() > 0);
        assert_eq!(tables.served_length(5).unwrap(), 8);
        assert_eq!(tables.served_length(16).unwrap(), 16);
        assert!(matches!(tables.served_length(17), Err(WalkError::LengthOutOfRange { .. })));
        assert!(tables.served_length(0).is_err());
        for l in 1..=16 {
            let r = tables.serve(&mut net, &oracle, 0, l, &mut rng).unwrap();
            assert!(r.length >= l && r.length < 2 * l || r.length == l);
            assert_eq!(r.walked_steps(), r.length as u64);
        }
    }
}
