use rand::Rng;

use super::{ShortWalkTable, WalkError, WalkResult, WalkStatus};
use crate::graph::{NodeId, RoutingOracle};
use crate::sim::{Network, Phase, SimError, Token, TokenKind};

/// Walk id carried by the naive-tail token; stitch tokens carry the id of
/// the short walk they consume.
const TAIL_WALK_ID: u32 = u32::MAX;

/// Serves one request of `length` steps from `source` by stitching short
/// walks from `table`, then walking naively for the remaining `< 2 lambda`
/// steps. The destination is reported out of band.
pub fn single_random_walk<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    table: &mut ShortWalkTable,
    oracle: &RoutingOracle,
    source: NodeId,
    length: u32,
    rng: &mut R,
) -> Result<WalkResult, WalkError> {
    single_random_walk_with(net, table, oracle, source, length, false, rng)
}

/// As [`single_random_walk`]; with `notify_source` the destination also
/// routes its identity back to the source (charged to the stitch phase).
pub fn single_random_walk_with<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    table: &mut ShortWalkTable,
    oracle: &RoutingOracle,
    source: NodeId,
    length: u32,
    notify_source: bool,
    rng: &mut R,
) -> Result<WalkResult, WalkError> {
    if length == 0 {
        return Err(WalkError::InvalidParameter("walk length must be at least 1".into()));
    }
    if table.node_count() != net.graph().node_count() {
        return Err(WalkError::InvalidParameter("table was built for a different graph".into()));
    }
    if !net.is_idle() {
        return Err(SimError::Busy.into());
    }
    let before = net.cost();
    let stitch_limit = length as i64 - 2 * table.lambda() as i64;
    let mut result = WalkResult {
        source,
        length,
        destination: None,
        connectors: vec![source],
        stitched: Vec::new(),
        tail_steps: 0,
        cost: Default::default(),
        status: WalkStatus::Ok,
    };

    let mut holder = source;
    let mut completed = 0u32;
    net.set_phase(Phase::Stitch);
    while completed as i64 <= stitch_limit {
        let Some(entry) = table.take_random_unused(holder, rng) else {
            result.status = WalkStatus::FailedNeedsRebuild;
            result.cost = net.cost() - before;
            return Ok(result);
        };
        let mut token = Token::new(TokenKind::StitchMove, entry.walk_id, source, length);
        token.counter = completed;
        net.route(oracle, holder, entry.destination, token)?;
        completed += entry.length;
        holder = entry.destination;
        result.connectors.push(holder);
        result.stitched.push((entry.walk_id, entry.length));
    }

    net.set_phase(Phase::NaiveTail);
    let graph = net.graph();
    let mut tail = Token::new(TokenKind::NaiveStep, TAIL_WALK_ID, source, length);
    tail.counter = completed;
    net.inject(holder, tail)?;
    let mut destination = holder;
    net.run_until_quiet(|node, tokens, out| {
        for &t in tokens {
            if t.counter == t.target_length {
                destination = node;
                out.retire(t);
            } else {
                let nbrs = graph.neighbors(node);
                out.send(
                    nbrs[rng.random_range(0..nbrs.len())],
                    Token { counter: t.counter + 1, ..t },
                );
            }
        }
    })?;
    result.tail_steps = length - completed;

    if notify_source {
        net.set_phase(Phase::Stitch);
        let mut back = Token::new(TokenKind::DestReturn, TAIL_WALK_ID, source, length);
        back.counter = length;
        net.route(oracle, destination, source, back)?;
    }

    result.destination = Some(destination);
    result.cost = net.cost() - before;
    Ok(result)
}
