use rand::Rng;

use super::{Breadcrumbs, ShortWalkEntry, ShortWalkTable, WalkError};
use crate::graph::NodeId;
use crate::sim::{CostRecord, Network, Phase, Token, TokenKind};

/// Number of short walks started at a node of degree `degree`:
/// `ceil(eta * degree * log2 n)`.
pub fn eta_v(eta: f64, degree: usize, n: usize) -> usize {
    let raw = eta * degree as f64 * (n.max(2) as f64).log2();
    // Guard against 12.000000000000002 style rounding.
    (raw - 1e-9).ceil().max(0.0) as usize
}

/// Output of [`pre_processing`].
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub table: ShortWalkTable,
    pub cost: CostRecord,
    /// Rounds spent before the last walk token reached its destination.
    pub forward_rounds: u64,
}

/// Moves walk tokens one uniformly random hop per round until each has
/// taken `target_length` steps. Returns `(destination, token)` for every
/// walk, in retirement order.
pub(crate) fn forward_walks<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    starts: impl IntoIterator<Item = (NodeId, Token)>,
    crumbs: &mut Breadcrumbs,
    rng: &mut R,
) -> Result<Vec<(NodeId, Token)>, WalkError> {
    for (node, token) in starts {
        net.inject(node, token)?;
    }
    let graph = net.graph();
    let mut arrived = Vec::new();
    net.run_until_quiet(|node, tokens, out| {
        for &t in tokens {
            if t.counter == t.target_length {
                arrived.push((node, t));
                out.retire(t);
            } else {
                let nbrs = graph.neighbors(node);
                let i = rng.random_range(0..nbrs.len());
                let edge = graph.neighbor_edge_index(node, i).expect("slot within degree");
                crumbs.record(nbrs[i], t.walk_id, t.counter + 1, graph.reverse_edge(edge));
                out.send_to_neighbor(i, Token { counter: t.counter + 1, ..t });
            }
        }
    })?;
    Ok(arrived)
}

/// Sends each destination's identity back to the walk's source along the
/// recorded reverse path. Returns `(source, walk_id, destination)`.
pub(crate) fn return_along_breadcrumbs(
    net: &mut Network<'_>,
    arrivals: &[(NodeId, Token)],
    crumbs: &Breadcrumbs,
    kind: TokenKind,
) -> Result<Vec<(NodeId, u32, NodeId)>, WalkError> {
    for &(dest, t) in arrivals {
        let mut back = Token::new(kind, t.walk_id, t.source, t.target_length);
        back.payload_dest = Some(dest);
        net.inject(dest, back)?;
    }
    let mut delivered = Vec::with_capacity(arrivals.len());
    let mut missing = None;
    net.run_until_quiet(|node, tokens, out| {
        for &t in tokens {
            if t.counter == t.target_length {
                delivered.push((node, t.walk_id, t.payload_dest.expect("set at injection")));
                out.retire(t);
                continue;
            }
            match crumbs.back_edge(node, t.walk_id, t.target_length - t.counter) {
                Some(edge) => out.send_on_edge(edge, Token { counter: t.counter + 1, ..t }),
                None => {
                    missing.get_or_insert((node, t.walk_id));
                    out.retire(t);
                }
            }
        }
    })?;
    if let Some((node, walk)) = missing {
        return Err(WalkError::InvalidParameter(format!(
            "no reverse-path record for walk {walk} at node {node}"
        )));
    }
    Ok(delivered)
}

/// Builds a short-walk table: every node `v` starts `eta_v(eta, deg v, n)`
/// walks of length `lambda + r` with `r` uniform in `[0, lambda - 1]`,
/// forwards them hop by hop, then returns each destination to its source.
pub fn pre_processing<R: Rng + ?Sized>(
    net: &mut Network<'_>,
    eta: f64,
    lambda: u32,
    epoch: u64,
    rng: &mut R,
) -> Result<Preprocessed, WalkError> {
    if lambda == 0 {
        return Err(WalkError::InvalidParameter("lambda must be at least 1".into()));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(WalkError::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    if !net.is_idle() {
        return Err(crate::sim::SimError::Busy.into());
    }
    let graph = net.graph();
    let n = graph.node_count();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut entries = Vec::new();
    let mut starts = Vec::new();
    offsets.push(0);
    for v in graph.nodes() {
        for _ in 0..eta_v(eta, graph.degree(v), n) {
            let walk_id = u32::try_from(entries.len()).map_err(|_| {
                WalkError::InvalidParameter("more than 2^32 short walks requested".into())
            })?;
            let length = lambda
                .checked_add(rng.random_range(0..lambda))
                .ok_or_else(|| WalkError::InvalidParameter("lambda too large".into()))?;
            entries.push(ShortWalkEntry { walk_id, length, destination: NodeId::MAX, used: false });
            starts.push((v, Token::new(TokenKind::WalkExtend, walk_id, v, length)));
        }
        offsets.push(entries.len());
    }

    let before = net.cost();
    let mut crumbs = Breadcrumbs::new(entries.iter().map(|e| e.length));
    net.set_phase(Phase::PreprocessForward);
    let arrivals = forward_walks(net, starts, &mut crumbs, rng)?;
    let forward_rounds = (net.cost() - before).rounds.get(Phase::PreprocessForward);

    net.set_phase(Phase::PreprocessReturn);
    let delivered = return_along_breadcrumbs(net, &arrivals, &crumbs, TokenKind::DestReturn)?;
    for (at, walk_id, dest) in delivered {
        let entry = &mut entries[walk_id as usize];
        debug_assert_eq!(
            offsets.partition_point(|&o| o <= walk_id as usize) - 1,
            at as usize,
            "destination returned to the wrong node"
        );
        entry.destination = dest;
    }
    if let Some(e) = entries.iter().find(|e| e.destination == NodeId::MAX) {
        return Err(WalkError::InvalidParameter(format!(
            "walk {} never reported its destination",
            e.walk_id
        )));
    }

    let unused = (0..n).map(|v| (0..(offsets[v + 1] - offsets[v]) as u32).collect()).collect();
    let table = ShortWalkTable { lambda, epoch, offsets, entries, unused, used: 0 };
    Ok(Preprocessed { table, cost: net.cost() - before, forward_rounds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, GeneratorSpec, Graph};
    use crate::rng::{stream, Purpose};
    use crate::sim::Capacity;

    #[test]
    fn eta_v_rounds_up() {
        assert_eq!(eta_v(1.0, 3, 1024), 30);
        assert_eq!(eta_v(1.0, 4, 9), 13); // 4 * 3.17 = 12.68
        assert_eq!(eta_v(0.25, 1, 16), 1);
        assert_eq!(eta_v(1.0, 0, 16), 0);
    }

    #[test]
    fn lambda_one_gives_single_hops() {
        let g = generate(&GeneratorSpec::new(Family::Grid, 16, 0)).unwrap().graph;
        let eta = 1.0 / (g.max_degree() as f64 * 4.0);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(3, Purpose::Preprocess, &[]);
        let pre = pre_processing(&mut net, eta, 1, 0, &mut rng).unwrap();
        assert_eq!(pre.table.total(), g.node_count());
        for v in g.nodes() {
            let e = pre.table.entries(v);
            assert_eq!(e.len(), 1);
            assert_eq!(e[0].length, 1);
            assert!(g.has_edge(v, e[0].destination));
        }
        // one hop out, one hop back
        assert_eq!(pre.cost.messages.preprocessing(), 2 * g.node_count() as u64);
    }

    #[test]
    fn lengths_stay_in_range_and_counts_match() {
        let g = Graph::complete(5);
        let mut net = Network::new(&g, Capacity::Unbounded).unwrap();
        let mut rng = stream(4, Purpose::Preprocess, &[]);
        let pre = pre_processing(&mut net, 1.0, 4, 0, &mut rng).unwrap();
        for v in g.nodes() {
            assert_eq!(pre.table.entries(v).len(), eta_v(1.0, 4, 5));
        }
        assert!(pre.table.all_entries().iter().all(|e| (4..=7).contains(&e.length)));
        assert_eq!(pre.forward_rounds, 4 + pre.table.r_max() as u64);
        assert!(pre.forward_rounds <= 7);
        let steps: u64 = pre.table.all_entries().iter().map(|e| e.length as u64).sum();
        assert_eq!(pre.cost.messages.get(Phase::PreprocessForward), steps);
        assert_eq!(pre.cost.messages.get(Phase::PreprocessReturn), steps);
        assert!(net.is_idle());
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = Graph::cycle(4);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut rng = stream(1, Purpose::Preprocess, &[]);
        assert!(pre_processing(&mut net, 1.0, 0, 0, &mut rng).is_err());
        assert!(pre_processing(&mut net, 0.0, 2, 0, &mut rng).is_err());
        assert!(pre_processing(&mut net, f64::NAN, 2, 0, &mut rng).is_err());
    }

    #[test]
    fn congestion_only_adds_rounds() {
        let g = generate(&GeneratorSpec::new(Family::PowerLaw, 60, 2)).unwrap().graph;
        let mut ideal = Network::new(&g, Capacity::Unbounded).unwrap();
        let mut tight = Network::new(&g, Capacity::Limited(1)).unwrap();
        let a = pre_processing(&mut ideal, 1.0, 5, 0, &mut stream(9, Purpose::Preprocess, &[]))
            .unwrap();
        let b = pre_processing(&mut tight, 1.0, 5, 0, &mut stream(9, Purpose::Preprocess, &[]))
            .unwrap();
        assert_eq!(a.cost.messages, b.cost.messages);
        assert!(b.cost.total_rounds() > a.cost.total_rounds());
    }
}
