//! Undirected graphs, generators, routing and BFS utilities.

mod generate;
mod io;
mod routing;

use std::collections::VecDeque;

use rand::Rng;
use thiserror::Error;

pub use generate::{generate, Family, Generated, GeneratorMeta, GeneratorSpec};
pub use io::{read_edge_list, write_edge_list};
pub use routing::{build_routing, RoutingMode, RoutingOracle};

pub type NodeId = u32;

/// Above this size [`diameter`] switches from exact all-pairs BFS to the
/// double-sweep lower bound.
pub const EXACT_DIAMETER_LIMIT: usize = 100_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("could not produce a connected graph: {0}")]
    ConnectivityUnachievable(String),
    #[error("graph invariant violated: {0}")]
    InvariantViolated(String),
    #[error("malformed edge list at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Simple undirected graph in compressed adjacency form.
///
/// Neighbor lists are sorted ascending, which gives every directed edge
/// `(u, v)` a stable index `offset(u) + position of v in u's list`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    // Owner of each directed-edge slot, used for O(1) degree-biased draws.
    sources: Vec<NodeId>,
    // Index of the opposite orientation of each directed edge.
    reverse: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Duplicate edges (in either orientation)
    /// are collapsed; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n > NodeId::MAX as usize {
            return Err(GraphError::InvalidParameter(format!("{n} nodes exceeds id space")));
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(GraphError::InvalidParameter(format!("self-loop at {u}")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::new();
        let mut sources = Vec::new();
        offsets.push(0);
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            sources.resize(sources.len() + list.len(), u as NodeId);
            offsets.push(neighbors.len());
        }
        let reverse = (0..neighbors.len())
            .map(|e| {
                let (u, v) = (sources[e], neighbors[e] as usize);
                let list = &neighbors[offsets[v]..offsets[v + 1]];
                offsets[v] + list.binary_search(&u).expect("adjacency is symmetric")
            })
            .collect();
        Ok(Self { offsets, neighbors, sources, reverse })
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn directed_edge_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    /// Undirected edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.directed_edge_index(u, v).is_some()
    }

    /// Index of the directed edge `u -> v` in `0..directed_edge_count()`.
    /// Index of the directed edge from `u` to its `i`-th neighbor.
    pub fn neighbor_edge_index(&self, u: NodeId, i: usize) -> Option<usize> {
        (i < self.degree(u)).then(|| self.offsets[u as usize] + i)
    }

    pub fn directed_edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        if u as usize >= self.node_count() {
            return None;
        }
        self.neighbors(u).binary_search(&v).ok().map(|i| self.offsets[u as usize] + i)
    }

    /// Endpoints `(from, to)` of a directed edge index.
    pub fn directed_edge(&self, index: usize) -> (NodeId, NodeId) {
        (self.sources[index], self.neighbors[index])
    }

    /// Index of `(v, u)` given the index of `(u, v)`.
    pub fn reverse_edge(&self, index: usize) -> usize {
        self.reverse[index]
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Connected components as a per-node component label plus component sizes.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0;
            label[start] = id;
            queue.push_back(start as NodeId);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if label[v as usize] == usize::MAX {
                        label[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    pub fn is_connected(&self) -> bool {
        self.node_count() > 0 && self.components().1.len() == 1
    }

    /// Checks symmetry, absence of self-loops and duplicates, the handshake
    /// identity and connectivity.
    pub fn check_invariants(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvariantViolated(msg));
        if self.node_count() < 2 {
            return bad("fewer than two nodes".into());
        }
        let mut degree_sum = 0;
        for u in self.nodes() {
            let list = self.neighbors(u);
            degree_sum += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return bad(format!("neighbor list of {u} is not strictly increasing"));
                }
            }
            for &v in list {
                if v == u {
                    return bad(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return bad(format!("edge {u}->{v} has no reverse"));
                }
            }
        }
        if degree_sum != 2 * self.edge_count() {
            return bad("edge count is not half the degree sum".into());
        }
        if !self.is_connected() {
            return bad("graph is disconnected".into());
        }
        Ok(())
    }

    /// Subgraph induced by the largest connected component, with nodes
    /// renumbered in increasing order of their old identities.
    pub fn largest_component(&self) -> Graph {
        let (label, sizes) = self.components();
        let Some((best, _)) = sizes.iter().enumerate().max_by_key(|&(i, s)| (*s, usize::MAX - i))
        else {
            return self.clone();
        };
        let mut remap = vec![NodeId::MAX; self.node_count()];
        let mut next = 0;
        for v in 0..self.node_count() {
            if label[v] == best {
                remap[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges()
            .filter(|&(u, _)| label[u as usize] == best)
            .map(|(u, v)| (remap[u as usize], remap[v as usize]));
        Graph::from_edges(next as usize, edges).expect("induced subgraph is well formed")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n as NodeId).map(|v| (v - 1, v))).expect("path")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least three nodes");
        Graph::from_edges(n, (0..n as NodeId).map(|v| (v, (v + 1) % n as NodeId))).expect("cycle")
    }

    /// Star with node 0 at the center and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves as NodeId).map(|v| (0, v))).expect("star")
    }

    pub fn complete(n: usize) -> Graph {
        let n32 = n as NodeId;
        Graph::from_edges(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v))))
            .expect("complete")
    }
}

/// Hop distances from `source`; unreachable nodes get `u32::MAX`.
pub fn bfs_distances(g: &Graph, source: NodeId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    let mut queue = VecDeque::with_capacity(g.node_count());
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize] + 1;
        for &v in g.neighbors(u) {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = d;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// BFS parent pointers toward `root` (the root is its own parent).
pub fn bfs_parents(g: &Graph, root: NodeId) -> Vec<NodeId> {
    let mut parent = vec![NodeId::MAX; g.node_count()];
    let mut queue = VecDeque::with_capacity(g.node_count());
    parent[root as usize] = root;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if parent[v as usize] == NodeId::MAX {
                parent[v as usize] = u;
                queue.push_back(v);
            }
        }
    }
    parent
}

pub fn eccentricity(g: &Graph, v: NodeId) -> u32 {
    bfs_distances(g, v).into_iter().max().unwrap_or(0)
}

/// Diameter of a connected graph. Exact (BFS from every node) up to
/// [`EXACT_DIAMETER_LIMIT`] nodes, double-sweep lower bound beyond.
pub fn diameter(g: &Graph) -> u32 {
    if g.node_count() <= EXACT_DIAMETER_LIMIT {
        diameter_exact(g)
    } else {
        diameter_double_sweep(g)
    }
}

pub fn diameter_exact(g: &Graph) -> u32 {
    g.nodes().map(|v| eccentricity(g, v)).max().unwrap_or(0)
}

/// Double-sweep estimate: BFS from node 0, then BFS from the farthest node
/// found. Exact on trees, a lower bound in general.
pub fn diameter_double_sweep(g: &Graph) -> u32 {
    if g.node_count() == 0 {
        return 0;
    }
    let first = bfs_distances(g, 0);
    let far = first
        .iter()
        .enumerate()
        .max_by_key(|&(i, d)| (*d, std::cmp::Reverse(i)))
        .map(|(i, _)| i as NodeId)
        .unwrap_or(0);
    eccentricity(g, far)
}

/// Draws a node with probability `deg(v) / 2m`.
pub fn sample_source_by_degree<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> NodeId {
    let slot = rng.random_range(0..g.directed_edge_count());
    g.sources[slot]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn grid3() -> Graph {
        generate(&GeneratorSpec::new(Family::Grid, 9, 0)).unwrap().graph
    }

    #[test]
    fn from_edges_collapses_duplicates_and_rejects_loops() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn directed_edge_indices_round_trip() {
        let g = grid3();
        for idx in 0..g.directed_edge_count() {
            let (u, v) = g.directed_edge(idx);
            assert_eq!(g.directed_edge_index(u, v), Some(idx));
        }
        assert_eq!(g.directed_edge_index(0, 8), None);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&Graph::complete(5)), 1);
        assert_eq!(diameter(&grid3()), 4);
        assert_eq!(diameter(&Graph::path(7)), 6);
    }

    #[test]
    fn double_sweep_is_exact_on_trees_and_cycles() {
        for g in [Graph::path(9), Graph::star(6), Graph::cycle(7), Graph::cycle(10)] {
            assert_eq!(diameter_double_sweep(&g), diameter_exact(&g));
        }
        // a small non-path tree
        let t =
            Graph::from_edges(8, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (0, 6), (6, 7)]).unwrap();
        assert_eq!(diameter_double_sweep(&t), diameter_exact(&t));
    }

    #[test]
    fn invariants_detect_disconnection() {
        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(g.check_invariants(), Err(GraphError::InvariantViolated(_))));
        let big = g.largest_component();
        assert_eq!(big.node_count(), 2);
        big.check_invariants().unwrap();
    }

    #[test]
    fn degree_sampling_on_regular_and_star() {
        let mut rng = stream(1, Purpose::Sources, &[]);
        let k5 = Graph::complete(5);
        let mut counts = [0usize; 5];
        for _ in 0..50_000 {
            counts[sample_source_by_degree(&k5, &mut rng) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 50_000.0 - 0.2).abs() < 0.01);
        }
        let star = Graph::star(4);
        let center = (0..40_000).filter(|_| sample_source_by_degree(&star, &mut rng) == 0).count();
        assert!((center as f64 / 40_000.0 - 0.5).abs() < 0.01);
    }
}
