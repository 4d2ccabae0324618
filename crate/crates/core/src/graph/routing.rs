use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::{bfs_distances, bfs_parents, diameter, Graph, GraphError, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoutingMode {
    /// A single BFS tree rooted at node 0; routes follow tree paths.
    BfsTree,
    /// Next hops along shortest paths to every destination.
    #[default]
    ShortestPath,
}

impl fmt::Display for RoutingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RoutingMode::BfsTree => "bfs-tree",
            RoutingMode::ShortestPath => "shortest-path",
        })
    }
}

impl FromStr for RoutingMode {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bfs-tree" | "bfs" | "tree" => Ok(RoutingMode::BfsTree),
            "shortest-path" | "sp" | "shortest" => Ok(RoutingMode::ShortestPath),
            other => Err(GraphError::InvalidParameter(format!("unknown routing mode {other:?}"))),
        }
    }
}

#[derive(Debug)]
enum Tables {
    Tree { root: NodeId, parent: Vec<NodeId>, depth: Vec<u32> },
    // Per-destination BFS parent arrays, filled on first use. Entry `u` of
    // the array for `w` is the next hop from `u` toward `w`.
    Shortest { toward: Vec<OnceLock<Box<[NodeId]>>> },
}

/// Hop-by-hop routing knowledge available to nodes when stitching.
///
/// Immutable once built; the shortest-path tables are materialized lazily
/// per destination behind `OnceLock`, so the oracle can be shared across
/// threads.
#[derive(Debug)]
pub struct RoutingOracle {
    graph: Graph,
    diameter: u32,
    tables: Tables,
}

pub fn build_routing(g: &Graph, mode: RoutingMode) -> RoutingOracle {
    RoutingOracle::new(g, mode)
}

impl RoutingOracle {
    pub fn new(g: &Graph, mode: RoutingMode) -> Self {
        Self::with_diameter(g, mode, diameter(g))
    }

    /// Builds the oracle with a precomputed diameter.
    pub fn with_diameter(g: &Graph, mode: RoutingMode, diameter: u32) -> Self {
        let tables = match mode {
            RoutingMode::BfsTree => {
                let root = 0;
                let parent = bfs_parents(g, root);
                let depth = bfs_distances(g, root);
                Tables::Tree { root, parent, depth }
            }
            RoutingMode::ShortestPath => {
                Tables::Shortest { toward: (0..g.node_count()).map(|_| OnceLock::new()).collect() }
            }
        };
        Self { graph: g.clone(), diameter, tables }
    }

    pub fn mode(&self) -> RoutingMode {
        match self.tables {
            Tables::Tree { .. } => RoutingMode::BfsTree,
            Tables::Shortest { .. } => RoutingMode::ShortestPath,
        }
    }

    pub fn diameter(&self) -> u32 {
        self.diameter
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// Root and parent array in tree mode.
    pub fn tree(&self) -> Option<(NodeId, &[NodeId])> {
        match &self.tables {
            Tables::Tree { root, parent, .. } => Some((*root, parent)),
            Tables::Shortest { .. } => None,
        }
    }

    /// Next node on the route from `from` to `to`, `None` once arrived.
    pub fn next_hop(&self, from: NodeId, to: NodeId) -> Option<NodeId> {
        if from == to {
            return None;
        }
        match &self.tables {
            Tables::Shortest { toward } => {
                let table = toward[to as usize]
                    .get_or_init(|| bfs_parents(&self.graph, to).into_boxed_slice());
                Some(table[from as usize])
            }
            Tables::Tree { parent, depth, .. } => {
                // Descend if `from` is an ancestor of `to`, otherwise climb.
                let mut w = to;
                if depth[w as usize] <= depth[from as usize] {
                    return Some(parent[from as usize]);
                }
                while depth[w as usize] > depth[from as usize] + 1 {
                    w = parent[w as usize];
                }
                if parent[w as usize] == from {
                    Some(w)
                } else {
                    Some(parent[from as usize])
                }
            }
        }
    }

    /// Full route including both endpoints.
    pub fn path(&self, from: NodeId, to: NodeId) -> Vec<NodeId> {
        let mut path = vec![from];
        let mut at = from;
        while let Some(next) = self.next_hop(at, to) {
            path.push(next);
            at = next;
        }
        path
    }

    /// Number of hops a routed message takes from `from` to `to`.
    pub fn route_length(&self, from: NodeId, to: NodeId) -> u32 {
        self.path(from, to).len() as u32 - 1
    }
}
