//! Distributed random-walk sampling on a synchronous, bandwidth-limited
//! network simulator.
//!
//! The crate is organized bottom-up:
//!
//! * [`graph`]: graph storage, the five generator families, BFS/diameter
//!   utilities, routing oracles and degree-proportional source sampling.
//! * [`sim`]: the round-based message-passing kernel with per-edge
//!   capacity and per-phase round/message accounting.
//! * [`walk`]: the naive token walk, short-walk pre-processing, stitched
//!   single walks, continuous serving and the doubling-table extension.
//! * [`stats`]: exact walk distributions and distance measures used as
//!   ground truth.
//! * [`experiments`]: parameter sweeps, replication and reporting.

pub mod experiments;
pub mod graph;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod walk;

pub use graph::{
    diameter, generate, sample_source_by_degree, Family, Generated, GeneratorMeta, GeneratorSpec,
    Graph, GraphError, NodeId, RoutingMode, RoutingOracle,
};
pub use sim::{Capacity, CostRecord, Network, Phase, SimError, Token, TokenKind};
pub use stats::{exact_walk_distribution, tv_distance, DistributionVector, StatsError};
pub use walk::{
    continuous::{ContinuousConfig, ContinuousWalker, EpochRecord},
    naive_walk, pre_processing, single_random_walk, LambdaRule, ShortWalkEntry, ShortWalkTable,
    WalkError, WalkResult, WalkStatus,
};
