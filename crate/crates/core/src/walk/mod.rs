//! Walk algorithms running on the [`Network`](crate::sim::Network) kernel:
//! the naive token walk, short-walk pre-processing, stitched single walks,
//! continuous serving and doubling tables.

pub mod continuous;
pub mod doubling;
mod naive;
mod preprocess;
mod single;

use std::fmt;
use std::io::Write;

use rand::Rng;
use thiserror::Error;

use crate::graph::NodeId;
use crate::sim::{CostRecord, SimError};

pub use naive::naive_walk;
pub use preprocess::{eta_v, pre_processing, Preprocessed};
pub use single::{single_random_walk, single_random_walk_with};

#[derive(Debug, Error)]
pub enum WalkError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("walk length {requested} exceeds the largest supported length {max}")]
    LengthOutOfRange { requested: u32, max: u32 },
    #[error("request from {source_node} failed on {attempts} consecutive fresh tables")]
    RebuildLimit { source_node: NodeId, attempts: u32 },
}

/// How the short-walk length is chosen from the request length `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaRule {
    /// `ceil(factor * sqrt(l))`; `factor = 1` is the experimental default.
    SqrtLength(f64),
    /// `ceil(24 sqrt(l D) (log2 n)^3)`, the asymptotic choice.
    Theory,
    /// `ceil(log2 n)`.
    LogN,
    Fixed(u32),
}

impl Default for LambdaRule {
    fn default() -> Self {
        LambdaRule::SqrtLength(1.0)
    }
}

impl LambdaRule {
    /// Resolves to a short-walk length of at least one.
    pub fn resolve(self, length: u32, n: usize, diameter: u32) -> u32 {
        let log_n = (n.max(2) as f64).log2();
        let raw = match self {
            LambdaRule::SqrtLength(f) => (f * (length as f64).sqrt()).ceil(),
            LambdaRule::Theory => {
                (24.0 * (length as f64 * diameter as f64).sqrt() * log_n.powi(3)).ceil()
            }
            LambdaRule::LogN => log_n.ceil(),
            LambdaRule::Fixed(v) => v as f64,
        };
        raw.clamp(1.0, u32::MAX as f64) as u32
    }
}

impl fmt::Display for LambdaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaRule::SqrtLength(x) => write!(f, "{x}*sqrt(l)"),
            LambdaRule::Theory => f.write_str("theory"),
            LambdaRule::LogN => f.write_str("log n"),
            LambdaRule::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl std::str::FromStr for LambdaRule {
    type Err = WalkError;

    /// Accepts `sqrt`, `<factor>*sqrt`, `theory`, `logn` or a plain integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase().replace(' ', "");
        let bad = || WalkError::InvalidParameter(format!("unrecognized lambda {s:?}"));
        match t.as_str() {
            "sqrt" | "sqrt(l)" => return Ok(LambdaRule::SqrtLength(1.0)),
            "theory" => return Ok(LambdaRule::Theory),
            "logn" | "log" => return Ok(LambdaRule::LogN),
            _ => {}
        }
        if let Some(factor) = t.strip_suffix("*sqrt(l)").or_else(|| t.strip_suffix("*sqrt")) {
            let f: f64 = factor.parse().map_err(|_| bad())?;
            if f > 0.0 {
                return Ok(LambdaRule::SqrtLength(f));
            }
            return Err(bad());
        }
        match t.parse::<u32>() {
            Ok(v) if v > 0 => Ok(LambdaRule::Fixed(v)),
            _ => Err(bad()),
        }
    }
}

/// One pre-processed short walk, stored at its source node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShortWalkEntry {
    pub walk_id: u32,
    /// `lambda + r` with `r` in `[0, lambda - 1]`.
    pub length: u32,
    pub destination: NodeId,
    pub used: bool,
}

/// Per-node inventory of short walks built by one pre-processing run.
///
/// Walk ids are dense: node `v`'s entries occupy ids
/// `offsets[v]..offsets[v + 1]`.
#[derive(Debug, Clone)]
pub struct ShortWalkTable {
    lambda: u32,
    epoch: u64,
    offsets: Vec<usize>,
    entries: Vec<ShortWalkEntry>,
    // Local indices of still-unused entries, per node, in arbitrary order.
    unused: Vec<Vec<u32>>,
    used: usize,
}

impl ShortWalkTable {
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total(&self) -> usize {
        self.entries.len()
    }

    pub fn used(&self) -> usize {
        self.used
    }

    /// Fraction of entries consumed so far.
    pub fn kappa(&self) -> f64 {
        if self.entries.is_empty() {
            0.0
        } else {
            self.used as f64 / self.entries.len() as f64
        }
    }

    pub fn entries(&self, v: NodeId) -> &[ShortWalkEntry] {
        &self.entries[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn entry(&self, walk_id: u32) -> &ShortWalkEntry {
        &self.entries[walk_id as usize]
    }

    pub fn all_entries(&self) -> &[ShortWalkEntry] {
        &self.entries
    }

    /// Node that owns (started) the given walk.
    pub fn owner(&self, walk_id: u32) -> NodeId {
        (self.offsets.partition_point(|&o| o <= walk_id as usize) - 1) as NodeId
    }

    pub fn unused_count(&self, v: NodeId) -> usize {
        self.unused[v as usize].len()
    }

    /// Largest `r` over all entries (`length - lambda`).
    pub fn r_max(&self) -> u32 {
        self.entries.iter().map(|e| e.length - self.lambda).max().unwrap_or(0)
    }

    /// Picks one of `v`'s unused entries uniformly at random and marks it
    /// used. `None` once `v` has run out.
    pub fn take_random_unused<R: Rng + ?Sized>(
        &mut self,
        v: NodeId,
        rng: &mut R,
    ) -> Option<ShortWalkEntry> {
        let pool = &mut self.unused[v as usize];
        if pool.is_empty() {
            return None;
        }
        let local = pool.swap_remove(rng.random_range(0..pool.len()));
        let entry = &mut self.entries[self.offsets[v as usize] + local as usize];
        assert!(!entry.used, "walk {} handed out twice", entry.walk_id);
        entry.used = true;
        self.used += 1;
        Some(*entry)
    }

    /// Debug dump: a `node <v>` header per node followed by one
    /// `walk_id length dest used` line per entry.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for v in 0..self.node_count() {
            writeln!(out, "node {v}")?;
            for e in self.entries(v as NodeId) {
                writeln!(out, "{} {} {} {}", e.walk_id, e.length, e.destination, u8::from(e.used))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkStatus {
    Ok,
    FailedNeedsRebuild,
}

impl fmt::Display for WalkStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkStatus::Ok => "ok",
            WalkStatus::FailedNeedsRebuild => "failed-needs-rebuild",
        })
    }
}

/// Outcome of one walk request.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkResult {
    pub source: NodeId,
    pub length: u32,
    /// `None` when the request failed.
    pub destination: Option<NodeId>,
    /// The source followed by the endpoint of every stitched short walk.
    pub connectors: Vec<NodeId>,
    /// `(walk_id, length)` of every consumed short walk, in order.
    pub stitched: Vec<(u32, u32)>,
    pub tail_steps: u32,
    pub cost: CostRecord,
    pub status: WalkStatus,
}

impl WalkResult {
    pub fn is_ok(&self) -> bool {
        self.status == WalkStatus::Ok
    }

    pub fn stitches(&self) -> usize {
        self.stitched.len()
    }

    /// Steps covered by stitched walks plus the naive tail.
    pub fn walked_steps(&self) -> u64 {
        self.stitched.iter().map(|&(_, l)| l as u64).sum::<u64>() + self.tail_steps as u64
    }
}

/// Reverse-path records left behind by forwarded walk tokens: node `x`
/// remembers, for each `(walk_id, step)` at which a token arrived, the
/// edge back to the neighbor it came from.
///
/// Records are laid out by walk rather than by node so a lookup is a single
/// index, but every lookup still checks that the asking node is the one that
/// holds the record. Walk ids must be dense from zero.
#[derive(Debug, Default)]
pub(crate) struct Breadcrumbs {
    offsets: Vec<usize>,
    /// `(holder, directed edge back)` for steps `1..=length` of each walk.
    hops: Vec<(NodeId, usize)>,
}

impl Breadcrumbs {
    /// Room for walks `0..lengths.len()` with the given lengths.
    pub(crate) fn new(lengths: impl IntoIterator<Item = u32>) -> Self {
        let mut offsets = vec![0];
        for l in lengths {
            offsets.push(offsets.last().expect("nonempty") + l as usize);
        }
        let total = *offsets.last().expect("nonempty");
        Self { offsets, hops: vec![(NodeId::MAX, usize::MAX); total] }
    }

    fn slot(&self, walk_id: u32, step: u32) -> Option<usize> {
        let w = walk_id as usize;
        let (lo, hi) = (*self.offsets.get(w)?, *self.offsets.get(w + 1)?);
        let i = lo + (step as usize).checked_sub(1)?;
        (i < hi).then_some(i)
    }

    pub(crate) fn record(&mut self, at: NodeId, walk_id: u32, step: u32, back: usize) {
        let i = self.slot(walk_id, step).expect("breadcrumb outside the declared walk");
        self.hops[i] = (at, back);
    }

    pub(crate) fn back_edge(&self, at: NodeId, walk_id: u32, step: u32) -> Option<usize> {
        let (holder, back) = self.hops[self.slot(walk_id, step)?];
        (holder == at).then_some(back)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_rules_resolve() {
        assert_eq!(LambdaRule::SqrtLength(1.0).resolve(1000, 1000, 5), 32);
        assert_eq!(LambdaRule::SqrtLength(0.25).resolve(1000, 1000, 5), 8);
        assert_eq!(LambdaRule::SqrtLength(1.0).resolve(16, 10, 3), 4);
        assert_eq!(LambdaRule::LogN.resolve(5, 1000, 5), 10);
        assert_eq!(LambdaRule::Fixed(7).resolve(5, 1000, 5), 7);
        // 24 * sqrt(1000 * 5) * (log2 1000)^3 is far above l at this scale
        assert!(LambdaRule::Theory.resolve(1000, 1000, 5) > 1_000_000);
        assert_eq!(LambdaRule::SqrtLength(1e-9).resolve(1, 10, 1), 1);
    }

    #[test]
    fn lambda_rules_parse() {
        assert_eq!("sqrt".parse::<LambdaRule>().unwrap(), LambdaRule::SqrtLength(1.0));
        assert_eq!("0.25*sqrt".parse::<LambdaRule>().unwrap(), LambdaRule::SqrtLength(0.25));
        assert_eq!("theory".parse::<LambdaRule>().unwrap(), LambdaRule::Theory);
        assert_eq!("12".parse::<LambdaRule>().unwrap(), LambdaRule::Fixed(12));
        assert!("0".parse::<LambdaRule>().is_err());
        assert!("fast".parse::<LambdaRule>().is_err());
    }

    #[test]
    fn breadcrumbs_lookup() {
        let mut b = Breadcrumbs::new([2, 1, 2]);
        b.record(1, 2, 2, 0);
        b.record(1, 1, 1, 2);
        b.record(2, 2, 1, 1);
        assert_eq!(b.back_edge(1, 2, 2), Some(0));
        assert_eq!(b.back_edge(2, 2, 1), Some(1));
        assert_eq!(b.back_edge(1, 1, 1), Some(2));
        assert_eq!(b.back_edge(1, 2, 3), None);
        assert_eq!(b.back_edge(0, 2, 2), None);
        assert_eq!(b.back_edge(1, 0, 1), None);
        assert_eq!(b.back_edge(1, 9, 1), None);
    }
}
