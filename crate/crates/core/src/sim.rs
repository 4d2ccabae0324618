//! Synchronous round-based message passing with per-edge bandwidth.
//!
//! A round has two halves. First every node holding freshly delivered
//! tokens runs the handler, which forwards, spawns or retires them. Then
//! each directed edge transmits at most `c` tokens from its FIFO queue;
//! anything beyond capacity waits for a later round. Rounds in which
//! nothing crosses an edge are not counted.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::io::Write;
use std::ops::{Add, AddAssign, Sub};

use thiserror::Error;

use crate::graph::{Graph, NodeId, RoutingOracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    WalkExtend,
    DestReturn,
    StitchMove,
    NaiveStep,
    NaiveReturn,
}

impl TokenKind {
    pub fn name(self) -> &'static str {
        match self {
            TokenKind::WalkExtend => "walk-extend",
            TokenKind::DestReturn => "dest-return",
            TokenKind::StitchMove => "stitch-move",
            TokenKind::NaiveStep => "naive-step",
            TokenKind::NaiveReturn => "naive-return",
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A bounded-size message: identities and counters only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub walk_id: u32,
    pub source: NodeId,
    pub counter: u32,
    pub target_length: u32,
    pub payload_dest: Option<NodeId>,
}

impl Token {
    pub fn new(kind: TokenKind, walk_id: u32, source: NodeId, target_length: u32) -> Self {
        Self { kind, walk_id, source, counter: 0, target_length, payload_dest: None }
    }

    fn check(&self) -> Result<(), SimError> {
        if self.counter > self.target_length {
            return Err(SimError::MalformedToken {
                walk_id: self.walk_id,
                counter: self.counter,
                target_length: self.target_length,
            });
        }
        Ok(())
    }
}

/// Accounting bucket for rounds and messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    PreprocessForward,
    PreprocessReturn,
    Stitch,
    NaiveTail,
    NaiveBaseline,
}

impl Phase {
    pub const ALL: [Phase; 5] = [
        Phase::PreprocessForward,
        Phase::PreprocessReturn,
        Phase::Stitch,
        Phase::NaiveTail,
        Phase::NaiveBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Phase::PreprocessForward => "preprocess-forward",
            Phase::PreprocessReturn => "preprocess-return",
            Phase::Stitch => "stitch",
            Phase::NaiveTail => "naive-tail",
            Phase::NaiveBaseline => "naive-baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseCounts([u64; 5]);

impl PhaseCounts {
    pub fn get(&self, phase: Phase) -> u64 {
        self.0[phase as usize]
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn preprocessing(&self) -> u64 {
        self.get(Phase::PreprocessForward) + self.get(Phase::PreprocessReturn)
    }

    fn bump(&mut self, phase: Phase, by: u64) {
        self.0[phase as usize] += by;
    }
}

impl Add for PhaseCounts {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for PhaseCounts {
    fn add_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Sub for PhaseCounts {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a -= b;
        }
        self
    }
}

/// Rounds and messages, broken down by phase. Totals are always the sum of
/// the breakdown.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CostRecord {
    pub rounds: PhaseCounts,
    pub messages: PhaseCounts,
}

impl CostRecord {
    pub fn total_rounds(&self) -> u64 {
        self.rounds.total()
    }

    pub fn total_messages(&self) -> u64 {
        self.messages.total()
    }
}

impl Add for CostRecord {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self { rounds: self.rounds + rhs.rounds, messages: self.messages + rhs.messages }
    }
}

impl AddAssign for CostRecord {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for CostRecord {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self { rounds: self.rounds - rhs.rounds, messages: self.messages - rhs.messages }
    }
}

/// Tokens per directed edge per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Limited(u32),
    Unbounded,
}

impl Default for Capacity {
    fn default() -> Self {
        Capacity::Limited(1)
    }
}

impl Capacity {
    fn per_round(self) -> usize {
        match self {
            Capacity::Limited(c) => c as usize,
            Capacity::Unbounded => usize::MAX,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Limited(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl std::str::FromStr for Capacity {
    type Err = SimError;

    /// Accepts a positive integer or `unbounded` (alias `inf`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "unbounded" | "inf" => Ok(Capacity::Unbounded),
            v => match v.parse::<u32>() {
                Ok(0) => Err(SimError::ZeroCapacity),
                Ok(c) => Ok(Capacity::Limited(c)),
                Err(_) => Err(SimError::InvalidCapacity(s.to_string())),
            },
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("capacity must be a positive integer or `unbounded`, got {0:?}")]
    InvalidCapacity(String),
    #[error("token of walk {walk_id} has counter {counter} beyond target length {target_length}")]
    MalformedToken { walk_id: u32, counter: u32, target_length: u32 },
    #[error("node {from} sent to non-neighbor {to}")]
    NotAdjacent { from: NodeId, to: NodeId },
    #[error("node {node} received {delivered} token(s) but accounted for {accounted}")]
    TokenConservation { node: NodeId, delivered: usize, accounted: usize },
    #[error("no route from {from} to {to}")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("capacity must be at least one token per round")]
    ZeroCapacity,
    #[error("network is not idle")]
    Busy,
}

/// One token crossing one directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub round: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub kind: TokenKind,
    pub walk_id: u32,
}

#[derive(Debug, Clone, Copy)]
enum Hop {
    Node(NodeId),
    Slot(usize),
    Edge(usize),
}

/// Collects what a node does with the tokens it was handed this round.
#[derive(Debug)]
pub struct Outbox {
    node: NodeId,
    sends: Vec<(Hop, Token)>,
    forwarded: usize,
    spawned: usize,
    retired: usize,
}

impl Outbox {
    pub fn node(&self) -> NodeId {
        self.node
    }

    /// Forwards a token this node received.
    pub fn send(&mut self, to: NodeId, token: Token) {
        self.forwarded += 1;
        self.sends.push((Hop::Node(to), token));
    }

    /// Forwards a token to this node's `i`-th neighbor, in the order of
    /// [`Graph::neighbors`].
    pub fn send_to_neighbor(&mut self, i: usize, token: Token) {
        self.forwarded += 1;
        self.sends.push((Hop::Slot(i), token));
    }

    /// Forwards a token over the directed edge with index `edge`, which must
    /// leave this node.
    pub fn send_on_edge(&mut self, edge: usize, token: Token) {
        self.forwarded += 1;
        self.sends.push((Hop::Edge(edge), token));
    }

    /// Sends a token created at this node.
    pub fn spawn(&mut self, to: NodeId, token: Token) {
        self.spawned += 1;
        self.sends.push((Hop::Node(to), token));
    }

    /// Consumes a received token; it travels no further.
    pub fn retire(&mut self, _token: Token) {
        self.retired += 1;
    }
}

/// Simulation state: round clock, per-directed-edge queues and counters.
pub struct Network<'g> {
    graph: &'g Graph,
    capacity: Capacity,
    phase: Phase,
    round: u64,
    cost: CostRecord,
    queues: Vec<VecDeque<Token>>,
    active_edges: Vec<usize>,
    inbox: Vec<Vec<Token>>,
    pending: Vec<NodeId>,
    // Edges that received tokens this round, with their queue length before.
    touched: Vec<(usize, usize)>,
    touch_stamp: Vec<u64>,
    // Scratch buffers reused across rounds.
    sends: Vec<(Hop, Token)>,
    still_active: Vec<usize>,
    merged: Vec<usize>,
    injected: u64,
    retired: u64,
    log: Option<Vec<Delivery>>,
}

impl<'g> Network<'g> {
    pub fn new(graph: &'g Graph, capacity: Capacity) -> Result<Self, SimError> {
        if capacity == Capacity::Limited(0) {
            return Err(SimError::ZeroCapacity);
        }
        Ok(Self {
            graph,
            capacity,
            phase: Phase::NaiveBaseline,
            round: 0,
            cost: CostRecord::default(),
            queues: vec![VecDeque::new(); graph.directed_edge_count()],
            active_edges: Vec::new(),
            inbox: vec![Vec::new(); graph.node_count()],
            pending: Vec::new(),
            touched: Vec::new(),
            touch_stamp: vec![0; graph.directed_edge_count()],
            sends: Vec::new(),
            still_active: Vec::new(),
            merged: Vec::new(),
            injected: 0,
            retired: 0,
            log: None,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Cumulative cost since construction.
    pub fn cost(&self) -> CostRecord {
        self.cost
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Rounds and messages from now on are charged to `phase`.
    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    /// Starts recording every delivery for later audits.
    pub fn enable_log(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn log(&self) -> Option<&[Delivery]> {
        self.log.as_deref()
    }

    pub fn take_log(&mut self) -> Option<Vec<Delivery>> {
        self.log.take()
    }

    /// Tokens created (injected or spawned) and retired so far.
    pub fn token_balance(&self) -> (u64, u64) {
        (self.injected, self.retired)
    }

    pub fn is_idle(&self) -> bool {
        self.pending.is_empty() && self.active_edges.is_empty()
    }

    /// Places a new token at `node`; it is handed to the handler on the next
    /// round.
    pub fn inject(&mut self, node: NodeId, token: Token) -> Result<(), SimError> {
        token.check()?;
        self.injected += 1;
        self.deliver_local(node, token);
        Ok(())
    }

    fn deliver_local(&mut self, node: NodeId, token: Token) {
        let inbox = &mut self.inbox[node as usize];
        if inbox.is_empty() {
            self.pending.push(node);
        }
        inbox.push(token);
    }

    /// Runs one synchronous round. Returns whether any token is still held
    /// or queued afterwards.
    pub fn step_round<H>(&mut self, mut handler: H) -> Result<bool, SimError>
    where
        H: FnMut(NodeId, &[Token], &mut Outbox),
    {
        let mut pending = std::mem::take(&mut self.pending);
        pending.sort_unstable();
        let mut outbox = Outbox {
            node: 0,
            sends: std::mem::take(&mut self.sends),
            forwarded: 0,
            spawned: 0,
            retired: 0,
        };
        // Rounds that enqueue anything always advance the clock, so this
        // value is unique to the current round.
        let stamp = self.round + 1;
        for &node in &pending {
            let tokens = std::mem::take(&mut self.inbox[node as usize]);
            outbox.node = node;
            outbox.forwarded = 0;
            outbox.spawned = 0;
            outbox.retired = 0;
            handler(node, &tokens, &mut outbox);
            if outbox.forwarded + outbox.retired != tokens.len() {
                self.sends = std::mem::take(&mut outbox.sends);
                return Err(SimError::TokenConservation {
                    node,
                    delivered: tokens.len(),
                    accounted: outbox.forwarded + outbox.retired,
                });
            }
            self.injected += outbox.spawned as u64;
            self.retired += outbox.retired as u64;
            for (hop, token) in outbox.sends.drain(..) {
                token.check()?;
                let edge = match hop {
                    Hop::Node(to) => self.graph.directed_edge_index(node, to),
                    Hop::Slot(i) => self.graph.neighbor_edge_index(node, i),
                    Hop::Edge(e) => (e < self.graph.directed_edge_count()
                        && self.graph.directed_edge(e).0 == node)
                        .then_some(e),
                };
                let edge = edge.ok_or(SimError::NotAdjacent {
                    from: node,
                    to: match hop {
                        Hop::Node(to) => to,
                        Hop::Edge(e) if e < self.graph.directed_edge_count() => {
                            self.graph.directed_edge(e).1
                        }
                        Hop::Slot(_) | Hop::Edge(_) => NodeId::MAX,
                    },
                })?;
                let queue = &mut self.queues[edge];
                if self.touch_stamp[edge] != stamp {
                    self.touch_stamp[edge] = stamp;
                    self.touched.push((edge, queue.len()));
                }
                queue.push_back(token);
            }
            // Hand the allocation back.
            let mut tokens = tokens;
            tokens.clear();
            self.inbox[node as usize] = tokens;
        }
        pending.clear();
        self.pending = pending;
        self.sends = outbox.sends;

        // Same-round arrivals on one queue are ordered by (walk_id, source).
        let mut fresh = std::mem::take(&mut self.still_active);
        fresh.clear();
        for (edge, before) in self.touched.drain(..) {
            let queue = &mut self.queues[edge];
            if queue.len() - before > 1 {
                queue.make_contiguous()[before..]
                    .sort_unstable_by_key(|t| (t.walk_id, t.source, t.counter));
            }
            if before == 0 {
                fresh.push(edge);
            }
        }
        // Merge the newly active edges into the already sorted active list.
        if !fresh.is_empty() {
            fresh.sort_unstable();
            merge_sorted(&self.active_edges, &fresh, &mut self.merged);
            std::mem::swap(&mut self.active_edges, &mut self.merged);
        }
        self.still_active = fresh;

        if self.active_edges.is_empty() {
            return Ok(!self.pending.is_empty());
        }
        self.round += 1;
        self.cost.rounds.bump(self.phase, 1);
        let per_round = self.capacity.per_round();
        let mut delivered = 0u64;
        let mut still_active = std::mem::take(&mut self.still_active);
        still_active.clear();
        for i in 0..self.active_edges.len() {
            let edge = self.active_edges[i];
            let (from, to) = self.graph.directed_edge(edge);
            let take = per_round.min(self.queues[edge].len());
            for _ in 0..take {
                let token = self.queues[edge].pop_front().expect("queue length checked");
                if let Some(log) = self.log.as_mut() {
                    log.push(Delivery {
                        round: self.round,
                        from,
                        to,
                        kind: token.kind,
                        walk_id: token.walk_id,
                    });
                }
                self.deliver_local(to, token);
            }
            delivered += take as u64;
            if !self.queues[edge].is_empty() {
                still_active.push(edge);
            }
        }
        self.still_active = std::mem::replace(&mut self.active_edges, still_active);
        self.cost.messages.bump(self.phase, delivered);
        Ok(true)
    }

    /// Steps rounds until no token is held or queued anywhere.
    pub fn run_until_quiet<H>(&mut self, mut handler: H) -> Result<(), SimError>
    where
        H: FnMut(NodeId, &[Token], &mut Outbox),
    {
        while self.step_round(&mut handler)? {}
        Ok(())
    }

    /// Moves `token` hop by hop from `from` to `to` along the oracle's next
    /// hops and retires it there. Requires an idle network.
    pub fn route(
        &mut self,
        oracle: &RoutingOracle,
        from: NodeId,
        to: NodeId,
        mut token: Token,
    ) -> Result<CostRecord, SimError> {
        if !self.is_idle() {
            return Err(SimError::Busy);
        }
        let before = self.cost;
        token.payload_dest = Some(to);
        self.inject(from, token)?;
        let mut error = None;
        self.run_until_quiet(|node, tokens, out| {
            for &t in tokens {
                let dest = t.payload_dest.unwrap_or(node);
                match oracle.next_hop(node, dest) {
                    None => out.retire(t),
                    Some(next) if next != NodeId::MAX => out.send(next, t),
                    Some(_) => {
                        error.get_or_insert(SimError::Unreachable { from: node, to: dest });
                        out.retire(t);
                    }
                }
            }
        })?;
        match error {
            Some(e) => Err(e),
            None => Ok(self.cost - before),
        }
    }
}

/// Writes the sorted union of two sorted, disjoint lists into `out`.
fn merge_sorted(a: &[usize], b: &[usize], out: &mut Vec<usize>) {
    out.clear();
    out.reserve(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Finds the first (round, directed edge) that carried more than the
/// capacity allows, if any.
pub fn audit_bandwidth(
    log: &[Delivery],
    capacity: Capacity,
) -> Option<(u64, NodeId, NodeId, usize)> {
    let limit = capacity.per_round();
    let mut counts: HashMap<(u64, NodeId, NodeId), usize> = HashMap::new();
    for d in log {
        *counts.entry((d.round, d.from, d.to)).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c > limit)
        .min()
        .map(|((round, from, to), c)| (round, from, to, c))
}

/// Writes a delivery log as CSV: `round,edge_u,edge_v,direction,kind,walk_id`
/// with `edge_u < edge_v`; direction `fwd` means `edge_u -> edge_v`.
pub fn write_delivery_log<W: Write>(log: &[Delivery], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["round", "edge_u", "edge_v", "direction", "kind", "walk_id"])?;
    for d in log {
        let (u, v, dir) = if d.from < d.to { (d.from, d.to, "fwd") } else { (d.to, d.from, "rev") };
        w.write_record([
            d.round.to_string(),
            u.to_string(),
            v.to_string(),
            dir.to_string(),
            d.kind.name().to_string(),
            d.walk_id.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_routing, generate, Family, GeneratorSpec, RoutingMode};

    fn relay_to(dest: NodeId) -> impl FnMut(NodeId, &[Token], &mut Outbox) {
        move |node, tokens, out| {
            for &t in tokens {
                if node == dest {
                    out.retire(t)
                } else {
                    out.send(dest, t)
                }
            }
        }
    }

    #[test]
    fn single_token_one_edge() {
        let g = Graph::path(2);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.inject(0, Token::new(TokenKind::NaiveStep, 0, 0, 1)).unwrap();
        net.run_until_quiet(relay_to(1)).unwrap();
        assert_eq!(net.cost().total_rounds(), 1);
        assert_eq!(net.cost().total_messages(), 1);
        assert_eq!(net.token_balance(), (1, 1));
    }

    #[test]
    fn capacity_serializes_fifo() {
        let g = Graph::path(2);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.enable_log();
        for id in [5, 3, 9] {
            net.inject(0, Token::new(TokenKind::NaiveStep, id, 0, 1)).unwrap();
        }
        net.run_until_quiet(relay_to(1)).unwrap();
        assert_eq!(net.cost().total_rounds(), 3);
        assert_eq!(net.cost().total_messages(), 3);
        let log = net.log().unwrap();
        let order: Vec<(u64, u32)> = log.iter().map(|d| (d.round, d.walk_id)).collect();
        // same-round arrivals are ordered by walk id
        assert_eq!(order, vec![(1, 3), (2, 5), (3, 9)]);
        assert_eq!(audit_bandwidth(log, Capacity::Limited(1)), None);
    }

    #[test]
    fn unbounded_capacity_delivers_in_one_round() {
        let g = Graph::path(2);
        let mut net = Network::new(&g, Capacity::Unbounded).unwrap();
        for id in 0..7 {
            net.inject(0, Token::new(TokenKind::NaiveStep, id, 0, 1)).unwrap();
        }
        net.run_until_quiet(relay_to(1)).unwrap();
        assert_eq!(net.cost().total_rounds(), 1);
        assert_eq!(net.cost().total_messages(), 7);
    }

    #[test]
    fn malformed_token_aborts() {
        let g = Graph::path(2);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let mut t = Token::new(TokenKind::NaiveStep, 0, 0, 1);
        t.counter = 2;
        assert!(matches!(net.inject(0, t), Err(SimError::MalformedToken { .. })));

        net.inject(0, Token::new(TokenKind::NaiveStep, 0, 0, 1)).unwrap();
        let err = net
            .run_until_quiet(|_, tokens, out| {
                for &t in tokens {
                    out.send(1, Token { counter: t.target_length + 1, ..t });
                }
            })
            .unwrap_err();
        assert!(matches!(err, SimError::MalformedToken { .. }));
    }

    #[test]
    fn lost_tokens_are_detected() {
        let g = Graph::path(2);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.inject(0, Token::new(TokenKind::NaiveStep, 0, 0, 1)).unwrap();
        let err = net.run_until_quiet(|_, _, _| {}).unwrap_err();
        assert!(matches!(err, SimError::TokenConservation { delivered: 1, accounted: 0, .. }));
    }

    #[test]
    fn non_neighbor_send_is_rejected() {
        let g = Graph::path(3);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.inject(0, Token::new(TokenKind::NaiveStep, 0, 0, 1)).unwrap();
        let err = net.run_until_quiet(relay_to(2)).unwrap_err();
        assert_eq!(err, SimError::NotAdjacent { from: 0, to: 2 });
    }

    #[test]
    fn phases_split_the_counters() {
        let g = Graph::path(3);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.set_phase(Phase::Stitch);
        net.inject(0, Token::new(TokenKind::StitchMove, 0, 0, 1)).unwrap();
        net.run_until_quiet(relay_to(1)).unwrap();
        net.set_phase(Phase::NaiveTail);
        net.inject(1, Token::new(TokenKind::NaiveStep, 1, 1, 1)).unwrap();
        net.run_until_quiet(relay_to(2)).unwrap();
        let c = net.cost();
        assert_eq!(c.messages.get(Phase::Stitch), 1);
        assert_eq!(c.messages.get(Phase::NaiveTail), 1);
        assert_eq!(c.rounds.total(), 2);
    }

    #[test]
    fn route_examples() {
        let g = generate(&GeneratorSpec::new(Family::Grid, 9, 0)).unwrap().graph;
        let sp = build_routing(&g, RoutingMode::ShortestPath);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        let tok = Token::new(TokenKind::StitchMove, 0, 0, 10);
        let c = net.route(&sp, 4, 4, tok).unwrap();
        assert_eq!((c.total_rounds(), c.total_messages()), (0, 0));
        let c = net.route(&sp, 0, 8, tok).unwrap();
        assert_eq!((c.total_rounds(), c.total_messages()), (4, 4));

        let star = Graph::star(4);
        let tree = build_routing(&star, RoutingMode::BfsTree);
        let mut net = Network::new(&star, Capacity::Limited(1)).unwrap();
        let c = net.route(&tree, 1, 3, tok).unwrap();
        assert_eq!(c.total_messages(), 2);
    }

    #[test]
    fn delivery_log_csv() {
        let g = Graph::path(3);
        let mut net = Network::new(&g, Capacity::Limited(1)).unwrap();
        net.enable_log();
        net.inject(2, Token::new(TokenKind::NaiveStep, 4, 2, 1)).unwrap();
        net.run_until_quiet(relay_to(1)).unwrap();
        let mut buf = Vec::new();
        write_delivery_log(net.log().unwrap(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "round,edge_u,edge_v,direction,kind,walk_id\n1,1,2,rev,naive-step,4\n"
        );
    }

    #[test]
    fn zero_capacity_rejected() {
        let g = Graph::path(2);
        assert_eq!(Network::new(&g, Capacity::Limited(0)).err(), Some(SimError::ZeroCapacity));
    }
}
