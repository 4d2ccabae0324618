use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use super::{Graph, GraphError, NodeId};
use crate::rng::{stream, Purpose, SimRng};

/// Resample budget for the random families before falling back to the
/// largest connected component.
pub const MAX_CONNECTIVITY_ATTEMPTS: u32 = 20;

/// Size of the seed clique and of each new vertex's attachment draw in the
/// preferential-attachment family.
pub const POWER_LAW_SEED_CLIQUE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    GnpExpander,
    TwoTier,
    PowerLaw,
    Geometric,
    Grid,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::GnpExpander, Family::TwoTier, Family::PowerLaw, Family::Geometric, Family::Grid];

    pub fn name(self) -> &'static str {
        match self {
            Family::GnpExpander => "gnp-expander",
            Family::TwoTier => "two-tier",
            Family::PowerLaw => "power-law",
            Family::Geometric => "geometric",
            Family::Grid => "grid",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gnp-expander" | "gnp" | "expander" => Ok(Family::GnpExpander),
            "two-tier" | "twotier" | "two_tier" => Ok(Family::TwoTier),
            "power-law" | "powerlaw" | "power_law" | "pa" => Ok(Family::PowerLaw),
            "geometric" | "rgg" => Ok(Family::Geometric),
            "grid" => Ok(Family::Grid),
            other => Err(GraphError::InvalidParameter(format!("unknown graph family {other:?}"))),
        }
    }
}

/// Parameters for one generated graph. `None` for `p` or `r` selects the
/// family default (`log2 n / n` and `sqrt(log2 n / n)` respectively).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub p: Option<f64>,
    pub alpha: f64,
    pub r: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        Self { family, n, p: None, alpha: 1.0, r: None, seed }
    }

    pub fn validate(&self) -> Result<(), GraphError> {
        let invalid = |m: String| Err(GraphError::InvalidParameter(m));
        if self.n < 4 {
            return invalid(format!("n must be at least 4, got {}", self.n));
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return invalid(format!("p must lie in (0, 1], got {p}"));
            }
        }
        if let Some(r) = self.r {
            if !(r > 0.0 && r < std::f64::consts::SQRT_2) {
                return invalid(format!("r must lie in (0, sqrt 2), got {r}"));
            }
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha must be a finite value >= 0, got {}", self.alpha));
        }
        Ok(())
    }
}

/// What the generator actually did, for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMeta {
    pub family: Family,
    pub requested_n: usize,
    pub effective_n: usize,
    /// Total sampling attempts across all random sub-graphs.
    pub attempts: u32,
    pub kept_largest_component: bool,
    pub dropped_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub meta: GeneratorMeta,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated, GraphError> {
    spec.validate()?;
    let mut meta = GeneratorMeta {
        family: spec.family,
        requested_n: spec.n,
        effective_n: spec.n,
        attempts: 1,
        kept_largest_component: false,
        dropped_nodes: 0,
    };
    let graph = match spec.family {
        Family::GnpExpander => {
            let p = spec.p.unwrap_or_else(|| default_p(spec.n));
            let (g, attempts) = retry_until_connected(spec.seed, 0, |rng| gnp(spec.n, p, rng))?;
            meta.attempts = attempts;
            g
        }
        Family::Geometric => {
            let r = spec.r.unwrap_or_else(|| default_p(spec.n).sqrt());
            let (g, attempts) =
                retry_until_connected(spec.seed, 0, |rng| geometric(spec.n, r, rng))?;
            meta.attempts = attempts;
            g
        }
        Family::TwoTier => {
            let (g, attempts) = two_tier(spec.n, spec.p, spec.seed)?;
            meta.attempts = attempts;
            g
        }
        Family::PowerLaw => {
            let mut rng = stream(spec.seed, Purpose::Graph, &[0]);
            preferential_attachment(spec.n, spec.alpha, &mut rng)?
        }
        Family::Grid => grid(spec.n)?,
    };
    let graph = if graph.is_connected() {
        graph
    } else {
        let kept = graph.largest_component();
        meta.kept_largest_component = true;
        meta.dropped_nodes = graph.node_count() - kept.node_count();
        kept
    };
    if graph.node_count() < 2 || graph.edge_count() == 0 {
        return Err(GraphError::ConnectivityUnachievable(format!(
            "{} with n={} left a component of {} node(s)",
            spec.family,
            spec.n,
            graph.node_count()
        )));
    }
    meta.effective_n = graph.node_count();
    Ok(Generated { graph, meta })
}

/// `log2 n / n`: expected degree `log2 n`, comfortably above the
/// connectivity threshold of G(n, p) and on the same log base as the
/// short-walk budget.
fn default_p(n: usize) -> f64 {
    ((n as f64).log2() / n as f64).min(1.0)
}

/// Calls `sample` with fresh sub-streams until it yields a connected graph
/// or the attempt budget runs out; returns the last sample either way.
fn retry_until_connected<F>(seed: u64, tag: u64, mut sample: F) -> Result<(Graph, u32), GraphError>
where
    F: FnMut(&mut SimRng) -> Result<Graph, GraphError>,
{
    let mut last = None;
    for attempt in 0..MAX_CONNECTIVITY_ATTEMPTS {
        let mut rng = stream(seed, Purpose::Retry, &[tag, attempt as u64]);
        let g = sample(&mut rng)?;
        if g.is_connected() {
            return Ok((g, attempt + 1));
        }
        last = Some(g);
    }
    Ok((last.expect("at least one attempt"), MAX_CONNECTIVITY_ATTEMPTS))
}

/// Erdős–Rényi G(n, p) using geometric skipping over the pair sequence.
fn gnp(n: usize, p: f64, rng: &mut SimRng) -> Result<Graph, GraphError> {
    Graph::from_edges(n, gnp_edges(n, p, rng))
}

fn gnp_edges(n: usize, p: f64, rng: &mut SimRng) -> Vec<(NodeId, NodeId)> {
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                edges.push((v as NodeId, w as NodeId));
            }
        }
        return edges;
    }
    let log_q = (1.0 - p).ln();
    let (mut v, mut w) = (1usize, -1i64);
    while v < n {
        let u: f64 = rng.random();
        w += 1 + ((1.0 - u).ln() / log_q).floor() as i64;
        while w >= v as i64 && v < n {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push((v as NodeId, w as NodeId));
        }
    }
    edges
}

/// Unit-square random geometric graph with threshold `r`, bucketed by cells
/// of side `r`.
fn geometric(n: usize, r: f64, rng: &mut SimRng) -> Result<Graph, GraphError> {
    let points: Vec<(f64, f64)> = (0..n).map(|_| (rng.random(), rng.random())).collect();
    let cells = ((1.0 / r).floor() as usize).clamp(1, 4096);
    let cell_of = |x: f64| ((x * cells as f64) as usize).min(cells - 1);
    let mut buckets: Vec<Vec<NodeId>> = vec![Vec::new(); cells * cells];
    for (i, &(x, y)) in points.iter().enumerate() {
        buckets[cell_of(y) * cells + cell_of(x)].push(i as NodeId);
    }
    let r2 = r * r;
    let mut edges = Vec::new();
    for (i, &(x, y)) in points.iter().enumerate() {
        let (cx, cy) = (cell_of(x), cell_of(y));
        for ny in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for nx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                for &j in &buckets[ny * cells + nx] {
                    if (j as usize) <= i {
                        continue;
                    }
                    let (px, py) = points[j as usize];
                    if (px - x).powi(2) + (py - y).powi(2) <= r2 {
                        edges.push((i as NodeId, j));
                    }
                }
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Four equal G(n/4, p) clusters joined by a tier-two G(4k, p) over
/// `k = ceil(n/16)` random members of each cluster. Without an explicit `p`
/// every sub-graph of size `s` uses `ln s / s`.
fn two_tier(n: usize, p: Option<f64>, seed: u64) -> Result<(Graph, u32), GraphError> {
    let mut edges = Vec::new();
    let mut attempts = 0;
    let mut start = 0usize;
    let mut members: Vec<Vec<NodeId>> = Vec::with_capacity(4);
    for c in 0..4 {
        let size = n / 4 + usize::from(c < n % 4);
        let pc = p.unwrap_or_else(|| default_p(size));
        let (cluster, a) = retry_until_connected(seed, 1 + c as u64, |rng| gnp(size, pc, rng))?;
        attempts += a;
        edges.extend(cluster.edges().map(|(u, v)| (u + start as NodeId, v + start as NodeId)));
        members.push((start..start + size).map(|v| v as NodeId).collect());
        start += size;
    }

    let per_cluster = n.div_ceil(16);
    let mut pick = stream(seed, Purpose::Graph, &[2]);
    let mut tier_two = Vec::new();
    for cluster in &members {
        let k = per_cluster.min(cluster.len());
        let mut chosen: Vec<NodeId> =
            index::sample(&mut pick, cluster.len(), k).into_iter().map(|i| cluster[i]).collect();
        chosen.sort_unstable();
        tier_two.extend(chosen);
    }
    let size = tier_two.len();
    let pt = p.unwrap_or_else(|| default_p(size));
    let (top, a) = retry_until_connected(seed, 5, |rng| gnp(size, pt, rng))?;
    attempts += a;
    edges.extend(top.edges().map(|(u, v)| (tier_two[u as usize], tier_two[v as usize])));
    Ok((Graph::from_edges(n, edges)?, attempts))
}

/// Preferential attachment from a 5-clique: each new vertex draws five
/// targets with probability proportional to `deg^alpha` (with replacement,
/// duplicates collapsed).
fn preferential_attachment(n: usize, alpha: f64, rng: &mut SimRng) -> Result<Graph, GraphError> {
    let seed = POWER_LAW_SEED_CLIQUE.min(n);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for u in 0..seed {
        for v in u + 1..seed {
            edges.push((u as NodeId, v as NodeId));
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let weight = |d: usize| (d as f64).powf(alpha);
    let mut tree = Fenwick::new(n);
    for (v, &d) in degree.iter().enumerate().take(seed) {
        tree.add(v, weight(d));
    }
    let mut targets = Vec::with_capacity(POWER_LAW_SEED_CLIQUE);
    for v in seed..n {
        targets.clear();
        for _ in 0..POWER_LAW_SEED_CLIQUE {
            let x = rng.random::<f64>() * tree.total();
            targets.push(tree.find(x).min(v - 1));
        }
        targets.sort_unstable();
        targets.dedup();
        for &t in &targets {
            edges.push((t as NodeId, v as NodeId));
            let old = weight(degree[t]);
            degree[t] += 1;
            tree.add(t, weight(degree[t]) - old);
        }
        degree[v] = targets.len();
        tree.add(v, weight(degree[v]));
    }
    Graph::from_edges(n, edges)
}

/// `floor(sqrt n)` by `floor(sqrt n)` grid; `n` is rounded down to a square.
fn grid(n: usize) -> Result<Graph, GraphError> {
    let mut side = (n as f64).sqrt() as usize;
    while side * side > n {
        side -= 1;
    }
    while (side + 1) * (side + 1) <= n {
        side += 1;
    }
    let id = |r: usize, c: usize| (r * side + c) as NodeId;
    let mut edges = Vec::with_capacity(2 * side * side);
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < side {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::from_edges(side * side, edges)
}

/// Prefix-sum tree for weighted sampling with point updates.
struct Fenwick {
    tree: Vec<f64>,
    total: f64,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0.0; n + 1], total: 0.0 }
    }

    fn total(&self) -> f64 {
        self.total
    }

    fn add(&mut self, index: usize, delta: f64) {
        self.total += delta;
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose inclusive prefix sum exceeds `x`.
    fn find(&self, mut x: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= x {
                pos = next;
                x -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}
