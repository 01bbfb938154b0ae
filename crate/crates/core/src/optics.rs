//! Coloured, weighted multigraphs standing for photon pair-source setups.
//!
//! Every vertex is a detector and every edge a pair source that emits one
//! photon into each endpoint with the mode given by the edge colour at that
//! endpoint. The state heralded by one photon in every detector is the sum
//! over perfect matchings of the product of edge weights, each matching
//! contributing to the ket read off its endpoint colours.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;

use crate::state::{Ket, QuantumState};

/// Detectors are tracked in a 64-bit cover mask.
pub const MAX_VERTICES: usize = 64;
/// Modes are packed two bits per vertex.
pub const MAX_DIM: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OpticsError {
    #[error("vertex count {0} must be even and between 2 and {MAX_VERTICES}")]
    BadVertexCount(usize),
    #[error("dimensionality {0} must be between 1 and {MAX_DIM}")]
    BadDim(u8),
    #[error("edge ({u},{v}) references a vertex outside 0..{vertices}")]
    VertexOutOfRange { u: usize, v: usize, vertices: usize },
    #[error("edge joins vertex {0} to itself")]
    SelfLoop(usize),
    #[error("mode {mode} not below dimensionality {dim}")]
    ModeOutOfRange { mode: u8, dim: u8 },
    #[error("edge weight must be nonzero")]
    ZeroWeight,
    #[error("amplitude overflow")]
    Overflow,
    #[error("simulation exceeded its time budget")]
    Timeout,
    #[error("particle count {0} must be even and at least 2")]
    OddParticles(u32),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One pair source. Stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub mu: u8,
    pub mv: u8,
    pub w: i64,
}

impl Edge {
    /// Builds an edge, swapping endpoints (with their modes) so that `u < v`.
    pub fn new(u: usize, v: usize, mu: u8, mv: u8, w: i64) -> Self {
        if u <= v {
            Edge { u, v, mu, mv, w }
        } else {
            Edge {
                u: v,
                v: u,
                mu: mv,
                mv: mu,
                w,
            }
        }
    }

    pub fn unit(u: usize, v: usize, mu: u8, mv: u8) -> Self {
        Edge::new(u, v, mu, mv, 1)
    }
}

type EdgeKey = (usize, usize, u8, u8);

/// A setup: an even number of detectors, a mode count and a merged edge set.
#[derive(Clone, PartialEq, Eq)]
pub struct Setup {
    vertices: usize,
    dim: u8,
    edges: BTreeMap<EdgeKey, i64>,
}

impl fmt::Debug for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Options for [`Setup::compute_state_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ComputeOptions {
    pub deadline: Option<Instant>,
    pub parallel: bool,
}

impl Setup {
    pub fn new(vertices: usize, dim: u8) -> Result<Self, OpticsError> {
        if vertices < 2 || !vertices.is_multiple_of(2) || vertices > MAX_VERTICES {
            return Err(OpticsError::BadVertexCount(vertices));
        }
        if dim == 0 || dim > MAX_DIM {
            return Err(OpticsError::BadDim(dim));
        }
        Ok(Setup {
            vertices,
            dim,
            edges: BTreeMap::new(),
        })
    }

    pub fn from_edges<I>(vertices: usize, dim: u8, edges: I) -> Result<Self, OpticsError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut setup = Setup::new(vertices, dim)?;
        for e in edges {
            setup.add_edge(e)?;
        }
        Ok(setup)
    }

    /// Adds an edge, merging it with an existing edge of the same endpoints
    /// and colours. Edges whose merged weight is zero disappear.
    pub fn add_edge(&mut self, e: Edge) -> Result<(), OpticsError> {
        let e = Edge::new(e.u, e.v, e.mu, e.mv, e.w);
        if e.v >= self.vertices {
            return Err(OpticsError::VertexOutOfRange {
                u: e.u,
                v: e.v,
                vertices: self.vertices,
            });
        }
        if e.u == e.v {
            return Err(OpticsError::SelfLoop(e.u));
        }
        for mode in [e.mu, e.mv] {
            if mode >= self.dim {
                return Err(OpticsError::ModeOutOfRange {
                    mode,
                    dim: self.dim,
                });
            }
        }
        if e.w == 0 {
            return Err(OpticsError::ZeroWeight);
        }
        let key = (e.u, e.v, e.mu, e.mv);
        let w = self.edges.get(&key).copied().unwrap_or(0);
        let w = w.checked_add(e.w).ok_or(OpticsError::Overflow)?;
        if w == 0 {
            self.edges.remove(&key);
        } else {
            self.edges.insert(key, w);
        }
        Ok(())
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Merged edges in `(u, v, mu, mv)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges
            .iter()
            .map(|(&(u, v, mu, mv), &w)| Edge { u, v, mu, mv, w })
    }

    /// Minimum number of merged edges incident to any vertex.
    pub fn min_degree(&self) -> usize {
        let mut deg = vec![0usize; self.vertices];
        for &(u, v, _, _) in self.edges.keys() {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg.into_iter().min().unwrap_or(0)
    }

    fn adjacency(&self) -> Vec<Vec<Incident>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for e in self.edges() {
            adj[e.u].push(Incident {
                other: e.v,
                here: e.mu,
                there: e.mv,
                w: e.w,
            });
            adj[e.v].push(Incident {
                other: e.u,
                here: e.mv,
                there: e.mu,
                w: e.w,
            });
        }
        adj
    }

    /// Number of perfect matchings of the underlying multigraph, ignoring
    /// colours and weights. Parallel edges count separately.
    pub fn count_perfect_matchings(&self) -> u128 {
        let adj = self.adjacency();
        let full = full_mask(self.vertices);
        let mut memo = HashMap::new();
        count_rec(&adj, full, 0, &mut memo)
    }

    /// The heralded state: zero amplitudes are dropped, nothing else is
    /// normalized.
    pub fn compute_state(&self) -> QuantumState {
        self.compute_state_with(&ComputeOptions::default())
            .expect("no deadline set; amplitudes of valid setups fit in i64")
    }

    pub fn compute_state_with(&self, opts: &ComputeOptions) -> Result<QuantumState, OpticsError> {
        let adj = self.adjacency();
        let full = full_mask(self.vertices);
        let amps = if opts.parallel && !adj[0].is_empty() {
            let parts: Vec<Result<HashMap<u128, i128>, OpticsError>> = adj[0]
                .par_iter()
                .map(|inc| {
                    let mut walker = Walker::new(&adj, full, opts.deadline);
                    walker.branch(0, 0, inc, 1, 0)?;
                    Ok(walker.amps)
                })
                .collect();
            let mut total: HashMap<u128, i128> = HashMap::new();
            for part in parts {
                for (k, a) in part? {
                    let slot = total.entry(k).or_insert(0);
                    *slot = slot.checked_add(a).ok_or(OpticsError::Overflow)?;
                }
            }
            total
        } else {
            let mut walker = Walker::new(&adj, full, opts.deadline);
            walker.descend(0, 1, 0)?;
            walker.amps
        };
        let mut terms = Vec::with_capacity(amps.len());
        for (packed, amp) in amps {
            if amp == 0 {
                continue;
            }
            let amp = i64::try_from(amp).map_err(|_| OpticsError::Overflow)?;
            terms.push((unpack(packed, self.vertices), amp));
        }
        QuantumState::from_terms(self.vertices, self.dim, terms).map_err(|_| OpticsError::Overflow)
    }

    /// `vertices=<n> dim=<k>` followed by one `u v mu mv w` line per edge.
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices={} dim={}\n", self.vertices, self.dim);
        for e in self.edges() {
            out.push_str(&format!("{} {} {} {} {}\n", e.u, e.v, e.mu, e.mv, e.w));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, OpticsError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(OpticsError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let bad_header = || OpticsError::Parse {
            line: 1,
            msg: format!("bad header `{header}`"),
        };
        let mut vertices = None;
        let mut dim = None;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("vertices", n)) => vertices = n.parse::<usize>().ok(),
                Some(("dim", k)) => dim = k.parse::<u8>().ok(),
                _ => return Err(bad_header()),
            }
        }
        let (vertices, dim) = vertices.zip(dim).ok_or_else(bad_header)?;
        let mut setup = Setup::new(vertices, dim)?;
        for (i, line) in lines {
            let bad = |msg: String| OpticsError::Parse { line: i + 1, msg };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(bad(format!("expected `u v mu mv w`, got `{line}`")));
            }
            let int = |s: &str| {
                s.parse::<i64>()
                    .map_err(|_| bad(format!("bad number `{s}`")))
            };
            let (u, v, mu, mv, w) = (
                int(fields[0])?,
                int(fields[1])?,
                int(fields[2])?,
                int(fields[3])?,
                int(fields[4])?,
            );
            if u < 0 || v < 0 || !(0..=255).contains(&mu) || !(0..=255).contains(&mv) {
                return Err(bad("negative index".into()));
            }
            setup
                .add_edge(Edge::new(u as usize, v as usize, mu as u8, mv as u8, w))
                .map_err(|e| bad(e.to_string()))?;
        }
        Ok(setup)
    }
}

/// Rough cost of simulating a complete `k`-coloured graph on `n` vertices:
/// `k^n · (n/2) · (n−1)!!`.
pub fn flop_estimate(k: u32, n: u32) -> Result<u128, OpticsError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(OpticsError::OddParticles(n));
    }
    let mut dfact: u128 = 1;
    let mut i = n - 1;
    while i > 1 {
        dfact = dfact.checked_mul(i as u128).ok_or(OpticsError::Overflow)?;
        i -= 2;
    }
    (k as u128)
        .checked_pow(n)
        .and_then(|p| p.checked_mul((n / 2) as u128))
        .and_then(|p| p.checked_mul(dfact))
        .ok_or(OpticsError::Overflow)
}

#[derive(Clone, Copy, Debug)]
struct Incident {
    other: usize,
    here: u8,
    there: u8,
    w: i64,
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn unpack(packed: u128, n: usize) -> Ket {
    Ket::new((0..n).map(|i| ((packed >> (2 * i)) & 3) as u8).collect())
}

fn count_rec(adj: &[Vec<Incident>], full: u64, mask: u64, memo: &mut HashMap<u64, u128>) -> u128 {
    if mask == full {
        return 1;
    }
    if let Some(&c) = memo.get(&mask) {
        return c;
    }
    let p = (!mask).trailing_zeros() as usize;
    let mut total = 0u128;
    for inc in &adj[p] {
        if mask & (1 << inc.other) == 0 {
            total += count_rec(adj, full, mask | (1 << p) | (1 << inc.other), memo);
        }
    }
    memo.insert(mask, total);
    total
}

struct Walker<'a> {
    adj: &'a [Vec<Incident>],
    full: u64,
    deadline: Option<Instant>,
    leaves: u32,
    amps: HashMap<u128, i128>,
}

impl<'a> Walker<'a> {
    fn new(adj: &'a [Vec<Incident>], full: u64, deadline: Option<Instant>) -> Self {
        Walker {
            adj,
            full,
            deadline,
            leaves: 0,
            amps: HashMap::new(),
        }
    }

    fn descend(&mut self, mask: u64, weight: i128, ket: u128) -> Result<(), OpticsError> {
        if mask == self.full {
            let slot = self.amps.entry(ket).or_insert(0);
            *slot = slot.checked_add(weight).ok_or(OpticsError::Overflow)?;
            self.leaves = self.leaves.wrapping_add(1);
            if self.leaves.is_multiple_of(4096) {
                if let Some(d) = self.deadline {
                    if Instant::now() >= d {
                        return Err(OpticsError::Timeout);
                    }
                }
            }
            return Ok(());
        }
        let p = (!mask).trailing_zeros() as usize;
        let adj = self.adj;
        for inc in &adj[p] {
            self.branch(mask, p, inc, weight, ket)?;
        }
        Ok(())
    }

    fn branch(
        &mut self,
        mask: u64,
        p: usize,
        inc: &Incident,
        weight: i128,
        ket: u128,
    ) -> Result<(), OpticsError> {
        let q = inc.other;
        if mask & (1 << q) != 0 {
            return Ok(());
        }
        let weight = weight
            .checked_mul(inc.w as i128)
            .ok_or(OpticsError::Overflow)?;
        let ket = ket | ((inc.here as u128) << (2 * p)) | ((inc.there as u128) << (2 * q));
        self.descend(mask | (1 << p) | (1 << q), weight, ket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateFormat;

    fn complete(n: usize, dim: u8, colours: &[(u8, u8)]) -> Setup {
        let mut s = Setup::new(n, dim).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                for &(a, b) in colours {
                    s.add_edge(Edge::unit(u, v, a, b)).unwrap();
                }
            }
        }
        s
    }

    fn ghz4() -> Setup {
        Setup::from_edges(
            4,
            2,
            [
                Edge::unit(0, 1, 0, 0),
                Edge::unit(2, 3, 0, 0),
                Edge::unit(0, 2, 1, 1),
                Edge::unit(1, 3, 1, 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn k4_single_colour() {
        let s = complete(4, 2, &[(0, 0)]).compute_state();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&Ket::new(vec![0; 4])), 3);
    }

    #[test]
    fn ghz4_state_and_degree() {
        let s = ghz4();
        assert_eq!(
            s.compute_state().to_text(StateFormat::Optics),
            "+1[xxxx] +1[yyyy]"
        );
        assert_eq!(s.min_degree(), 2);
        assert_eq!(s.count_perfect_matchings(), 2);
    }

    #[test]
    fn empty_setups() {
        let s = Setup::new(2, 2).unwrap();
        assert!(s.compute_state().is_empty());
        let s = Setup::new(4, 2).unwrap();
        assert_eq!(s.count_perfect_matchings(), 0);
        assert_eq!(s.min_degree(), 0);
        let s = Setup::from_edges(4, 2, [Edge::unit(0, 1, 0, 0)]).unwrap();
        assert_eq!(s.min_degree(), 0);
    }

    #[test]
    fn matching_counts() {
        assert_eq!(complete(4, 1, &[(0, 0)]).count_perfect_matchings(), 3);
        assert_eq!(complete(8, 1, &[(0, 0)]).count_perfect_matchings(), 105);
        // parallel edges of distinct colours count separately
        assert_eq!(
            complete(4, 2, &[(0, 0), (1, 1)]).count_perfect_matchings(),
            12
        );
    }

    #[test]
    fn merging() {
        let mut s = Setup::new(2, 2).unwrap();
        s.add_edge(Edge::new(1, 0, 1, 0, 2)).unwrap();
        s.add_edge(Edge::new(0, 1, 0, 1, -2)).unwrap();
        assert_eq!(s.edge_count(), 0);
        s.add_edge(Edge::new(1, 0, 1, 0, 1)).unwrap();
        assert_eq!(
            s.edges().next().unwrap(),
            Edge {
                u: 0,
                v: 1,
                mu: 0,
                mv: 1,
                w: 1
            }
        );
    }

    #[test]
    fn invalid_edges() {
        let mut s = Setup::new(4, 2).unwrap();
        assert_eq!(
            s.add_edge(Edge::unit(1, 1, 0, 0)),
            Err(OpticsError::SelfLoop(1))
        );
        assert!(matches!(
            s.add_edge(Edge::unit(0, 4, 0, 0)),
            Err(OpticsError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            s.add_edge(Edge::unit(0, 1, 2, 0)),
            Err(OpticsError::ModeOutOfRange { .. })
        ));
        assert_eq!(
            s.add_edge(Edge::new(0, 1, 0, 0, 0)),
            Err(OpticsError::ZeroWeight)
        );
        assert!(Setup::new(3, 2).is_err());
        assert!(Setup::new(4, 4).is_err());
    }

    #[test]
    fn flops() {
        assert_eq!(flop_estimate(3, 4).unwrap(), 486);
        assert_eq!(flop_estimate(3, 6).unwrap(), 32805);
        assert_eq!(flop_estimate(3, 8).unwrap(), 2755620);
        assert_eq!(flop_estimate(3, 5), Err(OpticsError::OddParticles(5)));
        assert!(flop_estimate(3, 20).unwrap() > 2 * 10u128.pow(19));
    }

    #[test]
    fn text_round_trip() {
        let s = ghz4();
        let text = s.to_text();
        assert_eq!(
            text,
            "vertices=4 dim=2\n0 1 0 0 1\n0 2 1 1 1\n1 3 1 1 1\n2 3 0 0 1\n"
        );
        assert_eq!(Setup::parse(&text).unwrap(), s);
        assert!(matches!(
            Setup::parse("vertices=4 dim=2\n0 1 0\n"),
            Err(OpticsError::Parse { line: 2, .. })
        ));
        assert!(Setup::parse("nodes=4\n").is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let s = complete(8, 3, &[(0, 0), (1, 2), (2, 1)]);
        let seq = s.compute_state();
        let par = s
            .compute_state_with(&ComputeOptions {
                parallel: true,
                deadline: None,
            })
            .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn deadline_in_past_times_out() {
        let s = complete(12, 2, &[(0, 0), (1, 1), (0, 1)]);
        let opts = ComputeOptions {
            deadline: Some(Instant::now()),
            parallel: false,
        };
        assert_eq!(s.compute_state_with(&opts), Err(OpticsError::Timeout));
    }
}
