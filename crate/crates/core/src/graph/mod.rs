//! Graph states over GF(2): Pauli measurement rules, rank bounds and the
//! Pauli-persistency search.
//!
//! Vertex labels are stable. Measuring a vertex removes it from the graph but
//! does not relabel the survivors, so measurement sequences can be replayed
//! against the original labels.

mod corpus;
mod persistency;

pub use corpus::connected_graph_corpus;
pub use persistency::{
    egeom_upper_from_persistency, greedy_persistency, pauli_persistency, replay, PersistencyResult,
    DEFAULT_SEARCH_NODES, MAX_PERSISTENCY_VERTICES,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Budget;
use crate::state::{StateVector, C64};
use crate::{Error, Result};

/// Largest vertex label supported by the bitset rows.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Simple undirected graph with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    labels: usize,
    present: u64,
    rows: Vec<u64>,
}

fn bit(v: usize) -> u64 {
    1u64 << v
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Graph {
    /// Edgeless graph on vertices `0..n`.
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::invalid("n", format!("at most {MAX_VERTICES} vertices")));
        }
        Ok(Graph {
            labels: n,
            present: low_mask(n),
            rows: vec![0; n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Graph::new(n)?;
        for v in 0..n {
            g.rows[v] = low_mask(n) & !bit(v);
        }
        Ok(g)
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges)
    }

    /// Parses one `u v` pair per line, 0-indexed; blank lines are ignored.
    /// The vertex count is one more than the largest label, or `min_vertices` if larger.
    pub fn parse_edge_list(text: &str, min_vertices: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::invalid("edges", format!("line {}: expected `u v`, got {line:?}", lineno + 1));
            let mut parts = line.split_whitespace();
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad());
            };
            let u: usize = a.parse().map_err(|_| bad())?;
            let v: usize = b.parse().map_err(|_| bad())?;
            edges.push((u, v));
        }
        let n = edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
            .max(min_vertices);
        Graph::from_edges(n, &edges)
    }

    /// Number of vertex labels, including measured ones.
    pub fn label_count(&self) -> usize {
        self.labels
    }

    /// Number of vertices still present.
    pub fn num_vertices(&self) -> usize {
        self.present.count_ones() as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels).filter(|&v| self.contains(v))
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.labels && self.present & bit(v) != 0
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::invalid("vertex", format!("{v} is not in the graph")))
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::invalid("edges", format!("self-loop at {u}")));
        }
        self.rows[u] |= bit(v);
        self.rows[v] |= bit(u);
        Ok(())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.labels && v < self.labels && self.rows[u] & bit(v) != 0
    }

    /// Neighborhood of `v` as a bitset.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.labels {
            let mut higher = self.rows[u] & !low_mask(u + 1);
            while higher != 0 {
                let v = higher.trailing_zeros() as usize;
                out.push((u, v));
                higher &= higher - 1;
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_edgeless(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn adjacency_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices().next() else {
            return true;
        };
        let mut seen = bit(start);
        let mut frontier = bit(start);
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.rows[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen == self.present
    }

    /// Complements the subgraph induced by the neighborhood of `v`.
    pub fn local_complement(&mut self, v: usize) -> Result<()> {
        self.check_vertex(v)?;
        let nbhd = self.rows[v];
        let mut rest = nbhd;
        while rest != 0 {
            let a = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.rows[a] ^= nbhd & !bit(a);
        }
        Ok(())
    }

    pub fn delete_vertex(&mut self, v: usize) -> Result<()> {
        self.check_vertex(v)?;
        let mut nbhd = self.rows[v];
        while nbhd != 0 {
            let a = nbhd.trailing_zeros() as usize;
            nbhd &= nbhd - 1;
            self.rows[a] &= !bit(v);
        }
        self.rows[v] = 0;
        self.present &= !bit(v);
        Ok(())
    }
}

/// Graph (up to local unitaries, independent of the outcome) left after
/// measuring `p` on vertex `v`.
pub fn measure_pauli(g: &Graph, v: usize, p: Pauli) -> Result<Graph> {
    let mut h = g.clone();
    apply_pauli(&mut h, v, p)?;
    Ok(h)
}

pub(crate) fn apply_pauli(g: &mut Graph, v: usize, p: Pauli) -> Result<()> {
    g.check_vertex(v)?;
    match p {
        Pauli::Z => g.delete_vertex(v),
        Pauli::Y => {
            g.local_complement(v)?;
            g.delete_vertex(v)
        }
        Pauli::X => {
            let nbhd = g.neighbors(v);
            if nbhd == 0 {
                return g.delete_vertex(v);
            }
            let b = nbhd.trailing_zeros() as usize;
            g.local_complement(b)?;
            g.local_complement(v)?;
            g.delete_vertex(v)?;
            g.local_complement(b)
        }
    }
}

/// Rank over GF(2) of the matrix whose rows are the given bitsets.
pub fn gf2_rank(rows: &[u64]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in 0..64 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit(col) != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit(col) != 0 {
                *row ^= p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// `|G> = prod_{(u,v)} CZ_uv |+>^n` on the present vertices, in increasing
/// label order (the lowest label is site 0).
pub fn graph_state_vector(g: &Graph) -> Result<StateVector> {
    graph_state_vector_with_budget(g, Budget::default())
}

pub fn graph_state_vector_with_budget(g: &Graph, budget: Budget) -> Result<StateVector> {
    let labels: Vec<usize> = g.vertices().collect();
    let n = labels.len();
    let dim = budget.check_dims(n, 2)?;
    // Compact rows: row i is the neighborhood of labels[i] in site indices.
    let compact: Vec<u64> = labels
        .iter()
        .map(|&v| {
            labels
                .iter()
                .enumerate()
                .filter(|&(_, &w)| g.has_edge(v, w))
                .fold(0u64, |acc, (j, _)| acc | bit(j))
        })
        .collect();
    let scale = (dim as f64).sqrt().recip();
    let amps = (0..dim as u64)
        .map(|x| {
            // Each edge inside x counted twice.
            let twice: u32 = (0..n)
                .filter(|&i| x & bit(i) != 0)
                .map(|i| (compact[i] & x).count_ones())
                .sum();
            let sign = if (twice / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            C64::new(sign * scale, 0.0)
        })
        .collect();
    StateVector::new(n, 2, amps)
}

/// Rank over GF(2) of the block of the adjacency matrix between `part` and its
/// complement. Its value is the base-2 log of the Schmidt rank of the graph
/// state across that cut.
pub fn bipartition_rank_bound(g: &Graph, part: &[usize]) -> Result<usize> {
    let mut mask = 0u64;
    for &v in part {
        g.check_vertex(v)?;
        mask |= bit(v);
    }
    if mask == 0 || mask == g.present {
        return Err(Error::invalid("partition", "must be a proper nonempty subset of the vertices"));
    }
    Ok(block_rank(g, mask))
}

fn block_rank(g: &Graph, mask: u64) -> usize {
    let other = g.present & !mask;
    let rows: Vec<u64> = (0..g.labels)
        .filter(|&v| mask & bit(v) != 0)
        .map(|v| g.rows[v] & other)
        .collect();
    gf2_rank(&rows)
}

/// Vertex count up to which [`egeom_lower_bound`] scans every bipartition.
pub const EXHAUSTIVE_CUT_VERTICES: usize = 16;

/// Certified lower bound on the base-2 geometric measure of the graph state:
/// the largest cut block rank. The Schmidt spectrum of a graph state across
/// any cut is flat, so the largest product overlap is at most
/// `2^-rank` for every cut.
///
/// Every bipartition is tried up to [`EXHAUSTIVE_CUT_VERTICES`] vertices;
/// beyond that, single vertices, prefixes, and alternating halves.
pub fn egeom_lower_bound(g: &Graph) -> f64 {
    best_cut(g).0 as f64
}

/// Largest cut block rank and a cut attaining it.
pub fn best_cut(g: &Graph) -> (usize, Vec<usize>) {
    let verts: Vec<usize> = g.vertices().collect();
    let m = verts.len();
    if m < 2 {
        return (0, Vec::new());
    }
    let to_mask = |sel: u64| {
        verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| sel & bit(i) != 0)
            .fold(0u64, |acc, (_, &v)| acc | bit(v))
    };
    let candidates: Vec<u64> = if m <= EXHAUSTIVE_CUT_VERTICES {
        // The top vertex always sits on the complement side.
        (1..1u64 << (m - 1)).collect()
    } else {
        let mut c: Vec<u64> = (0..m).map(bit).collect();
        c.extend((1..m).map(low_mask));
        c.push((0..m).step_by(2).fold(0, |acc, i| acc | bit(i)));
        c
    };
    let mut best = (0, 0u64);
    for sel in candidates {
        let mask = to_mask(sel);
        let r = block_rank(g, mask);
        if r > best.0 {
            best = (r, mask);
        }
    }
    let part = (0..g.labels).filter(|&v| best.1 & bit(v) != 0).collect();
    (best.0, part)
}

/// `log2 rank(Γ)` over GF(2) of the full adjacency matrix. Reported for
/// comparison only: it is not a lower bound in general (the complete graph
/// on four vertices has rank 4 while its graph state has measure 1).
pub fn adjacency_rank_log2(g: &Graph) -> f64 {
    let r = gf2_rank(&g.rows);
    if r == 0 {
        0.0
    } else {
        (r as f64).log2()
    }
}
