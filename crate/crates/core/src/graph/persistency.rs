use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply_pauli, Graph, Pauli};
use crate::{Error, Result};

/// Largest vertex count accepted by the exact search.
pub const MAX_PERSISTENCY_VERTICES: usize = 10;

pub const DEFAULT_SEARCH_NODES: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistencyResult {
    pub value: usize,
    /// Measurements that leave an edgeless graph, in order.
    pub witness: Vec<(usize, Pauli)>,
    pub nodes_explored: u64,
    /// False for the greedy fallback, which only gives an upper bound.
    pub optimal: bool,
}

/// Applies `witness` in order.
pub fn replay(g: &Graph, witness: &[(usize, Pauli)]) -> Result<Graph> {
    let mut h = g.clone();
    for &(v, p) in witness {
        apply_pauli(&mut h, v, p)?;
    }
    Ok(h)
}

type Key = Vec<u64>;

/// Successors of `g` in move order: vertices ascending, then X, Y, Z.
/// Isolated vertices are never measured since that cannot remove an edge.
fn successors(g: &Graph) -> Vec<((usize, Pauli), Graph)> {
    let mut out = Vec::new();
    for v in g.vertices().filter(|&v| g.degree(v) > 0) {
        for p in Pauli::ALL {
            let mut h = g.clone();
            apply_pauli(&mut h, v, p).expect("vertex is present");
            out.push(((v, p), h));
        }
    }
    out
}

/// Minimum number of single-vertex Pauli measurements that leave no edges,
/// by breadth-first search over measured graphs.
///
/// Graphs are deduplicated on their adjacency rows; measured and isolated
/// vertices both show up as empty rows, which is harmless because neither
/// ever needs measuring. Each layer is expanded in parallel and merged in
/// frontier order, so the witness does not depend on the thread count.
pub fn pauli_persistency(g: &Graph, budget_nodes: u64) -> Result<PersistencyResult> {
    if g.num_vertices() > MAX_PERSISTENCY_VERTICES {
        return Err(Error::invalid(
            "graph",
            format!("exact search supports at most {MAX_PERSISTENCY_VERTICES} vertices"),
        ));
    }
    if g.is_edgeless() {
        return Ok(PersistencyResult {
            value: 0,
            witness: Vec::new(),
            nodes_explored: 0,
            optimal: true,
        });
    }
    let start: Key = g.adjacency_rows().to_vec();
    let mut parent: HashMap<Key, (Key, (usize, Pauli))> = HashMap::new();
    let mut frontier = vec![g.clone()];
    let mut explored = 0u64;
    loop {
        explored += frontier.len() as u64;
        if explored > budget_nodes {
            return Err(Error::SearchBudget {
                explored,
                upper_bound: greedy_persistency(g).value,
            });
        }
        let children: Vec<Vec<((usize, Pauli), Graph)>> = frontier.par_iter().map(successors).collect();
        let mut next = Vec::new();
        for (node, kids) in frontier.iter().zip(children) {
            let from: Key = node.adjacency_rows().to_vec();
            for (mv, child) in kids {
                let key: Key = child.adjacency_rows().to_vec();
                if key == start || parent.contains_key(&key) {
                    continue;
                }
                parent.insert(key.clone(), (from.clone(), mv));
                if child.is_edgeless() {
                    let witness = unwind(&parent, &start, key);
                    return Ok(PersistencyResult {
                        value: witness.len(),
                        witness,
                        nodes_explored: explored,
                        optimal: true,
                    });
                }
                next.push(child);
            }
        }
        if next.is_empty() {
            unreachable!("measuring every vertex always reaches an edgeless graph");
        }
        frontier = next;
    }
}

fn unwind(parent: &HashMap<Key, (Key, (usize, Pauli))>, start: &Key, mut key: Key) -> Vec<(usize, Pauli)> {
    let mut moves = Vec::new();
    while &key != start {
        let (prev, mv) = parent[&key].clone();
        moves.push(mv);
        key = prev;
    }
    moves.reverse();
    moves
}

/// Upper bound by Z-measuring a highest-degree vertex until no edge is left.
pub fn greedy_persistency(g: &Graph) -> PersistencyResult {
    let mut h = g.clone();
    let mut witness = Vec::new();
    while !h.is_edgeless() {
        let v = h
            .vertices()
            .max_by_key(|&v| (h.degree(v), std::cmp::Reverse(v)))
            .expect("a graph with edges has vertices");
        apply_pauli(&mut h, v, Pauli::Z).expect("vertex is present");
        witness.push((v, Pauli::Z));
    }
    PersistencyResult {
        value: witness.len(),
        nodes_explored: witness.len() as u64,
        witness,
        optimal: false,
    }
}

/// Upper bound on the base-2 geometric measure of the graph state: each
/// Pauli measurement costs at most one unit.
pub fn egeom_upper_from_persistency(g: &Graph, budget_nodes: u64) -> Result<usize> {
    pauli_persistency(g, budget_nodes).map(|r| r.value)
}
