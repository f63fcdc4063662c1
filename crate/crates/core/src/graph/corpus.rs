use super::Graph;
use crate::{Error, Result};

fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![usize::MAX; n]; n];
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            idx[u][v] = k;
            idx[v][u] = k;
            k += 1;
        }
    }
    idx
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// One representative of every isomorphism class of connected graphs on
/// `1..=max_vertices` vertices, ordered by vertex count and then by the
/// smallest edge mask in the class.
///
/// Edge sets are enumerated as bitmasks over vertex pairs; the first unseen
/// mask of each class becomes its representative and its whole orbit under
/// vertex permutations is marked.
pub fn connected_graph_corpus(max_vertices: usize) -> Result<Vec<Graph>> {
    if max_vertices > 7 {
        return Err(Error::invalid("max_vertices", "enumeration supports at most 7 vertices"));
    }
    let mut out = Vec::new();
    for n in 1..=max_vertices {
        let idx = pair_index(n);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        let total = 1usize << pairs.len();
        let mut seen = vec![false; total];
        for mask in 0..total {
            if seen[mask] {
                continue;
            }
            for perm in &perms {
                let image = pairs
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| mask >> k & 1 == 1)
                    .fold(0usize, |acc, (_, &(u, v))| acc | 1 << idx[perm[u]][perm[v]]);
                seen[image] = true;
            }
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(k, _)| mask >> k & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::from_edges(n, &edges)?;
            if g.is_connected() {
                out.push(g);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_counts() {
        let corpus = connected_graph_corpus(6).unwrap();
        let counts: Vec<usize> = (1..=6)
            .map(|n| corpus.iter().filter(|g| g.num_vertices() == n).count())
            .collect();
        assert_eq!(counts, [1, 1, 2, 6, 21, 112]);
    }
}
