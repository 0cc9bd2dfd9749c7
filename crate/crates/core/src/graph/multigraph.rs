use serde::{Deserialize, Serialize};

use super::pairing::Pairing;

/// The multigraph obtained by projecting a pairing onto its vertices.
///
/// `adjacency[v]` lists `(neighbor, multiplicity)` for neighbors other than
/// `v`, sorted by neighbor. Loops are kept apart in `loop_count`; each loop
/// contributes 2 to the diagonal of the adjacency matrix, so every row sum is
/// `d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    n: usize,
    d: usize,
    adjacency: Vec<Vec<(usize, usize)>>,
    loop_count: Vec<usize>,
}

impl MultiGraph {
    pub fn from_pairing(p: &Pairing) -> Self {
        let n = p.n();
        let mut loop_count = vec![0; n];
        let mut raw: Vec<Vec<usize>> = vec![Vec::with_capacity(p.d()); n];
        for &(a, b) in p.matches() {
            if a.vertex == b.vertex {
                loop_count[a.vertex] += 1;
            } else {
                raw[a.vertex].push(b.vertex);
                raw[b.vertex].push(a.vertex);
            }
        }
        let adjacency = raw
            .into_iter()
            .map(|mut nb| {
                nb.sort_unstable();
                let mut out: Vec<(usize, usize)> = Vec::with_capacity(nb.len());
                for w in nb {
                    match out.last_mut() {
                        Some((last, m)) if *last == w => *m += 1,
                        _ => out.push((w, 1)),
                    }
                }
                out
            })
            .collect();
        Self {
            n,
            d: p.d(),
            adjacency,
            loop_count,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn loop_count(&self, v: usize) -> usize {
        self.loop_count[v]
    }

    /// Row sum of the adjacency matrix at `v`.
    pub fn row_sum(&self, v: usize) -> usize {
        self.adjacency[v].iter().map(|&(_, m)| m).sum::<usize>() + 2 * self.loop_count[v]
    }

    /// Adjacency matrix entry, with loops counted twice on the diagonal.
    pub fn entry(&self, u: usize, v: usize) -> usize {
        if u == v {
            return 2 * self.loop_count[u];
        }
        self.adjacency[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|k| self.adjacency[u][k].1)
            .unwrap_or(0)
    }

    /// No loops and no repeated edges.
    pub fn is_simple(&self) -> bool {
        self.loop_count.iter().all(|&l| l == 0)
            && self.adjacency.iter().all(|row| row.iter().all(|&(_, m)| m == 1))
    }
}

pub fn pairing_to_multigraph(p: &Pairing) -> MultiGraph {
    MultiGraph::from_pairing(p)
}

pub fn is_simple(g: &MultiGraph) -> bool {
    g.is_simple()
}
