use std::collections::VecDeque;

use super::regular::RegularGraph;

/// Breadth-first ball `B_r(root)` of a graph.
///
/// `vertices` is the BFS order (root first, neighbors visited in ascending
/// order), which is the canonical rooted labelling used to compare a
/// tree-like ball with the truncated regular tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    pub root: usize,
    pub radius: usize,
    pub vertices: Vec<usize>,
    pub dist: Vec<usize>,
    /// BFS parent as a position in `vertices`; `None` for the root.
    pub parent: Vec<Option<usize>>,
    /// Induced adjacency in local (position) indices, sorted.
    pub local_adj: Vec<Vec<usize>>,
    pub has_cycle: bool,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Position of a global vertex inside the ball.
    pub fn position(&self, v: usize) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }
}

/// Explores `B_r(root)` by BFS over any neighbor oracle. A cycle is flagged
/// when a scanned edge reaches an already discovered ball vertex that is not
/// the BFS parent.
pub(crate) fn bfs_ball<'a, F, I>(n: usize, root: usize, r: usize, neighbors: F) -> Ball
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize> + 'a,
{
    const UNSEEN: usize = usize::MAX;
    let mut pos = vec![UNSEEN; n];
    let mut vertices = vec![root];
    let mut dist = vec![0];
    let mut parent = vec![None];
    pos[root] = 0;
    let mut has_cycle = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let u = vertices[k];
        for w in neighbors(u) {
            if w == u {
                has_cycle = true;
                continue;
            }
            let seen = pos[w];
            if seen == UNSEEN {
                if dist[k] < r {
                    pos[w] = vertices.len();
                    vertices.push(w);
                    dist.push(dist[k] + 1);
                    parent.push(Some(k));
                    queue.push_back(pos[w]);
                }
            } else if parent[k] != Some(seen) {
                has_cycle = true;
            }
        }
    }
    // Repeated neighbors (multi-edges) back to the parent are also cycles.
    let mut local_adj = vec![Vec::new(); vertices.len()];
    for (k, &u) in vertices.iter().enumerate() {
        let mut to_parent = 0;
        for w in neighbors(u) {
            let p = pos[w];
            if p != UNSEEN && w != u {
                local_adj[k].push(p);
                if Some(p) == parent[k] {
                    to_parent += 1;
                }
            }
        }
        if to_parent > 1 {
            has_cycle = true;
        }
        local_adj[k].sort_unstable();
    }
    Ball {
        root,
        radius: r,
        vertices,
        dist,
        parent,
        local_adj,
        has_cycle,
    }
}

pub fn ball(g: &RegularGraph, root: usize, r: usize) -> Ball {
    assert!(root < g.n(), "root {root} outside graph of order {}", g.n());
    bfs_ball(g.n(), root, r, |u| g.neighbors(u).iter().copied())
}

pub fn has_cycle_in_ball(g: &RegularGraph, root: usize, r: usize) -> bool {
    ball(g, root, r).has_cycle
}

/// Number of vertices of the radius-`r` ball of the `d`-regular tree,
/// `1 + d * sum_{k<r} (d-1)^k`. `None` on overflow.
pub fn tree_ball_size(d: usize, r: usize) -> Option<u128> {
    let mut total: u128 = 1;
    let mut shell: u128 = d as u128;
    for _ in 0..r {
        total = total.checked_add(shell)?;
        shell = shell.checked_mul(d.saturating_sub(1) as u128)?;
    }
    Some(total)
}
