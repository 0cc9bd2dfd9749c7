use std::collections::VecDeque;
use std::io::Write;

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_ball, Ball, MultiGraph, RegularGraph};

use super::disorder::DisorderField;

/// What a Hamiltonian lives on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Host {
    Graph { simple: bool },
    TreeBall { radius: usize },
    Ball { root: usize, radius: usize },
    Decoupled { root: usize, radius: usize },
}

/// Either kind of graph accepted by [`assemble`].
#[derive(Clone, Copy, Debug)]
pub enum GraphRef<'a> {
    Simple(&'a RegularGraph),
    Multi(&'a MultiGraph),
}

impl<'a> From<&'a RegularGraph> for GraphRef<'a> {
    fn from(g: &'a RegularGraph) -> Self {
        GraphRef::Simple(g)
    }
}

impl<'a> From<&'a MultiGraph> for GraphRef<'a> {
    fn from(g: &'a MultiGraph) -> Self {
        GraphRef::Multi(g)
    }
}

/// Sparse real symmetric operator `-t A + diag(V)`.
///
/// Off-diagonal entries are stored per row, sorted by column, and mirrored
/// exactly. Structural entries are kept even when `t = 0`, so graph distances
/// read off the operator remain those of the host graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    d: usize,
    t: f64,
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    host: Host,
    seed: u64,
}

/// Assembles `-t A + diag(v)`. Loops of a multigraph add `-2t` per loop to
/// the diagonal; an edge of multiplicity `m` gives an off-diagonal `-m t`.
pub fn assemble<'a>(g: impl Into<GraphRef<'a>>, v: &DisorderField, t: f64) -> Result<Hamiltonian> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::param(format!("hopping t = {t} must be finite and nonnegative")));
    }
    let g = g.into();
    let (n, d) = match g {
        GraphRef::Simple(g) => (g.n(), g.d()),
        GraphRef::Multi(g) => (g.n(), g.d()),
    };
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let mut diag = v.values().to_vec();
    let rows = match g {
        GraphRef::Simple(g) => (0..n)
            .map(|u| g.neighbors(u).iter().map(|&w| (w, -t)).collect())
            .collect(),
        GraphRef::Multi(g) => {
            for (u, x) in diag.iter_mut().enumerate() {
                *x -= 2.0 * t * g.loop_count(u) as f64;
            }
            (0..n)
                .map(|u| g.neighbors(u).iter().map(|&(w, m)| (w, -t * m as f64)).collect())
                .collect()
        }
    };
    let simple = match g {
        GraphRef::Simple(_) => true,
        GraphRef::Multi(g) => g.is_simple(),
    };
    Ok(Hamiltonian {
        d,
        t,
        diag,
        rows,
        host: Host::Graph { simple },
        seed: v.seed(),
    })
}

impl Hamiltonian {
    pub(crate) fn from_parts(d: usize, t: f64, diag: Vec<f64>, rows: Vec<Vec<(usize, f64)>>, host: Host, seed: u64) -> Self {
        debug_assert_eq!(diag.len(), rows.len());
        Self {
            d,
            t,
            diag,
            rows,
            host,
            seed,
        }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Degree bound of the host graph.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn host(&self) -> &Host {
        &self.host
    }

    /// Seed of the disorder field the diagonal was built from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0.0)
    }

    pub fn nnz(&self) -> usize {
        self.n() + self.rows.iter().map(Vec::len).sum::<usize>()
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let n = self.n();
        let mut m = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, x) in &self.rows[i] {
                m[(i, j)] += x;
            }
        }
        m
    }

    /// `y = (H - z) x`.
    pub fn shifted_apply(&self, z: c64, x: &[c64]) -> Vec<c64> {
        (0..self.n())
            .map(|i| {
                let mut acc = (self.diag[i] - z) * x[i];
                for &(j, h) in &self.rows[i] {
                    acc += x[j] * h;
                }
                acc
            })
            .collect()
    }

    /// Largest `|H_ij - H_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for &(j, x) in &self.rows[i] {
                worst = worst.max((x - self.entry(j, i)).abs());
            }
        }
        worst
    }

    /// Gershgorin bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        (0..self.n())
            .map(|i| self.diag[i].abs() + self.rows[i].iter().map(|&(_, x)| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn ball(&self, root: usize, r: usize) -> Ball {
        assert!(root < self.n(), "root {root} outside operator of order {}", self.n());
        bfs_ball(self.n(), root, r, |u| self.rows[u].iter().map(|&(w, _)| w))
    }

    /// Graph distance from the set `sources` to every vertex; `None` when
    /// unreachable.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &(w, _) in &self.rows[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `dist(X, Y)`, `None` when no path joins the sets.
    pub fn set_distance(&self, xs: &[usize], ys: &[usize]) -> Option<usize> {
        let dist = self.distances_from(xs);
        ys.iter().filter_map(|&y| dist[y]).min()
    }

    /// Coordinate dump: one `i j value` line per stored entry, row-major.
    pub fn write_coo<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.n() {
            let mut line: Vec<(usize, f64)> = self.rows[i].clone();
            line.push((i, self.diag[i]));
            line.sort_by_key(|&(j, _)| j);
            for (j, x) in line {
                writeln!(out, "{i} {j} {x}")?;
            }
        }
        Ok(())
    }

    /// JSON sidecar accompanying [`Hamiltonian::write_coo`].
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n(),
            "d": self.d,
            "t": self.t,
            "seed": self.seed,
            "host": self.host,
        })
    }
}

/// Removes every edge between `B_r(root)` and its complement.
pub fn decouple(h: &Hamiltonian, root: usize, r: usize) -> Hamiltonian {
    let ball = h.ball(root, r);
    let mut inside = vec![false; h.n()];
    for &v in &ball.vertices {
        inside[v] = true;
    }
    let rows = (0..h.n())
        .map(|i| {
            h.rows[i]
                .iter()
                .copied()
                .filter(|&(j, _)| inside[i] == inside[j])
                .collect()
        })
        .collect();
    Hamiltonian {
        d: h.d,
        t: h.t,
        diag: h.diag.clone(),
        rows,
        host: Host::Decoupled { root, radius: r },
        seed: h.seed,
    }
}

/// Restriction of `h` to `B_r(root)`, re-indexed in BFS order (root at
/// index 0). Returns the operator and the global label of each index.
pub fn restrict_ball(h: &Hamiltonian, root: usize, r: usize) -> (Hamiltonian, Vec<usize>) {
    let ball = h.ball(root, r);
    let restricted = restrict_to(h, &ball);
    (restricted, ball.vertices)
}

pub(crate) fn restrict_to(h: &Hamiltonian, ball: &Ball) -> Hamiltonian {
    let mut pos = vec![usize::MAX; h.n()];
    for (k, &v) in ball.vertices.iter().enumerate() {
        pos[v] = k;
    }
    let diag = ball.vertices.iter().map(|&v| h.diag[v]).collect();
    let rows = ball
        .vertices
        .iter()
        .map(|&u| {
            let mut row: Vec<(usize, f64)> = h.rows[u]
                .iter()
                .filter(|&&(w, _)| pos[w] != usize::MAX)
                .map(|&(w, x)| (pos[w], x))
                .collect();
            row.sort_by_key(|&(j, _)| j);
            row
        })
        .collect();
    Hamiltonian {
        d: h.d,
        t: h.t,
        diag,
        rows,
        host: Host::Ball {
            root: ball.root,
            radius: ball.radius,
        },
        seed: h.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pairing_to_multigraph, sample_pairing, sample_regular};

    #[test]
    fn zero_hopping_is_diagonal() {
        let g = RegularGraph::complete(4);
        let v = DisorderField::gaussian(4, 1);
        let h = assemble(&g, &v, 0.0).unwrap();
        let m = h.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { v.values()[i] } else { 0.0 };
                assert_eq!(m[(i, j)], want);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let g = RegularGraph::complete(4);
        let v = DisorderField::zeros(5);
        assert!(matches!(
            assemble(&g, &v, 1.0),
            Err(Error::DimensionMismatch { expected: 4, found: 5 })
        ));
        assert!(assemble(&g, &DisorderField::zeros(4), -1.0).is_err());
    }

    #[test]
    fn multigraph_entries() {
        for seed in 0..30 {
            let p = sample_pairing(8, 3, seed).unwrap();
            let g = pairing_to_multigraph(&p);
            let v = DisorderField::gaussian(8, seed);
            let h = assemble(&g, &v, 0.7).unwrap();
            assert_eq!(h.max_asymmetry(), 0.0);
            for i in 0..8 {
                assert_eq!(h.entry(i, i), v.values()[i] - 2.0 * 0.7 * g.loop_count(i) as f64);
                for &(_, x) in h.row(i) {
                    assert!(x == -0.7 || x == -1.4 || x == -2.1);
                }
            }
        }
    }

    #[test]
    fn decouple_large_radius_is_identity_and_idempotent() {
        let g = sample_regular(40, 3, 2).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(40, 2), 0.5).unwrap();
        let full = decouple(&h, 0, 40);
        assert_eq!(full.to_dense(), h.to_dense());
        let once = decouple(&h, 3, 2);
        let twice = decouple(&once, 3, 2);
        assert_eq!(once.to_dense(), twice.to_dense());
        assert_eq!(once.max_asymmetry(), 0.0);
    }

    #[test]
    fn decouple_radius_zero_isolates_root() {
        let g = RegularGraph::complete(4);
        let h = assemble(&g, &DisorderField::gaussian(4, 5), 1.0).unwrap();
        let dec = decouple(&h, 0, 0);
        assert!(dec.row(0).is_empty());
        assert_eq!(dec.entry(0, 0), h.entry(0, 0));
        assert_eq!(dec.entry(1, 2), -1.0);
    }

    #[test]
    fn restriction_radius_zero() {
        let g = sample_regular(30, 3, 8).unwrap();
        let v = DisorderField::gaussian(30, 8);
        let h = assemble(&g, &v, 0.5).unwrap();
        let (r0, labels) = restrict_ball(&h, 7, 0);
        assert_eq!(labels, vec![7]);
        assert_eq!(r0.n(), 1);
        assert_eq!(r0.entry(0, 0), v.values()[7]);
        let (r2, labels) = restrict_ball(&h, 7, 2);
        for (k, &u) in labels.iter().enumerate() {
            assert_eq!(r2.entry(k, k), h.entry(u, u));
        }
    }

    #[test]
    fn distances() {
        let g = sample_regular(50, 3, 3).unwrap();
        let h = assemble(&g, &DisorderField::zeros(50), 1.0).unwrap();
        let b = h.ball(0, 3);
        let dist = h.distances_from(&[0]);
        for (k, &v) in b.vertices.iter().enumerate() {
            assert_eq!(dist[v], Some(b.dist[k]));
        }
        assert_eq!(h.set_distance(&[0], &[0]), Some(0));
    }

    #[test]
    fn coo_dump_and_sidecar() {
        let g = RegularGraph::complete(4);
        let h = assemble(&g, &DisorderField::zeros(4), 1.0).unwrap();
        let mut buf = Vec::new();
        h.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 16);
        assert!(text.starts_with("0 0 0\n0 1 -1\n"));
        let side = h.sidecar();
        assert_eq!(side["n"], 4);
        assert_eq!(side["host"]["kind"], "graph");
    }
}
