use std::collections::HashSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::multigraph::MultiGraph;
use super::pairing::{check_regular_params, sample_pairing_with};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Simple `d`-regular graph on `[n]` with sorted neighbor lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    neighbors: Vec<Vec<usize>>,
}

impl RegularGraph {
    /// Validates simplicity, symmetry and regularity.
    pub fn from_neighbors(n: usize, d: usize, mut neighbors: Vec<Vec<usize>>) -> Result<Self> {
        if neighbors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: neighbors.len(),
            });
        }
        for (v, row) in neighbors.iter_mut().enumerate() {
            row.sort_unstable();
            if row.len() != d {
                return Err(Error::param(format!("vertex {v} has degree {}, expected {d}", row.len())));
            }
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("vertex {v} has a repeated neighbor")));
            }
            if row.iter().any(|&w| w == v || w >= n) {
                return Err(Error::param(format!("vertex {v} has a loop or out-of-range neighbor")));
            }
        }
        for (v, row) in neighbors.iter().enumerate() {
            for &w in row {
                if neighbors[w].binary_search(&v).is_err() {
                    return Err(Error::param(format!("edge {v}-{w} is not symmetric")));
                }
            }
        }
        Ok(Self { n, d, neighbors })
    }

    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut neighbors = vec![Vec::with_capacity(d); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge {u}-{v} outside [{n}]")));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        Self::from_neighbors(n, d, neighbors)
    }

    /// `None` when the multigraph has loops or multi-edges.
    pub fn from_multigraph(g: &MultiGraph) -> Option<Self> {
        if !g.is_simple() {
            return None;
        }
        let neighbors = (0..g.n())
            .map(|v| g.neighbors(v).iter().map(|&(w, _)| w).collect())
            .collect();
        Some(Self {
            n: g.n(),
            d: g.d(),
            neighbors,
        })
    }

    pub fn complete(n: usize) -> Self {
        let neighbors = (0..n).map(|v| (0..n).filter(|&w| w != v).collect()).collect();
        Self {
            n,
            d: n - 1,
            neighbors,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Plain-text edge list: header `n d`, then one `u v` line per edge with
    /// `u < v`, 0-indexed.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.n, self.d)?;
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines().enumerate();
        let (n, d) = loop {
            let (no, line) = lines.next().ok_or(Error::Parse {
                line: 0,
                msg: "missing header".into(),
            })?;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let nums = parse_pair(&line, no + 1)?;
            break nums;
        };
        let mut edges = Vec::with_capacity(n * d / 2);
        for (no, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (u, v) = parse_pair(&line, no + 1)?;
            if u >= v {
                return Err(Error::Parse {
                    line: no + 1,
                    msg: format!("expected u < v, got {u} {v}"),
                });
            }
            edges.push((u, v));
        }
        Self::from_edges(n, d, &edges)
    }
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line: line_no,
            msg: format!("expected two integers, got {line:?}"),
        }),
    }
}

/// Outcome of [`sample_simple_regular_counted`].
#[derive(Clone, Debug)]
pub struct SampledGraph {
    pub graph: RegularGraph,
    /// Number of pairings drawn, including the accepted one.
    pub attempts: usize,
}

/// Uniform simple `d`-regular graph by rejecting non-simple pairings.
pub fn sample_simple_regular(n: usize, d: usize, seed: u64, max_attempts: usize) -> Result<RegularGraph> {
    sample_simple_regular_counted(n, d, seed, max_attempts).map(|s| s.graph)
}

pub fn sample_simple_regular_counted(
    n: usize,
    d: usize,
    seed: u64,
    max_attempts: usize,
) -> Result<SampledGraph> {
    check_regular_params(n, d)?;
    if max_attempts == 0 {
        return Err(Error::param("max_attempts must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    for attempt in 1..=max_attempts {
        let p = sample_pairing_with(n, d, &mut rng);
        if let Some(graph) = RegularGraph::from_multigraph(&MultiGraph::from_pairing(&p)) {
            return Ok(SampledGraph {
                graph,
                attempts: attempt,
            });
        }
    }
    Err(Error::Exhausted {
        attempts: max_attempts,
    })
}

/// Simple `d`-regular graph by incremental pairing with local rejection
/// (Steger-Wormald). Asymptotically uniform for `d` small against `n`, and
/// usable at degrees where whole-pairing rejection has vanishing acceptance
/// rate (about `exp(-(d^2 - 1) / 4)`).
pub fn sample_regular_incremental(n: usize, d: usize, seed: u64, max_restarts: usize) -> Result<RegularGraph> {
    check_regular_params(n, d)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_restarts.max(1) {
        if let Some(edges) = try_incremental(n, d, &mut rng) {
            return RegularGraph::from_edges(n, d, &edges);
        }
    }
    Err(Error::Exhausted {
        attempts: max_restarts.max(1),
    })
}

fn try_incremental<R: rand::Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Option<Vec<(usize, usize)>> {
    let mut edges: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    while !stubs.is_empty() {
        stubs.shuffle(rng);
        let mut leftover = vec![0usize; n];
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u != v && !edges.contains(&(u, v)) {
                edges.insert((u, v));
            } else {
                leftover[u] += 1;
                leftover[v] += 1;
            }
        }
        let open: Vec<usize> = (0..n).filter(|&v| leftover[v] > 0).collect();
        if open.is_empty() {
            break;
        }
        // some pair of open vertices must still be joinable, else restart
        let joinable = open.iter().enumerate().any(|(k, &u)| {
            open[k + 1..].iter().any(|&v| !edges.contains(&(u, v)))
        });
        if !joinable {
            return None;
        }
        stubs = open
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, leftover[v]))
            .collect();
    }
    let mut out: Vec<_> = edges.into_iter().collect();
    out.sort_unstable();
    Some(out)
}

/// Expected number of pairings drawn by the rejection sampler at large `n`.
pub fn expected_rejection_attempts(d: usize) -> f64 {
    let d = d as f64;
    ((d * d - 1.0) / 4.0).exp()
}

/// Degrees up to this value use exact rejection sampling in [`sample_regular`].
pub const REJECTION_MAX_DEGREE: usize = 5;

/// Simple `d`-regular graph: exact rejection sampling when `d` is at most
/// [`REJECTION_MAX_DEGREE`], incremental pairing otherwise.
pub fn sample_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if d <= REJECTION_MAX_DEGREE {
        let budget = (200.0 * expected_rejection_attempts(d)).ceil() as usize;
        sample_simple_regular(n, d, seed, budget)
    } else {
        sample_regular_incremental(n, d, seed, 1000)
    }
}
