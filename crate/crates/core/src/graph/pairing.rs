use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// A half-edge `(vertex, slot)` of the configuration model ground set
/// `[n] x [d]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdge {
    pub vertex: usize,
    pub slot: usize,
}

impl HalfEdge {
    pub fn new(vertex: usize, slot: usize) -> Self {
        Self { vertex, slot }
    }

    fn flat(self, d: usize) -> usize {
        self.vertex * d + self.slot
    }
}

/// How the four half-edges of two pairs `{a,b}`, `{c,d}` are re-matched.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchMode {
    /// `{a,c}, {b,d}`
    Cross,
    /// `{a,d}, {b,c}`
    Parallel,
}

/// A perfect matching of the half-edge set `[n] x [d]`.
///
/// Pairs keep the orientation in which they were produced. Equality is
/// therefore structural: two pairings compare equal only if they list the
/// same pairs, in the same order, with the same orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    n: usize,
    d: usize,
    matches: Vec<(HalfEdge, HalfEdge)>,
}

pub(crate) fn check_regular_params(n: usize, d: usize) -> Result<()> {
    if d < 3 {
        return Err(Error::param(format!("degree d = {d} must be at least 3")));
    }
    if n < d + 1 {
        return Err(Error::param(format!("n = {n} must be at least d + 1 = {}", d + 1)));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::param(format!("n * d = {} must be even", n * d)));
    }
    Ok(())
}

/// Uniformly random pairing of `[n] x [d]`: a Fisher-Yates shuffle of the
/// half-edges followed by pairing consecutive entries.
pub fn sample_pairing(n: usize, d: usize, seed: u64) -> Result<Pairing> {
    check_regular_params(n, d)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_pairing_with(n, d, &mut rng))
}

pub(crate) fn sample_pairing_with<R: rand::Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Pairing {
    let mut half_edges: Vec<HalfEdge> = (0..n)
        .flat_map(|v| (0..d).map(move |a| HalfEdge::new(v, a)))
        .collect();
    half_edges.shuffle(rng);
    let matches = half_edges.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Pairing { n, d, matches }
}

impl Pairing {
    /// Builds a pairing from explicit matches, checking that every half-edge
    /// of `[n] x [d]` is covered exactly once.
    pub fn from_matches(n: usize, d: usize, matches: Vec<(HalfEdge, HalfEdge)>) -> Result<Self> {
        if (n * d) % 2 != 0 {
            return Err(Error::param(format!("n * d = {} must be even", n * d)));
        }
        if matches.len() != n * d / 2 {
            return Err(Error::DimensionMismatch {
                expected: n * d / 2,
                found: matches.len(),
            });
        }
        let mut seen = vec![false; n * d];
        for &(a, b) in &matches {
            for h in [a, b] {
                if h.vertex >= n || h.slot >= d {
                    return Err(Error::param(format!("half-edge {h:?} outside [{n}] x [{d}]")));
                }
                let k = h.flat(d);
                if seen[k] {
                    return Err(Error::param(format!("half-edge {h:?} matched twice")));
                }
                seen[k] = true;
            }
        }
        Ok(Self { n, d, matches })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matches(&self) -> &[(HalfEdge, HalfEdge)] {
        &self.matches
    }

    pub fn len(&self) -> usize {
        self.matches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matches.is_empty()
    }

    /// Partner of a half-edge, by linear scan.
    pub fn partner(&self, h: HalfEdge) -> Option<HalfEdge> {
        self.matches.iter().find_map(|&(a, b)| {
            if a == h {
                Some(b)
            } else if b == h {
                Some(a)
            } else {
                None
            }
        })
    }

    /// True when every half-edge of `[n] x [d]` occurs in exactly one pair.
    pub fn covers_exactly_once(&self) -> bool {
        let mut count = vec![0u8; self.n * self.d];
        for &(a, b) in &self.matches {
            for h in [a, b] {
                if h.vertex >= self.n || h.slot >= self.d {
                    return false;
                }
                count[h.flat(self.d)] += 1;
            }
        }
        count.iter().all(|&c| c == 1)
    }

    /// Replaces pairs `{a,b}` (at `pair_i`) and `{c,d}` (at `pair_j`) by one
    /// of the two alternative matchings of the four half-edges.
    ///
    /// Orientation is chosen so that applying the same switching twice
    /// restores the original pairing exactly.
    pub fn switch_pairs(&self, pair_i: usize, pair_j: usize, mode: SwitchMode) -> Result<Pairing> {
        let len = self.matches.len();
        for index in [pair_i, pair_j] {
            if index >= len {
                return Err(Error::PairIndex { index, len });
            }
        }
        if pair_i == pair_j {
            return Err(Error::SamePair(pair_i));
        }
        let (a, b) = self.matches[pair_i];
        let (c, d) = self.matches[pair_j];
        let mut matches = self.matches.clone();
        match mode {
            SwitchMode::Cross => {
                matches[pair_i] = (a, c);
                matches[pair_j] = (b, d);
            }
            SwitchMode::Parallel => {
                matches[pair_i] = (a, d);
                matches[pair_j] = (c, b);
            }
        }
        Ok(Pairing {
            n: self.n,
            d: self.d,
            matches,
        })
    }
}

/// Free-function form of [`Pairing::switch_pairs`].
pub fn switch_pairs(p: &Pairing, pair_i: usize, pair_j: usize, mode: SwitchMode) -> Result<Pairing> {
    p.switch_pairs(pair_i, pair_j, mode)
}
