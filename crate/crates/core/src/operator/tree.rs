use crate::error::{Error, Result};
use crate::graph::tree_ball_size;

use super::disorder::DisorderField;
use super::hamiltonian::{Hamiltonian, Host};

/// Default vertex cap for truncated trees.
pub const DEFAULT_TREE_CAP: usize = 10_000_000;

/// Depth-`r` truncation of the rooted `d`-regular tree, vertices in BFS
/// order: the root has `d` children, every other internal vertex `d - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeBall {
    d: usize,
    r: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    disorder: DisorderField,
}

impl TreeBall {
    pub fn generate(d: usize, r: usize, disorder_seed: u64, cap: usize) -> Result<Self> {
        let size = Self::checked_size(d, r, cap)?;
        Self::with_disorder(d, r, DisorderField::gaussian(size, disorder_seed), cap)
    }

    /// Uses an explicit field; its length must equal the ball size.
    pub fn with_disorder(d: usize, r: usize, disorder: DisorderField, cap: usize) -> Result<Self> {
        let size = Self::checked_size(d, r, cap)?;
        if disorder.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: disorder.len(),
            });
        }
        let mut parent = Vec::with_capacity(size);
        let mut depth = Vec::with_capacity(size);
        parent.push(None);
        depth.push(0);
        let mut k = 0;
        while k < parent.len() {
            if depth[k] < r {
                let children = if k == 0 { d } else { d - 1 };
                for _ in 0..children {
                    parent.push(Some(k));
                    depth.push(depth[k] + 1);
                }
            }
            k += 1;
        }
        debug_assert_eq!(parent.len(), size);
        Ok(Self {
            d,
            r,
            parent,
            depth,
            disorder,
        })
    }

    fn checked_size(d: usize, r: usize, cap: usize) -> Result<usize> {
        if d < 3 {
            return Err(Error::param(format!("tree degree d = {d} must be at least 3")));
        }
        match tree_ball_size(d, r) {
            Some(s) if s <= cap as u128 => Ok(s as usize),
            s => Err(Error::SizeOverflow {
                d,
                r,
                vertices: s.unwrap_or(u128::MAX),
                cap,
            }),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, k: usize) -> Option<usize> {
        self.parent[k]
    }

    pub fn depth(&self, k: usize) -> usize {
        self.depth[k]
    }

    pub fn disorder(&self) -> &DisorderField {
        &self.disorder
    }

    pub fn hamiltonian(&self, t: f64) -> Hamiltonian {
        let n = self.len();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (k, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                rows[p].push((k, -t));
                rows[k].push((p, -t));
            }
        }
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
        }
        Hamiltonian::from_parts(
            self.d,
            t,
            self.disorder.values().to_vec(),
            rows,
            Host::TreeBall { radius: self.r },
            self.disorder.seed(),
        )
    }
}

/// Hamiltonian of the depth-`r` tree ball with fresh Gaussian disorder,
/// using [`DEFAULT_TREE_CAP`].
pub fn build_tree_ball(d: usize, r: usize, disorder_seed: u64, t: f64) -> Result<Hamiltonian> {
    Ok(TreeBall::generate(d, r, disorder_seed, DEFAULT_TREE_CAP)?.hamiltonian(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_zero_is_single_site() {
        let h = build_tree_ball(3, 0, 4, 1.0).unwrap();
        assert_eq!(h.n(), 1);
        assert_eq!(h.entry(0, 0), DisorderField::gaussian(1, 4).values()[0]);
    }

    #[test]
    fn radius_one_star() {
        let h = build_tree_ball(3, 1, 4, 0.3).unwrap();
        assert_eq!(h.n(), 4);
        for leaf in 1..4 {
            assert_eq!(h.entry(0, leaf), -0.3);
            assert_eq!(h.row(leaf).len(), 1);
        }
    }

    #[test]
    fn counts_and_degrees() {
        let tree = TreeBall::generate(3, 3, 1, DEFAULT_TREE_CAP).unwrap();
        assert_eq!(tree.len(), 22);
        let h = tree.hamiltonian(1.0);
        assert_eq!(h.row(0).len(), 3);
        for k in 1..tree.len() {
            let expect = if tree.depth(k) < 3 { 3 } else { 1 };
            assert_eq!(h.row(k).len(), expect);
        }
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            TreeBall::generate(20, 6, 0, 1000),
            Err(Error::SizeOverflow { cap: 1000, .. })
        ));
    }
}
