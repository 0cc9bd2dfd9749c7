//! Eigenvalue counting by Sylvester inertia.
//!
//! `H` is first brought to symmetric tridiagonal form `T = Q^T H Q` by
//! Householder reflections. For a shift `σ`, the LDLᵀ factorization of
//! `T - σ` has pivots
//!
//! ```text
//! d_0 = a_0 - σ,    d_i = (a_i - σ) - b_{i-1}^2 / d_{i-1},
//! ```
//!
//! and the number of negative pivots equals the number of eigenvalues of `H`
//! below `σ` (congruence preserves inertia). One reduction serves any number
//! of shifts at `O(n)` each.

use crate::error::{Error, Result};
use crate::operator::Hamiltonian;

use super::eigen::{eigenvalues, Interval, DENSE_BUDGET};

/// Relative offset applied outside each endpoint so that closed intervals
/// count endpoint ties as inside.
pub const ENDPOINT_OFFSET: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct InertiaCounter {
    diag: Vec<f64>,
    off: Vec<f64>,
    scale: f64,
}

impl InertiaCounter {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let n = h.n();
        if n > DENSE_BUDGET {
            return Err(Error::Budget {
                n,
                budget: DENSE_BUDGET,
            });
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = h.diagonal()[i];
            for &(j, x) in h.row(i) {
                a[i * n + j] += x;
            }
        }
        let (diag, off) = tridiagonalize(&mut a, n);
        Ok(Self {
            diag,
            off,
            scale: h.norm_bound().max(f64::MIN_POSITIVE),
        })
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> Result<usize> {
        let mut negatives = 0;
        let mut prev = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / prev };
            let pivot = (a - sigma) - coupling;
            if pivot == 0.0 {
                return Err(Error::Breakdown(i));
            }
            if pivot < 0.0 {
                negatives += 1;
            }
            prev = pivot;
        }
        Ok(negatives)
    }

    /// `|Λ_I|` for the closed interval `I`.
    pub fn count(&self, interval: &Interval) -> Result<usize> {
        let eps = ENDPOINT_OFFSET * self.scale;
        let upper = self.count_below(interval.hi() + eps)?;
        let lower = self.count_below(interval.lo() - eps)?;
        Ok(upper.saturating_sub(lower))
    }
}

/// Householder reduction of the dense symmetric `a` (row-major, destroyed)
/// to tridiagonal form. Returns `(diagonal, off-diagonal)`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let m = k + 1;
        let norm = (m..n).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = a[m * n + k];
        let alpha = if x0 > 0.0 { -norm } else { norm };
        for i in m..n {
            v[i] = a[i * n + k];
        }
        v[m] -= alpha;
        let vnorm = (m..n).map(|i| v[i] * v[i]).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            off[k] = x0;
            continue;
        }
        for x in &mut v[m..n] {
            *x /= vnorm;
        }
        // p = A v on the trailing block
        for i in m..n {
            p[i] = (m..n).map(|j| a[i * n + j] * v[j]).sum();
        }
        let vp: f64 = (m..n).map(|i| v[i] * p[i]).sum();
        for i in m..n {
            p[i] -= vp * v[i];
        }
        for i in m..n {
            for j in m..n {
                a[i * n + j] -= 2.0 * (v[i] * p[j] + p[i] * v[j]);
            }
        }
        off[k] = alpha;
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1) * n + (n - 2)];
    }
    let diag = (0..n).map(|i| a[i * n + i]).collect();
    (diag, off)
}

/// `|Λ_I|` by inertia, falling back to a dense eigenvalue count when the
/// factorization hits an exact zero pivot.
pub fn count_in_interval(h: &Hamiltonian, interval: &Interval) -> Result<usize> {
    match InertiaCounter::new(h)?.count(interval) {
        Err(Error::Breakdown(_)) => {
            let values = eigenvalues(h)?;
            Ok(super::eigen::sorted_range(&values, interval).len())
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_regular, RegularGraph};
    use crate::operator::{assemble, DisorderField};
    use crate::spectra::eigensystem;

    #[test]
    fn whole_spectrum_and_far_right() {
        let g = sample_regular(80, 3, 4).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(80, 4), 0.5).unwrap();
        let wide = h.norm_bound() + 1.0;
        assert_eq!(count_in_interval(&h, &Interval::new(-wide, wide).unwrap()).unwrap(), 80);
        assert_eq!(count_in_interval(&h, &Interval::new(wide, wide + 1.0).unwrap()).unwrap(), 0);
    }

    #[test]
    fn k4_degenerate_eigenvalue_is_counted_with_multiplicity() {
        let h = assemble(&RegularGraph::complete(4), &DisorderField::zeros(4), 1.0).unwrap();
        let c = InertiaCounter::new(&h).unwrap();
        assert_eq!(c.count(&Interval::new(0.5, 1.5).unwrap()).unwrap(), 3);
        assert_eq!(c.count(&Interval::new(-3.0, -3.0).unwrap()).unwrap(), 1);
        assert_eq!(c.count(&Interval::new(1.0, 1.0).unwrap()).unwrap(), 3);
    }

    #[test]
    fn breakdown_falls_back() {
        // a zero-hopping operator with a site exactly at the shifted endpoint
        let h = assemble(&RegularGraph::complete(4), &DisorderField::from_values(vec![0.0, 1.0, 2.0, 3.0], 0), 0.0).unwrap();
        let c = InertiaCounter::new(&h).unwrap();
        assert!(matches!(c.count_below(1.0), Err(Error::Breakdown(_))));
        assert_eq!(count_in_interval(&h, &Interval::new(0.5, 2.5).unwrap()).unwrap(), 2);
    }

    #[test]
    fn agrees_with_eigensolver() {
        for seed in 0..5 {
            let g = sample_regular(150, 3, seed).unwrap();
            let h = assemble(&g, &DisorderField::gaussian(150, seed), 0.5).unwrap();
            let es = eigensystem(&h).unwrap();
            let c = InertiaCounter::new(&h).unwrap();
            for k in 0..20 {
                let lo = -3.0 + 0.25 * k as f64;
                let i = Interval::new(lo, lo + 0.7).unwrap();
                assert_eq!(c.count(&i).unwrap(), es.count(&i));
            }
        }
    }
}
