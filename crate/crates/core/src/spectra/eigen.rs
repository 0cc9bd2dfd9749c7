use std::ops::Range;

use faer::{c64, Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Hamiltonian;

/// Largest order handled by the dense eigensolver.
pub const DENSE_BUDGET: usize = 8000;

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::param(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Self { lo, hi })
    }

    /// `[center - half_width, center + half_width]`.
    pub fn centered(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Orthonormal eigendecomposition, eigenvalues ascending. Column `k` of
/// `vectors` is the eigenvector of `values[k]`, with its largest-magnitude
/// entry made positive.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Mat<f64>,
}

fn check_budget(h: &Hamiltonian) -> Result<()> {
    if h.n() > DENSE_BUDGET {
        return Err(Error::Budget {
            n: h.n(),
            budget: DENSE_BUDGET,
        });
    }
    Ok(())
}

pub fn eigensystem(h: &Hamiltonian) -> Result<EigenSystem> {
    check_budget(h)?;
    let dense = h.to_dense();
    let evd = dense
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let values: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let mut vectors = evd.U().to_owned();
    for k in 0..vectors.ncols() {
        let col = vectors.col(k);
        let mut pivot = 0;
        for j in 1..col.nrows() {
            if col[j].abs() > col[pivot].abs() {
                pivot = j;
            }
        }
        if col[pivot] < 0.0 {
            for j in 0..vectors.nrows() {
                vectors[(j, k)] = -vectors[(j, k)];
            }
        }
    }
    Ok(EigenSystem { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues(h: &Hamiltonian) -> Result<Vec<f64>> {
    check_budget(h)?;
    h.to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Factorization(format!("{e:?}")))
}

/// Indices `k` with `values[k]` in the closed interval, for sorted values.
pub fn sorted_range(values: &[f64], interval: &Interval) -> Range<usize> {
    let start = values.partition_point(|&x| x < interval.lo);
    let end = values.partition_point(|&x| x <= interval.hi);
    start..end.max(start)
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> MatRef<'_, f64> {
        self.vectors.as_ref()
    }

    /// `u_k(j)`.
    pub fn amplitude(&self, k: usize, j: usize) -> f64 {
        self.vectors[(j, k)]
    }

    pub fn range(&self, interval: &Interval) -> Range<usize> {
        sorted_range(&self.values, interval)
    }

    /// `|Λ_I|`.
    pub fn count(&self, interval: &Interval) -> usize {
        self.range(interval).len()
    }

    /// Diagonal of `(H - z)^{-1}` from the spectral decomposition.
    pub fn resolvent_diagonal(&self, z: c64) -> Vec<c64> {
        let weights: Vec<c64> = self.values.iter().map(|&l| (c64::new(l, 0.0) - z).inv()).collect();
        let n = self.n();
        let mut out = vec![c64::new(0.0, 0.0); n];
        for (k, w) in weights.iter().enumerate() {
            let col = self.vectors.col(k);
            for (j, o) in out.iter_mut().enumerate() {
                let a = col[j];
                *o += w * (a * a);
            }
        }
        out
    }

    pub fn resolvent_entry(&self, i: usize, j: usize, z: c64) -> c64 {
        self.values
            .iter()
            .enumerate()
            .map(|(k, &l)| (c64::new(l, 0.0) - z).inv() * (self.vectors[(i, k)] * self.vectors[(j, k)]))
            .sum()
    }

    /// Full resolvent `U diag(1 / (λ - z)) U^T`.
    pub fn resolvent_matrix(&self, z: c64) -> Mat<c64> {
        let n = self.n();
        let w: Vec<c64> = self.values.iter().map(|&l| (c64::new(l, 0.0) - z).inv()).collect();
        let scaled_re = Mat::<f64>::from_fn(n, n, |j, k| self.vectors[(j, k)] * w[k].re);
        let scaled_im = Mat::<f64>::from_fn(n, n, |j, k| self.vectors[(j, k)] * w[k].im);
        let re = &scaled_re * self.vectors.transpose();
        let im = &scaled_im * self.vectors.transpose();
        Mat::<c64>::from_fn(n, n, |i, j| c64::new(re[(i, j)], im[(i, j)]))
    }

    /// `(1/n) Tr (H - z)^{-1}`.
    pub fn stieltjes(&self, z: c64) -> c64 {
        stieltjes_from_values(&self.values, z)
    }

    /// `max_k ||H u_k - λ_k u_k||`.
    pub fn max_residual(&self, h: &Hamiltonian) -> f64 {
        let n = self.n();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let col = self.vectors.col(k);
            let mut norm2 = 0.0;
            for i in 0..n {
                let mut acc = (h.diagonal()[i] - self.values[k]) * col[i];
                for &(j, x) in h.row(i) {
                    acc += x * col[j];
                }
                norm2 += acc * acc;
            }
            worst = worst.max(norm2.sqrt());
        }
        worst
    }

    /// `max |U^T U - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.vectors.transpose() * &self.vectors;
        let n = self.n();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).abs());
            }
        }
        worst
    }
}

pub fn stieltjes_from_values(values: &[f64], z: c64) -> c64 {
    let sum: c64 = values.iter().map(|&l| (c64::new(l, 0.0) - z).inv()).sum();
    sum / values.len() as f64
}
