use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::Hamiltonian;
use crate::spectra::{eigensystem, eigenvalues, stieltjes_from_values, EigenSystem};

/// Absolute residual tolerance for a unit right-hand side.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Orders up to this size use the dense eigendecomposition for diagonal
/// and trace queries.
pub const EIGEN_PATH_MAX: usize = 5000;

const REFINEMENT_STEPS: usize = 4;

/// `z = E + iη` with `η > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    energy: f64,
    eta: f64,
}

impl SpectralParameter {
    pub fn new(energy: f64, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite() && energy.is_finite()) {
            return Err(Error::param(format!("spectral parameter needs finite E and eta > 0, got E = {energy}, eta = {eta}")));
        }
        Ok(Self { energy, eta })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn z(&self) -> c64 {
        c64::new(self.energy, self.eta)
    }

    pub fn conj(&self) -> c64 {
        c64::new(self.energy, -self.eta)
    }
}

/// Column `G_{·j}(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventColumn {
    pub j: usize,
    pub values: Vec<c64>,
}

impl ResolventColumn {
    pub fn diagonal(&self) -> c64 {
        self.values[self.j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|g| g.norm_sqr()).sum()
    }
}

/// Sparse LU factorization of `H - z`, reused across right-hand sides.
pub struct ResolventSolver<'a> {
    h: &'a Hamiltonian,
    z: c64,
    lu: faer::sparse::linalg::solvers::Lu<usize, c64>,
    tolerance: f64,
}

impl<'a> ResolventSolver<'a> {
    pub fn new(h: &'a Hamiltonian, z: SpectralParameter) -> Result<Self> {
        Self::with_tolerance(h, z, SOLVER_TOLERANCE)
    }

    pub fn with_tolerance(h: &'a Hamiltonian, z: SpectralParameter, tolerance: f64) -> Result<Self> {
        let n = h.n();
        let z = z.z();
        let mut triplets = Vec::with_capacity(h.nnz());
        for i in 0..n {
            triplets.push(Triplet::new(i, i, c64::new(h.diagonal()[i], 0.0) - z));
            for &(j, x) in h.row(i) {
                triplets.push(Triplet::new(i, j, c64::new(x, 0.0)));
            }
        }
        let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let lu = a.sp_lu().map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self { h, z, lu, tolerance })
    }

    /// Solves `(H - z) x = b` with iterative refinement.
    pub fn solve(&self, b: &[c64]) -> Result<Vec<c64>> {
        let n = self.h.n();
        let rhs = Mat::<c64>::from_fn(n, 1, |i, _| b[i]);
        let first = self.lu.solve(&rhs);
        let mut x: Vec<c64> = (0..n).map(|i| first[(i, 0)]).collect();
        let mut residual = f64::INFINITY;
        for _ in 0..REFINEMENT_STEPS {
            let ax = self.h.shifted_apply(self.z, &x);
            let r: Vec<c64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
            residual = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if residual <= self.tolerance {
                return Ok(x);
            }
            let correction = self.lu.solve(&Mat::<c64>::from_fn(n, 1, |i, _| r[i]));
            for (xi, k) in x.iter_mut().zip(0..n) {
                *xi += correction[(k, 0)];
            }
        }
        let ax = self.h.shifted_apply(self.z, &x);
        let last = b
            .iter()
            .zip(&ax)
            .map(|(bi, ai)| (bi - ai).norm_sqr())
            .sum::<f64>()
            .sqrt();
        residual = residual.min(last);
        if residual <= self.tolerance {
            Ok(x)
        } else {
            Err(Error::Solver {
                residual,
                tolerance: self.tolerance,
            })
        }
    }

    pub fn column(&self, j: usize) -> Result<ResolventColumn> {
        let mut e = vec![c64::new(0.0, 0.0); self.h.n()];
        e[j] = c64::new(1.0, 0.0);
        Ok(ResolventColumn { j, values: self.solve(&e)? })
    }
}

pub fn resolvent_column(h: &Hamiltonian, z: SpectralParameter, j: usize) -> Result<ResolventColumn> {
    if j >= h.n() {
        return Err(Error::param(format!("vertex {j} outside operator of order {}", h.n())));
    }
    ResolventSolver::new(h, z)?.column(j)
}

/// `|Σ_j |G_ij|^2 - Im G_ii / η|`.
pub fn ward_residual(h: &Hamiltonian, z: SpectralParameter, i: usize) -> Result<f64> {
    let col = resolvent_column(h, z, i)?;
    Ok(ward_residual_of(&col, z))
}

/// Ward residual of an already computed column (`G` is symmetric, so the
/// column sum equals the row sum).
pub fn ward_residual_of(col: &ResolventColumn, z: SpectralParameter) -> f64 {
    (col.norm_sqr() - col.diagonal().im / z.eta()).abs()
}

/// Diagonal of `G(z)`: eigendecomposition for `n <=` [`EIGEN_PATH_MAX`],
/// otherwise one sparse solve per vertex.
pub fn resolvent_diagonal(h: &Hamiltonian, z: SpectralParameter) -> Result<Vec<c64>> {
    if h.n() <= EIGEN_PATH_MAX {
        return Ok(eigensystem(h)?.resolvent_diagonal(z.z()));
    }
    let solver = ResolventSolver::new(h, z)?;
    (0..h.n()).map(|j| solver.column(j).map(|c| c.diagonal())).collect()
}

/// `m(z) = (1/n) Tr G(z)`.
pub fn stieltjes(h: &Hamiltonian, z: SpectralParameter) -> Result<c64> {
    if h.n() <= EIGEN_PATH_MAX {
        return Ok(stieltjes_from_values(&eigenvalues(h)?, z.z()));
    }
    let diag = resolvent_diagonal(h, z)?;
    Ok(diag.iter().sum::<c64>() / h.n() as f64)
}

/// Same as [`stieltjes`] from a precomputed decomposition.
pub fn stieltjes_of(es: &EigenSystem, z: SpectralParameter) -> c64 {
    es.stieltjes(z.z())
}

fn check_moment(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("moment exponent s = {s} must be positive")));
    }
    Ok(())
}

/// `F_s = (1/n) Σ_j (Im G_jj)^s`.
pub fn fs_observable(h: &Hamiltonian, z: SpectralParameter, s: f64) -> Result<f64> {
    check_moment(s)?;
    Ok(fs_from_diagonal(&resolvent_diagonal(h, z)?, s))
}

pub fn fs_from_diagonal(diag: &[c64], s: f64) -> f64 {
    diag.iter().map(|g| g.im.max(0.0).powf(s)).sum::<f64>() / diag.len() as f64
}

/// `F_{s,δ} = (1/n) Σ_j max(Im G_jj, δ)^s`.
pub fn fs_truncated(h: &Hamiltonian, z: SpectralParameter, s: f64, delta: f64) -> Result<f64> {
    check_truncation(z, s, delta)?;
    Ok(fs_truncated_from_diagonal(&resolvent_diagonal(h, z)?, s, delta))
}

pub(crate) fn check_truncation(z: SpectralParameter, s: f64, delta: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("truncated moment needs s in (0, 1), got {s}")));
    }
    if !(delta > 0.0 && delta <= 1.0 / z.eta()) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1/eta = {}]", 1.0 / z.eta())));
    }
    Ok(())
}

pub fn fs_truncated_from_diagonal(diag: &[c64], s: f64, delta: f64) -> f64 {
    diag.iter().map(|g| g.im.max(delta).powf(s)).sum::<f64>() / diag.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_regular, RegularGraph};
    use crate::operator::{assemble, DisorderField};

    fn z(e: f64, eta: f64) -> SpectralParameter {
        SpectralParameter::new(e, eta).unwrap()
    }

    #[test]
    fn rejects_nonpositive_eta() {
        assert!(SpectralParameter::new(0.0, 0.0).is_err());
        assert!(SpectralParameter::new(0.0, -1.0).is_err());
    }

    #[test]
    fn scalar_case() {
        let h = Hamiltonian::from_parts(3, 1.0, vec![0.0], vec![Vec::new()], crate::operator::Host::TreeBall { radius: 0 }, 0);
        let col = resolvent_column(&h, z(0.0, 1.0), 0).unwrap();
        assert!((col.values[0] - c64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn diagonal_operator() {
        let g = RegularGraph::complete(4);
        let v = DisorderField::gaussian(4, 9);
        let h = assemble(&g, &v, 0.0).unwrap();
        let zz = z(0.3, 0.2);
        for j in 0..4 {
            let col = resolvent_column(&h, zz, j).unwrap();
            let want = (c64::new(v.values()[j], 0.0) - zz.z()).inv();
            assert!((col.diagonal() - want).norm() < 1e-14);
            assert!(ward_residual_of(&col, zz) < 1e-12);
        }
    }

    #[test]
    fn solver_matches_eigen_path() {
        let g = sample_regular(200, 3, 1).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(200, 1), 0.5).unwrap();
        let zz = z(0.3, 0.1);
        let es = eigensystem(&h).unwrap();
        let solver = ResolventSolver::new(&h, zz).unwrap();
        for j in [0, 17, 199] {
            let col = solver.column(j).unwrap();
            for i in 0..200 {
                assert!((col.values[i] - es.resolvent_entry(i, j, zz.z())).norm() < 1e-9);
            }
            assert!(col.max_abs() <= 1.0 / zz.eta());
            let g_ii = col.diagonal().im;
            assert!(ward_residual_of(&col, zz) < 1e-8 * g_ii / zz.eta());
        }
    }

    #[test]
    fn stieltjes_zero_operator() {
        let g = RegularGraph::complete(4);
        let h = assemble(&g, &DisorderField::zeros(4), 0.0).unwrap();
        let m = stieltjes(&h, z(0.0, 1.0)).unwrap();
        assert!((m - c64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn fs_identities() {
        let g = sample_regular(100, 3, 5).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(100, 5), 0.5).unwrap();
        let zz = z(-0.2, 0.3);
        let f1 = fs_observable(&h, zz, 1.0).unwrap();
        assert!((f1 - stieltjes(&h, zz).unwrap().im).abs() < 1e-12);
        for s in [0.5, 1.0, 2.0] {
            assert!(fs_observable(&h, zz, s).unwrap() <= zz.eta().powf(-s));
        }
        let f = fs_observable(&h, zz, 0.5).unwrap();
        let ft = fs_truncated(&h, zz, 0.5, 0.2).unwrap();
        assert!(ft - f >= 0.0 && ft - f <= 0.2f64.sqrt());
        assert!(fs_truncated(&h, zz, 0.5, 10.0).is_err());
        assert!(fs_truncated(&h, zz, 0.5, 0.0).is_err());
        assert!(fs_truncated(&h, zz, 1.5, 0.1).is_err());
    }
}
