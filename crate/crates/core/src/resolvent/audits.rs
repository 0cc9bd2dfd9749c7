//! Checks of the deterministic resolvent inequalities. Each check returns
//! both sides of its inequality and fails with [`Error::Violation`] when the
//! inequality does not hold.

use std::fmt::Write as _;

use faer::{c64, Mat};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{pairing_to_multigraph, Pairing, SwitchMode};
use crate::operator::{assemble, decouple, DisorderField, Hamiltonian};
use crate::rng::{rng_from_seed, split_seed, streams};
use crate::spectra::eigensystem;

use super::solver::{check_truncation, fs_from_diagonal, fs_truncated_from_diagonal, resolvent_diagonal, ResolventSolver, SpectralParameter};

const POWER_ITERATIONS: usize = 200;
const POWER_TOLERANCE: f64 = 1e-10;

/// Floating-point allowance added to bounds whose two sides are computed
/// from separate solves.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

/// Default singular-value cutoff for numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// `μ_CT = ln(1 + η / (4 t d))`; infinite when `t = 0`.
pub fn mu_ct(eta: f64, t: f64, d: usize) -> f64 {
    if t == 0.0 {
        return f64::INFINITY;
    }
    (eta / (4.0 * t.abs() * d as f64)).ln_1p()
}

/// `e^{-μ k}` with `e^{-∞ · 0} = 1`.
fn decay(mu: f64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        (-mu * k).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtReport {
    pub observed: f64,
    pub bound: f64,
    pub mu_ct: f64,
    /// `None` when no path joins the two sets; the check is then skipped.
    pub dist: Option<usize>,
}

/// Spectral norm of the `X × Y` block of `G(z)` against
/// `(2/η) e^{-μ_CT dist(X, Y)}`.
pub fn ct_check(h: &Hamiltonian, z: SpectralParameter, xs: &[usize], ys: &[usize]) -> Result<CtReport> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::param("Combes-Thomas check needs nonempty vertex sets"));
    }
    let solver = ResolventSolver::new(h, z)?;
    let mut block = Mat::<c64>::zeros(xs.len(), ys.len());
    for (c, &y) in ys.iter().enumerate() {
        let col = solver.column(y)?;
        for (r, &x) in xs.iter().enumerate() {
            block[(r, c)] = col.values[x];
        }
    }
    let observed = block_norm(&block);
    let mu = mu_ct(z.eta(), h.t(), h.d());
    let dist = h.set_distance(xs, ys);
    let bound = match dist {
        Some(k) => 2.0 / z.eta() * decay(mu, k as f64),
        None => 0.0,
    };
    let report = CtReport {
        observed,
        bound,
        mu_ct: mu,
        dist,
    };
    if dist.is_some() && observed > bound {
        return Err(Error::Violation {
            check: "combes_thomas",
            observed,
            bound,
        });
    }
    Ok(report)
}

/// Largest singular value by power iteration on `B^* B`.
pub fn block_norm(b: &Mat<c64>) -> f64 {
    let (rows, cols) = (b.nrows(), b.ncols());
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut v = vec![c64::new(1.0 / (cols as f64).sqrt(), 0.0); cols];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let bv: Vec<c64> = (0..rows).map(|r| (0..cols).map(|c| b[(r, c)] * v[c]).sum()).collect();
        let w: Vec<c64> = (0..cols).map(|c| (0..rows).map(|r| b[(r, c)].conj() * bv[r]).sum()).collect();
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let done = (norm - lambda).abs() <= POWER_TOLERANCE * norm;
        lambda = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if done {
            break;
        }
    }
    lambda.sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub gap: f64,
    pub bound: f64,
}

/// `|G_oo(h) - G_oo(decouple(h, o, r))|` against `(4td/η^2) e^{-2 μ_CT r}`.
pub fn decoupling_gap(h: &Hamiltonian, root: usize, r: usize, z: SpectralParameter) -> Result<GapReport> {
    if r < 1 {
        return Err(Error::param("decoupling radius must be at least 1"));
    }
    let full = ResolventSolver::new(h, z)?.column(root)?.diagonal();
    let cut = decouple(h, root, r);
    let local = ResolventSolver::new(&cut, z)?.column(root)?.diagonal();
    let gap = (full - local).norm();
    let eta = z.eta();
    let t = h.t().abs();
    let bound = 4.0 * t * h.d() as f64 / (eta * eta) * decay(mu_ct(eta, t, h.d()), 2.0 * r as f64);
    if gap > bound + ROUNDOFF / eta {
        return Err(Error::Violation {
            check: "decoupling",
            observed: gap,
            bound,
        });
    }
    Ok(GapReport { gap, bound })
}

/// Lipschitz constant of `F_s` (or `F_{s,δ}` when `delta` is given) under a
/// single switching.
pub fn switching_bound(n: usize, z: SpectralParameter, s: f64, t: f64, delta: Option<f64>) -> f64 {
    let eta = z.eta();
    match delta {
        None => 32.0 * s * t.abs() / (n as f64 * eta.powf(s + 1.0)),
        Some(delta) => 32.0 * s * t.abs() * delta.powf(s - 1.0) / (n as f64 * eta * eta),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchingReport {
    pub max_ratio: f64,
    pub max_difference: f64,
    pub bound: f64,
    pub trials: usize,
}

fn fs_of(h: &Hamiltonian, z: SpectralParameter, s: f64, delta: Option<f64>) -> Result<f64> {
    let diag = resolvent_diagonal(h, z)?;
    Ok(match delta {
        None => fs_from_diagonal(&diag, s),
        Some(delta) => fs_truncated_from_diagonal(&diag, s, delta),
    })
}

/// Applies `trials` random switchings to `p` and compares the change in
/// `F_s` with [`switching_bound`]. Plain moments need `s >= 1` and no
/// `delta`; truncated moments need `s ∈ (0, 1)` and `delta ∈ (0, 1/η]`.
#[allow(clippy::too_many_arguments)]
pub fn switching_lipschitz_check(
    p: &Pairing,
    v: &DisorderField,
    z: SpectralParameter,
    s: f64,
    t: f64,
    trials: usize,
    seed: u64,
    delta: Option<f64>,
) -> Result<SwitchingReport> {
    match delta {
        None if s < 1.0 => return Err(Error::Domain(format!("plain switching bound needs s >= 1, got {s}"))),
        Some(delta) => check_truncation(z, s, delta)?,
        None => {}
    }
    if p.len() < 2 {
        return Err(Error::param("switching needs at least two pairs"));
    }
    let before = assemble(&pairing_to_multigraph(p), v, t)?;
    let f_before = fs_of(&before, z, s, delta)?;
    let bound = switching_bound(p.n(), z, s, t, delta);
    let mut rng = rng_from_seed(split_seed(seed, streams::SWITCHINGS, 0));
    let mut max_difference: f64 = 0.0;
    for _ in 0..trials {
        let i = rng.random_range(0..p.len());
        let mut j = rng.random_range(0..p.len() - 1);
        if j >= i {
            j += 1;
        }
        let mode = if rng.random_bool(0.5) { SwitchMode::Cross } else { SwitchMode::Parallel };
        let after = assemble(&pairing_to_multigraph(&p.switch_pairs(i, j, mode)?), v, t)?;
        let f_after = fs_of(&after, z, s, delta)?;
        max_difference = max_difference.max((f_after - f_before).abs());
    }
    let max_ratio = if bound > 0.0 {
        max_difference / bound
    } else if max_difference == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    if max_ratio > 1.0 {
        return Err(Error::Violation {
            check: "switching",
            observed: max_difference,
            bound,
        });
    }
    Ok(SwitchingReport {
        max_ratio,
        max_difference,
        bound,
        trials,
    })
}

/// Numerical rank of `G_a(z) - G_b(z)`: singular values above
/// `tol · max(1, σ_max)`.
pub fn resolvent_difference_rank(a: &Hamiltonian, b: &Hamiltonian, z: SpectralParameter, tol: f64) -> Result<usize> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let ga = eigensystem(a)?.resolvent_matrix(z.z());
    let gb = eigensystem(b)?.resolvent_matrix(z.z());
    let diff = &ga - &gb;
    let sv = diff
        .singular_values()
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let top = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = tol * top.max(1.0);
    Ok(sv.iter().filter(|&&x| x > cutoff).count())
}

/// One line of an audit table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub check: String,
    pub n: usize,
    pub d: usize,
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub eta: f64,
    pub param: f64,
    pub observed: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl AuditRow {
    pub const HEADER: &'static str = "check,n,d,t,E,eta,param,observed,bound,ratio";

    #[allow(clippy::too_many_arguments)]
    pub fn new(check: &str, h: &Hamiltonian, z: SpectralParameter, param: f64, observed: f64, bound: f64) -> Self {
        let ratio = if bound > 0.0 {
            observed / bound
        } else if observed == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            check: check.to_string(),
            n: h.n(),
            d: h.d(),
            t: h.t(),
            energy: z.energy(),
            eta: z.eta(),
            param,
            observed,
            bound,
            ratio,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        write!(
            s,
            "{},{},{},{},{},{},{},{:e},{:e},{:e}",
            self.check, self.n, self.d, self.t, self.energy, self.eta, self.param, self.observed, self.bound, self.ratio
        )
        .unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_pairing, sample_regular};

    fn z(e: f64, eta: f64) -> SpectralParameter {
        SpectralParameter::new(e, eta).unwrap()
    }

    #[test]
    fn mu_ct_value() {
        assert!((mu_ct(1.0, 0.1, 3) - (1.0f64 + 1.0 / 1.2).ln()).abs() < 1e-15);
        assert!((mu_ct(1.0, 0.1, 3) - 0.606135803570316).abs() < 1e-12);
        assert_eq!(mu_ct(1.0, 0.0, 3), f64::INFINITY);
    }

    #[test]
    fn ct_same_vertex() {
        let g = sample_regular(60, 3, 1).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(60, 1), 0.5).unwrap();
        let zz = z(0.1, 0.2);
        let rep = ct_check(&h, zz, &[5], &[5]).unwrap();
        assert_eq!(rep.dist, Some(0));
        assert!((rep.bound - 2.0 / 0.2).abs() < 1e-12);
        assert!(rep.observed <= 1.0 / 0.2);
    }

    #[test]
    fn block_norm_matches_svd() {
        let b = Mat::<c64>::from_fn(4, 3, |i, j| c64::new((i + 2 * j) as f64 - 2.0, (i * j) as f64 * 0.3));
        let sv = b.singular_values().unwrap();
        let top = sv.iter().copied().fold(0.0, f64::max);
        assert!((block_norm(&b) - top).abs() < 1e-8 * top);
    }

    #[test]
    fn decoupling_trivial_cases() {
        let g = sample_regular(30, 3, 2).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(30, 2), 0.5).unwrap();
        let rep = decoupling_gap(&h, 0, 30, z(0.0, 0.5)).unwrap();
        assert_eq!(rep.gap, 0.0);
        let h0 = assemble(&g, &DisorderField::gaussian(30, 2), 0.0).unwrap();
        let rep = decoupling_gap(&h0, 0, 2, z(0.0, 0.5)).unwrap();
        assert_eq!(rep.gap, 0.0);
        assert!(decoupling_gap(&h, 0, 0, z(0.0, 0.5)).is_err());
    }

    #[test]
    fn switching_small_instance() {
        let p = sample_pairing(60, 3, 4).unwrap();
        let v = DisorderField::gaussian(60, 4);
        let rep = switching_lipschitz_check(&p, &v, z(0.0, 0.5), 1.0, 0.5, 20, 4, None).unwrap();
        assert!(rep.max_ratio <= 1.0);
        let rep = switching_lipschitz_check(&p, &v, z(0.0, 0.5), 0.5, 0.5, 10, 4, Some(0.5)).unwrap();
        assert!(rep.max_ratio <= 1.0);
        assert!(switching_lipschitz_check(&p, &v, z(0.0, 0.5), 0.5, 0.5, 10, 4, None).is_err());
    }

    #[test]
    fn switching_difference_has_rank_at_most_four() {
        let p = sample_pairing(40, 3, 7).unwrap();
        let v = DisorderField::gaussian(40, 7);
        let a = assemble(&pairing_to_multigraph(&p), &v, 0.5).unwrap();
        for (i, j) in [(0, 1), (3, 17), (10, 59)] {
            for mode in [SwitchMode::Cross, SwitchMode::Parallel] {
                let b = assemble(&pairing_to_multigraph(&p.switch_pairs(i, j, mode).unwrap()), &v, 0.5).unwrap();
                let rank = resolvent_difference_rank(&a, &b, z(0.2, 0.3), RANK_TOLERANCE).unwrap();
                assert!(rank <= 4, "rank {rank}");
            }
        }
    }

    #[test]
    fn audit_row_format() {
        let g = sample_regular(10, 3, 1).unwrap();
        let h = assemble(&g, &DisorderField::zeros(10), 0.5).unwrap();
        let row = AuditRow::new("ct", &h, z(0.0, 1.0), 2.0, 0.5, 1.0);
        assert_eq!(row.ratio, 0.5);
        assert!(row.to_csv().starts_with("ct,10,3,0.5,0,1,2,"));
        assert_eq!(AuditRow::HEADER.split(',').count(), row.to_csv().split(',').count());
    }
}
