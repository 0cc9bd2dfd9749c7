//! Interval-averaged eigenvector observables.
//!
//! For an interval `I` with eigenvalue multiset `Λ_I`,
//!
//! ```text
//! P_I(j)  = (N / |Λ_I|) Σ_{λ_k ∈ I} u_k(j)^2      (0 when Λ_I is empty)
//! Q_I(s)  = (1/N) Σ_j P_I(j)^s,   Q_I = Q_I(2).
//! ```
//!
//! `Q_I` stays of order one for delocalized eigenvectors and grows like
//! `N / |Λ_I|` for eigenvectors concentrated on single sites.

use faer::c64;

use crate::error::{Error, Result};

use super::eigen::{EigenSystem, Interval};

/// Slack allowed below 1 in [`holder_check`].
pub const HOLDER_TOLERANCE: f64 = 1e-10;

pub fn p_profile(es: &EigenSystem, interval: &Interval) -> Vec<f64> {
    let n = es.n();
    let range = es.range(interval);
    let mut p = vec![0.0; n];
    if range.is_empty() {
        return p;
    }
    let scale = n as f64 / range.len() as f64;
    let vectors = es.vectors();
    for k in range {
        let col = vectors.col(k);
        for (j, x) in p.iter_mut().enumerate() {
            let a = col[j];
            *x += a * a;
        }
    }
    for x in &mut p {
        *x *= scale;
    }
    p
}

/// `Q_I(s)` from a precomputed profile.
pub fn q_from_profile(profile: &[f64], s: f64) -> f64 {
    assert!(s > 0.0, "moment exponent must be positive, got {s}");
    if profile.is_empty() {
        return 0.0;
    }
    let sum: f64 = profile.iter().map(|&p| if p > 0.0 { p.powf(s) } else { 0.0 }).sum();
    sum / profile.len() as f64
}

pub fn q_moment(es: &EigenSystem, interval: &Interval, s: f64) -> f64 {
    q_from_profile(&p_profile(es, interval), s)
}

/// `Q_I(s/2) · Q_I(2)^{1 - s/2}`, which Hölder's inequality bounds below by 1
/// whenever `Λ_I` is nonempty.
pub fn holder_check(es: &EigenSystem, interval: &Interval, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("Hölder exponent s = {s} must lie in (0, 1)")));
    }
    if es.count(interval) == 0 {
        return Err(Error::EmptyInterval);
    }
    let profile = p_profile(es, interval);
    let product = q_from_profile(&profile, s / 2.0) * q_from_profile(&profile, 2.0).powf(1.0 - s / 2.0);
    if product < 1.0 - HOLDER_TOLERANCE {
        return Err(Error::Violation {
            check: "holder",
            observed: product,
            bound: 1.0,
        });
    }
    Ok(product)
}

/// `Im G_jj(z) = Σ_k η u_k(j)^2 / ((λ_k - E)^2 + η^2)`.
pub fn spectral_im_g(es: &EigenSystem, z: c64, j: usize) -> f64 {
    let (e, eta) = (z.re, z.im);
    let vectors = es.vectors();
    es.values()
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let a = vectors[(j, k)];
            eta * a * a / ((l - e) * (l - e) + eta * eta)
        })
        .sum()
}

/// `max_j P_I(j) |Λ_I| / (2 N η Im G_jj(z))` for `I = [E - η, E + η]`;
/// at most 1 by the spectral formula for `Im G_jj`.
pub fn pi_vs_img_bound(es: &EigenSystem, z: c64) -> Result<f64> {
    let eta = z.im;
    let interval = Interval::centered(z.re, eta)?;
    let count = es.count(&interval);
    if count == 0 {
        return Err(Error::EmptyInterval);
    }
    let n = es.n() as f64;
    let profile = p_profile(es, &interval);
    let im_g: Vec<f64> = es.resolvent_diagonal(z).iter().map(|g| g.im).collect();
    let ratio = profile
        .iter()
        .zip(&im_g)
        .map(|(&p, &g)| p * count as f64 / (2.0 * n * eta * g))
        .fold(0.0, f64::max);
    if ratio > 1.0 + 1e-12 {
        return Err(Error::Violation {
            check: "p_interval",
            observed: ratio,
            bound: 1.0,
        });
    }
    Ok(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_regular;
    use crate::operator::{assemble, DisorderField, Hamiltonian};
    use crate::spectra::eigensystem;

    fn instance(n: usize, t: f64, seed: u64) -> (Hamiltonian, EigenSystem) {
        let g = sample_regular(n, 3, seed).unwrap();
        let h = assemble(&g, &DisorderField::gaussian(n, seed + 1000), t).unwrap();
        let es = eigensystem(&h).unwrap();
        (h, es)
    }

    #[test]
    fn empty_interval_gives_zero_profile() {
        let (_, es) = instance(40, 0.5, 1);
        let i = Interval::new(50.0, 51.0).unwrap();
        assert!(p_profile(&es, &i).iter().all(|&p| p == 0.0));
        assert_eq!(q_moment(&es, &i, 2.0), 0.0);
        assert!(matches!(holder_check(&es, &i, 0.5), Err(Error::EmptyInterval)));
    }

    #[test]
    fn localized_extreme_closed_form() {
        let (h, es) = instance(200, 0.0, 2);
        let i = Interval::new(-0.5, 0.8).unwrap();
        let card = h.diagonal().iter().filter(|&&v| i.contains(v)).count();
        assert_eq!(es.count(&i), card);
        let p = p_profile(&es, &i);
        for (j, &v) in h.diagonal().iter().enumerate() {
            let want = if i.contains(v) { 200.0 / card as f64 } else { 0.0 };
            assert!((p[j] - want).abs() < 1e-9 * want.max(1.0));
        }
        let q = q_moment(&es, &i, 2.0);
        assert!((q - 200.0 / card as f64).abs() < 1e-9 * q);
        // Q_I(s) = (N/|Λ_I|)^{s-1}, so the Hölder product is exactly 1
        let ratio = 200.0 / card as f64;
        assert!((q_moment(&es, &i, 0.25) - ratio.powf(-0.75)).abs() < 1e-9);
        let product = holder_check(&es, &i, 0.5).unwrap();
        assert!((product - 1.0).abs() < 1e-9);
    }

    #[test]
    fn normalization_and_cauchy_schwarz() {
        let (_, es) = instance(150, 0.5, 3);
        for k in 0..10 {
            let i = Interval::centered(-1.0 + 0.2 * k as f64, 0.3).unwrap();
            if es.count(&i) == 0 {
                continue;
            }
            let q1 = q_moment(&es, &i, 1.0);
            assert!((q1 - 1.0).abs() < 1e-10);
            assert!(q_moment(&es, &i, 2.0) >= 1.0 - 1e-10);
        }
    }

    #[test]
    fn spectral_formula_consistency() {
        let (_, es) = instance(100, 0.5, 4);
        let z = c64::new(0.2, 0.1);
        let mean: f64 = (0..100).map(|j| spectral_im_g(&es, z, j)).sum::<f64>() / 100.0;
        assert!((mean - es.stieltjes(z).im).abs() < 1e-12);
        let diag = es.resolvent_diagonal(z);
        for j in 0..100 {
            assert!((diag[j].im - spectral_im_g(&es, z, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn interval_bound_at_zero_hopping() {
        let (h, es) = instance(300, 0.0, 5);
        let z = c64::new(0.1, 0.2);
        let ratio = pi_vs_img_bound(&es, z).unwrap();
        // ratio for a site at distance x from E is (x^2 + η^2) / (2 η^2)
        let want = h
            .diagonal()
            .iter()
            .filter(|&&v| (v - 0.1).abs() <= 0.2)
            .map(|&v| ((v - 0.1).powi(2) + 0.04) / 0.08)
            .fold(0.0, f64::max);
        assert!((ratio - want).abs() < 1e-9);
        assert!(ratio <= 1.0);
    }
}
