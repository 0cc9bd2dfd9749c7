use std::f64::consts::PI;

use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Lower-tail exponent `β` of the cavity imaginary part.
pub const BETA: f64 = 31.0 / 301.0;

/// `√(π/8)`, the lower threshold constant for admissible `g`.
pub fn admissible_g_floor() -> f64 {
    (PI / 8.0).sqrt()
}

/// `t = g / (d ln d)`. Requires `g > 0` and `d >= 3`.
pub fn hopping_of(g: f64, d: usize) -> f64 {
    let d = d as f64;
    g / (d * d.ln())
}

/// `𝔈(g) = sqrt(2 ln(4g / √(2π)))`.
pub fn mobility_edge(g: f64) -> Result<f64> {
    let arg = 4.0 * g / (2.0 * PI).sqrt();
    if !(arg > 1.0) {
        return Err(Error::Domain(format!(
            "mobility edge needs 4g/sqrt(2 pi) > 1, got {arg} at g = {g}"
        )));
    }
    Ok((2.0 * arg.ln()).sqrt())
}

/// Standard normal density.
pub fn gaussian_density(v: f64) -> f64 {
    (-0.5 * v * v).exp() / (2.0 * PI).sqrt()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Golub-Welsch).
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(k >= 1, "need at least one node");
    let jacobi = Mat::<f64>::from_fn(k, k, |i, j| {
        let m = i.max(j) as f64;
        if i.abs_diff(j) == 1 {
            m / (4.0 * m * m - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let evd = jacobi.self_adjoint_eigen(Side::Lower).expect("symmetric tridiagonal eigenproblem");
    let nodes: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let weights = (0..k).map(|i| 2.0 * evd.U()[(0, i)].powi(2)).collect();
    (nodes, weights)
}

/// `∫_a^b f` by `k`-point Gauss-Legendre on each of the panels between
/// consecutive `breaks`.
pub fn integrate_panels(f: impl Fn(f64) -> f64, breaks: &[f64], k: usize) -> f64 {
    let (x, w) = gauss_legendre(k);
    breaks
        .windows(2)
        .map(|p| {
            let (mid, half) = (0.5 * (p[0] + p[1]), 0.5 * (p[1] - p[0]));
            x.iter().zip(&w).map(|(&xi, &wi)| wi * f(mid + half * xi)).sum::<f64>() * half
        })
        .sum()
}

/// `(1/π) ∫ ρ(v) η / ((v - E)^2 + η^2) dv` for the standard normal `ρ`:
/// the `η`-smoothed density of states of the `t = 0` model.
pub fn smoothed_gaussian_density(energy: f64, eta: f64) -> f64 {
    let reach = 14.0 + energy.abs();
    let mut breaks = vec![-reach, energy, reach];
    let mut w = eta / 8.0;
    while w < 2.0 * reach {
        breaks.extend([energy - w, energy + w]);
        w *= 2.0;
    }
    breaks.retain(|x| x.abs() <= reach);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    integrate_panels(
        |v| gaussian_density(v) * eta / ((v - energy).powi(2) + eta * eta) / PI,
        &breaks,
        20,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert!((hopping_of(2.0, 20) - 2.0 / (20.0 * 20f64.ln())).abs() < 1e-16);
        assert!((hopping_of(2.0, 20) - 0.033381).abs() < 5e-7);
        assert!((mobility_edge(2.0).unwrap() - 1.523484826622939).abs() < 1e-13);
        assert!((mobility_edge(2.0).unwrap() - 1.5235).abs() < 5e-5);
        let g = (2.0 * PI).sqrt() / 4.0 * 0.5f64.exp();
        assert!((mobility_edge(g).unwrap() - 1.0).abs() < 1e-14);
        assert!(mobility_edge(0.5).is_err());
        assert!((admissible_g_floor() - 0.62666).abs() < 5e-6);
        let d = 7.0f64;
        assert!((hopping_of(d * d.ln(), 7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_rules_are_exact_for_polynomials() {
        let (x, w) = gauss_legendre(6);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m10: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((m10 - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn smoothed_density_limits() {
        // large eta: the Lorentzian of width eta dominates
        let wide = smoothed_gaussian_density(0.0, 1e3);
        assert!((wide - 1.0 / (PI * 1e3)).abs() < 1e-3 / (PI * 1e3));
        let narrow = smoothed_gaussian_density(0.0, 1e-6);
        assert!((narrow - gaussian_density(0.0)).abs() < 1e-6);
        let total = integrate_panels(|e| smoothed_gaussian_density(e, 0.1), &[-30.0, -3.0, 0.0, 3.0, 30.0], 40);
        assert!((total - 1.0).abs() < 0.01);
    }
}
