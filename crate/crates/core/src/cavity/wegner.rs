use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::Interval;

use super::formulas::gauss_legendre;
use super::population::{equilibrate, CavityParams};
use super::root::{dos_estimate, root_law};

/// Smoothing used as a proxy for the limiting measure `ν`.
pub const WEGNER_ETA: f64 = 1e-2;

/// One `(d, t, I)` cell of a Wegner audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WegnerRow {
    pub d: usize,
    pub t: f64,
    pub lo: f64,
    pub hi: f64,
    /// `ν(I) ≈ ∫_I (1/π) Im m(E + iη) dE`.
    pub mass: f64,
    /// `ν(I) / |I|`.
    pub ratio: f64,
}

/// Estimates `ν(I) / |I|` for each `(d, t)` in `grid` and each interval,
/// integrating the cavity density by `nodes`-point Gauss-Legendre on `I`.
/// `base` supplies `η`, pool size, sweeps and seed; its `d`, `t`, `E` are
/// overridden. Fails with a violation if any ratio is not positive.
pub fn wegner_audit(
    base: &CavityParams,
    grid: &[(usize, f64)],
    intervals: &[Interval],
    nodes: usize,
    root_draws: usize,
) -> Result<Vec<WegnerRow>> {
    let (x, w) = gauss_legendre(nodes);
    let mut rows = Vec::new();
    for &(d, t) in grid {
        for interval in intervals {
            if interval.len() <= 0.0 {
                return Err(Error::param("Wegner audit needs intervals of positive length"));
            }
            let (mid, half) = (0.5 * (interval.lo() + interval.hi()), 0.5 * interval.len());
            let mut mass = 0.0;
            for (&xi, &wi) in x.iter().zip(&w) {
                let p = CavityParams {
                    d,
                    t,
                    energy: mid + half * xi,
                    ..*base
                };
                p.validate()?;
                let (pop, _) = equilibrate(&p)?;
                mass += wi * half * dos_estimate(&root_law(&pop, root_draws)?);
            }
            rows.push(WegnerRow {
                d,
                t,
                lo: interval.lo(),
                hi: interval.hi(),
                mass,
                ratio: mass / interval.len(),
            });
        }
    }
    if let Some(bad) = rows.iter().find(|r| !(r.ratio > 0.0)) {
        return Err(Error::Violation {
            check: "wegner_lower",
            observed: bad.ratio,
            bound: 0.0,
        });
    }
    Ok(rows)
}

/// `(min, max)` of the audited ratios.
pub fn wegner_bracket(rows: &[WegnerRow]) -> (f64, f64) {
    rows.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_hopping_central_interval() {
        let base = CavityParams::new(3, 0.0, 0.0, WEGNER_ETA, 11).unwrap().with_pool(20_000, 0).unwrap();
        let rows = wegner_audit(&base, &[(3, 0.0)], &[Interval::new(-0.1, 0.1).unwrap()], 4, 200_000).unwrap();
        // Gaussian mass of [-0.1, 0.1] over its length, slightly flattened by the smoothing
        assert!((rows[0].ratio - 0.39828).abs() < 0.01);
        let (lo, hi) = wegner_bracket(&rows);
        assert_eq!(lo, hi);
    }
}
