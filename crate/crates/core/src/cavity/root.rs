use faer::c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::streams;

use super::population::{block_rng, recursion_draw, Population, BLOCK};

/// Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_samples(xs: impl ExactSizeIterator<Item = f64> + Clone) -> Self {
        let n = xs.len() as f64;
        let mean = xs.clone().sum::<f64>() / n;
        let var = if n > 1.0 {
            xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            se: (var / n).sqrt(),
        }
    }

    /// Proportion estimate with binomial standard error.
    pub fn proportion(hits: usize, n: usize) -> Self {
        let p = hits as f64 / n as f64;
        Self {
            mean: p,
            se: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }
}

/// Draws of the root entry `R_00 = 1 / (V_0 - A - iB)` with
/// `A = E + t^2 Σ X^{(j)}`, `B = η + t^2 Σ Y^{(j)}` over `d` children.
#[derive(Clone, Debug, PartialEq)]
pub struct RootLaw {
    pub r00: Vec<c64>,
    pub v0: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub energy: f64,
    pub eta: f64,
}

impl RootLaw {
    pub fn len(&self) -> usize {
        self.r00.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r00.is_empty()
    }

    /// `Im R_00 = B / ((V_0 - A)^2 + B^2)` from the stored triple.
    pub fn im_from_parts(&self, k: usize) -> f64 {
        let (x, b) = (self.v0[k] - self.a[k], self.b[k]);
        b / (x * x + b * b)
    }
}

pub(crate) fn root_draws(pop: &Population, n_samples: usize, stream: u64) -> RootLaw {
    let p = *pop.params();
    let mut r00 = vec![c64::new(0.0, 0.0); n_samples];
    let mut v0 = vec![0.0; n_samples];
    let mut a = vec![0.0; n_samples];
    let mut b = vec![0.0; n_samples];
    let round = pop.sweep_count() as u64;
    r00.par_chunks_mut(BLOCK)
        .zip(v0.par_chunks_mut(BLOCK))
        .zip(a.par_chunks_mut(BLOCK))
        .zip(b.par_chunks_mut(BLOCK))
        .enumerate()
        .for_each(|(blk, (((r, v), a), b))| {
            let mut rng = block_rng(p.seed, stream, round, blk);
            for k in 0..r.len() {
                let (v_k, g, u, s) = recursion_draw(pop.samples(), p.d, &p, &mut rng);
                r[k] = g;
                v[k] = v_k;
                a[k] = v_k - u;
                b[k] = s;
            }
        });
    RootLaw {
        r00,
        v0,
        a,
        b,
        energy: p.energy,
        eta: p.eta,
    }
}

/// `n_samples` root draws, each with a fresh `V_0` and `d` pool members.
pub fn root_law(pop: &Population, n_samples: usize) -> Result<RootLaw> {
    if pop.sweep_count() < pop.params().sweeps {
        return Err(Error::param(format!(
            "population has run {} of its {} sweeps",
            pop.sweep_count(),
            pop.params().sweeps
        )));
    }
    if n_samples == 0 {
        return Err(Error::param("root law needs at least one draw"));
    }
    Ok(root_draws(pop, n_samples, streams::ROOT_DRAWS))
}

/// `(1/π) mean(Im R_00)`, the `η`-smoothed density of states at `E`.
pub fn dos_estimate(root: &RootLaw) -> f64 {
    root.r00.iter().map(|r| r.im).sum::<f64>() / root.len() as f64 / std::f64::consts::PI
}

/// `E[(Im R_00)^s]`.
pub fn im_moment(root: &RootLaw, s: f64) -> Result<Estimate> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("moment exponent s = {s} must be positive")));
    }
    Ok(Estimate::from_samples(root.r00.iter().map(|r| r.im.powf(s))))
}

/// `E[B^{-1}]` over the stored draws.
pub fn binv_mean(root: &RootLaw) -> Estimate {
    Estimate::from_samples(root.b.iter().map(|b| 1.0 / b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailKind {
    /// `P(|X| > u)` over the pool.
    X,
    /// `P(Y > u)` over the pool.
    Y,
    /// `P(|U| > u)` over one logged recursion step.
    U,
    /// `P(S > u)` over one logged recursion step.
    S,
    /// `E[B^{-1}]` over root draws; `u` is ignored.
    Binv,
}

/// Samples underlying [`tail_probe`], drawn with dedicated RNG streams so the
/// population itself is left untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSamples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn probe_samples(pop: &Population) -> ProbeSamples {
    let p = *pop.params();
    let m = pop.len();
    let mut us = vec![(0.0, 0.0); m];
    let round = pop.sweep_count() as u64;
    us.par_chunks_mut(BLOCK).enumerate().for_each(|(blk, out)| {
        let mut rng = block_rng(p.seed, streams::PROBE_DECOMPOSITION, round, blk);
        for o in out {
            let (_, _, u, s) = recursion_draw(pop.samples(), p.d - 1, &p, &mut rng);
            *o = (u, s);
        }
    });
    let root = root_draws(pop, m, streams::PROBE_ROOT);
    ProbeSamples {
        x: pop.samples().iter().map(|g| g.re).collect(),
        y: pop.samples().iter().map(|g| g.im).collect(),
        u: us.iter().map(|&(u, _)| u).collect(),
        s: us.iter().map(|&(_, s)| s).collect(),
        b: root.b,
    }
}

impl ProbeSamples {
    pub fn tail(&self, kind: TailKind, u: f64) -> Result<Estimate> {
        if !(u > 0.0) {
            return Err(Error::Domain(format!("tail threshold u = {u} must be positive")));
        }
        let count = |xs: &[f64], abs: bool| {
            let hits = xs.iter().filter(|&&x| if abs { x.abs() > u } else { x > u }).count();
            Estimate::proportion(hits, xs.len())
        };
        Ok(match kind {
            TailKind::X => count(&self.x, true),
            TailKind::Y => count(&self.y, false),
            TailKind::U => count(&self.u, true),
            TailKind::S => count(&self.s, false),
            TailKind::Binv => Estimate::from_samples(self.b.iter().map(|b| 1.0 / b)),
        })
    }
}

/// Empirical tail probability (or `E[B^{-1}]` for [`TailKind::Binv`]).
pub fn tail_probe(pop: &Population, kind: TailKind, u: f64) -> Result<Estimate> {
    probe_samples(pop).tail(kind, u)
}

/// Empirical `P(Y ≤ ε)` over the pool.
pub fn lower_tail_probe(pop: &Population, eps: f64) -> Result<Estimate> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps = {eps} must be positive")));
    }
    let hits = pop.samples().iter().filter(|g| g.im <= eps).count();
    Ok(Estimate::proportion(hits, pop.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cavity::population::{equilibrate, CavityParams};

    fn pop(t: f64, sweeps: usize) -> Population {
        let p = CavityParams::new(20, t, 0.0, 0.05, 3).unwrap().with_pool(4000, sweeps).unwrap();
        equilibrate(&p).unwrap().0
    }

    #[test]
    fn root_invariants() {
        let pop = pop(0.0334, 20);
        let root = root_law(&pop, 5000).unwrap();
        for k in 0..root.len() {
            assert!(root.b[k] >= root.eta);
            let im = root.r00[k].im;
            assert!(im > 0.0 && im <= 1.0 / root.eta);
            assert!((root.im_from_parts(k) - im).abs() <= 1e-12 * im.max(1.0));
        }
        let m1 = im_moment(&root, 1.0).unwrap().mean;
        assert!((m1 - std::f64::consts::PI * dos_estimate(&root)).abs() < 1e-12);
        assert!(im_moment(&root, 2.0).unwrap().mean <= root.eta.powi(-2));
    }

    #[test]
    fn root_law_needs_finished_schedule() {
        let p = CavityParams::new(3, 0.1, 0.0, 0.1, 1).unwrap().with_pool(100, 5).unwrap();
        let pop = crate::cavity::init_population(&p).unwrap();
        assert!(root_law(&pop, 10).is_err());
    }

    #[test]
    fn zero_hopping_root_is_scalar() {
        let pop = pop(0.0, 0);
        let root = root_law(&pop, 2000).unwrap();
        for k in 0..root.len() {
            let want = root.eta / ((root.v0[k] - root.energy).powi(2) + root.eta * root.eta);
            assert!((root.r00[k].im - want).abs() <= 1e-12 * want.max(1.0));
            assert_eq!(root.b[k], root.eta);
        }
    }

    #[test]
    fn tails() {
        let pop = pop(0.0334, 20);
        let probes = probe_samples(&pop);
        let p = pop.params();
        assert_eq!(probes.tail(TailKind::X, 1e9).unwrap().mean, 0.0);
        let ceiling = p.eta + p.t * p.t * (p.d - 1) as f64 / p.eta;
        assert_eq!(probes.tail(TailKind::S, ceiling * 1.0001).unwrap().mean, 0.0);
        let mut last = 1.0;
        for u in [0.1, 1.0, 10.0] {
            let q = probes.tail(TailKind::U, u).unwrap().mean;
            assert!(q <= last);
            last = q;
        }
        assert!(probes.tail(TailKind::Binv, 1.0).unwrap().mean <= 1.0 / p.eta);
        assert_eq!(lower_tail_probe(&pop, 1.0 / p.eta).unwrap().mean, 1.0);
        let a = lower_tail_probe(&pop, 1e-3).unwrap().mean;
        let b = lower_tail_probe(&pop, 1e-2).unwrap().mean;
        assert!(a <= b);
    }
}
