use faer::c64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, split_seed, streams, LabRng};

/// Samples handled by one RNG stream. Fixed so that results do not depend on
/// the number of worker threads.
pub const BLOCK: usize = 4096;

pub const DEFAULT_POOL_SIZE: usize = 100_000;
pub const DEFAULT_SWEEPS: usize = 200;
/// Smallest pool accepted for production estimates.
pub const MIN_PRODUCTION_POOL: usize = 1000;
/// Window length of the convergence monitor.
pub const CONVERGENCE_WINDOW: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub d: usize,
    pub t: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub eta: f64,
    pub pool_size: usize,
    pub sweeps: usize,
    pub seed: u64,
}

impl CavityParams {
    pub fn new(d: usize, t: f64, energy: f64, eta: f64, seed: u64) -> Result<Self> {
        let p = Self {
            d,
            t,
            energy,
            eta,
            pool_size: DEFAULT_POOL_SIZE,
            sweeps: DEFAULT_SWEEPS,
            seed,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_pool(mut self, pool_size: usize, sweeps: usize) -> Result<Self> {
        self.pool_size = pool_size;
        self.sweeps = sweeps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 3 {
            return Err(Error::param(format!("degree d = {} must be at least 3", self.d)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::param(format!("hopping t = {} must be finite and nonnegative", self.t)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite() && self.energy.is_finite()) {
            return Err(Error::param(format!(
                "need finite E and eta > 0, got E = {}, eta = {}",
                self.energy, self.eta
            )));
        }
        if self.pool_size == 0 {
            return Err(Error::param("pool size must be positive"));
        }
        Ok(())
    }

    pub fn z(&self) -> c64 {
        c64::new(self.energy, self.eta)
    }
}

/// Pool of samples of the cavity resolvent `Γ = X + iY`.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    samples: Vec<c64>,
    params: CavityParams,
    sweep_count: usize,
}

impl Population {
    pub fn samples(&self) -> &[c64] {
        &self.samples
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    pub fn sweep_count(&self) -> usize {
        self.sweep_count
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean_im(&self) -> f64 {
        self.samples.iter().map(|g| g.im).sum::<f64>() / self.len() as f64
    }
}

pub(crate) fn block_rng(seed: u64, stream: u64, round: u64, block: usize) -> LabRng {
    rng_from_seed(split_seed(split_seed(seed, stream, round), 0, block as u64))
}

/// One recursion step: fresh `V`, `k` children drawn from `pool`.
/// Returns `(Γ, U, S)` with `Γ = 1/(U - iS)`.
#[inline]
pub(crate) fn recursion_draw(pool: &[c64], k: usize, p: &CavityParams, rng: &mut LabRng) -> (f64, c64, f64, f64) {
    let v: f64 = rng.sample(StandardNormal);
    let mut sum = c64::new(0.0, 0.0);
    for _ in 0..k {
        sum += pool[rng.random_range(0..pool.len())];
    }
    let t2 = p.t * p.t;
    let u = v - p.energy - t2 * sum.re;
    let s = p.eta + t2 * sum.im;
    let den = u * u + s * s;
    (v, c64::new(u / den, s / den), u, s)
}

/// Pool of `1/(V - E - iη)` with i.i.d. standard normal `V`, the `t = 0`
/// fixed point.
pub fn init_population(params: &CavityParams) -> Result<Population> {
    params.validate()?;
    let mut samples = vec![c64::new(0.0, 0.0); params.pool_size];
    samples.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
        let mut rng = block_rng(params.seed, streams::POPULATION_INIT, 0, b);
        for x in chunk {
            let v: f64 = rng.sample(StandardNormal);
            *x = (c64::new(v, 0.0) - params.z()).inv();
        }
    });
    Ok(Population {
        samples,
        params: *params,
        sweep_count: 0,
    })
}

fn sweep_impl(pop: &Population, log: bool) -> (Population, Vec<(f64, f64)>) {
    let p = pop.params;
    let m = pop.len();
    let mut samples = vec![c64::new(0.0, 0.0); m];
    let mut logged = if log { vec![(0.0, 0.0); m] } else { Vec::new() };
    let round = pop.sweep_count as u64;
    let prev = &pop.samples;
    if log {
        samples
            .par_chunks_mut(BLOCK)
            .zip(logged.par_chunks_mut(BLOCK))
            .enumerate()
            .for_each(|(b, (out, us))| {
                let mut rng = block_rng(p.seed, streams::POPULATION_SWEEP, round, b);
                for (x, l) in out.iter_mut().zip(us.iter_mut()) {
                    let (_, g, u, s) = recursion_draw(prev, p.d - 1, &p, &mut rng);
                    *x = g;
                    *l = (u, s);
                }
            });
    } else {
        samples.par_chunks_mut(BLOCK).enumerate().for_each(|(b, out)| {
            let mut rng = block_rng(p.seed, streams::POPULATION_SWEEP, round, b);
            for x in out {
                *x = recursion_draw(prev, p.d - 1, &p, &mut rng).1;
            }
        });
    }
    (
        Population {
            samples,
            params: p,
            sweep_count: pop.sweep_count + 1,
        },
        logged,
    )
}

/// Synchronous update of the whole pool with `d - 1` children per sample.
pub fn sweep(pop: &Population) -> Population {
    sweep_impl(pop, false).0
}

/// [`sweep`] that also returns `(U, S)` for every new sample.
pub fn sweep_logged(pop: &Population) -> (Population, Vec<(f64, f64)>) {
    sweep_impl(pop, true)
}

/// Convergence diagnostics of [`equilibrate`]: means of `mean(Im Γ)` over the
/// last two windows of [`CONVERGENCE_WINDOW`] sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub previous_window: f64,
    pub last_window: f64,
    pub sigma: f64,
}

fn window_stats(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var / n)
}

/// Initializes and runs `params.sweeps` sweeps. Convergence is declared when
/// the last two windows agree within 3σ; with fewer than two full windows it
/// is not assessed and reported as converged.
pub fn equilibrate(params: &CavityParams) -> Result<(Population, Convergence)> {
    let mut pop = init_population(params)?;
    let mut trace = Vec::with_capacity(params.sweeps);
    for _ in 0..params.sweeps {
        pop = sweep(&pop);
        trace.push(pop.mean_im());
    }
    let w = CONVERGENCE_WINDOW;
    let conv = if trace.len() >= 2 * w {
        let (a, va) = window_stats(&trace[trace.len() - 2 * w..trace.len() - w]);
        let (b, vb) = window_stats(&trace[trace.len() - w..]);
        let sigma = (va + vb).sqrt();
        Convergence {
            converged: (a - b).abs() <= 3.0 * sigma,
            previous_window: a,
            last_window: b,
            sigma,
        }
    } else {
        let m = pop.mean_im();
        Convergence {
            converged: true,
            previous_window: m,
            last_window: m,
            sigma: 0.0,
        }
    };
    Ok((pop, conv))
}
