//! Population dynamics for the cavity recursion
//!
//! ```text
//! Γ ≐ 1 / (V - E - iη - t^2 Σ_{j=1}^{d-1} Γ_j)
//! ```
//!
//! on the rooted tree whose root has `d` children and every other vertex
//! `d - 1`, together with root-resolvent statistics and closed-form helpers.

mod formulas;
mod population;
mod root;
mod wegner;

pub use formulas::{
    admissible_g_floor, gauss_legendre, gaussian_density, hopping_of, integrate_panels, mobility_edge,
    smoothed_gaussian_density, BETA,
};
pub use population::{
    equilibrate, init_population, sweep, sweep_logged, CavityParams, Convergence, Population, BLOCK,
    CONVERGENCE_WINDOW, DEFAULT_POOL_SIZE, DEFAULT_SWEEPS, MIN_PRODUCTION_POOL,
};
pub use root::{
    binv_mean, dos_estimate, im_moment, lower_tail_probe, probe_samples, root_law, tail_probe, Estimate, ProbeSamples,
    RootLaw, TailKind,
};
pub use wegner::{wegner_audit, wegner_bracket, WegnerRow, WEGNER_ETA};
