//! Anderson model `W = -tA + diag(V)` on random `d`-regular graphs with
//! i.i.d. standard normal `V`.
//!
//! * [`graph`]: configuration-model pairings, switchings, simple regular
//!   graphs and balls.
//! * [`operator`]: sparse operators on graphs and truncated trees.
//! * [`resolvent`]: `G(z) = (H - z)^{-1}` and audits of resolvent bounds.
//! * [`spectra`]: eigendecomposition, inertia counting, `P_I` and `Q_I(s)`.
//! * [`cavity`]: population dynamics for the tree recursion.
//!
//! All randomness is driven by explicit `u64` seeds (see [`rng`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod error;
pub mod graph;
pub mod operator;
pub mod resolvent;
pub mod rng;
pub mod spectra;

pub use cavity::{CavityParams, Population, RootLaw};
pub use error::{Error, Result};
pub use graph::{MultiGraph, Pairing, RegularGraph};
pub use operator::{DisorderField, Hamiltonian};
pub use resolvent::SpectralParameter;
pub use spectra::{EigenSystem, Interval};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use faer::c64;

/// Makes dense and sparse kernels run single-threaded, so floating-point
/// results do not depend on the number of available cores.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}
