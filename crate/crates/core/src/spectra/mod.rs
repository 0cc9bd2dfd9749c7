//! Dense eigendecomposition, inertia-based eigenvalue counting, and the
//! localization observables `P_I`, `Q_I(s)`.

mod eigen;
mod inertia;
mod observables;

pub use eigen::{eigensystem, eigenvalues, sorted_range, stieltjes_from_values, EigenSystem, Interval, DENSE_BUDGET};
pub use inertia::{count_in_interval, InertiaCounter, ENDPOINT_OFFSET};
pub use observables::{
    holder_check, p_profile, pi_vs_img_bound, q_from_profile, q_moment, spectral_im_g, HOLDER_TOLERANCE,
};
