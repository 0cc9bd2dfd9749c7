//! Resolvent `G(z) = (H - z)^{-1}`: sparse solves, Stieltjes transform,
//! the `F_s` moments and audits of the deterministic resolvent bounds.

mod audits;
mod solver;

pub use audits::{
    block_norm, ct_check, decoupling_gap, mu_ct, resolvent_difference_rank, switching_bound, switching_lipschitz_check,
    AuditRow, CtReport, GapReport, SwitchingReport, RANK_TOLERANCE,
};
pub use solver::{
    fs_from_diagonal, fs_observable, fs_truncated, fs_truncated_from_diagonal, resolvent_column, resolvent_diagonal,
    stieltjes, stieltjes_of, ward_residual, ward_residual_of, ResolventColumn, ResolventSolver, SpectralParameter,
    EIGEN_PATH_MAX, SOLVER_TOLERANCE,
};
