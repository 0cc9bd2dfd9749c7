//! Configuration-model sampling of `d`-regular (multi)graphs, switchings,
//! breadth-first balls and local tree-likeness.

mod ball;
mod multigraph;
mod pairing;
mod regular;

pub(crate) use ball::bfs_ball;
pub use ball::{ball, has_cycle_in_ball, tree_ball_size, Ball};
pub use multigraph::{is_simple, pairing_to_multigraph, MultiGraph};
pub use pairing::{sample_pairing, switch_pairs, HalfEdge, Pairing, SwitchMode};
pub use regular::{
    expected_rejection_attempts, sample_regular, sample_regular_incremental, sample_simple_regular,
    sample_simple_regular_counted, RegularGraph, SampledGraph, REJECTION_MAX_DEGREE,
};
