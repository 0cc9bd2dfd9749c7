//! Tight-binding operators on graphs and truncated trees, and the graph
//! surgery around a root: decoupling, ball restriction and potential
//! coupling.

mod coupling;
mod disorder;
mod hamiltonian;
mod tree;

pub use coupling::{ball_radius, couple_potentials, CoupledBalls};
pub use disorder::DisorderField;
pub use hamiltonian::{assemble, decouple, restrict_ball, GraphRef, Hamiltonian, Host};
pub use tree::{build_tree_ball, TreeBall, DEFAULT_TREE_CAP};
