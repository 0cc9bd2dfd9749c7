use crate::error::{Error, Result};
use crate::graph::{Ball, RegularGraph};

use super::disorder::DisorderField;
use super::hamiltonian::{assemble, restrict_to, Hamiltonian};
use super::tree::TreeBall;

/// Ball radius used when comparing a graph of order `n` with the tree:
/// `floor(ln ln n)`, never below 1.
pub fn ball_radius(n: usize) -> usize {
    let lnln = (n as f64).ln().ln();
    if lnln.is_finite() && lnln >= 1.0 {
        lnln.floor() as usize
    } else {
        1
    }
}

/// Graph-ball and tree-ball operators built from a common potential.
#[derive(Clone, Debug)]
pub struct CoupledBalls {
    /// `false` when the graph ball contains a cycle; the two operators then
    /// carry independent disorder.
    pub coupled: bool,
    /// Restriction of the full graph operator to the ball, BFS order.
    pub graph_ball: Hamiltonian,
    pub tree_ball: Hamiltonian,
    /// Potential on the whole graph after coupling.
    pub graph_field: DisorderField,
}

/// Couples the potential of a graph ball to that of a tree ball through the
/// BFS labelling: on a tree-like ball, the graph vertex at BFS position `k`
/// receives the tree value at position `k`; elsewhere `shared` is used.
pub fn couple_potentials(
    graph: &RegularGraph,
    ball: &Ball,
    tree: &TreeBall,
    shared: &DisorderField,
    t: f64,
) -> Result<CoupledBalls> {
    if graph.d() != tree.d() || ball.radius != tree.radius() {
        return Err(Error::Shape(format!(
            "graph ball (d = {}, r = {}) vs tree ball (d = {}, r = {})",
            graph.d(),
            ball.radius,
            tree.d(),
            tree.radius()
        )));
    }
    if shared.len() != graph.n() {
        return Err(Error::DimensionMismatch {
            expected: graph.n(),
            found: shared.len(),
        });
    }
    let coupled = !ball.has_cycle && ball.len() == tree.len();
    let graph_field = if coupled {
        let mut values = shared.values().to_vec();
        for (k, &v) in ball.vertices.iter().enumerate() {
            values[v] = tree.disorder().values()[k];
        }
        DisorderField::from_values(values, shared.seed())
    } else {
        shared.clone()
    };
    let full = assemble(graph, &graph_field, t)?;
    Ok(CoupledBalls {
        coupled,
        graph_ball: restrict_to(&full, ball),
        tree_ball: tree.hamiltonian(t),
        graph_field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball, sample_regular};
    use crate::operator::tree::DEFAULT_TREE_CAP;

    #[test]
    fn radius_rule() {
        assert_eq!(ball_radius(2), 1);
        assert_eq!(ball_radius(100), 1);
        // ln ln 4000 = 2.11
        assert_eq!(ball_radius(4000), 2);
        assert_eq!(ball_radius(10_000_000), 2);
    }

    #[test]
    fn tree_like_ball_gives_identical_operators() {
        let g = sample_regular(3000, 3, 11).unwrap();
        let tree = TreeBall::generate(3, 2, 99, DEFAULT_TREE_CAP).unwrap();
        let shared = DisorderField::gaussian(3000, 5);
        let root = (0..3000).find(|&v| !ball(&g, v, 2).has_cycle).unwrap();
        let b = ball(&g, root, 2);
        let c = couple_potentials(&g, &b, &tree, &shared, 0.4).unwrap();
        assert!(c.coupled);
        assert_eq!(c.graph_ball.to_dense(), c.tree_ball.to_dense());
        for (k, &v) in b.vertices.iter().enumerate() {
            assert_eq!(c.graph_field.values()[v], tree.disorder().values()[k]);
        }
    }

    #[test]
    fn cyclic_ball_is_not_coupled() {
        let g = RegularGraph::complete(4);
        let tree = TreeBall::generate(3, 1, 1, DEFAULT_TREE_CAP).unwrap();
        let shared = DisorderField::gaussian(4, 2);
        let c = couple_potentials(&g, &ball(&g, 0, 1), &tree, &shared, 1.0).unwrap();
        assert!(!c.coupled);
        assert_eq!(&c.graph_field, &shared);
    }

    #[test]
    fn shape_mismatch() {
        let g = RegularGraph::complete(4);
        let tree = TreeBall::generate(3, 2, 1, DEFAULT_TREE_CAP).unwrap();
        let shared = DisorderField::zeros(4);
        assert!(matches!(
            couple_potentials(&g, &ball(&g, 0, 1), &tree, &shared, 1.0),
            Err(Error::Shape(_))
        ));
    }
}
