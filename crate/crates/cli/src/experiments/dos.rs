use std::f64::consts::PI;

use anderson_core::graph::{ball, has_cycle_in_ball, tree_ball_size};
use anderson_core::operator::{assemble, ball_radius, couple_potentials, TreeBall, DEFAULT_TREE_CAP};
use anderson_core::resolvent::{mu_ct, resolvent_diagonal, AuditRow};
use anderson_core::rng::split_seed;
use anderson_core::spectra::{eigensystem, eigenvalues, stieltjes_from_values};
use anderson_core::SpectralParameter;

use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::runner::{run_tasks, ExperimentOutput, TaskOutput, TaskSpec};

use super::cavity::{cavity_point, CavityPoint};
use super::{grid, instance};

pub const DOS_HEADER: &str = "E,eta,N,d,t,g,seed,dos_graph,dos_cavity,abs_diff";
pub const SUP_HEADER: &str = "N,d,t,g,eta,seed,sup_diff,peak,relative";
pub const SUP_FILE: &str = "sup.csv";
pub const COUPLING_FILE: &str = "coupling.csv";

enum Job {
    Cavity(f64, f64),
    Graph(usize),
}

struct GraphSide {
    /// `(1/π) Im m_N` on the grid, in [`grid`] order.
    dos: Vec<f64>,
    coupling: Vec<AuditRow>,
}

/// Graph side of one realization. When some vertex has a tree-like ball of
/// radius `r_N`, the potential on that ball is coupled to a tree ball and
/// the root entries `G_{N,11}` and `R_00` are compared.
fn graph_side(cfg: &RunConfig, n: usize, seed: u64) -> Result<TaskOutput<GraphSide>> {
    let inst = instance(cfg, n, seed)?;
    let t = cfg.hopping();
    let r = ball_radius(n);
    let root = match tree_ball_size(cfg.d, r) {
        Some(size) if size as usize <= DEFAULT_TREE_CAP => (0..n).find(|&v| !has_cycle_in_ball(&inst.graph, v, r)),
        _ => None,
    };
    let Some(root) = root else {
        let values = eigenvalues(&inst.h)?;
        let mut dos = Vec::new();
        for (e, eta) in grid(cfg) {
            dos.push(stieltjes_from_values(&values, SpectralParameter::new(e, eta)?.z()).im / PI);
        }
        let mut out = TaskOutput::new(GraphSide { dos, coupling: Vec::new() });
        out.notes.push(format!("no tree-like ball of radius {r}; coupling skipped"));
        return Ok(out);
    };

    let b = ball(&inst.graph, root, r);
    let tree = TreeBall::generate(cfg.d, r, split_seed(seed, 6, 0), DEFAULT_TREE_CAP)?;
    let pair = couple_potentials(&inst.graph, &b, &tree, &inst.disorder, t)?;
    // the coupled field is again i.i.d. standard normal, so the coupled
    // operator serves as the realization for the density as well
    let full = assemble(&inst.graph, &pair.graph_field, t)?;
    let es = eigensystem(&full)?;
    let mut dos = Vec::new();
    let mut coupling = Vec::new();
    for (e, eta) in grid(cfg) {
        let z = SpectralParameter::new(e, eta)?;
        dos.push(es.stieltjes(z.z()).im / PI);
        let g11 = es.resolvent_entry(root, root, z.z());
        let r00 = resolvent_diagonal(&pair.tree_ball, z)?[0];
        let local = resolvent_diagonal(&pair.graph_ball, z)?[0];
        let mu = mu_ct(eta, t, cfg.d);
        let bound = 8.0 * t * cfg.d as f64 / (eta * eta) * (-2.0 * mu * r as f64).exp();
        coupling.push(AuditRow::new("coupling", &full, z, r as f64, (g11 - r00).norm(), bound));
        coupling.push(AuditRow::new(
            "coupling_truncated",
            &full,
            z,
            r as f64,
            (local - r00).norm(),
            1e-12 * r00.norm().max(1.0),
        ));
    }
    let mut out = TaskOutput::new(GraphSide { dos, coupling });
    out.notes.push(format!("coupled at root {root}, radius {r}"));
    Ok(out)
}

/// `(1/π) Im m_N` of each realization against the cavity density on the same
/// `(E, η)` grid. The cavity populations are shared by all realizations.
pub fn run_dos_compare(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let points: Vec<(f64, f64)> = grid(cfg).collect();
    let mut jobs: Vec<Job> = points.iter().map(|&(e, eta)| Job::Cavity(e, eta)).collect();
    for &n in &cfg.sizes {
        jobs.extend((0..cfg.realizations).map(|_| Job::Graph(n)));
    }
    let specs: Vec<TaskSpec> = jobs
        .iter()
        .enumerate()
        .map(|(k, job)| {
            let label = match job {
                Job::Cavity(e, eta) => format!("cavity E={e} eta={eta}"),
                Job::Graph(n) => format!("graph N={n} realization={}", (k - points.len()) % cfg.realizations),
            };
            TaskSpec::new(cfg, Experiment::DosCompare, k, label)
        })
        .collect();

    enum Side {
        Cavity(CavityPoint),
        Graph(GraphSide),
    }
    let (values, records) = run_tasks(&specs, |spec| match jobs[spec.index] {
        Job::Cavity(e, eta) => cavity_point(cfg, e, eta, spec.seed).map(|o| TaskOutput {
            value: Side::Cavity(o.value),
            notes: o.notes,
        }),
        Job::Graph(n) => graph_side(cfg, n, spec.seed).map(|o| TaskOutput {
            value: Side::Graph(o.value),
            notes: o.notes,
        }),
    });

    let cavity: Vec<Option<f64>> = values[..points.len()]
        .iter()
        .map(|v| match v {
            Some(Side::Cavity(p)) => Some(p.dos),
            _ => None,
        })
        .collect();
    let (t, g) = (cfg.hopping(), cfg.g());
    let mut rows = Vec::new();
    let mut sup = format!("{SUP_HEADER}\n");
    let mut coupling = format!("{}\n", AuditRow::HEADER);
    for (k, v) in values.iter().enumerate().skip(points.len()) {
        let (Some(Side::Graph(side)), Job::Graph(n)) = (v, &jobs[k]) else {
            continue;
        };
        let seed = specs[k].seed;
        for (j, (&(e, eta), &dos_graph)) in points.iter().zip(&side.dos).enumerate() {
            let (dos_cavity, diff) = match cavity[j] {
                Some(c) => (c, (dos_graph - c).abs()),
                None => (f64::NAN, f64::NAN),
            };
            rows.push(format!("{e},{eta},{n},{},{t},{g},{seed},{dos_graph},{dos_cavity},{diff}", cfg.d));
        }
        for &eta in &cfg.etas {
            let at_eta: Vec<usize> = (0..points.len()).filter(|&j| points[j].1 == eta).collect();
            if at_eta.iter().any(|&j| cavity[j].is_none()) {
                continue;
            }
            let peak = at_eta.iter().map(|&j| cavity[j].unwrap()).fold(0.0, f64::max);
            let sup_diff = at_eta
                .iter()
                .map(|&j| (side.dos[j] - cavity[j].unwrap()).abs())
                .fold(0.0, f64::max);
            sup.push_str(&format!("{n},{},{t},{g},{eta},{seed},{sup_diff},{peak},{}\n", cfg.d, sup_diff / peak));
        }
        for row in &side.coupling {
            coupling.push_str(&row.to_csv());
            coupling.push('\n');
        }
    }
    Ok(ExperimentOutput {
        header: DOS_HEADER.to_string(),
        rows,
        tasks: records,
        files: vec![(SUP_FILE.to_string(), sup), (COUPLING_FILE.to_string(), coupling)],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupled_roots_agree_on_truncated_entries() {
        let cfg = RunConfig::parse(
            "d = 3\nt = 0.3\nN = 400\nE = 0\nE = 1\neta = 0.2\nrealizations = 2\nM = 2000\nsweeps = 10\nroot_draws = 2000\n",
        )
        .unwrap();
        let out = run_dos_compare(&cfg).unwrap();
        assert_eq!(out.rows.len(), 4);
        let coupling = &out.files[1].1;
        assert!(coupling.lines().count() > 1);
        for line in coupling.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let ratio: f64 = f[9].parse().unwrap();
            assert!(ratio <= 1.0, "{line}");
        }
        assert_eq!(out.files[0].1.lines().count(), 3);
    }
}
