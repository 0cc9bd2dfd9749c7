//! One module per experiment. Each returns the rows of `results.csv` in task
//! order plus any further files.

mod audit;
mod cavity;
mod conc;
mod dos;
mod phase;
mod qi;

pub use audit::{run_ct_audit, SWITCHINGS};
pub use cavity::{run_cavity, CAVITY_HEADER};
pub use conc::{iqr, run_conc_audit, CONC_HEADER, IQR_HEADER};
pub use dos::{run_dos_compare, DOS_HEADER, SUP_HEADER};
pub use phase::{
    analyze, parse_qi_csv, render_report, run_phase_report, PhaseAnalysis, PhaseRow, QiRecord, LIMITATION,
    PHASE_HEADER,
};
pub use qi::{run_qi_sweep, QI_HEADER};

use anderson_core::graph::sample_regular;
use anderson_core::operator::assemble;
use anderson_core::rng::split_seed;
use anderson_core::{DisorderField, Hamiltonian, RegularGraph};

use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::runner::ExperimentOutput;

pub fn dispatch(experiment: Experiment, cfg: &RunConfig) -> Result<ExperimentOutput> {
    match experiment {
        Experiment::QiSweep => run_qi_sweep(cfg),
        Experiment::Cavity => run_cavity(cfg),
        Experiment::CtAudit => run_ct_audit(cfg),
        Experiment::ConcAudit => run_conc_audit(cfg),
        Experiment::DosCompare => run_dos_compare(cfg),
        Experiment::PhaseReport => run_phase_report(cfg),
    }
}

/// Graph, disorder and operator of one realization; the graph and the
/// potential use independent streams of the task seed.
pub(crate) struct Instance {
    pub graph: RegularGraph,
    pub disorder: DisorderField,
    pub h: Hamiltonian,
}

pub(crate) fn instance(cfg: &RunConfig, n: usize, seed: u64) -> Result<Instance> {
    let graph = sample_regular(n, cfg.d, split_seed(seed, 1, 0))?;
    let disorder = DisorderField::gaussian(n, split_seed(seed, 2, 0));
    let h = assemble(&graph, &disorder, cfg.hopping())?;
    Ok(Instance { graph, disorder, h })
}

/// Parameter pairs in the order rows are written: energies outer, η inner.
pub(crate) fn grid(cfg: &RunConfig) -> impl Iterator<Item = (f64, f64)> + '_ {
    cfg.energies
        .iter()
        .flat_map(move |&e| cfg.etas.iter().map(move |&eta| (e, eta)))
}
