use anderson_core::spectra::{eigensystem, p_profile, q_from_profile, Interval};

use crate::config::{Experiment, RunConfig};
use crate::error::Result;
use crate::runner::{run_tasks, ExperimentOutput, TaskOutput, TaskSpec};

use super::{grid, instance};

pub const QI_HEADER: &str = "E,eta,N,d,t,g,seed,card_I,QI_2,QI_half_s";

/// Tasks are (N, realization) pairs; each eigensolves once and emits one row
/// per `(E, η)` with `I = [E - η, E + η]`.
pub(crate) fn qi_tasks(cfg: &RunConfig, experiment: Experiment) -> Vec<(TaskSpec, usize)> {
    let mut specs = Vec::new();
    for &n in &cfg.sizes {
        for r in 0..cfg.realizations {
            let index = specs.len();
            specs.push((TaskSpec::new(cfg, experiment, index, format!("N={n} realization={r}")), n));
        }
    }
    specs
}

pub(crate) fn qi_rows(cfg: &RunConfig, experiment: Experiment) -> Result<ExperimentOutput> {
    let tasks = qi_tasks(cfg, experiment);
    let specs: Vec<TaskSpec> = tasks.iter().map(|(s, _)| s.clone()).collect();
    let sizes: Vec<usize> = tasks.iter().map(|&(_, n)| n).collect();
    let s = cfg.holder_s();
    let (values, records) = run_tasks(&specs, |spec| {
        let n = sizes[spec.index];
        let inst = instance(cfg, n, spec.seed)?;
        let es = eigensystem(&inst.h)?;
        let mut rows = Vec::new();
        let mut notes = Vec::new();
        for (e, eta) in grid(cfg) {
            let interval = Interval::centered(e, eta)?;
            let card = es.count(&interval);
            if card == 0 {
                notes.push(format!("empty interval at E={e} eta={eta}"));
            }
            let profile = p_profile(&es, &interval);
            rows.push(format!(
                "{e},{eta},{n},{},{},{},{},{card},{},{}",
                cfg.d,
                cfg.hopping(),
                cfg.g(),
                spec.seed,
                q_from_profile(&profile, 2.0),
                q_from_profile(&profile, s / 2.0)
            ));
        }
        Ok(TaskOutput { value: rows, notes })
    });
    Ok(ExperimentOutput {
        header: QI_HEADER.to_string(),
        rows: values.into_iter().flatten().flatten().collect(),
        tasks: records,
        files: Vec::new(),
    })
}

pub fn run_qi_sweep(cfg: &RunConfig) -> Result<ExperimentOutput> {
    qi_rows(cfg, Experiment::QiSweep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_hopping_rows_are_n_over_count() {
        let cfg = RunConfig::parse("d = 3\nt = 0\nN = 60\nE = 0\nE = 0.5\neta = 0.3\neta = 1\nrealizations = 2\nseed = 4\n").unwrap();
        let out = run_qi_sweep(&cfg).unwrap();
        assert_eq!(out.rows.len(), 8);
        for row in &out.rows {
            let f: Vec<&str> = row.split(',').collect();
            let card: f64 = f[7].parse().unwrap();
            let q2: f64 = f[8].parse().unwrap();
            let q_half: f64 = f[9].parse().unwrap();
            if card > 0.0 {
                let ratio = 60.0 / card;
                assert!((q2 - ratio).abs() < 1e-9 * ratio);
                assert!((q_half - ratio.powf(-0.75)).abs() < 1e-9);
            } else {
                assert_eq!(q2, 0.0);
            }
        }
        assert_eq!(run_qi_sweep(&cfg).unwrap().results_csv(), out.results_csv());
    }
}
