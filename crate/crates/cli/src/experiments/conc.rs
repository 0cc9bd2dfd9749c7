use anderson_core::resolvent::{fs_from_diagonal, resolvent_diagonal};
use anderson_core::spectra::{eigensystem, DENSE_BUDGET};
use anderson_core::SpectralParameter;

use crate::config::{Experiment, RunConfig};
use crate::error::{LabError, Result};
use crate::runner::{run_tasks, ExperimentOutput, TaskOutput, TaskSpec};

use super::{grid, instance};

pub const CONC_HEADER: &str = "N,d,t,g,E,eta,s,seed,F_s,bound";
pub const IQR_HEADER: &str = "N,d,t,g,E,eta,s,count,median,q1,q3,iqr";
pub const IQR_FILE: &str = "iqr.csv";

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `(median, q1, q3)` of `xs`; `None` when empty.
pub fn iqr(xs: &[f64]) -> Option<(f64, f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Some((quantile(&v, 0.5), quantile(&v, 0.25), quantile(&v, 0.75)))
}

/// `F_s(z) = (1/N) Σ_j (Im G_jj)^s` per realization, with the spread across
/// realizations summarized in `iqr.csv`.
pub fn run_conc_audit(cfg: &RunConfig) -> Result<ExperimentOutput> {
    for &n in &cfg.sizes {
        let floor = 1.0 / (n as f64).ln();
        if let Some(&eta) = cfg.etas.iter().find(|&&eta| eta < floor) {
            return Err(LabError::Config(format!("eta = {eta} is below 1/ln N = {floor:.4} for N = {n}")));
        }
    }
    let exponents = if cfg.s.is_empty() { vec![1.0] } else { cfg.s.clone() };
    let mut specs = Vec::new();
    let mut sizes = Vec::new();
    for &n in &cfg.sizes {
        for r in 0..cfg.realizations {
            specs.push(TaskSpec::new(cfg, Experiment::ConcAudit, specs.len(), format!("N={n} realization={r}")));
            sizes.push(n);
        }
    }
    let (values, records) = run_tasks(&specs, |spec| {
        let n = sizes[spec.index];
        let inst = instance(cfg, n, spec.seed)?;
        let es = if n <= DENSE_BUDGET { Some(eigensystem(&inst.h)?) } else { None };
        let mut out = Vec::new();
        for (e, eta) in grid(cfg) {
            let z = SpectralParameter::new(e, eta)?;
            let diag = match &es {
                Some(es) => es.resolvent_diagonal(z.z()),
                None => resolvent_diagonal(&inst.h, z)?,
            };
            for &s in &exponents {
                out.push((e, eta, s, fs_from_diagonal(&diag, s)));
            }
        }
        Ok(TaskOutput::new(out))
    });

    let (t, g) = (cfg.hopping(), cfg.g());
    let mut rows = Vec::new();
    for (v, spec) in values.iter().zip(&specs) {
        if let Some(v) = v {
            let n = sizes[spec.index];
            for &(e, eta, s, f) in v {
                rows.push(format!("{n},{},{t},{g},{e},{eta},{s},{},{f},{}", cfg.d, spec.seed, eta.powf(-s)));
            }
        }
    }
    let mut summary = format!("{IQR_HEADER}\n");
    for &n in &cfg.sizes {
        let per_size: Vec<&Vec<(f64, f64, f64, f64)>> = values
            .iter()
            .zip(&sizes)
            .filter(|&(_, &m)| m == n)
            .filter_map(|(v, _)| v.as_ref())
            .collect();
        for (k, (e, eta)) in grid(cfg).enumerate() {
            for (j, &s) in exponents.iter().enumerate() {
                let xs: Vec<f64> = per_size.iter().map(|v| v[k * exponents.len() + j].3).collect();
                if let Some((median, q1, q3)) = iqr(&xs) {
                    summary.push_str(&format!(
                        "{n},{},{t},{g},{e},{eta},{s},{},{median},{q1},{q3},{}\n",
                        cfg.d,
                        xs.len(),
                        q3 - q1
                    ));
                }
            }
        }
    }
    Ok(ExperimentOutput {
        header: CONC_HEADER.to_string(),
        rows,
        tasks: records,
        files: vec![(IQR_FILE.to_string(), summary)],
    })
}
