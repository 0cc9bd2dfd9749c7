//! Task queue, output files and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anderson_core::rng::split_seed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{Experiment, RunConfig};
use crate::error::{LabError, Result};
use crate::experiments;

/// Fraction of tasks that must complete for a run to count as a success.
pub const SUCCESS_FRACTION: f64 = 0.9;

pub const RESULTS_FILE: &str = "results.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const REPORT_FILE: &str = "report.txt";

/// One unit of work. `seed` is `split_seed(master, experiment stream, index)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub index: usize,
    pub seed: u64,
    pub label: String,
}

impl TaskSpec {
    pub fn new(cfg: &RunConfig, experiment: Experiment, index: usize, label: String) -> Self {
        Self {
            index,
            seed: split_seed(cfg.seed, experiment.stream(), index as u64),
            label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub index: usize,
    pub seed: u64,
    pub label: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// What a task hands back: CSV rows in a fixed order plus free-form notes.
#[derive(Clone, Debug, Default)]
pub struct TaskOutput<T> {
    pub value: T,
    pub notes: Vec<String>,
}

impl<T> TaskOutput<T> {
    pub fn new(value: T) -> Self {
        Self {
            value,
            notes: Vec::new(),
        }
    }
}

/// Runs every task on the current rayon pool. Results come back in task
/// order whatever the schedule; a failing task is recorded and skipped.
pub fn run_tasks<T, F>(specs: &[TaskSpec], f: F) -> (Vec<Option<T>>, Vec<TaskRecord>)
where
    T: Send,
    F: Fn(&TaskSpec) -> Result<TaskOutput<T>> + Sync,
{
    let outcomes: Vec<Result<TaskOutput<T>>> = specs.par_iter().map(&f).collect();
    let mut values = Vec::with_capacity(specs.len());
    let mut records = Vec::with_capacity(specs.len());
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let mut record = TaskRecord {
            index: spec.index,
            seed: spec.seed,
            label: spec.label.clone(),
            ok: true,
            error: None,
            notes: Vec::new(),
        };
        match outcome {
            Ok(out) => {
                record.notes = out.notes;
                values.push(Some(out.value));
            }
            Err(e) => {
                record.ok = false;
                record.error = Some(e.to_string());
                values.push(None);
            }
        }
        records.push(record);
    }
    (values, records)
}

/// Files produced by an experiment, before they are written.
#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub header: String,
    pub rows: Vec<String>,
    pub tasks: Vec<TaskRecord>,
    /// Further files by name, written next to `results.csv`.
    pub files: Vec<(String, String)>,
}

impl ExperimentOutput {
    pub fn results_csv(&self) -> String {
        let mut s = String::with_capacity(self.header.len() + 1 + self.rows.iter().map(|r| r.len() + 1).sum::<usize>());
        s.push_str(&self.header);
        s.push('\n');
        for row in &self.rows {
            s.push_str(row);
            s.push('\n');
        }
        s
    }

    pub fn completed(&self) -> usize {
        self.tasks.iter().filter(|t| t.ok).count()
    }

    pub fn succeeded(&self) -> bool {
        self.tasks.is_empty() || self.completed() as f64 >= SUCCESS_FRACTION * self.tasks.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub experiment: Experiment,
    pub version: String,
    pub master_seed: u64,
    pub workers: usize,
    /// Configuration lines as `[key, value]` in file order.
    pub config: Vec<(String, String)>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub tasks: Vec<TaskRecord>,
    pub completed: usize,
    pub failed: usize,
    pub success: bool,
    /// SHA-256 of every output file except the manifest.
    pub digests: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::Manifest(format!("{}: {e}", path.display())))
    }

    /// The configuration this run was started from.
    pub fn config(&self) -> Result<RunConfig> {
        let text: String = self.config.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        RunConfig::parse(&text)
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub workers: usize,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            workers: default_workers(),
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Default output directory `runs/<experiment>-<seed>`.
pub fn default_out(experiment: Experiment, cfg: &RunConfig) -> PathBuf {
    cfg.out
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(format!("{experiment}-{}", cfg.seed)))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub out: PathBuf,
    pub manifest: RunManifest,
    pub output: ExperimentOutput,
}

impl RunOutcome {
    /// 0 when at least [`SUCCESS_FRACTION`] of the tasks completed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.success {
            0
        } else {
            2
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| LabError::io(&path, e))
}

/// Computes the experiment in memory, without touching the file system.
pub fn compute(experiment: Experiment, cfg: &RunConfig, workers: usize) -> Result<ExperimentOutput> {
    cfg.validate()?;
    cfg.validate_for(experiment)?;
    anderson_core::use_sequential_kernels();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Config(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| experiments::dispatch(experiment, cfg))
}

/// Runs `experiment` and writes `results.csv`, any extra files and
/// `manifest.json` into `opts.out`.
pub fn run(experiment: Experiment, cfg: &RunConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let started = unix_now();
    let output = compute(experiment, cfg, opts.workers)?;
    std::fs::create_dir_all(&opts.out).map_err(|e| LabError::io(&opts.out, e))?;

    let mut digests = BTreeMap::new();
    let results = output.results_csv();
    write_file(&opts.out, RESULTS_FILE, &results)?;
    digests.insert(RESULTS_FILE.to_string(), sha256_hex(results.as_bytes()));
    for (name, body) in &output.files {
        write_file(&opts.out, name, body)?;
        digests.insert(name.clone(), sha256_hex(body.as_bytes()));
    }

    let completed = output.completed();
    let manifest = RunManifest {
        experiment,
        version: crate::VERSION.to_string(),
        master_seed: cfg.seed,
        workers: opts.workers,
        config: cfg.echo.clone(),
        started_unix: started,
        finished_unix: unix_now(),
        tasks: output.tasks.clone(),
        completed,
        failed: output.tasks.len() - completed,
        success: output.succeeded(),
        digests,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&opts.out, MANIFEST_FILE, &(json + "\n"))?;
    Ok(RunOutcome {
        out: opts.out.clone(),
        manifest,
        output,
    })
}

/// Result of replaying a manifest: one entry per recorded output file.
#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub out: PathBuf,
    /// `(file, recorded digest, replayed digest)`.
    pub files: Vec<(String, String, Option<String>)>,
}

impl ReplayReport {
    pub fn identical(&self) -> bool {
        self.files.iter().all(|(_, a, b)| b.as_deref() == Some(a.as_str()))
    }
}

/// Reruns the experiment recorded in `manifest` into `out` and compares
/// output digests.
pub fn replay(manifest_path: &Path, out: &Path, workers: usize) -> Result<ReplayReport> {
    let manifest = RunManifest::load(manifest_path)?;
    if manifest.version != crate::VERSION {
        return Err(LabError::Manifest(format!(
            "manifest written by version {}, this is {}",
            manifest.version,
            crate::VERSION
        )));
    }
    let cfg = manifest.config()?;
    let outcome = run(manifest.experiment, &cfg, &RunOptions::new(out).with_workers(workers))?;
    let files = manifest
        .digests
        .iter()
        .map(|(name, digest)| (name.clone(), digest.clone(), outcome.manifest.digests.get(name).cloned()))
        .collect();
    Ok(ReplayReport {
        out: out.to_path_buf(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failures_are_recorded_in_task_order() {
        let cfg = RunConfig::parse("d = 3\nt = 0\nN = 10\nE = 0\neta = 1\n").unwrap();
        let specs: Vec<TaskSpec> = (0..20)
            .map(|k| TaskSpec::new(&cfg, Experiment::QiSweep, k, format!("task {k}")))
            .collect();
        let (values, records) = run_tasks(&specs, |s| {
            if s.index % 7 == 3 {
                Err(LabError::Input("boom".into()))
            } else {
                Ok(TaskOutput::new(s.index))
            }
        });
        assert_eq!(values.iter().filter(|v| v.is_none()).count(), 3);
        assert_eq!(values[4], Some(4));
        assert!(!records[3].ok && records[3].error.as_deref().unwrap().contains("boom"));
        let out = ExperimentOutput {
            tasks: records,
            ..Default::default()
        };
        assert_eq!(out.completed(), 17);
        assert!(!out.succeeded());
    }

    #[test]
    fn task_seeds_depend_on_master_and_index_only() {
        let cfg = RunConfig::parse("d = 3\nt = 0\nN = 10\nE = 0\neta = 1\nseed = 5\n").unwrap();
        let a = TaskSpec::new(&cfg, Experiment::QiSweep, 3, String::new());
        let b = TaskSpec::new(&cfg, Experiment::PhaseReport, 3, String::new());
        let c = TaskSpec::new(&cfg, Experiment::Cavity, 3, String::new());
        assert_eq!(a.seed, b.seed);
        assert_ne!(a.seed, c.seed);
        assert_eq!(a.seed, split_seed(5, Experiment::QiSweep.stream(), 3));
    }
}
