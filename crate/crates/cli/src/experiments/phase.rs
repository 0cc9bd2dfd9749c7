use std::collections::BTreeMap;
use std::fmt::Write as _;

use anderson_core::cavity::mobility_edge;

use crate::config::{Experiment, RunConfig};
use crate::error::{LabError, Result};
use crate::runner::{ExperimentOutput, REPORT_FILE};

use super::conc::iqr;
use super::qi::{qi_rows, QI_HEADER};

pub const PHASE_HEADER: &str = "N,E,eta,d,t,g,realizations,median_QI_2,slope,bounded,increasing";
pub const QI_FILE: &str = "qi.csv";
pub const LIMITATION: &str = "a finite experiment can only exhibit growth along a finite η ladder";

/// One row of a `qi-sweep` table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QiRecord {
    pub energy: f64,
    pub eta: f64,
    pub n: usize,
    pub d: usize,
    pub t: f64,
    pub g: f64,
    pub seed: u64,
    pub card: usize,
    pub q2: f64,
    pub q_half: f64,
}

fn field<T: std::str::FromStr>(cols: &[&str], k: usize, line: usize) -> Result<T> {
    cols.get(k)
        .and_then(|c| c.trim().parse().ok())
        .ok_or_else(|| LabError::Input(format!("line {line}: bad or missing column {k}")))
}

pub fn parse_qi_csv(text: &str) -> Result<Vec<QiRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == QI_HEADER => {}
        other => {
            return Err(LabError::Input(format!(
                "expected header {QI_HEADER:?}, found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let line_no = k + 2;
        let c: Vec<&str> = line.split(',').collect();
        out.push(QiRecord {
            energy: field(&c, 0, line_no)?,
            eta: field(&c, 1, line_no)?,
            n: field(&c, 2, line_no)?,
            d: field(&c, 3, line_no)?,
            t: field(&c, 4, line_no)?,
            g: field(&c, 5, line_no)?,
            seed: field(&c, 6, line_no)?,
            card: field(&c, 7, line_no)?,
            q2: field(&c, 8, line_no)?,
            q_half: field(&c, 9, line_no)?,
        });
    }
    Ok(out)
}

/// Ladder statistics at one `(N, E)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow {
    pub n: usize,
    pub energy: f64,
    /// Median `Q_I(2)` per rung, η decreasing.
    pub medians: Vec<f64>,
    pub realizations: Vec<usize>,
    /// Least-squares slope of `ln Q_I` against `ln(1/η)`; NaN when some
    /// median vanishes.
    pub slope: f64,
    pub bounded: bool,
    pub increasing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAnalysis {
    pub theta: f64,
    /// η ladder, decreasing.
    pub etas: Vec<f64>,
    pub rows: Vec<PhaseRow>,
    /// Crossover estimate per `N`; `None` when the slope never crosses θ.
    pub crossovers: Vec<(usize, Option<f64>)>,
}

impl PhaseAnalysis {
    pub fn row(&self, n: usize, energy: f64) -> Option<&PhaseRow> {
        self.rows.iter().find(|r| r.n == n && r.energy == energy)
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// First crossing of θ by the slope as `|E|` grows, interpolated linearly
/// between grid points. Slopes at `±E` are averaged.
fn crossover(rows: &[&PhaseRow], theta: f64) -> Option<f64> {
    let mut by_abs: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.slope.is_finite()) {
        let key = r.energy.abs();
        let entry = by_abs.entry(key.to_bits()).or_insert((key, 0.0, 0));
        entry.1 += r.slope;
        entry.2 += 1;
    }
    let curve: Vec<(f64, f64)> = by_abs.values().map(|&(e, s, k)| (e, s / k as f64)).collect();
    if curve.first().is_some_and(|&(_, s)| s >= theta) {
        return None;
    }
    curve.windows(2).find(|w| w[0].1 < theta && w[1].1 >= theta).map(|w| {
        let ((a, sa), (b, sb)) = (w[0], w[1]);
        a + (theta - sa) * (b - a) / (sb - sa)
    })
}

pub fn analyze(records: &[QiRecord], theta: f64) -> Result<PhaseAnalysis> {
    let mut etas: Vec<f64> = Vec::new();
    for r in records {
        if !etas.contains(&r.eta) {
            etas.push(r.eta);
        }
    }
    etas.sort_by(|a, b| b.total_cmp(a));
    if etas.len() < 3 {
        return Err(LabError::InsufficientData(format!(
            "the η ladder has {} rung(s), at least 3 are needed",
            etas.len()
        )));
    }
    let mut keys: Vec<(usize, f64)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.n, r.energy)) {
            keys.push((r.n, r.energy));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let x: Vec<f64> = etas.iter().map(|eta| (1.0 / eta).ln()).collect();
    let mut rows = Vec::new();
    for &(n, energy) in &keys {
        let mut medians = Vec::new();
        let mut counts = Vec::new();
        for &eta in &etas {
            let qs: Vec<f64> = records
                .iter()
                .filter(|r| r.n == n && r.energy == energy && r.eta == eta)
                .map(|r| r.q2)
                .collect();
            counts.push(qs.len());
            medians.push(iqr(&qs).map_or(f64::NAN, |(m, _, _)| m));
        }
        let slope = if medians.iter().all(|&m| m > 0.0) {
            slope(&x, &medians.iter().map(|m| m.ln()).collect::<Vec<_>>())
        } else {
            f64::NAN
        };
        rows.push(PhaseRow {
            n,
            energy,
            increasing: medians.windows(2).all(|w| w[1] > w[0]),
            bounded: slope < theta,
            medians,
            realizations: counts,
            slope,
        });
    }
    let mut sizes: Vec<usize> = keys.iter().map(|k| k.0).collect();
    sizes.dedup();
    let crossovers = sizes
        .into_iter()
        .map(|n| {
            let at: Vec<&PhaseRow> = rows.iter().filter(|r| r.n == n).collect();
            (n, crossover(&at, theta))
        })
        .collect();
    Ok(PhaseAnalysis {
        theta,
        etas,
        rows,
        crossovers,
    })
}

/// Text report: ladder table, crossover estimate, `𝔈(g)` and the distance
/// between the two.
pub fn render_report(a: &PhaseAnalysis, d: usize, t: f64, g: f64) -> String {
    let edge = mobility_edge(g).ok();
    let mut s = String::new();
    writeln!(s, "phase report").unwrap();
    writeln!(s, "d = {d}, g = {g}, t = {t}, theta = {}", a.theta).unwrap();
    let ladder: Vec<String> = a.etas.iter().map(|e| e.to_string()).collect();
    writeln!(s, "eta ladder: {}", ladder.join(" ")).unwrap();
    for &(n, cross) in &a.crossovers {
        writeln!(s).unwrap();
        writeln!(s, "N = {n}").unwrap();
        writeln!(s, "{:>10} {:>10} {:>8} {:>11}  median Q_I(2) along the ladder", "E", "slope", "bounded", "increasing")
            .unwrap();
        for r in a.rows.iter().filter(|r| r.n == n) {
            let medians: Vec<String> = r.medians.iter().map(|m| format!("{m:.4}")).collect();
            writeln!(
                s,
                "{:>10} {:>10.4} {:>8} {:>11}  {}",
                r.energy,
                r.slope,
                r.bounded,
                r.increasing,
                medians.join(" ")
            )
            .unwrap();
        }
        match cross {
            Some(m) => writeln!(s, "crossover estimate M_hat = {m:.6}").unwrap(),
            None => writeln!(s, "crossover estimate M_hat: none (slope does not cross theta on this grid)").unwrap(),
        }
        match edge {
            Some(e) => writeln!(s, "mobility edge E(g) = {e:.9}").unwrap(),
            None => writeln!(s, "mobility edge E(g): undefined for g = {g}").unwrap(),
        }
        if let (Some(m), Some(e)) = (cross, edge) {
            writeln!(s, "|M_hat - E(g)| = {:.6}", (m - e).abs()).unwrap();
        }
    }
    writeln!(s).unwrap();
    writeln!(s, "Limitation: {LIMITATION}.").unwrap();
    s
}

fn phase_table(a: &PhaseAnalysis, d: usize, t: f64, g: f64) -> Vec<String> {
    let mut rows = Vec::new();
    for r in &a.rows {
        for (k, eta) in a.etas.iter().enumerate() {
            rows.push(format!(
                "{},{},{eta},{d},{t},{g},{},{},{},{},{}",
                r.n, r.energy, r.realizations[k], r.medians[k], r.slope, r.bounded, r.increasing
            ));
        }
    }
    rows
}

/// Summarizes a `qi-sweep` table, read from `input` or computed in place with
/// the same task seeds as `qi-sweep`.
pub fn run_phase_report(cfg: &RunConfig) -> Result<ExperimentOutput> {
    let (records, tasks, mut files) = match &cfg.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
            (parse_qi_csv(&text)?, Vec::new(), Vec::new())
        }
        None => {
            let qi = qi_rows(cfg, Experiment::PhaseReport)?;
            let csv = qi.results_csv();
            (parse_qi_csv(&csv)?, qi.tasks, vec![(QI_FILE.to_string(), csv)])
        }
    };
    if let Some(r) = records.iter().find(|r| r.d != cfg.d) {
        return Err(LabError::Input(format!("table has d = {} but the config has d = {}", r.d, cfg.d)));
    }
    let analysis = analyze(&records, cfg.theta)?;
    let (t, g) = (cfg.hopping(), cfg.g());
    files.push((REPORT_FILE.to_string(), render_report(&analysis, cfg.d, t, g)));
    Ok(ExperimentOutput {
        header: PHASE_HEADER.to_string(),
        rows: phase_table(&analysis, cfg.d, t, g),
        tasks,
        files,
    })
}
