//! Flat `key = value` run configuration. Lists are written as repeated keys;
//! `#` starts a comment.
//!
//! ```text
//! experiment = qi-sweep
//! d = 20
//! g = 2
//! N = 4000
//! E = 0
//! E = 3
//! eta = 0.2
//! eta = 0.1
//! realizations = 10
//! seed = 7
//! ```
//!
//! `E_grid = lo hi count` expands to `count` evenly spaced energies.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anderson_core::cavity::hopping_of;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    QiSweep,
    Cavity,
    CtAudit,
    ConcAudit,
    DosCompare,
    PhaseReport,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::QiSweep,
        Experiment::Cavity,
        Experiment::CtAudit,
        Experiment::ConcAudit,
        Experiment::DosCompare,
        Experiment::PhaseReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::QiSweep => "qi-sweep",
            Experiment::Cavity => "cavity",
            Experiment::CtAudit => "ct-audit",
            Experiment::ConcAudit => "conc-audit",
            Experiment::DosCompare => "dos-compare",
            Experiment::PhaseReport => "phase-report",
        }
    }

    /// Stream tag for per-task seeds. The phase report shares the tag of the
    /// sweep it summarizes so both produce the same rows.
    pub fn stream(self) -> u64 {
        match self {
            Experiment::QiSweep | Experiment::PhaseReport => 0x51,
            Experiment::Cavity => 0x52,
            Experiment::CtAudit => 0x53,
            Experiment::ConcAudit => 0x54,
            Experiment::DosCompare => 0x55,
        }
    }

    fn needs_graphs(self) -> bool {
        !matches!(self, Experiment::Cavity)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown experiment {s:?}")))
    }
}

/// Hopping given either directly or through `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    G(f64),
    T(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    pub d: usize,
    pub coupling: Coupling,
    pub sizes: Vec<usize>,
    pub energies: Vec<f64>,
    pub etas: Vec<f64>,
    pub realizations: usize,
    pub pool_size: usize,
    pub sweeps: usize,
    pub root_draws: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Moment exponents: the Hölder exponent for `qi-sweep`, the `F_s`
    /// exponents for `conc-audit`.
    pub s: Vec<f64>,
    pub theta: f64,
    pub input: Option<PathBuf>,
    pub radius_max: usize,
    pub set_size: usize,
    /// Configuration lines in file order, echoed into the manifest.
    pub echo: Vec<(String, String)>,
}

const KEYS: &[&str] = &[
    "experiment",
    "d",
    "g",
    "t",
    "N",
    "E",
    "E_grid",
    "eta",
    "realizations",
    "M",
    "sweeps",
    "root_draws",
    "seed",
    "out",
    "s",
    "theta",
    "input",
    "radius_max",
    "set_size",
];

const LIST_KEYS: &[&str] = &["N", "E", "E_grid", "eta", "s"];

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| LabError::Config(format!("line {line}: cannot parse {key} = {value:?}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut echo = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| LabError::Config(format!("line {}: expected key = value, got {raw:?}", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(LabError::Config(format!("line {}: unknown key {key:?}", k + 1)));
            }
            if !LIST_KEYS.contains(&key) && echo.iter().any(|(seen, _): &(String, String)| seen == key) {
                return Err(LabError::Config(format!("line {}: key {key:?} given twice", k + 1)));
            }
            echo.push((key.to_string(), value.to_string()));
        }
        Self::from_pairs(echo)
    }

    fn from_pairs(echo: Vec<(String, String)>) -> Result<Self> {
        let mut cfg = RunConfig {
            experiment: None,
            d: 0,
            coupling: Coupling::T(f64::NAN),
            sizes: Vec::new(),
            energies: Vec::new(),
            etas: Vec::new(),
            realizations: 1,
            pool_size: anderson_core::cavity::DEFAULT_POOL_SIZE,
            sweeps: anderson_core::cavity::DEFAULT_SWEEPS,
            root_draws: anderson_core::cavity::DEFAULT_POOL_SIZE,
            seed: 0,
            out: None,
            s: Vec::new(),
            theta: 0.5,
            input: None,
            radius_max: 6,
            set_size: 3,
            echo: Vec::new(),
        };
        let (mut g, mut t, mut have_d) = (None, None, false);
        for (line, (key, value)) in echo.iter().enumerate() {
            let line = line + 1;
            match key.as_str() {
                "experiment" => cfg.experiment = Some(value.parse()?),
                "d" => {
                    cfg.d = parse_value(key, value, line)?;
                    have_d = true;
                }
                "g" => g = Some(parse_value::<f64>(key, value, line)?),
                "t" => t = Some(parse_value::<f64>(key, value, line)?),
                "N" => cfg.sizes.push(parse_value(key, value, line)?),
                "E" => cfg.energies.push(parse_value(key, value, line)?),
                "E_grid" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(LabError::Config(format!("E_grid needs `lo hi count`, got {value:?}")));
                    }
                    let lo: f64 = parse_value(key, parts[0], line)?;
                    let hi: f64 = parse_value(key, parts[1], line)?;
                    let count: usize = parse_value(key, parts[2], line)?;
                    if count < 2 || !(lo < hi) {
                        return Err(LabError::Config(format!("E_grid needs lo < hi and count >= 2, got {value:?}")));
                    }
                    cfg.energies
                        .extend((0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64));
                }
                "eta" => cfg.etas.push(parse_value(key, value, line)?),
                "realizations" => cfg.realizations = parse_value(key, value, line)?,
                "M" => cfg.pool_size = parse_value(key, value, line)?,
                "sweeps" => cfg.sweeps = parse_value(key, value, line)?,
                "root_draws" => cfg.root_draws = parse_value(key, value, line)?,
                "seed" => cfg.seed = parse_value(key, value, line)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "s" => cfg.s.push(parse_value(key, value, line)?),
                "theta" => cfg.theta = parse_value(key, value, line)?,
                "input" => cfg.input = Some(PathBuf::from(value)),
                "radius_max" => cfg.radius_max = parse_value(key, value, line)?,
                "set_size" => cfg.set_size = parse_value(key, value, line)?,
                _ => unreachable!("keys are checked while reading"),
            }
        }
        cfg.coupling = match (g, t) {
            (Some(g), None) => Coupling::G(g),
            (None, Some(t)) => Coupling::T(t),
            _ => return Err(LabError::Config("exactly one of g and t must be given".into())),
        };
        if !have_d {
            return Err(LabError::Config("missing degree d".into()));
        }
        cfg.echo = echo;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the experiment.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(LabError::Config(m));
        if self.d < 3 {
            return fail(format!("d = {} must be at least 3", self.d));
        }
        match self.coupling {
            Coupling::G(g) if !(g > 0.0 && g.is_finite()) => return fail(format!("g = {g} must be positive")),
            Coupling::T(t) if !(t >= 0.0 && t.is_finite()) => return fail(format!("t = {t} must be nonnegative")),
            _ => {}
        }
        for &n in &self.sizes {
            if n < self.d + 1 || (n * self.d) % 2 == 1 {
                return fail(format!("N = {n} needs N >= d + 1 and N d even (d = {})", self.d));
            }
        }
        if self.etas.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return fail("every eta must be positive".into());
        }
        if self.energies.iter().any(|e| !e.is_finite()) {
            return fail("energies must be finite".into());
        }
        if self.s.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return fail("moment exponents s must be positive".into());
        }
        if self.realizations == 0 || self.pool_size == 0 || self.root_draws == 0 {
            return fail("realizations, M and root_draws must be positive".into());
        }
        if !(self.theta > 0.0) {
            return fail(format!("theta = {} must be positive", self.theta));
        }
        Ok(())
    }

    /// Checks specific to `experiment`.
    pub fn validate_for(&self, experiment: Experiment) -> Result<()> {
        if let Some(declared) = self.experiment {
            if declared != experiment {
                return Err(LabError::Config(format!(
                    "config declares experiment {declared} but {experiment} was requested"
                )));
            }
        }
        let needs_run = !(experiment == Experiment::PhaseReport && self.input.is_some());
        if needs_run && experiment.needs_graphs() && self.sizes.is_empty() {
            return Err(LabError::Config(format!("{experiment} needs at least one N")));
        }
        if needs_run && (self.energies.is_empty() || self.etas.is_empty()) {
            return Err(LabError::Config(format!("{experiment} needs at least one E and one eta")));
        }
        match experiment {
            Experiment::QiSweep | Experiment::PhaseReport if self.s.iter().any(|&s| s >= 1.0) => Err(LabError::Config(
                "the Hölder exponent s must lie in (0, 1)".into(),
            )),
            Experiment::QiSweep | Experiment::PhaseReport if self.s.len() > 1 => {
                Err(LabError::Config("qi-sweep takes a single Hölder exponent s".into()))
            }
            Experiment::PhaseReport if needs_run && self.etas.len() < 3 => Err(LabError::Config(
                "phase report needs at least 3 eta rungs".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn hopping(&self) -> f64 {
        match self.coupling {
            Coupling::G(g) => hopping_of(g, self.d),
            Coupling::T(t) => t,
        }
    }

    /// `g = t d ln d` when only `t` was given.
    pub fn g(&self) -> f64 {
        match self.coupling {
            Coupling::G(g) => g,
            Coupling::T(t) => t * self.d as f64 * (self.d as f64).ln(),
        }
    }

    /// Hölder exponent for `qi-sweep`, default 0.5.
    pub fn holder_s(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.5)
    }

    /// Renders the configuration back to text; `parse(render())` is the
    /// identity on the parsed fields.
    pub fn render(&self) -> String {
        self.echo.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Copy with the master seed replaced.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut c = self.clone();
        c.seed = seed;
        c.echo.retain(|(k, _)| k != "seed");
        c.echo.push(("seed".into(), seed.to_string()));
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "d = 3\nt = 0.5\nN = 100\nE = 0\neta = 0.1\n";

    #[test]
    fn repeated_keys_make_lists() {
        let cfg = RunConfig::parse("experiment = qi-sweep\nd = 20\ng = 2 # hopping via g\nN = 4000\nN = 2000\nE = 0\nE = 3\neta = 0.2\neta=0.1\n").unwrap();
        assert_eq!(cfg.sizes, vec![4000, 2000]);
        assert_eq!(cfg.energies, vec![0.0, 3.0]);
        assert_eq!(cfg.etas, vec![0.2, 0.1]);
        assert_eq!(cfg.hopping(), 2.0 / (20.0 * 20f64.ln()));
        assert_eq!(cfg.experiment, Some(Experiment::QiSweep));
        assert_eq!(RunConfig::parse(&cfg.render()).unwrap(), cfg);
    }

    #[test]
    fn exactly_one_of_g_and_t() {
        assert!(RunConfig::parse("d = 3\nN = 100\n").is_err());
        assert!(RunConfig::parse("d = 3\ng = 1\nt = 0.1\nN = 100\n").is_err());
    }

    #[test]
    fn size_rules() {
        assert!(RunConfig::parse("d = 3\nt = 1\nN = 3\n").is_err());
        assert!(RunConfig::parse("d = 3\nt = 1\nN = 101\n").is_err());
        assert!(RunConfig::parse("d = 3\nt = 1\nN = 100\n").is_ok());
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(RunConfig::parse(&format!("{BASE}colour = red\n")).is_err());
        assert!(RunConfig::parse(&format!("{BASE}d = 4\n")).is_err());
        assert!(RunConfig::parse(&format!("{BASE}eta = 0\n")).is_err());
    }

    #[test]
    fn energy_grid() {
        let cfg = RunConfig::parse(&format!("{BASE}E_grid = -3 3 21\n")).unwrap();
        assert_eq!(cfg.energies.len(), 22);
        assert_eq!(cfg.energies[1], -3.0);
        assert_eq!(cfg.energies[21], 3.0);
        assert!((cfg.energies[11] - 0.0).abs() < 1e-15);
    }

    #[test]
    fn experiment_checks() {
        let cfg = RunConfig::parse(BASE).unwrap();
        assert!(cfg.validate_for(Experiment::QiSweep).is_ok());
        assert!(cfg.validate_for(Experiment::PhaseReport).is_err());
        let declared = RunConfig::parse(&format!("{BASE}experiment = cavity\n")).unwrap();
        assert!(declared.validate_for(Experiment::QiSweep).is_err());
        assert_eq!(cfg.with_seed(9).seed, 9);
    }
}
