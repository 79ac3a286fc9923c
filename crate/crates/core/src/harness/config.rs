//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` and `;` start comments; a `[section]` header
//! prefixes the keys below it with `section.`. Lists are comma separated.
//! Every key is validated against the schema before any computation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exponents::LebesgueExponent;

/// Experiments the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Exponents,
    Poisson,
    Truncation,
    Staircase,
    Celliptic,
    Divergence,
    Sweep,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        Self::Exponents,
        Self::Poisson,
        Self::Truncation,
        Self::Staircase,
        Self::Celliptic,
        Self::Divergence,
        Self::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Exponents => "exponents",
            Self::Poisson => "poisson",
            Self::Truncation => "truncation",
            Self::Staircase => "staircase",
            Self::Celliptic => "celliptic",
            Self::Divergence => "divergence",
            Self::Sweep => "sweep",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// Boundary data selector.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSelector {
    Gaussian,
    Indicator,
    Plateau,
    PowerDecay,
    /// The fixed ten-profile smooth corpus.
    Corpus,
    File(PathBuf),
}

/// Operators available to the `celliptic` experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorChoice {
    Gradient,
    SymmetricGradient,
}

/// Which failing checks make the run fail.
#[derive(Debug, Clone, PartialEq)]
pub enum HardChecks {
    All,
    None,
    Named(Vec<String>),
}

impl HardChecks {
    pub fn is_hard(&self, check: &str) -> bool {
        match self {
            HardChecks::All => true,
            HardChecks::None => false,
            HardChecks::Named(names) => names.iter().any(|n| n == check || check.starts_with(&format!("{n}["))),
        }
    }
}

/// Validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub n: usize,
    pub half_extent: f64,
    pub spacings: Vec<f64>,
    pub level_ratio: f64,
    pub level_top: f64,
    pub p: Vec<f64>,
    /// Empty means "use `2p*`".
    pub q: Vec<LebesgueExponent>,
    pub alpha: f64,
    pub data: DataSelector,
    pub amplitude: f64,
    pub width: f64,
    pub radius: f64,
    pub tol_domination: f64,
    pub tol_trace: f64,
    pub tol_stability: f64,
    pub seed: u64,
    pub hard: HardChecks,
    pub output: Option<PathBuf>,
    pub operator: OperatorChoice,
    pub j_max: i32,
    pub depth: usize,
    pub subdivisions: usize,
    pub heights: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            n: 3,
            half_extent: 2.0,
            spacings: vec![0.1],
            level_ratio: 1.25,
            level_top: 4.0,
            p: vec![2.0],
            q: Vec::new(),
            alpha: 0.9,
            data: DataSelector::Gaussian,
            amplitude: 1.0,
            width: 0.3,
            radius: 0.5,
            tol_domination: 1e-2,
            tol_trace: 1e-2,
            tol_stability: 0.2,
            seed: 0,
            hard: HardChecks::All,
            output: None,
            operator: OperatorChoice::Gradient,
            j_max: 6,
            depth: 6,
            subdivisions: 4,
            heights: vec![4.0, 8.0, 16.0, 32.0],
        }
    }
}

/// Raw key/value pairs with line numbers.
fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or(Error::Parse { line: line_no, msg: "unterminated section header".into() })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(Error::Parse { line: line_no, msg: format!("expected key = value, got '{line}'") })?;
        let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
        if out.insert(key.clone(), (line_no, v.trim().to_string())).is_some() {
            return Err(Error::Parse { line: line_no, msg: format!("duplicate key '{key}'") });
        }
    }
    Ok(out)
}

fn scalar<T: FromStr>(key: &str, line: usize, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse { line, msg: format!("invalid value '{v}' for {key}") })
}

fn list<T: FromStr>(key: &str, line: usize, v: &str) -> Result<Vec<T>> {
    v.split(',').map(|s| scalar(key, line, s.trim())).collect()
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        let mut cfg = text.parse::<Self>()?;
        // relative data paths resolve against the config file
        if let DataSelector::File(p) = &cfg.data {
            if p.is_relative() {
                if let Some(dir) = path.as_ref().parent() {
                    cfg.data = DataSelector::File(dir.join(p));
                }
            }
        }
        Ok(cfg)
    }

    /// Range checks shared by all experiments.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(2..=3).contains(&self.n) {
            return bad(format!("n must be 2 or 3, got {}", self.n));
        }
        if !(self.half_extent > 0.0) {
            return bad("grid.L must be positive".into());
        }
        if self.spacings.is_empty() || self.spacings.iter().any(|h| !(*h > 0.0 && *h < self.half_extent)) {
            return bad("grid.h entries must lie in (0, L)".into());
        }
        if !(self.level_ratio > 1.0 && self.level_top > 0.0) {
            return bad("levels.ratio must exceed 1 and levels.top be positive".into());
        }
        if self.p.is_empty() || self.p.iter().any(|p| !(*p >= 1.0)) {
            return bad("exp.p entries must be >= 1".into());
        }
        if self.q.iter().any(|q| matches!(q, LebesgueExponent::Finite(v) if !(*v >= 1.0))) {
            return bad("exp.q entries must be >= 1 or inf".into());
        }
        for (name, v) in [
            ("tol.domination", self.tol_domination),
            ("tol.trace", self.tol_trace),
            ("tol.stability", self.tol_stability),
            ("data.width", self.width),
            ("data.radius", self.radius),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive"));
            }
        }
        if !self.amplitude.is_finite() {
            return bad("data.amp must be finite".into());
        }
        if !(0..=10).contains(&self.j_max) {
            return bad("celliptic.j_max must lie in 0..=10".into());
        }
        if self.depth == 0 || self.depth > 12 || self.subdivisions == 0 {
            return bad("staircase.depth must lie in 1..=12 and subdivisions be positive".into());
        }
        if self.heights.is_empty() || self.heights.windows(2).any(|w| w[1] <= w[0]) {
            return bad("divergence.heights must be increasing".into());
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut c = ExperimentConfig::default();
        let mut data_name: Option<(usize, String)> = None;
        let mut data_path: Option<String> = None;
        for (key, (line, v)) in parse_pairs(text)? {
            let v = v.as_str();
            match key.as_str() {
                "experiment" => c.experiment = Some(v.parse().map_err(|_| Error::Parse { line, msg: format!("unknown experiment '{v}'") })?),
                "n" => c.n = scalar(&key, line, v)?,
                "grid.L" => c.half_extent = scalar(&key, line, v)?,
                "grid.h" => c.spacings = list(&key, line, v)?,
                "levels.ratio" => c.level_ratio = scalar(&key, line, v)?,
                "levels.top" => c.level_top = scalar(&key, line, v)?,
                "exp.p" => c.p = list(&key, line, v)?,
                "exp.q" => c.q = list(&key, line, v)?,
                "exp.alpha" => c.alpha = scalar(&key, line, v)?,
                "data" => data_name = Some((line, v.to_string())),
                "data.path" => data_path = Some(v.to_string()),
                "data.amp" => c.amplitude = scalar(&key, line, v)?,
                "data.width" => c.width = scalar(&key, line, v)?,
                "data.radius" => c.radius = scalar(&key, line, v)?,
                "tol.domination" => c.tol_domination = scalar(&key, line, v)?,
                "tol.trace" => c.tol_trace = scalar(&key, line, v)?,
                "tol.stability" => c.tol_stability = scalar(&key, line, v)?,
                "seed" => c.seed = scalar(&key, line, v)?,
                "hard" => {
                    c.hard = match v {
                        "all" => HardChecks::All,
                        "none" => HardChecks::None,
                        _ => HardChecks::Named(v.split(',').map(|s| s.trim().to_string()).collect()),
                    }
                }
                "output" => c.output = Some(PathBuf::from(v)),
                "celliptic.operator" => {
                    c.operator = match v {
                        "gradient" => OperatorChoice::Gradient,
                        "symmetric_gradient" => OperatorChoice::SymmetricGradient,
                        _ => return Err(Error::Parse { line, msg: format!("unknown operator '{v}'") }),
                    }
                }
                "celliptic.j_max" => c.j_max = scalar(&key, line, v)?,
                "staircase.depth" => c.depth = scalar(&key, line, v)?,
                "staircase.subdivisions" => c.subdivisions = scalar(&key, line, v)?,
                "divergence.heights" => c.heights = list(&key, line, v)?,
                _ => return Err(Error::Parse { line, msg: format!("unknown key '{key}'") }),
            }
        }
        if let Some((line, name)) = data_name {
            c.data = match name.as_str() {
                "gaussian" => DataSelector::Gaussian,
                "indicator" => DataSelector::Indicator,
                "plateau" => DataSelector::Plateau,
                "power-decay" => DataSelector::PowerDecay,
                "corpus" => DataSelector::Corpus,
                "file" => DataSelector::File(PathBuf::from(
                    data_path.ok_or(Error::Parse { line, msg: "data = file needs data.path".into() })?,
                )),
                _ => return Err(Error::Parse { line, msg: format!("unknown data selector '{name}'") }),
            };
        }
        c.validate()?;
        Ok(c)
    }
}
