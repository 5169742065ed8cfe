//! Validated run configuration, serialized verbatim into every artifact.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::qmc::{SeparabilityTest, StateFamily};
use crate::quadrature::BetaParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Bounds,
    Curves,
    Desf,
    Estimate,
    Cube,
    Jacobian,
    Selfcheck,
    Summary,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Curves => "curves",
            Command::Desf => "desf",
            Command::Estimate => "estimate",
            Command::Cube => "cube",
            Command::Jacobian => "jacobian",
            Command::Selfcheck => "selfcheck",
            Command::Summary => "summary",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format `{other}` (expected csv or json)"))),
        }
    }
}

/// Uniform grid `lo, lo + step, …, hi`, written `lo:hi:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for XiGrid {
    fn default() -> Self {
        XiGrid { lo: -4.0, hi: 4.0, step: 0.1 }
    }
}

impl XiGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lo.is_finite() && self.hi.is_finite() && self.step.is_finite() && self.step > 0.0;
        if !ok || self.hi < self.lo {
            return Err(Error::Config(format!("invalid xi grid {self}")));
        }
        if self.len() > 1_000_001 {
            return Err(Error::Config(format!("xi grid {self} has too many points")));
        }
        Ok(())
    }

    fn intervals(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize
    }

    pub fn len(&self) -> usize {
        self.intervals() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid points, computed as `lo + i·step` (snapping values within 1e-12 of zero to 0).
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let x = self.lo + i as f64 * self.step;
                if x.abs() < 1e-12 {
                    0.0
                } else {
                    x
                }
            })
            .collect()
    }
}

impl fmt::Display for XiGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.step)
    }
}

impl FromStr for XiGrid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("xi grid `{s}` is not of the form lo:hi:step"));
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else { return Err(bad()) };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let g = XiGrid { lo: num(lo)?, hi: num(hi)?, step: num(step)? };
        g.validate()?;
        Ok(g)
    }
}

/// Parse a sample count, accepting scientific notation such as `1e7`.
pub fn parse_count(s: &str) -> Result<u64> {
    let bad = || Error::Config(format!("sample count `{s}` is not a positive integer"));
    if let Ok(n) = s.trim().parse::<u64>() {
        return if n > 0 { Ok(n) } else { Err(bad()) };
    }
    let x: f64 = s.trim().parse().map_err(|_| bad())?;
    if (1.0..=1e15).contains(&x) && x.fract() == 0.0 {
        Ok(x as u64)
    } else {
        Err(bad())
    }
}

pub const DEFAULT_SEED: u64 = 20240901;

/// Everything that determines a run's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Curve expressions, test names, cube schemes or artifact paths,
    /// depending on the command.
    pub names: Vec<String>,
    pub n_samples: Option<u64>,
    pub seed: u64,
    pub beta: Option<BetaParameter>,
    pub family: Option<StateFamily>,
    pub xi_grid: XiGrid,
    /// Overrides the command's default check tolerance.
    pub tolerance: Option<f64>,
    /// Confidence half-width in standard errors for reported intervals.
    pub ci_se: f64,
    /// Skip the sampling checks (selfcheck only).
    pub quick: bool,
    pub output: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command, output: PathBuf) -> Self {
        RunConfig {
            command,
            names: Vec::new(),
            n_samples: None,
            seed: DEFAULT_SEED,
            beta: None,
            family: None,
            xi_grid: XiGrid::default(),
            tolerance: None,
            ci_se: crate::qmc::estimate::DEFAULT_CI_HALF_WIDTH_SE,
            quick: false,
            output,
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.xi_grid.validate()?;
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Config(format!("tolerance must be positive (got {t})")));
            }
        }
        if !(self.ci_se.is_finite() && self.ci_se > 0.0) {
            return Err(Error::Config(format!("confidence half-width must be positive (got {})", self.ci_se)));
        }
        if self.n_samples == Some(0) {
            return Err(Error::Config("sample size must be positive".into()));
        }
        if self.output.as_os_str().is_empty() {
            return Err(Error::Config("output path is empty".into()));
        }
        match self.command {
            Command::Curves if self.names.is_empty() => {
                return Err(Error::Config("curves needs at least one --name".into()));
            }
            Command::Summary if self.names.is_empty() => {
                return Err(Error::Config("summary needs at least one artifact".into()));
            }
            Command::Desf => {
                self.tests()?;
            }
            Command::Estimate => {
                let family = self.state_family()?;
                for t in self.tests()? {
                    if family != StateFamily::Real && t != SeparabilityTest::FullPh {
                        return Err(Error::Config(format!("test `{t}` is only implemented for real states")));
                    }
                }
            }
            Command::Cube => {
                self.cube_schemes()?;
            }
            _ => {}
        }
        Ok(())
    }

    /// Separability tests named in `names` (default `full-ph`).
    pub fn tests(&self) -> Result<Vec<SeparabilityTest>> {
        if self.names.is_empty() {
            return Ok(vec![SeparabilityTest::FullPh]);
        }
        let tests = self.names.iter().map(|s| s.parse()).collect::<Result<Vec<SeparabilityTest>>>()?;
        if tests.len() > 8 {
            return Err(Error::Config("at most 8 tests per run".into()));
        }
        Ok(tests)
    }

    /// The sampled family: explicit, else from β (default real).
    pub fn state_family(&self) -> Result<StateFamily> {
        match (self.family, self.beta) {
            (Some(f), None) => Ok(f),
            (Some(f), Some(b)) => {
                let implied = StateFamily::for_beta(b)?;
                if f == StateFamily::ComplexPair && b == BetaParameter::Complex || f == implied {
                    Ok(f)
                } else {
                    Err(Error::Config(format!("family {f:?} is inconsistent with beta {}", b.value())))
                }
            }
            (None, Some(b)) => StateFamily::for_beta(b),
            (None, None) => Ok(StateFamily::Real),
        }
    }

    pub fn cube_schemes(&self) -> Result<Vec<Vec<usize>>> {
        if self.names.is_empty() {
            return Ok(vec![vec![4]]);
        }
        self.names.iter().map(|s| parse_cube_scheme(s)).collect()
    }

    /// SHA-256 of the canonical JSON serialization, as 16 hex digits.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        hex::encode(&digest[..8])
    }
}

/// `single:k`, `pair:a,b` or `triple`.
pub fn parse_cube_scheme(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Config(format!("cube scheme `{s}` is not single:k, pair:a,b or triple"));
    let norm = s.trim().to_ascii_lowercase();
    let minors: Vec<usize> = match norm.split_once(':') {
        None if norm == "triple" => vec![2, 3, 4],
        Some(("single", k)) => vec![k.trim().parse().map_err(|_| bad())?],
        Some(("pair", ab)) => {
            let (a, b) = ab.split_once(',').ok_or_else(bad)?;
            vec![a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?]
        }
        _ => return Err(bad()),
    };
    if minors.iter().any(|k| !(1..=4).contains(k)) || (minors.len() == 2 && minors[0] == minors[1]) {
        return Err(bad());
    }
    Ok(minors)
}
