//! Result artifacts on disk: CSV with a commented metadata header, or JSON.
//!
//! CSV columns are `name, xi, value, std_error, n, seed, provenance`. Floats
//! are written with 17 significant digits so they round-trip exactly; absent
//! fields are empty.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::provenance::Provenance;

pub const CSV_COLUMNS: [&str; 7] = ["name", "xi", "value", "std_error", "n", "seed", "provenance"];

/// Description of the quasi-random generator, recorded with sampled results.
pub const GENERATOR: &str = "sobol (Joe-Kuo direction numbers, 32-bit digits, ChaCha20-seeded digital shift)";

/// One emitted number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub name: String,
    pub xi: Option<f64>,
    pub value: f64,
    pub std_error: Option<f64>,
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn exact(name: impl Into<String>, xi: Option<f64>, value: f64, provenance: Provenance) -> Self {
        ResultRecord { name: name.into(), xi, value, std_error: None, n: None, seed: None, provenance }
    }

    pub fn sampled(name: impl Into<String>, xi: Option<f64>, value: f64, std_error: f64, n: u64, seed: u64) -> Self {
        ResultRecord {
            name: name.into(),
            xi,
            value,
            std_error: Some(std_error),
            n: Some(n),
            seed: Some(seed),
            provenance: Provenance::QmcEstimate,
        }
    }
}

/// One row of the printed comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub quantity: String,
    pub computed: f64,
    pub target: f64,
    pub abs_error: f64,
    /// Human-readable acceptance rule, e.g. `|Δ| ≤ 1e-9` or `≤ 3 SE`.
    pub rule: String,
    pub pass: bool,
    pub provenance: Provenance,
}

impl CheckRow {
    /// Pass iff `|computed − target| ≤ tol`.
    pub fn absolute(quantity: impl Into<String>, computed: f64, target: f64, tol: f64, provenance: Provenance) -> Self {
        let abs_error = (computed - target).abs();
        CheckRow {
            quantity: quantity.into(),
            computed,
            target,
            abs_error,
            rule: format!("|Δ| ≤ {tol:.0e}"),
            pass: abs_error <= tol,
            provenance,
        }
    }

    /// Pass iff `|computed − target| ≤ k·se`.
    pub fn within_se(quantity: impl Into<String>, computed: f64, se: f64, target: f64, k: f64) -> Self {
        let abs_error = (computed - target).abs();
        CheckRow {
            quantity: quantity.into(),
            computed,
            target,
            abs_error,
            rule: format!("≤ {k} SE ({:.2e})", k * se),
            pass: abs_error <= k * se,
            provenance: Provenance::QmcEstimate,
        }
    }

    /// Pass iff `lo < computed < hi`; the target is the interval midpoint.
    pub fn in_interval(quantity: impl Into<String>, computed: f64, lo: f64, hi: f64, provenance: Provenance) -> Self {
        let mid = 0.5 * (lo + hi);
        CheckRow {
            quantity: quantity.into(),
            computed,
            target: mid,
            abs_error: (computed - mid).abs(),
            rule: format!("in ({lo}, {hi})"),
            pass: lo < computed && computed < hi,
            provenance,
        }
    }
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub config: RunConfig,
    pub config_hash: String,
    /// Present when any record is a sampled estimate.
    pub generator: Option<String>,
    pub records: Vec<ResultRecord>,
    pub checks: Vec<CheckRow>,
}

impl Artifact {
    pub fn new(config: RunConfig, records: Vec<ResultRecord>, checks: Vec<CheckRow>) -> Self {
        let sampled = records.iter().any(|r| r.provenance == Provenance::QmcEstimate);
        Artifact {
            config_hash: config.hash(),
            config,
            generator: sampled.then(|| GENERATOR.to_string()),
            records,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_bytes(&self, format: OutputFormat) -> Result<Vec<u8>> {
        match format {
            OutputFormat::Json => {
                let mut v = serde_json::to_vec_pretty(self)?;
                v.push(b'\n');
                Ok(v)
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# config={}", serde_json::to_string(&self.config)?)?;
        writeln!(out, "# config_hash={}", self.config_hash)?;
        if let Some(g) = &self.generator {
            writeln!(out, "# generator={g}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        let f = |x: Option<f64>| x.map(fmt_float).unwrap_or_default();
        let u = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.name.clone(),
                f(r.xi),
                fmt_float(r.value),
                f(r.std_error),
                u(r.n),
                u(r.seed),
                r.provenance.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Artifact(e.to_string()))
    }

    /// Write to `path`, creating parent directories.
    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        let bytes = self.to_bytes(format)?;
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
        Ok(())
    }

    /// Read an artifact written by [`Artifact::write`]; the format is
    /// detected from the content. CSV artifacts carry no check rows.
    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Artifact(format!("{}: {e}", path.display())))?;
        let corrupt = |why: String| Error::Artifact(format!("{}: {why}", path.display()));
        if text.trim_start().starts_with('{') {
            let a: Artifact = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
            if a.config_hash != a.config.hash() {
                return Err(corrupt("config hash mismatch".into()));
            }
            return Ok(a);
        }
        Self::from_csv(&text).map_err(|e| corrupt(e.to_string()))
    }

    fn from_csv(text: &str) -> Result<Self> {
        let mut config = None;
        let mut hash = None;
        let mut generator = None;
        let mut body = String::new();
        for line in text.lines() {
            if let Some(meta) = line.strip_prefix("# ") {
                if let Some(c) = meta.strip_prefix("config=") {
                    config = Some(serde_json::from_str::<RunConfig>(c)?);
                } else if let Some(h) = meta.strip_prefix("config_hash=") {
                    hash = Some(h.to_string());
                } else if let Some(g) = meta.strip_prefix("generator=") {
                    generator = Some(g.to_string());
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let config = config.ok_or_else(|| Error::Artifact("missing config header".into()))?;
        let hash = hash.ok_or_else(|| Error::Artifact("missing config hash".into()))?;
        if hash != config.hash() {
            return Err(Error::Artifact("config hash mismatch".into()));
        }
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if header != CSV_COLUMNS {
            return Err(Error::Artifact(format!("unexpected columns {header:?}")));
        }
        let mut records = Vec::new();
        for row in rd.records() {
            let row = row.map_err(csv_err)?;
            let bad = |field: &str| Error::Artifact(format!("bad {field} in row {row:?}"));
            let of = |i: usize, field: &str| -> Result<Option<f64>> {
                let s = &row[i];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(field))
                }
            };
            let ou = |i: usize, field: &str| -> Result<Option<u64>> {
                let s = &row[i];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse().map(Some).map_err(|_| bad(field))
                }
            };
            let provenance = serde_json::from_value(serde_json::Value::String(row[6].to_string()))
                .map_err(|_| bad("provenance"))?;
            records.push(ResultRecord {
                name: row[0].to_string(),
                xi: of(1, "xi")?,
                value: of(2, "value")?.ok_or_else(|| bad("value"))?,
                std_error: of(3, "std_error")?,
                n: ou(4, "n")?,
                seed: ou(5, "seed")?,
                provenance,
            });
        }
        Ok(Artifact { config_hash: hash, config, generator, records, checks: Vec::new() })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Artifact(e.to_string())
}

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::config::Command;

    fn sample() -> Artifact {
        let cfg = RunConfig::new(Command::Curves, "x.csv".into());
        Artifact::new(
            cfg,
            vec![
                ResultRecord::exact("splice(paired_greater,paired_intermediate)", Some(-0.1), 0.1 + 0.2, Provenance::ClosedForm),
                ResultRecord::sampled("full-ph", None, 0.4528, 1.57e-4, 10_000_000, 7),
            ],
            vec![CheckRow::absolute("x", 1.0, 1.0 + 1e-12, 1e-9, Provenance::Quadrature)],
        )
    }

    #[test]
    fn csv_round_trip() {
        let a = sample();
        let bytes = a.to_bytes(OutputFormat::Csv).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("name,xi,value,std_error,n,seed,provenance"));
        assert!(text.contains("3.0000000000000004e-1"));
        let b = Artifact::from_csv(&text).unwrap();
        assert_eq!(b.records, a.records);
        assert_eq!(b.config, a.config);
        assert!(b.generator.is_some());
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let a = sample();
        let j1 = a.to_bytes(OutputFormat::Json).unwrap();
        assert_eq!(j1, sample().to_bytes(OutputFormat::Json).unwrap());
        let b: Artifact = serde_json::from_slice(&j1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn corrupt_csv_is_rejected() {
        let a = sample();
        let text = String::from_utf8(a.to_bytes(OutputFormat::Csv).unwrap()).unwrap();
        assert!(Artifact::from_csv(&text.replace("config_hash=", "config_hash=0")).is_err());
        assert!(Artifact::from_csv(&text.replace("qmc-estimate", "guess")).is_err());
        assert!(Artifact::from_csv("name,xi\n").is_err());
    }

    #[test]
    fn check_rules() {
        assert!(CheckRow::within_se("p", 0.5, 0.01, 0.52, 3.0).pass);
        assert!(!CheckRow::within_se("p", 0.5, 0.01, 0.54, 3.0).pass);
        assert!(CheckRow::in_interval("p", 0.45, 0.4, 0.5, Provenance::QmcEstimate).pass);
        assert!(!CheckRow::absolute("p", 0.5, 0.6, 1e-3, Provenance::ClosedForm).pass);
    }
}
