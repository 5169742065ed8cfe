//! Merging run artifacts into one ranked table of bounds and estimates.

use serde::{Deserialize, Serialize};

use super::artifact::{Artifact, CheckRow, ResultRecord};
use super::config::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use crate::qmc::StateFamily;

/// Where a quantity sits relative to the true (real-state) probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    LowerBound,
    Estimate,
    UpperBound,
}

/// Bound-table rows whose curves relax the full test (upper bounds).
const UPPER_BOUNDS: [&str; 5] = ["dominant", "intermediate", "paired_intermediate", "paired_dominant", "paired_greater"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub rank: usize,
    pub role: Role,
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
    /// Probability for boundary (minimally degenerate) states: half the value.
    pub boundary: f64,
    pub provenance: Provenance,
    /// Set when the row breaks lower ≤ estimate ≤ upper against an earlier row.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

fn classify(artifact: &Artifact, r: &ResultRecord) -> Option<Role> {
    let real = match artifact.config.command {
        Command::Estimate => artifact.config.state_family().ok() == Some(StateFamily::Real),
        _ => true,
    };
    if !real || r.xi.is_some() {
        return None;
    }
    match (artifact.config.command, r.name.as_str()) {
        (Command::Bounds | Command::Estimate, "absolute") => Some(Role::LowerBound),
        (Command::Estimate, "full-ph") => Some(Role::Estimate),
        (Command::Bounds, name) if UPPER_BOUNDS.contains(&name) => Some(Role::UpperBound),
        _ => None,
    }
}

/// Rank the recognised rows of `artifacts`: lower bounds, then estimates,
/// then upper bounds from tightest to loosest. A row is flagged when some
/// row of an earlier role has a larger value.
pub fn report_summary(artifacts: &[Artifact]) -> Result<Summary> {
    let mut picked: Vec<(Role, &ResultRecord)> = Vec::new();
    for a in artifacts {
        for r in &a.records {
            if let Some(role) = classify(a, r) {
                if !picked.iter().any(|(q, p)| *q == role && p.name == r.name && p.provenance == r.provenance) {
                    picked.push((role, r));
                }
            }
        }
    }
    if picked.is_empty() {
        return Err(Error::Artifact("no bound or estimate rows in the given artifacts".into()));
    }
    picked.sort_by(|(ra, a), (rb, b)| ra.cmp(rb).then(a.value.total_cmp(&b.value)).then(a.name.cmp(&b.name)));
    let rows = picked
        .iter()
        .enumerate()
        .map(|(i, (role, r))| {
            let violation = picked[..i].iter().any(|(q, p)| q < role && p.value > r.value);
            SummaryRow {
                rank: i + 1,
                role: *role,
                name: r.name.clone(),
                value: r.value,
                std_error: r.std_error,
                boundary: 0.5 * r.value,
                provenance: r.provenance,
                violation,
            }
        })
        .collect();
    Ok(Summary { rows })
}

impl Summary {
    pub fn has_violation(&self) -> bool {
        self.rows.iter().any(|r| r.violation)
    }

    /// Records `role:name` and `role:name:boundary`, plus one ordering check per row.
    pub fn into_artifact(self, config: RunConfig) -> Artifact {
        let mut records = Vec::new();
        let mut checks = Vec::new();
        for r in &self.rows {
            let role = serde_json::to_value(r.role).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            let name = format!("{role}:{}", r.name);
            let mut rec = ResultRecord::exact(&name, None, r.value, r.provenance);
            rec.std_error = r.std_error;
            records.push(rec);
            records.push(ResultRecord::exact(format!("{name}:boundary"), None, r.boundary, r.provenance));
            checks.push(CheckRow {
                quantity: format!("#{} {name}", r.rank),
                computed: r.value,
                target: r.boundary,
                abs_error: 0.0,
                rule: "ordered".into(),
                pass: !r.violation,
                provenance: r.provenance,
            });
        }
        Artifact::new(config, records, checks)
    }
}
