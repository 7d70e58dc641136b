//! Machine-readable verification records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// One identity check: its worst residual over all samples and the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_name: String,
    pub inputs_digest: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub wall_time_ms: f64,
}

impl CheckRecord {
    /// Build a record; `pass` is exactly `residual <= tolerance`. Non-finite
    /// residuals are stored as `f64::MAX` and always fail.
    pub fn new(check_name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let (residual, detail) = if residual.is_finite() {
            (residual, None)
        } else {
            (f64::MAX, Some(format!("non-finite residual ({residual})")))
        };
        CheckRecord {
            check_name: check_name.into(),
            inputs_digest: String::new(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            samples: 1,
            detail,
            wall_time_ms: 0.0,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        let detail = detail.into();
        self.detail = Some(match self.detail.take() {
            Some(prev) => format!("{prev}; {detail}"),
            None => detail,
        });
        self
    }

    pub fn with_digest(mut self, digest: String) -> Self {
        self.inputs_digest = digest;
        self
    }

    pub fn with_wall_time_ms(mut self, ms: f64) -> Self {
        self.wall_time_ms = ms;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// Residuals, tolerances and verdicts for a batch of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
    /// Echo of the settings that produced the report (seed, steps, orders).
    #[serde(default)]
    pub config: BTreeMap<String, serde_json::Value>,
    /// Tolerance table the verdicts were taken against.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Reported-but-not-asserted quantities (Lipschitz witnesses, chart radii).
    #[serde(default)]
    pub witnesses: BTreeMap<String, f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
        self.refresh_summary();
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = CheckRecord>) {
        self.records.extend(records);
        self.refresh_summary();
    }

    /// Sort records by name so that assembly order never leaks into output.
    pub fn finalize(&mut self) {
        self.records
            .sort_by(|a, b| a.check_name.cmp(&b.check_name));
        self.refresh_summary();
    }

    fn refresh_summary(&mut self) {
        let passed = self.records.iter().filter(|r| r.pass).count();
        self.summary = Summary {
            total: self.records.len(),
            passed,
            failed: self.records.len() - passed,
        };
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check_name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Copy with every timing field zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.wall_time_ms = 0.0;
        }
        r.witnesses.retain(|k, _| !k.ends_with("wall_time_ms"));
        r
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Hex SHA-256 of an arbitrary textual description of check inputs.
pub fn digest(text: &str) -> String {
    let hash = Sha256::digest(text.as_bytes());
    hash.iter().take(12).map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_within_tolerance() {
        assert!(CheckRecord::new("a", 1e-10, 1e-10).pass);
        assert!(!CheckRecord::new("a", 2e-10, 1e-10).pass);
        let nan = CheckRecord::new("a", f64::NAN, 1.0);
        assert!(!nan.pass);
        assert!(nan.detail.is_some());
    }

    #[test]
    fn finalize_sorts_and_counts() {
        let mut r = VerificationReport::new("x");
        r.push(CheckRecord::new("b", 0.0, 1.0));
        r.push(CheckRecord::new("a", 2.0, 1.0));
        r.finalize();
        assert_eq!(r.records[0].check_name, "a");
        assert_eq!(r.summary, Summary { total: 2, passed: 1, failed: 1 });
        assert!(!r.all_pass());
    }

    #[test]
    fn json_round_trip() {
        let mut r = VerificationReport::new("x");
        r.push(CheckRecord::new("a", 0.1 + 0.2, 1.0).with_wall_time_ms(3.0));
        let back: VerificationReport = serde_json::from_str(&r.to_json_pretty()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.without_timing().records[0].wall_time_ms, 0.0);
    }
}
