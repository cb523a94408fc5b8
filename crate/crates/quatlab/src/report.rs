//! Machine- and human-readable verification reports.
//!
//! Reports are deterministic: given the same configuration and seed the
//! emitted JSON is byte-identical. Wall time is therefore only recorded
//! when explicitly requested.

use crate::{Error, Result};
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Md,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "md" => Ok(ReportFormat::Md),
            other => Err(Error::ConfigInvalid(format!(
                "unknown report format `{other}`"
            ))),
        }
    }
}

/// Configuration of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(rename = "max2L")]
    pub max_two_l: i32,
    pub tolerance: f64,
    pub quad_nodes: usize,
    pub random_seed: u64,
    pub report_format: ReportFormat,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_two_l < 0 {
            return Err(Error::ConfigInvalid("max2L must be >= 0".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::ConfigInvalid("tolerance must be > 0".into()));
        }
        if self.quad_nodes < 4 {
            return Err(Error::ConfigInvalid(
                "quadrature needs at least 4 nodes per angle".into(),
            ));
        }
        Ok(())
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: "all".into(),
            max_two_l: 4,
            tolerance: 1e-9,
            quad_nodes: 24,
            random_seed: 42,
            report_format: ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "pass"),
            Status::Fail => write!(f, "fail"),
            Status::Skip => write!(f, "skip"),
        }
    }
}

/// One verified identity or quantity.
#[derive(Clone, Debug, Serialize)]
pub struct ReportEntry {
    pub id: String,
    /// What the check verifies, phrased as the identity itself.
    pub anchor: String,
    pub status: Status,
    pub measured: String,
    pub expected: String,
    /// Worst absolute error observed (0 for exact checks that pass).
    pub error: f64,
    /// Reproduction command line; present on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repro: Option<String>,
}

impl ReportEntry {
    pub fn exact(id: &str, anchor: &str, ok: bool, measured: String, expected: String) -> Self {
        ReportEntry {
            id: id.into(),
            anchor: anchor.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            measured,
            expected,
            error: if ok { 0.0 } else { f64::INFINITY },
            repro: None,
        }
    }

    pub fn with_tolerance(
        id: &str,
        anchor: &str,
        error: f64,
        tolerance: f64,
        measured: String,
        expected: String,
    ) -> Self {
        ReportEntry {
            id: id.into(),
            anchor: anchor.into(),
            status: if error <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            },
            measured,
            expected,
            error,
            repro: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, Serialize, Default)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
}

/// The full report; the serialized schema is versioned.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub suite: String,
    pub config: SuiteConfig,
    pub entries: Vec<ReportEntry>,
    pub summary: Summary,
    /// Milliseconds; only present when timing was requested, so that
    /// default reports are byte-identical across runs.
    #[serde(rename = "wallTimeMs", skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl Report {
    pub fn new(config: SuiteConfig, mut entries: Vec<ReportEntry>) -> Self {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for e in &entries {
            match e.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skip => summary.skip += 1,
            }
        }
        Report {
            schema_version: 1,
            suite: config.suite.clone(),
            config,
            entries,
            summary,
            wall_time_ms: None,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# Verification report: {}\n\n", self.suite));
        out.push_str(&format!(
            "- schema version: {}\n- max 2L: {}\n- tolerance: {:e}\n- quadrature nodes: {}\n- seed: {}\n\n",
            self.schema_version,
            self.config.max_two_l,
            self.config.tolerance,
            self.config.quad_nodes,
            self.config.random_seed
        ));
        out.push_str(&format!(
            "Summary: pass = {}, fail = {}, skip = {}\n\n",
            self.summary.pass, self.summary.fail, self.summary.skip
        ));
        out.push_str("| id | status | error | measured | expected |\n");
        out.push_str("|----|--------|-------|----------|----------|\n");
        for e in &self.entries {
            out.push_str(&format!(
                "| {} | {} | {:.3e} | {} | {} |\n",
                e.id, e.status, e.error, e.measured, e.expected
            ));
        }
        for e in self.entries.iter().filter(|e| e.failed()) {
            if let Some(repro) = &e.repro {
                out.push_str(&format!("\nReproduce `{}`: `{}`\n", e.id, repro));
            }
        }
        out
    }

    /// Parses the counts back from markdown output (round-trip check).
    pub fn parse_markdown_summary(md: &str) -> Option<Summary> {
        let line = md.lines().find(|l| l.starts_with("Summary:"))?;
        let mut nums = line
            .split(|c: char| !c.is_ascii_digit())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().ok());
        Some(Summary {
            pass: nums.next()??,
            fail: nums.next()??,
            skip: nums.next()??,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report(entries: Vec<ReportEntry>) -> Report {
        Report::new(SuiteConfig::default(), entries)
    }

    #[test]
    fn empty_summary_is_zero() {
        let r = sample_report(vec![]);
        assert_eq!(r.summary.pass, 0);
        assert_eq!(r.summary.fail, 0);
        assert!(!r.has_failures());
    }

    #[test]
    fn failing_entry_sets_exit_semantics() {
        let e = ReportEntry::exact("x", "identity", false, "1".into(), "0".into());
        let r = sample_report(vec![e]);
        assert!(r.has_failures());
    }

    #[test]
    fn markdown_roundtrip_preserves_counts() {
        let entries = vec![
            ReportEntry::exact("a", "first", true, "0".into(), "0".into()),
            ReportEntry::with_tolerance("b", "second", 1.0, 0.5, "1".into(), "0".into()),
            ReportEntry {
                id: "c".into(),
                anchor: "third".into(),
                status: Status::Skip,
                measured: String::new(),
                expected: String::new(),
                error: 0.0,
                repro: None,
            },
        ];
        let r = sample_report(entries);
        let md = r.to_markdown();
        let s = Report::parse_markdown_summary(&md).unwrap();
        assert_eq!(s.pass, r.summary.pass);
        assert_eq!(s.fail, r.summary.fail);
        assert_eq!(s.skip, r.summary.skip);
        assert_eq!(r.to_json(), r.to_json());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SuiteConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tolerance = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::ConfigInvalid(_))));
    }
}
