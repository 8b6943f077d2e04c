//! Run reports and their on-disk form.
//!
//! A report directory holds
//! - `series.csv`: one row per recorded time; columns are listed in
//!   [`RunReport::columns`] and empty cells mark values that are undefined at
//!   that time (residuals at the first and last record, for example);
//! - `summary.toml`: scenario, overall pass flag, metrics, one `[[assertion]]`
//!   table per check and an echo of the config;
//! - `timing.toml`: wall-clock seconds, kept apart so the first two files are
//!   byte-identical across reruns of the same config.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{Scenario, ScenarioConfig};

/// How an assertion compares its value with its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    Below,
    AtMost,
    AtLeast,
    /// `threshold` is the lower end and `upper` the upper end.
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    /// The analytic statement being checked.
    pub statement: String,
    pub comparison: Comparison,
    pub threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub value: f64,
    pub passed: bool,
}

impl Assertion {
    fn make(name: impl Into<String>, statement: impl Into<String>, comparison: Comparison, threshold: f64, upper: Option<f64>, value: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => value < threshold,
            Comparison::AtMost => value <= threshold,
            Comparison::AtLeast => value >= threshold,
            Comparison::Within => value >= threshold && value <= upper.unwrap_or(f64::INFINITY),
        };
        Self {
            name: name.into(),
            statement: statement.into(),
            comparison,
            threshold,
            upper,
            value,
            passed,
        }
    }

    /// Passes when `value < threshold`.
    pub fn below(name: impl Into<String>, statement: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::make(name, statement, Comparison::Below, threshold, None, value)
    }

    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, statement: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::make(name, statement, Comparison::AtMost, threshold, None, value)
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, statement: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::make(name, statement, Comparison::AtLeast, threshold, None, value)
    }

    /// Passes when `lo <= value <= hi`.
    pub fn within(name: impl Into<String>, statement: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::make(name, statement, Comparison::Within, lo, Some(hi), value)
    }

    /// One-line human-readable form.
    pub fn describe(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let cond = match self.comparison {
            Comparison::Below => format!("{:e} < {:e}", self.value, self.threshold),
            Comparison::AtMost => format!("{:e} <= {:e}", self.value, self.threshold),
            Comparison::AtLeast => format!("{:e} >= {:e}", self.value, self.threshold),
            Comparison::Within => format!(
                "{:e} in [{:e}, {:e}]",
                self.value,
                self.threshold,
                self.upper.unwrap_or(f64::INFINITY)
            ),
        };
        format!("{verdict} {}: {cond} ({})", self.name, self.statement)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub config: ScenarioConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
    /// Named scalar results in insertion order.
    pub metrics: Vec<(String, f64)>,
    pub assertions: Vec<Assertion>,
    /// Time steps summed over refinement levels.
    pub steps: usize,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn scenario(&self) -> Scenario {
        self.config.scenario
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|row| row[j]).collect())
    }

    pub fn series_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.map(|v| format!("{v:e}")).unwrap_or_default()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn summary_toml(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            name: &'a str,
            scenario: Scenario,
            passed: bool,
            steps: usize,
            metrics: toml::Table,
            assertion: &'a [Assertion],
            config: &'a ScenarioConfig,
        }
        let metrics = self
            .metrics
            .iter()
            .map(|(k, v)| (k.clone(), toml::Value::Float(*v)))
            .collect();
        toml::to_string(&Summary {
            name: &self.name,
            scenario: self.scenario(),
            passed: self.passed(),
            steps: self.steps,
            metrics,
            assertion: &self.assertions,
            config: &self.config,
        })
        .expect("summary serializes")
    }
}

/// Paths written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub series: PathBuf,
    pub summary: PathBuf,
    pub timing: PathBuf,
}

pub fn emit_report(report: &RunReport, dir: &Path) -> Result<ReportFiles> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ReportFiles {
        series: dir.join("series.csv"),
        summary: dir.join("summary.toml"),
        timing: dir.join("timing.toml"),
    };
    let write = |p: &Path, text: String| std::fs::write(p, text).map_err(|e| Error::io(p, e));
    write(&files.series, report.series_csv())?;
    write(&files.summary, report.summary_toml())?;
    write(
        &files.timing,
        format!("wall_clock_seconds = {:?}\nsteps = {}\n", report.wall_clock_seconds, report.steps),
    )?;
    Ok(files)
}
