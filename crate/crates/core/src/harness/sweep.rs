//! Parameter sweeps: one scenario run per value of a config key.

use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::config::{parse_config, ScenarioConfig};
use crate::harness::report::RunReport;
use crate::harness::scenario::run_scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    /// `key=value` applied on top of the base overrides.
    pub assignment: String,
    pub config: ScenarioConfig,
}

/// Splits `key=v1,v2,...` and builds one validated config per value. Run
/// names get a `-key-value` suffix so each point writes its own report.
pub fn expand_sweep(text: &str, overrides: &[String], sweep: &str) -> Result<Vec<SweepPoint>> {
    let (key, values) = sweep
        .split_once('=')
        .ok_or_else(|| Error::ConfigInvalid(format!("sweep {sweep:?} is not of the form key=v1,v2,...")))?;
    let key = key.trim();
    let base = parse_config(text, overrides)?;
    values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            let assignment = format!("{key}={v}");
            let mut all = overrides.to_vec();
            all.push(assignment.clone());
            let mut config = parse_config(text, &all)?;
            let slug: String = v
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
                .collect();
            config.run.name = Some(format!("{}-{}-{slug}", base.name(), key.replace('.', "_")));
            Ok(SweepPoint { assignment, config })
        })
        .collect()
}

/// Runs every config on its own thread; results keep the input order.
pub fn run_all(configs: &[ScenarioConfig]) -> Vec<Result<RunReport>> {
    std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_scenario(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::InvalidParameter("scenario run panicked".into()))))
            .collect()
    })
}

/// Writes `index.csv` with one line per sweep point: name, assignment,
/// outcome (`pass`, `fail` or the error) and report directory.
pub fn write_index(dir: &Path, points: &[SweepPoint], results: &[Result<RunReport>]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("index.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record(["name", "assignment", "outcome", "report_dir"])
        .map_err(|e| csv_error(&path, e))?;
    for (p, r) in points.iter().zip(results) {
        let outcome = match r {
            Ok(rep) if rep.passed() => "pass".to_string(),
            Ok(_) => "fail".to_string(),
            Err(e) => format!("error: {e}"),
        };
        let dir = p.config.output_dir().display().to_string();
        w.write_record([p.config.name().as_str(), p.assignment.as_str(), outcome.as_str(), dir.as_str()])
            .map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}
