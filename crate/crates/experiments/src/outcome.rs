use std::path::{Path, PathBuf};

use optimizer::PowerLawFit;
use serde::{Deserialize, Serialize};

use crate::table::{json_with_newline, write_atomic, ResultTable};
use crate::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Comparison {
    Absolute { tolerance: f64 },
    Relative { tolerance: f64 },
    /// `value / target` within `[1/factor, factor]`.
    Factor { factor: f64 },
    /// `value <= target`.
    AtMost,
}

/// One comparison of a computed value against its target. Checks tagged
/// `acceptance` decide the exit status of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub comparison: Comparison,
    pub acceptance: bool,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, target: f64, comparison: Comparison) -> Self {
        let passed = match comparison {
            Comparison::Absolute { tolerance } => (value - target).abs() <= tolerance,
            Comparison::Relative { tolerance } => (value - target).abs() <= tolerance * target.abs(),
            Comparison::Factor { factor } => value > 0.0 && target > 0.0 && (value / target).ln().abs() <= factor.ln(),
            Comparison::AtMost => value <= target,
        };
        Self { name: name.into(), value, target, comparison, acceptance: true, passed }
    }

    pub fn absolute(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, value, target, Comparison::Absolute { tolerance })
    }

    pub fn relative(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::new(name, value, target, Comparison::Relative { tolerance })
    }

    pub fn within_factor(name: impl Into<String>, value: f64, target: f64, factor: f64) -> Self {
        Self::new(name, value, target, Comparison::Factor { factor })
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value, bound, Comparison::AtMost)
    }

    /// Reported but not part of the acceptance decision.
    pub fn informational(mut self) -> Self {
        self.acceptance = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: PowerLawFit,
}

/// Tables, fits and checks of one campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub tables: Vec<ResultTable>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: &'a str,
    fits: &'a [NamedFit],
    checks: &'a [Check],
    notes: &'a [String],
    passed: bool,
}

impl ExperimentOutcome {
    pub(crate) fn new() -> Self {
        Self { tables: Vec::new(), fits: Vec::new(), checks: Vec::new(), notes: Vec::new() }
    }

    pub fn table(&self, name: &str) -> Option<&ResultTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn fit(&self, name: &str) -> Option<&PowerLawFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Whether every acceptance-tagged check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.acceptance).all(|c| c.passed)
    }

    /// Writes every table plus `summary.json` into `dir`.
    pub fn write(&self, dir: &Path, force: bool) -> Result<Vec<PathBuf>, ExperimentError> {
        let mut paths = Vec::new();
        for table in &self.tables {
            paths.extend(table.write(dir, force)?);
        }
        let summary = Summary {
            config_hash: self.tables.first().map_or("", |t| t.manifest.config_hash.as_str()),
            fits: &self.fits,
            checks: &self.checks,
            notes: &self.notes,
            passed: self.passed(),
        };
        let path = dir.join("summary.json");
        write_atomic(&path, json_with_newline(&summary)?.as_bytes(), force)?;
        paths.push(path);
        Ok(paths)
    }
}
