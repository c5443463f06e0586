use std::path::{Path, PathBuf};
use std::time::Instant;

use chain_core::{ChainDocument, ChainSpec};
use experiments::{json_with_newline, write_atomic, ExperimentError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::FORMAT_VERSION;
use crate::error::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Config,
    Random,
    Unused,
}

/// Flag, then config, then a fresh random draw.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> (u64, SeedSource) {
    match (flag, config) {
        (Some(s), _) => (s, SeedSource::Flag),
        (None, Some(s)) => (s, SeedSource::Config),
        (None, None) => (rand::random(), SeedSource::Random),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub code: String,
    pub format: String,
}

impl Versions {
    pub fn current() -> Self {
        Self { code: env!("CARGO_PKG_VERSION").into(), format: FORMAT_VERSION.into() }
    }
}

/// Record of one invocation, written last and atomically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub arguments: Vec<String>,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub seed_source: SeedSource,
    pub versions: Versions,
    pub threads: usize,
    pub started: String,
    pub finished: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<PathBuf>,
}

/// Output directory of one invocation plus what has been written to it.
pub struct Run {
    subcommand: &'static str,
    arguments: Vec<String>,
    out_dir: PathBuf,
    force: bool,
    started: chrono::DateTime<chrono::Utc>,
    clock: Instant,
    outputs: Vec<PathBuf>,
    seed: Option<(u64, SeedSource)>,
}

impl Run {
    /// Fails early when a previous run's manifest is in the way.
    pub fn open(subcommand: &'static str, arguments: Vec<String>, out_dir: PathBuf, force: bool) -> Result<Self, CliError> {
        let manifest = out_dir.join(MANIFEST_FILE);
        if manifest.exists() && !force {
            return Err(CliError::Collision(manifest));
        }
        Ok(Self {
            subcommand,
            arguments,
            out_dir,
            force,
            started: chrono::Utc::now(),
            clock: Instant::now(),
            outputs: Vec::new(),
            seed: None,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn force(&self) -> bool {
        self.force
    }

    pub fn set_seed(&mut self, seed: u64, source: SeedSource) {
        if source == SeedSource::Random {
            eprintln!("no seed given; drew {seed}");
        }
        self.seed = Some((seed, source));
    }

    pub fn record(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        self.outputs.extend(paths);
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        write_atomic(&path, bytes, self.force).map_err(collision)?;
        self.outputs.push(path.clone());
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = json_with_newline(value)?;
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf, CliError> {
        let text = csv_text(header, rows)?;
        self.write_bytes(name, text.as_bytes())
    }

    /// Writes the manifest; `threads` is the size of the worker pool.
    pub fn finish(self, config_hash: String, threads: usize) -> Result<RunManifest, CliError> {
        let (seed, seed_source) = self.seed.map_or((None, SeedSource::Unused), |(s, src)| (Some(s), src));
        let manifest = RunManifest {
            subcommand: self.subcommand.into(),
            arguments: self.arguments,
            config_hash,
            seed,
            seed_source,
            versions: Versions::current(),
            threads,
            started: self.started.to_rfc3339(),
            finished: chrono::Utc::now().to_rfc3339(),
            wall_time_seconds: self.clock.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let path = self.out_dir.join(MANIFEST_FILE);
        write_atomic(&path, json_with_newline(&manifest)?.as_bytes(), self.force).map_err(collision)?;
        Ok(manifest)
    }
}

fn collision(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::OutputExists(path) => CliError::Collision(path),
        other => other.into(),
    }
}

/// Shortest round-trip decimal form, `.` separator, trailing newline.
pub fn csv_text(header: &[&str], rows: &[Vec<f64>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.iter().map(f64::to_string))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of numbers is utf-8"))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

/// Chain document and the `ChainSpec` it describes, plus the raw bytes for hashing.
pub fn load_chain(path: &Path) -> Result<(ChainDocument, ChainSpec, Vec<u8>), CliError> {
    let bytes = read_file(path)?;
    let doc: ChainDocument =
        serde_json::from_slice(&bytes).map_err(|source| CliError::Document { path: path.to_path_buf(), source })?;
    let spec = ChainSpec::try_from(doc.clone())?;
    Ok((doc, spec, bytes))
}
