use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ExperimentError;

/// Convention used for every reported error bar.
pub const ERROR_CONVENTION: &str = "standard error of the mean";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
    pub code_version: String,
    pub wall_time_seconds: f64,
    pub error_convention: String,
}

impl Manifest {
    pub fn new(config_hash: String, seed: u64, wall_time_seconds: f64) -> Self {
        Self {
            config_hash,
            seed,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds,
            error_convention: ERROR_CONVENTION.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<f64>,
}

/// Named real columns of equal length, filled row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: String,
    columns: Vec<Column>,
    pub manifest: Manifest,
}

impl ResultTable {
    pub fn new(name: &str, column_names: &[&str], manifest: Manifest) -> Self {
        let columns = column_names.iter().map(|n| Column { name: n.to_string(), values: Vec::new() }).collect();
        Self { name: name.to_string(), columns, manifest }
    }

    pub fn from_columns(name: &str, columns: Vec<Column>, manifest: Manifest) -> Result<Self, ExperimentError> {
        if let Some(first) = columns.first() {
            let expected = first.values.len();
            if let Some(bad) = columns.iter().find(|c| c.values.len() != expected) {
                return Err(ExperimentError::ColumnLength { column: bad.name.clone(), expected, found: bad.values.len() });
            }
        }
        Ok(Self { name: name.to_string(), columns, manifest })
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<(), ExperimentError> {
        if row.len() != self.columns.len() {
            return Err(ExperimentError::RowLength { expected: self.columns.len(), found: row.len() });
        }
        for (column, value) in self.columns.iter_mut().zip(row) {
            column.values.push(*value);
        }
        Ok(())
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    /// Rows whose `key` column equals `value`.
    pub fn rows_where(&self, key: &str, value: f64) -> Vec<usize> {
        self.column(key).map_or_else(Vec::new, |col| (0..col.len()).filter(|&i| col[i] == value).collect())
    }

    /// CSV with a header row. Numbers use Rust's shortest round-trip
    /// formatting, independent of locale.
    pub fn to_csv(&self) -> Result<String, ExperimentError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for i in 0..self.n_rows() {
            writer.write_record(self.columns.iter().map(|c| c.values[i].to_string()))?;
        }
        let bytes = writer.into_inner().map_err(|e| ExperimentError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<name>.csv` and `<name>.manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, force: bool) -> Result<Vec<PathBuf>, ExperimentError> {
        let csv_path = dir.join(format!("{}.csv", self.name));
        let manifest_path = dir.join(format!("{}.manifest.json", self.name));
        write_atomic(&csv_path, self.to_csv()?.as_bytes(), force)?;
        write_atomic(&manifest_path, json_with_newline(&self.manifest)?.as_bytes(), force)?;
        Ok(vec![csv_path, manifest_path])
    }
}

pub fn json_with_newline<T: Serialize>(value: &T) -> Result<String, ExperimentError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

/// Writes through a temporary file in the target directory and renames it
/// into place. Refuses to replace an existing file unless `force` is set.
pub fn write_atomic(path: &Path, contents: &[u8], force: bool) -> Result<(), ExperimentError> {
    if !force && path.exists() {
        return Err(ExperimentError::OutputExists(path.to_path_buf()));
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(ExperimentError::io(dir))?;
    let mut file = tempfile::NamedTempFile::new_in(dir).map_err(ExperimentError::io(dir))?;
    file.write_all(contents).map_err(ExperimentError::io(path))?;
    file.as_file().sync_all().map_err(ExperimentError::io(path))?;
    if force {
        file.persist(path).map_err(|e| ExperimentError::Io { path: path.to_path_buf(), source: e.error })?;
    } else {
        file.persist_noclobber(path).map_err(|e| match e.error.kind() {
            std::io::ErrorKind::AlreadyExists => ExperimentError::OutputExists(path.to_path_buf()),
            _ => ExperimentError::Io { path: path.to_path_buf(), source: e.error },
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> Manifest {
        Manifest::new("abc".into(), 1, 0.5)
    }

    #[test]
    fn rows_and_columns() {
        let mut t = ResultTable::new("t", &["n", "value"], manifest());
        t.push_row(&[1.0, 0.25]).unwrap();
        t.push_row(&[2.0, f64::INFINITY]).unwrap();
        assert!(t.push_row(&[1.0]).is_err());
        assert_eq!(t.n_rows(), 2);
        assert_eq!(t.column("value").unwrap(), &[0.25, f64::INFINITY]);
        assert_eq!(t.rows_where("n", 2.0), vec![1]);
        assert_eq!(t.to_csv().unwrap(), "n,value\n1,0.25\n2,inf\n");
    }

    #[test]
    fn unequal_columns_are_rejected() {
        let columns = vec![Column { name: "a".into(), values: vec![1.0] }, Column { name: "b".into(), values: vec![] }];
        assert!(matches!(ResultTable::from_columns("t", columns, manifest()), Err(ExperimentError::ColumnLength { .. })));
    }

    #[test]
    fn shortest_round_trip_formatting() {
        let mut t = ResultTable::new("t", &["x"], manifest());
        let x = 0.1 + 0.2;
        t.push_row(&[x]).unwrap();
        let text = t.to_csv().unwrap();
        let parsed: f64 = text.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed.to_bits(), x.to_bits());
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn writes_refuse_to_clobber() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = ResultTable::new("t", &["x"], manifest());
        t.push_row(&[1.5]).unwrap();
        let paths = t.write(dir.path(), false).unwrap();
        assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), "x\n1.5\n");
        let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(manifest, t.manifest);
        assert!(matches!(t.write(dir.path(), false), Err(ExperimentError::OutputExists(_))));
        t.push_row(&[2.5]).unwrap();
        t.write(dir.path(), true).unwrap();
        assert_eq!(std::fs::read_to_string(&paths[0]).unwrap(), "x\n1.5\n2.5\n");
    }
}
