//! CSV artifacts: a `# config-hash` comment line, a header row, then data.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub struct CsvReport {
    path: PathBuf,
    writer: csv::Writer<File>,
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

impl CsvReport {
    pub fn create(path: &Path, config_hash: &str, columns: &[&str]) -> Result<Self, CliError> {
        let mut file = File::create(path).map_err(|e| CliError::io(path, e))?;
        writeln!(file, "# config-hash: {config_hash}").map_err(|e| CliError::io(path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer
            .write_record(columns)
            .map_err(|e| csv_error(path, e))?;
        Ok(Self {
            path: path.into(),
            writer,
        })
    }

    pub fn row(&mut self, cells: Vec<String>) -> Result<(), CliError> {
        self.writer
            .write_record(&cells)
            .map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer
            .flush()
            .map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// Renders cells with the shortest round-tripping float format.
#[macro_export]
macro_rules! cells {
    ($($x:expr),* $(,)?) => {
        vec![$(format!("{}", $x)),*]
    };
}
