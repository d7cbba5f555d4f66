use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rgf_core::estimators::GreenTrace;
use rgf_core::spectra::DsfGrid;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
    files: &'a [FileEntry],
}

/// Collects output files of one run and writes the manifest last.
pub struct OutputDir {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        std::fs::write(self.root.join(name), contents)?;
        self.files.push(FileEntry { path: name.to_string(), sha256: hex::encode(Sha256::digest(contents.as_bytes())) });
        log::info!("wrote {}", self.root.join(name).display());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    pub fn finish(self, command: &str, config: &RunConfig) -> Result<Vec<FileEntry>, CliError> {
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: config.seed,
            config,
            files: &self.files,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Numerical(e.to_string()))?;
        std::fs::write(self.root.join("manifest.json"), text + "\n")?;
        Ok(self.files)
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_csv(trace: &GreenTrace) -> String {
    let mut s = String::from("t,value,stderr\n");
    for i in 0..trace.len() {
        let _ = writeln!(s, "{},{},{}", num(trace.times[i]), num(trace.values[i]), num(trace.std_errors[i]));
    }
    s
}

pub fn dsf_csv(grid: &DsfGrid) -> String {
    let mut s = String::from("q,omega,intensity\n");
    for (k, q) in grid.q.iter().enumerate() {
        for (j, w) in grid.omega.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(*q), num(*w), num(grid.at(k, j)));
        }
    }
    s
}
