//! Run artifacts. Every command writes into its output directory: a config
//! echo, a seed/version manifest, machine-readable metrics, and a
//! human-readable report. All text output is bit-stable for a fixed seed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(path: &Path) -> Result<Self> {
        std::fs::create_dir_all(path)?;
        Ok(Self {
            root: path.to_path_buf(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn write_text(&self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, content)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)
            .expect("report values serialize");
        text.push('\n');
        self.write_text(name, &text)
    }

    /// Config echo plus the reproducibility manifest.
    pub fn write_preamble(&self, command: &str, config: &ExperimentConfig) -> Result<()> {
        self.write_text("config.json", &(config.to_json() + "\n"))?;
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            experiment: &'a str,
            seed: u64,
            package_version: &'a str,
        }
        self.write_json(
            "manifest.json",
            &Manifest {
                command,
                experiment: config.experiment.name(),
                seed: config.seed,
                package_version: env!("CARGO_PKG_VERSION"),
            },
        )?;
        Ok(())
    }
}

/// CSV assembly with stable float formatting.
pub struct CsvBuilder {
    out: String,
}

impl CsvBuilder {
    pub fn new(header: &[&str]) -> Self {
        Self {
            out: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.out, "{}", cells.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}
