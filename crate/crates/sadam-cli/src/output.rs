//! Output-directory management with clobber protection.
//!
//! A file is only overwritten when its embedded config hash matches the
//! hash of the configuration about to be written, or when `--force` is
//! given; otherwise the write is refused so artifacts of an edited config
//! never silently replace older ones.

use crate::error::{CliError, CliResult};
use sadam_core::report;
use std::path::{Path, PathBuf};

pub struct OutputDir {
    dir: PathBuf,
    force: bool,
}

impl OutputDir {
    /// Resolve the output directory: flag beats config beats the
    /// `SADAM_OUT_DIR` environment variable beats `./out`.
    pub fn resolve(
        flag: Option<&str>,
        config_dir: Option<&str>,
        force: bool,
    ) -> CliResult<Self> {
        let dir = flag
            .map(str::to_string)
            .or_else(|| config_dir.map(str::to_string))
            .or_else(|| std::env::var("SADAM_OUT_DIR").ok())
            .unwrap_or_else(|| "out".to_string());
        let dir = PathBuf::from(dir);
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir, force })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn guard(&self, path: &Path, config_hash: &str) -> CliResult<()> {
        if self.force || !path.exists() {
            return Ok(());
        }
        let existing = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot inspect {}: {e}", path.display())))?;
        match report::extract_config_hash(&existing) {
            Some(h) if h == config_hash => Ok(()),
            _ => Err(CliError::io(format!(
                "{} exists with a different config hash; rerun with --force to overwrite",
                path.display()
            ))),
        }
    }

    /// Write `name` via the given serializer after the clobber check.
    pub fn write_with<F>(&self, name: &str, config_hash: &str, writer: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut Vec<u8>) -> sadam_core::Result<()>,
    {
        let path = self.path(name);
        self.guard(&path, config_hash)?;
        let mut buf = Vec::new();
        writer(&mut buf).map_err(CliError::from)?;
        std::fs::write(&path, &buf)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
