use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// A run directory built under a temporary name and renamed into place on
/// success. Dropping it uncommitted deletes the partial output.
pub struct StagedDir {
    target: PathBuf,
    staging: PathBuf,
    committed: bool,
}

fn is_nonempty(path: &Path) -> bool {
    match fs::read_dir(path) {
        Ok(mut entries) => entries.next().is_some(),
        Err(_) => path.exists(),
    }
}

impl StagedDir {
    pub fn create(target: &Path) -> Result<Self, CliError> {
        if is_nonempty(target) {
            return Err(CliError::OutputExists(target.display().to_string()));
        }
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent)?;
        let name = target
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        let staging = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if staging.exists() {
            fs::remove_dir_all(&staging)?;
        }
        fs::create_dir(&staging)?;
        Ok(StagedDir {
            target: target.to_path_buf(),
            staging,
            committed: false,
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.staging.join(file)
    }

    pub fn writer(&self, file: &str) -> Result<BufWriter<fs::File>, CliError> {
        Ok(BufWriter::new(fs::File::create(self.path(file))?))
    }

    pub fn write_json<T: Serialize>(&self, file: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.writer(file)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    /// Single-line JSON.
    pub fn write_json_line<T: Serialize>(&self, file: &str, value: &T) -> Result<(), CliError> {
        let mut w = self.writer(file)?;
        serde_json::to_writer(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn write_text(&self, file: &str, text: &str) -> Result<(), CliError> {
        fs::write(self.path(file), text)?;
        Ok(())
    }

    /// Names of the files written so far, sorted.
    pub fn files(&self) -> Result<Vec<String>, CliError> {
        let mut names = fs::read_dir(&self.staging)?
            .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
            .collect::<Result<Vec<_>, _>>()?;
        names.sort();
        Ok(names)
    }

    pub fn commit(mut self) -> Result<PathBuf, CliError> {
        if is_nonempty(&self.target) {
            return Err(CliError::OutputExists(self.target.display().to_string()));
        }
        if self.target.exists() {
            fs::remove_dir(&self.target)?;
        }
        fs::rename(&self.staging, &self.target)?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for StagedDir {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.staging);
        }
    }
}
