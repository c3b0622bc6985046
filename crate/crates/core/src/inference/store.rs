use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::report::InferenceReport;
use super::InferenceError;

/// Append-only directory of report documents named
/// `<prompt_hash>-<timestamp>-<seq>.json`. Writes go through one lock and
/// land atomically; existing files are never replaced.
#[derive(Debug)]
pub struct ReportStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

fn io(e: std::io::Error) -> InferenceError {
    InferenceError::Store(e.to_string())
}

impl ReportStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, InferenceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io)?;
        Ok(Self {
            dir,
            write_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Persists `report` and returns its file name.
    pub fn append(&self, report: &InferenceReport) -> Result<String, InferenceError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let stamp = report.created_at.format("%Y%m%dT%H%M%S%.6fZ");
        let tmp = self.dir.join(format!(".tmp-{}", uuid::Uuid::new_v4()));
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(report.to_json().as_bytes()).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        let mut seq = 0u32;
        let result = loop {
            let name = format!("{}-{}-{:03}.json", report.prompt_hash, stamp, seq);
            // hard_link fails if the target exists, so nothing is overwritten
            match fs::hard_link(&tmp, self.dir.join(&name)) {
                Ok(()) => break Ok(name),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => seq += 1,
                Err(e) => break Err(io(e)),
            }
        };
        let _ = fs::remove_file(&tmp);
        result
    }

    fn entries(&self) -> Result<Vec<String>, InferenceError> {
        let mut names: Vec<String> = fs::read_dir(&self.dir)
            .map_err(io)?
            .filter_map(|e| e.ok())
            .filter_map(|e| e.file_name().into_string().ok())
            .filter(|n| n.ends_with(".json") && !n.starts_with('.'))
            .collect();
        names.sort();
        Ok(names)
    }

    pub fn read(&self, name: &str) -> Result<InferenceReport, InferenceError> {
        if name.contains('/') || name.contains("..") {
            return Err(InferenceError::Store(format!("bad report name {name:?}")));
        }
        let text = fs::read_to_string(self.dir.join(name)).map_err(io)?;
        InferenceReport::from_json(&text)
    }

    /// All reports for a prompt hash, oldest first.
    pub fn by_hash(&self, hash: &str) -> Result<Vec<InferenceReport>, InferenceError> {
        let prefix = format!("{hash}-");
        self.entries()?
            .iter()
            .filter(|n| n.starts_with(&prefix))
            .map(|n| self.read(n))
            .collect()
    }

    pub fn latest(&self, hash: &str) -> Result<Option<InferenceReport>, InferenceError> {
        Ok(self.by_hash(hash)?.pop())
    }

    pub fn list(&self) -> Result<Vec<String>, InferenceError> {
        self.entries()
    }
}
