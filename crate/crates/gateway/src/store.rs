//! Directory-per-run store:
//!
//! ```text
//! <root>/runs/<run_id>/descriptor.json
//!                      run.json        run document, written once
//!                      front.csv       numbered export, written once
//!                      analytics.json  cached bundle
//! <root>/reports/                      inference reports
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use paretoinfer::analytics::{AnalyticsBundle, ParetoFront};
use paretoinfer::emo::{NsgaParams, RunDocument, RunResult};
use paretoinfer::inference::ReportStore;
use paretoinfer::problem::{benchmark_schema, make_benchmark_instance};

use crate::error::ApiError;

pub const DESCRIPTOR_FORMAT: &str = "paretoinfer/run-descriptor";
pub const DESCRIPTOR_VERSION: u32 = 1;
pub const INTERRUPTED: &str = "interrupted: the process stopped before the run finished";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pending,
    Running,
    Done,
    Failed,
}

impl RunStatus {
    pub fn can_become(self, next: RunStatus) -> bool {
        use RunStatus::*;
        matches!(
            (self, next),
            (Pending, Running) | (Pending, Failed) | (Running, Done) | (Running, Failed)
        )
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, RunStatus::Done | RunStatus::Failed)
    }
}

/// Paths relative to the store root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactPaths {
    pub run: String,
    pub front: String,
    pub export: String,
    pub reports: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDescriptor {
    pub format: String,
    pub version: u32,
    pub run_id: String,
    pub status: RunStatus,
    pub params: NsgaParams,
    pub instance_seed: u64,
    pub instance_ref: String,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    pub artifact_paths: ArtifactPaths,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug)]
pub struct RunStore {
    root: PathBuf,
    reports: ReportStore,
    write_lock: Mutex<()>,
}

fn io(e: std::io::Error) -> ApiError {
    ApiError::internal(format!("run store: {e}"))
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-')
}

/// Write-then-rename so readers never see a partial document.
fn write_atomic(path: &Path, contents: &str) -> Result<(), ApiError> {
    let tmp = path.with_extension(format!("tmp-{}", uuid::Uuid::new_v4().simple()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

impl RunStore {
    /// Opens or creates the store. Runs left pending or running by a previous
    /// process are marked failed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let store = Self::attach(root)?;
        for d in store.list()? {
            if !d.status.is_terminal() {
                store.advance(&d.run_id, RunStatus::Failed, Some(INTERRUPTED.into()))?;
            }
        }
        Ok(store)
    }

    /// Opens without touching in-flight runs, for a process sharing the
    /// store with a running server.
    pub fn attach(root: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let root = root.into();
        fs::create_dir_all(root.join("runs")).map_err(io)?;
        let reports = ReportStore::open(root.join("reports")).map_err(ApiError::from)?;
        Ok(Self {
            root,
            reports,
            write_lock: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn reports(&self) -> &ReportStore {
        &self.reports
    }

    fn run_dir(&self, id: &str) -> PathBuf {
        self.root.join("runs").join(id)
    }

    pub fn create(&self, params: NsgaParams, instance_seed: u64) -> Result<RunDescriptor, ApiError> {
        params.validate().map_err(|e| ApiError::validation(e.to_string()))?;
        let run_id = uuid::Uuid::new_v4().simple().to_string();
        let now = Utc::now();
        let rel = |f: &str| format!("runs/{run_id}/{f}");
        let d = RunDescriptor {
            format: DESCRIPTOR_FORMAT.into(),
            version: DESCRIPTOR_VERSION,
            run_id: run_id.clone(),
            status: RunStatus::Pending,
            params,
            instance_seed,
            instance_ref: make_benchmark_instance(instance_seed).instance_ref(),
            created_at: now,
            updated_at: now,
            artifact_paths: ArtifactPaths {
                run: rel("run.json"),
                front: rel("front.csv"),
                export: rel("front.csv"),
                reports: "reports".into(),
            },
            error: None,
        };
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        fs::create_dir_all(self.run_dir(&run_id)).map_err(io)?;
        self.write_descriptor(&d)?;
        Ok(d)
    }

    fn write_descriptor(&self, d: &RunDescriptor) -> Result<(), ApiError> {
        let text = serde_json::to_string_pretty(d).expect("descriptor serializes") + "\n";
        write_atomic(&self.run_dir(&d.run_id).join("descriptor.json"), &text)
    }

    pub fn get(&self, id: &str) -> Result<RunDescriptor, ApiError> {
        if !valid_id(id) {
            return Err(ApiError::not_found(format!("no run {id:?}")));
        }
        let path = self.run_dir(id).join("descriptor.json");
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(ApiError::not_found(format!("no run {id:?}")))
            }
            Err(e) => return Err(io(e)),
        };
        serde_json::from_str(&text).map_err(|e| ApiError::internal(format!("descriptor {id}: {e}")))
    }

    /// All runs, oldest first.
    pub fn list(&self) -> Result<Vec<RunDescriptor>, ApiError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("runs")).map_err(io)? {
            let name = entry.map_err(io)?.file_name();
            let Some(id) = name.to_str() else { continue };
            match self.get(id) {
                Ok(d) => out.push(d),
                Err(e) if e.code == crate::error::ErrorCode::NotFound => {}
                Err(e) => return Err(e),
            }
        }
        out.sort_by(|a, b| a.created_at.cmp(&b.created_at).then(a.run_id.cmp(&b.run_id)));
        Ok(out)
    }

    /// Moves a run forward; backward or sideways moves are conflicts.
    pub fn advance(&self, id: &str, next: RunStatus, error: Option<String>) -> Result<RunDescriptor, ApiError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|p| p.into_inner());
        let mut d = self.get(id)?;
        if !d.status.can_become(next) {
            return Err(ApiError::conflict(format!(
                "run {id} cannot move from {:?} to {next:?}",
                d.status
            )));
        }
        d.status = next;
        d.updated_at = Utc::now();
        d.error = error;
        self.write_descriptor(&d)?;
        Ok(d)
    }

    /// Persists a finished run's document, export and analytics, then marks it done.
    pub fn complete(&self, id: &str, run: &RunResult) -> Result<RunDescriptor, ApiError> {
        let dir = self.run_dir(id);
        let front = ParetoFront::from_run(run, &benchmark_schema())?;
        let bundle = AnalyticsBundle::compute(&front)?;
        write_atomic(&dir.join("run.json"), &(run.to_json() + "\n"))?;
        write_atomic(&dir.join("front.csv"), &front.to_csv())?;
        write_atomic(&dir.join("analytics.json"), &(bundle.to_json() + "\n"))?;
        self.advance(id, RunStatus::Done, None)
    }

    fn require_done(&self, id: &str) -> Result<RunDescriptor, ApiError> {
        let d = self.get(id)?;
        match d.status {
            RunStatus::Done => Ok(d),
            RunStatus::Failed => Err(ApiError::conflict(format!("run {id} failed"))
                .with_detail(serde_json::json!({"status": d.status, "error": d.error}))),
            s => Err(ApiError::conflict(format!("run {id} is not done"))
                .with_detail(serde_json::json!({"status": s}))),
        }
    }

    pub fn run_document(&self, id: &str) -> Result<RunDocument, ApiError> {
        let d = self.require_done(id)?;
        let text = fs::read_to_string(self.root.join(&d.artifact_paths.run)).map_err(io)?;
        RunDocument::from_json(&text).map_err(|e| ApiError::internal(e.to_string()))
    }

    pub fn front(&self, id: &str) -> Result<ParetoFront, ApiError> {
        let doc = self.run_document(id)?;
        Ok(ParetoFront::from_document(&doc, &benchmark_schema())?)
    }

    pub fn export_csv(&self, id: &str) -> Result<String, ApiError> {
        let d = self.require_done(id)?;
        fs::read_to_string(self.root.join(&d.artifact_paths.export)).map_err(io)
    }

    /// Cached bundle; recomputed and stored only when the cache file is missing.
    pub fn analytics(&self, id: &str) -> Result<AnalyticsBundle, ApiError> {
        self.require_done(id)?;
        let path = self.run_dir(id).join("analytics.json");
        if let Ok(text) = fs::read_to_string(&path) {
            return serde_json::from_str(&text).map_err(|e| ApiError::internal(format!("analytics cache: {e}")));
        }
        let bundle = AnalyticsBundle::compute(&self.front(id)?)?;
        write_atomic(&path, &(bundle.to_json() + "\n"))?;
        Ok(bundle)
    }
}
