use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

use super::context::{fmt_cost, fmt_impact};
use super::persona::Persona;
use super::prompt::{PromptDocument, TemplateId};
use super::InferenceError;

pub const REPORT_FORMAT: &str = "paretoinfer/inference-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Live,
    Offline,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Live => "live",
            Mode::Offline => "offline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Ok,
    Error,
}

/// Objectives of a cited solution, copied from the context at request time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CitedRow {
    pub number: usize,
    pub total_cost: f64,
    pub environmental_impact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub format: String,
    pub version: u32,
    /// sha256 hex of `prompt`.
    pub prompt_hash: String,
    pub prompt: String,
    pub backend_id: String,
    pub mode: Mode,
    pub status: ReportStatus,
    pub response_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub request_id: Option<String>,
    pub created_at: DateTime<Utc>,
    pub solution_refs: Vec<usize>,
    pub solution_rows: Vec<CitedRow>,
    pub persona: Persona,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<TemplateId>,
}

pub fn prompt_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl InferenceReport {
    pub(crate) fn new(prompt: &PromptDocument, backend_id: &str, mode: Mode) -> Self {
        let text = prompt.text();
        Self {
            format: REPORT_FORMAT.into(),
            version: REPORT_VERSION,
            prompt_hash: prompt_hash(&text),
            prompt: text,
            backend_id: backend_id.into(),
            mode,
            status: ReportStatus::Ok,
            response_text: String::new(),
            error: None,
            request_id: None,
            created_at: Utc::now(),
            solution_refs: prompt.context.solution_refs(),
            solution_rows: prompt
                .context
                .highlighted_solutions
                .iter()
                .map(|s| CitedRow {
                    number: s.number,
                    total_cost: s.total_cost,
                    environmental_impact: s.environmental_impact,
                })
                .collect(),
            persona: prompt.persona,
            template: prompt.template,
        }
    }

    pub fn verify_hash(&self) -> bool {
        prompt_hash(&self.prompt) == self.prompt_hash
    }

    /// Digest of everything except the timestamp; stable across reruns.
    pub fn content_digest(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.prompt_hash.as_str(),
            self.backend_id.as_str(),
            self.mode.as_str(),
            self.response_text.as_str(),
        ] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InferenceError> {
        let r: InferenceReport =
            serde_json::from_str(text).map_err(|e| InferenceError::Store(format!("report: {e}")))?;
        if r.format != REPORT_FORMAT || r.version != REPORT_VERSION {
            return Err(InferenceError::Store(format!(
                "unsupported report {} v{}",
                r.format, r.version
            )));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderFormat {
    Plain,
    Structured,
}

pub fn render_report(report: &InferenceReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Structured => report.to_json(),
        RenderFormat::Plain => {
            let mut out = String::new();
            if let Some(e) = &report.error {
                let _ = writeln!(out, "[error] {e}");
            }
            out.push_str(report.response_text.trim_end());
            out.push('\n');
            if !report.solution_rows.is_empty() {
                out.push_str("\nSol. # | Total Cost (M$) | Env. Impact (Score)\n");
                for r in &report.solution_rows {
                    let _ = writeln!(
                        out,
                        "{} | {} | {}",
                        r.number,
                        fmt_cost(r.total_cost),
                        fmt_impact(r.environmental_impact)
                    );
                }
            }
            out
        }
    }
}
