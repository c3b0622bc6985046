//! Persona-tailored prompts over front analytics, a deterministic offline
//! backend, an OpenAI-compatible live transport and an append-only report store.

mod context;
mod offline;
mod persona;
mod prompt;
mod report;
mod store;
mod transport;

use thiserror::Error;

pub use context::{
    build_context, fmt_cost, fmt_impact, fmt_value, ContextAnalytics, ContextDocument,
    ContextOptions, ContextVariable, FrontSummary, HighlightedSolution, Omitted, Role,
    FALLBACK_VARIABLES,
};
pub use offline::{narrate, OFFLINE_BACKEND_ID};
pub use persona::{Expertise, Goal, Persona, Register};
pub use prompt::{
    build_prompt, system_preamble, PromptDocument, Question, TemplateId,
    DEFAULT_CHARACTER_BUDGET, TEMPLATE_VERSION,
};
pub use report::{
    prompt_hash, render_report, CitedRow, InferenceReport, Mode, RenderFormat, ReportStatus,
    REPORT_FORMAT, REPORT_VERSION,
};
pub use store::ReportStore;
pub use transport::{infer, BackendConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("context: {0}")]
    Context(String),
    #[error("prompt needs {needed} characters, budget is {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("transport failure (request {request_id}): {message}")]
    Transport {
        message: String,
        request_id: String,
        report: Option<String>,
    },
    #[error("backend returned HTTP {status} (request {request_id}): {body_excerpt}")]
    Status {
        status: u16,
        body_excerpt: String,
        request_id: String,
        report: Option<String>,
    },
    #[error("report store: {0}")]
    Store(String),
}

impl InferenceError {
    fn with_report(self, name: Option<String>) -> Self {
        match self {
            InferenceError::Transport {
                message,
                request_id,
                ..
            } => InferenceError::Transport {
                message,
                request_id,
                report: name,
            },
            InferenceError::Status {
                status,
                body_excerpt,
                request_id,
                ..
            } => InferenceError::Status {
                status,
                body_excerpt,
                request_id,
                report: name,
            },
            other => other,
        }
    }

    /// Stored error report for a failed live request, if one was written.
    pub fn report(&self) -> Option<&str> {
        match self {
            InferenceError::Transport { report, .. } | InferenceError::Status { report, .. } => {
                report.as_deref()
            }
            _ => None,
        }
    }
}
