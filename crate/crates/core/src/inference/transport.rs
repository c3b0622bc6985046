use serde::{Deserialize, Serialize};
use serde_json::json;
use std::time::Duration;

use super::offline::{narrate, OFFLINE_BACKEND_ID};
use super::prompt::PromptDocument;
use super::report::{InferenceReport, Mode, ReportStatus};
use super::store::ReportStore;
use super::InferenceError;

const BODY_EXCERPT: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub mode: Mode,
    pub endpoint_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_token_env_name: String,
    pub temperature: f64,
    pub timeout_secs: f64,
    pub max_retries: u32,
    /// Pause before retry n is n times this.
    pub retry_backoff_ms: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Offline,
            endpoint_url: String::new(),
            model_name: "gpt-3.5-turbo".into(),
            auth_token_env_name: "PARETOINFER_API_TOKEN".into(),
            temperature: 0.0,
            timeout_secs: 60.0,
            max_retries: 2,
            retry_backoff_ms: 250,
        }
    }
}

impl BackendConfig {
    pub fn offline() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        if !(self.temperature >= 0.0) || !self.temperature.is_finite() {
            return Err(InferenceError::Config("temperature must be >= 0".into()));
        }
        if self.mode == Mode::Live {
            if self.endpoint_url.trim().is_empty() {
                return Err(InferenceError::Config("live mode requires endpoint_url".into()));
            }
            if self.auth_token_env_name.trim().is_empty() {
                return Err(InferenceError::Config(
                    "live mode requires auth_token_env_name".into(),
                ));
            }
            if !(self.timeout_secs > 0.0) {
                return Err(InferenceError::Config("timeout must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn backend_id(&self) -> String {
        match self.mode {
            Mode::Offline => OFFLINE_BACKEND_ID.into(),
            Mode::Live => format!("live:{}@{}", self.model_name, self.endpoint_url),
        }
    }
}

/// Runs one prompt through the configured backend and persists the report
/// before returning it. Live failures persist an error-marked report whose
/// file name is carried by the error.
pub fn infer(
    prompt: &PromptDocument,
    cfg: &BackendConfig,
    store: &ReportStore,
) -> Result<(InferenceReport, String), InferenceError> {
    cfg.validate()?;
    match cfg.mode {
        Mode::Offline => {
            let mut report = InferenceReport::new(prompt, OFFLINE_BACKEND_ID, Mode::Offline);
            report.response_text = narrate(prompt);
            let name = store.append(&report)?;
            Ok((report, name))
        }
        Mode::Live => {
            let token = std::env::var(&cfg.auth_token_env_name).map_err(|_| {
                InferenceError::Config(format!(
                    "environment variable {} is not set",
                    cfg.auth_token_env_name
                ))
            })?;
            let request_id = uuid::Uuid::new_v4().to_string();
            let mut report = InferenceReport::new(prompt, &cfg.backend_id(), Mode::Live);
            report.request_id = Some(request_id.clone());
            match send(prompt, cfg, &token, &request_id) {
                Ok(text) => {
                    report.response_text = text;
                    let name = store.append(&report)?;
                    Ok((report, name))
                }
                Err(err) => {
                    report.status = ReportStatus::Error;
                    report.error = Some(err.to_string());
                    let name = store.append(&report).ok();
                    Err(err.with_report(name))
                }
            }
        }
    }
}

fn chat_body(prompt: &PromptDocument, cfg: &BackendConfig) -> serde_json::Value {
    json!({
        "model": cfg.model_name,
        "messages": [
            {"role": "system", "content": prompt.system_preamble},
            {"role": "user", "content": prompt.user_message()},
        ],
        "temperature": cfg.temperature,
    })
}

fn send(
    prompt: &PromptDocument,
    cfg: &BackendConfig,
    token: &str,
    request_id: &str,
) -> Result<String, InferenceError> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs_f64(cfg.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let body = chat_body(prompt, cfg);
    let mut attempt = 0u32;
    loop {
        let outcome = agent
            .post(&cfg.endpoint_url)
            .header("Authorization", &format!("Bearer {token}"))
            .header("X-Request-Id", request_id)
            .send_json(&body);
        let retryable_err = match outcome {
            Ok(mut resp) => {
                let status = resp.status().as_u16();
                let text = resp.body_mut().read_to_string().unwrap_or_default();
                if (200..300).contains(&status) {
                    return first_choice(&text, request_id);
                }
                let err = InferenceError::Status {
                    status,
                    body_excerpt: text.chars().take(BODY_EXCERPT).collect(),
                    request_id: request_id.into(),
                    report: None,
                };
                if !(status >= 500 || status == 429) {
                    return Err(err);
                }
                err
            }
            Err(e) => InferenceError::Transport {
                message: e.to_string(),
                request_id: request_id.into(),
                report: None,
            },
        };
        if attempt >= cfg.max_retries {
            return Err(retryable_err);
        }
        attempt += 1;
        std::thread::sleep(Duration::from_millis(cfg.retry_backoff_ms * attempt as u64));
    }
}

fn first_choice(body: &str, request_id: &str) -> Result<String, InferenceError> {
    let v: serde_json::Value = serde_json::from_str(body).map_err(|e| InferenceError::Transport {
        message: format!("response is not JSON: {e}"),
        request_id: request_id.into(),
        report: None,
    })?;
    v.pointer("/choices/0/message/content")
        .and_then(|c| c.as_str())
        .map(str::to_string)
        .ok_or_else(|| InferenceError::Transport {
            message: "response has no choices[0].message.content".into(),
            request_id: request_id.into(),
            report: None,
        })
}
