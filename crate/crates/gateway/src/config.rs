use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use paretoinfer::inference::{BackendConfig, Mode};

use crate::error::ApiError;

pub const ENV_STORE: &str = "PARETOINFER_STORE";
pub const ENV_BIND: &str = "PARETOINFER_BIND";
pub const ENV_WORKERS: &str = "PARETOINFER_WORKERS";
pub const ENV_TOKEN_NAME: &str = "PARETOINFER_TOKEN_ENV";
pub const ENV_MODE: &str = "PARETOINFER_BACKEND_MODE";
pub const ENV_ENDPOINT: &str = "PARETOINFER_ENDPOINT";
pub const ENV_CONFIG: &str = "PARETOINFER_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GatewayConfig {
    pub store_dir: PathBuf,
    pub bind: String,
    /// Optimizations allowed to execute at once.
    pub workers: usize,
    pub backend: BackendConfig,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self {
            store_dir: PathBuf::from("paretoinfer-store"),
            bind: "127.0.0.1:8080".into(),
            workers: 1,
            backend: BackendConfig::default(),
        }
    }
}

/// Values given on the command line; `None` defers to lower layers.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub store_dir: Option<PathBuf>,
    pub bind: Option<String>,
    pub workers: Option<usize>,
    pub mode: Option<Mode>,
    pub endpoint_url: Option<String>,
    pub token_env: Option<String>,
}

fn parse_mode(s: &str) -> Result<Mode, ApiError> {
    match s {
        "live" => Ok(Mode::Live),
        "offline" => Ok(Mode::Offline),
        _ => Err(ApiError::validation(format!("unknown backend mode {s:?}"))),
    }
}

impl GatewayConfig {
    /// Layers flags over environment over file over defaults.
    pub fn load(
        file: Option<&Path>,
        env: impl Fn(&str) -> Option<String>,
        flags: &Overrides,
    ) -> Result<Self, ApiError> {
        let file = file.map(Path::to_path_buf).or_else(|| env(ENV_CONFIG).map(PathBuf::from));
        let mut cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| ApiError::validation(format!("config {}: {e}", path.display())))?;
                toml::from_str(&text)
                    .map_err(|e| ApiError::validation(format!("config {}: {e}", path.display())))?
            }
            None => GatewayConfig::default(),
        };
        if let Some(v) = env(ENV_STORE) {
            cfg.store_dir = v.into();
        }
        if let Some(v) = env(ENV_BIND) {
            cfg.bind = v;
        }
        if let Some(v) = env(ENV_WORKERS) {
            cfg.workers = v
                .parse()
                .map_err(|_| ApiError::validation(format!("{ENV_WORKERS} must be a positive integer")))?;
        }
        if let Some(v) = env(ENV_TOKEN_NAME) {
            cfg.backend.auth_token_env_name = v;
        }
        if let Some(v) = env(ENV_MODE) {
            cfg.backend.mode = parse_mode(&v)?;
        }
        if let Some(v) = env(ENV_ENDPOINT) {
            cfg.backend.endpoint_url = v;
        }
        let f = flags.clone();
        if let Some(v) = f.store_dir {
            cfg.store_dir = v;
        }
        if let Some(v) = f.bind {
            cfg.bind = v;
        }
        if let Some(v) = f.workers {
            cfg.workers = v;
        }
        if let Some(v) = f.mode {
            cfg.backend.mode = v;
        }
        if let Some(v) = f.endpoint_url {
            cfg.backend.endpoint_url = v;
        }
        if let Some(v) = f.token_env {
            cfg.backend.auth_token_env_name = v;
        }
        if cfg.workers == 0 {
            return Err(ApiError::validation("workers must be at least 1"));
        }
        cfg.backend.validate()?;
        Ok(cfg)
    }

    pub fn from_process_env(file: Option<&Path>, flags: &Overrides) -> Result<Self, ApiError> {
        Self::load(file, |k| std::env::var(k).ok(), flags)
    }
}
