//! Run store, HTTP API and command line over the paretoinfer core.

pub mod api;
pub mod cli;
pub mod config;
pub mod error;
pub mod store;
pub mod worker;

pub use api::{router, AppState, FrontResponse, Gateway, InferenceRequest, InferenceResponse};
pub use cli::cli_main;
pub use config::{GatewayConfig, Overrides};
pub use error::{ApiError, ErrorCode};
pub use store::{RunDescriptor, RunStatus, RunStore};
pub use worker::RunQueue;
