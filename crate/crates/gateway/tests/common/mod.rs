#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use paretoinfer::inference::BackendConfig;
use paretoinfer_gateway::{Gateway, RunDescriptor, RunStatus};
use serde_json::Value;

pub struct Http {
    pub base: String,
    agent: ureq::Agent,
}

impl Http {
    pub fn new(base: String) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        Self { base, agent }
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        let mut r = self.agent.get(&format!("{}{path}", self.base)).call().expect("request");
        let status = r.status().as_u16();
        (status, r.body_mut().read_json().expect("json body"))
    }

    pub fn get_text(&self, path: &str) -> (u16, String) {
        let mut r = self.agent.get(&format!("{}{path}", self.base)).call().expect("request");
        (r.status().as_u16(), r.body_mut().read_to_string().unwrap())
    }

    pub fn post(&self, path: &str, body: &Value) -> (u16, Value) {
        let mut r = self
            .agent
            .post(&format!("{}{path}", self.base))
            .send_json(body)
            .expect("request");
        let status = r.status().as_u16();
        (status, r.body_mut().read_json().expect("json body"))
    }

    pub fn post_raw(&self, path: &str, body: &str) -> (u16, Value) {
        let mut r = self
            .agent
            .post(&format!("{}{path}", self.base))
            .header("content-type", "application/json")
            .send(body)
            .expect("request");
        let status = r.status().as_u16();
        (status, r.body_mut().read_json().expect("json body"))
    }

    /// Polls a run until it leaves pending/running.
    pub fn wait(&self, id: &str, limit: Duration) -> RunDescriptor {
        let start = Instant::now();
        loop {
            let (status, v) = self.get(&format!("/runs/{id}"));
            assert_eq!(status, 200, "{v}");
            let d: RunDescriptor = serde_json::from_value(v).unwrap();
            if matches!(d.status, RunStatus::Done | RunStatus::Failed) {
                return d;
            }
            assert!(start.elapsed() < limit, "run {id} still {:?}", d.status);
            std::thread::sleep(Duration::from_millis(25));
        }
    }
}

/// In-process server on an ephemeral port.
pub fn serve_in_process(dir: &Path, backend: BackendConfig) -> Http {
    let gw = Gateway::open(dir, 1, backend).expect("gateway opens");
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, gw.router()).await.unwrap();
        });
    });
    Http::new(format!("http://{}", rx.recv().unwrap()))
}

/// The `paretoinfer serve` binary as a child process.
pub struct ServerProcess {
    child: Child,
    pub http: Http,
}

impl ServerProcess {
    pub fn start(store: &Path) -> Self {
        let mut child = Command::new(env!("CARGO_BIN_EXE_paretoinfer"))
            .args(["serve", "--bind", "127.0.0.1:0", "--store"])
            .arg(store)
            .env_remove("PARETOINFER_CONFIG")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("server starts");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .unwrap();
        let url = line
            .split_whitespace()
            .find(|w| w.starts_with("http://"))
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .to_string();
        Self {
            child,
            http: Http::new(url),
        }
    }

    pub fn stop(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
    }
}
