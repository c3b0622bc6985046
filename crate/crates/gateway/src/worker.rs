use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use paretoinfer::emo::run_nsga2;
use paretoinfer::problem::make_benchmark_instance;

use crate::error::ApiError;
use crate::store::{RunStatus, RunStore};

/// Fixed pool of threads draining a queue of run ids.
pub struct RunQueue {
    tx: Option<Sender<String>>,
    handles: Vec<JoinHandle<()>>,
}

impl RunQueue {
    pub fn start(store: Arc<RunStore>, workers: usize) -> Self {
        let (tx, rx) = channel::<String>();
        let rx = Arc::new(Mutex::new(rx));
        let handles = (0..workers.max(1))
            .map(|k| {
                let store = store.clone();
                let rx: Arc<Mutex<Receiver<String>>> = rx.clone();
                std::thread::Builder::new()
                    .name(format!("run-worker-{k}"))
                    .spawn(move || loop {
                        let next = rx.lock().unwrap_or_else(|p| p.into_inner()).recv();
                        match next {
                            Ok(id) => execute(&store, &id),
                            Err(_) => break,
                        }
                    })
                    .expect("spawn worker")
            })
            .collect();
        Self { tx: Some(tx), handles }
    }

    pub fn submit(&self, run_id: &str) -> Result<(), ApiError> {
        self.tx
            .as_ref()
            .and_then(|tx| tx.send(run_id.to_string()).ok())
            .ok_or_else(|| ApiError::internal("run queue is shut down"))
    }

    /// Lets queued runs finish, then joins the workers.
    pub fn shutdown(mut self) {
        self.tx.take();
        for h in self.handles.drain(..) {
            let _ = h.join();
        }
    }
}

/// Runs one stored run to completion, recording failure in its descriptor.
pub fn execute(store: &RunStore, id: &str) {
    let d = match store.advance(id, RunStatus::Running, None) {
        Ok(d) => d,
        Err(_) => return,
    };
    let instance = make_benchmark_instance(d.instance_seed);
    let outcome = std::panic::catch_unwind(|| run_nsga2(&instance, &d.params));
    let result = match outcome {
        Ok(Ok(run)) => store.complete(id, &run).map(|_| ()),
        Ok(Err(e)) => Err(ApiError::internal(e.to_string())),
        Err(_) => Err(ApiError::internal("optimizer panicked")),
    };
    if let Err(e) = result {
        let _ = store.advance(id, RunStatus::Failed, Some(e.message));
    }
}
