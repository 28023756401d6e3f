//! The solver-execution service: engine registry, job admission and the
//! run loop for both engine kinds.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use loide_core::builtin::run_builtin;
use loide_core::registry::RegistryError;
use loide_core::{
    EngineDescriptor, EngineKind, EngineSummary, ProblemCode, ProblemReport, Registry, RunRequest,
    RunResult,
};
use tokio::sync::Semaphore;

use crate::external::run_external;
use crate::job::{Job, JobState};

/// Extra time granted to the built-in engine's own deadline check before the
/// executor gives up on it.
const BUILTIN_BACKSTOP: Duration = Duration::from_millis(250);

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(4, |n| n.get())
}

pub struct Executor {
    registry: Registry,
    slots: Semaphore,
    jobs: Mutex<HashMap<u64, Job>>,
    next_job: AtomicU64,
}

impl Executor {
    pub fn new(registry: Registry, max_jobs: usize) -> Self {
        Executor {
            registry,
            slots: Semaphore::new(max_jobs.max(1)),
            jobs: Mutex::new(HashMap::new()),
            next_job: AtomicU64::new(0),
        }
    }

    /// Built-in engine only, one slot per core.
    pub fn builtin() -> Self {
        Self::new(Registry::with_builtin(), default_parallelism())
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn register_engine(&self, descriptor: EngineDescriptor) -> Result<(), RegistryError> {
        self.registry.register(descriptor)
    }

    pub fn snapshot_registry(&self) -> Vec<EngineSummary> {
        self.registry.snapshot()
    }

    /// (correlation id, state) of every job not yet finished.
    pub fn active_jobs(&self) -> Vec<(String, JobState)> {
        let jobs = self.jobs.lock().unwrap_or_else(|e| e.into_inner());
        let mut out: Vec<_> = jobs.values().map(|j| (j.id.clone(), j.state())).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    fn update_job(&self, key: u64, f: impl FnOnce(&mut Job)) {
        if let Some(job) = self.jobs.lock().unwrap_or_else(|e| e.into_inner()).get_mut(&key) {
            f(job);
        }
    }

    pub async fn execute(&self, request: &RunRequest) -> Result<RunResult, ProblemReport> {
        self.execute_job("", request).await
    }

    /// Runs one request to completion. All validation happens here; the
    /// answer is always exactly one result or one problem.
    pub async fn execute_job(&self, id: &str, request: &RunRequest) -> Result<RunResult, ProblemReport> {
        request.validate().map_err(ProblemReport::malformed)?;
        let plan = self.registry.plan(request)?;

        let key = self.next_job.fetch_add(1, Ordering::Relaxed);
        self.jobs
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, Job::new(id, request.clone()));
        let outcome = async {
            let _permit = self
                .slots
                .acquire()
                .await
                .map_err(|_| ProblemReport::new(ProblemCode::EngineFailure, "executor shutting down"))?;
            let mut deadline = None;
            self.update_job(key, |job| deadline = job.start(plan.timeout).ok());
            let deadline = deadline.expect("queued job starts");

            match plan.descriptor.kind {
                EngineKind::Builtin => {
                    let sources = request.sources.clone();
                    let options = plan.options.clone();
                    let task = tokio::task::spawn_blocking(move || {
                        run_builtin(&sources, &options, Some(deadline))
                    });
                    match tokio::time::timeout(plan.timeout + BUILTIN_BACKSTOP, task).await {
                        Ok(Ok(outcome)) => outcome,
                        Ok(Err(join)) => Err(ProblemReport::new(
                            ProblemCode::EngineFailure,
                            format!("builtin engine crashed: {join}"),
                        )),
                        Err(_) => Err(ProblemReport::new(
                            ProblemCode::Timeout,
                            format!("engine did not finish within {:.1}s", plan.timeout.as_secs_f64()),
                        )),
                    }
                }
                EngineKind::External => run_external(&plan, &request.program_text()).await,
            }
        }
        .await;
        self.update_job(key, |job| {
            let _ = job.finish();
        });
        self.jobs.lock().unwrap_or_else(|e| e.into_inner()).remove(&key);
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use loide_core::OptionEntry;

    fn asp(sources: &[&str]) -> RunRequest {
        RunRequest::new("asp", "builtin").with_sources(sources.iter().copied())
    }

    #[tokio::test]
    async fn builtin_runs() {
        let exec = Executor::builtin();
        let r = exec.execute(&asp(&["a."])).await.unwrap();
        assert_eq!(r, RunResult::new("Answer set 1\n{a}", ""));
    }

    #[tokio::test]
    async fn multi_source_equals_concatenation() {
        let exec = Executor::builtin();
        let split = exec.execute(&asp(&["a :- b.", "b."])).await;
        let joined = exec.execute(&asp(&["a :- b.\nb."])).await;
        assert_eq!(split, joined);
    }

    #[tokio::test]
    async fn registry_misses() {
        let exec = Executor::builtin();
        let mut req = asp(&["a."]);
        req.language = "prolog".into();
        assert_eq!(exec.execute(&req).await.unwrap_err().code, ProblemCode::UnknownLanguage);
        req.language = "asp".into();
        req.engine = "dlv".into();
        assert_eq!(exec.execute(&req).await.unwrap_err().code, ProblemCode::UnknownEngine);
    }

    #[tokio::test]
    async fn option_and_validation_errors() {
        let exec = Executor::builtin();
        let req = asp(&["a."]).with_option(OptionEntry::flag("--models=0"));
        let err = exec.execute(&req).await.unwrap_err();
        assert_eq!(err.code, ProblemCode::OptionRejected);
        assert!(err.detail.contains("--models=0"));
        let req = RunRequest::new("ASP", "builtin");
        assert_eq!(exec.execute(&req).await.unwrap_err().code, ProblemCode::MalformedMessage);
        let err = exec.execute(&asp(&["p(X)."])).await.unwrap_err();
        assert_eq!(err.code, ProblemCode::SafetyError);
    }

    #[tokio::test]
    async fn builtin_timeout() {
        let exec = Executor::builtin();
        // Pigeonhole, 10 pigeons into 9 holes: unsatisfiable and slow to refute.
        let mut text = String::new();
        for p in 1..=10 {
            text.push_str(&format!("pigeon({p}). "));
        }
        for h in 1..=9 {
            text.push_str(&format!("hole({h}). "));
        }
        text.push_str("in(P,1) | in(P,2) | in(P,3) | in(P,4) | in(P,5) | in(P,6) | in(P,7) | in(P,8) | in(P,9) :- pigeon(P).\n");
        text.push_str(":- in(P,H), in(Q,H), P < Q.");
        let req = asp(&[&text]).with_option(OptionEntry::new("timeout", vec!["1".into()]));
        let start = std::time::Instant::now();
        let err = exec.execute(&req).await.unwrap_err();
        assert!(start.elapsed() < Duration::from_millis(1500), "{:?}", start.elapsed());
        assert_eq!(err.code, ProblemCode::Timeout, "{err}");
        assert!(exec.active_jobs().is_empty());
    }
}
