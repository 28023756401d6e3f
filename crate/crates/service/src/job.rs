use std::time::{Duration, Instant};

use loide_core::RunRequest;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JobState {
    Queued,
    Running,
    Finished,
}

/// One run inside the executor. States only move forward:
/// queued → running → finished.
#[derive(Debug, Clone)]
pub struct Job {
    pub id: String,
    pub request: RunRequest,
    state: JobState,
    pub queued_at: Instant,
    pub started_at: Option<Instant>,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("job {id}: cannot move from {from:?} to {to:?}")]
pub struct TransitionError {
    pub id: String,
    pub from: JobState,
    pub to: JobState,
}

impl Job {
    pub fn new(id: impl Into<String>, request: RunRequest) -> Self {
        Job {
            id: id.into(),
            request,
            state: JobState::Queued,
            queued_at: Instant::now(),
            started_at: None,
            deadline: None,
        }
    }

    pub fn state(&self) -> JobState {
        self.state
    }

    fn advance(&mut self, to: JobState) -> Result<(), TransitionError> {
        let ok = matches!(
            (self.state, to),
            (JobState::Queued, JobState::Running) | (JobState::Running, JobState::Finished)
        );
        if !ok {
            return Err(TransitionError {
                id: self.id.clone(),
                from: self.state,
                to,
            });
        }
        self.state = to;
        Ok(())
    }

    /// Marks the job running; its deadline starts counting now.
    pub fn start(&mut self, timeout: Duration) -> Result<Instant, TransitionError> {
        self.advance(JobState::Running)?;
        let now = Instant::now();
        self.started_at = Some(now);
        let deadline = now + timeout;
        self.deadline = Some(deadline);
        Ok(deadline)
    }

    pub fn finish(&mut self) -> Result<(), TransitionError> {
        self.advance(JobState::Finished)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_only() {
        let mut job = Job::new("1", RunRequest::new("asp", "builtin"));
        assert_eq!(job.state(), JobState::Queued);
        assert!(job.finish().is_err());
        let deadline = job.start(Duration::from_secs(2)).unwrap();
        assert_eq!(job.deadline, Some(deadline));
        assert!(job.start(Duration::from_secs(2)).is_err());
        job.finish().unwrap();
        assert_eq!(job.state(), JobState::Finished);
        assert!(job.finish().is_err());
    }
}
