//! Runs an external solver process.
//!
//! The program text goes to a temporary file whose path is substituted into
//! the engine's command template. The child leads its own process group so a
//! timeout can kill it together with everything it spawned; the group is
//! also killed after a normal exit so no descendant outlives the job. The
//! temporary file is removed when this function returns, on every path.

use std::io::Write;
use std::process::Stdio;
use std::time::Duration;

use loide_core::registry::RunPlan;
use loide_core::{ProblemCode, ProblemReport, RunResult};
use tokio::io::{AsyncRead, AsyncReadExt};
use tokio::process::Command;
use tokio::task::JoinHandle;

/// Per-stream cap on captured output.
pub const MAX_OUTPUT_BYTES: u64 = 16 * 1024 * 1024;

/// Environment variable carrying the program path to the engine.
pub const PROGRAM_ENV: &str = "LOIDE_PROGRAM";

/// Grace period for pipes to drain once the child has exited.
const DRAIN_GRACE: Duration = Duration::from_millis(200);

fn failure(detail: impl Into<String>) -> ProblemReport {
    ProblemReport::new(ProblemCode::EngineFailure, detail)
}

fn capture<R: AsyncRead + Unpin + Send + 'static>(stream: Option<R>) -> JoinHandle<Vec<u8>> {
    tokio::spawn(async move {
        let mut buf = Vec::new();
        if let Some(stream) = stream {
            let _ = stream.take(MAX_OUTPUT_BYTES).read_to_end(&mut buf).await;
        }
        buf
    })
}

#[cfg(unix)]
fn kill_group(pgid: Option<u32>) {
    if let Some(pgid) = pgid.and_then(|p| libc::pid_t::try_from(p).ok()) {
        // SAFETY: plain syscall; a stale group id only yields ESRCH.
        unsafe {
            libc::killpg(pgid, libc::SIGKILL);
        }
    }
}

#[cfg(not(unix))]
fn kill_group(_pgid: Option<u32>) {}

async fn collect(handle: JoinHandle<Vec<u8>>) -> String {
    match tokio::time::timeout(DRAIN_GRACE, handle).await {
        Ok(Ok(bytes)) => String::from_utf8_lossy(&bytes).into_owned(),
        _ => String::new(),
    }
}

pub async fn run_external(plan: &RunPlan, program: &str) -> Result<RunResult, ProblemReport> {
    let mut file = tempfile::Builder::new()
        .prefix("loide-")
        .suffix(".lp")
        .tempfile()
        .map_err(|e| failure(format!("cannot create program file: {e}")))?;
    file.write_all(program.as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| failure(format!("cannot write program file: {e}")))?;

    let argv = plan.descriptor.command_line(file.path(), &plan.options);
    let mut cmd = Command::new(&argv[0]);
    cmd.args(&argv[1..])
        .env(PROGRAM_ENV, file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .kill_on_drop(true);
    #[cfg(unix)]
    cmd.process_group(0);

    let mut child = cmd
        .spawn()
        .map_err(|e| failure(format!("cannot start {}: {e}", argv[0])))?;
    let pgid = child.id();
    let stdout = capture(child.stdout.take());
    let stderr = capture(child.stderr.take());

    let status = match tokio::time::timeout(plan.timeout, child.wait()).await {
        Ok(status) => {
            kill_group(pgid);
            status.map_err(|e| failure(format!("waiting for engine: {e}")))?
        }
        Err(_) => {
            kill_group(pgid);
            let _ = child.kill().await;
            stdout.abort();
            stderr.abort();
            return Err(ProblemReport::new(
                ProblemCode::Timeout,
                format!("engine did not finish within {:.1}s", plan.timeout.as_secs_f64()),
            ));
        }
    };

    let model = collect(stdout).await;
    let error = collect(stderr).await;
    drop(file);

    if !status.success() && model.trim().is_empty() {
        let mut detail = format!("engine exited with {status}");
        if !error.trim().is_empty() {
            detail.push_str(": ");
            detail.push_str(error.trim());
        }
        return Err(failure(detail));
    }
    Ok(RunResult::new(model, error))
}
