use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use loide_core::builtin::FILTER_OPTION;
use loide_core::registry::TIMEOUT_OPTION;
use loide_core::workspace::{compose_request, import_workspace};
use loide_core::{OptionEntry, ProblemCode, ProblemReport, Registry, RunRequest, RunResult};
use loide_service::executor::default_parallelism;
use loide_service::gateway::{self, GatewayConfig, DEFAULT_FRAME_CAP, DEFAULT_MAX_OPEN_RUNS};
use loide_service::{executor_server, run_remote, Executor};

#[derive(Parser)]
#[command(name = "loide", version, about = "Run logic programs and the services behind the IDE")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run source files or a workspace and print the result
    Run(RunArgs),
    /// Serve the execution service
    Executor(ExecutorArgs),
    /// Serve the public gateway and the IDE bundle
    Gateway(GatewayArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Program files, concatenated in argument order
    #[arg(conflicts_with = "workspace", required_unless_present = "workspace")]
    files: Vec<PathBuf>,
    /// Workspace file exported by the IDE
    #[arg(long)]
    workspace: Option<PathBuf>,
    #[arg(long)]
    language: Option<String>,
    #[arg(long)]
    engine: Option<String>,
    /// Engine option as NAME=VALUE, or a bare NAME for a flag (repeatable).
    /// Long options keep their inline value: `--opt --models=0`.
    #[arg(long = "opt", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    opts: Vec<String>,
    /// Run timeout in seconds
    #[arg(long)]
    timeout: Option<String>,
    /// Executor address; runs in-process when absent
    #[arg(long, env = "LOIDE_EXECUTOR_URL")]
    executor: Option<String>,
    /// Only show atoms of these predicates (comma-separated)
    #[arg(long, value_name = "P,Q")]
    filter: Option<String>,
}

#[derive(Args)]
struct ExecutorArgs {
    #[arg(long, env = "LOIDE_EXECUTOR_BIND", default_value = "0.0.0.0:8085")]
    bind: SocketAddr,
    /// JSON list of engine descriptors
    #[arg(long, env = "LOIDE_ENGINES_FILE")]
    engines_file: Option<PathBuf>,
    /// Concurrent jobs; defaults to the number of cores
    #[arg(long)]
    max_jobs: Option<usize>,
}

#[derive(Args)]
struct GatewayArgs {
    #[arg(long, env = "LOIDE_BIND", default_value = gateway::DEFAULT_BIND)]
    bind: SocketAddr,
    #[arg(long, env = "LOIDE_EXECUTOR_URL", default_value = "127.0.0.1:8085")]
    executor: String,
    /// Directory holding the built IDE bundle
    #[arg(long, env = "LOIDE_UI_DIR")]
    ui_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_FRAME_CAP)]
    frame_cap: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_OPEN_RUNS)]
    max_open_runs: usize,
}

fn parse_opt(raw: &str) -> OptionEntry {
    if raw.starts_with("--") {
        return OptionEntry::flag(raw);
    }
    match raw.split_once('=') {
        Some((name, value)) => OptionEntry::new(name, vec![value.to_owned()]),
        None => OptionEntry::flag(raw),
    }
}

fn build_request(args: &RunArgs) -> Result<RunRequest, String> {
    let mut request = match &args.workspace {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let ws = import_workspace(&bytes).map_err(|p| format!("{}: {}", path.display(), p.detail))?;
            compose_request(&ws)
        }
        None => {
            let mut sources = Vec::with_capacity(args.files.len());
            for path in &args.files {
                sources.push(std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?);
            }
            RunRequest::new("asp", "builtin").with_sources(sources)
        }
    };
    if let Some(language) = &args.language {
        request.language = language.clone();
    }
    if let Some(engine) = &args.engine {
        request.engine = engine.clone();
    }
    request.options.extend(args.opts.iter().map(|o| parse_opt(o)));
    if let Some(timeout) = &args.timeout {
        request.options.push(OptionEntry::new(TIMEOUT_OPTION, vec![timeout.clone()]));
    }
    if let Some(filter) = &args.filter {
        request.options.push(OptionEntry::new(FILTER_OPTION, vec![filter.clone()]));
    }
    Ok(request)
}

fn local_registry() -> Result<Registry, String> {
    match std::env::var_os("LOIDE_ENGINES_FILE") {
        Some(path) => Registry::from_file(path.as_ref()).map_err(|e| e.to_string()),
        None => Ok(Registry::with_builtin()),
    }
}

fn problem_exit(problem: &ProblemReport) -> ExitCode {
    eprintln!("{}: {}", problem.code.as_str(), problem.detail);
    match problem.code {
        ProblemCode::ParseError | ProblemCode::SafetyError | ProblemCode::Timeout | ProblemCode::EngineFailure => {
            ExitCode::from(1)
        }
        _ => ExitCode::from(2),
    }
}

fn print_result(result: &RunResult) -> ExitCode {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(result.model.as_bytes());
    if !result.model.is_empty() && !result.model.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
    let _ = out.flush();
    if result.error.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprint!("{}", result.error);
        ExitCode::from(1)
    }
}

async fn run(args: RunArgs) -> ExitCode {
    let request = match build_request(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match args.executor.as_deref().filter(|u| !u.is_empty()) {
        Some(url) => match run_remote(url, request, None).await {
            Ok(outcome) => outcome,
            Err(e) => Err(ProblemReport::new(ProblemCode::ExecutorUnavailable, e.to_string())),
        },
        None => {
            let registry = match local_registry() {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            Executor::new(registry, 1).execute(&request).await
        }
    };
    match outcome {
        Ok(result) => print_result(&result),
        Err(problem) => problem_exit(&problem),
    }
}

fn announce(addr: SocketAddr) {
    println!("listening on {addr}");
    let _ = std::io::stdout().flush();
}

async fn serve_executor(args: ExecutorArgs) -> Result<(), String> {
    let registry = match &args.engines_file {
        Some(path) => Registry::from_file(path).map_err(|e| e.to_string())?,
        None => Registry::with_builtin(),
    };
    let executor = Arc::new(Executor::new(registry, args.max_jobs.unwrap_or_else(default_parallelism)));
    let (addr, server) = executor_server::spawn(args.bind, executor)
        .await
        .map_err(|e| format!("cannot bind {}: {e}", args.bind))?;
    announce(addr);
    tokio::select! {
        r = server => r.map_err(|e| e.to_string())?.map_err(|e| e.to_string()),
        _ = tokio::signal::ctrl_c() => Ok(()),
    }
}

async fn serve_gateway(args: GatewayArgs) -> Result<(), String> {
    let mut config = GatewayConfig::new(args.bind, args.executor);
    config.ui_dir = args.ui_dir;
    config.frame_cap = args.frame_cap;
    config.max_open_runs = args.max_open_runs;
    let handle = gateway::spawn(config)
        .await
        .map_err(|e| format!("cannot bind {}: {e}", args.bind))?;
    announce(handle.addr);
    tokio::select! {
        r = handle.server => r.map_err(|e| e.to_string())?.map_err(|e| e.to_string()),
        _ = tokio::signal::ctrl_c() => Ok(()),
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_env("LOIDE_LOG"))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let served = match cli.command {
        Command::Run(args) => return run(args).await,
        Command::Executor(args) => serve_executor(args).await,
        Command::Gateway(args) => serve_gateway(args).await,
    };
    match served {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
