//! Public-facing server: WebSocket sessions at `/ws`, static UI at `/`.
//!
//! The gateway validates frames and relays `run` and `list_engines` to the
//! executor over one shared [`ExecutorLink`]. It never executes anything.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use axum::extract::ws::{Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, Response};
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use loide_core::protocol::{decode, encode, Envelope, Message};
use loide_core::{ProblemCode, ProblemReport};
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tokio::task::JoinHandle;
use tower_http::services::ServeDir;

use crate::link::{ExecutorLink, LinkConfig, LinkState};

pub const DEFAULT_BIND: &str = "0.0.0.0:8084";
pub const DEFAULT_FRAME_CAP: usize = 1024 * 1024;
pub const DEFAULT_MAX_OPEN_RUNS: usize = 8;

/// Frames above the session cap are still read off the socket (up to this
/// size) so they can be answered instead of dropping the connection.
const TRANSPORT_CAP: usize = 64 * 1024 * 1024;

const PLACEHOLDER_PAGE: &str = "<!doctype html>\n<html><head><title>loide</title></head>\
<body><p>The IDE bundle is not installed. The run API is at <code>/ws</code>.</p></body></html>\n";

#[derive(Debug, Clone)]
pub struct GatewayConfig {
    pub bind: SocketAddr,
    pub executor_url: String,
    pub frame_cap: usize,
    pub max_open_runs: usize,
    pub ui_dir: Option<PathBuf>,
}

impl GatewayConfig {
    pub fn new(bind: SocketAddr, executor_url: impl Into<String>) -> Self {
        GatewayConfig {
            bind,
            executor_url: executor_url.into(),
            frame_cap: DEFAULT_FRAME_CAP,
            max_open_runs: DEFAULT_MAX_OPEN_RUNS,
            ui_dir: None,
        }
    }
}

struct Gateway {
    link: ExecutorLink,
    frame_cap: usize,
    max_open_runs: usize,
    sessions: AtomicU64,
}

pub fn router(config: &GatewayConfig, link: ExecutorLink) -> Router {
    let gateway = Arc::new(Gateway {
        link,
        frame_cap: config.frame_cap,
        max_open_runs: config.max_open_runs,
        sessions: AtomicU64::new(0),
    });
    let app = Router::new().route("/ws", get(upgrade)).with_state(gateway);
    match &config.ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { Html(PLACEHOLDER_PAGE) })),
    }
}

async fn upgrade(ws: WebSocketUpgrade, State(gateway): State<Arc<Gateway>>) -> Response {
    ws.max_message_size(TRANSPORT_CAP)
        .max_frame_size(TRANSPORT_CAP)
        .on_upgrade(move |socket| serve_session(socket, gateway))
}

/// Per-connection state.
struct Session {
    id: String,
    open_runs: Mutex<HashMap<String, Instant>>,
}

impl Session {
    fn open_runs(&self) -> std::sync::MutexGuard<'_, HashMap<String, Instant>> {
        self.open_runs.lock().unwrap_or_else(|e| e.into_inner())
    }
}

fn problem(id: impl Into<String>, report: ProblemReport) -> String {
    encode(&Envelope::new(id, Message::Problem(report)))
}

async fn serve_session(socket: WebSocket, gateway: Arc<Gateway>) {
    let session = Arc::new(Session {
        id: format!("s{}", gateway.sessions.fetch_add(1, Ordering::Relaxed)),
        open_runs: Mutex::new(HashMap::new()),
    });
    tracing::debug!(session = %session.id, "session opened");
    let (mut sink, mut stream) = socket.split();
    let (out_tx, mut out_rx) = mpsc::unbounded_channel::<String>();
    let writer = tokio::spawn(async move {
        while let Some(frame) = out_rx.recv().await {
            if sink.send(WsMessage::Text(frame.into())).await.is_err() {
                break;
            }
        }
    });

    while let Some(Ok(frame)) = stream.next().await {
        let bytes: &[u8] = match &frame {
            WsMessage::Text(text) => text.as_bytes(),
            WsMessage::Binary(_) => {
                let _ = out_tx.send(problem("", ProblemReport::malformed("binary frames are not supported")));
                continue;
            }
            WsMessage::Close(_) => break,
            _ => continue,
        };
        if bytes.len() > gateway.frame_cap {
            let detail = format!("frame of {} bytes exceeds the {} byte limit", bytes.len(), gateway.frame_cap);
            let _ = out_tx.send(problem("", ProblemReport::malformed(detail)));
            continue;
        }
        let envelope = match decode(bytes) {
            Ok(env) => env,
            Err(err) => {
                let _ = out_tx.send(encode(&err.into_envelope()));
                continue;
            }
        };
        let id = envelope.id;
        match envelope.message {
            Message::Run(request) => {
                {
                    let mut open = session.open_runs();
                    if open.contains_key(&id) {
                        let detail = format!("run id {id:?} is already in flight");
                        let _ = out_tx.send(problem(id, ProblemReport::malformed(detail)));
                        continue;
                    }
                    if open.len() >= gateway.max_open_runs {
                        let report = ProblemReport::new(ProblemCode::ExecutorUnavailable, "too many open runs");
                        let _ = out_tx.send(problem(id, report));
                        continue;
                    }
                    open.insert(id.clone(), Instant::now());
                }
                let link = gateway.link.clone();
                let session = Arc::clone(&session);
                let out_tx = out_tx.clone();
                tokio::spawn(async move {
                    let answer = link.forward(&id, Message::Run(request)).await;
                    session.open_runs().remove(&id);
                    let _ = out_tx.send(encode(&answer));
                });
            }
            Message::ListEngines => {
                let link = gateway.link.clone();
                let out_tx = out_tx.clone();
                tokio::spawn(async move {
                    let answer = link.forward(&id, Message::ListEngines).await;
                    let _ = out_tx.send(encode(&answer));
                });
            }
            Message::Ping => {
                let _ = out_tx.send(encode(&Envelope::new(id, Message::Pong)));
            }
            other => {
                let detail = format!("unexpected {} message from client", other.type_name());
                let _ = out_tx.send(problem(id, ProblemReport::malformed(detail)));
            }
        }
    }
    drop(out_tx);
    let _ = writer.await;
    tracing::debug!(session = %session.id, "session closed");
}

pub struct GatewayHandle {
    pub addr: SocketAddr,
    pub link: ExecutorLink,
    pub server: JoinHandle<std::io::Result<()>>,
}

impl GatewayHandle {
    pub fn link_state(&self) -> LinkState {
        self.link.state()
    }
}

/// Binds, starts the executor link and serves in the background.
pub async fn spawn(config: GatewayConfig) -> std::io::Result<GatewayHandle> {
    let listener = TcpListener::bind(config.bind).await?;
    let addr = listener.local_addr()?;
    let link = ExecutorLink::start(LinkConfig::new(config.executor_url.clone()));
    let app = router(&config, link.clone());
    let server = tokio::spawn(async move { axum::serve(listener, app).await });
    Ok(GatewayHandle { addr, link, server })
}
