//! WebSocket front of the executor: `/ws` speaks the same envelope protocol
//! as the gateway.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::ws::{Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use loide_core::protocol::{decode, encode, EngineList, Envelope, Message, ProblemReport};
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tokio::task::JoinHandle;

use crate::executor::Executor;

/// Executor frames carry whole programs and outputs; keep the transport cap
/// generous.
const MAX_EXECUTOR_FRAME: usize = 64 * 1024 * 1024;

pub fn router(executor: Arc<Executor>) -> Router {
    Router::new()
        .route("/ws", get(upgrade))
        .with_state(executor)
}

async fn upgrade(ws: WebSocketUpgrade, State(executor): State<Arc<Executor>>) -> Response {
    ws.max_message_size(MAX_EXECUTOR_FRAME)
        .max_frame_size(MAX_EXECUTOR_FRAME)
        .on_upgrade(move |socket| serve_socket(socket, executor))
}

async fn serve_socket(socket: WebSocket, executor: Arc<Executor>) {
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
        let bytes = match &frame {
            WsMessage::Text(text) => text.as_bytes(),
            WsMessage::Binary(_) => {
                let problem = ProblemReport::malformed("binary frames are not supported");
                let _ = out_tx.send(encode(&Envelope::new("", Message::Problem(problem))));
                continue;
            }
            WsMessage::Close(_) => break,
            _ => continue,
        };
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
                let executor = Arc::clone(&executor);
                let out_tx = out_tx.clone();
                tokio::spawn(async move {
                    let outcome = executor.execute_job(&id, &request).await;
                    let _ = out_tx.send(encode(&Envelope::new(id, outcome.into())));
                });
            }
            Message::ListEngines => {
                let engines = EngineList {
                    engines: executor.snapshot_registry(),
                };
                let _ = out_tx.send(encode(&Envelope::new(id, Message::Engines(engines))));
            }
            Message::Ping => {
                let _ = out_tx.send(encode(&Envelope::new(id, Message::Pong)));
            }
            other => {
                let problem = ProblemReport::malformed(format!(
                    "unexpected {} message from client",
                    other.type_name()
                ));
                let _ = out_tx.send(encode(&Envelope::new(id, Message::Problem(problem))));
            }
        }
    }
    drop(out_tx);
    let _ = writer.await;
}

/// Binds and serves the executor in the background.
pub async fn spawn(
    bind: SocketAddr,
    executor: Arc<Executor>,
) -> std::io::Result<(SocketAddr, JoinHandle<std::io::Result<()>>)> {
    let listener = TcpListener::bind(bind).await?;
    let addr = listener.local_addr()?;
    let app = router(executor);
    let handle = tokio::spawn(async move { axum::serve(listener, app).await });
    Ok((addr, handle))
}
