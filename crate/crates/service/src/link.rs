//! The gateway's single shared connection to the executor.
//!
//! Requests from every client session are multiplexed over it under
//! link-local ids and routed back by id. A background task keeps the
//! connection alive: when it drops, every pending request is answered with
//! `executor_unavailable` and the task reconnects with exponential backoff
//! capped at [`LinkConfig::backoff_cap`]. A request arriving while the link is
//! not connected wakes the task for an immediate attempt and waits up to
//! [`LinkConfig::connect_deadline`] for it to succeed.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use loide_core::protocol::{decode, encode, Envelope, Message};
use loide_core::{ProblemCode, ProblemReport};
use tokio::sync::{mpsc, oneshot, watch, Notify};
use tokio_tungstenite::tungstenite::protocol::WebSocketConfig;
use tokio_tungstenite::tungstenite::Message as WsMessage;

use crate::client::normalize_url;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkState {
    Connected,
    Reconnecting,
    Down,
}

#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub url: String,
    /// How long a request waits for a missing link before giving up.
    pub connect_deadline: Duration,
    pub backoff_initial: Duration,
    pub backoff_cap: Duration,
    /// Consecutive failed attempts after which the link is reported down.
    pub down_after: u32,
}

impl LinkConfig {
    pub fn new(url: impl Into<String>) -> Self {
        LinkConfig {
            url: normalize_url(&url.into()),
            connect_deadline: Duration::from_millis(500),
            backoff_initial: Duration::from_millis(100),
            backoff_cap: Duration::from_secs(5),
            down_after: 3,
        }
    }
}

fn unavailable(detail: impl Into<String>) -> ProblemReport {
    ProblemReport::new(ProblemCode::ExecutorUnavailable, detail)
}

struct Shared {
    config: LinkConfig,
    state: watch::Sender<LinkState>,
    outbound: Mutex<Option<mpsc::UnboundedSender<String>>>,
    pending: Mutex<HashMap<String, oneshot::Sender<Envelope>>>,
    next_id: AtomicU64,
    wake: Notify,
}

impl Shared {
    fn fail_pending(&self, detail: &str) {
        let pending: Vec<_> = self
            .pending
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .drain()
            .collect();
        for (id, tx) in pending {
            let _ = tx.send(Envelope::new(id, Message::Problem(unavailable(detail))));
        }
    }
}

#[derive(Clone)]
pub struct ExecutorLink {
    shared: Arc<Shared>,
}

impl ExecutorLink {
    /// Starts the background connection task. Must be called inside a Tokio
    /// runtime.
    pub fn start(config: LinkConfig) -> Self {
        let (state, _) = watch::channel(LinkState::Reconnecting);
        let shared = Arc::new(Shared {
            config,
            state,
            outbound: Mutex::new(None),
            pending: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(0),
            wake: Notify::new(),
        });
        tokio::spawn(maintain(Arc::clone(&shared)));
        ExecutorLink { shared }
    }

    pub fn state(&self) -> LinkState {
        *self.shared.state.borrow()
    }

    pub fn subscribe(&self) -> watch::Receiver<LinkState> {
        self.shared.state.subscribe()
    }

    async fn ensure_connected(&self) -> Result<mpsc::UnboundedSender<String>, ProblemReport> {
        let current = || {
            self.shared
                .outbound
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .clone()
        };
        if self.state() == LinkState::Connected {
            if let Some(tx) = current() {
                return Ok(tx);
            }
        }
        self.shared.wake.notify_one();
        let mut states = self.subscribe();
        let wait = async { states.wait_for(|s| *s == LinkState::Connected).await.is_ok() };
        match tokio::time::timeout(self.shared.config.connect_deadline, wait).await {
            Ok(true) => current().ok_or_else(|| unavailable("executor connection lost")),
            _ => Err(unavailable(format!(
                "executor at {} is not reachable",
                self.shared.config.url
            ))),
        }
    }

    /// Sends one message and waits for the executor's answer to it. The
    /// answer carries the caller's `id`; a lost link yields a
    /// `problem{executor_unavailable}` answer.
    pub async fn forward(&self, id: &str, message: Message) -> Envelope {
        let tx = match self.ensure_connected().await {
            Ok(tx) => tx,
            Err(problem) => return Envelope::new(id, Message::Problem(problem)),
        };
        let link_id = format!("g{}", self.shared.next_id.fetch_add(1, Ordering::Relaxed));
        let (answer_tx, answer_rx) = oneshot::channel();
        self.shared
            .pending
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(link_id.clone(), answer_tx);
        if tx.send(encode(&Envelope::new(link_id.clone(), message))).is_err() {
            self.shared
                .pending
                .lock()
                .unwrap_or_else(|e| e.into_inner())
                .remove(&link_id);
            return Envelope::new(id, Message::Problem(unavailable("executor connection lost")));
        }
        let message = match answer_rx.await {
            Ok(answer) => answer.message,
            Err(_) => Message::Problem(unavailable("executor connection lost")),
        };
        Envelope::new(id, message)
    }
}

async fn maintain(shared: Arc<Shared>) {
    let config = shared.config.clone();
    let mut backoff = config.backoff_initial;
    let mut failures = 0u32;
    loop {
        let ws_config = WebSocketConfig::default()
            .max_message_size(Some(64 << 20))
            .max_frame_size(Some(64 << 20));
        let attempt = tokio::time::timeout(
            Duration::from_secs(2),
            tokio_tungstenite::connect_async_with_config(config.url.as_str(), Some(ws_config), false),
        )
        .await;
        match attempt {
            Ok(Ok((socket, _))) => {
                failures = 0;
                backoff = config.backoff_initial;
                let (tx, rx) = mpsc::unbounded_channel();
                *shared.outbound.lock().unwrap_or_else(|e| e.into_inner()) = Some(tx);
                shared.state.send_replace(LinkState::Connected);
                tracing::info!(url = %config.url, "executor link connected");
                pump(socket, rx, &shared).await;
                *shared.outbound.lock().unwrap_or_else(|e| e.into_inner()) = None;
                shared.state.send_replace(LinkState::Reconnecting);
                shared.fail_pending("executor connection lost");
                tracing::warn!(url = %config.url, "executor link lost");
                // Reconnect right away; back off only on failed attempts.
                continue;
            }
            Ok(Err(e)) => tracing::debug!(error = %e, "executor connect failed"),
            Err(_) => tracing::debug!("executor connect timed out"),
        }
        failures += 1;
        if failures >= config.down_after {
            shared.state.send_replace(LinkState::Down);
        } else {
            shared.state.send_replace(LinkState::Reconnecting);
        }
        tokio::select! {
            _ = tokio::time::sleep(backoff) => {}
            _ = shared.wake.notified() => {}
        }
        backoff = (backoff * 2).min(config.backoff_cap);
    }
}

async fn pump<S>(socket: tokio_tungstenite::WebSocketStream<S>, mut rx: mpsc::UnboundedReceiver<String>, shared: &Shared)
where
    S: tokio::io::AsyncRead + tokio::io::AsyncWrite + Unpin,
{
    let (mut sink, mut stream) = socket.split();
    loop {
        tokio::select! {
            frame = rx.recv() => {
                let Some(frame) = frame else { return };
                if sink.send(WsMessage::Text(frame.into())).await.is_err() {
                    return;
                }
            }
            incoming = stream.next() => {
                match incoming {
                    Some(Ok(WsMessage::Text(text))) => {
                        let Ok(envelope) = decode(text.as_bytes()) else {
                            tracing::warn!("undecodable frame from executor");
                            continue;
                        };
                        let waiter = shared
                            .pending
                            .lock()
                            .unwrap_or_else(|e| e.into_inner())
                            .remove(&envelope.id);
                        if let Some(waiter) = waiter {
                            let _ = waiter.send(envelope);
                        }
                    }
                    Some(Ok(WsMessage::Close(_))) | Some(Err(_)) | None => return,
                    Some(Ok(_)) => {}
                }
            }
        }
    }
}
