//! Minimal client for the envelope protocol, used by the CLI and by tests.

use std::time::Duration;

use futures::{SinkExt, StreamExt};
use loide_core::protocol::{decode, encode, Envelope, Message};
use loide_core::{ProblemReport, RunRequest, RunResult};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::protocol::WebSocketConfig;
use tokio_tungstenite::tungstenite::Message as WsMessage;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("cannot connect to {url}: {reason}")]
    Connect { url: String, reason: String },
    #[error("connection closed before an answer arrived")]
    Closed,
    #[error("transport error: {0}")]
    Transport(String),
    #[error("timed out waiting for an answer")]
    Timeout,
}

/// Accepts `ws://host:port/ws` or a bare `host:port`.
pub fn normalize_url(url: &str) -> String {
    if url.contains("://") {
        url.to_owned()
    } else {
        format!("ws://{url}/ws")
    }
}

pub struct Client {
    socket: WebSocketStream<MaybeTlsStream<TcpStream>>,
}

impl Client {
    pub async fn connect(url: &str) -> Result<Self, ClientError> {
        let url = normalize_url(url);
        let config = WebSocketConfig::default()
            .max_message_size(Some(64 << 20))
            .max_frame_size(Some(64 << 20));
        let (socket, _) = tokio_tungstenite::connect_async_with_config(url.as_str(), Some(config), false)
            .await
            .map_err(|e| ClientError::Connect {
                url: url.clone(),
                reason: e.to_string(),
            })?;
        Ok(Client { socket })
    }

    pub async fn send_text(&mut self, frame: impl Into<String>) -> Result<(), ClientError> {
        self.socket
            .send(WsMessage::Text(frame.into().into()))
            .await
            .map_err(|e| ClientError::Transport(e.to_string()))
    }

    pub async fn send(&mut self, envelope: &Envelope) -> Result<(), ClientError> {
        self.send_text(encode(envelope)).await
    }

    /// Next text frame, raw.
    pub async fn next_text(&mut self) -> Result<String, ClientError> {
        loop {
            match self.socket.next().await {
                None => return Err(ClientError::Closed),
                Some(Err(e)) => return Err(ClientError::Transport(e.to_string())),
                Some(Ok(WsMessage::Text(text))) => return Ok(text.as_str().to_owned()),
                Some(Ok(WsMessage::Close(_))) => return Err(ClientError::Closed),
                Some(Ok(_)) => continue,
            }
        }
    }

    /// Next frame that decodes; undecodable frames are transport errors.
    pub async fn next_envelope(&mut self) -> Result<Envelope, ClientError> {
        let text = self.next_text().await?;
        decode(text.as_bytes()).map_err(|e| ClientError::Transport(e.to_string()))
    }

    /// Sends `envelope` and waits for the answer carrying the same id;
    /// frames for other ids are skipped.
    pub async fn request(&mut self, envelope: &Envelope) -> Result<Envelope, ClientError> {
        self.send(envelope).await?;
        loop {
            let answer = self.next_envelope().await?;
            if answer.id == envelope.id {
                return Ok(answer);
            }
        }
    }

    pub async fn run(&mut self, id: &str, request: RunRequest) -> Result<Result<RunResult, ProblemReport>, ClientError> {
        let answer = self.request(&Envelope::new(id, Message::Run(request))).await?;
        match answer.message {
            Message::Result(r) => Ok(Ok(r)),
            Message::Problem(p) => Ok(Err(p)),
            other => Err(ClientError::Transport(format!(
                "unexpected {} answer to run",
                other.type_name()
            ))),
        }
    }

    pub async fn close(mut self) {
        let _ = self.socket.close(None).await;
    }
}

/// Connects, runs one request, disconnects.
pub async fn run_remote(
    url: &str,
    request: RunRequest,
    wait: Option<Duration>,
) -> Result<Result<RunResult, ProblemReport>, ClientError> {
    let job = async {
        let mut client = Client::connect(url).await?;
        let outcome = client.run("1", request).await;
        client.close().await;
        outcome
    };
    match wait {
        Some(limit) => tokio::time::timeout(limit, job).await.map_err(|_| ClientError::Timeout)?,
        None => job.await,
    }
}
