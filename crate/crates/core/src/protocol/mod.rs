//! Messages exchanged between the browser client, the gateway and the
//! executor.
//!
//! Every frame on the wire is one JSON object with exactly three members,
//! always serialized in this order:
//!
//! ```text
//! {"type":"run","id":"42","payload":{"language":"asp","engine":"builtin","options":[],"sources":["a."]}}
//! ```
//!
//! `type` selects the payload schema, `id` is chosen by the client and echoed
//! on the terminal `result`/`problem` answer, and `payload` is the body (an
//! empty object for `ping`, `pong` and `list_engines`). The encoding produced
//! by [`encode`] is canonical: UTF-8, no insignificant whitespace, no trailing
//! newline, and struct fields in declaration order, so equal messages are
//! byte-equal.

mod workspace;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::fmt;

pub use workspace::{validate_workspace, Settings, Tab, Workspace, WORKSPACE_VERSION};

/// Returns true for identifiers of the form `[a-z][a-z0-9_-]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_' || c == '-')
}

/// Returns true for option names made of `[A-Za-z0-9_=/.:+-]`, non-empty.
pub fn is_option_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "_=/.:+-".contains(c))
}

/// One solver option, e.g. `filter` with values `["col"]`.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OptionEntry {
    pub name: String,
    #[serde(default)]
    pub values: Vec<String>,
}

impl OptionEntry {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        OptionEntry {
            name: name.into(),
            values,
        }
    }

    pub fn flag(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RunRequest {
    pub language: String,
    pub engine: String,
    #[serde(default)]
    pub options: Vec<OptionEntry>,
    /// Program fragments in tab order; the executor joins them with `\n`.
    #[serde(default)]
    pub sources: Vec<String>,
}

impl RunRequest {
    pub fn new(language: impl Into<String>, engine: impl Into<String>) -> Self {
        RunRequest {
            language: language.into(),
            engine: engine.into(),
            options: Vec::new(),
            sources: Vec::new(),
        }
    }

    pub fn with_sources<I, S>(mut self, sources: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.sources = sources.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_option(mut self, option: OptionEntry) -> Self {
        self.options.push(option);
        self
    }

    /// The single program text the sources compose into.
    pub fn program_text(&self) -> String {
        self.sources.join("\n")
    }

    pub fn validate(&self) -> Result<(), String> {
        if !is_identifier(&self.language) {
            return Err(format!("language: invalid identifier {:?}", self.language));
        }
        if !is_identifier(&self.engine) {
            return Err(format!("engine: invalid identifier {:?}", self.engine));
        }
        validate_options(&self.options, "options")
    }
}

pub(crate) fn validate_options(options: &[OptionEntry], field: &str) -> Result<(), String> {
    for (i, opt) in options.iter().enumerate() {
        if !is_option_name(&opt.name) {
            return Err(format!("{field}[{i}].name: invalid option name {:?}", opt.name));
        }
    }
    Ok(())
}

/// Terminal answer of a successful run: the solver's stdout and stderr.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq, Default)]
#[serde(deny_unknown_fields)]
pub struct RunResult {
    pub model: String,
    #[serde(default)]
    pub error: String,
}

impl RunResult {
    pub fn new(model: impl Into<String>, error: impl Into<String>) -> Self {
        RunResult {
            model: model.into(),
            error: error.into(),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum ProblemCode {
    ParseError,
    SafetyError,
    UnknownLanguage,
    UnknownEngine,
    OptionRejected,
    ExecutorUnavailable,
    Timeout,
    EngineFailure,
    MalformedMessage,
}

impl ProblemCode {
    pub const ALL: [ProblemCode; 9] = [
        ProblemCode::ParseError,
        ProblemCode::SafetyError,
        ProblemCode::UnknownLanguage,
        ProblemCode::UnknownEngine,
        ProblemCode::OptionRejected,
        ProblemCode::ExecutorUnavailable,
        ProblemCode::Timeout,
        ProblemCode::EngineFailure,
        ProblemCode::MalformedMessage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemCode::ParseError => "parse_error",
            ProblemCode::SafetyError => "safety_error",
            ProblemCode::UnknownLanguage => "unknown_language",
            ProblemCode::UnknownEngine => "unknown_engine",
            ProblemCode::OptionRejected => "option_rejected",
            ProblemCode::ExecutorUnavailable => "executor_unavailable",
            ProblemCode::Timeout => "timeout",
            ProblemCode::EngineFailure => "engine_failure",
            ProblemCode::MalformedMessage => "malformed_message",
        }
    }
}

impl fmt::Display for ProblemCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Terminal answer of a run that did not produce solver output.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProblemReport {
    pub code: ProblemCode,
    pub detail: String,
}

impl ProblemReport {
    pub fn new(code: ProblemCode, detail: impl Into<String>) -> Self {
        let mut detail = detail.into();
        if detail.is_empty() {
            detail = code.as_str().replace('_', " ");
        }
        ProblemReport { code, detail }
    }

    pub fn malformed(detail: impl Into<String>) -> Self {
        Self::new(ProblemCode::MalformedMessage, detail)
    }
}

impl fmt::Display for ProblemReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.detail)
    }
}

impl std::error::Error for ProblemReport {}

#[derive(Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    Builtin,
    External,
}

/// Public view of a registry entry; command templates are never exposed.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EngineSummary {
    pub language: String,
    pub engine: String,
    pub kind: EngineKind,
    pub allowed_options: Vec<String>,
    /// Seconds.
    pub default_timeout: u64,
    /// Seconds; upper bound for a per-request `timeout` option.
    pub max_timeout: u64,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq, Default)]
#[serde(deny_unknown_fields)]
pub struct EngineList {
    pub engines: Vec<EngineSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Run(RunRequest),
    Result(RunResult),
    Problem(ProblemReport),
    ListEngines,
    Engines(EngineList),
    Ping,
    Pong,
}

impl Message {
    pub fn type_name(&self) -> &'static str {
        match self {
            Message::Run(_) => "run",
            Message::Result(_) => "result",
            Message::Problem(_) => "problem",
            Message::ListEngines => "list_engines",
            Message::Engines(_) => "engines",
            Message::Ping => "ping",
            Message::Pong => "pong",
        }
    }

    /// True for the messages that close a run.
    pub fn is_terminal(&self) -> bool {
        matches!(self, Message::Result(_) | Message::Problem(_))
    }
}

impl From<Result<RunResult, ProblemReport>> for Message {
    fn from(outcome: Result<RunResult, ProblemReport>) -> Self {
        match outcome {
            Ok(result) => Message::Result(result),
            Err(problem) => Message::Problem(problem),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub id: String,
    pub message: Message,
}

impl Envelope {
    pub fn new(id: impl Into<String>, message: Message) -> Self {
        Envelope {
            id: id.into(),
            message,
        }
    }

    /// Checks the payload invariants that serde alone cannot express.
    pub fn validate(&self) -> Result<(), String> {
        match &self.message {
            Message::Run(req) => req.validate(),
            Message::Problem(p) if p.detail.is_empty() => Err("detail: must not be empty".into()),
            Message::Engines(list) => {
                for (i, e) in list.engines.iter().enumerate() {
                    if !is_identifier(&e.language) || !is_identifier(&e.engine) {
                        return Err(format!("engines[{i}]: invalid identifier"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Serialize)]
struct WireOut<'a, P: Serialize> {
    #[serde(rename = "type")]
    kind: &'a str,
    id: &'a str,
    payload: P,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WireIn {
    #[serde(rename = "type")]
    kind: String,
    id: String,
    payload: Value,
}

/// Serializes an envelope into its canonical text form.
pub fn encode(envelope: &Envelope) -> String {
    fn out<P: Serialize>(kind: &str, id: &str, payload: P) -> String {
        serde_json::to_string(&WireOut { kind, id, payload })
            .expect("protocol payloads always serialize")
    }
    let id = envelope.id.as_str();
    let kind = envelope.message.type_name();
    match &envelope.message {
        Message::Run(p) => out(kind, id, p),
        Message::Result(p) => out(kind, id, p),
        Message::Problem(p) => out(kind, id, p),
        Message::Engines(p) => out(kind, id, p),
        Message::ListEngines | Message::Ping | Message::Pong => out(kind, id, Empty {}),
    }
}

/// A frame that could not be decoded. Carries the correlation id when one
/// could still be recovered, so the answer can be routed.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed message: {detail}")]
pub struct DecodeError {
    pub id: Option<String>,
    pub detail: String,
}

impl From<DecodeError> for ProblemReport {
    fn from(err: DecodeError) -> Self {
        ProblemReport::malformed(err.detail)
    }
}

impl DecodeError {
    /// The `problem` envelope answering the bad frame.
    pub fn into_envelope(self) -> Envelope {
        let id = self.id.clone().unwrap_or_default();
        Envelope::new(id, Message::Problem(self.into()))
    }
}

/// Parses one frame. Never panics, whatever the input.
pub fn decode(bytes: &[u8]) -> Result<Envelope, DecodeError> {
    let wire: WireIn = serde_json::from_slice(bytes).map_err(|e| DecodeError {
        id: salvage_id(bytes),
        detail: e.to_string(),
    })?;
    let id = wire.id;
    let fail = |detail: String| DecodeError {
        id: Some(id.clone()),
        detail,
    };
    let message = match wire.kind.as_str() {
        "run" => Message::Run(payload(wire.payload).map_err(&fail)?),
        "result" => Message::Result(payload(wire.payload).map_err(&fail)?),
        "problem" => Message::Problem(payload(wire.payload).map_err(&fail)?),
        "engines" => Message::Engines(payload(wire.payload).map_err(&fail)?),
        "list_engines" => payload::<Empty>(wire.payload).map(|_| Message::ListEngines).map_err(&fail)?,
        "ping" => payload::<Empty>(wire.payload).map(|_| Message::Ping).map_err(&fail)?,
        "pong" => payload::<Empty>(wire.payload).map(|_| Message::Pong).map_err(&fail)?,
        other => return Err(fail(format!("unknown message type {other:?}"))),
    };
    let envelope = Envelope::new(id.clone(), message);
    envelope.validate().map_err(fail)?;
    Ok(envelope)
}

fn payload<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, String> {
    serde_json::from_value(value).map_err(|e| format!("payload: {e}"))
}

fn salvage_id(bytes: &[u8]) -> Option<String> {
    let value: Value = serde_json::from_slice(bytes).ok()?;
    value.get("id")?.as_str().map(str::to_owned)
}
