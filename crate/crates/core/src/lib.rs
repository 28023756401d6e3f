//! Shared building blocks of the LoIDE platform.
//!
//! * [`protocol`]: the JSON envelope exchanged between browser, gateway and
//!   executor, plus the workspace file format.
//! * [`asp`]: a small ground-and-solve engine for normal and disjunctive
//!   answer set programs.
//! * [`workspace`]: composition of run requests from editor tabs, and
//!   import/export of workspace files.
//! * [`registry`]: engine descriptors and the (language, engine) registry
//!   used by the executor.
//! * [`builtin`]: glue running a [`protocol::RunRequest`] on the built-in engine.

pub mod asp;
pub mod builtin;
pub mod protocol;
pub mod registry;
pub mod workspace;

pub use protocol::{
    EngineKind, EngineSummary, Envelope, Message, OptionEntry, ProblemCode, ProblemReport,
    RunRequest, RunResult, Settings, Tab, Workspace,
};
pub use registry::{EngineDescriptor, Registry};
