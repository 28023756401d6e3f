//! Network services: the executor, the gateway that fronts it, and a small
//! protocol client.

pub mod client;
pub mod executor;
pub mod executor_server;
pub mod external;
pub mod gateway;
pub mod job;
pub mod link;

pub use client::{run_remote, Client, ClientError};
pub use executor::Executor;
pub use gateway::{GatewayConfig, GatewayHandle};
pub use link::{ExecutorLink, LinkConfig, LinkState};
