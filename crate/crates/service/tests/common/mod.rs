#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::Arc;

use loide_core::{EngineDescriptor, Registry};
use loide_service::gateway::{self, GatewayConfig, GatewayHandle};
use loide_service::{executor_server, Executor};

pub fn sh(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into(), "sh".into(), "{program}".into()]
}

pub fn stub(engine: &str, script: &str) -> EngineDescriptor {
    EngineDescriptor::external("asp", engine, sh(script))
}

pub fn executor_with(engines: Vec<EngineDescriptor>, max_jobs: usize) -> Arc<Executor> {
    let registry = Registry::with_builtin();
    for e in engines {
        registry.register(e).unwrap();
    }
    Arc::new(Executor::new(registry, max_jobs))
}

pub async fn start_executor(executor: Arc<Executor>) -> SocketAddr {
    let (addr, _) = executor_server::spawn("127.0.0.1:0".parse().unwrap(), executor)
        .await
        .unwrap();
    addr
}

pub async fn start_gateway(executor: SocketAddr) -> GatewayHandle {
    start_gateway_with(executor, |_| {}).await
}

pub async fn start_gateway_with(executor: SocketAddr, tweak: impl FnOnce(&mut GatewayConfig)) -> GatewayHandle {
    let mut config = GatewayConfig::new("127.0.0.1:0".parse().unwrap(), executor.to_string());
    tweak(&mut config);
    gateway::spawn(config).await.unwrap()
}

pub fn ws(addr: SocketAddr) -> String {
    format!("ws://{addr}/ws")
}

/// A port nothing listens on right now.
pub fn vacant_port() -> SocketAddr {
    let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    l.local_addr().unwrap()
}
