#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::net::SocketAddr;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_loide");

/// `loide` with a clean environment for the variables it reads.
pub fn loide() -> Command {
    let mut cmd = Command::new(BIN);
    for var in ["LOIDE_EXECUTOR_URL", "LOIDE_ENGINES_FILE", "LOIDE_BIND", "LOIDE_EXECUTOR_BIND", "LOIDE_UI_DIR"] {
        cmd.env_remove(var);
    }
    cmd
}

pub fn run_cli(args: &[&str]) -> Output {
    loide().arg("run").args(args).output().expect("spawn loide")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// A server process, killed on drop.
pub struct Server {
    pub child: Child,
    pub addr: SocketAddr,
}

impl Server {
    fn start(mut cmd: Command) -> Server {
        let mut child = cmd
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("spawn server");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap())
            .read_line(&mut line)
            .expect("server banner");
        let addr = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected banner {line:?}"))
            .parse()
            .unwrap();
        Server { child, addr }
    }

    pub fn executor(bind: &str, engines_file: Option<&Path>) -> Server {
        let mut cmd = loide();
        cmd.args(["executor", "--bind", bind]);
        if let Some(path) = engines_file {
            cmd.arg("--engines-file").arg(path);
        }
        Server::start(cmd)
    }

    pub fn gateway(executor: SocketAddr) -> Server {
        let mut cmd = loide();
        cmd.args(["gateway", "--bind", "127.0.0.1:0", "--executor", &executor.to_string()]);
        Server::start(cmd)
    }

    pub fn url(&self) -> String {
        format!("ws://{}/ws", self.addr)
    }

    pub fn kill(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.kill();
    }
}
