//! Random valid envelopes and workspaces.

use std::collections::BTreeMap;

use loide_core::protocol::{
    EngineKind, EngineList, EngineSummary, Envelope, Message, OptionEntry, ProblemCode,
    ProblemReport, RunRequest, RunResult, Settings, Tab, Workspace,
};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;

const TEXT_POOL: &[&str] = &[
    "a.",
    "a :- not b.\nb :- not a.",
    "col(X,r) | col(X,g) :- node(X).",
    "% comment with \"quotes\" and \\ backslash",
    "tab\there",
    "unicode: λ → ∀ ü 日本",
    "",
    "{a, b(1)}",
    "control \u{1} \u{1f}",
];

fn text(rng: &mut StdRng) -> String {
    let n = rng.random_range(0..3);
    (0..n)
        .map(|_| *TEXT_POOL.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn identifier(rng: &mut StdRng) -> String {
    let first = (b'a' + rng.random_range(0..26)) as char;
    let tail: String = (0..rng.random_range(0..8))
        .map(|_| *b"abcxyz0189_-".choose(rng).unwrap() as char)
        .collect();
    format!("{first}{tail}")
}

pub fn option(rng: &mut StdRng) -> OptionEntry {
    let name: String = (0..rng.random_range(1..10))
        .map(|_| *b"abcAZ09_=/.:+-".choose(rng).unwrap() as char)
        .collect();
    let values = (0..rng.random_range(0..3)).map(|_| text(rng)).collect();
    OptionEntry { name, values }
}

fn id(rng: &mut StdRng) -> String {
    match rng.random_range(0..4) {
        0 => String::new(),
        1 => rng.random_range(0..10_000u32).to_string(),
        2 => format!("run-{}", identifier(rng)),
        _ => text(rng),
    }
}

pub fn run_request(rng: &mut StdRng) -> RunRequest {
    RunRequest {
        language: identifier(rng),
        engine: identifier(rng),
        options: (0..rng.random_range(0..4)).map(|_| option(rng)).collect(),
        sources: (0..rng.random_range(0..4)).map(|_| text(rng)).collect(),
    }
}

pub fn envelope(rng: &mut StdRng) -> Envelope {
    let message = match rng.random_range(0..7) {
        0 => Message::Run(run_request(rng)),
        1 => Message::Result(RunResult::new(text(rng), text(rng))),
        2 => Message::Problem(ProblemReport::new(
            *ProblemCode::ALL.choose(rng).unwrap(),
            format!("detail {}", text(rng)),
        )),
        3 => Message::ListEngines,
        4 => Message::Engines(EngineList {
            engines: (0..rng.random_range(0..3))
                .map(|_| EngineSummary {
                    language: identifier(rng),
                    engine: identifier(rng),
                    kind: if rng.random_bool(0.5) {
                        EngineKind::Builtin
                    } else {
                        EngineKind::External
                    },
                    allowed_options: (0..rng.random_range(0..3)).map(|_| option(rng).name).collect(),
                    default_timeout: rng.random_range(1..100),
                    max_timeout: rng.random_range(100..1000),
                })
                .collect(),
        }),
        5 => Message::Ping,
        _ => Message::Pong,
    };
    Envelope::new(id(rng), message)
}

pub fn workspace(rng: &mut StdRng) -> Workspace {
    let n_tabs = rng.random_range(0..6);
    let tabs = (0..n_tabs)
        .map(|i| Tab::new(format!("tab{i}.lp"), text(rng), rng.random_bool(0.6)))
        .collect();
    let mut layout = BTreeMap::new();
    for _ in 0..rng.random_range(0..3) {
        layout.insert(identifier(rng), text(rng));
    }
    Workspace {
        version: 1,
        tabs,
        settings: Settings {
            language: "asp".into(),
            engine: identifier(rng),
            options: (0..rng.random_range(0..3)).map(|_| option(rng)).collect(),
            auto_run: rng.random_bool(0.5),
            layout,
        },
        last_output: rng
            .random_bool(0.5)
            .then(|| RunResult::new(text(rng), text(rng))),
    }
}
