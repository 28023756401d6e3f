use std::path::PathBuf;

use loide_core::{EngineKind, Registry};

#[test]
fn example_config_loads() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../config/engines.example.json");
    let registry = Registry::from_file(&path).unwrap();
    let engines: Vec<(String, String, EngineKind)> = registry
        .snapshot()
        .into_iter()
        .map(|e| (e.language, e.engine, e.kind))
        .collect();
    assert_eq!(
        engines,
        [
            ("asp".into(), "builtin".into(), EngineKind::Builtin),
            ("asp".into(), "clingo".into(), EngineKind::External),
            ("asp".into(), "dlv2".into(), EngineKind::External),
            ("prolog".into(), "swipl".into(), EngineKind::External),
        ]
    );
}
