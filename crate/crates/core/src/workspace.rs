//! Composition of run requests from editor tabs, and workspace files.

use crate::protocol::{validate_workspace, ProblemReport, RunRequest, Workspace};

/// Sources are the texts of run-selected tabs in tab order; language, engine
/// and options come from the settings.
pub fn compose_request(ws: &Workspace) -> RunRequest {
    RunRequest {
        language: ws.settings.language.clone(),
        engine: ws.settings.engine.clone(),
        options: ws.settings.options.clone(),
        sources: ws
            .tabs
            .iter()
            .filter(|t| t.run_selected)
            .map(|t| t.text.clone())
            .collect(),
    }
}

/// Pretty-printed JSON, the format the IDE downloads.
pub fn export_workspace(ws: &Workspace) -> Vec<u8> {
    serde_json::to_vec_pretty(ws).expect("workspace always serializes")
}

pub fn import_workspace(bytes: &[u8]) -> Result<Workspace, ProblemReport> {
    let doc: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| ProblemReport::malformed(format!("workspace: {e}")))?;
    validate_workspace(&doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{OptionEntry, ProblemCode, RunResult, Tab};

    fn ws(tabs: &[(&str, &str, bool)]) -> Workspace {
        Workspace {
            tabs: tabs.iter().map(|(n, t, s)| Tab::new(*n, *t, *s)).collect(),
            ..Workspace::default()
        }
    }

    #[test]
    fn nothing_selected() {
        let w = ws(&[("a", "a.", false), ("b", "b.", false)]);
        assert!(compose_request(&w).sources.is_empty());
    }

    #[test]
    fn tab_order_and_selection() {
        let mut w = ws(&[("A", "x.", true), ("B", "y.", false), ("C", "z.", true)]);
        w.settings.options.push(OptionEntry::new("filter", vec!["x".into()]));
        let req = compose_request(&w);
        assert_eq!(req.sources, ["x.", "z."]);
        assert_eq!(req.language, "asp");
        assert_eq!(req.engine, "builtin");
        assert_eq!(req.options, w.settings.options);
    }

    #[test]
    fn export_keeps_last_output() {
        let mut w = ws(&[("main", "a.", true)]);
        w.last_output = Some(RunResult::new("Answer set 1\n{a}", ""));
        let bytes = export_workspace(&w);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("last_output"));
        assert_eq!(import_workspace(&bytes).unwrap(), w);
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let err = import_workspace(br#"{"version":2,"tabs":[],"settings":{}}"#).unwrap_err();
        assert_eq!(err.code, ProblemCode::MalformedMessage);
        assert!(import_workspace(b"{not json").is_err());
    }
}
