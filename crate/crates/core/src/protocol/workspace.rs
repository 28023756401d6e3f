use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{is_identifier, validate_options, OptionEntry, ProblemReport, RunResult};

pub const WORKSPACE_VERSION: u32 = 1;

/// Everything the IDE persists: editor tabs, run settings and the last
/// output shown.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    pub version: u32,
    #[serde(default)]
    pub tabs: Vec<Tab>,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub last_output: Option<RunResult>,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace {
            version: WORKSPACE_VERSION,
            tabs: Vec::new(),
            settings: Settings::default(),
            last_output: None,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Tab {
    pub name: String,
    #[serde(default)]
    pub text: String,
    #[serde(default = "default_true")]
    pub run_selected: bool,
}

fn default_true() -> bool {
    true
}

impl Tab {
    pub fn new(name: impl Into<String>, text: impl Into<String>, run_selected: bool) -> Self {
        Tab {
            name: name.into(),
            text: text.into(),
            run_selected,
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub language: String,
    pub engine: String,
    pub options: Vec<OptionEntry>,
    pub auto_run: bool,
    /// UI-owned keys (panel sizes, font size, theme...). Opaque here.
    pub layout: BTreeMap<String, String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            language: "asp".into(),
            engine: "builtin".into(),
            options: Vec::new(),
            auto_run: false,
            layout: BTreeMap::new(),
        }
    }
}

impl Workspace {
    /// Checks the invariants serde cannot express; the error names the first
    /// offending field.
    pub fn validate(&self) -> Result<(), String> {
        if self.version != WORKSPACE_VERSION {
            return Err(format!(
                "version: unsupported workspace version {}",
                self.version
            ));
        }
        let mut seen = HashSet::new();
        for (i, tab) in self.tabs.iter().enumerate() {
            if tab.name.is_empty() {
                return Err(format!("tabs[{i}].name: must not be empty"));
            }
            if !seen.insert(tab.name.as_str()) {
                return Err(format!("tabs[{i}].name: duplicate tab name {:?}", tab.name));
            }
        }
        if !is_identifier(&self.settings.language) {
            return Err(format!(
                "settings.language: invalid identifier {:?}",
                self.settings.language
            ));
        }
        if !is_identifier(&self.settings.engine) {
            return Err(format!(
                "settings.engine: invalid identifier {:?}",
                self.settings.engine
            ));
        }
        validate_options(&self.settings.options, "settings.options")
    }
}

/// Turns a parsed workspace document into a checked [`Workspace`].
pub fn validate_workspace(doc: &Value) -> Result<Workspace, ProblemReport> {
    let obj = doc
        .as_object()
        .ok_or_else(|| ProblemReport::malformed("workspace: expected a JSON object"))?;
    match obj.get("version") {
        None => return Err(ProblemReport::malformed("version: missing")),
        Some(v) if v.as_u64() != Some(u64::from(WORKSPACE_VERSION)) => {
            return Err(ProblemReport::malformed(format!(
                "version: unsupported workspace version {v}"
            )))
        }
        Some(_) => {}
    }
    let ws: Workspace = serde_json::from_value(doc.clone())
        .map_err(|e| ProblemReport::malformed(format!("workspace: {e}")))?;
    ws.validate().map_err(ProblemReport::malformed)?;
    Ok(ws)
}
