//! Engine descriptors and the (language, engine) registry.
//!
//! A registry config file is a JSON list of descriptors:
//!
//! ```json
//! [
//!   {
//!     "language": "asp",
//!     "engine": "clingo",
//!     "kind": "external",
//!     "command": ["/usr/bin/clingo", "{options}", "{program}"],
//!     "allowed_options": ["-n", "--models=*", "--project"],
//!     "default_timeout": 20,
//!     "max_timeout": 120
//!   }
//! ]
//! ```
//!
//! `{program}` is replaced by the path of the temporary program file and
//! `{options}` by the request's option arguments (each name followed by its
//! values). Without an `{options}` slot, options go right after the
//! executable. The program path is also exported to the engine process as
//! `LOIDE_PROGRAM`, so a template may omit `{program}` entirely. Option
//! names are matched against `allowed_options`, where `*` matches any run
//! of characters.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, RwLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::protocol::{
    is_identifier, is_option_name, EngineKind, EngineSummary, OptionEntry, ProblemCode,
    ProblemReport, RunRequest,
};

pub const PROGRAM_PLACEHOLDER: &str = "{program}";
pub const OPTIONS_PLACEHOLDER: &str = "{options}";
/// Option name reserved for per-request timeouts, in seconds.
pub const TIMEOUT_OPTION: &str = "timeout";
pub const DEFAULT_TIMEOUT_SECS: u64 = 20;
pub const DEFAULT_MAX_TIMEOUT_SECS: u64 = 120;

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_SECS
}

fn default_max_timeout() -> u64 {
    DEFAULT_MAX_TIMEOUT_SECS
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EngineDescriptor {
    pub language: String,
    pub engine: String,
    pub kind: EngineKind,
    /// Executable followed by argument templates; empty for builtin engines.
    #[serde(default)]
    pub command: Vec<String>,
    #[serde(default)]
    pub allowed_options: Vec<String>,
    #[serde(default = "default_timeout")]
    pub default_timeout: u64,
    #[serde(default = "default_max_timeout")]
    pub max_timeout: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("invalid engine descriptor {language}/{engine}: {reason}")]
    InvalidDescriptor {
        language: String,
        engine: String,
        reason: String,
    },
    #[error("cannot read engines file {path}: {reason}")]
    Config { path: String, reason: String },
}

impl EngineDescriptor {
    /// The always-present reference ASP engine.
    pub fn builtin_asp() -> Self {
        EngineDescriptor {
            language: "asp".into(),
            engine: "builtin".into(),
            kind: EngineKind::Builtin,
            command: Vec::new(),
            allowed_options: vec!["filter".into()],
            default_timeout: DEFAULT_TIMEOUT_SECS,
            max_timeout: DEFAULT_MAX_TIMEOUT_SECS,
        }
    }

    pub fn external(
        language: impl Into<String>,
        engine: impl Into<String>,
        command: Vec<String>,
    ) -> Self {
        EngineDescriptor {
            language: language.into(),
            engine: engine.into(),
            kind: EngineKind::External,
            command,
            allowed_options: Vec::new(),
            default_timeout: DEFAULT_TIMEOUT_SECS,
            max_timeout: DEFAULT_MAX_TIMEOUT_SECS,
        }
    }

    pub fn validate(&self) -> Result<(), RegistryError> {
        let invalid = |reason: String| RegistryError::InvalidDescriptor {
            language: self.language.clone(),
            engine: self.engine.clone(),
            reason,
        };
        if !is_identifier(&self.language) || !is_identifier(&self.engine) {
            return Err(invalid("language and engine must match [a-z][a-z0-9_-]*".into()));
        }
        match self.kind {
            EngineKind::External => {
                let Some(exe) = self.command.first() else {
                    return Err(invalid("external engine needs a command template".into()));
                };
                if exe.is_empty() || exe.contains('{') {
                    return Err(invalid(format!("bad executable {exe:?}")));
                }
                if self.command.iter().filter(|a| *a == OPTIONS_PLACEHOLDER).count() > 1 {
                    return Err(invalid(format!("{OPTIONS_PLACEHOLDER} may appear once")));
                }
            }
            EngineKind::Builtin => {
                if !self.command.is_empty() {
                    return Err(invalid("builtin engines take no command".into()));
                }
            }
        }
        for pattern in &self.allowed_options {
            if !is_option_name(&pattern.replace('*', "x")) {
                return Err(invalid(format!("bad option pattern {pattern:?}")));
            }
        }
        if self.default_timeout == 0 || self.default_timeout > self.max_timeout {
            return Err(invalid("need 0 < default_timeout <= max_timeout".into()));
        }
        Ok(())
    }

    pub fn summary(&self) -> EngineSummary {
        EngineSummary {
            language: self.language.clone(),
            engine: self.engine.clone(),
            kind: self.kind,
            allowed_options: self.allowed_options.clone(),
            default_timeout: self.default_timeout,
            max_timeout: self.max_timeout,
        }
    }

    pub fn allows_option(&self, name: &str) -> bool {
        self.allowed_options.iter().any(|p| glob_match(p, name))
    }

    /// Argument vector for an external run.
    pub fn command_line(&self, program: &Path, options: &[OptionEntry]) -> Vec<String> {
        let option_args: Vec<String> = options
            .iter()
            .flat_map(|o| std::iter::once(o.name.clone()).chain(o.values.iter().cloned()))
            .collect();
        let program = program.to_string_lossy();
        let mut argv = Vec::with_capacity(self.command.len() + option_args.len());
        let has_slot = self.command.iter().any(|a| a == OPTIONS_PLACEHOLDER);
        for (i, arg) in self.command.iter().enumerate() {
            if arg == OPTIONS_PLACEHOLDER {
                argv.extend(option_args.iter().cloned());
                continue;
            }
            argv.push(arg.replace(PROGRAM_PLACEHOLDER, &program));
            if i == 0 && !has_slot {
                argv.extend(option_args.iter().cloned());
            }
        }
        argv
    }
}

/// `*` matches any (possibly empty) run of characters; everything else is
/// literal.
pub fn glob_match(pattern: &str, text: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let t: Vec<char> = text.chars().collect();
    let (mut pi, mut ti) = (0, 0);
    let mut backtrack: Option<(usize, usize)> = None;
    while ti < t.len() {
        if pi < p.len() && p[pi] == '*' {
            backtrack = Some((pi, ti));
            pi += 1;
        } else if pi < p.len() && p[pi] == t[ti] {
            pi += 1;
            ti += 1;
        } else if let Some((bp, bt)) = backtrack {
            pi = bp + 1;
            ti = bt + 1;
            backtrack = Some((bp, bt + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

/// What the executor needs to run an accepted request.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub descriptor: Arc<EngineDescriptor>,
    pub timeout: Duration,
    /// Request options minus the reserved timeout option.
    pub options: Vec<OptionEntry>,
}

fn parse_timeout(option: &OptionEntry) -> Option<Result<f64, ProblemReport>> {
    let raw = if option.name == TIMEOUT_OPTION {
        match option.values.as_slice() {
            [v] => v.as_str(),
            _ => {
                return Some(Err(ProblemReport::new(
                    ProblemCode::OptionRejected,
                    "timeout: expected exactly one value (seconds)",
                )))
            }
        }
    } else {
        option.name.strip_prefix("timeout=")?
    };
    Some(match raw.parse::<f64>() {
        Ok(secs) if secs.is_finite() && secs > 0.0 => Ok(secs),
        _ => Err(ProblemReport::new(
            ProblemCode::OptionRejected,
            format!("timeout: invalid number of seconds {raw:?}"),
        )),
    })
}

/// Option values are passed as separate arguments; a value that looks like a
/// flag would smuggle in an option the whitelist never saw.
fn value_is_safe(value: &str) -> bool {
    !value.starts_with('-') || value.parse::<f64>().is_ok()
}

#[derive(Debug, Default)]
pub struct Registry {
    entries: RwLock<BTreeMap<(String, String), Arc<EngineDescriptor>>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry::default()
    }

    /// A registry holding only the built-in ASP engine.
    pub fn with_builtin() -> Self {
        let registry = Registry::empty();
        registry
            .register(EngineDescriptor::builtin_asp())
            .expect("builtin descriptor is valid");
        registry
    }

    /// Built-in engine plus every descriptor in a JSON config file.
    pub fn from_file(path: &Path) -> Result<Self, RegistryError> {
        let config_err = |reason: String| RegistryError::Config {
            path: path.display().to_string(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| config_err(e.to_string()))?;
        let descriptors: Vec<EngineDescriptor> =
            serde_json::from_str(&text).map_err(|e| config_err(e.to_string()))?;
        let registry = Registry::with_builtin();
        for d in descriptors {
            registry.register(d)?;
        }
        Ok(registry)
    }

    /// Adds or atomically replaces the entry for (language, engine).
    pub fn register(&self, descriptor: EngineDescriptor) -> Result<(), RegistryError> {
        descriptor.validate()?;
        let key = (descriptor.language.clone(), descriptor.engine.clone());
        self.entries
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, Arc::new(descriptor));
        Ok(())
    }

    pub fn lookup(&self, language: &str, engine: &str) -> Result<Arc<EngineDescriptor>, ProblemReport> {
        let entries = self.entries.read().unwrap_or_else(|e| e.into_inner());
        if let Some(d) = entries.get(&(language.to_owned(), engine.to_owned())) {
            return Ok(Arc::clone(d));
        }
        if entries.keys().any(|(l, _)| l == language) {
            Err(ProblemReport::new(
                ProblemCode::UnknownEngine,
                format!("no engine {engine:?} for language {language:?}"),
            ))
        } else {
            Err(ProblemReport::new(
                ProblemCode::UnknownLanguage,
                format!("no engine registered for language {language:?}"),
            ))
        }
    }

    /// Sorted by language, then engine. Command templates are not included.
    pub fn snapshot(&self) -> Vec<EngineSummary> {
        self.entries
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .values()
            .map(|d| d.summary())
            .collect()
    }

    /// Resolves the engine, enforces the option whitelist and settles the
    /// timeout for a request.
    pub fn plan(&self, request: &RunRequest) -> Result<RunPlan, ProblemReport> {
        let descriptor = self.lookup(&request.language, &request.engine)?;
        let mut timeout_secs = descriptor.default_timeout as f64;
        let mut options = Vec::new();
        for option in &request.options {
            if let Some(secs) = parse_timeout(option) {
                timeout_secs = secs?.min(descriptor.max_timeout as f64);
                continue;
            }
            if !is_option_name(&option.name) || !descriptor.allows_option(&option.name) {
                return Err(ProblemReport::new(
                    ProblemCode::OptionRejected,
                    format!(
                        "option {:?} is not allowed for {}/{}",
                        option.name, descriptor.language, descriptor.engine
                    ),
                ));
            }
            if descriptor.kind == EngineKind::External {
                if let Some(bad) = option.values.iter().find(|v| !value_is_safe(v)) {
                    return Err(ProblemReport::new(
                        ProblemCode::OptionRejected,
                        format!("option {:?}: value {bad:?} looks like a flag", option.name),
                    ));
                }
            }
            options.push(option.clone());
        }
        Ok(RunPlan {
            descriptor,
            timeout: Duration::from_secs_f64(timeout_secs),
            options,
        })
    }
}
