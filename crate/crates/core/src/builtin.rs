//! Runs a request on the built-in ASP engine.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::asp::{format_output, solve_text, Limits};
use crate::protocol::{OptionEntry, ProblemCode, ProblemReport, RunResult};

pub const FILTER_OPTION: &str = "filter";

/// Predicate names listed by `filter` options. Values may hold several
/// comma-separated names; `None` when no filter was given.
pub fn filter_from_options(options: &[OptionEntry]) -> Result<Option<BTreeSet<String>>, ProblemReport> {
    let mut filter: Option<BTreeSet<String>> = None;
    for option in options {
        if option.name != FILTER_OPTION {
            return Err(ProblemReport::new(
                ProblemCode::OptionRejected,
                format!("option {:?} is not understood by the builtin engine", option.name),
            ));
        }
        let names = filter.get_or_insert_with(BTreeSet::new);
        for name in option.values.iter().flat_map(|v| v.split(',')) {
            let name = name.trim();
            if !name.is_empty() {
                names.insert(name.to_owned());
            }
        }
    }
    Ok(filter)
}

/// Solves the composed program text. The model is the formatted answer-set
/// listing and the error text is always empty.
pub fn run_builtin(
    sources: &[String],
    options: &[OptionEntry],
    deadline: Option<Instant>,
) -> Result<RunResult, ProblemReport> {
    let filter = filter_from_options(options)?;
    let limits = Limits {
        deadline,
        ..Limits::default()
    };
    let sets = solve_text(&sources.join("\n"), &limits)?;
    Ok(RunResult::new(format_output(&sets, filter.as_ref()), ""))
}
