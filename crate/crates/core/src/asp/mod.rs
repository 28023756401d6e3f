//! Built-in reference engine for a ground-and-solve ASP subset: normal and
//! disjunctive rules, negation as failure, constraints, comparison builtins
//! over integers and constants.
//!
//! The pipeline is [`parse`] → [`safety_check`] → [`ground`] →
//! [`enumerate_answer_sets`] → [`format_output`]; [`solve_text`] runs all of
//! it. Results are deterministic: atoms inside an answer set are sorted by
//! predicate name then arguments, and answer sets are sorted as atom lists.

mod ground;
mod parser;
mod safety;
mod solve;
mod syntax;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use crate::protocol::{ProblemCode, ProblemReport};

pub use ground::{ground, GroundRule};
pub use parser::{parse, ParseError};
pub use safety::{safety_check, SafetyError};
pub use solve::{enumerate_ground, is_stable, reduct};
pub use syntax::{Atom, CmpOp, Comparison, Literal, Rule, Term};

pub const DEFAULT_MAX_GROUND_RULES: usize = 100_000;
pub const DEFAULT_MAX_ANSWER_SETS: usize = 1000;

/// Resource guards for one solve.
#[derive(Debug, Clone)]
pub struct Limits {
    pub max_ground_rules: usize,
    pub max_answer_sets: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ground_rules: DEFAULT_MAX_GROUND_RULES,
            max_answer_sets: DEFAULT_MAX_ANSWER_SETS,
            deadline: None,
        }
    }
}

impl Limits {
    pub fn with_deadline(mut self, deadline: Instant) -> Self {
        self.deadline = Some(deadline);
        self
    }

    pub(crate) fn check_deadline(&self) -> Result<(), EngineError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(EngineError::Timeout),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("unsafe rule: {0}")]
    Safety(#[from] SafetyError),
    #[error("grounding produced more than {0} rule instances")]
    GroundingLimit(usize),
    #[error("program has more than {0} answer sets")]
    AnswerSetLimit(usize),
    #[error("solving exceeded its deadline")]
    Timeout,
}

impl From<EngineError> for ProblemReport {
    fn from(err: EngineError) -> Self {
        let code = match err {
            EngineError::Parse(_) => ProblemCode::ParseError,
            EngineError::Safety(_) => ProblemCode::SafetyError,
            EngineError::GroundingLimit(_) | EngineError::AnswerSetLimit(_) => {
                ProblemCode::EngineFailure
            }
            EngineError::Timeout => ProblemCode::Timeout,
        };
        // The code already names the category; keep the detail specific.
        let detail = match &err {
            EngineError::Parse(e) => e.to_string(),
            EngineError::Safety(e) => e.to_string(),
            _ => err.to_string(),
        };
        ProblemReport::new(code, detail)
    }
}

/// A stable model: a set of ground atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AnswerSet {
    atoms: BTreeSet<Atom>,
}

impl AnswerSet {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        AnswerSet {
            atoms: atoms.into_iter().collect(),
        }
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn into_atoms(self) -> BTreeSet<Atom> {
        self.atoms
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl FromIterator<Atom> for AnswerSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AnswerSet::new(iter)
    }
}

/// Grounds and solves a safe program.
pub fn enumerate_answer_sets(rules: &[Rule], limits: &Limits) -> Result<Vec<AnswerSet>, EngineError> {
    let ground = ground(rules, limits)?;
    enumerate_ground(&ground, limits)
}

/// Text → sorted answer sets, with parse and safety errors reported.
pub fn solve_text(text: &str, limits: &Limits) -> Result<Vec<AnswerSet>, EngineError> {
    let rules = parse(text)?;
    safety_check(&rules)?;
    enumerate_answer_sets(&rules, limits)
}

/// Renders answer sets the way the built-in engine reports them:
///
/// ```text
/// Answer set 1
/// {a, p(1)}
/// ```
///
/// with no trailing newline, or `INCOHERENT` when there is none. With a
/// filter, only atoms whose predicate name is listed are printed.
pub fn format_output(sets: &[AnswerSet], filter: Option<&BTreeSet<String>>) -> String {
    if sets.is_empty() {
        return "INCOHERENT".to_owned();
    }
    let mut out = String::new();
    for (i, set) in sets.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "Answer set {}\n{{", i + 1);
        let shown = set
            .atoms
            .iter()
            .filter(|a| filter.is_none_or(|f| f.contains(&a.predicate)));
        for (j, atom) in shown.enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "{atom}");
        }
        out.push('}');
    }
    out
}
