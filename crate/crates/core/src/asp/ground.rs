//! Bottom-up instantiation.
//!
//! The grounder first computes the atoms that can possibly be derived (the
//! least fixpoint of the program with negative literals ignored), then emits
//! each rule instance whose positive body atoms all lie in that set and whose
//! comparisons hold. Instances with an underivable positive body atom can
//! never fire, so dropping them leaves the answer sets unchanged.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::syntax::{Atom, Comparison, Rule, Term};
use super::{EngineError, Limits};

/// A variable-free rule with comparisons already evaluated away.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Vec<Atom>,
    pub pos: Vec<Atom>,
    pub neg: Vec<Atom>,
}

impl GroundRule {
    pub fn fact(atom: Atom) -> Self {
        GroundRule {
            head: vec![atom],
            pos: Vec::new(),
            neg: Vec::new(),
        }
    }
}

impl fmt::Display for GroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(ToString::to_string).collect();
        f.write_str(&head.join(" | "))?;
        let body: Vec<String> = self
            .pos
            .iter()
            .map(ToString::to_string)
            .chain(self.neg.iter().map(|a| format!("not {a}")))
            .collect();
        if !body.is_empty() {
            if head.is_empty() {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            f.write_str(&body.join(", "))?;
        } else if head.is_empty() {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

#[derive(Default)]
struct Relation {
    tuples: BTreeSet<Vec<Term>>,
    /// Tuples by (argument position, value).
    by_arg: HashMap<(usize, Term), BTreeSet<Vec<Term>>>,
}

#[derive(Default)]
struct AtomIndex {
    by_pred: HashMap<String, HashMap<usize, Relation>>,
    len: usize,
}

impl AtomIndex {
    fn insert(&mut self, atom: Atom) -> bool {
        let relation = self
            .by_pred
            .entry(atom.predicate)
            .or_default()
            .entry(atom.args.len())
            .or_default();
        if relation.tuples.contains(&atom.args) {
            return false;
        }
        for (pos, term) in atom.args.iter().enumerate() {
            relation
                .by_arg
                .entry((pos, term.clone()))
                .or_default()
                .insert(atom.args.clone());
        }
        relation.tuples.insert(atom.args);
        self.len += 1;
        true
    }

    fn relation(&self, atom: &Atom) -> Option<&Relation> {
        self.by_pred.get(&atom.predicate)?.get(&atom.args.len())
    }

    fn tuples(&self, atom: &Atom) -> Option<&BTreeSet<Vec<Term>>> {
        self.relation(atom).map(|r| &r.tuples)
    }

    /// Candidate tuples for `atom` under `binding`, narrowed by its first
    /// bound argument when there is one.
    fn candidates(&self, atom: &Atom, binding: &Binding) -> Option<&BTreeSet<Vec<Term>>> {
        let relation = self.relation(atom)?;
        let bound = atom
            .args
            .iter()
            .enumerate()
            .find_map(|(pos, t)| resolve(t, binding).map(|v| (pos, v)));
        match bound {
            Some(key) => relation.by_arg.get(&key),
            None => Some(&relation.tuples),
        }
    }
}

type Binding = Vec<(String, Term)>;

fn lookup<'b>(binding: &'b Binding, var: &str) -> Option<&'b Term> {
    binding.iter().rev().find(|(v, _)| v == var).map(|(_, t)| t)
}

fn resolve(term: &Term, binding: &Binding) -> Option<Term> {
    match term {
        Term::Var(v) => lookup(binding, v).cloned(),
        t => Some(t.clone()),
    }
}

fn substitute(atom: &Atom, binding: &Binding) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|t| resolve(t, binding).expect("safe rule binds every variable"))
            .collect(),
    }
}

/// `Some(false)` only once both sides are bound and the comparison fails.
fn comparison_holds(cmp: &Comparison, binding: &Binding) -> Option<bool> {
    let left = resolve(&cmp.left, binding)?;
    let right = resolve(&cmp.right, binding)?;
    Some(cmp.op.eval(&left, &right))
}

struct Matcher<'a> {
    index: &'a AtomIndex,
    /// Atoms first derived in the previous round, for semi-naive joins.
    delta: Option<&'a AtomIndex>,
    limits: &'a Limits,
    steps: u64,
}

impl Matcher<'_> {
    /// Calls `emit` for every binding of the rule's positive atoms against
    /// the index under which all comparisons hold. With `delta_at = Some(i)`
    /// only bindings where atom `i` is new and atoms before it are old count,
    /// so each binding that uses a new atom is found exactly once.
    fn each_binding(
        &mut self,
        rule: &Rule,
        delta_at: Option<usize>,
        emit: &mut dyn FnMut(&Binding) -> Result<(), EngineError>,
    ) -> Result<(), EngineError> {
        let positive: Vec<&Atom> = rule.positive_atoms().collect();
        let comparisons: Vec<&Comparison> = rule.comparisons().collect();
        let mut binding = Binding::new();
        self.descend(&positive, 0, delta_at, &comparisons, &mut binding, emit)
    }

    fn descend(
        &mut self,
        positive: &[&Atom],
        depth: usize,
        delta_at: Option<usize>,
        comparisons: &[&Comparison],
        binding: &mut Binding,
        emit: &mut dyn FnMut(&Binding) -> Result<(), EngineError>,
    ) -> Result<(), EngineError> {
        self.steps += 1;
        if self.steps.is_multiple_of(4096) {
            self.limits.check_deadline()?;
        }
        if comparisons
            .iter()
            .any(|c| comparison_holds(c, binding) == Some(false))
        {
            return Ok(());
        }
        let Some(atom) = positive.get(depth) else {
            return emit(binding);
        };
        let (source, skip) = match delta_at {
            Some(i) if i == depth => (self.delta.and_then(|d| d.candidates(atom, binding)), None),
            Some(i) if depth < i => (
                self.index.candidates(atom, binding),
                self.delta.and_then(|d| d.tuples(atom)),
            ),
            _ => (self.index.candidates(atom, binding), None),
        };
        let Some(tuples) = source else {
            return Ok(());
        };
        'tuples: for tuple in tuples {
            if skip.is_some_and(|s| s.contains(tuple)) {
                continue;
            }
            let mark = binding.len();
            for (pattern, value) in atom.args.iter().zip(tuple) {
                let ok = match pattern {
                    Term::Var(v) => match lookup(binding, v) {
                        Some(bound) => bound == value,
                        None => {
                            binding.push((v.clone(), value.clone()));
                            true
                        }
                    },
                    constant => constant == value,
                };
                if !ok {
                    binding.truncate(mark);
                    continue 'tuples;
                }
            }
            self.descend(positive, depth + 1, delta_at, comparisons, binding, emit)?;
            binding.truncate(mark);
        }
        Ok(())
    }
}

/// Instantiates a safe program. Fails with [`EngineError::GroundingLimit`]
/// once more than `limits.max_ground_rules` instances would be produced.
pub fn ground(rules: &[Rule], limits: &Limits) -> Result<Vec<GroundRule>, EngineError> {
    let rules_with_head: Vec<&Rule> = rules.iter().filter(|r| !r.head.is_empty()).collect();
    let mut index = AtomIndex::default();
    let mut delta: Option<AtomIndex> = None;
    loop {
        let mut derived = Vec::new();
        {
            let mut matcher = Matcher {
                index: &index,
                delta: delta.as_ref(),
                limits,
                steps: 0,
            };
            for rule in &rules_with_head {
                // First round: every rule once. Later rounds: only joins
                // touching an atom derived in the previous round.
                let positions: Vec<Option<usize>> = match &delta {
                    None => vec![None],
                    Some(d) => rule
                        .positive_atoms()
                        .enumerate()
                        .filter(|(_, a)| d.tuples(a).is_some())
                        .map(|(i, _)| Some(i))
                        .collect(),
                };
                for delta_at in positions {
                    matcher.each_binding(rule, delta_at, &mut |b| {
                        derived.extend(rule.head.iter().map(|h| substitute(h, b)));
                        if derived.len() > limits.max_ground_rules.saturating_mul(8) {
                            return Err(EngineError::GroundingLimit(limits.max_ground_rules));
                        }
                        Ok(())
                    })?;
                }
            }
        }
        let mut fresh = AtomIndex::default();
        for atom in derived {
            if index.insert(atom.clone()) {
                fresh.insert(atom);
            }
        }
        if fresh.len == 0 {
            break;
        }
        if index.len > limits.max_ground_rules {
            return Err(EngineError::GroundingLimit(limits.max_ground_rules));
        }
        delta = Some(fresh);
    }

    let mut out = Vec::new();
    let mut matcher = Matcher {
        index: &index,
        delta: None,
        limits,
        steps: 0,
    };
    for rule in rules {
        matcher.each_binding(rule, None, &mut |b| {
            if out.len() >= limits.max_ground_rules {
                return Err(EngineError::GroundingLimit(limits.max_ground_rules));
            }
            out.push(GroundRule {
                head: rule.head.iter().map(|a| substitute(a, b)).collect(),
                pos: rule.positive_atoms().map(|a| substitute(a, b)).collect(),
                neg: rule.negative_atoms().map(|a| substitute(a, b)).collect(),
            });
            Ok(())
        })?;
    }
    Ok(out)
}
