//! Stable-model enumeration over a ground program.
//!
//! The search assigns truth values atom by atom and propagates after every
//! decision:
//!
//! * a rule whose body is true and whose head atoms are all false but one
//!   forces that head atom (a constraint with a true body is a conflict);
//! * a rule whose head is false and whose body has a single undecided
//!   literal forces that literal false;
//! * an atom with no rule able to support it (body not false, no other head
//!   atom true) is false.
//!
//! Each complete assignment is then a supported model `M`; it is kept when
//! no proper subset of `M` is a model of the reduct of the program with
//! respect to `M`. When every reduct rule has at most one head atom inside
//! `M` that check is a least-model computation; otherwise a second search
//! looks for a strictly smaller model.

use std::collections::{BTreeSet, HashMap};

use super::ground::GroundRule;
use super::syntax::Atom;
use super::{AnswerSet, EngineError, Limits};

/// Gelfond-Lifschitz reduct: drop every rule with a negative literal whose
/// atom is in `candidate`, then drop the remaining negative literals.
pub fn reduct(rules: &[GroundRule], candidate: &BTreeSet<Atom>) -> Vec<GroundRule> {
    rules
        .iter()
        .filter(|r| !r.neg.iter().any(|a| candidate.contains(a)))
        .map(|r| GroundRule {
            head: r.head.clone(),
            pos: r.pos.clone(),
            neg: Vec::new(),
        })
        .collect()
}

fn satisfies(rules: &[GroundRule], set: &BTreeSet<Atom>) -> bool {
    rules.iter().all(|r| {
        !r.pos.iter().all(|a| set.contains(a))
            || r.neg.iter().any(|a| set.contains(a))
            || r.head.iter().any(|a| set.contains(a))
    })
}

/// True iff `candidate` is a minimal model of the reduct of `rules` with
/// respect to `candidate`. Minimality is decided by enumerating the subsets
/// of `candidate` that keep every reduct fact, so this is exponential in the
/// number of non-fact atoms and meant for small programs and test oracles.
pub fn is_stable(rules: &[GroundRule], candidate: &BTreeSet<Atom>) -> bool {
    let reduced = reduct(rules, candidate);
    if !satisfies(&reduced, candidate) {
        return false;
    }
    let facts: BTreeSet<&Atom> = reduced
        .iter()
        .filter(|r| r.pos.is_empty() && r.head.len() == 1)
        .map(|r| &r.head[0])
        .collect();
    let free: Vec<&Atom> = candidate.iter().filter(|a| !facts.contains(a)).collect();
    assert!(
        free.len() < 64,
        "is_stable enumerates subsets; candidate has {} free atoms",
        free.len()
    );
    let full = (1u64 << free.len()) - 1;
    for mask in 0..full {
        let subset: BTreeSet<Atom> = facts
            .iter()
            .map(|a| (*a).clone())
            .chain(
                free.iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| (*a).clone()),
            )
            .collect();
        if satisfies(&reduced, &subset) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Value {
    Unknown,
    True,
    False,
}

#[derive(Clone, Debug)]
struct IRule {
    head: Vec<usize>,
    pos: Vec<usize>,
    neg: Vec<usize>,
}

/// A ground program over interned atoms.
struct Interned {
    atoms: Vec<Atom>,
    rules: Vec<IRule>,
}

impl Interned {
    fn new(ground: &[GroundRule]) -> Self {
        fn intern<'g>(
            list: &'g [Atom],
            ids: &mut HashMap<&'g Atom, usize>,
            atoms: &mut Vec<Atom>,
        ) -> Vec<usize> {
            let mut out: Vec<usize> = list
                .iter()
                .map(|a| {
                    *ids.entry(a).or_insert_with(|| {
                        atoms.push(a.clone());
                        atoms.len() - 1
                    })
                })
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        }
        let mut ids = HashMap::new();
        let mut atoms = Vec::new();
        let rules = ground
            .iter()
            .map(|r| IRule {
                head: intern(&r.head, &mut ids, &mut atoms),
                pos: intern(&r.pos, &mut ids, &mut atoms),
                neg: intern(&r.neg, &mut ids, &mut atoms),
            })
            .collect();
        Interned { atoms, rules }
    }
}

enum Flow {
    Continue,
    Stop,
}

/// Backtracking model search over a fixed rule set.
struct Search<'a> {
    rules: &'a [IRule],
    /// rules in which each atom occurs in the head.
    heads_of: Vec<Vec<usize>>,
    values: Vec<Value>,
    trail: Vec<usize>,
    support: bool,
    limits: &'a Limits,
    nodes: u64,
}

impl<'a> Search<'a> {
    fn new(rules: &'a [IRule], atom_count: usize, support: bool, limits: &'a Limits) -> Self {
        let mut heads_of = vec![Vec::new(); atom_count];
        for (i, r) in rules.iter().enumerate() {
            for &h in &r.head {
                heads_of[h].push(i);
            }
        }
        Search {
            rules,
            heads_of,
            values: vec![Value::Unknown; atom_count],
            trail: Vec::new(),
            support,
            limits,
            nodes: 0,
        }
    }

    fn assign(&mut self, atom: usize, value: Value) -> bool {
        match self.values[atom] {
            Value::Unknown => {
                self.values[atom] = value;
                self.trail.push(atom);
                true
            }
            current => current == value,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let atom = self.trail.pop().unwrap();
            self.values[atom] = Value::Unknown;
        }
    }

    fn body_false(&self, r: &IRule) -> bool {
        r.pos.iter().any(|&a| self.values[a] == Value::False)
            || r.neg.iter().any(|&a| self.values[a] == Value::True)
    }

    /// Runs all propagation rules to a fixpoint. Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mark = self.trail.len();
            for r in self.rules {
                if self.body_false(r) || r.head.iter().any(|&h| self.values[h] == Value::True) {
                    continue;
                }
                let open_heads: Vec<usize> = r
                    .head
                    .iter()
                    .copied()
                    .filter(|&h| self.values[h] == Value::Unknown)
                    .collect();
                let open_pos = r.pos.iter().copied().filter(|&a| self.values[a] == Value::Unknown);
                let open_neg = r.neg.iter().copied().filter(|&a| self.values[a] == Value::Unknown);
                let open_body: Vec<(usize, bool)> = open_pos
                    .map(|a| (a, true))
                    .chain(open_neg.map(|a| (a, false)))
                    .collect();
                match (open_body.len(), open_heads.len()) {
                    (0, 0) => return false,
                    (0, 1) => {
                        self.assign(open_heads[0], Value::True);
                    }
                    (1, 0) => {
                        let (atom, positive) = open_body[0];
                        let value = if positive { Value::False } else { Value::True };
                        if !self.assign(atom, value) {
                            return false;
                        }
                    }
                    _ => {}
                }
            }
            if self.support {
                for atom in 0..self.values.len() {
                    if self.values[atom] == Value::False {
                        continue;
                    }
                    let supported = self.heads_of[atom].iter().any(|&ri| {
                        let r = &self.rules[ri];
                        !self.body_false(r)
                            && r.head
                                .iter()
                                .all(|&h| h == atom || self.values[h] != Value::True)
                    });
                    if !supported {
                        if self.values[atom] == Value::True {
                            return false;
                        }
                        self.assign(atom, Value::False);
                    }
                }
            }
            if self.trail.len() == mark {
                return true;
            }
        }
    }

    /// Depth-first enumeration of total assignments; `leaf` decides whether
    /// to keep going.
    fn run(
        &mut self,
        leaf: &mut dyn FnMut(&[Value]) -> Result<Flow, EngineError>,
    ) -> Result<Flow, EngineError> {
        self.nodes += 1;
        if self.nodes % 1024 == 1 {
            self.limits.check_deadline()?;
        }
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo_to(mark);
            return Ok(Flow::Continue);
        }
        let Some(branch) = self.values.iter().position(|v| *v == Value::Unknown) else {
            let flow = leaf(&self.values)?;
            self.undo_to(mark);
            return Ok(flow);
        };
        for value in [Value::False, Value::True] {
            let inner = self.trail.len();
            self.assign(branch, value);
            if let Flow::Stop = self.run(leaf)? {
                self.undo_to(mark);
                return Ok(Flow::Stop);
            }
            self.undo_to(inner);
        }
        self.undo_to(mark);
        Ok(Flow::Continue)
    }
}

/// Is `model` (a total model of the program) minimal for its reduct?
fn is_minimal(program: &Interned, model: &[bool], limits: &Limits) -> Result<bool, EngineError> {
    // Reduct restricted to `model`: rules surviving the reduct with their
    // body inside the model, heads cut down to the model.
    let mut shifted: Vec<IRule> = Vec::new();
    for r in &program.rules {
        if r.neg.iter().any(|&a| model[a]) || !r.pos.iter().all(|&a| model[a]) {
            continue;
        }
        shifted.push(IRule {
            head: r.head.iter().copied().filter(|&h| model[h]).collect(),
            pos: r.pos.clone(),
            neg: Vec::new(),
        });
    }

    if shifted.iter().all(|r| r.head.len() <= 1) {
        // Least model of the definite part; constraints are already
        // satisfied by every subset of a model.
        let mut least = vec![false; model.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for r in &shifted {
                if let [h] = r.head[..] {
                    if !least[h] && r.pos.iter().all(|&a| least[a]) {
                        least[h] = true;
                        changed = true;
                    }
                }
            }
        }
        return Ok(least == model);
    }

    // Search for a model N with N strictly inside `model`.
    let inside: Vec<usize> = (0..model.len()).filter(|&a| model[a]).collect();
    shifted.push(IRule {
        head: Vec::new(),
        pos: inside,
        neg: Vec::new(),
    });
    let mut search = Search::new(&shifted, model.len(), false, limits);
    for (atom, &in_model) in model.iter().enumerate() {
        if !in_model {
            search.assign(atom, Value::False);
        }
    }
    let mut smaller = false;
    search.run(&mut |_| {
        smaller = true;
        Ok(Flow::Stop)
    })?;
    Ok(!smaller)
}

/// All stable models of a ground program, sorted. More than
/// `limits.max_answer_sets` models is an error, never a truncation.
pub fn enumerate_ground(ground: &[GroundRule], limits: &Limits) -> Result<Vec<AnswerSet>, EngineError> {
    let program = Interned::new(ground);
    let mut found: Vec<AnswerSet> = Vec::new();
    let mut search = Search::new(&program.rules, program.atoms.len(), true, limits);
    search.run(&mut |values| {
        let model: Vec<bool> = values.iter().map(|v| *v == Value::True).collect();
        if is_minimal(&program, &model, limits)? {
            if found.len() == limits.max_answer_sets {
                return Err(EngineError::AnswerSetLimit(limits.max_answer_sets));
            }
            found.push(AnswerSet::new(
                model
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| **t)
                    .map(|(i, _)| program.atoms[i].clone()),
            ));
        }
        Ok(Flow::Continue)
    })?;
    found.sort();
    Ok(found)
}
