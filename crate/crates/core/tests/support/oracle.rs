//! Brute-force stable-model oracle, independent of the engine's grounder and
//! solver: full instantiation over the program's constants, then every subset
//! of the head atoms is tested against the reduct, and minimality is decided
//! by re-enumerating the subsets of each candidate.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use loide_core::asp::{CmpOp, Literal, Rule, Term};

pub type Model = BTreeSet<String>;

/// Integers before constants; integers numerically, constants bytewise.
fn compare(a: &Term, b: &Term) -> Ordering {
    match (a, b) {
        (Term::Int(x), Term::Int(y)) => x.cmp(y),
        (Term::Int(_), Term::Const(_)) => Ordering::Less,
        (Term::Const(_), Term::Int(_)) => Ordering::Greater,
        (Term::Const(x), Term::Const(y)) => x.as_bytes().cmp(y.as_bytes()),
        _ => panic!("comparison on unbound variable"),
    }
}

fn holds(op: CmpOp, a: &Term, b: &Term) -> bool {
    let ord = compare(a, b);
    match op {
        CmpOp::Eq => ord == Ordering::Equal,
        CmpOp::Ne => ord != Ordering::Equal,
        CmpOp::Lt => ord == Ordering::Less,
        CmpOp::Le => ord != Ordering::Greater,
        CmpOp::Gt => ord == Ordering::Greater,
        CmpOp::Ge => ord != Ordering::Less,
    }
}

fn show_term(t: &Term) -> String {
    match t {
        Term::Int(i) => i.to_string(),
        Term::Const(c) => c.clone(),
        Term::Var(v) => panic!("unbound variable {v}"),
    }
}

fn instantiate(t: &Term, env: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => env[v].clone(),
        other => other.clone(),
    }
}

fn show_atom(pred: &str, args: &[Term], env: &BTreeMap<String, Term>) -> String {
    if args.is_empty() {
        return pred.to_string();
    }
    let args: Vec<String> = args.iter().map(|a| show_term(&instantiate(a, env))).collect();
    format!("{pred}({})", args.join(","))
}

#[derive(Debug, Clone)]
struct Ground {
    head: Vec<String>,
    pos: Vec<String>,
    neg: Vec<String>,
}

fn full_instantiation(rules: &[Rule]) -> Vec<Ground> {
    let mut universe: BTreeSet<Term> = BTreeSet::new();
    let mut collect = |t: &Term| {
        if !matches!(t, Term::Var(_)) {
            universe.insert(t.clone());
        }
    };
    for r in rules {
        for a in &r.head {
            a.args.iter().for_each(&mut collect);
        }
        for l in &r.body {
            match l {
                Literal::Pos(a) | Literal::Neg(a) => a.args.iter().for_each(&mut collect),
                Literal::Cmp(c) => {
                    collect(&c.left);
                    collect(&c.right);
                }
            }
        }
    }
    let universe: Vec<Term> = universe.into_iter().collect();

    let mut out = Vec::new();
    for r in rules {
        let vars: Vec<String> = r
            .variables()
            .into_iter()
            .map(str::to_owned)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let total = universe.len().pow(vars.len() as u32);
        for mut code in 0..total {
            let mut env = BTreeMap::new();
            for v in &vars {
                env.insert(v.clone(), universe[code % universe.len()].clone());
                code /= universe.len();
            }
            let mut ok = true;
            let mut g = Ground {
                head: r.head.iter().map(|a| show_atom(&a.predicate, &a.args, &env)).collect(),
                pos: vec![],
                neg: vec![],
            };
            for l in &r.body {
                match l {
                    Literal::Pos(a) => g.pos.push(show_atom(&a.predicate, &a.args, &env)),
                    Literal::Neg(a) => g.neg.push(show_atom(&a.predicate, &a.args, &env)),
                    Literal::Cmp(c) => {
                        ok &= holds(c.op, &instantiate(&c.left, &env), &instantiate(&c.right, &env))
                    }
                }
            }
            if ok {
                out.push(g);
            }
            if vars.is_empty() {
                break;
            }
        }
    }
    out
}

struct MaskRule {
    head: u64,
    pos: u64,
    neg: u64,
}

fn is_model(rules: &[MaskRule], set: u64) -> bool {
    rules
        .iter()
        .all(|r| r.pos & !set != 0 || r.neg & set != 0 || r.head & set != 0)
}

/// Atoms in the head of some full instantiation; only these can be true.
pub fn herbrand_heads(rules: &[Rule]) -> BTreeSet<String> {
    full_instantiation(rules)
        .into_iter()
        .flat_map(|g| g.head)
        .collect()
}

/// All stable models, by definition.
pub fn stable_models(rules: &[Rule]) -> BTreeSet<Model> {
    let ground = full_instantiation(rules);
    let base: Vec<String> = ground
        .iter()
        .flat_map(|g| g.head.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    assert!(base.len() <= 20, "oracle base too large: {}", base.len());
    let bit = |a: &String| base.iter().position(|b| b == a).map(|i| 1u64 << i);
    let mut masks = Vec::new();
    for g in &ground {
        // A positive body atom outside the base is false: the rule never fires.
        if g.pos.iter().any(|a| bit(a).is_none()) {
            continue;
        }
        masks.push(MaskRule {
            head: g.head.iter().filter_map(bit).fold(0, |m, b| m | b),
            pos: g.pos.iter().filter_map(bit).fold(0, |m, b| m | b),
            neg: g.neg.iter().filter_map(bit).fold(0, |m, b| m | b),
        });
    }
    let mut models = BTreeSet::new();
    for candidate in 0u64..(1 << base.len()) {
        let reduct: Vec<MaskRule> = masks
            .iter()
            .filter(|r| r.neg & candidate == 0)
            .map(|r| MaskRule {
                head: r.head,
                pos: r.pos,
                neg: 0,
            })
            .collect();
        if !is_model(&reduct, candidate) {
            continue;
        }
        // Proper subsets of `candidate`, via the standard submask walk.
        let mut minimal = true;
        let mut sub = candidate;
        while sub != 0 {
            sub = (sub - 1) & candidate;
            if is_model(&reduct, sub) {
                minimal = false;
                break;
            }
        }
        if minimal {
            models.insert(
                (0..base.len())
                    .filter(|i| candidate & (1 << i) != 0)
                    .map(|i| base[i].clone())
                    .collect(),
            );
        }
    }
    models
}
