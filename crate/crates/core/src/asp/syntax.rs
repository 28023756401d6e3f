use std::fmt;

/// A term of the supported subset.
///
/// The derived ordering is the total order used by comparison literals and by
/// output sorting: integers come first and compare numerically, then
/// constants in byte-lexicographic order. Variables sort last but never
/// survive grounding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(i) => write!(f, "{i}"),
            Term::Const(c) | Term::Var(c) => f.write_str(c),
        }
    }
}

/// `predicate(args...)`. Predicates with the same name and different arity
/// are unrelated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn prop(predicate: impl Into<String>) -> Self {
        Self::new(predicate, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, arg) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{arg}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(self, left: &Term, right: &Term) -> bool {
        match self {
            CmpOp::Eq => left == right,
            CmpOp::Ne => left != right,
            CmpOp::Lt => left < right,
            CmpOp::Le => left <= right,
            CmpOp::Gt => left > right,
            CmpOp::Ge => left >= right,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub op: CmpOp,
    pub left: Term,
    pub right: Term,
}

impl Comparison {
    pub fn variables(&self) -> impl Iterator<Item = &str> {
        [&self.left, &self.right].into_iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

/// Body element. Comparisons only ever appear positively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Pos(Atom),
    Neg(Atom),
    Cmp(Comparison),
}

impl Literal {
    pub fn atom(&self) -> Option<&Atom> {
        match self {
            Literal::Pos(a) | Literal::Neg(a) => Some(a),
            Literal::Cmp(_) => None,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Pos(a) => write!(f, "{a}"),
            Literal::Neg(a) => write!(f, "not {a}"),
            Literal::Cmp(c) => write!(f, "{}{}{}", c.left, c.op.symbol(), c.right),
        }
    }
}

/// `h1 | ... | hn :- b1, ..., bm.` An empty head is a constraint, an empty
/// body a fact (or disjunctive fact).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn fact(atom: Atom) -> Self {
        Rule {
            head: vec![atom],
            body: Vec::new(),
        }
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_empty()
    }

    pub fn is_disjunctive(&self) -> bool {
        self.head.len() > 1
    }

    pub fn positive_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Pos(a) => Some(a),
            _ => None,
        })
    }

    pub fn negative_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.body.iter().filter_map(|l| match l {
            Literal::Neg(a) => Some(a),
            _ => None,
        })
    }

    pub fn comparisons(&self) -> impl Iterator<Item = &Comparison> {
        self.body.iter().filter_map(|l| match l {
            Literal::Cmp(c) => Some(c),
            _ => None,
        })
    }

    /// Every variable occurrence in head-then-body order, with repeats.
    pub fn variables(&self) -> Vec<&str> {
        let mut vars: Vec<&str> = self.head.iter().flat_map(Atom::variables).collect();
        for lit in &self.body {
            match lit {
                Literal::Pos(a) | Literal::Neg(a) => vars.extend(a.variables()),
                Literal::Cmp(c) => vars.extend(c.variables()),
            }
        }
        vars
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.body.is_empty() {
            if self.head.is_empty() {
                f.write_str(":- ")?;
            } else {
                f.write_str(" :- ")?;
            }
            for (i, l) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}")?;
            }
        } else if self.head.is_empty() {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integers_before_constants() {
        assert!(Term::Int(10) < Term::Int(11));
        assert!(Term::Int(-3) < Term::Int(2));
        assert!(Term::Int(1_000_000) < Term::constant("a"));
        assert!(Term::constant("a") < Term::constant("b"));
        assert!(Term::constant("b") < Term::constant("ba"));
        assert!(CmpOp::Lt.eval(&Term::Int(7), &Term::constant("g")));
        assert!(CmpOp::Ge.eval(&Term::constant("g"), &Term::Int(7)));
    }

    #[test]
    fn displays() {
        let a = Atom::new("col", vec![Term::Int(1), Term::constant("r")]);
        assert_eq!(a.to_string(), "col(1,r)");
        let r = Rule {
            head: vec![Atom::prop("a"), Atom::prop("b")],
            body: vec![
                Literal::Neg(Atom::prop("c")),
                Literal::Cmp(Comparison {
                    op: CmpOp::Ne,
                    left: Term::var("X"),
                    right: Term::Int(2),
                }),
            ],
        };
        assert_eq!(r.to_string(), "a | b :- not c, X!=2.");
        let c = Rule {
            head: vec![],
            body: vec![Literal::Pos(Atom::prop("a"))],
        };
        assert_eq!(c.to_string(), ":- a.");
    }
}
