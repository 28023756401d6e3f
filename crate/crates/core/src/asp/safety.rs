use std::collections::HashSet;

use super::syntax::Rule;

/// First unsafe variable found. `rule` is the 1-based position of the
/// offending statement in the program.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("rule {rule} (`{text}`): variable {variable} does not occur in a positive body atom")]
pub struct SafetyError {
    pub rule: usize,
    pub variable: String,
    pub text: String,
}

/// Every variable of a rule must occur in some positive, non-comparison body
/// atom.
pub fn safety_check(rules: &[Rule]) -> Result<(), SafetyError> {
    for (i, rule) in rules.iter().enumerate() {
        let bound: HashSet<&str> = rule.positive_atoms().flat_map(|a| a.variables()).collect();
        if let Some(var) = rule.variables().into_iter().find(|v| !bound.contains(v)) {
            return Err(SafetyError {
                rule: i + 1,
                variable: var.to_owned(),
                text: rule.to_string(),
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::parse;

    fn check(text: &str) -> Result<(), SafetyError> {
        safety_check(&parse(text).unwrap())
    }

    #[test]
    fn unsafe_fact() {
        let err = check("p(X).").unwrap_err();
        assert_eq!(err.variable, "X");
        assert_eq!(err.rule, 1);
    }

    #[test]
    fn positive_binding_is_safe() {
        assert!(check("p(X) :- q(X).").is_ok());
        assert!(check("p(X) :- not q(X), r(X).").is_ok());
        assert!(check("p(X) :- q(X), X < Y, r(Y).").is_ok());
    }

    #[test]
    fn naf_and_comparisons_do_not_bind() {
        assert_eq!(check("p(X) :- not q(X).").unwrap_err().variable, "X");
        assert_eq!(check("a. p :- q(X), Y > X.").unwrap_err().rule, 2);
        assert_eq!(check(":- q(X), not r(X, Z).").unwrap_err().variable, "Z");
        assert_eq!(check("p(X) :- X = 1.").unwrap_err().variable, "X");
    }
}
