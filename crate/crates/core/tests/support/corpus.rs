//! Seeded generator of small normal/disjunctive programs with at most ten
//! possible ground atoms and at most fifteen rules.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

fn propositional(rng: &mut StdRng) -> String {
    let n_atoms = rng.random_range(1..=10);
    let atoms: Vec<String> = (0..n_atoms).map(|i| format!("a{i}")).collect();
    let n_rules = rng.random_range(1..=15);
    let mut out = Vec::new();
    for _ in 0..n_rules {
        let head_len = match rng.random_range(0..100) {
            0..10 => 0,
            10..72 => 1,
            72..92 => 2,
            _ => 3,
        };
        let head: Vec<&str> = atoms
            .choose_multiple(rng, head_len)
            .map(String::as_str)
            .collect();
        let n_pos = rng.random_range(0..=2);
        let n_neg = rng.random_range(0..=2);
        let mut body: Vec<String> = (0..n_pos)
            .map(|_| atoms.choose(rng).unwrap().clone())
            .collect();
        body.extend((0..n_neg).map(|_| format!("not {}", atoms.choose(rng).unwrap())));
        if head.is_empty() && body.is_empty() {
            body.push(atoms.choose(rng).unwrap().clone());
        }
        out.push(render(&head, &body));
    }
    out.join("\n")
}

fn render(head: &[&str], body: &[String]) -> String {
    let head = head.join(" | ");
    if body.is_empty() {
        format!("{head}.")
    } else if head.is_empty() {
        format!(":- {}.", body.join(", "))
    } else {
        format!("{head} :- {}.", body.join(", "))
    }
}

/// Unary predicates over a two-element domain plus two propositions:
/// `d`, `p`, `q`, `r` over {1, 2} and `s`, `t` give ten ground atoms.
fn first_order(rng: &mut StdRng) -> String {
    let preds = ["p", "q", "r"];
    let props = ["s", "t"];
    let mut out = vec!["d(1).".to_string(), "d(2).".to_string()];
    let n_rules = rng.random_range(1..=13);
    for _ in 0..n_rules {
        let binary = rng.random_bool(0.25);
        let head_len = match rng.random_range(0..100) {
            0..12 => 0,
            12..70 => 1,
            _ => 2,
        };
        let var_for = |rng: &mut StdRng| {
            if binary && rng.random_bool(0.5) {
                "Y"
            } else {
                "X"
            }
        };
        let mut head = Vec::new();
        for _ in 0..head_len {
            if rng.random_bool(0.2) {
                head.push(props.choose(rng).unwrap().to_string());
            } else {
                head.push(format!("{}({})", preds.choose(rng).unwrap(), var_for(rng)));
            }
        }
        let mut body = vec!["d(X)".to_string()];
        if binary {
            body.push("d(Y)".to_string());
        }
        for _ in 0..rng.random_range(0..=2) {
            let negated = rng.random_bool(0.5);
            let lit = if rng.random_bool(0.2) {
                props.choose(rng).unwrap().to_string()
            } else {
                format!("{}({})", preds.choose(rng).unwrap(), var_for(rng))
            };
            body.push(if negated { format!("not {lit}") } else { lit });
        }
        if rng.random_bool(0.3) {
            let cmp = if binary {
                ["X < Y", "X != Y", "X = Y", "Y >= X"].choose(rng).unwrap()
            } else {
                ["X != 1", "X < 2", "X >= 2", "X = 1"].choose(rng).unwrap()
            };
            body.push(cmp.to_string());
        }
        let head: Vec<&str> = head.iter().map(String::as_str).collect();
        out.push(render(&head, &body));
    }
    out.join("\n")
}

/// `count` programs, deterministic for a given seed.
pub fn programs(seed: u64, count: usize) -> Vec<String> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            if rng.random_bool(0.6) {
                propositional(&mut rng)
            } else {
                first_order(&mut rng)
            }
        })
        .collect()
}
