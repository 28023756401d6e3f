//! Scalable benchmark programs.

use std::fmt::Write;

/// 3-colouring of a cycle with `n` nodes (a triangle when `n == 3`).
pub fn cycle_colouring(n: usize) -> String {
    let mut p = String::new();
    for i in 1..=n {
        let _ = write!(p, "node({i}). edge({i},{}). ", i % n + 1);
    }
    p.push_str("\ncol(X,red) | col(X,green) | col(X,blue) :- node(X).\n");
    p.push_str(":- edge(X,Y), col(X,C), col(Y,C).\n");
    p
}

/// `pigeons` into `holes`; unsatisfiable when pigeons > holes.
pub fn pigeonhole(pigeons: usize, holes: usize) -> String {
    let mut p = String::new();
    for i in 1..=pigeons {
        let _ = write!(p, "pigeon({i}). ");
    }
    for h in 1..=holes {
        let _ = write!(p, "hole({h}). ");
    }
    let head: Vec<String> = (1..=holes).map(|h| format!("in(P,{h})")).collect();
    let _ = writeln!(p, "\n{} :- pigeon(P).", head.join(" | "));
    p.push_str(":- in(P,H), in(Q,H), P < Q.\n");
    p
}

/// Transitive closure over a chain of `n` edges: stratified, one answer set
/// with about n²/2 derived atoms.
pub fn chain_reachability(n: usize) -> String {
    let mut p = String::new();
    for i in 0..n {
        let _ = write!(p, "edge({i},{}). ", i + 1);
    }
    p.push_str("\nreach(X,Y) :- edge(X,Y).\nreach(X,Z) :- reach(X,Y), edge(Y,Z).\n");
    p
}

/// `n` independent even loops: 2^n answer sets.
pub fn even_loops(n: usize) -> String {
    (0..n)
        .map(|i| format!("a{i} :- not b{i}. b{i} :- not a{i}.\n"))
        .collect()
}
