//! Direct enumeration of proper 3-colourings of the triangle 1-2-3, rendered
//! as the answer sets the colouring program must have.

use std::collections::BTreeSet;

pub const TRIANGLE: &str = "node(1). node(2). node(3).
edge(1,2). edge(2,3). edge(1,3).
col(X,r) | col(X,g) | col(X,b) :- node(X).
:- edge(X,Y), col(X,C), col(Y,C).";

pub fn triangle_models() -> BTreeSet<BTreeSet<String>> {
    let colours = ["r", "g", "b"];
    let edges = [(1, 2), (2, 3), (1, 3)];
    let mut out = BTreeSet::new();
    for c1 in colours {
        for c2 in colours {
            for c3 in colours {
                let assign = [c1, c2, c3];
                if edges.iter().any(|&(x, y)| assign[x - 1] == assign[y - 1]) {
                    continue;
                }
                let mut m: BTreeSet<String> = (1..=3).map(|n| format!("node({n})")).collect();
                m.extend(edges.iter().map(|(x, y)| format!("edge({x},{y})")));
                m.extend((1..=3).map(|n| format!("col({n},{})", assign[n - 1])));
                out.insert(m);
            }
        }
    }
    out
}
