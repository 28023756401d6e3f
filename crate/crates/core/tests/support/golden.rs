//! Golden programs with frozen outputs, and an independent filter over
//! printed outputs.

use std::collections::BTreeSet;
use std::path::PathBuf;

pub struct Golden {
    pub name: String,
    pub program: String,
    pub expected: String,
}

fn dir() -> PathBuf {
    // Resolves from any crate in the workspace.
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden")
}

pub fn corpus() -> Vec<Golden> {
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir())
        .expect("golden directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "lp"))
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|p| Golden {
            name: p.file_stem().unwrap().to_string_lossy().into_owned(),
            program: std::fs::read_to_string(&p).unwrap(),
            expected: std::fs::read_to_string(p.with_extension("out")).unwrap(),
        })
        .collect()
}

fn split_atoms(body: &str) -> Vec<&str> {
    let mut atoms = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                atoms.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if !body[start..].trim().is_empty() {
        atoms.push(body[start..].trim());
    }
    atoms
}

pub fn predicates(output: &str) -> BTreeSet<String> {
    output
        .lines()
        .filter_map(|l| l.strip_prefix('{')?.strip_suffix('}'))
        .flat_map(split_atoms)
        .map(|a| a.split('(').next().unwrap().to_owned())
        .collect()
}

/// Deletes from a printed output every atom whose predicate is not listed.
pub fn keep_predicates(output: &str, keep: &BTreeSet<String>) -> String {
    output
        .split('\n')
        .map(|line| match line.strip_prefix('{').and_then(|l| l.strip_suffix('}')) {
            Some(body) => {
                let kept: Vec<&str> = split_atoms(body)
                    .into_iter()
                    .filter(|a| keep.contains(a.split('(').next().unwrap()))
                    .collect();
                format!("{{{}}}", kept.join(", "))
            }
            None => line.to_owned(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// The filter sets exercised per program: each single predicate, every
/// second one, none, and one name absent from the program.
pub fn filter_sets(preds: &BTreeSet<String>) -> Vec<BTreeSet<String>> {
    let mut sets: Vec<BTreeSet<String>> = preds.iter().map(|p| BTreeSet::from([p.clone()])).collect();
    sets.push(preds.iter().step_by(2).cloned().collect());
    sets.push(preds.clone());
    sets.push(BTreeSet::from(["absent_predicate".to_string()]));
    sets
}
