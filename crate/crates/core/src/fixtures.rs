//! Small finite graphs used in documentation, tests and the CLI.

use crate::graph::{Alphabet, FiniteGraph};

fn letters(k: usize) -> Vec<char> {
    (0..k).map(|i| (b'a' + i as u8) as char).collect()
}

/// One vertex `v` with a loop for each of the first `k` letters: the full
/// shift on `k` symbols.
pub fn full_shift(k: usize) -> FiniteGraph<String> {
    assert!((1..=26).contains(&k), "full shift needs 1..=26 letters");
    let mut g = FiniteGraph::new(Alphabet::new(letters(k)).unwrap());
    g.add_root("v".to_string());
    for c in letters(k) {
        g.add_edge("v".to_string(), c, "v".to_string()).unwrap();
    }
    g
}

/// `v1 -a-> v2`, `v1 -b-> v1`, `v2 -b-> v1`: the words with no `aa`
/// factor that can be read from `v1`.
pub fn golden_mean() -> FiniteGraph<String> {
    let mut g = FiniteGraph::new(Alphabet::new("ab".chars()).unwrap());
    g.add_root("v1".to_string());
    g.add_edge("v1".to_string(), 'a', "v2".to_string()).unwrap();
    g.add_edge("v1".to_string(), 'b', "v1".to_string()).unwrap();
    g.add_edge("v2".to_string(), 'b', "v1".to_string()).unwrap();
    g
}

/// Directed `n`-cycle `c0 -> c1 -> ... -> c0`, every edge labelled `a`.
pub fn cycle(n: usize) -> FiniteGraph<String> {
    assert!(n >= 1);
    let mut g = FiniteGraph::new(Alphabet::new(['a']).unwrap());
    g.add_root("c0".to_string());
    for i in 0..n {
        g.add_edge(format!("c{i}"), 'a', format!("c{}", (i + 1) % n))
            .unwrap();
    }
    g
}

/// `x -a-> y -b-> x`.
pub fn two_cycle() -> FiniteGraph<String> {
    let mut g = FiniteGraph::new(Alphabet::new("ab".chars()).unwrap());
    g.add_root("x".to_string());
    g.add_edge("x".to_string(), 'a', "y".to_string()).unwrap();
    g.add_edge("y".to_string(), 'b', "x".to_string()).unwrap();
    g
}

/// A nondeterministic graph: `x -a-> y`, `x -a-> z`, `y -a-> x`, `z -b-> x`.
pub fn branching() -> FiniteGraph<String> {
    let mut g = FiniteGraph::new(Alphabet::new("ab".chars()).unwrap());
    g.add_root("x".to_string());
    g.add_edge("x".to_string(), 'a', "y".to_string()).unwrap();
    g.add_edge("x".to_string(), 'a', "z".to_string()).unwrap();
    g.add_edge("y".to_string(), 'a', "x".to_string()).unwrap();
    g.add_edge("z".to_string(), 'b', "x".to_string()).unwrap();
    g
}

/// Three-state nondeterministic automaton:
/// `p -a-> p`, `p -b-> p`, `p -a-> q`, `q -b-> r`, `r -a-> p`.
pub fn nfa3() -> FiniteGraph<String> {
    let mut g = FiniteGraph::new(Alphabet::new("ab".chars()).unwrap());
    g.add_root("p".to_string());
    g.add_edge("p".to_string(), 'a', "p".to_string()).unwrap();
    g.add_edge("p".to_string(), 'b', "p".to_string()).unwrap();
    g.add_edge("p".to_string(), 'a', "q".to_string()).unwrap();
    g.add_edge("q".to_string(), 'b', "r".to_string()).unwrap();
    g.add_edge("r".to_string(), 'a', "p".to_string()).unwrap();
    g
}
