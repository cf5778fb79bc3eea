//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use entroscope::chain::WeightedChain;
use entroscope::fixtures;
use entroscope::graph::{Alphabet, FiniteGraph, VertexId};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn letters(k: usize) -> Vec<char> {
    (0..k).map(|i| (b'a' + i as u8) as char).collect()
}

pub fn name(i: usize) -> String {
    format!("s{i}")
}

/// Strongly connected deterministic graph: a random Hamiltonian cycle plus
/// extra edges on free `(vertex, label)` slots.
pub fn random_strongly_connected<R: Rng>(
    rng: &mut R,
    max_states: usize,
    max_letters: usize,
) -> FiniteGraph<String> {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_letters);
    let sigma = letters(k);
    let mut g = FiniteGraph::new(Alphabet::new(sigma.clone()).unwrap());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    g.add_root(name(order[0]));
    for i in 0..n {
        let a = sigma[rng.gen_range(0..k)];
        g.add_edge(name(order[i]), a, name(order[(i + 1) % n]))
            .unwrap();
    }
    let fill = rng.gen_range(0.0..1.0);
    for v in 0..n {
        for &a in &sigma {
            let taken = g.edges().any(|e| e.source == name(v) && e.label.0 == a);
            if !taken && rng.gen_bool(fill) {
                g.add_edge(name(v), a, name(rng.gen_range(0..n))).unwrap();
            }
        }
    }
    g
}

/// Arbitrary labelled graph, possibly nondeterministic, over `{a, b}`.
pub fn random_nfa<R: Rng>(rng: &mut R, max_states: usize) -> FiniteGraph<String> {
    let n = rng.gen_range(1..=max_states);
    let mut g = FiniteGraph::new(Alphabet::new("ab".chars()).unwrap());
    g.add_root(name(0));
    for v in 1..n {
        g.add_vertex(name(v));
    }
    let p = rng.gen_range(0.1..0.6);
    for v in 0..n {
        for a in ['a', 'b'] {
            for t in 0..n {
                if rng.gen_bool(p) {
                    g.add_edge(name(v), a, name(t)).unwrap();
                }
            }
        }
    }
    g
}

/// Every path of length `<= n` from `start`, as (label, end) pairs, by plain
/// depth-first enumeration over the edge list.
pub fn all_paths<V: VertexId>(g: &FiniteGraph<V>, start: &V, n: usize) -> Vec<(String, V)> {
    let edges: Vec<(V, char, V)> = g.edges().map(|e| (e.source, e.label.0, e.target)).collect();
    let mut out = Vec::new();
    let mut stack = vec![(String::new(), start.clone())];
    while let Some((w, v)) = stack.pop() {
        if w.chars().count() < n {
            for (s, a, t) in &edges {
                if *s == v {
                    stack.push((format!("{w}{a}"), t.clone()));
                }
            }
        }
        out.push((w, v));
    }
    out
}

pub fn word_set<V>(paths: &[(String, V)]) -> BTreeSet<String> {
    paths.iter().map(|(w, _)| w.clone()).collect()
}

/// Number of distinct words of each length `<= n` labelling a path
/// `x -> y` and containing no word of `forbidden` as a substring.
pub fn brute_counts(
    g: &FiniteGraph<String>,
    x: &str,
    y: &str,
    n: usize,
    forbidden: &[&str],
) -> Vec<u64> {
    let words: BTreeSet<String> = all_paths(g, &x.to_string(), n)
        .into_iter()
        .filter(|(w, v)| v.as_str() == y && !forbidden.iter().any(|f| w.contains(f)))
        .map(|(w, _)| w)
        .collect();
    let mut counts = vec![0u64; n + 1];
    for w in words {
        counts[w.chars().count()] += 1;
    }
    counts
}

/// The finite fixtures, by name, with a forbidden word that occurs in them.
pub fn finite_fixtures() -> Vec<(&'static str, FiniteGraph<String>, &'static str)> {
    vec![
        ("B2", fixtures::full_shift(2), "aa"),
        ("B3", fixtures::full_shift(3), "ab"),
        ("golden_mean", fixtures::golden_mean(), "bb"),
        ("cycle3", fixtures::cycle(3), "aaaa"),
        ("two_cycle", fixtures::two_cycle(), "ab"),
    ]
}

pub fn nondeterministic_fixtures() -> Vec<(&'static str, FiniteGraph<String>, &'static str)> {
    vec![
        ("branching", fixtures::branching(), "ab"),
        ("nfa3", fixtures::nfa3(), "ab"),
    ]
}

/// Exact weights `1/outdeg(source)`, a stochastic chain on any graph
/// without sinks.
pub fn out_degree_chain(g: &FiniteGraph<String>) -> WeightedChain<&FiniteGraph<String>> {
    let edges: Vec<_> = g.edges().collect();
    let mut weights = std::collections::BTreeMap::new();
    let mut alpha = BigRational::from_integer(1.into());
    for e in &edges {
        let deg = edges.iter().filter(|f| f.source == e.source).count();
        let p = BigRational::new(1.into(), deg.into());
        alpha = alpha.min(p.clone());
        weights.insert(e.clone(), p);
    }
    WeightedChain::with_exact_weights(g, weights, alpha)
}
