mod common;

use std::collections::{BTreeMap, BTreeSet};

use entroscope::census::{count_words, entropy_from_counts, spectral_entropy_reachable};
use entroscope::chain::{distributions, transition_probabilities, WeightedChain};
use entroscope::factor::{certify_denseness, FactorAutomaton, ProductGraph};
use entroscope::graph::{check_deterministic, forward_ball, forward_distance, FiniteGraph};
use entroscope::num::biguint_to_rational;
use entroscope::schreier::{GridZ2, LineZ, SchreierGraph};
use entroscope::{Budget, ForbiddenSet, LabelledGraph};
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(seed: u64) -> FiniteGraph<String> {
    common::random_strongly_connected(&mut ChaCha8Rng::seed_from_u64(seed), 6, 3)
}

fn nfa(seed: u64) -> FiniteGraph<String> {
    common::random_nfa(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

/// A forbidden set over the graph's alphabet built from raw indices.
fn forbidden(g: &FiniteGraph<String>, raw: &[Vec<usize>]) -> ForbiddenSet {
    let sigma = g.alphabet().symbols();
    let words: Vec<String> = raw
        .iter()
        .map(|w| w.iter().map(|&i| sigma[i % sigma.len()].0).collect())
        .collect();
    ForbiddenSet::parse(g.alphabet(), &words).unwrap()
}

fn raw_words() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0usize..3, 1..4), 1..3)
}

fn v0(g: &FiniteGraph<String>) -> String {
    g.roots()[0].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expansion_is_pure(seed in any::<u64>(), n in -20i64..20) {
        let g = graph(seed);
        for v in g.vertices() {
            prop_assert_eq!(g.expand(v).unwrap(), g.expand(v).unwrap());
        }
        let z = SchreierGraph::new(LineZ);
        prop_assert_eq!(z.expand(&n).unwrap(), z.expand(&n).unwrap());
    }

    #[test]
    fn balls_grow_with_radius(seed in any::<u64>(), r in 0usize..5) {
        let g = nfa(seed);
        let small = forward_ball(&g, &v0(&g), r, Budget::DEFAULT).unwrap();
        let big = forward_ball(&g, &v0(&g), r + 1, Budget::DEFAULT).unwrap();
        for v in small.vertices() {
            prop_assert!(big.contains(v));
            prop_assert_eq!(small.distance(v), big.distance(v));
        }
        let z2 = SchreierGraph::new(GridZ2);
        let a = forward_ball(&z2, &(0, 0), r, Budget::DEFAULT).unwrap();
        let b = forward_ball(&z2, &(0, 0), r + 1, Budget::DEFAULT).unwrap();
        prop_assert!(a.vertices().all(|v| b.contains(v)));
        prop_assert_eq!(a.len(), 2 * r * r + 2 * r + 1);
    }

    #[test]
    fn forward_distance_obeys_triangle_inequality(seed in any::<u64>()) {
        let g = graph(seed);
        let vs: Vec<String> = g.vertices().cloned().collect();
        let limit = vs.len();
        let d = |a: &String, b: &String| forward_distance(&g, a, b, limit, Budget::DEFAULT).unwrap();
        for a in &vs {
            for b in &vs {
                for c in &vs {
                    if let (Some(ab), Some(bc)) = (d(a, b), d(b, c)) {
                        let ac = d(a, c).expect("strongly connected");
                        prop_assert!(ac <= ab + bc);
                    }
                }
            }
        }
    }

    #[test]
    fn window_determinism_means_unique_paths(seed in any::<u64>(), r in 1usize..5) {
        let g = nfa(seed);
        let w = forward_ball(&g, &v0(&g), r, Budget::DEFAULT).unwrap();
        if check_deterministic(&w).is_ok() {
            for v in w.vertices() {
                let reach = r - w.distance(v).unwrap();
                let paths = common::all_paths(&g, v, reach);
                let labels: BTreeSet<&String> = paths.iter().map(|(l, _)| l).collect();
                prop_assert_eq!(labels.len(), paths.len());
            }
        }
    }

    #[test]
    fn products_of_deterministic_graphs_are_deterministic(seed in any::<u64>(), raw in raw_words()) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let p = ProductGraph::with_forbidden(&g, &f).unwrap();
        let w = forward_ball(&p, &p.start(v0(&g)), 20, Budget::DEFAULT).unwrap();
        prop_assert!(check_deterministic(&w).is_ok());
    }

    #[test]
    fn product_paths_are_the_avoiding_paths(seed in any::<u64>(), raw in raw_words(), n in 0usize..7) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let strings = f.to_strings();
        let p = ProductGraph::with_forbidden(&g, &f).unwrap();
        let mut frontier = vec![(String::new(), p.start(v0(&g)))];
        let mut product_words = BTreeSet::new();
        for _ in 0..=n {
            let mut next = Vec::new();
            for (w, v) in frontier {
                for e in p.expand(&v).unwrap() {
                    next.push((format!("{w}{}", e.label.0), e.target));
                }
                product_words.insert((w, v.base));
            }
            frontier = next;
        }
        let base: BTreeSet<(String, String)> = common::all_paths(&g, &v0(&g), n)
            .into_iter()
            .filter(|(w, _)| !strings.iter().any(|s| w.contains(s.as_str())))
            .collect();
        prop_assert_eq!(product_words, base);
    }

    #[test]
    fn automaton_accepts_exactly_avoiding_words(
        raw in raw_words(),
        word in prop::collection::vec(0usize..3, 0..12),
    ) {
        let g = entroscope::fixtures::full_shift(3);
        let f = forbidden(&g, &raw);
        let a = FactorAutomaton::new(&f, g.alphabet()).unwrap();
        let w = g.alphabet().parse_word(&word.iter().map(|&i| (b'a' + i as u8) as char).collect::<String>()).unwrap();
        let text: String = w.iter().map(|s| s.0).collect();
        let contains = f.to_strings().iter().any(|s| text.contains(s.as_str()));
        prop_assert_eq!(a.accepts(&w), !contains);
        prop_assert_eq!(f.occurs_in(&w), contains);
        let first = (1..=text.len()).find(|&end| f.to_strings().iter().any(|s| text[..end].ends_with(s.as_str())));
        prop_assert_eq!(a.first_occurrence_end(&w), first);
    }

    #[test]
    fn denseness_is_monotone_in_d(seed in any::<u64>(), raw in raw_words(), d in 0usize..4) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let w = forward_ball(&g, &v0(&g), g.vertex_count(), Budget::DEFAULT).unwrap();
        let at_d = certify_denseness(&g, &f, d, &w, Budget::DEFAULT).unwrap();
        let at_next = certify_denseness(&g, &f, d + 1, &w, Budget::DEFAULT).unwrap();
        if at_d.certificate().is_some() {
            prop_assert!(at_next.certificate().is_some());
        }
    }

    #[test]
    fn counts_match_enumeration(seed in any::<u64>(), raw in raw_words()) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let strings = f.to_strings();
        let refs: Vec<&str> = strings.iter().map(String::as_str).collect();
        let x = v0(&g);
        for y in g.vertices() {
            let plain = count_words(&g, &x, y, 7, None, Budget::DEFAULT).unwrap();
            prop_assert_eq!(plain.counts_u64().unwrap(), common::brute_counts(&g, &x, y, 7, &[]));
            let avoiding = count_words(&g, &x, y, 7, Some(&f), Budget::DEFAULT).unwrap();
            prop_assert_eq!(avoiding.counts_u64().unwrap(), common::brute_counts(&g, &x, y, 7, &refs));
        }
    }

    #[test]
    fn forbidding_more_never_increases_counts(seed in any::<u64>(), raw in raw_words(), extra in raw_words()) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let mut both = raw.clone();
        both.extend(extra);
        let f2 = forbidden(&g, &both);
        let x = v0(&g);
        let c0 = count_words(&g, &x, &x, 12, None, Budget::DEFAULT).unwrap();
        let c1 = count_words(&g, &x, &x, 12, Some(&f), Budget::DEFAULT).unwrap();
        let c2 = count_words(&g, &x, &x, 12, Some(&f2), Budget::DEFAULT).unwrap();
        for n in 0..=12 {
            prop_assert!(c1.counts[n] <= c0.counts[n]);
            prop_assert!(c2.counts[n] <= c1.counts[n]);
        }
    }

    #[test]
    fn spectral_entropy_bounds_closed_walk_counts(seed in any::<u64>()) {
        let g = graph(seed);
        let x = v0(&g);
        let h = spectral_entropy_reachable(&g, std::slice::from_ref(&x), Budget::DEFAULT).unwrap().value;
        let c = count_words(&g, &x, &x, 60, None, Budget::DEFAULT).unwrap();
        // c_n(x, x) <= trace(A^n) <= |V| exp(n h)
        let slack = (g.vertex_count() as f64).ln();
        for (n, cn) in c.counts.iter().enumerate().skip(1) {
            if let Some(l) = entroscope::estimate::log_biguint(cn) {
                prop_assert!(l <= n as f64 * h + slack + 1e-9);
            }
        }
        if h > 0.0 {
            let fit = entropy_from_counts(&c, 30).unwrap();
            prop_assert!((fit.value - h).abs() < 0.1, "fit {} spectral {}", fit.value, h);
        }
    }

    #[test]
    fn dictionary_identity_on_random_graphs(seed in any::<u64>(), raw in raw_words()) {
        let g = graph(seed);
        let f = forbidden(&g, &raw);
        let chain = WeightedChain::uniform(&g);
        let sigma = BigRational::from_integer(g.alphabet().len().into());
        let x = v0(&g);
        for y in g.vertices() {
            for restricted in [None, Some(&f)] {
                let p: Vec<BigRational> = transition_probabilities(&chain, &x, y, 10, restricted, Budget::DEFAULT).unwrap();
                let c = count_words(&g, &x, y, 10, restricted, Budget::DEFAULT).unwrap();
                for (n, (p, c)) in p.iter().zip(&c.counts).enumerate() {
                    prop_assert_eq!(p * Pow::pow(sigma.clone(), n), biguint_to_rational(c));
                }
            }
        }
    }

    #[test]
    fn chapman_kolmogorov_and_mass(seed in any::<u64>(), raw in raw_words(), m in 0usize..5, n in 0usize..5) {
        let g = nfa(seed);
        let f = forbidden(&g, &raw);
        let chain = common::out_degree_chain(&g);
        let x = v0(&g);
        for restricted in [None, Some(&f)] {
            let from_x = distributions::<_, BigRational>(&chain, &x, m + n, restricted, Budget::DEFAULT).unwrap();
            for pair in from_x.windows(2) {
                prop_assert!(pair[1].total() <= pair[0].total());
            }
            let mut composed: BTreeMap<String, BigRational> = BTreeMap::new();
            for (y, p) in from_x[m].marginal() {
                let from_y = distributions::<_, BigRational>(&chain, &y, n, restricted, Budget::DEFAULT).unwrap();
                for (z, q) in from_y[n].marginal() {
                    *composed.entry(z).or_insert_with(BigRational::zero) += &p * q;
                }
            }
            let direct = from_x[m + n].marginal();
            for z in g.vertices() {
                let lhs = direct.get(z).cloned().unwrap_or_else(BigRational::zero);
                let rhs = composed.get(z).cloned().unwrap_or_else(BigRational::zero);
                if restricted.is_some() {
                    prop_assert!(lhs <= rhs);
                } else {
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
