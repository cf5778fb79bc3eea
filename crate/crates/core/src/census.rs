//! Word counts by length and the entropy estimates built on them.
//!
//! On a deterministic graph distinct paths from `x` read distinct words, so
//! `c_n(x, y)` is a path count computed by a length-indexed dynamic program
//! over a frontier map. With forbidden factors the program runs on the
//! product graph and sums over automaton states at `y`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::chain::{certified_gap_bound, CertificateInputs, GapCertificate};
use crate::error::{Error, Result};
use crate::estimate::{fit_tail, log_biguint, TailFit};
use crate::factor::{unwitnessed_words, ForbiddenSet, ProductGraph, ProductVertex, StateId};
use crate::graph::{
    forward_ball, materialize, word_to_string, Budget, FiniteGraph, LabelledGraph, Symbol,
    VertexId, Window,
};
use crate::num::serialize_real;
use crate::perron::{perron_root, spectral_radius, PerronOptions};

fn serialize_counts<S: Serializer>(counts: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(counts.iter().map(|c| c.to_string()))
}

fn serialize_forbidden<S: Serializer>(f: &Option<ForbiddenSet>, s: S) -> Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.collect_seq(f.to_strings()),
        None => s.serialize_none(),
    }
}

/// `counts[n]` is the number of words of length `n` labelling a path from
/// `x` to `y` (avoiding `forbidden` when set). Counts serialize as decimal
/// strings since they outgrow JSON numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordCensus {
    pub x: String,
    pub y: String,
    #[serde(serialize_with = "serialize_counts")]
    pub counts: Vec<BigUint>,
    #[serde(serialize_with = "serialize_forbidden")]
    pub forbidden: Option<ForbiddenSet>,
}

impl WordCensus {
    pub fn horizon(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn counts_u64(&self) -> Option<Vec<u64>> {
        self.counts.iter().map(|c| u64::try_from(c).ok()).collect()
    }
}

fn check_row<V: VertexId>(v: &V, edges: &[crate::graph::Edge<V>]) -> Result<()> {
    // expand sorts by label, so repeated labels are adjacent
    match edges.windows(2).find(|w| w[0].label == w[1].label) {
        Some(w) => Err(Error::Nondeterministic {
            vertex: v.canonical(),
            label: w[0].label.0,
        }),
        None => Ok(()),
    }
}

/// Number of paths of each length `0..=n` from `start` to vertices matching
/// `is_target`. Every expanded vertex is checked for determinism. When
/// `goal` is given, vertices provably farther from it than the remaining
/// steps are dropped from the frontier.
pub(crate) fn count_paths<H, T>(
    h: &H,
    start: H::Vertex,
    n: usize,
    is_target: T,
    goal: Option<&H::Vertex>,
    budget: Budget,
) -> Result<Vec<BigUint>>
where
    H: LabelledGraph,
    T: Fn(&H::Vertex) -> bool,
{
    let mut frontier: BTreeMap<H::Vertex, BigUint> = BTreeMap::new();
    frontier.insert(start, BigUint::one());
    let mut counts = Vec::with_capacity(n + 1);
    for k in 0..=n {
        counts.push(
            frontier
                .iter()
                .filter(|(v, _)| is_target(v))
                .fold(BigUint::zero(), |a, (_, c)| a + c),
        );
        if k == n {
            break;
        }
        let remaining = n - k - 1;
        let mut next: BTreeMap<H::Vertex, BigUint> = BTreeMap::new();
        for (v, c) in &frontier {
            let edges = h.expand(v)?;
            check_row(v, &edges)?;
            for e in edges {
                if let Some(goal) = goal {
                    if h.distance_lower_bound(&e.target, goal)
                        .is_some_and(|d| d > remaining)
                    {
                        continue;
                    }
                }
                *next.entry(e.target).or_default() += c;
            }
        }
        budget.check(next.len(), || format!("counting words of length {}", k + 1))?;
        frontier = next;
    }
    Ok(counts)
}

/// Exact counts `c_0..c_n` of words labelling paths `x -> y`, avoiding
/// `forbidden` when given.
///
/// Fails with [`Error::Nondeterministic`] on the first expanded vertex with
/// two out-edges sharing a label; run [`determinize`] first in that case.
pub fn count_words<G: LabelledGraph>(
    g: &G,
    x: &G::Vertex,
    y: &G::Vertex,
    n: usize,
    forbidden: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<WordCensus> {
    let counts = match forbidden {
        None => count_paths(g, x.clone(), n, |v| v == y, Some(y), budget)?,
        Some(f) => {
            let p = ProductGraph::with_forbidden(g, f)?;
            let goal = ProductVertex {
                base: y.clone(),
                state: StateId::START,
            };
            count_paths(
                &p,
                p.start(x.clone()),
                n,
                |v| v.base == *y,
                Some(&goal),
                budget,
            )?
        }
    };
    Ok(WordCensus {
        x: x.canonical(),
        y: y.canonical(),
        counts,
        forbidden: forbidden.cloned(),
    })
}

/// A set of vertices of another graph, the states of a powerset
/// construction. Canonical form `{m1,m2,...}` with members in order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset<V>(pub Vec<V>);

/// Splits on commas that are not nested inside `()` or `{}`.
fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

impl<V: VertexId> VertexId for Subset<V> {
    fn canonical(&self) -> String {
        let inner: Vec<String> = self.0.iter().map(VertexId::canonical).collect();
        format!("{{{}}}", inner.join(","))
    }

    fn from_canonical(text: &str) -> Option<Self> {
        let inner = text.strip_prefix('{')?.strip_suffix('}')?;
        if inner.is_empty() {
            return Some(Subset(Vec::new()));
        }
        let mut members = split_top_level(inner)
            .into_iter()
            .map(V::from_canonical)
            .collect::<Option<Vec<_>>>()?;
        members.sort();
        members.dedup();
        Some(Subset(members))
    }
}

/// Powerset construction over the edges of a window.
///
/// The result is deterministic, rooted at `{center}`, and reads from its
/// root exactly the words that label paths from the center inside the
/// window (edges leaving the window lead to members without out-edges).
/// The empty subset is left out, so a missing edge means the word dies.
pub fn determinize<V: VertexId>(w: &Window<V>, budget: Budget) -> Result<FiniteGraph<Subset<V>>> {
    let mut adjacency: BTreeMap<&V, BTreeMap<Symbol, BTreeSet<&V>>> = BTreeMap::new();
    let mut alphabet: BTreeSet<Symbol> = BTreeSet::new();
    for e in w.edges() {
        alphabet.insert(e.edge.label);
        adjacency
            .entry(&e.edge.source)
            .or_default()
            .entry(e.edge.label)
            .or_default()
            .insert(&e.edge.target);
    }
    let root = Subset(vec![w.center().clone()]);
    let letters: Vec<char> = if alphabet.is_empty() {
        vec!['a']
    } else {
        alphabet.iter().map(|s| s.0).collect()
    };
    let mut out = FiniteGraph::new(crate::graph::Alphabet::new(letters)?);
    out.add_root(root.clone());
    let mut seen = BTreeSet::from([root.clone()]);
    let mut todo = vec![root];
    while let Some(s) = todo.pop() {
        let mut moves: BTreeMap<Symbol, BTreeSet<&V>> = BTreeMap::new();
        for m in &s.0 {
            if let Some(row) = adjacency.get(m) {
                for (a, targets) in row {
                    moves.entry(*a).or_default().extend(targets.iter().copied());
                }
            }
        }
        for (a, targets) in moves {
            let t = Subset(targets.into_iter().cloned().collect());
            out.add_edge(s.clone(), a.0, t.clone())?;
            if seen.insert(t.clone()) {
                budget.check(seen.len(), || "determinizing a window".to_string())?;
                todo.push(t);
            }
        }
    }
    Ok(out)
}

/// Same as [`determinize`] but with the alphabet of `g`, so the result can
/// be compared with `g` directly.
pub fn determinize_graph<G: LabelledGraph>(
    g: &G,
    w: &Window<G::Vertex>,
    budget: Budget,
) -> Result<FiniteGraph<Subset<G::Vertex>>> {
    let d = determinize(w, budget)?;
    let mut out = FiniteGraph::new(g.alphabet().clone());
    for v in d.vertices() {
        out.add_vertex(v.clone());
    }
    for r in d.roots() {
        out.add_root(r);
    }
    for e in d.edges() {
        out.add_edge(e.source, e.label.0, e.target)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EntropyMethod {
    #[serde(rename = "count-fit")]
    CountFit,
    #[serde(rename = "spectral")]
    Spectral,
    #[serde(rename = "rho-dictionary")]
    RhoDictionary,
}

impl fmt::Display for EntropyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntropyMethod::CountFit => "count-fit",
            EntropyMethod::Spectral => "spectral",
            EntropyMethod::RhoDictionary => "rho-dictionary",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDiagnostics {
    #[serde(serialize_with = "serialize_real")]
    pub lambda: f64,
    #[serde(serialize_with = "serialize_real")]
    pub lambda_lower: f64,
    #[serde(serialize_with = "serialize_real")]
    pub lambda_upper: f64,
    pub iterations: usize,
    pub vertices: usize,
    pub components: usize,
}

fn serialize_entropy<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if *x == f64::NEG_INFINITY {
        s.serialize_str("finite language")
    } else {
        serialize_real(x, s)
    }
}

/// An entropy value in nats with the evidence behind it. A finite language
/// has value `-inf`, reported as `"finite language"`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    #[serde(serialize_with = "serialize_entropy")]
    pub value: f64,
    pub method: EntropyMethod,
    pub period: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<TailFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralDiagnostics>,
}

impl EntropyEstimate {
    pub fn is_finite_language(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }
}

/// Default tail window: the second half of the counts.
pub fn default_tail(n: usize) -> usize {
    (n / 2).max(2)
}

/// Least-squares growth rate of the counts over the last `tail` lengths, per
/// residue class of the detected period, maximized over classes.
pub fn entropy_from_counts(census: &WordCensus, tail: usize) -> Result<EntropyEstimate> {
    let logs: Vec<Option<f64>> = census.counts.iter().map(log_biguint).collect();
    let fit = fit_tail(&logs, tail)?;
    Ok(EntropyEstimate {
        value: fit.slope,
        method: EntropyMethod::CountFit,
        period: fit.period,
        fit: Some(fit),
        spectral: None,
    })
}

/// `log` of the Perron root of the edge-count matrix of the part of `g`
/// reachable from its roots, which must be finite, deterministic and
/// strongly connected.
pub fn spectral_entropy_finite<G: LabelledGraph>(g: &G, budget: Budget) -> Result<EntropyEstimate> {
    let m = materialize(g, &g.roots(), budget)?;
    if let Some((i, a)) = m.first_nondeterminism() {
        return Err(Error::Nondeterministic {
            vertex: m.vertices[i].canonical(),
            label: a.0,
        });
    }
    let comps = m.strongly_connected_components();
    if comps.len() != 1 {
        return Err(Error::NotStronglyConnected);
    }
    let r = perron_root(&m.count_matrix(), PerronOptions::default());
    if !r.converged {
        return Err(Error::NonConvergence {
            iterations: r.iterations,
            width: r.upper - r.lower,
        });
    }
    Ok(EntropyEstimate {
        value: if r.value > 0.0 {
            r.value.ln()
        } else {
            f64::NEG_INFINITY
        },
        method: EntropyMethod::Spectral,
        period: m.component_period(&comps[0]).max(1),
        fit: None,
        spectral: Some(SpectralDiagnostics {
            lambda: r.value,
            lambda_lower: r.lower,
            lambda_upper: r.upper,
            iterations: r.iterations,
            vertices: m.len(),
            components: 1,
        }),
    })
}

/// Spectral entropy of a finite deterministic graph that need not be
/// strongly connected: `log` of the largest Perron root over the strongly
/// connected components reachable from `starts`. This is the entropy of the
/// union of the languages read from `starts`; product graphs typically need
/// it because their dead-end states break strong connectivity.
pub fn spectral_entropy_reachable<G: LabelledGraph>(
    g: &G,
    starts: &[G::Vertex],
    budget: Budget,
) -> Result<EntropyEstimate> {
    let m = materialize(g, starts, budget)?;
    if let Some((i, a)) = m.first_nondeterminism() {
        return Err(Error::Nondeterministic {
            vertex: m.vertices[i].canonical(),
            label: a.0,
        });
    }
    let s = spectral_radius(&m.count_matrix(), PerronOptions::default());
    if !s.converged {
        return Err(Error::NonConvergence {
            iterations: PerronOptions::default().max_iterations,
            width: f64::NAN,
        });
    }
    let period = if s.component.is_empty() {
        1
    } else {
        m.component_period(&s.component).max(1)
    };
    Ok(EntropyEstimate {
        value: if s.value > 0.0 {
            s.value.ln()
        } else {
            f64::NEG_INFINITY
        },
        method: EntropyMethod::Spectral,
        period,
        fit: None,
        spectral: Some(SpectralDiagnostics {
            lambda: s.value,
            lambda_lower: s.value,
            lambda_upper: s.value,
            iterations: 0,
            vertices: m.len(),
            components: s.components,
        }),
    })
}

#[derive(Clone, Debug)]
pub struct GapOptions {
    /// Tail window for the count fits; half the horizon when `None`.
    pub tail: Option<usize>,
    pub budget: Budget,
    /// Inputs for the certified bound; no certificate when `None`.
    pub certificate: Option<CertificateInputs>,
    /// Radius of the ball around `x` searched for occurrences of `F`.
    pub witness_radius: usize,
}

impl Default for GapOptions {
    fn default() -> Self {
        GapOptions {
            tail: None,
            budget: Budget::DEFAULT,
            certificate: None,
            witness_radius: 4,
        }
    }
}

/// Entropy with and without the forbidden factors, from the same horizon.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub census: WordCensus,
    pub census_forbidden: WordCensus,
    pub h: EntropyEstimate,
    pub h_forbidden: EntropyEstimate,
    #[serde(serialize_with = "serialize_real")]
    pub gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<GapCertificate>,
    pub warnings: Vec<String>,
}

/// Counts words `x -> y` up to length `n` with and without `forbidden`,
/// fits both growth rates and reports their difference. A certificate is
/// attached when `opts.certificate` supplies the constants it needs.
pub fn entropy_gap_report<G: LabelledGraph>(
    g: &G,
    x: &G::Vertex,
    y: &G::Vertex,
    forbidden: &ForbiddenSet,
    n: usize,
    opts: &GapOptions,
) -> Result<GapReport> {
    let tail = opts.tail.unwrap_or_else(|| default_tail(n));
    let census = count_words(g, x, y, n, None, opts.budget)?;
    let census_forbidden = count_words(g, x, y, n, Some(forbidden), opts.budget)?;
    let h = entropy_from_counts(&census, tail)?;
    let h_forbidden = match entropy_from_counts(&census_forbidden, tail) {
        Ok(e) => e,
        // every count in the tail vanished except possibly one
        Err(Error::InsufficientData(_))
            if census_forbidden
                .counts
                .iter()
                .rev()
                .take(tail)
                .all(Zero::is_zero) =>
        {
            EntropyEstimate {
                value: f64::NEG_INFINITY,
                method: EntropyMethod::CountFit,
                period: 1,
                fit: None,
                spectral: None,
            }
        }
        Err(e) => return Err(e),
    };
    let gap = if h.value == h_forbidden.value {
        0.0
    } else {
        h.value - h_forbidden.value
    };

    let mut warnings = Vec::new();
    let window = forward_ball(g, x, opts.witness_radius.min(n.max(1)), opts.budget)?;
    let missing = unwitnessed_words(g, forbidden, &window)?;
    if !missing.is_empty() {
        let words: Vec<String> = missing.iter().map(|w| word_to_string(w)).collect();
        warnings.push(format!(
            "forbidden words {words:?} label no path starting within distance {} of {}; \
             F may not be relatively dense and need not lower the entropy",
            window.radius(),
            x.canonical()
        ));
    }
    if gap.abs() <= 1e-12 {
        warnings.push("no entropy drop measured at this horizon".to_string());
    }

    let certificate = match &opts.certificate {
        None => None,
        Some(inputs) => match certified_gap_bound(&inputs.with_r(forbidden.max_len())) {
            Ok(c) => Some(c),
            Err(e) => {
                warnings.push(format!("no certificate: {e}"));
                None
            }
        },
    };
    Ok(GapReport {
        census,
        census_forbidden,
        h,
        h_forbidden,
        gap,
        certificate,
        warnings,
    })
}
