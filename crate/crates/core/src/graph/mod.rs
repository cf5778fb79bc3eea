//! Edge-labelled directed graphs, either finite and explicit or generated
//! on demand from an expansion function.
//!
//! Infinite graphs have no global vertex enumeration. Everything in this
//! crate explores them through [`LabelledGraph::expand`], starting from a
//! vertex and walking forward, so every structural statement about an
//! infinite graph is made on a finite [`Window`].
//!
//! Canonical vertex text forms:
//!
//! | vertex type            | canonical form          |
//! |------------------------|-------------------------|
//! | `i64`                  | decimal, e.g. `-3`      |
//! | `(i64, i64)`           | `(x,y)`                 |
//! | `String`               | the string itself       |
//! | product vertex         | `<base>@<state>`        |
//! | subset vertex          | `{<m1>,<m2>,...}`       |
//! | free-group coset word  | reduced word, `e` empty |

mod checks;
mod finite;
mod json;
mod window;

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};

pub use self::checks::{
    check_deterministic, check_fully_deterministic, check_uniform_connectedness,
    estimate_connectivity_constant, ConnectednessReport, DeterminismReport, FullDeterminismReport,
    ReturnWitness, Scope,
};
pub(crate) use self::finite::tarjan;
pub use self::finite::{materialize, FiniteGraph, Materialized};
pub use self::json::{GraphDocument, LoadedGraph};
pub use self::window::{
    follow_word, forward_ball, forward_distance, shortest_path_to, Window, WindowEdge,
};

/// A letter of a finite alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct Symbol(pub char);

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Renders a word as plain text.
pub fn word_to_string(word: &[Symbol]) -> String {
    word.iter().map(|s| s.0).collect()
}

/// A finite, ordered, nonempty set of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = char>>(letters: I) -> Result<Self> {
        let mut symbols: Vec<Symbol> = letters.into_iter().map(Symbol).collect();
        symbols.sort();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(Error::Parse("alphabet must not be empty".into()));
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn index_of(&self, symbol: Symbol) -> Option<usize> {
        self.symbols.binary_search(&symbol).ok()
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        self.index_of(symbol).is_some()
    }

    /// Reads a word letter by letter, rejecting letters outside the alphabet.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>> {
        text.chars()
            .map(|c| {
                let s = Symbol(c);
                if self.contains(s) {
                    Ok(s)
                } else {
                    Err(Error::UnknownSymbol {
                        symbol: c,
                        context: text.to_string(),
                    })
                }
            })
            .collect()
    }

    /// All words of length exactly `n`, in lexicographic order.
    pub fn words_of_length(&self, n: usize) -> Vec<Vec<Symbol>> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    self.symbols.iter().map(move |&s| {
                        let mut next = w.clone();
                        next.push(s);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// Identity of a vertex. Equality is structural and every vertex has a
/// canonical text form that parses back to the same vertex.
pub trait VertexId: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync {
    fn canonical(&self) -> String;
    fn from_canonical(text: &str) -> Option<Self>;
}

impl VertexId for i64 {
    fn canonical(&self) -> String {
        self.to_string()
    }

    fn from_canonical(text: &str) -> Option<Self> {
        text.parse().ok()
    }
}

impl VertexId for (i64, i64) {
    fn canonical(&self) -> String {
        format!("({},{})", self.0, self.1)
    }

    fn from_canonical(text: &str) -> Option<Self> {
        let inner = text.strip_prefix('(')?.strip_suffix(')')?;
        let (a, b) = inner.split_once(',')?;
        Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
    }
}

impl VertexId for String {
    fn canonical(&self) -> String {
        self.clone()
    }

    fn from_canonical(text: &str) -> Option<Self> {
        Some(text.to_string())
    }
}

/// A labelled edge `source --label--> target`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge<V> {
    pub source: V,
    pub label: Symbol,
    pub target: V,
}

impl<V: VertexId> Edge<V> {
    pub fn new(source: V, label: Symbol, target: V) -> Self {
        Edge {
            source,
            label,
            target,
        }
    }

    pub fn canonical(&self) -> String {
        format!(
            "({}, {}, {})",
            self.source.canonical(),
            self.label,
            self.target.canonical()
        )
    }
}

/// Constants a graph family has proven about itself globally.
///
/// Explicit graphs declare nothing; windows checks are used instead.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DeclaredConstants {
    /// Every edge `x -> y` has a return path `y -> x` of at most this length.
    pub conn_k: Option<usize>,
    /// Exactly one out-edge per (vertex, label). Implies denseness with `D = 0`
    /// for any forbidden set over the alphabet.
    pub fully_deterministic: bool,
    /// Spectral radius of the uniform-weight chain, when known in closed form.
    pub rho: Option<f64>,
}

/// The abstraction every algorithm in this crate works on.
///
/// `out_edges` must be a pure function of its argument. Implementors may
/// return edges in any order; [`LabelledGraph::expand`] sorts them by label,
/// then by the canonical form of the target.
pub trait LabelledGraph: Sync {
    type Vertex: VertexId;

    fn alphabet(&self) -> &Alphabet;

    fn roots(&self) -> Vec<Self::Vertex>;

    fn out_edges(&self, vertex: &Self::Vertex) -> Result<Vec<(Symbol, Self::Vertex)>>;

    fn declared(&self) -> DeclaredConstants {
        DeclaredConstants::default()
    }

    /// Whether the whole graph is known to be finite.
    fn is_finite(&self) -> bool {
        false
    }

    /// A lower bound on the forward distance `from -> to`, when the family
    /// knows one cheaply. Used to prune counting frontiers.
    fn distance_lower_bound(&self, _from: &Self::Vertex, _to: &Self::Vertex) -> Option<usize> {
        None
    }

    fn expand(&self, vertex: &Self::Vertex) -> Result<Vec<Edge<Self::Vertex>>> {
        let mut out = self.out_edges(vertex)?;
        out.sort_by(|a, b| match a.0.cmp(&b.0) {
            Ordering::Equal => a.1.canonical().cmp(&b.1.canonical()),
            other => other,
        });
        Ok(out
            .into_iter()
            .map(|(label, target)| Edge {
                source: vertex.clone(),
                label,
                target,
            })
            .collect())
    }
}

impl<G: LabelledGraph + ?Sized> LabelledGraph for &G {
    type Vertex = G::Vertex;

    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }

    fn roots(&self) -> Vec<Self::Vertex> {
        (**self).roots()
    }

    fn out_edges(&self, vertex: &Self::Vertex) -> Result<Vec<(Symbol, Self::Vertex)>> {
        (**self).out_edges(vertex)
    }

    fn declared(&self) -> DeclaredConstants {
        (**self).declared()
    }

    fn is_finite(&self) -> bool {
        (**self).is_finite()
    }

    fn distance_lower_bound(&self, from: &Self::Vertex, to: &Self::Vertex) -> Option<usize> {
        (**self).distance_lower_bound(from, to)
    }
}

/// A chain of edges with `e_i.target == e_{i+1}.source`. The empty path sits
/// at `start` and reads the empty word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path<V> {
    start: V,
    edges: Vec<Edge<V>>,
}

impl<V: VertexId> Path<V> {
    pub fn empty(start: V) -> Self {
        Path {
            start,
            edges: Vec::new(),
        }
    }

    pub fn push(&mut self, edge: Edge<V>) -> Result<()> {
        if edge.source != *self.end() {
            return Err(Error::Parse(format!(
                "edge {} does not continue a path ending at {}",
                edge.canonical(),
                self.end().canonical()
            )));
        }
        self.edges.push(edge);
        Ok(())
    }

    pub fn start(&self) -> &V {
        &self.start
    }

    pub fn end(&self) -> &V {
        self.edges.last().map(|e| &e.target).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[Edge<V>] {
        &self.edges
    }

    pub fn label(&self) -> Vec<Symbol> {
        self.edges.iter().map(|e| e.label).collect()
    }
}

/// Cap on the number of distinct vertices one exploration may touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget(pub usize);

impl Budget {
    pub const DEFAULT: Budget = Budget(1_000_000);

    pub(crate) fn check(self, count: usize, context: impl FnOnce() -> String) -> Result<()> {
        if count > self.0 {
            Err(Error::BudgetExceeded {
                limit: self.0,
                context: context(),
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_is_sorted_and_deduplicated() {
        let a = Alphabet::new("baab".chars()).unwrap();
        assert_eq!(a.symbols(), &[Symbol('a'), Symbol('b')]);
        assert_eq!(a.index_of(Symbol('b')), Some(1));
        assert!(Alphabet::new("".chars()).is_err());
    }

    #[test]
    fn parse_word_rejects_foreign_letters() {
        let a = Alphabet::new("ab".chars()).unwrap();
        assert_eq!(a.parse_word("ab").unwrap(), vec![Symbol('a'), Symbol('b')]);
        assert!(matches!(
            a.parse_word("ac"),
            Err(Error::UnknownSymbol { symbol: 'c', .. })
        ));
    }

    #[test]
    fn words_of_length_enumerates_everything() {
        let a = Alphabet::new("ab".chars()).unwrap();
        assert_eq!(a.words_of_length(0).len(), 1);
        assert_eq!(a.words_of_length(3).len(), 8);
    }

    #[test]
    fn canonical_forms_round_trip() {
        for v in [-7i64, 0, 12] {
            assert_eq!(i64::from_canonical(&v.canonical()), Some(v));
        }
        let p = (3i64, -4i64);
        assert_eq!(p.canonical(), "(3,-4)");
        assert_eq!(<(i64, i64)>::from_canonical(&p.canonical()), Some(p));
    }

    #[test]
    fn path_rejects_broken_chains() {
        let mut p = Path::empty(0i64);
        assert_eq!(p.label(), vec![]);
        p.push(Edge::new(0, Symbol('r'), 1)).unwrap();
        assert!(p.push(Edge::new(0, Symbol('r'), 1)).is_err());
        assert_eq!(p.end(), &1);
        assert_eq!(p.len(), 1);
    }
}
