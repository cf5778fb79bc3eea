//! Forbidden factors.
//!
//! A finite set `F` of nonempty words is compiled into a factor automaton
//! (a prefix trie of `F` closed under failure transitions). Running it over a
//! word lands in a dead state exactly at the positions where some word of `F`
//! ends. The product of a graph with this automaton, with dead states pruned,
//! has as its paths exactly the paths of the graph whose labels avoid `F`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    follow_word, shortest_path_to, word_to_string, Alphabet, Budget, DeclaredConstants,
    LabelledGraph, Path, Scope, Symbol, VertexId, Window,
};

/// A nonempty finite set of nonempty words.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ForbiddenSet {
    words: Vec<Vec<Symbol>>,
}

impl ForbiddenSet {
    pub fn new(words: Vec<Vec<Symbol>>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::EmptyForbiddenSet);
        }
        if words.iter().any(Vec::is_empty) {
            return Err(Error::EmptyWord);
        }
        let mut words = words;
        words.sort();
        words.dedup();
        Ok(ForbiddenSet { words })
    }

    /// Parses each word letter by letter against `alphabet`.
    pub fn parse<S: AsRef<str>>(alphabet: &Alphabet, words: &[S]) -> Result<Self> {
        let parsed = words
            .iter()
            .map(|w| alphabet.parse_word(w.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        ForbiddenSet::new(parsed)
    }

    pub fn words(&self) -> &[Vec<Symbol>] {
        &self.words
    }

    /// Length of the longest forbidden word.
    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_len(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.words.iter().map(|w| word_to_string(w)).collect()
    }

    /// Whether some forbidden word occurs as a factor of `word`.
    pub fn occurs_in(&self, word: &[Symbol]) -> bool {
        self.words
            .iter()
            .any(|f| word.windows(f.len()).any(|win| win == f.as_slice()))
    }
}

impl fmt::Display for ForbiddenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_strings().join(","))
    }
}

/// State of a [`FactorAutomaton`]. State 0 is the start state (empty prefix).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateId(pub u32);

impl StateId {
    pub const START: StateId = StateId(0);
}

#[derive(Clone, Debug)]
pub struct FactorAutomaton {
    alphabet: Alphabet,
    forbidden: ForbiddenSet,
    /// `delta[state][symbol index]`
    delta: Vec<Vec<u32>>,
    dead: Vec<bool>,
    prefixes: Vec<Vec<Symbol>>,
}

impl FactorAutomaton {
    pub fn new(forbidden: &ForbiddenSet, alphabet: &Alphabet) -> Result<Self> {
        let k = alphabet.len();
        let mut children: Vec<Vec<Option<u32>>> = vec![vec![None; k]];
        let mut dead = vec![false];
        let mut prefixes = vec![Vec::new()];
        for word in forbidden.words() {
            let mut s = 0usize;
            for (i, &a) in word.iter().enumerate() {
                let ai = alphabet.index_of(a).ok_or_else(|| Error::UnknownSymbol {
                    symbol: a.0,
                    context: word_to_string(word),
                })?;
                s = match children[s][ai] {
                    Some(t) => t as usize,
                    None => {
                        let t = children.len();
                        children.push(vec![None; k]);
                        dead.push(false);
                        prefixes.push(word[..=i].to_vec());
                        children[s][ai] = Some(t as u32);
                        t
                    }
                };
            }
            dead[s] = true;
        }

        let n = children.len();
        let mut delta = vec![vec![0u32; k]; n];
        let mut fail = vec![0u32; n];
        let mut queue = VecDeque::new();
        for a in 0..k {
            match children[0][a] {
                Some(t) => {
                    delta[0][a] = t;
                    queue.push_back(t as usize);
                }
                None => delta[0][a] = 0,
            }
        }
        while let Some(u) = queue.pop_front() {
            let f = fail[u] as usize;
            dead[u] = dead[u] || dead[f];
            for a in 0..k {
                match children[u][a] {
                    Some(t) => {
                        fail[t as usize] = delta[f][a];
                        delta[u][a] = t;
                        queue.push_back(t as usize);
                    }
                    None => delta[u][a] = delta[f][a],
                }
            }
        }
        Ok(FactorAutomaton {
            alphabet: alphabet.clone(),
            forbidden: forbidden.clone(),
            delta,
            dead,
            prefixes,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn forbidden(&self) -> &ForbiddenSet {
        &self.forbidden
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn is_dead(&self, s: StateId) -> bool {
        self.dead[s.0 as usize]
    }

    /// The trie prefix a state stands for.
    pub fn prefix(&self, s: StateId) -> &[Symbol] {
        &self.prefixes[s.0 as usize]
    }

    /// Transition on `a`; `None` when `a` is not in the alphabet.
    pub fn step(&self, s: StateId, a: Symbol) -> Option<StateId> {
        let ai = self.alphabet.index_of(a)?;
        Some(StateId(self.delta[s.0 as usize][ai]))
    }

    /// Position (number of letters read) at which the run first enters a
    /// dead state, if it does.
    pub fn first_occurrence_end(&self, word: &[Symbol]) -> Option<usize> {
        let mut s = StateId::START;
        for (i, &a) in word.iter().enumerate() {
            s = self.step(s, a)?;
            if self.is_dead(s) {
                return Some(i + 1);
            }
        }
        None
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        self.first_occurrence_end(word).is_none()
    }
}

/// Vertex of a product graph: a base vertex paired with the automaton state
/// reached by the label read so far.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductVertex<V> {
    pub base: V,
    pub state: StateId,
}

impl<V: VertexId> VertexId for ProductVertex<V> {
    fn canonical(&self) -> String {
        format!("{}@{}", self.base.canonical(), self.state.0)
    }

    fn from_canonical(text: &str) -> Option<Self> {
        let (base, state) = text.rsplit_once('@')?;
        Some(ProductVertex {
            base: V::from_canonical(base)?,
            state: StateId(state.parse().ok()?),
        })
    }
}

/// Lazy product of a graph with a factor automaton. Edges into dead states
/// are dropped, so every path avoids `F`.
#[derive(Clone, Debug)]
pub struct ProductGraph<G> {
    base: G,
    automaton: FactorAutomaton,
}

impl<G: LabelledGraph> ProductGraph<G> {
    pub fn new(base: G, automaton: FactorAutomaton) -> Result<Self> {
        if base.alphabet() != automaton.alphabet() {
            return Err(Error::Parse(format!(
                "graph alphabet {} differs from automaton alphabet {}",
                base.alphabet(),
                automaton.alphabet()
            )));
        }
        Ok(ProductGraph { base, automaton })
    }

    /// Builds the automaton for `forbidden` over the graph's alphabet.
    pub fn with_forbidden(base: G, forbidden: &ForbiddenSet) -> Result<Self> {
        let automaton = FactorAutomaton::new(forbidden, base.alphabet())?;
        ProductGraph::new(base, automaton)
    }

    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn automaton(&self) -> &FactorAutomaton {
        &self.automaton
    }

    pub fn start(&self, v: G::Vertex) -> ProductVertex<G::Vertex> {
        ProductVertex {
            base: v,
            state: StateId::START,
        }
    }
}

impl<G: LabelledGraph> LabelledGraph for ProductGraph<G> {
    type Vertex = ProductVertex<G::Vertex>;

    fn alphabet(&self) -> &Alphabet {
        self.base.alphabet()
    }

    fn roots(&self) -> Vec<Self::Vertex> {
        self.base
            .roots()
            .into_iter()
            .map(|v| self.start(v))
            .collect()
    }

    fn out_edges(&self, v: &Self::Vertex) -> Result<Vec<(Symbol, Self::Vertex)>> {
        if self.automaton.is_dead(v.state) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for (a, target) in self.base.out_edges(&v.base)? {
            let s = self
                .automaton
                .step(v.state, a)
                .ok_or_else(|| Error::UnknownSymbol {
                    symbol: a.0,
                    context: format!("edge label at {}", v.base.canonical()),
                })?;
            if !self.automaton.is_dead(s) {
                out.push((
                    a,
                    ProductVertex {
                        base: target,
                        state: s,
                    },
                ));
            }
        }
        Ok(out)
    }

    fn declared(&self) -> DeclaredConstants {
        DeclaredConstants::default()
    }

    fn is_finite(&self) -> bool {
        self.base.is_finite()
    }

    fn distance_lower_bound(&self, from: &Self::Vertex, to: &Self::Vertex) -> Option<usize> {
        self.base.distance_lower_bound(&from.base, &to.base)
    }
}

/// Why a vertex counts as close to a forbidden word.
#[derive(Clone, Debug)]
pub struct DensenessWitness<V> {
    /// Path from the vertex to the start of the occurrence, of length `<= D`.
    pub approach: Path<V>,
    pub word: Vec<Symbol>,
    /// Path labelled `word` starting at the end of `approach`.
    pub reading: Path<V>,
}

#[derive(Clone, Debug)]
pub struct DensenessCertificate<V> {
    /// Largest approach length among the witnesses.
    pub d: usize,
    pub scope: Scope,
    pub witnesses: BTreeMap<V, DensenessWitness<V>>,
}

#[derive(Clone, Debug)]
pub enum Denseness<V> {
    Certified(DensenessCertificate<V>),
    /// Window vertices with no forbidden word starting within distance `D`.
    Uncovered(Vec<V>),
}

impl<V> Denseness<V> {
    pub fn certificate(&self) -> Option<&DensenessCertificate<V>> {
        match self {
            Denseness::Certified(c) => Some(c),
            Denseness::Uncovered(_) => None,
        }
    }
}

fn nearest_occurrence<G: LabelledGraph>(
    g: &G,
    forbidden: &ForbiddenSet,
    x: &G::Vertex,
    d: usize,
    budget: Budget,
) -> Result<Option<DensenessWitness<G::Vertex>>> {
    let mut found = None;
    let approach = shortest_path_to(
        g,
        x,
        |y| {
            for w in forbidden.words() {
                if let Some(reading) = follow_word(g, y, w)? {
                    found = Some((w.clone(), reading));
                    return Ok(true);
                }
            }
            Ok(false)
        },
        d,
        budget,
    )?;
    Ok(approach.map(|approach| {
        let (word, reading) = found.expect("goal recorded the occurrence");
        DensenessWitness {
            approach,
            word,
            reading,
        }
    }))
}

/// For each window vertex `x`, looks for `y` with `d+(x, y) <= d` from which
/// some forbidden word labels a path. Vertices are searched in parallel; the
/// result is ordered canonically.
pub fn certify_denseness<G: LabelledGraph>(
    g: &G,
    forbidden: &ForbiddenSet,
    d: usize,
    window: &Window<G::Vertex>,
    budget: Budget,
) -> Result<Denseness<G::Vertex>> {
    let vertices: Vec<&G::Vertex> = window.vertices().collect();
    let found = vertices
        .par_iter()
        .map(|x| nearest_occurrence(g, forbidden, x, d, budget))
        .collect::<Result<Vec<_>>>()?;
    let mut witnesses = BTreeMap::new();
    let mut uncovered = Vec::new();
    for (x, w) in vertices.into_iter().zip(found) {
        match w {
            Some(w) => {
                witnesses.insert(x.clone(), w);
            }
            None => uncovered.push(x.clone()),
        }
    }
    if !uncovered.is_empty() {
        return Ok(Denseness::Uncovered(uncovered));
    }
    let d = witnesses
        .values()
        .map(|w| w.approach.len())
        .max()
        .unwrap_or(0);
    Ok(Denseness::Certified(DensenessCertificate {
        d,
        scope: Scope::of(window),
        witnesses,
    }))
}

/// Smallest `D <= d_max` for which [`certify_denseness`] succeeds.
///
/// Each witness approach is a shortest path, so the maximal approach length
/// of the certificate at `d_max` is already the minimum.
pub fn estimate_denseness_constant<G: LabelledGraph>(
    g: &G,
    forbidden: &ForbiddenSet,
    window: &Window<G::Vertex>,
    d_max: usize,
    budget: Budget,
) -> Result<Option<usize>> {
    Ok(certify_denseness(g, forbidden, d_max, window, budget)?
        .certificate()
        .map(|c| c.d))
}

/// Forbidden words that label no path starting in the window. Such words
/// may not be factors of the language at all.
pub fn unwitnessed_words<G: LabelledGraph>(
    g: &G,
    forbidden: &ForbiddenSet,
    window: &Window<G::Vertex>,
) -> Result<Vec<Vec<Symbol>>> {
    let mut missing = Vec::new();
    'words: for w in forbidden.words() {
        for v in window.vertices() {
            if follow_word(g, v, w)?.is_some() {
                continue 'words;
            }
        }
        missing.push(w.clone());
    }
    Ok(missing)
}
