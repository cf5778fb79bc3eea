//! Schreier coset graphs of group actions.
//!
//! A [`CosetAction`] names cosets `Kg` by canonical descriptors and moves
//! them by the generator attached to each letter. [`SchreierGraph`] turns an
//! action into a lazy, fully deterministic [`LabelledGraph`] whose loop
//! language at the root coset is the word problem of the pair `(G, K)`.
//! With `K` trivial this is the ordinary word problem of `G`.
//!
//! Built-in families carry formal inverses in their alphabets, so every edge
//! is undone by one step and the declared connectivity constant is 1.
//!
//! | family             | group, subgroup   | alphabet    | descriptor              |
//! |--------------------|-------------------|-------------|-------------------------|
//! | `line_Z`           | Z, trivial        | `l r`       | integer                 |
//! | `grid_Z2`          | Z², trivial       | `d l r u`   | `(x,y)`                 |
//! | `free2_mod_cyclic` | F(a,b), ⟨a⟩       | `A B a b`   | reduced word, `e` empty |
//!
//! In `free2_mod_cyclic` the capital letters are the inverses, and the
//! descriptor of `Kw` is the free reduction of `w` with its leading powers
//! of `a` removed.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::census::{count_words, entropy_gap_report, GapOptions, GapReport, WordCensus};
use crate::chain::CertificateInputs;
use crate::error::{Error, Result};
use crate::factor::{estimate_denseness_constant, ForbiddenSet};
use crate::graph::{
    check_deterministic, check_fully_deterministic, check_uniform_connectedness, forward_ball,
    Alphabet, Budget, DeclaredConstants, LabelledGraph, Scope, Symbol, VertexId,
};

/// A right action of a group on coset descriptors.
pub trait CosetAction: Sync {
    type Descriptor: VertexId;

    fn alphabet(&self) -> &Alphabet;

    /// Descriptor of the subgroup itself.
    fn root(&self) -> Self::Descriptor;

    /// `Kg -> Kg psi(a)`.
    fn act(&self, d: &Self::Descriptor, a: Symbol) -> Result<Self::Descriptor>;

    /// The letter acting as the inverse of `a`, if the alphabet has one.
    fn inverse(&self, _a: Symbol) -> Option<Symbol> {
        None
    }

    /// Global constants proven for the family. Schreier graphs are always
    /// fully deterministic.
    fn declared(&self) -> DeclaredConstants {
        DeclaredConstants {
            fully_deterministic: true,
            ..Default::default()
        }
    }

    fn distance_lower_bound(
        &self,
        _from: &Self::Descriptor,
        _to: &Self::Descriptor,
    ) -> Option<usize> {
        None
    }
}

/// Lazy Schreier graph of an action: `expand(v) = [(a, act(v, a)) for a in alphabet]`.
#[derive(Clone, Debug)]
pub struct SchreierGraph<A> {
    action: A,
}

impl<A: CosetAction> SchreierGraph<A> {
    pub fn new(action: A) -> Self {
        SchreierGraph { action }
    }

    pub fn action(&self) -> &A {
        &self.action
    }

    pub fn root(&self) -> A::Descriptor {
        self.action.root()
    }
}

impl<A: CosetAction> LabelledGraph for SchreierGraph<A> {
    type Vertex = A::Descriptor;

    fn alphabet(&self) -> &Alphabet {
        self.action.alphabet()
    }

    fn roots(&self) -> Vec<Self::Vertex> {
        vec![self.action.root()]
    }

    fn out_edges(&self, v: &Self::Vertex) -> Result<Vec<(Symbol, Self::Vertex)>> {
        self.action
            .alphabet()
            .symbols()
            .iter()
            .map(|&a| Ok((a, self.action.act(v, a)?)))
            .collect()
    }

    fn declared(&self) -> DeclaredConstants {
        self.action.declared()
    }

    fn distance_lower_bound(&self, from: &Self::Vertex, to: &Self::Vertex) -> Option<usize> {
        self.action.distance_lower_bound(from, to)
    }
}

macro_rules! static_alphabet {
    ($letters:expr) => {{
        static CELL: OnceLock<Alphabet> = OnceLock::new();
        CELL.get_or_init(|| Alphabet::new($letters).expect("static alphabet"))
    }};
}

fn inverse_closed() -> DeclaredConstants {
    DeclaredConstants {
        conn_k: Some(1),
        fully_deterministic: true,
        rho: None,
    }
}

fn pair_inverse(a: Symbol, pairs: &[(char, char)]) -> Option<Symbol> {
    pairs.iter().find_map(|&(x, y)| {
        if a.0 == x {
            Some(Symbol(y))
        } else if a.0 == y {
            Some(Symbol(x))
        } else {
            None
        }
    })
}

fn foreign(a: Symbol, family: &str) -> Error {
    Error::UnknownSymbol {
        symbol: a.0,
        context: format!("{family} generators"),
    }
}

/// The integers with `r: n -> n+1` and `l: n -> n-1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LineZ;

impl CosetAction for LineZ {
    type Descriptor = i64;

    fn alphabet(&self) -> &Alphabet {
        static_alphabet!(['l', 'r'])
    }

    fn root(&self) -> i64 {
        0
    }

    fn act(&self, n: &i64, a: Symbol) -> Result<i64> {
        match a.0 {
            'r' => Ok(n + 1),
            'l' => Ok(n - 1),
            _ => Err(foreign(a, "line_Z")),
        }
    }

    fn inverse(&self, a: Symbol) -> Option<Symbol> {
        pair_inverse(a, &[('l', 'r')])
    }

    fn declared(&self) -> DeclaredConstants {
        DeclaredConstants {
            rho: Some(1.0),
            ..inverse_closed()
        }
    }

    fn distance_lower_bound(&self, from: &i64, to: &i64) -> Option<usize> {
        Some(from.abs_diff(*to) as usize)
    }
}

/// The square lattice with `u, d, r, l` moving up, down, right and left.
#[derive(Clone, Copy, Debug, Default)]
pub struct GridZ2;

impl CosetAction for GridZ2 {
    type Descriptor = (i64, i64);

    fn alphabet(&self) -> &Alphabet {
        static_alphabet!(['d', 'l', 'r', 'u'])
    }

    fn root(&self) -> (i64, i64) {
        (0, 0)
    }

    fn act(&self, &(x, y): &(i64, i64), a: Symbol) -> Result<(i64, i64)> {
        match a.0 {
            'u' => Ok((x, y + 1)),
            'd' => Ok((x, y - 1)),
            'r' => Ok((x + 1, y)),
            'l' => Ok((x - 1, y)),
            _ => Err(foreign(a, "grid_Z2")),
        }
    }

    fn inverse(&self, a: Symbol) -> Option<Symbol> {
        pair_inverse(a, &[('l', 'r'), ('d', 'u')])
    }

    fn declared(&self) -> DeclaredConstants {
        DeclaredConstants {
            rho: Some(1.0),
            ..inverse_closed()
        }
    }

    fn distance_lower_bound(&self, from: &(i64, i64), to: &(i64, i64)) -> Option<usize> {
        Some((from.0.abs_diff(to.0) + from.1.abs_diff(to.1)) as usize)
    }
}

/// Reduced word naming a right coset of `⟨a⟩` in the free group on `a, b`.
/// Never starts with `a` or `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CosetWord(String);

impl CosetWord {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn is_free_letter(c: char) -> bool {
    matches!(c, 'a' | 'A' | 'b' | 'B')
}

fn free_inverse(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

impl VertexId for CosetWord {
    fn canonical(&self) -> String {
        if self.0.is_empty() {
            "e".to_string()
        } else {
            self.0.clone()
        }
    }

    fn from_canonical(text: &str) -> Option<Self> {
        if text == "e" {
            return Some(CosetWord(String::new()));
        }
        let chars: Vec<char> = text.chars().collect();
        let valid = !chars.is_empty()
            && chars.iter().all(|&c| is_free_letter(c))
            && !matches!(chars[0], 'a' | 'A')
            && chars.windows(2).all(|w| w[1] != free_inverse(w[0]));
        valid.then(|| CosetWord(text.to_string()))
    }
}

/// Right cosets of the cyclic subgroup `⟨a⟩` in the free group `F(a, b)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Free2ModCyclic;

impl CosetAction for Free2ModCyclic {
    type Descriptor = CosetWord;

    fn alphabet(&self) -> &Alphabet {
        static_alphabet!(['A', 'B', 'a', 'b'])
    }

    fn root(&self) -> CosetWord {
        CosetWord(String::new())
    }

    fn act(&self, d: &CosetWord, a: Symbol) -> Result<CosetWord> {
        if !is_free_letter(a.0) {
            return Err(foreign(a, "free2_mod_cyclic"));
        }
        let mut w = d.0.clone();
        if w.is_empty() && matches!(a.0, 'a' | 'A') {
            return Ok(CosetWord(w));
        }
        if w.ends_with(free_inverse(a.0)) {
            w.pop();
        } else {
            w.push(a.0);
        }
        // cancellation can expose a leading power of a
        let stripped = w.trim_start_matches(['a', 'A']).to_string();
        Ok(CosetWord(stripped))
    }

    fn inverse(&self, a: Symbol) -> Option<Symbol> {
        pair_inverse(a, &[('a', 'A'), ('b', 'B')])
    }

    fn declared(&self) -> DeclaredConstants {
        inverse_closed()
    }

    /// One step changes the descriptor length by at most one.
    fn distance_lower_bound(&self, from: &CosetWord, to: &CosetWord) -> Option<usize> {
        Some(from.len().abs_diff(to.len()))
    }
}

/// A user-supplied action on text descriptors. No group-theoretic checks are
/// made; window checks are the only validation.
pub struct TextAction<F> {
    alphabet: Alphabet,
    root: String,
    act: F,
    declared: DeclaredConstants,
}

impl<F> TextAction<F>
where
    F: Fn(&str, Symbol) -> std::result::Result<String, String> + Sync,
{
    pub fn new(alphabet: Alphabet, root: impl Into<String>, act: F) -> Self {
        TextAction {
            alphabet,
            root: root.into(),
            act,
            declared: DeclaredConstants {
                fully_deterministic: true,
                ..Default::default()
            },
        }
    }

    /// Declares a connectivity constant the caller has proven.
    pub fn with_conn_k(mut self, conn_k: usize) -> Self {
        self.declared.conn_k = Some(conn_k);
        self
    }
}

impl<F> fmt::Debug for TextAction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TextAction")
            .field("alphabet", &self.alphabet)
            .field("root", &self.root)
            .finish()
    }
}

impl<F> CosetAction for TextAction<F>
where
    F: Fn(&str, Symbol) -> std::result::Result<String, String> + Sync,
{
    type Descriptor = String;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn root(&self) -> String {
        self.root.clone()
    }

    fn act(&self, d: &String, a: Symbol) -> Result<String> {
        if !self.alphabet.contains(a) {
            return Err(foreign(a, "action"));
        }
        (self.act)(d, a).map_err(|message| Error::Expansion {
            vertex: d.clone(),
            message,
        })
    }

    fn declared(&self) -> DeclaredConstants {
        self.declared.clone()
    }
}

/// Names of the built-in families, as used on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "line_Z")]
    LineZ,
    #[serde(rename = "grid_Z2")]
    GridZ2,
    #[serde(rename = "free2_mod_cyclic")]
    Free2ModCyclic,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::LineZ, Family::GridZ2, Family::Free2ModCyclic];

    pub fn name(self) -> &'static str {
        match self {
            Family::LineZ => "line_Z",
            Family::GridZ2 => "grid_Z2",
            Family::Free2ModCyclic => "free2_mod_cyclic",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown family {s:?}; expected line_Z, grid_Z2 or free2_mod_cyclic"
                ))
            })
    }
}

/// Counts of words of each length `<= n` that act trivially on the root
/// coset, i.e. the loop language at the root, optionally avoiding `forbidden`.
pub fn word_problem_census<A: CosetAction>(
    graph: &SchreierGraph<A>,
    n: usize,
    forbidden: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<WordCensus> {
    let root = graph.root();
    count_words(graph, &root, &root, n, forbidden, budget)
}

#[derive(Clone, Debug)]
pub struct SensitivityOptions {
    /// Tail window of the count fits; half the horizon when `None`.
    pub tail: Option<usize>,
    /// Radius of the ball around the root on which the hypotheses are checked.
    pub window_radius: usize,
    /// Largest approach distance tried when certifying denseness.
    pub d_max: usize,
    pub budget: Budget,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        SensitivityOptions {
            tail: None,
            window_radius: 4,
            d_max: 3,
            budget: Budget::DEFAULT,
        }
    }
}

/// Hypotheses checked on the window around the root.
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisChecks {
    pub scope: Scope,
    pub deterministic: bool,
    pub fully_deterministic: bool,
    #[serde(rename = "conn_K")]
    pub conn_k: Option<usize>,
    pub connectedness_ok: bool,
    /// Denseness constant certified on the window.
    #[serde(rename = "D")]
    pub d: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    pub alphabet: String,
    pub root: String,
    pub forbidden: Vec<String>,
    pub horizon: usize,
    pub checks: HypothesisChecks,
    /// Constants the certificate was computed from, when one was attempted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_inputs: Option<CertificateInputs>,
    pub report: GapReport,
}

impl SensitivityReport {
    pub fn is_certified(&self) -> bool {
        self.report.certificate.is_some()
    }
}

/// Word problem census with and without `forbidden`, together with a bound
/// on the restricted growth under the uniform chain.
///
/// The bound uses `alpha = 1/|Σ|`, `R` the longest forbidden word, the
/// declared `conn_K` and the `D` certified on the window. When the family
/// declares its spectral radius the general bound is used; otherwise the
/// stochastic one, which holds for any fully deterministic graph.
/// Failed hypotheses produce warnings and no certificate.
pub fn growth_sensitivity_report<A: CosetAction>(
    graph: &SchreierGraph<A>,
    forbidden: &ForbiddenSet,
    n: usize,
    opts: &SensitivityOptions,
) -> Result<SensitivityReport> {
    let root = graph.root();
    let declared = graph.declared();
    let window = forward_ball(graph, &root, opts.window_radius, opts.budget)?;

    let deterministic = check_deterministic(&window).is_ok();
    let fully_deterministic = deterministic && check_fully_deterministic(graph, &window).is_ok();
    let connectedness_ok = match declared.conn_k {
        Some(k) => check_uniform_connectedness(graph, &window, k, opts.budget)?.is_ok(),
        None => false,
    };
    let d = estimate_denseness_constant(graph, forbidden, &window, opts.d_max, opts.budget)?;
    let checks = HypothesisChecks {
        scope: Scope::of(&window),
        deterministic,
        fully_deterministic,
        conn_k: declared.conn_k,
        connectedness_ok,
        d,
    };

    let mut warnings = Vec::new();
    if !fully_deterministic {
        warnings.push("graph is not fully deterministic on the window".to_string());
    }
    match declared.conn_k {
        None => warnings.push("no connectivity constant declared".to_string()),
        Some(k) if !connectedness_ok => {
            warnings.push(format!("declared conn_K = {k} fails on the window"))
        }
        Some(_) => {}
    }
    if d.is_none() {
        warnings.push(format!(
            "forbidden set is not dense within distance {} on the window",
            opts.d_max
        ));
    }

    let sigma = graph.alphabet().len();
    let alpha = 1.0 / sigma as f64;
    let certificate_inputs = match (warnings.is_empty(), d, declared.conn_k, declared.rho) {
        (true, Some(d), Some(k), Some(rho)) => Some(
            CertificateInputs::general(alpha, d, forbidden.max_len(), k, rho).with_sigma(sigma),
        ),
        (true, Some(d), _, None) => {
            Some(CertificateInputs::stochastic(alpha, d, forbidden.max_len()).with_sigma(sigma))
        }
        _ => None,
    };
    let gap_opts = GapOptions {
        tail: opts.tail,
        budget: opts.budget,
        certificate: certificate_inputs.clone(),
        witness_radius: opts.window_radius,
    };
    let mut report = entropy_gap_report(graph, &root, &root, forbidden, n, &gap_opts)?;
    warnings.append(&mut report.warnings);
    report.warnings = warnings;

    Ok(SensitivityReport {
        alphabet: graph.alphabet().symbols().iter().map(|a| a.0).collect(),
        root: root.canonical(),
        forbidden: forbidden.to_strings(),
        horizon: n,
        checks,
        certificate_inputs,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::forward_ball;

    /// Free reduction of a word over `a b A B`.
    fn reduce(w: &str) -> String {
        let mut out: Vec<char> = Vec::new();
        for c in w.chars() {
            if out.last() == Some(&free_inverse(c)) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        out.into_iter().collect()
    }

    fn inverse_word(w: &str) -> String {
        w.chars().rev().map(free_inverse).collect()
    }

    /// `K u = K v` iff `u v^-1` reduces to a power of `a`.
    fn same_coset(u: &str, v: &str) -> bool {
        reduce(&format!("{u}{}", inverse_word(v)))
            .chars()
            .all(|c| c == 'a' || c == 'A')
    }

    fn words(max: usize) -> Vec<String> {
        let mut all = vec![String::new()];
        let mut layer = vec![String::new()];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w| "ABab".chars().map(move |c| format!("{w}{c}")))
                .collect();
            all.extend(layer.iter().cloned());
        }
        all
    }

    fn act_word(w: &str) -> CosetWord {
        w.chars().fold(Free2ModCyclic.root(), |d, c| {
            Free2ModCyclic.act(&d, Symbol(c)).unwrap()
        })
    }

    #[test]
    fn free2_cosets_match_reduced_word_oracle() {
        let ws = words(4);
        let descriptors: Vec<CosetWord> = ws.iter().map(|w| act_word(w)).collect();
        for (i, u) in ws.iter().enumerate() {
            for (j, v) in ws.iter().enumerate().skip(i) {
                assert_eq!(
                    descriptors[i] == descriptors[j],
                    same_coset(u, v),
                    "{u} {v}"
                );
            }
        }
        for w in words(5) {
            assert_eq!(
                act_word(&w) == Free2ModCyclic.root(),
                same_coset(&w, ""),
                "{w}"
            );
        }
    }

    #[test]
    fn root_has_a_loops() {
        let g = SchreierGraph::new(Free2ModCyclic);
        let e = g.expand(&g.root()).unwrap();
        let loops: String = e
            .iter()
            .filter(|e| e.target == e.source)
            .map(|e| e.label.0)
            .collect();
        assert_eq!(loops, "Aa");
        assert_eq!(CosetWord::from_canonical("aB"), None);
        assert_eq!(act_word("ab").canonical(), "b");
        assert_eq!(act_word("bAB").canonical(), "bAB");
    }

    fn assert_inverse_closed<A: CosetAction>(action: A, radius: usize) {
        let g = SchreierGraph::new(action);
        let w = forward_ball(&g, &g.root(), radius, Budget::DEFAULT).unwrap();
        for d in w.vertices() {
            for &a in g.alphabet().symbols() {
                let inv = g.action().inverse(a).unwrap();
                let back = g.action().act(&g.action().act(d, a).unwrap(), inv).unwrap();
                assert_eq!(&back, d);
            }
        }
        assert!(check_fully_deterministic(&g, &w).is_ok());
        assert!(check_uniform_connectedness(&g, &w, 1, Budget::DEFAULT)
            .unwrap()
            .is_ok());
    }

    #[test]
    fn families_are_inverse_closed_and_fully_deterministic() {
        assert_inverse_closed(LineZ, 6);
        assert_inverse_closed(GridZ2, 4);
        assert_inverse_closed(Free2ModCyclic, 4);
    }

    #[test]
    fn line_word_problem() {
        let g = SchreierGraph::new(LineZ);
        let c = word_problem_census(&g, 4, None, Budget::DEFAULT).unwrap();
        assert_eq!(c.counts_u64().unwrap(), vec![1, 0, 2, 0, 6]);
        let f = ForbiddenSet::parse(g.alphabet(), &["rr"]).unwrap();
        let c = word_problem_census(&g, 4, Some(&f), Budget::DEFAULT).unwrap();
        // rlrl, rllr, lrlr
        assert_eq!(c.counts_u64().unwrap(), vec![1, 0, 2, 0, 3]);
    }

    #[test]
    fn free2_word_problem_matches_oracle() {
        let g = SchreierGraph::new(Free2ModCyclic);
        let c = word_problem_census(&g, 5, None, Budget::DEFAULT)
            .unwrap()
            .counts_u64()
            .unwrap();
        let ws = words(5);
        for (n, &count) in c.iter().enumerate() {
            let oracle = ws
                .iter()
                .filter(|w| w.len() == n && same_coset(w, ""))
                .count() as u64;
            assert_eq!(count, oracle, "length {n}");
        }
        assert_eq!(c[1], 2);
    }

    #[test]
    fn foreign_letters_are_rejected() {
        let g = SchreierGraph::new(LineZ);
        assert!(ForbiddenSet::parse(g.alphabet(), &["ru"]).is_err());
        assert!(LineZ.act(&0, Symbol('u')).is_err());
    }

    #[test]
    fn line_sensitivity_report() {
        let g = SchreierGraph::new(LineZ);
        let f = ForbiddenSet::parse(g.alphabet(), &["rr"]).unwrap();
        let r = growth_sensitivity_report(&g, &f, 40, &SensitivityOptions::default()).unwrap();
        assert!(r.report.warnings.is_empty(), "{:?}", r.report.warnings);
        assert_eq!(r.checks.d, Some(0));
        let cert = r.report.certificate.as_ref().unwrap();
        assert_eq!((cert.d, cert.r, cert.conn_k), (0, 2, Some(1)));
        assert!((r.report.h.value - 2f64.ln()).abs() < 0.05);
        assert!(r.report.h_forbidden.value < r.report.h.value - 0.05);
        assert!(r.report.h_forbidden.value <= cert.h_bound.unwrap());
    }

    #[test]
    fn grid_and_free_sensitivity_reports() {
        let g = SchreierGraph::new(GridZ2);
        let f = ForbiddenSet::parse(g.alphabet(), &["uu"]).unwrap();
        let r = growth_sensitivity_report(&g, &f, 16, &SensitivityOptions::default()).unwrap();
        let cert = r.report.certificate.as_ref().unwrap();
        assert_eq!(cert.alpha, 0.25);
        assert!(r.report.gap > 0.0);

        let g = SchreierGraph::new(Free2ModCyclic);
        let f = ForbiddenSet::parse(g.alphabet(), &["bb"]).unwrap();
        let r = growth_sensitivity_report(&g, &f, 16, &SensitivityOptions::default()).unwrap();
        assert!(r.is_certified());
        assert!(r.report.gap > 0.0);
    }
}
