//! Markov-chain layer.
//!
//! A [`WeightedChain`] puts a probability on every edge of a graph, with
//! substochastic rows and a positive floor `alpha`. The uniform chain
//! `p(e) = 1/|Σ|` links probabilities to word counts: on a deterministic
//! graph `p^(n)(x, y) · |Σ|^n = c_n(x, y)`, with and without forbidden
//! factors. Restricted probabilities `p_F^(n)` are taken over paths whose
//! labels avoid `F` and are computed on the product graph.

mod certificate;
mod harmonic;

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{fit_tail, TailFit};
use crate::factor::{FactorAutomaton, ForbiddenSet, ProductGraph, ProductVertex, StateId};
use crate::graph::{materialize, Budget, Edge, LabelledGraph, Scope, VertexId, Window};
use crate::num::{rational_to_f64, reciprocal, serialize_real, Probability};
use crate::perron::{spectral_radius_where, PerronOptions, SpectralRadius};

pub use self::certificate::{
    certified_gap_bound, k_step_restricted_rowsum_check, measure_finite_constants, BoundPath,
    CertificateInputs, FiniteConstants, GapCertificate, RowSum, RowSumReport,
};
pub use self::harmonic::{
    h_transform, harmonic_vector, transform_identity_check, HTransform, HarmonicOptions,
    HarmonicVector, IdentityMethod, IdentityReport, Truncation,
};

/// Edge weights of a chain.
#[derive(Clone, Debug)]
pub enum Weights<V> {
    /// `1/|Σ|` on every edge, exactly.
    Uniform,
    Exact(BTreeMap<Edge<V>, BigRational>),
    Float(BTreeMap<Edge<V>, f64>),
}

#[derive(Clone, Debug)]
pub struct WeightedChain<G: LabelledGraph> {
    graph: G,
    weights: Weights<G::Vertex>,
    alpha: f64,
    alpha_exact: Option<BigRational>,
}

impl<G: LabelledGraph> WeightedChain<G> {
    /// Uniform weights without inspecting the graph; see [`uniform_weights`]
    /// for the checked variant.
    pub fn uniform(graph: G) -> Self {
        let q = reciprocal(graph.alphabet().len());
        WeightedChain {
            alpha: rational_to_f64(&q),
            alpha_exact: Some(q),
            graph,
            weights: Weights::Uniform,
        }
    }

    pub fn with_exact_weights(
        graph: G,
        weights: BTreeMap<Edge<G::Vertex>, BigRational>,
        alpha: BigRational,
    ) -> Self {
        WeightedChain {
            alpha: rational_to_f64(&alpha),
            alpha_exact: Some(alpha),
            graph,
            weights: Weights::Exact(weights),
        }
    }

    pub fn with_float_weights(
        graph: G,
        weights: BTreeMap<Edge<G::Vertex>, f64>,
        alpha: f64,
    ) -> Self {
        WeightedChain {
            alpha,
            alpha_exact: None,
            graph,
            weights: Weights::Float(weights),
        }
    }

    pub fn graph(&self) -> &G {
        &self.graph
    }

    pub fn weights(&self) -> &Weights<G::Vertex> {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alpha_exact(&self) -> Option<&BigRational> {
        self.alpha_exact.as_ref()
    }

    pub fn sigma_size(&self) -> usize {
        self.graph.alphabet().len()
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.weights, Weights::Uniform)
    }

    pub fn weight<P: Probability>(&self, e: &Edge<G::Vertex>) -> Result<P> {
        match &self.weights {
            Weights::Uniform => Ok(P::from_exact(&reciprocal(self.sigma_size()))),
            Weights::Exact(m) => m
                .get(e)
                .map(P::from_exact)
                .ok_or_else(|| Error::MissingWeight(e.canonical())),
            Weights::Float(m) => {
                let x = m
                    .get(e)
                    .ok_or_else(|| Error::MissingWeight(e.canonical()))?;
                P::from_float(*x).ok_or_else(|| Error::InexactWeight(e.canonical()))
            }
        }
    }

    pub fn weight_f64(&self, e: &Edge<G::Vertex>) -> Result<f64> {
        self.weight::<f64>(e)
    }
}

/// `p(e) = 1/|Σ|` with `alpha = 1/|Σ|`, after checking that no vertex of
/// the window has more out-edges than letters.
pub fn uniform_weights<G: LabelledGraph>(
    graph: G,
    window: &Window<G::Vertex>,
) -> Result<WeightedChain<G>> {
    let sigma = graph.alphabet().len();
    let mut degree: BTreeMap<&G::Vertex, usize> = BTreeMap::new();
    for e in window.edges() {
        *degree.entry(&e.edge.source).or_default() += 1;
    }
    if let Some((v, d)) = degree.into_iter().find(|(_, d)| *d > sigma) {
        return Err(Error::ParameterOutOfRange(format!(
            "vertex {} has out-degree {d} > |Σ| = {sigma}; the graph is not deterministic",
            v.canonical()
        )));
    }
    Ok(WeightedChain::uniform(graph))
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub scope: Scope,
    /// Vertices whose row sum exceeds `1 + 1e-12`.
    pub row_violations: Vec<(String, f64)>,
    /// Edges lighter than `alpha` (missing weights count as 0).
    pub alpha_violations: Vec<(String, f64)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.row_violations.is_empty() && self.alpha_violations.is_empty()
    }
}

/// Checks the row condition and the floor `alpha` on every vertex of the
/// window.
pub fn validate<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    window: &Window<G::Vertex>,
) -> ValidationReport {
    let mut rows: BTreeMap<&G::Vertex, f64> = window.vertices().map(|v| (v, 0.0)).collect();
    let mut alpha_violations = Vec::new();
    for e in window.edges() {
        let p = chain.weight_f64(&e.edge).unwrap_or(0.0);
        if p < chain.alpha {
            alpha_violations.push((e.edge.canonical(), p));
        }
        if let Some(r) = rows.get_mut(&e.edge.source) {
            *r += p;
        }
    }
    let row_violations = rows
        .into_iter()
        .filter(|(_, s)| *s > 1.0 + 1e-12)
        .map(|(v, s)| (v.canonical(), s))
        .collect();
    ValidationReport {
        scope: Scope::of(window),
        row_violations,
        alpha_violations,
    }
}

/// Distribution after `horizon` steps from `start`, keyed by (vertex,
/// automaton state). Without restriction every state is the start state.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution<V, P> {
    pub start: V,
    pub horizon: usize,
    pub restricted: Option<ForbiddenSet>,
    mass: BTreeMap<ProductVertex<V>, P>,
}

impl<V: VertexId, P: Probability> StepDistribution<V, P> {
    pub fn total(&self) -> P {
        self.mass.values().fold(P::zero(), |a, b| a + b.clone())
    }

    /// `p^(n)(start, v)`, summed over automaton states.
    pub fn at(&self, v: &V) -> P {
        self.mass
            .range(
                ProductVertex {
                    base: v.clone(),
                    state: StateId(0),
                }..,
            )
            .take_while(|(k, _)| k.base == *v)
            .fold(P::zero(), |a, (_, b)| a + b.clone())
    }

    pub fn marginal(&self) -> BTreeMap<V, P> {
        let mut out: BTreeMap<V, P> = BTreeMap::new();
        for (k, p) in &self.mass {
            let slot = out.entry(k.base.clone()).or_insert_with(P::zero);
            *slot = slot.clone() + p.clone();
        }
        out
    }

    pub fn raw(&self) -> &BTreeMap<ProductVertex<V>, P> {
        &self.mass
    }
}

fn automaton_for<G: LabelledGraph>(
    g: &G,
    f: Option<&ForbiddenSet>,
) -> Result<Option<FactorAutomaton>> {
    f.map(|f| FactorAutomaton::new(f, g.alphabet())).transpose()
}

type Move<V> = (Edge<V>, ProductVertex<V>);

/// One multiplication by the (restricted) transition matrix.
fn advance<G: LabelledGraph, P: Probability>(
    chain: &WeightedChain<G>,
    automaton: Option<&FactorAutomaton>,
    mass: &BTreeMap<ProductVertex<G::Vertex>, P>,
    goal: Option<(&G::Vertex, usize)>,
    budget: Budget,
) -> Result<BTreeMap<ProductVertex<G::Vertex>, P>> {
    let product = automaton
        .map(|a| ProductGraph::new(&chain.graph, a.clone()))
        .transpose()?;
    let mut next: BTreeMap<ProductVertex<G::Vertex>, P> = BTreeMap::new();
    for (pv, m) in mass {
        let moves: Vec<Move<G::Vertex>> = match &product {
            Some(p) => p
                .expand(pv)?
                .into_iter()
                .map(|e| {
                    (
                        Edge::new(pv.base.clone(), e.label, e.target.base.clone()),
                        e.target,
                    )
                })
                .collect(),
            None => chain
                .graph
                .expand(&pv.base)?
                .into_iter()
                .map(|e| {
                    let t = ProductVertex {
                        base: e.target.clone(),
                        state: StateId::START,
                    };
                    (e, t)
                })
                .collect(),
        };
        for (e, t) in moves {
            if let Some((y, remaining)) = goal {
                if chain
                    .graph
                    .distance_lower_bound(&t.base, y)
                    .is_some_and(|d| d > remaining)
                {
                    continue;
                }
            }
            let w: P = chain.weight(&e)?;
            let slot = next.entry(t).or_insert_with(P::zero);
            *slot = slot.clone() + m.clone() * w;
        }
    }
    budget.check(next.len(), || {
        "propagating transition probabilities".to_string()
    })?;
    Ok(next)
}

/// The point mass at `x`, optionally restricted to paths avoiding `F`.
pub fn initial<G: LabelledGraph, P: Probability>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    restricted: Option<&ForbiddenSet>,
) -> Result<StepDistribution<G::Vertex, P>> {
    automaton_for(&chain.graph, restricted)?;
    let mut mass = BTreeMap::new();
    mass.insert(
        ProductVertex {
            base: x.clone(),
            state: StateId::START,
        },
        P::one(),
    );
    Ok(StepDistribution {
        start: x.clone(),
        horizon: 0,
        restricted: restricted.cloned(),
        mass,
    })
}

/// Advances a distribution by one step.
pub fn step<G: LabelledGraph, P: Probability>(
    chain: &WeightedChain<G>,
    dist: &StepDistribution<G::Vertex, P>,
    budget: Budget,
) -> Result<StepDistribution<G::Vertex, P>> {
    let automaton = automaton_for(&chain.graph, dist.restricted.as_ref())?;
    let mass = advance(chain, automaton.as_ref(), &dist.mass, None, budget)?;
    Ok(StepDistribution {
        start: dist.start.clone(),
        horizon: dist.horizon + 1,
        restricted: dist.restricted.clone(),
        mass,
    })
}

/// Distributions at horizons `0..=n` from `x`.
pub fn distributions<G: LabelledGraph, P: Probability>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    n: usize,
    restricted: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<Vec<StepDistribution<G::Vertex, P>>> {
    let mut out = vec![initial(chain, x, restricted)?];
    for _ in 0..n {
        let next = step(chain, out.last().expect("nonempty"), budget)?;
        out.push(next);
    }
    Ok(out)
}

/// `p^(k)(x, y)` (or `p_F^(k)`) for `k = 0..=n`. Mass that can no longer
/// reach `y` in time is dropped when the graph knows distance bounds.
pub fn transition_probabilities<G: LabelledGraph, P: Probability>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    y: &G::Vertex,
    n: usize,
    restricted: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<Vec<P>> {
    let automaton = automaton_for(&chain.graph, restricted)?;
    let mut mass = BTreeMap::new();
    mass.insert(
        ProductVertex {
            base: x.clone(),
            state: StateId::START,
        },
        P::one(),
    );
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        out.push(
            mass.iter()
                .filter(|(v, _)| v.base == *y)
                .fold(P::zero(), |a, (_, p)| a + p.clone()),
        );
        if k < n {
            mass = advance(
                chain,
                automaton.as_ref(),
                &mass,
                Some((y, n - k - 1)),
                budget,
            )?;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoEstimate {
    /// Estimated `limsup p^(n)(x,y)^(1/n)`; 0 when the probabilities vanish.
    #[serde(serialize_with = "serialize_real")]
    pub value: f64,
    pub probabilities: Vec<f64>,
    pub fit: TailFit,
    /// False when the fitted slope and the slope of the last two points of
    /// the winning residue class differ by more than 0.02.
    pub converged: bool,
    /// All probabilities in the tail window are zero.
    pub vanished: bool,
}

/// Growth rate of `p^(n)(x, y)` for `n <= horizon`, by the same tail fit as
/// word counts.
pub fn rho_estimate<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    y: &G::Vertex,
    horizon: usize,
    restricted: Option<&ForbiddenSet>,
    tail: Option<usize>,
    budget: Budget,
) -> Result<RhoEstimate> {
    if horizon < 10 {
        return Err(Error::ParameterOutOfRange(format!(
            "horizon {horizon} < 10"
        )));
    }
    let probabilities: Vec<f64> =
        transition_probabilities(chain, x, y, horizon, restricted, budget)?;
    let logs: Vec<Option<f64>> = probabilities
        .iter()
        .map(|&p| (p > 0.0).then(|| p.ln()))
        .collect();
    let fit = fit_tail(&logs, tail.unwrap_or(horizon / 2))?;
    let vanished = fit.is_finite_sequence();
    let value = if vanished { 0.0 } else { fit.slope.exp() };
    let converged = !vanished && (fit.slope - fit.last_ratio).abs() < 0.02;
    Ok(RhoEstimate {
        value,
        probabilities,
        fit,
        converged,
        vanished,
    })
}

/// `log(rho · |Σ|)`, or `-inf` when `rho <= 0`.
pub fn entropy_from_rho(rho: f64, sigma_size: usize) -> f64 {
    if rho > 0.0 {
        (rho * sigma_size as f64).ln()
    } else {
        f64::NEG_INFINITY
    }
}

type Rows = Vec<Vec<(usize, f64)>>;

/// Weighted sparse rows of a finite graph explored from `starts`.
fn weighted_rows<H, W>(
    h: &H,
    starts: &[H::Vertex],
    budget: Budget,
    weight: W,
) -> Result<(Vec<H::Vertex>, Rows)>
where
    H: LabelledGraph,
    W: Fn(&Edge<H::Vertex>) -> Result<f64>,
{
    let m = materialize(h, starts, budget)?;
    let mut rows = Vec::with_capacity(m.len());
    for (i, row) in m.rows.iter().enumerate() {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        for &(label, j) in row {
            let e = Edge::new(m.vertices[i].clone(), label, m.vertices[j].clone());
            *acc.entry(j).or_default() += weight(&e)?;
        }
        rows.push(acc.into_iter().collect());
    }
    Ok((m.vertices, rows))
}

/// Vertices from which some vertex in `targets` is reachable.
fn co_reachable(rows: &[Vec<(usize, f64)>], targets: &[usize]) -> BTreeSet<usize> {
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); rows.len()];
    for (i, row) in rows.iter().enumerate() {
        for &(j, _) in row {
            rev[j].push(i);
        }
    }
    let mut seen: BTreeSet<usize> = targets.iter().copied().collect();
    let mut stack: Vec<usize> = targets.to_vec();
    while let Some(v) = stack.pop() {
        for &u in &rev[v] {
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen
}

/// Exact `rho_{x,y}(P)` (or `rho_{x,y}(P_F)`) of a finite chain: the
/// largest Perron root among the strongly connected components of the
/// (product) graph that are reachable from `x` and can reach `y`.
pub fn spectral_rho_between<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    x: &G::Vertex,
    y: &G::Vertex,
    restricted: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<SpectralRadius> {
    let (bases, rows): (Vec<G::Vertex>, Rows) = match restricted {
        Some(f) => {
            let p = ProductGraph::with_forbidden(&chain.graph, f)?;
            let (vs, rows) = weighted_rows(&p, &[p.start(x.clone())], budget, |e| {
                chain.weight_f64(&Edge::new(
                    e.source.base.clone(),
                    e.label,
                    e.target.base.clone(),
                ))
            })?;
            (vs.into_iter().map(|v| v.base).collect(), rows)
        }
        None => weighted_rows(&chain.graph, std::slice::from_ref(x), budget, |e| {
            chain.weight_f64(e)
        })?,
    };
    let targets: Vec<usize> = (0..bases.len()).filter(|&i| bases[i] == *y).collect();
    let good = co_reachable(&rows, &targets);
    let s = spectral_radius_where(&rows, PerronOptions::default(), |c| good.contains(&c[0]));
    if !s.converged {
        return Err(Error::NonConvergence {
            iterations: PerronOptions::default().max_iterations,
            width: f64::NAN,
        });
    }
    Ok(s)
}

/// Exact spectral radius of a finite chain over everything reachable from
/// `starts` (restricted when `F` is given).
pub fn spectral_rho<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    starts: &[G::Vertex],
    restricted: Option<&ForbiddenSet>,
    budget: Budget,
) -> Result<SpectralRadius> {
    let rows = match restricted {
        Some(f) => {
            let p = ProductGraph::with_forbidden(&chain.graph, f)?;
            let s: Vec<_> = starts.iter().map(|v| p.start(v.clone())).collect();
            weighted_rows(&p, &s, budget, |e| {
                chain.weight_f64(&Edge::new(
                    e.source.base.clone(),
                    e.label,
                    e.target.base.clone(),
                ))
            })?
            .1
        }
        None => weighted_rows(&chain.graph, starts, budget, |e| chain.weight_f64(e))?.1,
    };
    let s = spectral_radius_where(&rows, PerronOptions::default(), |_| true);
    if !s.converged {
        return Err(Error::NonConvergence {
            iterations: PerronOptions::default().max_iterations,
            width: f64::NAN,
        });
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{forward_ball, FiniteGraph};
    use crate::schreier::{LineZ, SchreierGraph};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn v() -> String {
        "v".to_string()
    }

    #[test]
    fn uniform_weights_on_small_graphs() {
        let b2 = fixtures::full_shift(2);
        let w = forward_ball(&b2, &v(), 1, Budget::DEFAULT).unwrap();
        let c = uniform_weights(&b2, &w).unwrap();
        assert_eq!(c.alpha(), 0.5);
        assert!(validate(&c, &w).is_ok());

        let mut g = fixtures::full_shift(2);
        g.remove_edge(&v(), 'b', &v());
        let w = forward_ball(&g, &v(), 1, Budget::DEFAULT).unwrap();
        let c = uniform_weights(&g, &w).unwrap();
        let d: StepDistribution<String, BigRational> =
            step(&c, &initial(&c, &v(), None).unwrap(), Budget::DEFAULT).unwrap();
        assert_eq!(d.total(), q(1, 2));

        let g = fixtures::branching();
        let w = forward_ball(&g, &"x".to_string(), 1, Budget::DEFAULT).unwrap();
        // out-degree 2 equals |Σ| here, so it passes the degree check
        assert!(uniform_weights(&g, &w).is_ok());
        let mut g = FiniteGraph::new(crate::graph::Alphabet::new(['a']).unwrap());
        g.add_edge(0i64, 'a', 1).unwrap();
        g.add_edge(0, 'a', 2).unwrap();
        let w = forward_ball(&g, &0, 1, Budget::DEFAULT).unwrap();
        assert!(uniform_weights(&g, &w).is_err());
    }

    #[test]
    fn validation_flags_heavy_rows_and_light_edges() {
        let b2 = fixtures::full_shift(2);
        let w = forward_ball(&b2, &v(), 1, Budget::DEFAULT).unwrap();
        let edges: Vec<_> = b2.edges().collect();
        let heavy = BTreeMap::from([(edges[0].clone(), 0.6), (edges[1].clone(), 0.6)]);
        let r = validate(&WeightedChain::with_float_weights(&b2, heavy, 0.5), &w);
        assert_eq!(r.row_violations.len(), 1);
        assert!(r.alpha_violations.is_empty());
        let zero = BTreeMap::from([(edges[0].clone(), 0.0), (edges[1].clone(), 1.0)]);
        let r = validate(&WeightedChain::with_float_weights(&b2, zero, 0.5), &w);
        assert_eq!(r.alpha_violations.len(), 1);
        assert!(r.row_violations.is_empty());
    }

    #[test]
    fn step_examples() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let ds: Vec<StepDistribution<String, BigRational>> =
            distributions(&c, &v(), 3, None, Budget::DEFAULT).unwrap();
        assert_eq!(ds[3].at(&v()), q(1, 1));
        let f = ForbiddenSet::parse(b2.alphabet(), &["aa"]).unwrap();
        let ds: Vec<StepDistribution<String, BigRational>> =
            distributions(&c, &v(), 2, Some(&f), Budget::DEFAULT).unwrap();
        assert_eq!(ds[2].at(&v()), q(3, 4));
        assert_eq!(ds[2].marginal().len(), 1);

        let z = SchreierGraph::new(LineZ);
        let c = WeightedChain::uniform(&z);
        let p: Vec<BigRational> =
            transition_probabilities(&c, &0, &0, 2, None, Budget::DEFAULT).unwrap();
        assert_eq!(p[2], q(1, 2));
    }

    #[test]
    fn rho_examples() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let r = rho_estimate(&c, &v(), &v(), 40, None, None, Budget::DEFAULT).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let f = ForbiddenSet::parse(b2.alphabet(), &["aa"]).unwrap();
        let r = rho_estimate(&c, &v(), &v(), 40, Some(&f), None, Budget::DEFAULT).unwrap();
        let half_phi = (1.0 + 5f64.sqrt()) / 4.0;
        assert!((r.value - half_phi).abs() < 1e-3);

        let z = SchreierGraph::new(LineZ);
        let c = WeightedChain::uniform(&z);
        let r = rho_estimate(&c, &0, &0, 40, None, None, Budget::DEFAULT).unwrap();
        assert!((r.value - 1.0).abs() < 0.05);
        assert_eq!(r.fit.period, 2);
        assert!(rho_estimate(&c, &0, &0, 9, None, None, Budget::DEFAULT).is_err());
    }

    #[test]
    fn vanishing_probabilities_give_the_sentinel() {
        let mut g = FiniteGraph::new(crate::graph::Alphabet::new(['a']).unwrap());
        g.add_edge(0i64, 'a', 1).unwrap();
        let c = WeightedChain::uniform(&g);
        let r = rho_estimate(&c, &0, &1, 12, None, None, Budget::DEFAULT).unwrap();
        assert!(r.vanished);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn entropy_dictionary() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((entropy_from_rho(1.0, 2) - 2f64.ln()).abs() < 1e-15);
        assert!((entropy_from_rho(phi / 2.0, 2) - phi.ln()).abs() < 1e-15);
        assert_eq!(entropy_from_rho(0.5, 2), 0.0);
        assert_eq!(entropy_from_rho(0.0, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn spectral_rho_of_finite_chains() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let f = ForbiddenSet::parse(b2.alphabet(), &["aa"]).unwrap();
        let half_phi = (1.0 + 5f64.sqrt()) / 4.0;
        assert!(
            (spectral_rho(&c, &[v()], None, Budget::DEFAULT)
                .unwrap()
                .value
                - 1.0)
                .abs()
                < 1e-12
        );
        let s = spectral_rho_between(&c, &v(), &v(), Some(&f), Budget::DEFAULT).unwrap();
        assert!((s.value - half_phi).abs() < 1e-12);
    }
}
