//! Harmonic vectors on windows and the h-transform.
//!
//! A positive `h` with `Ph = rho·h` turns the substochastic `P` into the
//! stochastic `p^h(x,a,y) = p(x,a,y)·h(y)/(rho·h(x))`. On an infinite graph
//! only a window is available, so the leading eigenpair of the truncated
//! matrix stands in for `(rho, h)` and the harmonic residual is measured one
//! step inside the window, where the rows of `P` are complete.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{rho_estimate, spectral_rho_between, WeightedChain};
use crate::error::{Error, Result};
use crate::factor::ForbiddenSet;
use crate::graph::{forward_ball, Budget, Edge, FiniteGraph, LabelledGraph, VertexId};
use crate::num::serialize_real;
use crate::perron::{perron_root, PerronOptions};

/// How rows cut by the window boundary are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Edges leaving the window are dropped and the remaining weights of the
    /// row rescaled to the original row sum.
    #[default]
    Reflecting,
    /// Edges leaving the window are dropped; mass leaving is lost. Biases
    /// the eigenvalue downward on graphs like the integer line.
    Absorbing,
}

#[derive(Clone, Debug)]
pub struct HarmonicOptions {
    pub truncation: Truncation,
    /// Residual tolerance for acceptance; `1e-8` on a closed window and
    /// `1e-3` on a window of an infinite graph when `None`.
    pub tolerance: Option<f64>,
    pub perron: PerronOptions,
    pub budget: Budget,
}

impl Default for HarmonicOptions {
    fn default() -> Self {
        HarmonicOptions {
            truncation: Truncation::Reflecting,
            tolerance: None,
            perron: PerronOptions::default(),
            budget: Budget::DEFAULT,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicVector<V: VertexId> {
    #[serde(serialize_with = "serialize_real")]
    pub rho_hat: f64,
    #[serde(skip)]
    pub values: BTreeMap<V, f64>,
    /// `max |(Ph)(x) - rho_hat·h(x)| / h(x)` over the inner window.
    #[serde(serialize_with = "serialize_real")]
    pub residual: f64,
    pub tolerance: f64,
    pub accepted: bool,
    #[serde(skip)]
    pub center: V,
    pub radius: usize,
    pub truncation: Truncation,
    /// Eigenvalues under both truncations; their difference measures how
    /// much the window boundary matters.
    #[serde(serialize_with = "serialize_real")]
    pub rho_reflecting: f64,
    #[serde(serialize_with = "serialize_real")]
    pub rho_absorbing: f64,
    pub window_vertices: usize,
    pub inner_vertices: usize,
}

fn residual_on<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    rho: f64,
    values: &BTreeMap<G::Vertex, f64>,
    inner: &[&G::Vertex],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in inner {
        let mut ph = 0.0;
        for e in chain.graph().expand(x)? {
            let hy = values
                .get(&e.target)
                .ok_or_else(|| Error::MissingHarmonicValue(e.target.canonical()))?;
            ph += chain.weight_f64(&e)? * hy;
        }
        let hx = values[*x];
        worst = worst.max((ph - rho * hx).abs() / hx);
    }
    Ok(worst)
}

impl<V: VertexId> HarmonicVector<V> {
    /// Wraps a known eigenpair, e.g. an exact Perron vector, measuring its
    /// residual on every vertex whose out-edges all stay among `values`.
    pub fn from_values<G: LabelledGraph<Vertex = V>>(
        chain: &WeightedChain<G>,
        center: V,
        rho: f64,
        values: BTreeMap<V, f64>,
        tolerance: f64,
    ) -> Result<Self> {
        if let Some((v, _)) = values.iter().find(|(_, &h)| h.is_nan() || h <= 0.0) {
            return Err(Error::NonPositive(v.canonical()));
        }
        let mut inner = Vec::new();
        for v in values.keys() {
            if chain
                .graph()
                .expand(v)?
                .iter()
                .all(|e| values.contains_key(&e.target))
            {
                inner.push(v);
            }
        }
        let residual = residual_on(chain, rho, &values, &inner)?;
        Ok(HarmonicVector {
            rho_hat: rho,
            residual,
            tolerance,
            accepted: residual <= tolerance,
            radius: 0,
            truncation: Truncation::Reflecting,
            rho_reflecting: rho,
            rho_absorbing: rho,
            window_vertices: values.len(),
            inner_vertices: inner.len(),
            center,
            values,
        })
    }
}

/// Leading eigenpair of the chain truncated to the forward ball of `radius`
/// around `center`, normalized so that `h(center) = 1`.
pub fn harmonic_vector<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    center: &G::Vertex,
    radius: usize,
    opts: &HarmonicOptions,
) -> Result<HarmonicVector<G::Vertex>> {
    if radius < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "harmonic window radius {radius} < 2"
        )));
    }
    let window = forward_ball(chain.graph(), center, radius, opts.budget)?;
    let vertices: Vec<&G::Vertex> = window.vertices().collect();
    let index: BTreeMap<&G::Vertex, usize> =
        vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    let mut inside: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); vertices.len()];
    let mut full_sum = vec![0.0; vertices.len()];
    for we in window.edges() {
        let i = index[&we.edge.source];
        let p = chain.weight_f64(&we.edge)?;
        full_sum[i] += p;
        if !we.boundary {
            *inside[i].entry(index[&we.edge.target]).or_default() += p;
        }
    }
    let absorbing: Vec<Vec<(usize, f64)>> = inside
        .iter()
        .map(|r| r.iter().map(|(&j, &p)| (j, p)).collect())
        .collect();
    let reflecting: Vec<Vec<(usize, f64)>> = inside
        .iter()
        .zip(&full_sum)
        .map(|(r, &total)| {
            let kept: f64 = r.values().sum();
            let scale = if kept > 0.0 { total / kept } else { 1.0 };
            r.iter().map(|(&j, &p)| (j, p * scale)).collect()
        })
        .collect();

    let refl = perron_root(&reflecting, opts.perron);
    let abso = perron_root(&absorbing, opts.perron);
    let chosen = match opts.truncation {
        Truncation::Reflecting => &refl,
        Truncation::Absorbing => &abso,
    };
    if !chosen.converged {
        return Err(Error::NonConvergence {
            iterations: chosen.iterations,
            width: chosen.upper - chosen.lower,
        });
    }
    if let Some(i) = chosen.vector.iter().position(|&h| h.is_nan() || h <= 0.0) {
        return Err(Error::NonPositive(vertices[i].canonical()));
    }
    let h0 = chosen.vector[index[center]];
    let values: BTreeMap<G::Vertex, f64> = vertices
        .iter()
        .zip(&chosen.vector)
        .map(|(v, &h)| ((*v).clone(), h / h0))
        .collect();

    let inner: Vec<&G::Vertex> = if window.is_closed() {
        vertices.clone()
    } else {
        window.inner(radius - 1).collect()
    };
    let residual = residual_on(chain, chosen.value, &values, &inner)?;
    let tolerance = opts
        .tolerance
        .unwrap_or(if window.is_closed() { 1e-8 } else { 1e-3 });
    Ok(HarmonicVector {
        rho_hat: chosen.value,
        residual,
        tolerance,
        accepted: residual <= tolerance,
        center: center.clone(),
        radius,
        truncation: opts.truncation,
        rho_reflecting: refl.value,
        rho_absorbing: abso.value,
        window_vertices: vertices.len(),
        inner_vertices: inner.len(),
        values,
    })
}

/// The transformed chain, living on the harmonic vector's vertex set.
#[derive(Clone, Debug)]
pub struct HTransform<V: VertexId> {
    pub chain: WeightedChain<FiniteGraph<V>>,
    pub rho_hat: f64,
    /// `(alpha/rho_hat)^(conn_K + 1)`.
    pub alpha_bar: f64,
    pub conn_k: usize,
    /// Edges with an endpoint outside the window; they have no transformed
    /// weight and are left out.
    pub dropped_edges: usize,
    /// `max |sum_e p^h(e) - 1|` over vertices with no dropped edge.
    pub max_row_deviation: f64,
    pub min_weight: f64,
}

struct Transformed<V: VertexId> {
    graph: FiniteGraph<V>,
    weights: BTreeMap<Edge<V>, f64>,
    dropped: usize,
    deviation: f64,
    min_weight: f64,
}

fn transform<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    hv: &HarmonicVector<G::Vertex>,
) -> Result<Transformed<G::Vertex>> {
    let mut graph = FiniteGraph::new(chain.graph().alphabet().clone());
    for v in hv.values.keys() {
        graph.add_vertex(v.clone());
    }
    graph.add_root(hv.center.clone());
    let mut weights = BTreeMap::new();
    let (mut dropped, mut deviation, mut min_weight) = (0, 0.0f64, f64::INFINITY);
    for (x, &hx) in &hv.values {
        let mut row = 0.0;
        let mut complete = true;
        for e in chain.graph().expand(x)? {
            match hv.values.get(&e.target) {
                Some(&hy) => {
                    let p = chain.weight_f64(&e)? * hy / (hv.rho_hat * hx);
                    row += p;
                    min_weight = min_weight.min(p);
                    graph.add_edge(e.source.clone(), e.label.0, e.target.clone())?;
                    weights.insert(e, p);
                }
                None => {
                    dropped += 1;
                    complete = false;
                }
            }
        }
        if complete {
            deviation = deviation.max((row - 1.0).abs());
        }
    }
    Ok(Transformed {
        graph,
        weights,
        dropped,
        deviation,
        min_weight,
    })
}

/// `p^h(x,a,y) = p(x,a,y)·h(y)/(rho_hat·h(x))` on the window, with floor
/// `alpha_bar = (alpha/rho_hat)^(conn_K + 1)`. `conn_k` falls back to the
/// constant declared by the graph.
pub fn h_transform<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    hv: &HarmonicVector<G::Vertex>,
    conn_k: Option<usize>,
) -> Result<HTransform<G::Vertex>> {
    if !hv.accepted {
        return Err(Error::HarmonicNotAccepted {
            residual: hv.residual,
            tolerance: hv.tolerance,
        });
    }
    let conn_k = conn_k
        .or(chain.graph().declared().conn_k)
        .ok_or(Error::MissingConnK)?;
    let t = transform(chain, hv)?;
    let alpha_bar = (chain.alpha() / hv.rho_hat).powi(conn_k as i32 + 1);
    Ok(HTransform {
        chain: WeightedChain::with_float_weights(t.graph, t.weights, alpha_bar),
        rho_hat: hv.rho_hat,
        alpha_bar,
        conn_k,
        dropped_edges: t.dropped,
        max_row_deviation: t.deviation,
        min_weight: t.min_weight,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdentityMethod {
    /// Exact Perron roots on finite (product) graphs.
    Spectral,
    /// Tail fits of `p^(n)(x, y)` up to `horizon`.
    TailSlope { horizon: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub method: IdentityMethod,
    /// `rho_{x,y}(P^h_F)`.
    #[serde(serialize_with = "serialize_real")]
    pub transformed: f64,
    /// `rho_{x,y}(P_F)`.
    #[serde(serialize_with = "serialize_real")]
    pub original: f64,
    #[serde(serialize_with = "serialize_real")]
    pub rho_hat: f64,
    /// `|transformed - original/rho_hat|`.
    #[serde(serialize_with = "serialize_real")]
    pub discrepancy: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// Compares `rho_{x,y}(P^h_F)` with `rho_{x,y}(P_F)/rho_hat`.
#[allow(clippy::too_many_arguments)]
pub fn transform_identity_check<G: LabelledGraph>(
    chain: &WeightedChain<G>,
    hv: &HarmonicVector<G::Vertex>,
    forbidden: &ForbiddenSet,
    x: &G::Vertex,
    y: &G::Vertex,
    method: IdentityMethod,
    threshold: f64,
    budget: Budget,
) -> Result<IdentityReport> {
    if !hv.accepted {
        return Err(Error::HarmonicNotAccepted {
            residual: hv.residual,
            tolerance: hv.tolerance,
        });
    }
    let t = transform(chain, hv)?;
    let transformed_chain = WeightedChain::with_float_weights(t.graph, t.weights, t.min_weight);
    let (transformed, original) = match method {
        IdentityMethod::Spectral => (
            spectral_rho_between(&transformed_chain, x, y, Some(forbidden), budget)?.value,
            spectral_rho_between(chain, x, y, Some(forbidden), budget)?.value,
        ),
        IdentityMethod::TailSlope { horizon } => (
            rho_estimate(
                &transformed_chain,
                x,
                y,
                horizon,
                Some(forbidden),
                None,
                budget,
            )?
            .value,
            rho_estimate(chain, x, y, horizon, Some(forbidden), None, budget)?.value,
        ),
    };
    let discrepancy = (transformed - original / hv.rho_hat).abs();
    Ok(IdentityReport {
        method,
        transformed,
        original,
        rho_hat: hv.rho_hat,
        discrepancy,
        threshold,
        passed: discrepancy <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schreier::{LineZ, SchreierGraph};

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn full_shift_is_already_harmonic() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let hv = harmonic_vector(&c, &"v".to_string(), 2, &HarmonicOptions::default()).unwrap();
        assert_eq!(hv.rho_hat, 1.0);
        assert_eq!(hv.values[&"v".to_string()], 1.0);
        assert_eq!(hv.residual, 0.0);
        let t = h_transform(&c, &hv, Some(1)).unwrap();
        assert_eq!(t.max_row_deviation, 0.0);
        assert_eq!(
            t.chain
                .weight_f64(&t.chain.graph().edges().next().unwrap())
                .unwrap(),
            0.5
        );
    }

    #[test]
    fn golden_mean_perron_vector() {
        let g = fixtures::golden_mean();
        let c = WeightedChain::uniform(&g);
        let hv = harmonic_vector(&c, &"v1".to_string(), 3, &HarmonicOptions::default()).unwrap();
        assert!(hv.accepted);
        assert!((hv.rho_hat - PHI / 2.0).abs() < 1e-12);
        assert!((hv.values[&"v2".to_string()] - 1.0 / PHI).abs() < 1e-10);
        let t = h_transform(&c, &hv, Some(2)).unwrap();
        assert!(t.max_row_deviation < 1e-10);
        assert_eq!(t.dropped_edges, 0);
        assert!(t.min_weight >= t.alpha_bar - 1e-12);
    }

    #[test]
    fn line_window_is_flat() {
        let z = SchreierGraph::new(LineZ);
        let c = WeightedChain::uniform(&z);
        let hv = harmonic_vector(&c, &0, 30, &HarmonicOptions::default()).unwrap();
        assert!((0.99..=1.0 + 1e-12).contains(&hv.rho_hat));
        assert!(hv.accepted);
        assert!(hv.values.values().all(|h| (h - 1.0).abs() < 1e-6));
        assert!(hv.rho_absorbing < hv.rho_reflecting);
        let t = h_transform(&c, &hv, None).unwrap();
        assert_eq!(t.conn_k, 1);
        assert_eq!(t.dropped_edges, 2);

        let absorbing = HarmonicOptions {
            truncation: Truncation::Absorbing,
            ..Default::default()
        };
        let hv = harmonic_vector(&c, &0, 30, &absorbing).unwrap();
        assert!(hv.rho_hat < 1.0 && hv.rho_hat > 0.99);
    }

    #[test]
    fn transform_needs_acceptance_and_conn_k() {
        let g = fixtures::golden_mean();
        let c = WeightedChain::uniform(&g);
        let hv = harmonic_vector(&c, &"v1".to_string(), 3, &HarmonicOptions::default()).unwrap();
        assert_eq!(h_transform(&c, &hv, None).unwrap_err(), Error::MissingConnK);
        let mut rejected = hv.clone();
        rejected.accepted = false;
        assert!(matches!(
            h_transform(&c, &rejected, Some(2)),
            Err(Error::HarmonicNotAccepted { .. })
        ));
        assert!(harmonic_vector(&c, &"v1".to_string(), 1, &HarmonicOptions::default()).is_err());
    }

    #[test]
    fn identity_on_small_examples() {
        let b2 = fixtures::full_shift(2);
        let c = WeightedChain::uniform(&b2);
        let v = "v".to_string();
        let hv = harmonic_vector(&c, &v, 2, &HarmonicOptions::default()).unwrap();
        let f = ForbiddenSet::parse(b2.alphabet(), &["aa"]).unwrap();
        let r = transform_identity_check(
            &c,
            &hv,
            &f,
            &v,
            &v,
            IdentityMethod::Spectral,
            1e-9,
            Budget::DEFAULT,
        )
        .unwrap();
        assert!(r.passed);
        assert_eq!(r.transformed, r.original);

        let z = SchreierGraph::new(LineZ);
        let c = WeightedChain::uniform(&z);
        let hv = harmonic_vector(&c, &0, 30, &HarmonicOptions::default()).unwrap();
        let f = ForbiddenSet::parse(z.alphabet(), &["rr"]).unwrap();
        let r = transform_identity_check(
            &c,
            &hv,
            &f,
            &0,
            &0,
            IdentityMethod::TailSlope { horizon: 40 },
            0.05,
            Budget::DEFAULT,
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }
}
