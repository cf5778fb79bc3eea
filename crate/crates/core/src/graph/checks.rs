//! Structural predicates checked on windows.
//!
//! A passing check on a window says nothing about the rest of an infinite
//! graph; every report carries the [`Scope`] it was established on.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{forward_distance, Budget, Edge, LabelledGraph, Symbol, VertexId, Window};
use crate::error::{Error, Result};

/// What a check result covers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scope {
    /// The window contains everything reachable from its center.
    Reachable { center: String },
    /// Only the vertices of the forward ball are covered.
    Window { center: String, radius: usize },
}

impl Scope {
    pub fn of<V: VertexId>(w: &Window<V>) -> Self {
        if w.is_closed() {
            Scope::Reachable {
                center: w.center().canonical(),
            }
        } else {
            Scope::Window {
                center: w.center().canonical(),
                radius: w.radius(),
            }
        }
    }

    pub fn is_window_only(&self) -> bool {
        matches!(self, Scope::Window { .. })
    }
}

#[derive(Clone, Debug)]
pub struct DeterminismReport<V> {
    pub scope: Scope,
    /// (vertex, label) pairs with two or more out-edges sharing the label.
    pub violations: Vec<(V, Symbol)>,
}

impl<V> DeterminismReport<V> {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_deterministic<V: VertexId>(w: &Window<V>) -> DeterminismReport<V> {
    let mut seen: BTreeMap<(&V, Symbol), usize> = BTreeMap::new();
    for e in w.edges() {
        *seen.entry((&e.edge.source, e.edge.label)).or_default() += 1;
    }
    let violations = seen
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|((v, a), _)| (v.clone(), a))
        .collect();
    DeterminismReport {
        scope: Scope::of(w),
        violations,
    }
}

#[derive(Clone, Debug)]
pub struct FullDeterminismReport<V> {
    pub scope: Scope,
    /// Vertices lacking an out-edge for some labels.
    pub missing: Vec<(V, Vec<Symbol>)>,
}

impl<V> FullDeterminismReport<V> {
    pub fn is_ok(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Lists every window vertex that has no out-edge for some label. The window
/// is expected to pass [`check_deterministic`] already.
pub fn check_fully_deterministic<G: LabelledGraph>(
    g: &G,
    w: &Window<G::Vertex>,
) -> FullDeterminismReport<G::Vertex> {
    let mut present: BTreeMap<&G::Vertex, Vec<Symbol>> =
        w.vertices().map(|v| (v, Vec::new())).collect();
    for e in w.edges() {
        if let Some(labels) = present.get_mut(&e.edge.source) {
            labels.push(e.edge.label);
        }
    }
    let missing = present
        .into_iter()
        .filter_map(|(v, labels)| {
            let absent: Vec<Symbol> = g
                .alphabet()
                .symbols()
                .iter()
                .copied()
                .filter(|s| !labels.contains(s))
                .collect();
            (!absent.is_empty()).then(|| (v.clone(), absent))
        })
        .collect();
    FullDeterminismReport {
        scope: Scope::of(w),
        missing,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReturnWitness<V> {
    pub edge: Edge<V>,
    /// Forward distance from the edge's target back to its source.
    pub return_length: usize,
}

#[derive(Clone, Debug)]
pub struct ConnectednessReport<V> {
    pub scope: Scope,
    pub conn_k: usize,
    pub witnesses: Vec<ReturnWitness<V>>,
    pub failures: Vec<Edge<V>>,
}

impl<V> ConnectednessReport<V> {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    /// Largest return length seen (at least 1).
    pub fn observed_k(&self) -> usize {
        self.witnesses
            .iter()
            .map(|w| w.return_length)
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

/// For every edge `x -> y` with both ends in the window, looks for a path
/// `y -> x` of length at most `conn_k`. The search itself may leave the
/// window; it is confined to the forward ball of radius `conn_k` around `y`.
pub fn check_uniform_connectedness<G: LabelledGraph>(
    g: &G,
    w: &Window<G::Vertex>,
    conn_k: usize,
    budget: Budget,
) -> Result<ConnectednessReport<G::Vertex>> {
    if conn_k < 1 {
        return Err(Error::ParameterOutOfRange(
            "conn_K must be at least 1".into(),
        ));
    }
    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for e in w.interior_edges() {
        match forward_distance(g, &e.target, &e.source, conn_k, budget)? {
            Some(d) => witnesses.push(ReturnWitness {
                edge: e.clone(),
                return_length: d,
            }),
            None => failures.push(e.clone()),
        }
    }
    Ok(ConnectednessReport {
        scope: Scope::of(w),
        conn_k,
        witnesses,
        failures,
    })
}

/// Smallest `conn_K <= k_max` that passes [`check_uniform_connectedness`] on
/// the window, or `None`.
pub fn estimate_connectivity_constant<G: LabelledGraph>(
    g: &G,
    w: &Window<G::Vertex>,
    k_max: usize,
    budget: Budget,
) -> Result<Option<usize>> {
    let report = check_uniform_connectedness(g, w, k_max.max(1), budget)?;
    Ok(report.is_ok().then(|| report.observed_k()))
}
