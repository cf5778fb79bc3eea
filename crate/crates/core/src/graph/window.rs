use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Budget, Edge, LabelledGraph, Path, Symbol, VertexId};
use crate::error::Result;

/// An edge seen while building a window. `boundary` is set when the target
/// lies outside the window's vertex set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowEdge<V> {
    pub edge: Edge<V>,
    pub boundary: bool,
}

/// Finite view of a graph: the forward ball of `radius` around `center`.
#[derive(Clone, Debug)]
pub struct Window<V> {
    center: V,
    radius: usize,
    distances: BTreeMap<V, usize>,
    edges: Vec<WindowEdge<V>>,
}

impl<V: VertexId> Window<V> {
    pub fn center(&self) -> &V {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Vertices in canonical (`Ord`) order.
    pub fn vertices(&self) -> impl Iterator<Item = &V> {
        self.distances.keys()
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn contains(&self, v: &V) -> bool {
        self.distances.contains_key(v)
    }

    /// Forward distance from the center.
    pub fn distance(&self, v: &V) -> Option<usize> {
        self.distances.get(v).copied()
    }

    pub fn edges(&self) -> &[WindowEdge<V>] {
        &self.edges
    }

    /// Edges with both ends in the window.
    pub fn interior_edges(&self) -> impl Iterator<Item = &Edge<V>> {
        self.edges.iter().filter(|e| !e.boundary).map(|e| &e.edge)
    }

    pub fn out_edges<'a>(&'a self, v: &'a V) -> impl Iterator<Item = &'a WindowEdge<V>> + 'a {
        // edges are grouped by source in BFS order, so a scan is fine at desk scale
        self.edges.iter().filter(move |e| &e.edge.source == v)
    }

    /// Vertices at forward distance at most `r` from the center.
    pub fn inner(&self, r: usize) -> impl Iterator<Item = &V> {
        self.distances
            .iter()
            .filter(move |(_, &d)| d <= r)
            .map(|(v, _)| v)
    }

    /// True when no expanded edge leaves the window, i.e. the window is the
    /// whole part of the graph reachable from the center.
    pub fn is_closed(&self) -> bool {
        self.edges.iter().all(|e| !e.boundary)
    }
}

/// Materializes the forward ball of `radius` around `center`.
///
/// Every vertex in the ball is expanded, including those at distance exactly
/// `radius`; their edges leaving the ball are kept and flagged as boundary.
pub fn forward_ball<G: LabelledGraph>(
    g: &G,
    center: &G::Vertex,
    radius: usize,
    budget: Budget,
) -> Result<Window<G::Vertex>> {
    let mut distances = BTreeMap::new();
    distances.insert(center.clone(), 0usize);
    let mut expanded: Vec<Vec<Edge<G::Vertex>>> = Vec::new();
    let mut frontier = vec![center.clone()];
    let mut depth = 0;
    loop {
        let mut next = BTreeSet::new();
        for v in &frontier {
            let out = g.expand(v)?;
            if depth < radius {
                for e in &out {
                    if !distances.contains_key(&e.target) {
                        next.insert(e.target.clone());
                    }
                }
            }
            expanded.push(out);
        }
        if depth == radius || next.is_empty() {
            break;
        }
        depth += 1;
        for v in &next {
            distances.insert(v.clone(), depth);
        }
        budget.check(distances.len(), || {
            format!(
                "building the forward ball of radius {radius} around {}",
                center.canonical()
            )
        })?;
        frontier = next.into_iter().collect();
    }
    let edges = expanded
        .into_iter()
        .flatten()
        .map(|edge| {
            let boundary = !distances.contains_key(&edge.target);
            WindowEdge { edge, boundary }
        })
        .collect();
    Ok(Window {
        center: center.clone(),
        radius,
        distances,
        edges,
    })
}

/// Minimal path length from `x` to `y`, if it is at most `cap`.
pub fn forward_distance<G: LabelledGraph>(
    g: &G,
    x: &G::Vertex,
    y: &G::Vertex,
    cap: usize,
    budget: Budget,
) -> Result<Option<usize>> {
    Ok(shortest_path_to(g, x, |v| Ok(v == y), cap, budget)?.map(|p| p.len()))
}

/// Breadth-first search for the nearest vertex satisfying `goal`, within
/// `cap` steps. Ties at equal distance go to the smallest vertex. Errors
/// raised by `goal` abort the search.
pub fn shortest_path_to<G, P>(
    g: &G,
    x: &G::Vertex,
    mut goal: P,
    cap: usize,
    budget: Budget,
) -> Result<Option<Path<G::Vertex>>>
where
    G: LabelledGraph,
    P: FnMut(&G::Vertex) -> Result<bool>,
{
    if goal(x)? {
        return Ok(Some(Path::empty(x.clone())));
    }
    let mut parent: HashMap<G::Vertex, Edge<G::Vertex>> = HashMap::new();
    let mut seen = BTreeSet::new();
    seen.insert(x.clone());
    let mut frontier = vec![x.clone()];
    for _ in 0..cap {
        let mut next = BTreeSet::new();
        for v in &frontier {
            for e in g.expand(v)? {
                if seen.insert(e.target.clone()) {
                    parent.insert(e.target.clone(), e.clone());
                    next.insert(e.target);
                }
            }
        }
        budget.check(seen.len(), || {
            format!("searching forward from {}", x.canonical())
        })?;
        let mut hit = None;
        for v in &next {
            if goal(v)? {
                hit = Some(v);
                break;
            }
        }
        if let Some(hit) = hit {
            let mut rev = Vec::new();
            let mut cur = hit.clone();
            while cur != *x {
                let e = parent[&cur].clone();
                cur = e.source.clone();
                rev.push(e);
            }
            let mut path = Path::empty(x.clone());
            for e in rev.into_iter().rev() {
                path.push(e)?;
            }
            return Ok(Some(path));
        }
        if next.is_empty() {
            break;
        }
        frontier = next.into_iter().collect();
    }
    Ok(None)
}

/// Some path starting at `start` whose label is `word`, if one exists.
/// Nondeterministic branches are explored depth-first in expansion order.
pub fn follow_word<G: LabelledGraph>(
    g: &G,
    start: &G::Vertex,
    word: &[Symbol],
) -> Result<Option<Path<G::Vertex>>> {
    fn go<G: LabelledGraph>(g: &G, path: &mut Path<G::Vertex>, rest: &[Symbol]) -> Result<bool> {
        let Some((&first, tail)) = rest.split_first() else {
            return Ok(true);
        };
        for e in g.expand(path.end())? {
            if e.label == first {
                let mut next = path.clone();
                next.push(e)?;
                if go(g, &mut next, tail)? {
                    *path = next;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
    let mut path = Path::empty(start.clone());
    Ok(if go(g, &mut path, word)? {
        Some(path)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schreier::{GridZ2, LineZ, SchreierGraph};

    #[test]
    fn line_ball_of_radius_two() {
        let z = SchreierGraph::new(LineZ);
        let w = forward_ball(&z, &0, 2, Budget::DEFAULT).unwrap();
        let vs: Vec<i64> = w.vertices().copied().collect();
        assert_eq!(vs, vec![-2, -1, 0, 1, 2]);
        assert_eq!(w.edges().len(), 10);
        assert_eq!(w.edges().iter().filter(|e| e.boundary).count(), 2);
        assert!(!w.is_closed());
    }

    #[test]
    fn full_shift_ball_is_one_vertex() {
        let b2 = fixtures::full_shift(2);
        let w = forward_ball(&b2, &"v".to_string(), 5, Budget::DEFAULT).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.edges().len(), 2);
        assert!(w.is_closed());
    }

    #[test]
    fn grid_ball_of_radius_one() {
        let z2 = SchreierGraph::new(GridZ2);
        let w = forward_ball(&z2, &(0, 0), 1, Budget::DEFAULT).unwrap();
        assert_eq!(w.len(), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let z2 = SchreierGraph::new(GridZ2);
        let err = forward_ball(&z2, &(0, 0), 10, Budget(20)).unwrap_err();
        assert!(matches!(
            err,
            crate::Error::BudgetExceeded { limit: 20, .. }
        ));
    }

    #[test]
    fn distances_on_the_line() {
        let z = SchreierGraph::new(LineZ);
        assert_eq!(
            forward_distance(&z, &0, &3, 10, Budget::DEFAULT).unwrap(),
            Some(3)
        );
        assert_eq!(
            forward_distance(&z, &0, &3, 2, Budget::DEFAULT).unwrap(),
            None
        );
        assert_eq!(
            forward_distance(&z, &5, &5, 0, Budget::DEFAULT).unwrap(),
            Some(0)
        );
        let b2 = fixtures::full_shift(2);
        let v = "v".to_string();
        assert_eq!(
            forward_distance(&b2, &v, &v, 0, Budget::DEFAULT).unwrap(),
            Some(0)
        );
    }

    #[test]
    fn follow_word_explores_nondeterministic_branches() {
        let g = fixtures::branching();
        // x -a-> y and x -a-> z; only z continues with b
        let p = follow_word(&g, &"x".to_string(), &[Symbol('a'), Symbol('b')])
            .unwrap()
            .unwrap();
        assert_eq!(p.edges()[0].target, "z");
        assert!(follow_word(&g, &"x".to_string(), &[Symbol('b')])
            .unwrap()
            .is_none());
    }
}
