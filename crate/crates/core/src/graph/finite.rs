use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Alphabet, Budget, DeclaredConstants, Edge, LabelledGraph, Symbol, VertexId};
use crate::error::{Error, Result};

/// An explicit finite graph.
#[derive(Clone, Debug)]
pub struct FiniteGraph<V: VertexId> {
    alphabet: Alphabet,
    adjacency: BTreeMap<V, Vec<(Symbol, V)>>,
    roots: Vec<V>,
    declared: DeclaredConstants,
}

impl<V: VertexId> FiniteGraph<V> {
    pub fn new(alphabet: Alphabet) -> Self {
        FiniteGraph {
            alphabet,
            adjacency: BTreeMap::new(),
            roots: Vec::new(),
            declared: DeclaredConstants::default(),
        }
    }

    pub fn add_vertex(&mut self, v: V) {
        self.adjacency.entry(v).or_default();
    }

    /// Adds a root; the vertex is created if needed.
    pub fn add_root(&mut self, v: V) {
        self.add_vertex(v.clone());
        if !self.roots.contains(&v) {
            self.roots.push(v);
        }
    }

    pub fn add_edge(&mut self, source: V, label: char, target: V) -> Result<()> {
        let label = Symbol(label);
        if !self.alphabet.contains(label) {
            return Err(Error::UnknownSymbol {
                symbol: label.0,
                context: "edge label".into(),
            });
        }
        self.add_vertex(target.clone());
        let row = self.adjacency.entry(source.clone()).or_default();
        if row.iter().any(|(l, t)| *l == label && *t == target) {
            return Err(Error::DuplicateEdge {
                source_vertex: source.canonical(),
                label: label.0,
                target_vertex: target.canonical(),
            });
        }
        row.push((label, target));
        Ok(())
    }

    pub fn remove_edge(&mut self, source: &V, label: char, target: &V) -> bool {
        match self.adjacency.get_mut(source) {
            Some(row) => {
                let before = row.len();
                row.retain(|(l, t)| !(l.0 == label && t == target));
                row.len() != before
            }
            None => false,
        }
    }

    pub fn set_declared(&mut self, declared: DeclaredConstants) {
        self.declared = declared;
    }

    pub fn vertices(&self) -> impl Iterator<Item = &V> {
        self.adjacency.keys()
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn contains(&self, v: &V) -> bool {
        self.adjacency.contains_key(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge<V>> + '_ {
        self.adjacency.iter().flat_map(|(s, row)| {
            row.iter().map(move |(l, t)| Edge {
                source: s.clone(),
                label: *l,
                target: t.clone(),
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(Vec::len).sum()
    }
}

impl<V: VertexId> LabelledGraph for FiniteGraph<V> {
    type Vertex = V;

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn roots(&self) -> Vec<V> {
        if self.roots.is_empty() {
            self.adjacency.keys().take(1).cloned().collect()
        } else {
            self.roots.clone()
        }
    }

    fn out_edges(&self, vertex: &V) -> Result<Vec<(Symbol, V)>> {
        self.adjacency
            .get(vertex)
            .cloned()
            .ok_or_else(|| Error::UnknownVertex(vertex.canonical()))
    }

    fn declared(&self) -> DeclaredConstants {
        self.declared.clone()
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Index-based copy of the part of a graph reachable from some start set.
#[derive(Clone, Debug)]
pub struct Materialized<V> {
    pub vertices: Vec<V>,
    pub rows: Vec<Vec<(Symbol, usize)>>,
    index: HashMap<V, usize>,
}

/// Explores everything reachable from `starts`; fails once more than
/// `budget` vertices have been found (the graph is then treated as infinite).
pub fn materialize<G: LabelledGraph>(
    g: &G,
    starts: &[G::Vertex],
    budget: Budget,
) -> Result<Materialized<G::Vertex>> {
    let mut vertices: Vec<G::Vertex> = Vec::new();
    let mut index = HashMap::new();
    for s in starts {
        if !index.contains_key(s) {
            index.insert(s.clone(), vertices.len());
            vertices.push(s.clone());
        }
    }
    let mut rows = Vec::new();
    let mut i = 0;
    while i < vertices.len() {
        let out = g.expand(&vertices[i])?;
        let mut row = Vec::with_capacity(out.len());
        for e in out {
            let j = match index.get(&e.target) {
                Some(&j) => j,
                None => {
                    let j = vertices.len();
                    index.insert(e.target.clone(), j);
                    vertices.push(e.target);
                    budget.check(vertices.len(), || {
                        "materializing a finite graph".to_string()
                    })?;
                    j
                }
            };
            row.push((e.label, j));
        }
        rows.push(row);
        i += 1;
    }
    Ok(Materialized {
        vertices,
        rows,
        index,
    })
}

impl<V: VertexId> Materialized<V> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, v: &V) -> Option<usize> {
        self.index.get(v).copied()
    }

    /// First (vertex, label) pair with two out-edges sharing the label.
    pub fn first_nondeterminism(&self) -> Option<(usize, Symbol)> {
        self.rows.iter().enumerate().find_map(|(i, row)| {
            row.windows(2)
                .find(|w| w[0].0 == w[1].0)
                .map(|w| (i, w[0].0))
        })
    }

    /// Number of edges `i -> j` per ordered pair, as sparse rows.
    pub fn count_matrix(&self) -> Vec<Vec<(usize, f64)>> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                for &(_, j) in row {
                    *acc.entry(j).or_default() += 1.0;
                }
                acc.into_iter().collect()
            })
            .collect()
    }

    /// Strongly connected components (Tarjan), each sorted, listed in
    /// reverse topological order.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let adj: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(_, j)| j).collect())
            .collect();
        tarjan(&adj)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strongly_connected_components().len() == 1
    }

    /// Whether the component carries at least one edge (otherwise it is a
    /// single vertex without a loop).
    pub fn component_has_cycle(&self, comp: &[usize]) -> bool {
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        comp.iter()
            .any(|&v| self.rows[v].iter().any(|(_, j)| members.contains(j)))
    }

    /// Period of a strongly connected component: the gcd of all cycle
    /// lengths, computed from BFS levels. Zero for an acyclic component.
    pub fn component_period(&self, comp: &[usize]) -> usize {
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let mut level: HashMap<usize, i64> = HashMap::new();
        let start = comp[0];
        level.insert(start, 0);
        let mut queue = std::collections::VecDeque::from([start]);
        let mut g = 0i64;
        while let Some(v) = queue.pop_front() {
            let lv = level[&v];
            for &(_, w) in &self.rows[v] {
                if !members.contains(&w) {
                    continue;
                }
                match level.get(&w) {
                    Some(&lw) => g = num_integer::gcd(g, lv + 1 - lw),
                    None => {
                        level.insert(w, lv + 1);
                        queue.push_back(w);
                    }
                }
            }
        }
        g.unsigned_abs() as usize
    }
}

/// Strongly connected components of an adjacency list (iterative Tarjan),
/// each sorted, listed in reverse topological order.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, next child position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}
