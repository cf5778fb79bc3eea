//! JSON documents describing finite graphs:
//!
//! ```json
//! { "alphabet": ["a", "b"],
//!   "vertices": ["v"],
//!   "edges": [["v", "a", "v"], ["v", "b", "v"]],
//!   "roots": ["v"],
//!   "forbidden": ["aa"] }
//! ```
//!
//! Letters are single characters. Vertex names may be strings or integers
//! and must not contain `{`, `}`, `,` or `@`, which the canonical forms of
//! derived vertices use as separators.

use serde::{Deserialize, Serialize};

use super::{Alphabet, FiniteGraph, LabelledGraph};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Name {
    Text(String),
    Number(i64),
}

impl Name {
    fn into_string(self) -> String {
        match self {
            Name::Text(s) => s,
            Name::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub alphabet: Vec<String>,
    #[serde(default)]
    vertices: Vec<Name>,
    edges: Vec<(Name, String, Name)>,
    #[serde(default)]
    roots: Vec<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
}

/// A graph read from a document, plus the forbidden words it carried.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: FiniteGraph<String>,
    pub forbidden: Option<Vec<String>>,
}

fn single_char(text: &str) -> Result<char> {
    let mut chars = text.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!(
            "alphabet letters are single characters, got {text:?}"
        ))),
    }
}

fn vertex_name(name: Name) -> Result<String> {
    let s = name.into_string();
    if s.is_empty() || s.contains(['{', '}', ',', '@']) {
        return Err(Error::Parse(format!("invalid vertex name {s:?}")));
    }
    Ok(s)
}

impl GraphDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_graph(self) -> Result<LoadedGraph> {
        let letters = self
            .alphabet
            .iter()
            .map(|s| single_char(s))
            .collect::<Result<Vec<_>>>()?;
        let alphabet = Alphabet::new(letters)?;
        let mut graph = FiniteGraph::new(alphabet.clone());
        for v in self.vertices {
            graph.add_vertex(vertex_name(v)?);
        }
        for (s, l, t) in self.edges {
            graph.add_edge(vertex_name(s)?, single_char(&l)?, vertex_name(t)?)?;
        }
        for r in self.roots {
            let r = vertex_name(r)?;
            if !graph.contains(&r) {
                return Err(Error::UnknownVertex(r));
            }
            graph.add_root(r);
        }
        if graph.vertex_count() == 0 {
            return Err(Error::Parse("graph has no vertices".into()));
        }
        if let Some(words) = &self.forbidden {
            for w in words {
                alphabet.parse_word(w)?;
            }
        }
        Ok(LoadedGraph {
            graph,
            forbidden: self.forbidden,
        })
    }

    pub fn from_graph(g: &FiniteGraph<String>) -> Self {
        GraphDocument {
            alphabet: g
                .alphabet()
                .symbols()
                .iter()
                .map(|s| s.0.to_string())
                .collect(),
            vertices: g.vertices().cloned().map(Name::Text).collect(),
            edges: g
                .edges()
                .map(|e| {
                    (
                        Name::Text(e.source),
                        e.label.0.to_string(),
                        Name::Text(e.target),
                    )
                })
                .collect(),
            roots: g.roots().into_iter().map(Name::Text).collect(),
            forbidden: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn loads_the_full_shift() {
        let doc = r#"{ "alphabet": ["a","b"], "vertices": ["v"],
                       "edges": [["v","a","v"],["v","b","v"]], "roots": ["v"],
                       "forbidden": ["aa"] }"#;
        let loaded = GraphDocument::parse(doc).unwrap().into_graph().unwrap();
        assert_eq!(loaded.graph.edge_count(), 2);
        assert_eq!(loaded.forbidden, Some(vec!["aa".to_string()]));
    }

    #[test]
    fn integer_vertex_names_are_accepted() {
        let doc = r#"{ "alphabet": ["a"], "edges": [[0,"a",1],[1,"a",0]], "roots": [0] }"#;
        let loaded = GraphDocument::parse(doc).unwrap().into_graph().unwrap();
        assert_eq!(loaded.graph.roots(), vec!["0".to_string()]);
    }

    #[test]
    fn malformed_documents_are_rejected() {
        for doc in [
            r#"{ "alphabet": ["ab"], "edges": [] }"#,
            r#"{ "alphabet": ["a"], "edges": [["x","b","x"]] }"#,
            r#"{ "alphabet": ["a"], "edges": [["x","a","x"],["x","a","x"]] }"#,
            r#"{ "alphabet": ["a"], "edges": [["x","a","x"]], "roots": ["y"] }"#,
            r#"{ "alphabet": ["a"], "edges": [["x,1","a","x"]] }"#,
            r#"{ "alphabet": ["a"], "edges": [["x","a","x"]], "forbidden": ["ab"] }"#,
            r#"{ "alphabet": ["a"], "edges": [], "colour": 1 }"#,
        ] {
            assert!(
                GraphDocument::parse(doc)
                    .and_then(|d| d.into_graph())
                    .is_err(),
                "{doc}"
            );
        }
    }

    #[test]
    fn documents_round_trip() {
        let g = fixtures::golden_mean();
        let text = GraphDocument::from_graph(&g).to_json();
        let back = GraphDocument::parse(&text)
            .unwrap()
            .into_graph()
            .unwrap()
            .graph;
        assert_eq!(
            back.edges().collect::<Vec<_>>(),
            g.edges().collect::<Vec<_>>()
        );
        assert_eq!(back.roots(), g.roots());
    }
}
