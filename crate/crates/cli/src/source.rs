//! Where a graph comes from: a JSON document or a built-in family.

use std::path::{Path, PathBuf};

use clap::Args;
use entroscope::graph::{FiniteGraph, GraphDocument};
use entroscope::schreier::Family;
use entroscope::{Error, ForbiddenSet, LabelledGraph, Result, VertexId};
use serde::Serialize;

#[derive(Args, Clone, Debug, Serialize)]
pub struct GraphArgs {
    /// Graph document (JSON with alphabet, vertices, edges, roots).
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    pub graph: Option<PathBuf>,
    /// Built-in Schreier graph: line_Z, grid_Z2 or free2_mod_cyclic.
    #[arg(long)]
    pub family: Option<Family>,
    /// Start vertex in canonical form; the first root by default.
    #[arg(long)]
    pub x: Option<String>,
    /// End vertex; defaults to the start vertex.
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct ForbidArgs {
    /// Forbidden words, comma separated or repeated. Falls back to the
    /// "forbidden" key of the graph document.
    #[arg(long, value_delimiter = ',')]
    pub forbid: Vec<String>,
}

pub enum Source {
    File(FiniteGraph<String>, Option<Vec<String>>),
    Family(Family),
}

impl Source {
    pub fn load(args: &GraphArgs) -> Result<Self> {
        match (&args.graph, args.family) {
            (Some(path), _) => {
                let doc = GraphDocument::parse(&read(path)?)?.into_graph()?;
                Ok(Source::File(doc.graph, doc.forbidden))
            }
            (None, Some(f)) => Ok(Source::Family(f)),
            (None, None) => Err(Error::Parse(
                "either --graph or --family is required".into(),
            )),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Source::File(..))
    }

    /// Words from the command line, else from the document.
    pub fn forbidden_words(&self, args: &ForbidArgs) -> Vec<String> {
        match self {
            _ if !args.forbid.is_empty() => args.forbid.clone(),
            Source::File(_, Some(words)) => words.clone(),
            _ => Vec::new(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

pub fn vertex<G: LabelledGraph>(g: &G, text: Option<&str>) -> Result<G::Vertex> {
    match text {
        None => g
            .roots()
            .into_iter()
            .next()
            .ok_or_else(|| Error::Parse("graph has no root; pass --x".into())),
        Some(t) => G::Vertex::from_canonical(t).ok_or_else(|| Error::UnknownVertex(t.to_string())),
    }
}

pub fn forbidden_set<G: LabelledGraph>(g: &G, words: &[String]) -> Result<Option<ForbiddenSet>> {
    if words.is_empty() {
        Ok(None)
    } else {
        ForbiddenSet::parse(g.alphabet(), words).map(Some)
    }
}

pub fn require_forbidden<G: LabelledGraph>(g: &G, words: &[String]) -> Result<ForbiddenSet> {
    forbidden_set(g, words)?.ok_or_else(|| Error::Parse("no forbidden words; pass --forbid".into()))
}

/// Runs `$body` with `$g` bound to a reference to the loaded graph.
macro_rules! with_graph {
    ($source:expr, |$g:ident| $body:expr) => {{
        match $source {
            $crate::source::Source::File(graph, _) => {
                let $g = graph;
                $body
            }
            $crate::source::Source::Family(entroscope::schreier::Family::LineZ) => {
                let $g = &entroscope::schreier::SchreierGraph::new(entroscope::schreier::LineZ);
                $body
            }
            $crate::source::Source::Family(entroscope::schreier::Family::GridZ2) => {
                let $g = &entroscope::schreier::SchreierGraph::new(entroscope::schreier::GridZ2);
                $body
            }
            $crate::source::Source::Family(entroscope::schreier::Family::Free2ModCyclic) => {
                let $g =
                    &entroscope::schreier::SchreierGraph::new(entroscope::schreier::Free2ModCyclic);
                $body
            }
        }
    }};
}
pub(crate) use with_graph;
