//! Entropy of languages read along edge-labelled graphs, and how much of it
//! is lost when a finite set of factors is forbidden.
//!
//! The crate works on finite graphs and on infinite graphs generated on
//! demand (see [`graph::LabelledGraph`]). Its layers are
//!
//! * [`graph`]: the graph abstraction, windows and structural checks;
//! * [`factor`]: forbidden factors, the factor automaton and product graphs;
//! * [`census`]: word counts, growth-rate estimates and spectral entropy;
//! * [`chain`]: edge probabilities, restricted transition probabilities,
//!   harmonic vectors and the certified entropy-gap bound;
//! * [`schreier`]: coset graphs of group actions and their word problems.

pub mod census;
pub mod chain;
pub mod error;
pub mod estimate;
pub mod factor;
pub mod fixtures;
pub mod graph;
pub mod num;
pub mod perron;
pub mod schreier;

pub use error::{Error, Result};
pub use factor::ForbiddenSet;
pub use graph::{Alphabet, Budget, LabelledGraph, Symbol, VertexId};
