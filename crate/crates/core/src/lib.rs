//! Combinatorial engine for balanced edge-colorings of complete graphs.
//!
//! * [`graph`]: colored complete graphs, generators and exact balance checks
//! * [`family`]: the vertex-critical all-colors family and blow-ups
//! * [`search`]: color-consistent pattern containment
//! * [`drc`]: dependent random choice and the multipartite extraction pipeline
//! * [`bounds`]: cone lemmas, the asymmetric `M_{l,k}` route and lower-bound search

pub mod bounds;
pub mod cgr;
pub mod drc;
pub mod family;
pub mod fully_colored;
pub mod graph;
pub mod pattern;
pub mod rational;
pub mod search;
pub mod vertex_set;

pub use family::{blow_up, canonical_form, enumerate_family, CanonicalForm, Family};
pub use fully_colored::FullyColoredGraph;
pub use graph::{BalanceReport, Color, ColoredCompleteGraph};
pub use pattern::{m_pattern, verify_embedding, Embedding, Pattern};
pub use rational::Rational;
pub use vertex_set::VertexSet;
