//! Provenance capture, storage and query for scientific I/O workloads.
//!
//! I/O performed through the [`facade`] is observed by a per-process
//! [`tracker::Session`], which builds a typed provenance graph and writes it
//! as a Turtle sub-graph file. Sub-graphs are [`merge`]d offline, queried
//! with conjunctive triple patterns ([`query`]) and rendered as DOT ([`viz`]).

pub mod error;
pub mod exec;
pub mod facade;
pub mod graph;
pub mod merge;
pub mod model;
pub mod query;
pub mod tracker;
pub mod turtle;
pub mod viz;
pub mod workloads;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::ProvGraph;
pub use model::{Guid, Literal, Object, Predicate, ProvNode, SubClass, SuperClass, Triple};
