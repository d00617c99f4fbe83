//! Exact and simulated distributional diagnostics for monochromatic
//! subgraph counts under uniform random vertex 2-colorings.

pub mod enumerate;
pub mod error;
pub mod families;
pub mod graph;
pub mod moments;
pub mod pattern;
pub mod poly;
pub mod rational;
pub mod diagnostics;
pub mod simulate;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::Graph;
pub use pattern::Pattern;
