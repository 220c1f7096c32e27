//! Product line-ability metrics for sets of similar software products.
//!
//! Each product is described as a directed graph of components whose edges
//! carry message signatures and a required/optional flag ([`model`],
//! [`parser`]). Components are split into required and optional sets
//! ([`classify`]), matched across products by syntactic signature identity
//! ([`identity`]), and compared through seven commonality and variability
//! metrics ([`metrics`]). [`report`] assembles everything with
//! recommendations and renders it as text, JSON or Graphviz DOT.
//!
//! ```
//! use product_line_metrics::{build_report, parse_products, ReportConfig};
//!
//! let text = "product a\ncomponent X\ncomponent Y\nedge X -> Y {v: NAT}\nstart X\n\
//!             product b\ncomponent X\ncomponent Y\nedge X -> Y {v: NAT}\nstart X\n";
//! let products = parse_products(text, true).products;
//! let report = build_report(products, ReportConfig::default()).unwrap();
//! assert_eq!(report.soc, 2);
//! ```

pub mod classify;
pub mod cli;
pub mod identity;
pub mod metrics;
pub mod model;
pub mod parser;
pub mod report;

pub use classify::{classify_components, find_isolated, ClassifyError};
pub use identity::{component_key, exclusive_region, shared_by_all, ComponentKey, SharingLattice};
pub use metrics::{MetricsError, ProductSetAnalysis};
pub use model::{
    Classification, Component, DependencyEdge, MessageSignature, Optionality, ProductGraph, Ratio, TypeTag,
};
pub use parser::{parse_products, serialize_products, validate, Diagnostic, Severity};
pub use report::{build_report, render, Format, MetricsReport, ReportConfig, ReportError};
