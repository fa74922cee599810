//! Factual-knowledge probing toolkit.
//!
//! The crate is organised around the life cycle of a probing run:
//!
//! * [`corpus`] parses triplets and template registries, filters paraphrases
//!   for diversity, samples interference entities and expands everything into
//!   a deterministic [`corpus::ProbeManifest`].
//! * [`mocklm`] turns a manifest into backend results from an explicit
//!   knowledge table, so every downstream path can be checked in closed form.
//! * [`metrics`] joins manifests with results, selects primary anchors and
//!   computes PFD, IRD and MONITOR together with accuracy, correlation,
//!   histogram and probe-cost statistics.
//! * [`report`] aggregates per-relation scores across models into overall
//!   tables, correlations and plot data files.

pub mod corpus;
pub mod error;
pub mod metrics;
pub mod mocklm;
pub mod report;
pub mod rng;
pub mod text;

pub use error::{Error, Result};
