//! Author-record ingestion, author-set similarity metrics, and detection of
//! co-authors who share name, institution and doctoral start date.
//!
//! - [`bibdata`]: data model, JSON-lines and BibTeX readers, normalization.
//! - [`metrics`]: NSA, GEIL, SSIM and ACDC.
//! - [`unify`]: cluster detection, merged profiles, page savings.
//! - [`cli`]: the `aua` command line and the comparison table.

pub mod bibdata;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod unify;

pub use error::{Diagnostic, Error, Location, Result};
