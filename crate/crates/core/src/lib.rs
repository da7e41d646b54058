//! Detection of citations from English papers to non-English publications,
//! and the prevalence, usage and impact statistics computed over them.
//!
//! The pipeline is organised around a few stages:
//!
//! * [`corpus`] loads documents, metadata records and the territory/language
//!   map from flat JSONL/CSV files.
//! * [`languages`] and [`marker`] find explicit `(in <Language>)` markers in
//!   reference strings and normalize them to ISO 639-1 codes.
//! * [`title`] classifies the script of cited titles and estimates how many
//!   cross-lingual references go unmarked.
//! * [`prevalence`], [`usage`], [`classify`] and [`impact`] compute the
//!   statistics.
//! * [`output`] and [`report`] write CSV tables and SVG heatmaps.
//!
//! Interchangeable algorithms (title language identifiers, citation context
//! classifiers, reference matchers) implement a common trait and are looked
//! up by name through [`strategy`].

pub mod classify;
pub mod codes;
pub mod corpus;
pub mod error;
pub mod impact;
pub mod languages;
pub mod marker;
pub mod output;
pub mod prevalence;
pub mod report;
pub mod sampling;
pub mod stats;
pub mod strategy;
pub mod synth;
pub mod text;
pub mod title;
pub mod usage;

pub use codes::{CountryCode, LangCode};
pub use error::{Error, Result};
