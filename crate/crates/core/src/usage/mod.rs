//! How cross-lingual references are used: self-citation, geographic origin
//! of the citing authors, and the in-text citation sets compared by the
//! context classifiers.

mod contexts;
mod geo;
mod selfcite;

pub use contexts::{
    adjacent_monolingual, context_pools, extract_context_sets, stratified_downsample, ContextKey,
    ContextPoolSizes, ContextPools, ContextRecord, ContextSet, ContextSets,
};
pub use geo::{
    geo_origin_matrix, locality_summary, GeoMatrix, GeoReport, LanguageLocality, LocalitySummary,
};
pub use selfcite::{
    author_name_overlap, is_self_citation, normalize_author_name, self_citation_rates, Scope,
    SelfCitationRates, SelfCitationReport,
};
