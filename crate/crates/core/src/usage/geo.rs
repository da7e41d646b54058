use std::collections::{BTreeMap, BTreeSet};

use crate::codes::{CountryCode, LangCode};
use crate::corpus::{Document, MetadataStore, TerritoryLanguageMap};
use crate::error::{Error, Result};
use crate::marker::DetectionSet;
use crate::stats::Proportion;

/// Cited language (rows) × language of the citing author's affiliation
/// country (columns), counted per author.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoMatrix {
    cells: BTreeMap<LangCode, BTreeMap<LangCode, u64>>,
    columns: BTreeSet<LangCode>,
}

impl GeoMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rows are cited languages and therefore never English.
    pub fn add(&mut self, cited: LangCode, affiliation: LangCode, count: u64) -> Result<()> {
        if cited.is_english() {
            return Err(Error::Invariant("English cannot be a cited language".into()));
        }
        *self.cells.entry(cited).or_default().entry(affiliation).or_insert(0) += count;
        self.columns.insert(affiliation);
        Ok(())
    }

    pub fn get(&self, cited: LangCode, affiliation: LangCode) -> u64 {
        self.cells
            .get(&cited)
            .and_then(|r| r.get(&affiliation))
            .copied()
            .unwrap_or(0)
    }

    pub fn rows(&self) -> impl Iterator<Item = LangCode> + '_ {
        self.cells.keys().copied()
    }

    pub fn columns(&self) -> impl Iterator<Item = LangCode> + '_ {
        self.columns.iter().copied()
    }

    pub fn row_total(&self, cited: LangCode) -> u64 {
        self.cells.get(&cited).map_or(0, |r| r.values().sum())
    }

    pub fn column_total(&self, affiliation: LangCode) -> u64 {
        self.cells.values().filter_map(|r| r.get(&affiliation)).sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.values().flat_map(BTreeMap::values).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Each cell divided by its row total; empty rows stay empty.
    pub fn row_normalized(&self, cited: LangCode) -> BTreeMap<LangCode, f64> {
        let total = self.row_total(cited);
        if total == 0 {
            return BTreeMap::new();
        }
        self.columns
            .iter()
            .map(|c| (*c, self.get(cited, *c) as f64 / total as f64))
            .collect()
    }

    /// The `n` rows with most citations, ties broken by code.
    pub fn top_rows(&self, n: usize) -> GeoMatrix {
        let mut rows: Vec<LangCode> = self.rows().collect();
        rows.sort_by(|a, b| self.row_total(*b).cmp(&self.row_total(*a)).then(a.cmp(b)));
        let keep: BTreeSet<LangCode> = rows.into_iter().take(n).collect();
        let mut out = GeoMatrix::new();
        for (row, cols) in &self.cells {
            if keep.contains(row) {
                for (col, count) in cols {
                    out.cells.entry(*row).or_default().insert(*col, *count);
                    out.columns.insert(*col);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GeoReport {
    pub matrix: GeoMatrix,
    /// Citing documents with affiliation metadata.
    pub participating_docs: u64,
    /// (citation, author country) pairs whose country is absent from the map.
    pub excluded_unmapped: u64,
    pub unmapped_countries: BTreeSet<CountryCode>,
    /// Authors listed with more than one affiliation country.
    pub multi_affiliation_authors: u64,
}

/// Builds the matrix on a per-author basis: every cross-lingual citation is
/// counted once for each affiliation country of each citing author.
pub fn geo_origin_matrix(
    docs: &[Document],
    detections: &DetectionSet,
    store: &MetadataStore,
    map: &TerritoryLanguageMap,
) -> GeoReport {
    let mut report = GeoReport::default();
    for doc in docs {
        if detections.count_in_doc(&doc.doc_id) == 0 {
            continue;
        }
        let Some(record) = store.get(&doc.doc_id) else {
            continue;
        };
        if record.author_affiliation_countries.is_empty() {
            continue;
        }
        report.participating_docs += 1;
        let mut per_author: BTreeMap<usize, u64> = BTreeMap::new();
        for a in &record.author_affiliation_countries {
            *per_author.entry(a.author_position).or_insert(0) += 1;
        }
        report.multi_affiliation_authors += per_author.values().filter(|n| **n > 1).count() as u64;
        for citation in detections.for_doc(&doc.doc_id) {
            for a in &record.author_affiliation_countries {
                match map.get(a.country) {
                    Some(lang) => {
                        // Detections never carry English.
                        let _ = report.matrix.add(citation.language, lang, 1);
                    }
                    None => {
                        report.excluded_unmapped += 1;
                        report.unmapped_countries.insert(a.country);
                    }
                }
            }
        }
    }
    if report.excluded_unmapped > 0 {
        log::warn!(
            "{} author affiliations in countries missing from the territory map",
            report.excluded_unmapped
        );
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LanguageLocality {
    /// Citations from countries whose main language is the cited one.
    pub local: Proportion,
    /// Citations from countries whose main language is English.
    pub en_origin: Proportion,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalitySummary {
    pub local: Proportion,
    pub anglosphere: Proportion,
    pub per_language: BTreeMap<LangCode, LanguageLocality>,
}

pub fn locality_summary(m: &GeoMatrix) -> Result<LocalitySummary> {
    let total = m.total();
    if total == 0 {
        return Err(Error::EmptyInput("geographic origin matrix"));
    }
    let mut summary = LocalitySummary {
        local: Proportion::new(0, total),
        anglosphere: Proportion::new(0, total),
        per_language: BTreeMap::new(),
    };
    for row in m.rows() {
        let row_total = m.row_total(row);
        let diag = m.get(row, row);
        let en = m.get(row, LangCode::EN);
        summary.local.part += diag;
        summary.anglosphere.part += en;
        summary.per_language.insert(
            row,
            LanguageLocality {
                local: Proportion::new(diag, row_total),
                en_origin: Proportion::new(en, row_total),
            },
        );
    }
    Ok(summary)
}
