//! Corpus data model and streaming loaders.
//!
//! Documents and metadata records are read from JSONL, one record per line;
//! the territory/language map is a two-column CSV. Documents are validated as
//! they are read and are immutable afterwards.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};

use crate::codes::{CountryCode, LangCode};
use crate::error::{Error, Result};
use crate::text::normalize_title;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum Discipline {
    Math,
    Physics,
    Cs,
    Other(String),
}

impl From<String> for Discipline {
    fn from(label: String) -> Self {
        match label.as_str() {
            "math" => Discipline::Math,
            "physics" => Discipline::Physics,
            "cs" => Discipline::Cs,
            _ => Discipline::Other(label),
        }
    }
}

impl From<Discipline> for String {
    fn from(d: Discipline) -> String {
        d.to_string()
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Discipline::Math => "math",
            Discipline::Physics => "physics",
            Discipline::Cs => "cs",
            Discipline::Other(label) => label,
        })
    }
}

/// One entry of a reference section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub ref_index: usize,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_meta_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
}

impl ReferenceEntry {
    pub fn new(ref_index: usize, raw_text: impl Into<String>) -> Self {
        ReferenceEntry {
            ref_index,
            raw_text: raw_text.into(),
            title: None,
            cited_meta_id: None,
            year: None,
        }
    }
}

/// A citing sentence paired with the reference one of its markers points to.
/// A sentence citing two references appears as two records sharing `sentence_id`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InTextCitation {
    pub sentence_id: u64,
    pub sentence_text: String,
    pub ref_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub discipline: Discipline,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub month: Option<u8>,
    #[serde(default)]
    pub references: Vec<ReferenceEntry>,
    #[serde(default)]
    pub contexts: Vec<InTextCitation>,
}

impl Document {
    /// Checks the per-document invariants. The error names the violated rule.
    pub fn validate(&self) -> Result<(), String> {
        if self.doc_id.is_empty() {
            return Err("empty doc_id".into());
        }
        if let Some(m) = self.month {
            if !(1..=12).contains(&m) {
                return Err(format!("month {m} outside 1-12"));
            }
        }
        for (pos, entry) in self.references.iter().enumerate() {
            if entry.ref_index != pos {
                return Err(format!(
                    "reference at position {pos} has ref_index {}",
                    entry.ref_index
                ));
            }
            if entry.raw_text.trim().is_empty() {
                return Err(format!("reference {pos} has empty raw_text"));
            }
        }
        for ctx in &self.contexts {
            if ctx.sentence_text.trim().is_empty() {
                return Err(format!("sentence {} is empty", ctx.sentence_id));
            }
            if ctx.ref_index >= self.references.len() {
                return Err(format!(
                    "sentence {} cites reference {} but there are {} references",
                    ctx.sentence_id,
                    ctx.ref_index,
                    self.references.len()
                ));
            }
        }
        Ok(())
    }
}

/// What to do with lines that fail to parse or validate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Severity {
    Abort,
    #[default]
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadStats {
    /// Non-blank lines read.
    pub lines: u64,
    pub loaded: u64,
    pub skipped: u64,
}

impl LoadStats {
    pub fn skipped_fraction(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.skipped as f64 / self.lines as f64
        }
    }
}

/// Reads non-blank lines, yielding `(line_number, text)` or a decoding error.
struct Lines<R> {
    reader: R,
    line: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> Lines<R> {
    fn new(reader: R) -> Self {
        Lines {
            reader,
            line: 0,
            buf: Vec::new(),
        }
    }

    fn next_line(&mut self) -> Option<Result<(usize, String)>> {
        loop {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line += 1;
            let text = match std::str::from_utf8(&self.buf) {
                Ok(t) => t.trim(),
                Err(e) => {
                    return Some(Err(Error::Malformed {
                        line: self.line,
                        reason: format!("invalid UTF-8: {e}"),
                    }))
                }
            };
            if !text.is_empty() {
                return Some(Ok((self.line, text.to_string())));
            }
        }
    }
}

/// Lazy, validating reader over a documents JSONL stream.
pub struct DocumentReader<R> {
    lines: Lines<R>,
}

impl<R: BufRead> Iterator for DocumentReader<R> {
    type Item = Result<Document>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, text) = match self.lines.next_line()? {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let doc: Document = match serde_json::from_str(&text) {
            Ok(d) => d,
            Err(e) => {
                return Some(Err(Error::Malformed {
                    line,
                    reason: e.to_string(),
                }))
            }
        };
        Some(match doc.validate() {
            Ok(()) => Ok(doc),
            Err(reason) => Err(Error::InvalidDocument {
                line,
                doc_id: doc.doc_id,
                reason,
            }),
        })
    }
}

/// Streams documents in file order. Memory use does not grow with the file.
pub fn load_documents<R: BufRead>(reader: R) -> DocumentReader<R> {
    DocumentReader {
        lines: Lines::new(reader),
    }
}

/// Loads every document, additionally enforcing unique `doc_id`s.
pub fn collect_documents<R: BufRead>(
    reader: R,
    severity: Severity,
) -> Result<(Vec<Document>, LoadStats)> {
    let mut stats = LoadStats::default();
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for item in load_documents(reader) {
        stats.lines += 1;
        let outcome = item.and_then(|doc| {
            if seen.insert(doc.doc_id.clone()) {
                Ok(doc)
            } else {
                Err(Error::DuplicateDocument(doc.doc_id))
            }
        });
        match outcome {
            Ok(doc) => {
                stats.loaded += 1;
                docs.push(doc);
            }
            // I/O failures are never skippable.
            Err(e @ Error::Io(_)) => return Err(e),
            Err(e) if severity == Severity::Abort => return Err(e),
            Err(e) => {
                log::warn!("skipping document: {e}");
                stats.skipped += 1;
            }
        }
    }
    Ok((docs, stats))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_id: Option<String>,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffiliationCountry {
    pub author_position: usize,
    pub country: CountryCode,
}

/// Bibliographic metadata of a cited or citing paper. Citing documents are
/// looked up under their `doc_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetadataRecord {
    pub meta_id: String,
    pub title: String,
    #[serde(default)]
    pub alt_titles: Vec<String>,
    #[serde(default)]
    pub authors: Vec<Author>,
    #[serde(default)]
    pub author_affiliation_countries: Vec<AffiliationCountry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    pub citation_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub published_version_id: Option<String>,
}

impl MetadataRecord {
    pub fn new(meta_id: impl Into<String>, title: impl Into<String>) -> Self {
        MetadataRecord {
            meta_id: meta_id.into(),
            title: title.into(),
            alt_titles: Vec::new(),
            authors: Vec::new(),
            author_affiliation_countries: Vec::new(),
            year: None,
            citation_count: 0,
            published_version_id: None,
        }
    }

    fn validate(&self) -> Result<(), String> {
        if self.meta_id.is_empty() {
            return Err("empty meta_id".into());
        }
        if let Some(bad) = self
            .author_affiliation_countries
            .iter()
            .find(|a| a.author_position >= self.authors.len())
        {
            return Err(format!(
                "affiliation for author position {} but only {} authors",
                bad.author_position,
                self.authors.len()
            ));
        }
        Ok(())
    }
}

/// Read-only collection of metadata records, indexed by id and normalized title.
#[derive(Debug, Clone, Default)]
pub struct MetadataStore {
    records: HashMap<String, MetadataRecord>,
    by_title: HashMap<String, Vec<String>>,
}

impl MetadataStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, record: MetadataRecord) -> Result<()> {
        if self.records.contains_key(&record.meta_id) {
            return Err(Error::DuplicateMetadata(record.meta_id));
        }
        let titles = std::iter::once(&record.title).chain(&record.alt_titles);
        for key in titles.map(|t| normalize_title(t)).filter(|k| !k.is_empty()) {
            let ids = self.by_title.entry(key).or_default();
            if !ids.contains(&record.meta_id) {
                ids.push(record.meta_id.clone());
            }
        }
        self.records.insert(record.meta_id.clone(), record);
        Ok(())
    }

    pub fn get(&self, meta_id: &str) -> Option<&MetadataRecord> {
        self.records.get(meta_id)
    }

    pub fn contains(&self, meta_id: &str) -> bool {
        self.records.contains_key(meta_id)
    }

    /// Ids whose title or an alternative title normalizes to `key`.
    pub fn ids_for_title(&self, key: &str) -> &[String] {
        self.by_title.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &MetadataRecord> {
        self.records.values()
    }

    /// Records whose `published_version_id` points at no record in the store.
    pub fn dangling_published_links(&self) -> usize {
        self.records
            .values()
            .filter_map(|r| r.published_version_id.as_deref())
            .filter(|id| !self.records.contains_key(*id))
            .count()
    }
}

pub fn load_metadata<R: BufRead>(reader: R) -> Result<MetadataStore> {
    let mut store = MetadataStore::new();
    let mut lines = Lines::new(reader);
    while let Some(item) = lines.next_line() {
        let (line, text) = item?;
        let record: MetadataRecord =
            serde_json::from_str(&text).map_err(|e| Error::Malformed {
                line,
                reason: e.to_string(),
            })?;
        record
            .validate()
            .map_err(|reason| Error::InvalidMetadata {
                line,
                meta_id: record.meta_id.clone(),
                reason,
            })?;
        store.insert(record)?;
    }
    let dangling = store.dangling_published_links();
    if dangling > 0 {
        log::warn!("{dangling} metadata records link to an absent published version");
    }
    Ok(store)
}

/// Country → most commonly spoken language.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TerritoryLanguageMap {
    entries: BTreeMap<CountryCode, LangCode>,
}

impl TerritoryLanguageMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, country: CountryCode, language: LangCode) -> Result<()> {
        if self.entries.insert(country, language).is_some() {
            return Err(Error::DuplicateCountry(country.to_string()));
        }
        Ok(())
    }

    pub fn get(&self, country: CountryCode) -> Option<LangCode> {
        self.entries.get(&country).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (CountryCode, LangCode)> + '_ {
        self.entries.iter().map(|(c, l)| (*c, *l))
    }
}

impl FromIterator<(CountryCode, LangCode)> for TerritoryLanguageMap {
    /// Later duplicates overwrite earlier ones; use [`load_territory_map`] for
    /// checked loading.
    fn from_iter<I: IntoIterator<Item = (CountryCode, LangCode)>>(iter: I) -> Self {
        TerritoryLanguageMap {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Reads `country_code,language_code` rows. The header row is optional.
pub fn load_territory_map<R: Read>(reader: R) -> Result<TerritoryLanguageMap> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut map = TerritoryLanguageMap::new();
    for (i, row) in csv.records().enumerate() {
        let row = row?;
        if row.len() != 2 {
            return Err(Error::Malformed {
                line: i + 1,
                reason: format!("expected 2 columns, found {}", row.len()),
            });
        }
        if i == 0 && &row[0] == "country_code" {
            continue;
        }
        map.insert(CountryCode::new(&row[0])?, LangCode::new(&row[1])?)?;
    }
    Ok(map)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub docs: u64,
    pub refs: u64,
    pub contexts: u64,
    pub refs_with_meta_id: u64,
    pub dangling_meta_refs: u64,
    pub countries_missing_from_map: u64,
    pub missing_countries: Vec<CountryCode>,
}

/// Counts the corpus against its metadata store and territory map.
pub fn validate_corpus(
    docs: &[Document],
    store: &MetadataStore,
    map: &TerritoryLanguageMap,
) -> ValidationReport {
    let mut report = ValidationReport {
        docs: docs.len() as u64,
        ..Default::default()
    };
    for doc in docs {
        report.refs += doc.references.len() as u64;
        report.contexts += doc.contexts.len() as u64;
        for id in doc.references.iter().filter_map(|r| r.cited_meta_id.as_deref()) {
            report.refs_with_meta_id += 1;
            if !store.contains(id) {
                report.dangling_meta_refs += 1;
            }
        }
    }
    let missing: BTreeSet<CountryCode> = store
        .records()
        .flat_map(|r| r.author_affiliation_countries.iter().map(|a| a.country))
        .filter(|c| map.get(*c).is_none())
        .collect();
    report.countries_missing_from_map = missing.len() as u64;
    report.missing_countries = missing.into_iter().collect();
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE_DOC: &str = r#"{"doc_id":"d1","discipline":"math","year":2010,"references":[{"ref_index":0,"raw_text":"A. B, Title (in Russian)"}],"contexts":[{"sentence_id":3,"sentence_text":"See [1].","ref_index":0}]}"#;

    #[test]
    fn one_line_one_document() {
        let docs: Vec<_> = load_documents(ONE_DOC.as_bytes()).collect::<Result<_>>().unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].doc_id, "d1");
        assert_eq!(docs[0].discipline, Discipline::Math);
        assert_eq!(docs[0].contexts[0].sentence_id, 3);
    }

    #[test]
    fn empty_stream_is_empty() {
        assert_eq!(load_documents("".as_bytes()).count(), 0);
        assert_eq!(load_documents("\n\n".as_bytes()).count(), 0);
    }

    #[test]
    fn out_of_order_references_name_the_document() {
        let line = r#"{"doc_id":"bad","discipline":"cs","year":2000,"references":[{"ref_index":1,"raw_text":"x"},{"ref_index":0,"raw_text":"y"}]}"#;
        let err = load_documents(line.as_bytes()).next().unwrap().unwrap_err();
        match err {
            Error::InvalidDocument { line, doc_id, .. } => {
                assert_eq!(line, 1);
                assert_eq!(doc_id, "bad");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_line_carries_line_number() {
        let input = format!("{ONE_DOC}\n{{not json\n");
        let items: Vec<_> = load_documents(input.as_bytes()).collect();
        assert!(items[0].is_ok());
        assert!(matches!(items[1], Err(Error::Malformed { line: 2, .. })));
    }

    #[test]
    fn dangling_context_reference_is_invalid() {
        let line = r#"{"doc_id":"d","discipline":"cs","year":2000,"references":[],"contexts":[{"sentence_id":0,"sentence_text":"x","ref_index":0}]}"#;
        assert!(load_documents(line.as_bytes()).next().unwrap().is_err());
    }

    #[test]
    fn unknown_discipline_is_kept_as_label() {
        let line = r#"{"doc_id":"d","discipline":"q-bio","year":2000}"#;
        let doc = load_documents(line.as_bytes()).next().unwrap().unwrap();
        assert_eq!(doc.discipline, Discipline::Other("q-bio".into()));
        assert_eq!(serde_json::to_value(&doc).unwrap()["discipline"], "q-bio");
    }

    #[test]
    fn skip_mode_counts_bad_lines_and_duplicates() {
        let input = format!("{ONE_DOC}\nnope\n{ONE_DOC}\n");
        let (docs, stats) = collect_documents(input.as_bytes(), Severity::Skip).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(stats, LoadStats { lines: 3, loaded: 1, skipped: 2 });
        assert!(collect_documents(input.as_bytes(), Severity::Abort).is_err());
    }

    #[test]
    fn metadata_store_loading() {
        let two = "{\"meta_id\":\"a\",\"title\":\"T\",\"citation_count\":1}\n{\"meta_id\":\"b\",\"title\":\"U\",\"citation_count\":0}\n";
        assert_eq!(load_metadata(two.as_bytes()).unwrap().len(), 2);

        let dup = "{\"meta_id\":\"a\",\"title\":\"T\",\"citation_count\":1}\n{\"meta_id\":\"a\",\"title\":\"U\",\"citation_count\":0}\n";
        assert!(matches!(load_metadata(dup.as_bytes()), Err(Error::DuplicateMetadata(id)) if id == "a"));

        let dangling = "{\"meta_id\":\"a\",\"title\":\"T\",\"citation_count\":1,\"published_version_id\":\"zz\"}\n";
        assert_eq!(load_metadata(dangling.as_bytes()).unwrap().dangling_published_links(), 1);

        let negative = "{\"meta_id\":\"a\",\"title\":\"T\",\"citation_count\":-1}\n";
        assert!(load_metadata(negative.as_bytes()).is_err());
    }

    #[test]
    fn metadata_author_positions_must_exist() {
        let line = r#"{"meta_id":"a","title":"T","citation_count":1,"authors":[{"name":"X"}],"author_affiliation_countries":[{"author_position":1,"country":"RU"}]}"#;
        assert!(matches!(load_metadata(line.as_bytes()), Err(Error::InvalidMetadata { .. })));
    }

    #[test]
    fn territory_map_loading() {
        let map = load_territory_map("country_code,language_code\nRU,ru\n".as_bytes()).unwrap();
        assert_eq!(map.get(CountryCode::new("RU").unwrap()), Some(LangCode::new("ru").unwrap()));
        assert!(load_territory_map("RU,ru\n".as_bytes()).is_ok());
        assert!(matches!(
            load_territory_map("US,en\nUS,es\n".as_bytes()),
            Err(Error::DuplicateCountry(c)) if c == "US"
        ));
        assert!(load_territory_map("".as_bytes()).unwrap().is_empty());
        assert!(load_territory_map("Russia,ru\n".as_bytes()).is_err());
        assert!(load_territory_map("RU,russian\n".as_bytes()).is_err());
    }

    #[test]
    fn validation_of_empty_corpus_is_zero() {
        let report = validate_corpus(&[], &MetadataStore::new(), &TerritoryLanguageMap::new());
        assert_eq!(report, ValidationReport::default());
    }

    #[test]
    fn validation_counts_dangling_refs_and_missing_countries() {
        let mut doc = load_documents(ONE_DOC.as_bytes()).next().unwrap().unwrap();
        doc.references[0].cited_meta_id = Some("absent".into());
        let mut store = MetadataStore::new();
        let mut rec = MetadataRecord::new("m", "T");
        rec.authors.push(Author { author_id: None, name: "X".into() });
        rec.author_affiliation_countries.push(AffiliationCountry {
            author_position: 0,
            country: CountryCode::new("JP").unwrap(),
        });
        store.insert(rec).unwrap();
        let report = validate_corpus(&[doc], &store, &TerritoryLanguageMap::new());
        assert_eq!(report.refs_with_meta_id, 1);
        assert_eq!(report.dangling_meta_refs, 1);
        assert_eq!(report.countries_missing_from_map, 1);
    }
}
