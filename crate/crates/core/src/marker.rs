//! Detection of explicit `(in <Language>)` markers in reference strings.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::codes::LangCode;
use crate::corpus::{Document, ReferenceEntry};
use crate::error::Result;
use crate::languages::{LanguageRegistry, Normalization};

/// The marker filter, applied to whole reference strings.
pub const MARKER_PATTERN: &str = r"\(\s*in\s+[a-zA-Z][a-z]+\s*\)";

const CAPTURING: &str = r"\(\s*in\s+([a-zA-Z][a-z]+)\s*\)";
const CAPTURING_ANY_CASE_IN: &str = r"\(\s*[Ii]n\s+([a-zA-Z][a-z]+)\s*\)";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkerMatch {
    /// The word following "in".
    pub raw_token: String,
    /// Byte offsets of the whole parenthesized match.
    pub span: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct MarkerScanner {
    re: Regex,
}

impl Default for MarkerScanner {
    fn default() -> Self {
        Self::new(false)
    }
}

impl MarkerScanner {
    /// `case_insensitive_in` additionally accepts "(In ...)".
    pub fn new(case_insensitive_in: bool) -> Self {
        let pattern = if case_insensitive_in {
            CAPTURING_ANY_CASE_IN
        } else {
            CAPTURING
        };
        MarkerScanner {
            re: Regex::new(pattern).expect("marker pattern compiles"),
        }
    }

    /// Leftmost match, if any.
    pub fn scan(&self, raw_text: &str) -> Option<MarkerMatch> {
        let caps = self.re.captures(raw_text)?;
        let whole = caps.get(0)?;
        Some(MarkerMatch {
            raw_token: caps[1].to_string(),
            span: (whole.start(), whole.end()),
        })
    }
}

/// Scans with the exact default pattern.
pub fn scan_marker(raw_text: &str) -> Option<MarkerMatch> {
    static SCANNER: OnceLock<MarkerScanner> = OnceLock::new();
    SCANNER.get_or_init(MarkerScanner::default).scan(raw_text)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Evidence {
    ExplicitMarker(MarkerMatch),
}

/// A reference from an English document to a work in `language`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CrossLingualCitation {
    pub doc_id: String,
    pub ref_index: usize,
    pub language: LangCode,
    pub evidence: Evidence,
}

impl CrossLingualCitation {
    pub fn marker(&self) -> &MarkerMatch {
        match &self.evidence {
            Evidence::ExplicitMarker(m) => m,
        }
    }
}

/// Scanner plus registry.
#[derive(Debug, Clone)]
pub struct Detector<'a> {
    pub scanner: MarkerScanner,
    pub registry: &'a LanguageRegistry,
}

impl<'a> Detector<'a> {
    pub fn new(registry: &'a LanguageRegistry) -> Self {
        Detector {
            scanner: MarkerScanner::default(),
            registry,
        }
    }

    pub fn with_scanner(registry: &'a LanguageRegistry, scanner: MarkerScanner) -> Self {
        Detector { scanner, registry }
    }

    /// The normalized language of a raw reference string, if it carries a
    /// non-English language marker.
    pub fn language_of(&self, raw_text: &str) -> Option<(LangCode, MarkerMatch)> {
        let m = self.scanner.scan(raw_text)?;
        match self.registry.normalize_token(&m.raw_token) {
            Normalization::Language(code) if !code.is_english() => Some((code, m)),
            _ => None,
        }
    }

    pub fn detect(&self, doc_id: &str, entry: &ReferenceEntry) -> Option<CrossLingualCitation> {
        let (language, m) = self.language_of(&entry.raw_text)?;
        Some(CrossLingualCitation {
            doc_id: doc_id.to_string(),
            ref_index: entry.ref_index,
            language,
            evidence: Evidence::ExplicitMarker(m),
        })
    }

    fn scan_document(&self, doc: &Document, set: &mut DetectionSet) {
        set.docs_scanned += 1;
        set.refs_scanned += doc.references.len() as u64;
        for entry in &doc.references {
            let Some(m) = self.scanner.scan(&entry.raw_text) else {
                continue;
            };
            *set.raw_tokens.entry(m.raw_token.clone()).or_insert(0) += 1;
            if let Normalization::Language(code) = self.registry.normalize_token(&m.raw_token) {
                if !code.is_english() {
                    set.insert(CrossLingualCitation {
                        doc_id: doc.doc_id.clone(),
                        ref_index: entry.ref_index,
                        language: code,
                        evidence: Evidence::ExplicitMarker(m),
                    });
                }
            }
        }
    }

    pub fn detect_corpus<'d, I>(&self, docs: I) -> DetectionSet
    where
        I: IntoIterator<Item = &'d Document>,
    {
        let mut set = DetectionSet::default();
        for doc in docs {
            self.scan_document(doc, &mut set);
        }
        set
    }

    /// Same result as [`Detector::detect_corpus`], computed on the rayon pool.
    pub fn detect_corpus_par(&self, docs: &[Document]) -> DetectionSet {
        docs.par_iter()
            .fold(DetectionSet::default, |mut set, doc| {
                self.scan_document(doc, &mut set);
                set
            })
            .reduce(DetectionSet::default, |mut a, b| {
                a.merge(b);
                a
            })
    }
}

/// Convenience wrapper around [`Detector::detect`] with the default scanner.
pub fn detect_cross_lingual(
    doc_id: &str,
    entry: &ReferenceEntry,
    reg: &LanguageRegistry,
) -> Option<CrossLingualCitation> {
    Detector::new(reg).detect(doc_id, entry)
}

/// All detected cross-lingual references of a corpus, keyed by document and
/// reference index, plus scan totals and the raw-token inventory (every
/// token the pattern captured, including rejected ones).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DetectionSet {
    by_doc: BTreeMap<String, BTreeMap<usize, CrossLingualCitation>>,
    pub refs_scanned: u64,
    pub docs_scanned: u64,
    pub raw_tokens: BTreeMap<String, u64>,
}

impl DetectionSet {
    pub fn insert(&mut self, citation: CrossLingualCitation) {
        self.by_doc
            .entry(citation.doc_id.clone())
            .or_default()
            .insert(citation.ref_index, citation);
    }

    /// Set union of citations, sum of counters.
    pub fn merge(&mut self, other: DetectionSet) {
        for (doc, refs) in other.by_doc {
            self.by_doc.entry(doc).or_default().extend(refs);
        }
        self.refs_scanned += other.refs_scanned;
        self.docs_scanned += other.docs_scanned;
        for (token, n) in other.raw_tokens {
            *self.raw_tokens.entry(token).or_insert(0) += n;
        }
    }

    pub fn len(&self) -> usize {
        self.by_doc.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_doc.is_empty()
    }

    /// Citations ordered by (doc_id, ref_index).
    pub fn iter(&self) -> impl Iterator<Item = &CrossLingualCitation> {
        self.by_doc.values().flat_map(BTreeMap::values)
    }

    pub fn get(&self, doc_id: &str, ref_index: usize) -> Option<&CrossLingualCitation> {
        self.by_doc.get(doc_id)?.get(&ref_index)
    }

    pub fn is_cross_lingual(&self, doc_id: &str, ref_index: usize) -> bool {
        self.get(doc_id, ref_index).is_some()
    }

    pub fn for_doc(&self, doc_id: &str) -> impl Iterator<Item = &CrossLingualCitation> {
        self.by_doc.get(doc_id).into_iter().flat_map(BTreeMap::values)
    }

    pub fn count_in_doc(&self, doc_id: &str) -> usize {
        self.by_doc.get(doc_id).map_or(0, BTreeMap::len)
    }

    pub fn languages_of(&self, doc_id: &str) -> BTreeSet<LangCode> {
        self.for_doc(doc_id).map(|c| c.language).collect()
    }

    /// Ids of documents with at least one detection, sorted.
    pub fn doc_ids(&self) -> impl Iterator<Item = &str> {
        self.by_doc.keys().map(String::as_str)
    }

    pub fn doc_count(&self) -> usize {
        self.by_doc.len()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for c in self.iter() {
            let m = c.marker();
            let record = DetectionRecord {
                doc_id: c.doc_id.clone(),
                ref_index: c.ref_index,
                language: c.language,
                token: m.raw_token.clone(),
                span: [m.span.0, m.span.1],
            };
            serde_json::to_writer(&mut out, &record).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

impl FromIterator<CrossLingualCitation> for DetectionSet {
    fn from_iter<I: IntoIterator<Item = CrossLingualCitation>>(iter: I) -> Self {
        let mut set = DetectionSet::default();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

/// One line of `detections.jsonl`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub doc_id: String,
    pub ref_index: usize,
    pub language: LangCode,
    pub token: String,
    pub span: [usize; 2],
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Discipline;

    #[test]
    fn scan_examples() {
        let saitou = "M. Saitou, 'Hydrodynamics on non-commutative space' (in Japanese), Soryushiron Kenkyu";
        let m = scan_marker(saitou).unwrap();
        assert_eq!(m.raw_token, "Japanese");
        assert_eq!(&saitou[m.span.0..m.span.1], "(in Japanese)");

        assert_eq!(scan_marker("J. Doe, results (in preparation)").unwrap().raw_token, "preparation");
        assert_eq!(scan_marker("J. Doe, Some Title, 2001"), None);
        assert_eq!(scan_marker("(in J)"), None);
        assert_eq!(scan_marker("(In Russian)"), None);
        assert_eq!(scan_marker("( in   Russian )").unwrap().raw_token, "Russian");
        assert_eq!(scan_marker("(in RUSSIAN)"), None);
    }

    #[test]
    fn leftmost_match_wins() {
        let m = scan_marker("X (in press) Y (in Russian)").unwrap();
        assert_eq!(m.raw_token, "press");
        assert_eq!(m.span, (2, 12));
    }

    #[test]
    fn case_insensitive_flag_widens_in() {
        let wide = MarkerScanner::new(true);
        assert_eq!(wide.scan("(In Russian)").unwrap().raw_token, "Russian");
        assert_eq!(wide.scan("(IN Russian)"), None);
    }

    #[test]
    fn detection_examples() {
        let reg = LanguageRegistry::builtin();
        let entry = |t: &str| ReferenceEntry::new(0, t);
        let ru = detect_cross_lingual("d", &entry("A. B, Title (in russain)"), &reg).unwrap();
        assert_eq!(ru.language, LangCode::new("ru").unwrap());
        assert_eq!(ru.marker().raw_token, "russain");
        assert!(detect_cross_lingual("d", &entry("A. B, Title (in press)"), &reg).is_none());
        assert!(detect_cross_lingual("d", &entry("A. B, Title (in English)"), &reg).is_none());
        assert!(detect_cross_lingual("d", &entry("A. B, Title (in klingon)"), &reg).is_none());
    }

    fn doc(id: &str, refs: &[&str]) -> Document {
        Document {
            doc_id: id.into(),
            discipline: Discipline::Math,
            year: 2000,
            month: None,
            references: refs
                .iter()
                .enumerate()
                .map(|(i, r)| ReferenceEntry::new(i, *r))
                .collect(),
            contexts: vec![],
        }
    }

    #[test]
    fn corpus_detection_counts_tokens() {
        let reg = LanguageRegistry::builtin();
        let docs = vec![
            doc("a", &["x (in Russian)", "y (in press)", "z"]),
            doc("b", &["w (in Japanese)", "v (in klingon)"]),
        ];
        let set = Detector::new(&reg).detect_corpus(&docs);
        assert_eq!(set.len(), 2);
        assert_eq!((set.refs_scanned, set.docs_scanned), (5, 2));
        assert_eq!(set.raw_tokens.len(), 4);
        assert_eq!(set.raw_tokens["klingon"], 1);
        assert!(set.is_cross_lingual("a", 0));
        assert!(!set.is_cross_lingual("a", 1));
        assert_eq!(Detector::new(&reg).detect_corpus_par(&docs), set);
    }

    #[test]
    fn empty_corpus() {
        let reg = LanguageRegistry::builtin();
        let set = Detector::new(&reg).detect_corpus(&[]);
        assert!(set.is_empty());
        assert_eq!(set.refs_scanned, 0);
    }

    #[test]
    fn jsonl_output_shape() {
        let reg = LanguageRegistry::builtin();
        let set = Detector::new(&reg).detect_corpus(&[doc("a", &["x (in Russian)"])]);
        let mut buf = Vec::new();
        set.write_jsonl(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"doc_id\":\"a\",\"ref_index\":0,\"language\":\"ru\",\"token\":\"Russian\",\"span\":[2,14]}\n"
        );
    }
}
