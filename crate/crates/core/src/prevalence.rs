//! How common cross-lingual references are: corpus and document level
//! ratios, rates grouped by year or discipline, the share of a reference
//! section that is cross-lingual, and language co-occurrence.

use std::collections::BTreeMap;

use crate::codes::LangCode;
use crate::corpus::{Discipline, Document};
use crate::error::{Error, Result};
use crate::marker::DetectionSet;
use crate::stats::{Proportion, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LanguageCounts {
    pub refs: u64,
    pub docs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrevalenceReport {
    /// Cross-lingual references out of all references.
    pub refs: Proportion,
    /// Documents with at least one cross-lingual reference out of all documents.
    pub docs: Proportion,
    /// Number of distinct non-English languages cited → documents.
    pub docs_by_language_count: BTreeMap<usize, u64>,
    pub per_language: BTreeMap<LangCode, LanguageCounts>,
}

impl PrevalenceReport {
    /// A report from aggregate counts alone.
    pub fn from_counts(xling_refs: u64, total_refs: u64, xling_docs: u64, total_docs: u64) -> Self {
        PrevalenceReport {
            refs: Proportion::new(xling_refs, total_refs),
            docs: Proportion::new(xling_docs, total_docs),
            ..Default::default()
        }
    }

    pub fn merge(&mut self, other: PrevalenceReport) {
        self.refs += other.refs;
        self.docs += other.docs;
        for (k, n) in other.docs_by_language_count {
            *self.docs_by_language_count.entry(k).or_insert(0) += n;
        }
        for (l, c) in other.per_language {
            let e = self.per_language.entry(l).or_default();
            e.refs += c.refs;
            e.docs += c.docs;
        }
    }

    fn observe(&mut self, doc: &Document, detections: &DetectionSet) {
        self.refs.whole += doc.references.len() as u64;
        self.docs.whole += 1;
        let mut langs: BTreeMap<LangCode, u64> = BTreeMap::new();
        for c in detections.for_doc(&doc.doc_id) {
            *langs.entry(c.language).or_insert(0) += 1;
        }
        if langs.is_empty() {
            return;
        }
        self.docs.part += 1;
        *self.docs_by_language_count.entry(langs.len()).or_insert(0) += 1;
        for (lang, n) in langs {
            self.refs.part += n;
            let e = self.per_language.entry(lang).or_default();
            e.refs += n;
            e.docs += 1;
        }
    }
}

pub fn prevalence_summary(docs: &[Document], detections: &DetectionSet) -> PrevalenceReport {
    let mut report = PrevalenceReport::default();
    for doc in docs {
        report.observe(doc, detections);
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Year,
    Discipline,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GroupKey {
    Year(i32),
    Discipline(Discipline),
}

impl std::fmt::Display for GroupKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroupKey::Year(y) => write!(f, "{y}"),
            GroupKey::Discipline(d) => write!(f, "{d}"),
        }
    }
}

/// Per group: documents citing (the filtered language, or any non-English
/// language) out of all documents in the group.
pub fn grouped_doc_rates(
    docs: &[Document],
    detections: &DetectionSet,
    group: GroupBy,
    language_filter: Option<LangCode>,
) -> BTreeMap<GroupKey, Proportion> {
    let mut rates: BTreeMap<GroupKey, Proportion> = BTreeMap::new();
    for doc in docs {
        let key = match group {
            GroupBy::Year => GroupKey::Year(doc.year),
            GroupBy::Discipline => GroupKey::Discipline(doc.discipline.clone()),
        };
        let cites = detections
            .for_doc(&doc.doc_id)
            .any(|c| language_filter.is_none_or(|l| c.language == l));
        let e = rates.entry(key).or_default();
        e.whole += 1;
        e.part += cites as u64;
    }
    rates
}

/// Share of one document's reference section that is cross-lingual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossLinguality {
    pub doc_id: String,
    pub discipline: Discipline,
    pub xling_refs: u64,
    pub total_refs: u64,
}

impl CrossLinguality {
    pub fn value(&self) -> f64 {
        self.xling_refs as f64 / self.total_refs as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossLingualityReport {
    /// Documents with at least one cross-lingual reference, in input order.
    pub values: Vec<CrossLinguality>,
    /// Documents skipped because their reference section is empty.
    pub empty_reference_docs: u64,
    pub summary: Option<Summary>,
    pub per_discipline: BTreeMap<Discipline, Summary>,
}

pub const HISTOGRAM_BINS: usize = 50;

impl CrossLingualityReport {
    /// Counts over equal-width bins of [0, 1]; 1.0 falls in the last bin.
    pub fn histogram(&self, bins: usize) -> Vec<u64> {
        let mut hist = vec![0u64; bins];
        for v in &self.values {
            let bin = (v.xling_refs as u128 * bins as u128 / v.total_refs as u128) as usize;
            hist[bin.min(bins - 1)] += 1;
        }
        hist
    }
}

pub fn cross_linguality(docs: &[Document], detections: &DetectionSet) -> Result<CrossLingualityReport> {
    let mut values = Vec::new();
    let mut empty = 0;
    for doc in docs {
        let xling = detections.count_in_doc(&doc.doc_id) as u64;
        if doc.references.is_empty() {
            if xling > 0 {
                return Err(Error::Invariant(format!(
                    "document {:?} has detections but no references",
                    doc.doc_id
                )));
            }
            empty += 1;
            continue;
        }
        if xling > 0 {
            values.push(CrossLinguality {
                doc_id: doc.doc_id.clone(),
                discipline: doc.discipline.clone(),
                xling_refs: xling,
                total_refs: doc.references.len() as u64,
            });
        }
    }
    let summary = Summary::from_fractions(values.iter().map(|v| (v.xling_refs, v.total_refs)));
    let mut by_disc: BTreeMap<Discipline, Vec<(u64, u64)>> = BTreeMap::new();
    for v in &values {
        by_disc
            .entry(v.discipline.clone())
            .or_default()
            .push((v.xling_refs, v.total_refs));
    }
    let per_discipline = by_disc
        .into_iter()
        .filter_map(|(d, xs)| Summary::from_fractions(xs).map(|s| (d, s)))
        .collect();
    Ok(CrossLingualityReport {
        values,
        empty_reference_docs: empty,
        summary,
        per_discipline,
    })
}

/// Unordered language pairs co-cited within one document, by document count
/// descending, ties broken by the pair.
pub fn language_pair_counts(detections: &DetectionSet) -> Vec<((LangCode, LangCode), u64)> {
    let mut counts: BTreeMap<(LangCode, LangCode), u64> = BTreeMap::new();
    for doc_id in detections.doc_ids() {
        let langs: Vec<LangCode> = detections.languages_of(doc_id).into_iter().collect();
        for (i, a) in langs.iter().enumerate() {
            for b in &langs[i + 1..] {
                *counts.entry((*a, *b)).or_insert(0) += 1;
            }
        }
    }
    let mut pairs: Vec<_> = counts.into_iter().collect();
    pairs.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ReferenceEntry;
    use crate::languages::LanguageRegistry;
    use crate::marker::Detector;

    fn doc(id: &str, disc: Discipline, year: i32, refs: &[&str]) -> Document {
        Document {
            doc_id: id.into(),
            discipline: disc,
            year,
            month: None,
            references: refs.iter().enumerate().map(|(i, r)| ReferenceEntry::new(i, *r)).collect(),
            contexts: vec![],
        }
    }

    fn code(s: &str) -> LangCode {
        LangCode::new(s).unwrap()
    }

    #[test]
    fn zero_detections() {
        let reg = LanguageRegistry::builtin();
        let docs = vec![doc("a", Discipline::Math, 2000, &["x", "y"])];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let r = prevalence_summary(&docs, &set);
        assert_eq!(r.refs, Proportion::new(0, 2));
        assert_eq!(r.docs, Proportion::new(0, 1));
        assert!(r.per_language.is_empty());
    }

    #[test]
    fn grouped_rates_by_discipline() {
        let reg = LanguageRegistry::builtin();
        let m = Discipline::Math;
        let p = Discipline::Physics;
        let docs = vec![
            doc("m1", m.clone(), 2000, &["(in Russian)"]),
            doc("m2", m.clone(), 2000, &["(in Russian)"]),
            doc("m3", m.clone(), 2000, &["x"]),
            doc("m4", m.clone(), 2000, &["(in German)"]),
            doc("p1", p.clone(), 2000, &["(in Russian)"]),
            doc("p2", p.clone(), 2000, &["x"]),
            doc("p3", p.clone(), 2000, &["x"]),
            doc("p4", p.clone(), 2000, &["x"]),
        ];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let rates = grouped_doc_rates(&docs, &set, GroupBy::Discipline, Some(code("ru")));
        assert!(rates[&GroupKey::Discipline(m.clone())].equals(1, 2));
        assert!(rates[&GroupKey::Discipline(p)].equals(1, 4));

        let none = grouped_doc_rates(&docs, &set, GroupBy::Discipline, Some(code("ko")));
        assert!(none.values().all(|r| r.part == 0));

        let all = grouped_doc_rates(&docs, &set, GroupBy::Year, None);
        assert_eq!(all[&GroupKey::Year(2000)], prevalence_summary(&docs, &set).docs);
    }

    #[test]
    fn cross_linguality_values() {
        let reg = LanguageRegistry::builtin();
        let mut refs = vec!["x"; 24];
        refs[3] = "(in Russian)";
        refs[9] = "(in Japanese)";
        let docs = vec![
            doc("a", Discipline::Math, 2000, &refs),
            doc("b", Discipline::Math, 2000, &[]),
            doc("c", Discipline::Math, 2000, &["x"]),
        ];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let r = cross_linguality(&docs, &set).unwrap();
        assert_eq!(r.values.len(), 1);
        assert!((r.values[0].value() - 0.0833).abs() < 1e-4);
        assert_eq!(r.empty_reference_docs, 1);
        assert_eq!(r.histogram(HISTOGRAM_BINS)[4], 1);
    }

    #[test]
    fn detection_without_references_is_an_error() {
        let docs = vec![doc("a", Discipline::Math, 2000, &[])];
        let set: DetectionSet = [crate::marker::CrossLingualCitation {
            doc_id: "a".into(),
            ref_index: 0,
            language: code("ru"),
            evidence: crate::marker::Evidence::ExplicitMarker(crate::marker::MarkerMatch {
                raw_token: "Russian".into(),
                span: (0, 12),
            }),
        }]
        .into_iter()
        .collect();
        assert!(matches!(cross_linguality(&docs, &set), Err(Error::Invariant(_))));
    }

    #[test]
    fn histogram_puts_one_in_last_bin() {
        let r = CrossLingualityReport {
            values: vec![CrossLinguality {
                doc_id: "a".into(),
                discipline: Discipline::Cs,
                xling_refs: 3,
                total_refs: 3,
            }],
            empty_reference_docs: 0,
            summary: None,
            per_discipline: BTreeMap::new(),
        };
        assert_eq!(r.histogram(50)[49], 1);
    }

    #[test]
    fn pairs() {
        let reg = LanguageRegistry::builtin();
        let docs = vec![
            doc("a", Discipline::Math, 2000, &["(in Russian)", "(in Ukrainian)"]),
            doc("b", Discipline::Math, 2000, &["(in Russian)"]),
            doc("c", Discipline::Math, 2000, &["(in Russian)", "(in German)", "(in French)"]),
        ];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let pairs = language_pair_counts(&set);
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|(_, n)| *n == 1));
        assert_eq!(pairs[0].0, (code("de"), code("fr")));
        assert!(pairs.contains(&((code("ru"), code("uk")), 1)));
    }
}
