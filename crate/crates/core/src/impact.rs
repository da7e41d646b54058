//! Effects on the citing papers: random comparison sets, preprint vs
//! published reference lists, citations received, and how often references
//! can be resolved to metadata records.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use num_rational::Ratio;
use serde::Deserialize;

use crate::codes::LangCode;
use crate::corpus::{Discipline, Document, MetadataStore, ReferenceEntry};
use crate::error::{Error, Result};
use crate::marker::{DetectionSet, Detector};
use crate::output::Table;
use crate::sampling::{sample_sorted, seeded_rng};
use crate::stats::{fmt_fixed, fmt_opt, IntMoments, Proportion};
use crate::strategy::Registry;
use crate::text::normalize_title;
use crate::title::extract_title;

/// Samples, for every (year, discipline) cell of `target`, the same number
/// of documents uniformly from that cell of `docs`. Target documents are not
/// excluded from the population.
pub fn stratified_random_set<'a, I>(docs: &[Document], target: I, seed: u64) -> Result<BTreeSet<String>>
where
    I: IntoIterator<Item = &'a Document>,
{
    let mut wanted: BTreeMap<(i32, Discipline), usize> = BTreeMap::new();
    for d in target {
        *wanted.entry((d.year, d.discipline.clone())).or_insert(0) += 1;
    }
    let mut cells: BTreeMap<(i32, Discipline), Vec<&str>> = BTreeMap::new();
    for d in docs {
        let key = (d.year, d.discipline.clone());
        if wanted.contains_key(&key) {
            cells.entry(key).or_default().push(&d.doc_id);
        }
    }
    let mut rng = seeded_rng(seed);
    let mut out = BTreeSet::new();
    for (key, needed) in wanted {
        let mut members = cells.remove(&key).unwrap_or_default();
        if members.len() < needed {
            return Err(Error::InsufficientCell {
                year: key.0,
                discipline: key.1.to_string(),
                needed,
                available: members.len(),
            });
        }
        members.sort_unstable();
        for i in sample_sorted(&mut rng, members.len(), needed) {
            out.insert(members[i].to_string());
        }
    }
    Ok(out)
}

/// A preprint and its published version, as raw reference strings.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct PaperPair {
    pub pair_id: String,
    pub pre_refs: Vec<String>,
    pub pub_refs: Vec<String>,
}

pub fn load_pairs<R: BufRead>(reader: R) -> Result<Vec<PaperPair>> {
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let pair = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            line: i + 1,
            reason: e.to_string(),
        })?;
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Change in the number of cross-lingual references, published minus preprint.
pub fn pair_delta(pair: &PaperPair, detector: &Detector) -> i64 {
    let count = |refs: &[String]| refs.iter().filter(|r| detector.language_of(r).is_some()).count() as i64;
    count(&pair.pub_refs) - count(&pair.pre_refs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairDiffStats {
    pub pairs: u64,
    pub increased: u64,
    pub decreased: u64,
    pub deltas: IntMoments,
}

impl PairDiffStats {
    pub fn from_deltas(deltas: &[i64]) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::EmptyInput("paper pairs"));
        }
        Ok(PairDiffStats {
            pairs: deltas.len() as u64,
            increased: deltas.iter().filter(|d| **d > 0).count() as u64,
            decreased: deltas.iter().filter(|d| **d < 0).count() as u64,
            deltas: deltas.iter().copied().collect(),
        })
    }

    pub fn unchanged(&self) -> u64 {
        self.pairs - self.increased - self.decreased
    }

    pub fn mean_exact(&self) -> Ratio<i128> {
        self.deltas.mean_exact().expect("non-empty by construction")
    }

    pub fn mean_delta(&self) -> f64 {
        self.deltas.mean().expect("non-empty by construction")
    }

    pub fn sd_delta(&self) -> f64 {
        self.deltas.sd().expect("non-empty by construction")
    }
}

/// Reruns detection on both sides of every pair.
pub fn pair_diff_stats(pairs: &[PaperPair], detector: &Detector) -> Result<PairDiffStats> {
    let deltas: Vec<i64> = pairs.iter().map(|p| pair_delta(p, detector)).collect();
    PairDiffStats::from_deltas(&deltas)
}

/// One row of the preprint/published comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDiffRow {
    pub label: String,
    pub pairs: u64,
    pub increased: u64,
    pub decreased: u64,
    pub mean: f64,
    pub sd: f64,
}

impl PairDiffRow {
    pub fn from_stats(label: impl Into<String>, s: &PairDiffStats) -> Self {
        PairDiffRow {
            label: label.into(),
            pairs: s.pairs,
            increased: s.increased,
            decreased: s.decreased,
            mean: s.mean_delta(),
            sd: s.sd_delta(),
        }
    }
}

/// Mean to two decimals, SD to three.
pub fn pair_diff_table(rows: &[PairDiffRow]) -> Table {
    let mut t = Table::new(["evaluation", "pairs", "increased", "decreased", "mean", "sd"]);
    for r in rows {
        t.push([
            r.label.clone(),
            r.pairs.to_string(),
            r.increased.to_string(),
            r.decreased.to_string(),
            fmt_fixed(r.mean, 2),
            fmt_fixed(r.sd, 3),
        ])
        .expect("fixed width");
    }
    t
}

/// Citation statistics of one document set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SetImpact {
    pub requested: u64,
    /// Documents without a metadata record.
    pub unresolved: u64,
    /// Documents with a published version, out of those with records.
    pub published: Proportion,
    pub citations: IntMoments,
    /// Citation counts inside the window, when one is given.
    pub filtered: Option<IntMoments>,
}

impl SetImpact {
    pub fn docs(&self) -> u64 {
        self.citations.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImpactComparison {
    pub a: SetImpact,
    pub b: SetImpact,
    pub window: Option<(u64, u64)>,
}

fn set_impact<'a, I>(ids: I, store: &MetadataStore, window: Option<(u64, u64)>) -> SetImpact
where
    I: IntoIterator<Item = &'a str>,
{
    let mut s = SetImpact {
        filtered: window.map(|_| IntMoments::default()),
        ..SetImpact::default()
    };
    for id in ids {
        s.requested += 1;
        let Some(record) = store.get(id) else {
            s.unresolved += 1;
            continue;
        };
        s.published.whole += 1;
        s.published.part += record.published_version_id.is_some() as u64;
        let c = record.citation_count as i64;
        s.citations.push(c);
        if let (Some((lo, hi)), Some(f)) = (window, s.filtered.as_mut()) {
            if (lo..=hi).contains(&record.citation_count) {
                f.push(c);
            }
        }
    }
    s
}

/// Published ratio and citation counts of two document sets. `window` is an
/// inclusive citation-count range for the filtered statistics.
pub fn citation_compare<'a, A, B>(
    a: A,
    b: B,
    store: &MetadataStore,
    window: Option<(u64, u64)>,
) -> ImpactComparison
where
    A: IntoIterator<Item = &'a str>,
    B: IntoIterator<Item = &'a str>,
{
    ImpactComparison {
        a: set_impact(a, store, window),
        b: set_impact(b, store, window),
        window,
    }
}

/// Table layout: a filter column, a statistic column and one column per set.
pub fn impact_table(c: &ImpactComparison, a_label: &str, b_label: &str) -> Table {
    let mut t = Table::new(["filter", "statistic", a_label, b_label]);
    let mut block = |filter: &str, a: Option<&IntMoments>, b: Option<&IntMoments>| {
        let n = |m: Option<&IntMoments>| m.map_or(0, |m| m.n).to_string();
        let mean = |m: Option<&IntMoments>| fmt_opt(m.and_then(|m| m.mean()), 1);
        let sd = |m: Option<&IntMoments>| fmt_opt(m.and_then(|m| m.sd()), 1);
        t.push([filter.to_string(), "docs".into(), n(a), n(b)]).expect("width");
        t.push([filter.to_string(), "mean_citations".into(), mean(a), mean(b)]).expect("width");
        t.push([filter.to_string(), "sd_citations".into(), sd(a), sd(b)]).expect("width");
    };
    block("none", Some(&c.a.citations), Some(&c.b.citations));
    if let Some((lo, hi)) = c.window {
        block(&format!("{lo}-{hi}"), c.a.filtered.as_ref(), c.b.filtered.as_ref());
    }
    let pct = |p: &Proportion| fmt_opt(p.percent(), 2);
    t.push([
        "none".to_string(),
        "published_pct".into(),
        pct(&c.a.published),
        pct(&c.b.published),
    ])
    .expect("width");
    t
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Matched(String),
    NoTitle,
    NoMatch,
    /// The normalized title names several records; none is chosen.
    Ambiguous(usize),
}

impl Resolution {
    pub fn meta_id(&self) -> Option<&str> {
        match self {
            Resolution::Matched(id) => Some(id),
            _ => None,
        }
    }
}

/// Links a reference entry to a metadata record.
pub trait ReferenceMatcher: Send + Sync {
    fn name(&self) -> &str;
    fn resolve(&self, entry: &ReferenceEntry, store: &MetadataStore) -> Resolution;
}

/// Exact equality of normalized titles, against record titles and
/// alternative titles.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactTitleMatcher;

impl ReferenceMatcher for ExactTitleMatcher {
    fn name(&self) -> &str {
        "exact-title"
    }

    fn resolve(&self, entry: &ReferenceEntry, store: &MetadataStore) -> Resolution {
        let Some(title) = extract_title(entry) else {
            return Resolution::NoTitle;
        };
        let key = normalize_title(&title);
        if key.is_empty() {
            return Resolution::NoTitle;
        }
        match store.ids_for_title(&key) {
            [] => Resolution::NoMatch,
            [id] => Resolution::Matched(id.clone()),
            ids => Resolution::Ambiguous(ids.len()),
        }
    }
}

pub fn matcher_registry() -> Registry<dyn ReferenceMatcher> {
    let mut reg: Registry<dyn ReferenceMatcher> = Registry::new("matcher");
    reg.register("exact-title", "exact match of normalized titles", |_| {
        Ok(Box::new(ExactTitleMatcher))
    });
    reg
}

pub fn resolve_reference(entry: &ReferenceEntry, store: &MetadataStore) -> Option<String> {
    ExactTitleMatcher.resolve(entry, store).meta_id().map(str::to_string)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResolutionReport {
    /// Resolved out of all references.
    pub overall: Proportion,
    /// Resolved out of all references of documents with a detection.
    pub xling_docs: Proportion,
    /// Resolved out of detected cross-lingual references.
    pub cross_lingual: Proportion,
    pub per_language: BTreeMap<LangCode, Proportion>,
    pub ambiguous: u64,
    pub no_title: u64,
}

impl ResolutionReport {
    pub fn failure_rate(&self, lang: LangCode) -> Option<f64> {
        self.per_language.get(&lang).and_then(|p| p.value()).map(|v| 1.0 - v)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(["language", "attempted", "resolved", "failure_rate"]);
        for (lang, p) in &self.per_language {
            t.push([
                lang.to_string(),
                p.whole.to_string(),
                p.part.to_string(),
                fmt_opt(p.value().map(|v| 1.0 - v), 4),
            ])
            .expect("width");
        }
        t
    }
}

pub fn resolution_rates(
    docs: &[Document],
    detections: &DetectionSet,
    store: &MetadataStore,
    matcher: &dyn ReferenceMatcher,
) -> ResolutionReport {
    let mut r = ResolutionReport::default();
    for doc in docs {
        let has_xling = detections.count_in_doc(&doc.doc_id) > 0;
        for entry in &doc.references {
            let res = matcher.resolve(entry, store);
            match res {
                Resolution::Ambiguous(_) => r.ambiguous += 1,
                Resolution::NoTitle => r.no_title += 1,
                _ => {}
            }
            let hit = Proportion::new(res.meta_id().is_some() as u64, 1);
            r.overall += hit;
            if has_xling {
                r.xling_docs += hit;
            }
            if let Some(c) = detections.get(&doc.doc_id, entry.ref_index) {
                r.cross_lingual += hit;
                *r.per_language.entry(c.language).or_default() += hit;
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::MetadataRecord;
    use crate::languages::LanguageRegistry;

    fn doc(id: &str, year: i32, d: Discipline) -> Document {
        Document {
            doc_id: id.into(),
            discipline: d,
            year,
            month: None,
            references: vec![],
            contexts: vec![],
        }
    }

    #[test]
    fn exact_cell_counts() {
        let docs: Vec<Document> = (0..20).map(|i| doc(&format!("m{i}"), 2010, Discipline::Math)).collect();
        let target: Vec<Document> = (0..5).map(|i| doc(&format!("t{i}"), 2010, Discipline::Math)).collect();
        let a = stratified_random_set(&docs, &target, 3).unwrap();
        assert_eq!(a.len(), 5);
        assert_eq!(a, stratified_random_set(&docs, &target, 3).unwrap());
        let short = vec![doc("p", 2011, Discipline::Physics)];
        assert!(matches!(
            stratified_random_set(&docs, &short, 0),
            Err(Error::InsufficientCell { year: 2011, .. })
        ));
    }

    #[test]
    fn delta_aggregates() {
        let s = PairDiffStats::from_deltas(&[-1, 0, 0, 1]).unwrap();
        assert_eq!((s.increased, s.decreased, s.unchanged()), (1, 1, 2));
        assert_eq!(s.mean_exact(), Ratio::from_integer(0));
        assert!(PairDiffStats::from_deltas(&[]).is_err());
    }

    #[test]
    fn pair_diff_detects_both_sides() {
        let reg = LanguageRegistry::builtin();
        let det = Detector::new(&reg);
        let pair = PaperPair {
            pair_id: "p".into(),
            pre_refs: vec!["A (in Russian)".into(), "B (in German)".into()],
            pub_refs: vec!["A (in Russian)".into(), "B".into(), "C (in press)".into()],
        };
        assert_eq!(pair_delta(&pair, &det), -1);
    }

    #[test]
    fn table_layout() {
        let rows = [PairDiffRow {
            label: "Manual".into(),
            pairs: 100,
            increased: 4,
            decreased: 7,
            mean: -0.02,
            sd: 0.529,
        }];
        assert_eq!(
            pair_diff_table(&rows).to_csv_string(),
            "evaluation,pairs,increased,decreased,mean,sd\nManual,100,4,7,-0.02,0.529\n"
        );
    }

    #[test]
    fn mean_of_two_counts() {
        let mut store = MetadataStore::new();
        for (id, c) in [("a", 1), ("b", 3)] {
            let mut r = MetadataRecord::new(id, id);
            r.citation_count = c;
            store.insert(r).unwrap();
        }
        let cmp = citation_compare(["a", "b"], ["a", "zz"], &store, None);
        assert_eq!(cmp.a.citations.mean(), Some(2.0));
        assert_eq!(cmp.b.unresolved, 1);
        assert_eq!(cmp.a.published, Proportion::new(0, 2));
    }

    #[test]
    fn normalized_title_match() {
        let mut store = MetadataStore::new();
        store
            .insert(MetadataRecord::new("m1", "foundations of algebraic geometry"))
            .unwrap();
        let mut e = ReferenceEntry::new(0, "");
        e.title = Some("Foundations of Algebraic Geometry".into());
        assert_eq!(resolve_reference(&e, &store).as_deref(), Some("m1"));

        store
            .insert(MetadataRecord::new("m2", "Foundations of algebraic geometry."))
            .unwrap();
        assert_eq!(ExactTitleMatcher.resolve(&e, &store), Resolution::Ambiguous(2));
    }
}
