use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::corpus::{Discipline, Document, InTextCitation};
use crate::error::Result;
use crate::marker::DetectionSet;
use crate::sampling::{proportional_allocation, sample_sorted, seeded_rng};

/// An in-text citation together with the citing document's strata.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContextRecord {
    pub doc_id: String,
    pub discipline: Discipline,
    pub year: i32,
    pub citation: InTextCitation,
}

/// `(doc_id, sentence_id, ref_index)`, the join key for imported labels.
pub type ContextKey = (String, u64, usize);

impl ContextRecord {
    pub fn key(&self) -> ContextKey {
        (
            self.doc_id.clone(),
            self.citation.sentence_id,
            self.citation.ref_index,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContextSet {
    XLing,
    Mono,
    Mixed,
}

impl ContextSet {
    pub const ALL: [ContextSet; 3] = [ContextSet::XLing, ContextSet::Mono, ContextSet::Mixed];

    pub fn label(self) -> &'static str {
        match self {
            ContextSet::XLing => "xling",
            ContextSet::Mono => "mono",
            ContextSet::Mixed => "mixed",
        }
    }
}

/// Context pools before balancing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextPools {
    /// Contexts of cross-lingual references, minus those moved to `mixed`.
    pub x_ling: Vec<ContextRecord>,
    /// Contexts of adjacent monolingual references, minus shared sentences.
    pub mono: Vec<ContextRecord>,
    /// Cross-lingual contexts whose sentence also cites the adjacent
    /// monolingual reference. Recorded under the cross-lingual reference.
    pub mixed: Vec<ContextRecord>,
    /// Pool sizes before shared sentences were separated.
    pub x_ling_extracted: u64,
    pub mono_extracted: u64,
    /// Cross-lingual references with no monolingual reference in their document.
    pub skipped_no_neighbor: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextSets {
    pub x_ling: Vec<ContextRecord>,
    pub mono: Vec<ContextRecord>,
    pub mixed: Vec<ContextRecord>,
    pub pools: ContextPoolSizes,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ContextPoolSizes {
    pub x_ling_extracted: u64,
    pub mono_extracted: u64,
    pub x_ling_separated: u64,
    pub mono_separated: u64,
    pub skipped_no_neighbor: u64,
}

impl ContextSets {
    pub fn get(&self, set: ContextSet) -> &[ContextRecord] {
        match set {
            ContextSet::XLing => &self.x_ling,
            ContextSet::Mono => &self.mono,
            ContextSet::Mixed => &self.mixed,
        }
    }

    /// Writes one set as JSONL: the in-text citation schema plus `doc_id`
    /// and the set label.
    pub fn write_jsonl<W: Write>(&self, set: ContextSet, mut out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Line<'a> {
            doc_id: &'a str,
            sentence_id: u64,
            sentence_text: &'a str,
            ref_index: usize,
            set: &'static str,
        }
        for r in self.get(set) {
            let line = Line {
                doc_id: &r.doc_id,
                sentence_id: r.citation.sentence_id,
                sentence_text: &r.citation.sentence_text,
                ref_index: r.citation.ref_index,
                set: set.label(),
            };
            serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Nearest reference without a detection, by reference-section distance;
/// the preceding one wins a tie.
pub fn adjacent_monolingual(doc: &Document, detections: &DetectionSet, ref_index: usize) -> Option<usize> {
    let n = doc.references.len();
    let is_mono = |i: usize| !detections.is_cross_lingual(&doc.doc_id, i);
    (1..n).find_map(|d| {
        let before = ref_index.checked_sub(d).filter(|i| is_mono(*i));
        let after = Some(ref_index + d).filter(|i| *i < n && is_mono(*i));
        before.or(after)
    })
}

fn record(doc: &Document, c: &InTextCitation) -> ContextRecord {
    ContextRecord {
        doc_id: doc.doc_id.clone(),
        discipline: doc.discipline.clone(),
        year: doc.year,
        citation: c.clone(),
    }
}

pub fn context_pools(docs: &[Document], detections: &DetectionSet) -> ContextPools {
    let mut pools = ContextPools::default();
    for doc in docs {
        let xling_refs: BTreeSet<usize> = detections.for_doc(&doc.doc_id).map(|c| c.ref_index).collect();
        if xling_refs.is_empty() {
            continue;
        }
        let mut adjacent = BTreeSet::new();
        for &i in &xling_refs {
            match adjacent_monolingual(doc, detections, i) {
                Some(j) => {
                    adjacent.insert(j);
                }
                None => pools.skipped_no_neighbor += 1,
            }
        }
        let xling_ctx: Vec<&InTextCitation> =
            doc.contexts.iter().filter(|c| xling_refs.contains(&c.ref_index)).collect();
        let mono_ctx: Vec<&InTextCitation> =
            doc.contexts.iter().filter(|c| adjacent.contains(&c.ref_index)).collect();
        pools.x_ling_extracted += xling_ctx.len() as u64;
        pools.mono_extracted += mono_ctx.len() as u64;

        let xling_sentences: BTreeSet<u64> = xling_ctx.iter().map(|c| c.sentence_id).collect();
        let mono_sentences: BTreeSet<u64> = mono_ctx.iter().map(|c| c.sentence_id).collect();
        for c in xling_ctx {
            if mono_sentences.contains(&c.sentence_id) {
                pools.mixed.push(record(doc, c));
            } else {
                pools.x_ling.push(record(doc, c));
            }
        }
        for c in mono_ctx {
            if !xling_sentences.contains(&c.sentence_id) {
                pools.mono.push(record(doc, c));
            }
        }
    }
    for v in [&mut pools.x_ling, &mut pools.mono, &mut pools.mixed] {
        v.sort_by_key(ContextRecord::key);
    }
    pools
}

/// Reduces `records` to `target` items, allocating the quota across
/// (discipline, year) strata proportionally and sampling uniformly within
/// each stratum. The result is sorted by key.
pub fn stratified_downsample(records: Vec<ContextRecord>, target: usize, seed: u64) -> Vec<ContextRecord> {
    if target >= records.len() {
        return records;
    }
    let mut strata: BTreeMap<(Discipline, i32), Vec<ContextRecord>> = BTreeMap::new();
    for r in records {
        strata.entry((r.discipline.clone(), r.year)).or_default().push(r);
    }
    let sizes: Vec<usize> = strata.values().map(Vec::len).collect();
    let quotas = proportional_allocation(&sizes, target);
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(target);
    for (mut members, quota) in strata.into_values().zip(quotas) {
        members.sort_by_key(ContextRecord::key);
        let picked = sample_sorted(&mut rng, members.len(), quota);
        out.extend(picked.into_iter().map(|i| members[i].clone()));
    }
    out.sort_by_key(ContextRecord::key);
    out
}

/// Cross-lingual, monolingual and mixed context sets; the larger of the
/// first two is downsampled to the size of the smaller.
pub fn extract_context_sets(docs: &[Document], detections: &DetectionSet, seed: u64) -> ContextSets {
    let pools = context_pools(docs, detections);
    let sizes = ContextPoolSizes {
        x_ling_extracted: pools.x_ling_extracted,
        mono_extracted: pools.mono_extracted,
        x_ling_separated: pools.x_ling.len() as u64,
        mono_separated: pools.mono.len() as u64,
        skipped_no_neighbor: pools.skipped_no_neighbor,
    };
    let target = pools.x_ling.len().min(pools.mono.len());
    ContextSets {
        x_ling: stratified_downsample(pools.x_ling, target, seed),
        mono: stratified_downsample(pools.mono, target, seed),
        mixed: pools.mixed,
        pools: sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ReferenceEntry;
    use crate::languages::LanguageRegistry;
    use crate::marker::Detector;

    fn doc(refs: &[&str], contexts: &[(u64, usize)]) -> Document {
        Document {
            doc_id: "d".into(),
            discipline: Discipline::Physics,
            year: 2015,
            month: None,
            references: refs.iter().enumerate().map(|(i, r)| ReferenceEntry::new(i, *r)).collect(),
            contexts: contexts
                .iter()
                .map(|(s, r)| InTextCitation {
                    sentence_id: *s,
                    sentence_text: format!("sentence {s}"),
                    ref_index: *r,
                })
                .collect(),
        }
    }

    #[test]
    fn adjacency_prefers_preceding_on_tie() {
        let reg = LanguageRegistry::builtin();
        let d = doc(&["a", "(in Russian)", "b"], &[]);
        let set = Detector::new(&reg).detect_corpus([&d]);
        assert_eq!(adjacent_monolingual(&d, &set, 1), Some(0));

        let d = doc(&["(in Russian)", "(in German)", "b"], &[]);
        let set = Detector::new(&reg).detect_corpus([&d]);
        assert_eq!(adjacent_monolingual(&d, &set, 0), Some(2));

        let d = doc(&["(in Russian)"], &[]);
        let set = Detector::new(&reg).detect_corpus([&d]);
        assert_eq!(adjacent_monolingual(&d, &set, 0), None);
    }

    #[test]
    fn xling_contexts_and_adjacent_reference() {
        let reg = LanguageRegistry::builtin();
        let d = doc(&["mono", "(in Russian)"], &[(0, 1), (1, 1), (2, 0)]);
        let docs = [d];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let pools = context_pools(&docs, &set);
        assert_eq!(pools.x_ling.len(), 2);
        assert_eq!(pools.mono.len(), 1);
        assert_eq!(pools.mono[0].citation.ref_index, 0);
    }

    #[test]
    fn shared_sentence_goes_to_mixed() {
        let reg = LanguageRegistry::builtin();
        // Sentence 5 cites both [1] (cross-lingual) and [0], its neighbor.
        let d = doc(&["mono", "(in Russian)"], &[(5, 0), (5, 1), (6, 1), (7, 0)]);
        let docs = [d];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let sets = extract_context_sets(&docs, &set, 0);
        assert_eq!(sets.mixed.len(), 1);
        assert_eq!(sets.mixed[0].citation.sentence_id, 5);
        assert_eq!(sets.x_ling.len(), 1);
        assert_eq!(sets.mono.len(), 1);
        assert_eq!(sets.pools.skipped_no_neighbor, 0);
    }

    #[test]
    fn no_neighbor_is_counted() {
        let reg = LanguageRegistry::builtin();
        let docs = [doc(&["(in Russian)"], &[(0, 0)])];
        let set = Detector::new(&reg).detect_corpus(&docs);
        let pools = context_pools(&docs, &set);
        assert_eq!(pools.skipped_no_neighbor, 1);
        assert_eq!(pools.x_ling.len(), 1);
    }
}
