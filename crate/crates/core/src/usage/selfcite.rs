use std::collections::HashSet;

use crate::corpus::{Document, MetadataRecord, MetadataStore};
use crate::marker::DetectionSet;
use crate::stats::Proportion;
use crate::text::{collapse_whitespace, strip_diacritics};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    CrossLingual,
    Monolingual,
}

impl Scope {
    pub fn label(self) -> &'static str {
        match self {
            Scope::CrossLingual => "cross_lingual",
            Scope::Monolingual => "monolingual",
        }
    }
}

/// Self-citation shares over references whose citing and cited records both
/// exist. Loose counts a match of author ids or of normalized names, so
/// strict never exceeds loose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfCitationRates {
    pub scope: Scope,
    pub strict: Proportion,
    pub loose: Proportion,
}

impl SelfCitationRates {
    fn empty(scope: Scope) -> Self {
        SelfCitationRates {
            scope,
            strict: Proportion::default(),
            loose: Proportion::default(),
        }
    }

    pub fn support(&self) -> u64 {
        self.strict.whole
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfCitationReport {
    pub cross_lingual: SelfCitationRates,
    pub monolingual: SelfCitationRates,
    /// References of participating documents lacking a citing or cited record.
    pub excluded: u64,
}

/// `"surname, i"` for a personal name, `"surname"` when no given name is
/// present. Diacritics, case, periods and extra whitespace are ignored.
pub fn normalize_author_name(name: &str) -> Option<String> {
    let folded = strip_diacritics(name).to_lowercase().replace('.', " ");
    let (surname, given) = match folded.split_once(',') {
        Some((s, g)) => (collapse_whitespace(s), collapse_whitespace(g)),
        None => {
            let tokens: Vec<&str> = folded.split_whitespace().collect();
            match tokens.as_slice() {
                [] => return None,
                [only] => (only.to_string(), String::new()),
                // "Ivanov A" ordering: trailing initial(s).
                [first, rest @ ..]
                    if first.chars().count() > 1 && rest.iter().all(|t| t.chars().count() == 1) =>
                {
                    (first.to_string(), rest.join(" "))
                }
                [given @ .., last] => (last.to_string(), given.join(" ")),
            }
        }
    };
    if surname.is_empty() {
        return None;
    }
    Some(match given.chars().next() {
        Some(initial) => format!("{surname}, {initial}"),
        None => surname,
    })
}

pub fn author_name_overlap<'a, A, B>(a: A, b: B) -> bool
where
    A: IntoIterator<Item = &'a str>,
    B: IntoIterator<Item = &'a str>,
{
    let left: HashSet<String> = a.into_iter().filter_map(normalize_author_name).collect();
    b.into_iter()
        .filter_map(normalize_author_name)
        .any(|k| left.contains(&k))
}

/// `(strict, loose)` self-citation verdict for one citing/cited pair.
pub fn is_self_citation(citing: &MetadataRecord, cited: &MetadataRecord) -> (bool, bool) {
    let ids: HashSet<&str> = citing
        .authors
        .iter()
        .filter_map(|a| a.author_id.as_deref())
        .collect();
    let strict = cited
        .authors
        .iter()
        .filter_map(|a| a.author_id.as_deref())
        .any(|id| ids.contains(id));
    let loose = strict
        || author_name_overlap(
            citing.authors.iter().map(|a| a.name.as_str()),
            cited.authors.iter().map(|a| a.name.as_str()),
        );
    (strict, loose)
}

/// Self-citation rates of cross-lingual and monolingual references, both
/// drawn from the documents that contain at least one cross-lingual reference.
pub fn self_citation_rates(
    docs: &[Document],
    detections: &DetectionSet,
    store: &MetadataStore,
) -> SelfCitationReport {
    let mut report = SelfCitationReport {
        cross_lingual: SelfCitationRates::empty(Scope::CrossLingual),
        monolingual: SelfCitationRates::empty(Scope::Monolingual),
        excluded: 0,
    };
    for doc in docs {
        if detections.count_in_doc(&doc.doc_id) == 0 {
            continue;
        }
        let citing = store.get(&doc.doc_id);
        for entry in &doc.references {
            let cited = entry.cited_meta_id.as_deref().and_then(|id| store.get(id));
            let (Some(citing), Some(cited)) = (citing, cited) else {
                report.excluded += 1;
                continue;
            };
            let rates = if detections.is_cross_lingual(&doc.doc_id, entry.ref_index) {
                &mut report.cross_lingual
            } else {
                &mut report.monolingual
            };
            let (strict, loose) = is_self_citation(citing, cited);
            rates.strict.whole += 1;
            rates.loose.whole += 1;
            rates.strict.part += strict as u64;
            rates.loose.part += loose as u64;
        }
    }
    report
}
