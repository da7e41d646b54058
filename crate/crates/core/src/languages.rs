//! Language registry: maps the word found in an `(in <Language>)` marker to an
//! ISO 639-1 code.
//!
//! The registry is a CSV of `kind,token,code` rows where `kind` is one of
//! `canonical` (an English language name), `misspelling` (a known variant of a
//! canonical name) or `stop` (a word that appears in the marker position but
//! names no language, e.g. "press"). Tokens are matched case-insensitively.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use crate::codes::LangCode;
use crate::error::{Error, Result};
use crate::stats::Proportion;

/// The languages the shipped registry is seeded with.
pub const SEED_CODES: [&str; 44] = [
    "be", "bg", "ca", "cs", "da", "de", "el", "en", "eo", "es", "et", "fa", "fi", "fr", "he",
    "hi", "hr", "hu", "hy", "id", "is", "it", "ja", "ka", "ko", "la", "lv", "mk", "mr", "nl",
    "no", "pl", "pt", "ro", "ru", "sa", "sk", "sl", "sr", "sv", "tr", "uk", "vi", "zh",
];

const DEFAULT_REGISTRY: &str = include_str!("../data/registry.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Language(LangCode),
    NonLanguage,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LanguageRegistry {
    canonical: BTreeMap<String, LangCode>,
    misspellings: BTreeMap<String, LangCode>,
    stoplist: BTreeSet<String>,
}

fn fold(token: &str) -> String {
    token.trim().to_lowercase()
}

impl LanguageRegistry {
    /// The registry shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_csv(DEFAULT_REGISTRY.as_bytes()).expect("bundled registry is valid")
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut reg = LanguageRegistry::default();
        for (i, row) in csv.records().enumerate() {
            let row = row?;
            let line = i + 1;
            let kind = row.get(0).unwrap_or("");
            if i == 0 && kind == "kind" {
                continue;
            }
            let token = fold(row.get(1).unwrap_or(""));
            let code = row.get(2).unwrap_or("");
            if token.is_empty() {
                return Err(Error::Registry(format!("line {line}: empty token")));
            }
            match kind {
                "canonical" | "misspelling" => {
                    let code = LangCode::new(code)
                        .map_err(|_| Error::Registry(format!("line {line}: bad code {code:?}")))?;
                    let target = if kind == "canonical" {
                        &mut reg.canonical
                    } else {
                        &mut reg.misspellings
                    };
                    if let Some(prev) = target.insert(token.clone(), code) {
                        if prev != code {
                            return Err(Error::Registry(format!(
                                "line {line}: {token:?} mapped to both {prev} and {code}"
                            )));
                        }
                    }
                }
                "stop" => {
                    if !code.is_empty() {
                        return Err(Error::Registry(format!(
                            "line {line}: stop token {token:?} must not carry a code"
                        )));
                    }
                    reg.stoplist.insert(token);
                }
                other => {
                    return Err(Error::Registry(format!("line {line}: unknown kind {other:?}")))
                }
            }
        }
        reg.check()?;
        Ok(reg)
    }

    fn check(&self) -> Result<()> {
        for token in &self.stoplist {
            if self.canonical.contains_key(token) || self.misspellings.contains_key(token) {
                return Err(Error::Registry(format!(
                    "{token:?} is both a stop word and a language"
                )));
            }
        }
        for token in self.misspellings.keys() {
            if self.canonical.contains_key(token) {
                return Err(Error::Registry(format!(
                    "{token:?} is both canonical and a misspelling"
                )));
            }
        }
        let canonical_codes: BTreeSet<_> = self.canonical.values().collect();
        for (token, code) in &self.misspellings {
            if !canonical_codes.contains(code) {
                return Err(Error::Registry(format!(
                    "misspelling {token:?} maps to {code}, which has no canonical name"
                )));
            }
        }
        Ok(())
    }

    pub fn normalize_token(&self, raw: &str) -> Normalization {
        let token = fold(raw);
        if let Some(code) = self.canonical.get(&token).or_else(|| self.misspellings.get(&token)) {
            Normalization::Language(*code)
        } else if self.stoplist.contains(&token) {
            Normalization::NonLanguage
        } else {
            Normalization::Unknown
        }
    }

    /// Every code the registry can emit.
    pub fn codes(&self) -> BTreeSet<LangCode> {
        self.canonical.values().copied().collect()
    }

    pub fn contains_code(&self, code: LangCode) -> bool {
        self.canonical.values().any(|c| *c == code)
    }

    /// Canonical names for `code`, alphabetically.
    pub fn names_for(&self, code: LangCode) -> Vec<&str> {
        self.canonical
            .iter()
            .filter(|(_, c)| **c == code)
            .map(|(t, _)| t.as_str())
            .collect()
    }

    pub fn stoplist(&self) -> impl Iterator<Item = &str> {
        self.stoplist.iter().map(String::as_str)
    }

    pub fn misspellings(&self) -> impl Iterator<Item = (&str, LangCode)> {
        self.misspellings.iter().map(|(t, c)| (t.as_str(), *c))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub languages_covered: usize,
    pub languages_total: usize,
    pub journal_share: Proportion,
    pub uncovered_languages: Vec<LangCode>,
}

/// Share of journals (by language) whose language the registry can detect.
pub fn coverage_report(
    reg: &LanguageRegistry,
    journal_counts: &BTreeMap<LangCode, u64>,
) -> Result<CoverageReport> {
    if journal_counts.is_empty() {
        return Err(Error::EmptyInput("journal counts"));
    }
    let codes = reg.codes();
    let mut share = Proportion::default();
    let mut uncovered = Vec::new();
    for (code, count) in journal_counts {
        share.whole += count;
        if codes.contains(code) {
            share.part += count;
        } else {
            uncovered.push(*code);
        }
    }
    if share.whole == 0 {
        return Err(Error::EmptyInput("journal counts sum to zero"));
    }
    Ok(CoverageReport {
        languages_covered: journal_counts.len() - uncovered.len(),
        languages_total: journal_counts.len(),
        journal_share: share,
        uncovered_languages: uncovered,
    })
}

/// Reads `language,journals` rows (header optional).
pub fn load_journal_counts<R: Read>(reader: R) -> Result<BTreeMap<LangCode, u64>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut counts = BTreeMap::new();
    for (i, row) in csv.records().enumerate() {
        let row = row?;
        if i == 0 && row.get(0) == Some("language") {
            continue;
        }
        let malformed = |reason: String| Error::Malformed { line: i + 1, reason };
        let code = LangCode::new(row.get(0).unwrap_or(""))?;
        let count: u64 = row
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| malformed(format!("journal count: {e}")))?;
        *counts.entry(code).or_insert(0) += count;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> LangCode {
        LangCode::new(s).unwrap()
    }

    #[test]
    fn builtin_codes_are_exactly_the_seed() {
        let seed: BTreeSet<_> = SEED_CODES.iter().map(|c| code(c)).collect();
        assert_eq!(LanguageRegistry::builtin().codes(), seed);
        assert_eq!(seed.len(), 44);
    }

    #[test]
    fn normalization_examples() {
        let reg = LanguageRegistry::builtin();
        assert_eq!(reg.normalize_token("russain"), Normalization::Language(code("ru")));
        assert_eq!(reg.normalize_token("japanease"), Normalization::Language(code("ja")));
        assert_eq!(reg.normalize_token("press"), Normalization::NonLanguage);
        assert_eq!(reg.normalize_token("preparation"), Normalization::NonLanguage);
        assert_eq!(reg.normalize_token("Russian"), Normalization::Language(code("ru")));
        assert_eq!(reg.normalize_token("klingon"), Normalization::Unknown);
        assert_eq!(reg.normalize_token("Marathi"), Normalization::Language(code("mr")));
    }

    #[test]
    fn every_code_has_a_canonical_name() {
        let reg = LanguageRegistry::builtin();
        for c in reg.codes() {
            assert!(!reg.names_for(c).is_empty(), "{c}");
        }
    }

    #[test]
    fn registry_rejects_overlapping_stop_and_language() {
        let csv = "canonical,russian,ru\nstop,russian,\n";
        assert!(LanguageRegistry::from_csv(csv.as_bytes()).is_err());
    }

    #[test]
    fn registry_rejects_orphan_misspelling_and_bad_rows() {
        assert!(LanguageRegistry::from_csv("misspelling,russain,ru\n".as_bytes()).is_err());
        assert!(LanguageRegistry::from_csv("canonical,russian,rus\n".as_bytes()).is_err());
        assert!(LanguageRegistry::from_csv("stop,press,en\n".as_bytes()).is_err());
        assert!(LanguageRegistry::from_csv("alias,russian,ru\n".as_bytes()).is_err());
    }

    #[test]
    fn coverage_of_synthetic_counts() {
        let reg = LanguageRegistry::from_csv("canonical,alpha,aa\n".as_bytes()).unwrap();
        let counts = BTreeMap::from([(code("aa"), 90), (code("bb"), 10)]);
        let report = coverage_report(&reg, &counts).unwrap();
        assert!(report.journal_share.equals(9, 10));
        assert_eq!(report.uncovered_languages, vec![code("bb")]);
        assert_eq!((report.languages_covered, report.languages_total), (1, 2));
    }

    #[test]
    fn full_coverage_and_empty_input() {
        let reg = LanguageRegistry::builtin();
        let counts = BTreeMap::from([(code("ru"), 5), (code("de"), 3)]);
        assert_eq!(coverage_report(&reg, &counts).unwrap().journal_share.value(), Some(1.0));
        assert!(coverage_report(&reg, &BTreeMap::new()).is_err());
    }

    #[test]
    fn journal_counts_csv() {
        let counts = load_journal_counts("language,journals\nru,10\nja,2\nru,1\n".as_bytes()).unwrap();
        assert_eq!(counts[&code("ru")], 11);
        assert!(load_journal_counts("ru,-1\n".as_bytes()).is_err());
    }
}
