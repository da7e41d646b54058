//! Script-based language identification of cited titles.
//!
//! Titles written in a non-Latin script can be attributed to a language with
//! high confidence from the script alone; Latin-script titles cannot, so
//! guesses for them are never marked reliable. A [`TitleLanguageIdentifier`]
//! may refine Latin-script and script-level guesses.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::Read;

use unicode_script::{Script, UnicodeScript};

use crate::codes::LangCode;
use crate::corpus::{Document, ReferenceEntry};
use crate::error::{Error, Result};
use crate::languages::LanguageRegistry;
use crate::marker::DetectionSet;
use crate::stats::Proportion;
use crate::strategy::{require_path, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScriptClass {
    Latin,
    Cyrillic,
    Han,
    /// Kana, alone or mixed with Han.
    Japanese,
    Hangul,
    Greek,
    Arabic,
    Hebrew,
    Mixed,
    Other,
    Empty,
}

impl ScriptClass {
    /// Whether a script-derived language guess can be trusted.
    pub fn is_reliable(self) -> bool {
        !matches!(
            self,
            ScriptClass::Latin | ScriptClass::Mixed | ScriptClass::Other | ScriptClass::Empty
        )
    }

    /// The default language for the script, and whether it only identifies
    /// the script (other languages share it).
    pub fn default_language(self) -> Option<(LangCode, bool)> {
        let (code, script_level) = match self {
            ScriptClass::Cyrillic => ("ru", true),
            ScriptClass::Arabic => ("fa", true),
            ScriptClass::Japanese => ("ja", false),
            ScriptClass::Han => ("zh", false),
            ScriptClass::Hangul => ("ko", false),
            ScriptClass::Greek => ("el", false),
            ScriptClass::Hebrew => ("he", false),
            _ => return None,
        };
        Some((LangCode::new(code).expect("static code"), script_level))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Bucket {
    Latin,
    Cyrillic,
    Han,
    Kana,
    Hangul,
    Greek,
    Arabic,
    Hebrew,
    Other,
}

fn bucket(c: char) -> Option<Bucket> {
    if !c.is_alphabetic() {
        return None;
    }
    Some(match c.script() {
        Script::Latin => Bucket::Latin,
        Script::Cyrillic => Bucket::Cyrillic,
        Script::Han => Bucket::Han,
        Script::Hiragana | Script::Katakana => Bucket::Kana,
        Script::Hangul => Bucket::Hangul,
        Script::Greek => Bucket::Greek,
        Script::Arabic => Bucket::Arabic,
        Script::Hebrew => Bucket::Hebrew,
        // Shared marks such as the prolonged-sound sign carry no signal.
        Script::Common | Script::Inherited | Script::Unknown => return None,
        _ => Bucket::Other,
    })
}

pub const DEFAULT_MAJORITY: f64 = 0.8;

/// Classifies text by the script of its letters. Digits, punctuation and
/// script-neutral characters are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptClassifier {
    /// Minimum share of letters the dominant script needs; below it the
    /// text is [`ScriptClass::Mixed`].
    pub majority: f64,
}

impl Default for ScriptClassifier {
    fn default() -> Self {
        ScriptClassifier {
            majority: DEFAULT_MAJORITY,
        }
    }
}

impl ScriptClassifier {
    pub fn classify(&self, text: &str) -> ScriptClass {
        let mut counts: BTreeMap<Bucket, usize> = BTreeMap::new();
        for b in text.chars().filter_map(bucket) {
            *counts.entry(b).or_insert(0) += 1;
        }
        let total: usize = counts.values().sum();
        if total == 0 {
            return ScriptClass::Empty;
        }
        // Japanese titles are often Han-dominated; any kana makes the Han
        // letters part of a Japanese bucket.
        let kana = counts.remove(&Bucket::Kana).unwrap_or(0);
        let mut classes: Vec<(ScriptClass, usize)> = counts
            .into_iter()
            .map(|(b, n)| {
                let class = match b {
                    Bucket::Latin => ScriptClass::Latin,
                    Bucket::Cyrillic => ScriptClass::Cyrillic,
                    Bucket::Han if kana > 0 => ScriptClass::Japanese,
                    Bucket::Han => ScriptClass::Han,
                    Bucket::Hangul => ScriptClass::Hangul,
                    Bucket::Greek => ScriptClass::Greek,
                    Bucket::Arabic => ScriptClass::Arabic,
                    Bucket::Hebrew => ScriptClass::Hebrew,
                    Bucket::Other | Bucket::Kana => ScriptClass::Other,
                };
                (class, n)
            })
            .collect();
        if kana > 0 {
            match classes.iter_mut().find(|(c, _)| *c == ScriptClass::Japanese) {
                Some((_, n)) => *n += kana,
                None => classes.push((ScriptClass::Japanese, kana)),
            }
        }
        let (class, top) = classes
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("at least one letter");
        if (top as f64) < self.majority * total as f64 {
            ScriptClass::Mixed
        } else {
            class
        }
    }
}

pub fn classify_script(text: &str) -> ScriptClass {
    ScriptClassifier::default().classify(text)
}

/// A pluggable short-text language identifier.
pub trait TitleLanguageIdentifier: Send + Sync {
    fn name(&self) -> &str;

    /// A language and a confidence in `[0, 1]`, or `None` when undecided.
    fn identify(&self, title: &str) -> Option<(LangCode, f64)>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanguageGuess {
    pub code: Option<LangCode>,
    pub script: ScriptClass,
    pub reliable: bool,
    /// The code stands for a whole script group (Cyrillic, Arabic script).
    pub script_level: bool,
}

pub fn identify_title_language(
    title: &str,
    plugin: Option<&dyn TitleLanguageIdentifier>,
) -> LanguageGuess {
    identify_with(&ScriptClassifier::default(), title, plugin)
}

pub fn identify_with(
    classifier: &ScriptClassifier,
    title: &str,
    plugin: Option<&dyn TitleLanguageIdentifier>,
) -> LanguageGuess {
    let script = classifier.classify(title);
    let (mut code, mut script_level) = match script.default_language() {
        Some((c, level)) => (Some(c), level),
        None => (None, false),
    };
    if script == ScriptClass::Latin || script_level {
        if let Some((refined, _)) = plugin.and_then(|p| p.identify(title)) {
            code = Some(refined);
            script_level = false;
        }
    }
    LanguageGuess {
        code,
        script,
        reliable: script.is_reliable(),
        script_level,
    }
}

/// The script-only identifier: never refines a guess.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScriptOnly;

impl TitleLanguageIdentifier for ScriptOnly {
    fn name(&self) -> &str {
        "script"
    }

    fn identify(&self, _title: &str) -> Option<(LangCode, f64)> {
        None
    }
}

/// Identifier backed by a `title,code` table produced by an external tool.
#[derive(Debug, Clone, Default)]
pub struct LookupIdentifier {
    table: HashMap<String, LangCode>,
}

impl LookupIdentifier {
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().from_reader(reader);
        let mut table = HashMap::new();
        for row in csv.records() {
            let row = row?;
            let (Some(title), Some(code)) = (row.get(0), row.get(1)) else {
                continue;
            };
            table.insert(title.trim().to_string(), LangCode::new(code)?);
        }
        Ok(LookupIdentifier { table })
    }
}

impl FromIterator<(String, LangCode)> for LookupIdentifier {
    fn from_iter<I: IntoIterator<Item = (String, LangCode)>>(iter: I) -> Self {
        LookupIdentifier {
            table: iter.into_iter().collect(),
        }
    }
}

impl TitleLanguageIdentifier for LookupIdentifier {
    fn name(&self) -> &str {
        "lookup"
    }

    fn identify(&self, title: &str) -> Option<(LangCode, f64)> {
        self.table.get(title.trim()).map(|c| (*c, 1.0))
    }
}

pub fn identifier_registry() -> Registry<dyn TitleLanguageIdentifier> {
    let mut reg: Registry<dyn TitleLanguageIdentifier> = Registry::new("identifier");
    reg.register("script", "script classes only, no refinement", |_| {
        Ok(Box::new(ScriptOnly))
    });
    reg.register("lookup", "title,code table from an external identifier", |cfg| {
        let path = require_path(cfg, "identifier", "lookup")?;
        let file = File::open(path).map_err(|e| Error::file(path, e))?;
        Ok(Box::new(LookupIdentifier::from_csv(file)?))
    });
    reg
}

const QUOTE_PAIRS: [(&str, &str); 5] = [("``", "''"), ("“", "”"), ("‘", "’"), ("\"", "\""), ("'", "'")];
const MIN_TITLE_LETTERS: usize = 8;

fn letter_count(s: &str) -> usize {
    s.chars().filter(|c| c.is_alphabetic()).count()
}

fn first_quoted_span(text: &str) -> Option<&str> {
    let boundary = |c: Option<char>| c.is_none_or(|c| !c.is_alphanumeric());
    let mut pos = 0;
    while pos < text.len() {
        let rest = &text[pos..];
        let before = text[..pos].chars().next_back();
        let opener = QUOTE_PAIRS
            .iter()
            .find(|(open, _)| rest.starts_with(open) && boundary(before));
        if let Some((open, close)) = opener {
            let body_start = pos + open.len();
            let mut search = body_start;
            while let Some(off) = text[search..].find(close) {
                let end = search + off;
                let after = text[end + close.len()..].chars().next();
                if boundary(after) {
                    let body = text[body_start..end].trim();
                    if letter_count(body) >= MIN_TITLE_LETTERS {
                        return Some(body);
                    }
                    break;
                }
                search = end + close.len();
            }
        }
        pos += rest.chars().next().map_or(1, char::len_utf8);
    }
    None
}

fn strip_parenthesized(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut depth = 0usize;
    for c in text.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' if depth > 0 => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

fn looks_like_authors(segment: &str) -> bool {
    let words: Vec<&str> = segment.split_whitespace().collect();
    let names: Vec<&&str> = words
        .iter()
        .filter(|w| !matches!(**w, "and" | "&" | "et" | "al"))
        .collect();
    let joined = words.iter().any(|w| matches!(*w, "and" | "&" | "et"));
    let has_initial = names.iter().any(|w| w.chars().count() == 1);
    names.iter().all(|w| is_capitalized(w)) && (joined || has_initial)
}

fn qualifies_as_title(segment: &str) -> bool {
    let letters = letter_count(segment);
    let digits = segment.chars().filter(char::is_ascii_digit).count();
    segment.split_whitespace().count() >= 2
        && letters >= MIN_TITLE_LETTERS
        && digits < letters
        && !looks_like_authors(segment)
}

/// Best-effort title of a reference entry: the explicit title field, else
/// the first quoted span, else the longest comma/period-delimited segment
/// that does not look like authors, a year or pages.
pub fn extract_title(entry: &ReferenceEntry) -> Option<String> {
    if let Some(t) = entry.title.as_deref().map(str::trim).filter(|t| !t.is_empty()) {
        return Some(t.to_string());
    }
    if let Some(q) = first_quoted_span(&entry.raw_text) {
        return Some(q.to_string());
    }
    let stripped = strip_parenthesized(&entry.raw_text);
    let mut best: Option<(usize, &str)> = None;
    for segment in stripped.split(['.', ',', ';']).map(str::trim) {
        if !qualifies_as_title(segment) {
            continue;
        }
        let letters = letter_count(segment);
        if best.is_none_or(|(n, _)| letters > n) {
            best = Some((letters, segment));
        }
    }
    best.map(|(_, s)| s.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct UnmarkedCounts {
    pub marked: u64,
    pub unmarked: u64,
}

impl UnmarkedCounts {
    /// unmarked / marked; undefined when nothing is marked.
    pub fn ratio(&self) -> Proportion {
        Proportion::new(self.unmarked, self.marked)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UnmarkedReport {
    pub by_language: BTreeMap<LangCode, UnmarkedCounts>,
}

impl UnmarkedReport {
    pub fn from_counts<I: IntoIterator<Item = (LangCode, u64, u64)>>(rows: I) -> Self {
        UnmarkedReport {
            by_language: rows
                .into_iter()
                .map(|(l, marked, unmarked)| (l, UnmarkedCounts { marked, unmarked }))
                .collect(),
        }
    }

    /// Languages whose unmarked/marked ratio is not strictly below `num/den`
    /// (including those with nothing marked).
    pub fn languages_not_below(&self, num: u64, den: u64) -> Vec<LangCode> {
        self.by_language
            .iter()
            .filter(|(_, c)| !c.ratio().is_below(num, den))
            .map(|(l, _)| *l)
            .collect()
    }
}

/// Marked vs. unmarked cross-lingual references per language. A reference is
/// counted as unmarked when it has no detection and its extracted title gets
/// a reliable non-Latin language guess.
pub fn unmarked_rate(
    detections: &DetectionSet,
    docs: &[Document],
    plugin: Option<&dyn TitleLanguageIdentifier>,
) -> UnmarkedReport {
    let mut report = UnmarkedReport::default();
    for c in detections.iter() {
        report.by_language.entry(c.language).or_default().marked += 1;
    }
    for doc in docs {
        for entry in &doc.references {
            if detections.is_cross_lingual(&doc.doc_id, entry.ref_index) {
                continue;
            }
            let Some(title) = extract_title(entry) else {
                continue;
            };
            let guess = identify_title_language(&title, plugin);
            if let (true, Some(code)) = (guess.reliable, guess.code) {
                if !code.is_english() {
                    report.by_language.entry(code).or_default().unmarked += 1;
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTitle {
    pub title: String,
    pub gold: LangCode,
}

/// Reads `title,gold_code` rows with a header.
pub fn load_labeled_sample<R: Read>(reader: R) -> Result<Vec<LabeledTitle>> {
    let mut csv = csv::ReaderBuilder::new().from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in csv.records().enumerate() {
        let row = row?;
        if row.len() != 2 {
            return Err(Error::Malformed {
                line: i + 2,
                reason: format!("expected title,gold_code, found {} fields", row.len()),
            });
        }
        out.push(LabeledTitle {
            title: row[0].to_string(),
            gold: LangCode::new(&row[1])?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassScores {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub support: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentifierEval {
    pub per_language: BTreeMap<LangCode, ClassScores>,
    /// Titles for which no language was predicted.
    pub abstained: u64,
}

/// Per-language precision, recall and F1 of the guesses against gold labels.
pub fn evaluate_identifier(
    labeled: &[LabeledTitle],
    plugin: Option<&dyn TitleLanguageIdentifier>,
    reg: &LanguageRegistry,
) -> Result<IdentifierEval> {
    if labeled.is_empty() {
        return Err(Error::EmptyInput("labeled titles"));
    }
    if let Some(bad) = labeled.iter().find(|l| !reg.contains_code(l.gold)) {
        return Err(Error::UnknownGoldLanguage(bad.gold.to_string()));
    }
    let mut eval = IdentifierEval::default();
    let mut languages = BTreeSet::new();
    let mut pairs = Vec::with_capacity(labeled.len());
    for item in labeled {
        let predicted = identify_title_language(&item.title, plugin).code;
        languages.insert(item.gold);
        languages.extend(predicted);
        if predicted.is_none() {
            eval.abstained += 1;
        }
        pairs.push((item.gold, predicted));
    }
    for lang in languages {
        let mut s = ClassScores::default();
        for (gold, predicted) in &pairs {
            let is_gold = *gold == lang;
            let is_pred = *predicted == Some(lang);
            s.support += is_gold as u64;
            s.true_positives += (is_gold && is_pred) as u64;
            s.false_positives += (!is_gold && is_pred) as u64;
            s.false_negatives += (is_gold && !is_pred) as u64;
        }
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        s.precision = ratio(s.true_positives, s.true_positives + s.false_positives);
        s.recall = ratio(s.true_positives, s.true_positives + s.false_negatives);
        s.f1 = f1_score(s.precision, s.recall);
        eval.per_language.insert(lang, s);
    }
    Ok(eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> LangCode {
        LangCode::new(s).unwrap()
    }

    #[test]
    fn script_examples() {
        assert_eq!(classify_script("Современное модельное описание магнетизма"), ScriptClass::Cyrillic);
        assert_eq!(classify_script("記憶付き可逆論理素子の能力の階層構造について"), ScriptClass::Japanese);
        assert_eq!(classify_script("代名詞が指すもの,その指し方"), ScriptClass::Japanese);
        assert_eq!(classify_script("Hello world"), ScriptClass::Latin);
        assert_eq!(classify_script(""), ScriptClass::Empty);
        assert_eq!(classify_script("1234 -- !!"), ScriptClass::Empty);
        assert_eq!(classify_script("量子力学的基础"), ScriptClass::Han);
        assert_eq!(classify_script("한국어 논문"), ScriptClass::Hangul);
        assert_eq!(classify_script("Περί αριθμών"), ScriptClass::Greek);
    }

    #[test]
    fn latin_acronym_does_not_flip_a_chinese_title() {
        assert_eq!(classify_script("基于GPS的高精度定位方法研究与实现分析"), ScriptClass::Han);
        assert_eq!(classify_script("Hello Мир"), ScriptClass::Mixed);
    }

    #[test]
    fn majority_threshold_is_configurable() {
        let lenient = ScriptClassifier { majority: 0.5 };
        assert_eq!(lenient.classify("Hello Мир"), ScriptClass::Latin);
    }

    #[test]
    fn guesses() {
        let ja = identify_title_language("代名詞が指すもの,その指し方", None);
        assert_eq!((ja.code, ja.script, ja.reliable), (Some(code("ja")), ScriptClass::Japanese, true));

        let de = identify_title_language("Über Gruppen", None);
        assert_eq!((de.code, de.script, de.reliable), (None, ScriptClass::Latin, false));

        let ru = identify_title_language("Современное модельное описание магнетизма", None);
        assert_eq!(ru.code, Some(code("ru")));
        assert!(ru.reliable && ru.script_level);
    }

    #[test]
    fn plugin_refines_latin_and_script_level_only() {
        let plugin: LookupIdentifier = [
            ("Über Gruppen".to_string(), code("de")),
            ("Сучасна модель".to_string(), code("uk")),
            ("代名詞".to_string(), code("zh")),
        ]
        .into_iter()
        .collect();
        let de = identify_title_language("Über Gruppen", Some(&plugin));
        assert_eq!(de.code, Some(code("de")));
        assert!(!de.reliable);
        let uk = identify_title_language("Сучасна модель", Some(&plugin));
        assert_eq!(uk.code, Some(code("uk")));
        assert!(!uk.script_level);
        assert_eq!(identify_title_language("代名詞", Some(&plugin)).code, Some(code("zh")));
    }

    #[test]
    fn title_extraction() {
        let mut entry = ReferenceEntry::new(0, "anything");
        entry.title = Some("X".into());
        assert_eq!(extract_title(&entry).as_deref(), Some("X"));

        let saitou = ReferenceEntry::new(0, "M. Saitou, 'Hydrodynamics on non-commutative space' (in Japanese), Soryushiron Kenkyu 108 (2003)");
        assert_eq!(extract_title(&saitou).as_deref(), Some("Hydrodynamics on non-commutative space"));

        assert_eq!(extract_title(&ReferenceEntry::new(0, "J. Doe, 2001.")), None);

        let plain = ReferenceEntry::new(0, "A. Ivanov and B. Petrov, Современное модельное описание магнетизма, Ж. Физ. 12 (2001) 1-20 (in Russian)");
        assert_eq!(extract_title(&plain).as_deref(), Some("Современное модельное описание магнетизма"));

        let latex = ReferenceEntry::new(0, "O'Neil, ``Quantum groups and knots'', 1999");
        assert_eq!(extract_title(&latex).as_deref(), Some("Quantum groups and knots"));
    }

    #[test]
    fn apostrophes_are_not_quotes() {
        let entry = ReferenceEntry::new(0, "D'Alembert's lemma revisited in depth, Journal 3");
        assert_eq!(extract_title(&entry).as_deref(), Some("D'Alembert's lemma revisited in depth"));
    }

    #[test]
    fn unmarked_ratio_arithmetic() {
        let report = UnmarkedReport::from_counts([(code("ru"), 100, 1)]);
        assert!(report.by_language[&code("ru")].ratio().equals(1, 100));
        let undefined = UnmarkedReport::from_counts([(code("ko"), 0, 2)]);
        assert_eq!(undefined.by_language[&code("ko")].ratio().value(), None);
        assert_eq!(undefined.languages_not_below(2, 100), vec![code("ko")]);
    }

    #[test]
    fn f1_formula() {
        assert!((f1_score(0.48, 0.44) - 0.459).abs() < 1e-3);
        assert_eq!(f1_score(0.0, 0.0), 0.0);
    }

    #[test]
    fn evaluation_rejects_unknown_gold_and_empty() {
        let reg = LanguageRegistry::builtin();
        assert!(evaluate_identifier(&[], None, &reg).is_err());
        let bad = [LabeledTitle { title: "x".into(), gold: code("qq") }];
        assert!(matches!(evaluate_identifier(&bad, None, &reg), Err(Error::UnknownGoldLanguage(_))));
    }

    #[test]
    fn labeled_sample_csv() {
        let rows = load_labeled_sample("title,gold_code\n\"A, B\",en\nÜber,de\n".as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].title, "A, B");
    }
}
