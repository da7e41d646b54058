//! Citation intent and sentiment labels for in-text citation sets.
//!
//! Labels come either from a [`ContextClassifier`] run in-process (the
//! built-in one is a cue lexicon) or from a label file produced elsewhere,
//! imported with [`import_labels`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::corpus::{Discipline, InTextCitation};
use crate::error::{Error, Result};
use crate::stats::Proportion;
use crate::strategy::{Registry, StrategyConfig};
use crate::usage::{ContextKey, ContextSet, ContextSets};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Intent,
    Sentiment,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Intent => "intent",
            Task::Sentiment => "sentiment",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "intent" => Ok(Task::Intent),
            "sentiment" => Ok(Task::Sentiment),
            _ => Err(Error::Registry(format!("unknown task {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntentLabel {
    Background,
    Method,
    Result,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentimentLabel {
    Neutral,
    Positive,
    Negative,
}

/// Sentiment schemes: the two-class one has no Negative label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SentimentScheme {
    #[default]
    ThreeClass,
    TwoClass,
}

impl SentimentScheme {
    pub fn allows(self, label: SentimentLabel) -> bool {
        !(self == SentimentScheme::TwoClass && label == SentimentLabel::Negative)
    }
}

impl FromStr for SentimentScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "three_class" | "three-class" | "3" => Ok(SentimentScheme::ThreeClass),
            "two_class" | "two-class" | "2" => Ok(SentimentScheme::TwoClass),
            _ => Err(Error::Registry(format!("unknown sentiment scheme {s:?}"))),
        }
    }
}

/// A label of either task. Ordering follows the column order of the
/// distribution tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Intent(IntentLabel),
    Sentiment(SentimentLabel),
}

impl Label {
    pub const INTENT: [Label; 3] = [
        Label::Intent(IntentLabel::Background),
        Label::Intent(IntentLabel::Method),
        Label::Intent(IntentLabel::Result),
    ];
    pub const SENTIMENT: [Label; 3] = [
        Label::Sentiment(SentimentLabel::Neutral),
        Label::Sentiment(SentimentLabel::Positive),
        Label::Sentiment(SentimentLabel::Negative),
    ];

    pub fn all(task: Task) -> &'static [Label] {
        match task {
            Task::Intent => &Self::INTENT,
            Task::Sentiment => &Self::SENTIMENT,
        }
    }

    pub fn task(self) -> Task {
        match self {
            Label::Intent(_) => Task::Intent,
            Label::Sentiment(_) => Task::Sentiment,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Intent(IntentLabel::Background) => "Background",
            Label::Intent(IntentLabel::Method) => "Method",
            Label::Intent(IntentLabel::Result) => "Result",
            Label::Sentiment(SentimentLabel::Neutral) => "Neutral",
            Label::Sentiment(SentimentLabel::Positive) => "Positive",
            Label::Sentiment(SentimentLabel::Negative) => "Negative",
        }
    }

    /// Case-insensitive label name within `task`.
    pub fn parse(task: Task, s: &str) -> Option<Label> {
        let s = s.trim();
        Label::all(task)
            .iter()
            .copied()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
    }

    pub fn default_for(task: Task) -> Label {
        Label::all(task)[0]
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Labels a single citing sentence. Implementations must be pure functions
/// of the sentence text.
pub trait ContextClassifier: Send + Sync {
    fn name(&self) -> &str;
    fn classify(&self, task: Task, sentence: &str) -> std::result::Result<Label, String>;
}

pub fn classify_context(
    ctx: &InTextCitation,
    task: Task,
    classifier: &dyn ContextClassifier,
) -> Result<Label> {
    let fail = |reason: String| Error::Classifier {
        classifier: classifier.name().to_string(),
        sentence_id: ctx.sentence_id,
        reason,
    };
    if ctx.sentence_text.trim().is_empty() {
        return Err(fail("empty sentence".into()));
    }
    let label = classifier.classify(task, &ctx.sentence_text).map_err(fail)?;
    if label.task() != task {
        return Err(fail(format!("returned {label} for task {task}")));
    }
    Ok(label)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cue {
    task: Task,
    label: Label,
    /// Casefolded pieces that must occur in order; `...` in the source
    /// splits pieces.
    pieces: Vec<String>,
}

impl Cue {
    fn matches(&self, folded: &str) -> bool {
        let mut rest = folded;
        for piece in &self.pieces {
            match rest.find(piece.as_str()) {
                Some(at) => rest = &rest[at + piece.len()..],
                None => return false,
            }
        }
        true
    }
}

/// Ordered cue list; the first matching cue decides, otherwise the task
/// default (Background, Neutral) applies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CueLexicon {
    cues: Vec<Cue>,
}

const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.csv");

impl CueLexicon {
    pub fn builtin() -> Self {
        Self::from_csv(DEFAULT_LEXICON.as_bytes()).expect("built-in lexicon is valid")
    }

    /// Reads `task,label,cue` rows in priority order.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().from_reader(reader);
        let mut cues = Vec::new();
        for (i, row) in csv.records().enumerate() {
            let row = row?;
            let line = i + 2;
            let field = |n: usize| row.get(n).unwrap_or("").trim();
            let task: Task = field(0).parse().map_err(|_| Error::Malformed {
                line,
                reason: format!("unknown task {:?}", field(0)),
            })?;
            let label = Label::parse(task, field(1)).ok_or_else(|| Error::UnknownLabel {
                line,
                task: task.to_string(),
                label: field(1).to_string(),
            })?;
            let pieces: Vec<String> = field(2)
                .to_lowercase()
                .split("...")
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect();
            if pieces.is_empty() {
                return Err(Error::Malformed {
                    line,
                    reason: "empty cue".into(),
                });
            }
            cues.push(Cue { task, label, pieces });
        }
        Ok(CueLexicon { cues })
    }

    pub fn len(&self) -> usize {
        self.cues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cues.is_empty()
    }

    pub fn label(&self, task: Task, sentence: &str) -> Label {
        let folded = sentence.to_lowercase();
        self.cues
            .iter()
            .filter(|c| c.task == task)
            .find(|c| c.matches(&folded))
            .map_or(Label::default_for(task), |c| c.label)
    }
}

impl ContextClassifier for CueLexicon {
    fn name(&self) -> &str {
        "lexicon"
    }

    fn classify(&self, task: Task, sentence: &str) -> std::result::Result<Label, String> {
        Ok(self.label(task, sentence))
    }
}

pub fn classifier_registry() -> Registry<dyn ContextClassifier> {
    let mut reg: Registry<dyn ContextClassifier> = Registry::new("classifier");
    reg.register(
        "lexicon",
        "ordered cue lexicon; built-in cues unless a lexicon file is given",
        |cfg: &StrategyConfig| match &cfg.path {
            Some(path) => {
                let file = File::open(path).map_err(|e| Error::file(path, e))?;
                Ok(Box::new(CueLexicon::from_csv(file)?))
            }
            None => Ok(Box::new(CueLexicon::builtin())),
        },
    );
    reg
}

/// Labels keyed by `(doc_id, sentence_id, ref_index)` and task.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelStore {
    labels: HashMap<(ContextKey, Task), Label>,
    scheme: SentimentScheme,
}

impl LabelStore {
    pub fn new(scheme: SentimentScheme) -> Self {
        LabelStore {
            labels: HashMap::new(),
            scheme,
        }
    }

    pub fn scheme(&self) -> SentimentScheme {
        self.scheme
    }

    /// Returns `false` if the key already had a label for this task.
    pub fn insert(&mut self, key: ContextKey, label: Label) -> bool {
        self.labels.insert((key, label.task()), label).is_none()
    }

    pub fn get(&self, key: &ContextKey, task: Task) -> Option<Label> {
        self.labels.get(&(key.clone(), task)).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Writes the label file format, sorted by key and task.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut rows: Vec<_> = self.labels.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(["doc_id", "sentence_id", "ref_index", "task", "label"])?;
        for (((doc, sentence, r), task), label) in rows {
            w.write_record([
                doc.as_str(),
                &sentence.to_string(),
                &r.to_string(),
                task.as_str(),
                label.as_str(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

const LABEL_COLUMNS: [&str; 5] = ["doc_id", "sentence_id", "ref_index", "task", "label"];

/// Reads a label file. Columns are located by header name.
pub fn import_labels<R: Read>(reader: R, scheme: SentimentScheme) -> Result<LabelStore> {
    let mut csv = csv::ReaderBuilder::new().from_reader(reader);
    let headers = csv.headers()?.clone();
    let mut idx = [0usize; 5];
    for (slot, name) in idx.iter_mut().zip(LABEL_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Malformed {
                line: 1,
                reason: format!("missing column {name:?}"),
            })?;
    }
    let mut store = LabelStore::new(scheme);
    for (i, row) in csv.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let field = |n: usize| row.get(idx[n]).unwrap_or("").trim();
        let malformed = |reason: String| Error::Malformed { line, reason };
        let doc_id = field(0).to_string();
        let sentence_id: u64 = field(1)
            .parse()
            .map_err(|_| malformed(format!("bad sentence_id {:?}", field(1))))?;
        let ref_index: usize = field(2)
            .parse()
            .map_err(|_| malformed(format!("bad ref_index {:?}", field(2))))?;
        let task: Task = field(3)
            .parse()
            .map_err(|_| malformed(format!("unknown task {:?}", field(3))))?;
        let unknown = || Error::UnknownLabel {
            line,
            task: task.to_string(),
            label: field(4).to_string(),
        };
        let label = Label::parse(task, field(4)).ok_or_else(unknown)?;
        if let Label::Sentiment(s) = label {
            if !scheme.allows(s) {
                return Err(unknown());
            }
        }
        if !store.insert((doc_id.clone(), sentence_id, ref_index), label) {
            return Err(Error::DuplicateLabel {
                line,
                doc_id,
                sentence_id,
                ref_index,
            });
        }
    }
    Ok(store)
}

/// Runs `classifier` over every context of every set.
pub fn classify_sets(
    sets: &ContextSets,
    task: Task,
    classifier: &dyn ContextClassifier,
) -> Result<LabelStore> {
    let mut store = LabelStore::new(SentimentScheme::ThreeClass);
    for set in ContextSet::ALL {
        for r in sets.get(set) {
            let label = classify_context(&r.citation, task, classifier)?;
            store.insert(r.key(), label);
        }
    }
    Ok(store)
}

/// Per-class counts of one context set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCounts {
    pub counts: BTreeMap<Label, u64>,
    /// Contexts without a label for the task.
    pub excluded: u64,
}

impl ClassCounts {
    fn new(task: Task) -> Self {
        ClassCounts {
            counts: Label::all(task).iter().map(|l| (*l, 0)).collect(),
            excluded: 0,
        }
    }

    pub fn labeled(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn share(&self, label: Label) -> Proportion {
        Proportion::new(self.counts.get(&label).copied().unwrap_or(0), self.labeled())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDistribution {
    pub task: Task,
    pub per_set: BTreeMap<ContextSet, ClassCounts>,
    pub per_discipline: BTreeMap<(ContextSet, Discipline), ClassCounts>,
}

pub fn label_distribution(sets: &ContextSets, labels: &LabelStore, task: Task) -> LabelDistribution {
    let mut dist = LabelDistribution {
        task,
        per_set: BTreeMap::new(),
        per_discipline: BTreeMap::new(),
    };
    for set in ContextSet::ALL {
        let mut counts = ClassCounts::new(task);
        for r in sets.get(set) {
            let by_disc = dist
                .per_discipline
                .entry((set, r.discipline.clone()))
                .or_insert_with(|| ClassCounts::new(task));
            match labels.get(&r.key(), task) {
                Some(l) => {
                    *counts.counts.entry(l).or_insert(0) += 1;
                    *by_disc.counts.entry(l).or_insert(0) += 1;
                }
                None => {
                    counts.excluded += 1;
                    by_disc.excluded += 1;
                }
            }
        }
        dist.per_set.insert(set, counts);
    }
    dist
}
