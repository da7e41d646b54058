//! Orchestration of the command-line subcommands.
//!
//! Each `run_*` function loads the inputs it needs from a [`RunConfig`],
//! calls the analysis modules and writes its tables under the output
//! directory. [`run_report`] loads everything once and runs every stage whose
//! inputs are present.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::classify::{
    classifier_registry, classify_sets, import_labels, label_distribution, Label, LabelDistribution,
    LabelStore, SentimentScheme, Task,
};
use crate::corpus::{
    collect_documents, load_metadata, load_territory_map, Document, LoadStats, MetadataStore,
    Severity, TerritoryLanguageMap,
};
use crate::error::{Error, Result};
use crate::impact::{
    citation_compare, impact_table, load_pairs, matcher_registry, pair_delta, pair_diff_table,
    resolution_rates, stratified_random_set, PairDiffRow, PairDiffStats, PaperPair,
};
use crate::languages::{coverage_report, load_journal_counts, LanguageRegistry};
use crate::marker::{DetectionSet, Detector, MarkerScanner};
use crate::output::{emit_csv, emit_heatmap_svg, HeatmapMode, Table};
use crate::prevalence::{
    cross_linguality, grouped_doc_rates, language_pair_counts, prevalence_summary, GroupBy,
    HISTOGRAM_BINS,
};
use crate::stats::{fmt_fixed, fmt_opt, Proportion};
use crate::strategy::StrategyConfig;
use crate::title::{evaluate_identifier, identifier_registry, load_labeled_sample, unmarked_rate, TitleLanguageIdentifier};
use crate::usage::{
    extract_context_sets, geo_origin_matrix, locality_summary, self_citation_rates, ContextSet,
    ContextSets, GeoMatrix,
};

/// Share of skipped input lines above which a run fails.
pub const SKIP_LIMIT_PERCENT: u64 = 1;

/// Geo heatmaps of the most cited languages use this many rows.
pub const TOP_LANGUAGES: usize = 10;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub docs: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    pub territory: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub pairs: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub journal_counts: Option<PathBuf>,
    pub labeled_sample: Option<PathBuf>,
    /// Data file for identifiers that need one (e.g. `lookup`).
    pub identifier_data: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub marker_case_insensitive: bool,
    pub severity: Severity,
    /// Inclusive citation-count window for the filtered impact statistics.
    pub citation_window: Option<(u64, u64)>,
    pub identifier: String,
    pub classifier: String,
    pub matcher: String,
    pub sentiment_scheme: SentimentScheme,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            docs: None,
            metadata: None,
            territory: None,
            registry: None,
            labels: None,
            pairs: None,
            lexicon: None,
            journal_counts: None,
            labeled_sample: None,
            identifier_data: None,
            out: PathBuf::from("out"),
            seed: 0,
            marker_case_insensitive: false,
            severity: Severity::Skip,
            citation_window: Some((1, 100)),
            identifier: "script".into(),
            classifier: "lexicon".into(),
            matcher: "exact-title".into(),
            sentiment_scheme: SentimentScheme::ThreeClass,
        }
    }
}

/// What a command wrote, plus summary lines for the diagnostic stream.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl Outcome {
    fn csv(&mut self, dir: &Path, name: &str, table: &Table) -> Result<()> {
        let path = dir.join(name);
        emit_csv(table, &path)?;
        self.written.push(path);
        Ok(())
    }

    fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::file(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::file(path, e))
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &'static str) -> Result<&'a Path> {
    path.as_deref().ok_or(Error::MissingInput(flag))
}

pub fn load_registry(cfg: &RunConfig) -> Result<LanguageRegistry> {
    match &cfg.registry {
        Some(p) => LanguageRegistry::from_csv(open(p)?),
        None => Ok(LanguageRegistry::builtin()),
    }
}

/// Loads the documents and fails if too many lines had to be skipped.
pub fn load_docs(cfg: &RunConfig) -> Result<(Vec<Document>, LoadStats)> {
    let path = required(&cfg.docs, "--docs")?;
    let (docs, stats) = collect_documents(open(path)?, cfg.severity)?;
    if stats.skipped * 100 > stats.lines * SKIP_LIMIT_PERCENT {
        return Err(Error::ValidationThreshold {
            skipped: stats.skipped,
            lines: stats.lines,
            limit_pct: SKIP_LIMIT_PERCENT,
        });
    }
    if stats.skipped > 0 {
        log::warn!("skipped {} of {} document lines", stats.skipped, stats.lines);
    }
    Ok((docs, stats))
}

pub fn load_store(cfg: &RunConfig) -> Result<MetadataStore> {
    load_metadata(open(required(&cfg.metadata, "--metadata")?)?)
}

pub fn load_territory(cfg: &RunConfig) -> Result<TerritoryLanguageMap> {
    load_territory_map(open(required(&cfg.territory, "--territory")?)?)
}

fn detect(cfg: &RunConfig, reg: &LanguageRegistry, docs: &[Document]) -> DetectionSet {
    let scanner = MarkerScanner::new(cfg.marker_case_insensitive);
    Detector::with_scanner(reg, scanner).detect_corpus_par(docs)
}

fn ensure_out(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.out).map_err(|e| Error::file(&cfg.out, e))?;
    Ok(&cfg.out)
}

fn ratio(p: &Proportion) -> String {
    fmt_opt(p.value(), 6)
}

// ---- detect ----

fn write_detections(out: &mut Outcome, dir: &Path, det: &DetectionSet) -> Result<()> {
    let path = dir.join("detections.jsonl");
    let mut w = create(&path)?;
    det.write_jsonl(&mut w)?;
    w.flush().map_err(|e| Error::file(&path, e))?;
    out.written.push(path);

    let mut tokens = Table::new(["token", "count"]);
    for (token, count) in &det.raw_tokens {
        tokens.push([token.clone(), count.to_string()])?;
    }
    out.csv(dir, "tokens.csv", &tokens)?;
    out.note(format!(
        "{} cross-lingual references in {} of {} documents ({} references scanned)",
        det.len(),
        det.doc_count(),
        det.docs_scanned,
        det.refs_scanned
    ));
    Ok(())
}

pub fn run_detect(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let mut out = Outcome::default();
    write_detections(&mut out, dir, &det)?;
    Ok(out)
}

// ---- stats prevalence ----

fn identifier(cfg: &RunConfig) -> Result<Box<dyn TitleLanguageIdentifier>> {
    let sc = StrategyConfig {
        path: cfg.identifier_data.clone(),
    };
    identifier_registry().create(&cfg.identifier, &sc)
}

fn prevalence_tables(
    cfg: &RunConfig,
    out: &mut Outcome,
    dir: &Path,
    reg: &LanguageRegistry,
    docs: &[Document],
    det: &DetectionSet,
) -> Result<()> {
    let p = prevalence_summary(docs, det);
    let mut t = Table::new(["metric", "cross_lingual", "total", "ratio", "one_in"]);
    for (name, prop) in [("references", &p.refs), ("documents", &p.docs)] {
        t.push([
            name.to_string(),
            prop.part.to_string(),
            prop.whole.to_string(),
            ratio(prop),
            fmt_opt(prop.one_in(), 1),
        ])?;
    }
    out.csv(dir, "prevalence.csv", &t)?;
    out.note(format!(
        "prevalence: {} of {} references, {} of {} documents",
        p.refs.part, p.refs.whole, p.docs.part, p.docs.whole
    ));

    let mut t = Table::new(["language", "references", "documents"]);
    for (lang, c) in &p.per_language {
        t.push([lang.to_string(), c.refs.to_string(), c.docs.to_string()])?;
    }
    out.csv(dir, "languages.csv", &t)?;

    let mut t = Table::new(["languages_cited", "documents"]);
    for (n, docs) in &p.docs_by_language_count {
        t.push([n.to_string(), docs.to_string()])?;
    }
    out.csv(dir, "languages_per_doc.csv", &t)?;

    for (group, name, col) in [
        (GroupBy::Year, "rates_by_year.csv", "year"),
        (GroupBy::Discipline, "rates_by_discipline.csv", "discipline"),
    ] {
        let mut t = Table::new([col, "language", "cross_lingual_docs", "docs", "ratio"]);
        let mut filters = vec![None];
        filters.extend(p.per_language.keys().copied().map(Some));
        for filter in filters {
            for (key, prop) in grouped_doc_rates(docs, det, group, filter) {
                t.push([
                    key.to_string(),
                    filter.map_or("all".to_string(), |l| l.to_string()),
                    prop.part.to_string(),
                    prop.whole.to_string(),
                    ratio(&prop),
                ])?;
            }
        }
        out.csv(dir, name, &t)?;
    }

    let xl = cross_linguality(docs, det)?;
    let mut t = Table::new(["scope", "documents", "mean", "sd"]);
    if let Some(s) = &xl.summary {
        t.push(["all".to_string(), s.n.to_string(), fmt_fixed(s.mean(), 6), fmt_fixed(s.sd(), 6)])?;
    }
    for (d, s) in &xl.per_discipline {
        t.push([d.to_string(), s.n.to_string(), fmt_fixed(s.mean(), 6), fmt_fixed(s.sd(), 6)])?;
    }
    out.csv(dir, "xlinguality.csv", &t)?;
    if let Some(s) = &xl.summary {
        out.note(format!(
            "cross-linguality: mean {} (sd {}) over {} documents",
            fmt_fixed(s.mean(), 3),
            fmt_fixed(s.sd(), 3),
            s.n
        ));
    }

    let mut t = Table::new(["bin_start", "bin_end", "documents"]);
    for (i, n) in xl.histogram(HISTOGRAM_BINS).iter().enumerate() {
        let w = 1.0 / HISTOGRAM_BINS as f64;
        t.push([fmt_fixed(i as f64 * w, 2), fmt_fixed((i + 1) as f64 * w, 2), n.to_string()])?;
    }
    out.csv(dir, "xlinguality_hist.csv", &t)?;

    let mut t = Table::new(["language_a", "language_b", "documents"]);
    for ((a, b), n) in language_pair_counts(det) {
        t.push([a.to_string(), b.to_string(), n.to_string()])?;
    }
    out.csv(dir, "pairs.csv", &t)?;

    let plugin = identifier(cfg)?;
    let unmarked = unmarked_rate(det, docs, Some(plugin.as_ref()));
    let mut t = Table::new(["language", "marked", "unmarked", "ratio"]);
    for (lang, c) in &unmarked.by_language {
        t.push([
            lang.to_string(),
            c.marked.to_string(),
            c.unmarked.to_string(),
            ratio(&c.ratio()),
        ])?;
    }
    out.csv(dir, "unmarked_report.csv", &t)?;

    if let Some(path) = &cfg.journal_counts {
        let cov = coverage_report(reg, &load_journal_counts(open(path)?)?)?;
        let mut t = Table::new(["languages_covered", "languages_total", "journals_covered", "journals_total", "share"]);
        t.push([
            cov.languages_covered.to_string(),
            cov.languages_total.to_string(),
            cov.journal_share.part.to_string(),
            cov.journal_share.whole.to_string(),
            ratio(&cov.journal_share),
        ])?;
        out.csv(dir, "coverage.csv", &t)?;
    }

    if let Some(path) = &cfg.labeled_sample {
        let labeled = load_labeled_sample(open(path)?)?;
        let eval = evaluate_identifier(&labeled, Some(plugin.as_ref()), reg)?;
        let mut t = Table::new(["language", "support", "precision", "recall", "f1"]);
        for (lang, s) in &eval.per_language {
            t.push([
                lang.to_string(),
                s.support.to_string(),
                fmt_fixed(s.precision, 4),
                fmt_fixed(s.recall, 4),
                fmt_fixed(s.f1, 4),
            ])?;
        }
        out.csv(dir, "identifier_eval.csv", &t)?;
    }
    Ok(())
}

pub fn run_prevalence(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let mut out = Outcome::default();
    prevalence_tables(cfg, &mut out, dir, &reg, &docs, &det)?;
    Ok(out)
}

// ---- stats usage ----

fn geo_table(m: &GeoMatrix, relative: bool) -> Result<Table> {
    let cols: Vec<_> = m.columns().collect();
    let mut header = vec!["cited_language".to_string()];
    header.extend(cols.iter().map(|c| c.to_string()));
    let mut t = Table::new(header);
    for row in m.rows() {
        let mut cells = vec![row.to_string()];
        let norm = m.row_normalized(row);
        for c in &cols {
            cells.push(if relative {
                fmt_fixed(norm.get(c).copied().unwrap_or(0.0), 6)
            } else {
                m.get(row, *c).to_string()
            });
        }
        t.push(cells)?;
    }
    Ok(t)
}

fn write_contexts(out: &mut Outcome, dir: &Path, sets: &ContextSets) -> Result<()> {
    for set in ContextSet::ALL {
        let path = dir.join(format!("contexts_{}.jsonl", set.label()));
        let mut w = create(&path)?;
        sets.write_jsonl(set, &mut w)?;
        w.flush().map_err(|e| Error::file(&path, e))?;
        out.written.push(path);
    }
    let p = &sets.pools;
    let mut t = Table::new(["stage", "xling", "mono"]);
    t.push(["extracted".to_string(), p.x_ling_extracted.to_string(), p.mono_extracted.to_string()])?;
    t.push(["separated".to_string(), p.x_ling_separated.to_string(), p.mono_separated.to_string()])?;
    t.push(["balanced".to_string(), sets.x_ling.len().to_string(), sets.mono.len().to_string()])?;
    out.csv(dir, "context_pools.csv", &t)?;
    out.note(format!(
        "contexts: {} x-ling / {} mono extracted, {} mixed, {} each after balancing, {} cross-lingual references without a neighbor",
        p.x_ling_extracted,
        p.mono_extracted,
        sets.mixed.len(),
        sets.x_ling.len(),
        p.skipped_no_neighbor
    ));
    Ok(())
}

fn usage_tables(
    cfg: &RunConfig,
    out: &mut Outcome,
    dir: &Path,
    docs: &[Document],
    det: &DetectionSet,
    store: &MetadataStore,
    map: &TerritoryLanguageMap,
) -> Result<ContextSets> {
    let sc = self_citation_rates(docs, det, store);
    let mut t = Table::new(["scope", "support", "strict", "loose", "strict_rate", "loose_rate"]);
    for r in [&sc.cross_lingual, &sc.monolingual] {
        t.push([
            r.scope.label().to_string(),
            r.support().to_string(),
            r.strict.part.to_string(),
            r.loose.part.to_string(),
            ratio(&r.strict),
            ratio(&r.loose),
        ])?;
    }
    out.csv(dir, "selfcite.csv", &t)?;
    out.note(format!(
        "self-citation: {} references lacked metadata and were excluded",
        sc.excluded
    ));

    let geo = geo_origin_matrix(docs, det, store, map);
    out.csv(dir, "geo_abs.csv", &geo_table(&geo.matrix, false)?)?;
    out.csv(dir, "geo_rel.csv", &geo_table(&geo.matrix, true)?)?;
    out.note(format!(
        "geo: {} author-citation pairs from {} documents; {} excluded (unmapped country); {} multi-affiliation authors",
        geo.matrix.total(),
        geo.participating_docs,
        geo.excluded_unmapped,
        geo.multi_affiliation_authors
    ));
    if !geo.matrix.is_empty() {
        let top = geo.matrix.top_rows(TOP_LANGUAGES);
        for (m, name, mode) in [
            (&top, "geo_top_abs.svg", HeatmapMode::Absolute),
            (&top, "geo_top_rel.svg", HeatmapMode::Relative),
            (&geo.matrix, "geo_all_rel.svg", HeatmapMode::Relative),
        ] {
            let path = dir.join(name);
            emit_heatmap_svg(m, &path, mode)?;
            out.written.push(path);
        }
        let loc = locality_summary(&geo.matrix)?;
        let mut t = Table::new(["language", "citations", "local", "local_rate", "en_origin", "en_origin_rate"]);
        t.push([
            "all".to_string(),
            loc.local.whole.to_string(),
            loc.local.part.to_string(),
            ratio(&loc.local),
            loc.anglosphere.part.to_string(),
            ratio(&loc.anglosphere),
        ])?;
        for (lang, l) in &loc.per_language {
            t.push([
                lang.to_string(),
                l.local.whole.to_string(),
                l.local.part.to_string(),
                ratio(&l.local),
                l.en_origin.part.to_string(),
                ratio(&l.en_origin),
            ])?;
        }
        out.csv(dir, "locality.csv", &t)?;
    }

    let sets = extract_context_sets(docs, det, cfg.seed);
    write_contexts(out, dir, &sets)?;
    Ok(sets)
}

pub fn run_usage(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let store = load_store(cfg)?;
    let map = load_territory(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let mut out = Outcome::default();
    usage_tables(cfg, &mut out, dir, &docs, &det, &store, &map)?;
    Ok(out)
}

// ---- sample / stats impact / resolve / diff-pairs ----

fn xling_docs<'a>(docs: &'a [Document], det: &'a DetectionSet) -> impl Iterator<Item = &'a Document> {
    docs.iter().filter(|d| det.count_in_doc(&d.doc_id) > 0)
}

fn sample_table(cfg: &RunConfig, docs: &[Document], det: &DetectionSet) -> Result<(Vec<String>, Table)> {
    let ids = stratified_random_set(docs, xling_docs(docs, det), cfg.seed)?;
    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.doc_id.as_str(), d)).collect();
    let mut t = Table::new(["doc_id", "year", "discipline"]);
    for id in &ids {
        let d = by_id[id.as_str()];
        t.push([id.clone(), d.year.to_string(), d.discipline.to_string()])?;
    }
    Ok((ids.into_iter().collect(), t))
}

pub fn run_sample(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let (ids, t) = sample_table(cfg, &docs, &det)?;
    let mut out = Outcome::default();
    out.csv(dir, "random_set.csv", &t)?;
    out.note(format!("sampled {} documents with seed {}", ids.len(), cfg.seed));
    Ok(out)
}

fn resolution_tables(
    cfg: &RunConfig,
    out: &mut Outcome,
    dir: &Path,
    docs: &[Document],
    det: &DetectionSet,
    store: &MetadataStore,
) -> Result<()> {
    let matcher = matcher_registry().create(&cfg.matcher, &StrategyConfig::default())?;
    let r = resolution_rates(docs, det, store, matcher.as_ref());
    out.csv(dir, "resolution.csv", &r.table())?;
    let mut t = Table::new(["scope", "attempted", "resolved", "rate"]);
    for (name, p) in [
        ("all_references", &r.overall),
        ("cross_lingual_documents", &r.xling_docs),
        ("cross_lingual_references", &r.cross_lingual),
    ] {
        t.push([name.to_string(), p.whole.to_string(), p.part.to_string(), ratio(p)])?;
    }
    out.csv(dir, "resolution_summary.csv", &t)?;
    out.note(format!(
        "resolution: {} of {} references, {} of {} cross-lingual; {} ambiguous, {} without a title",
        r.overall.part, r.overall.whole, r.cross_lingual.part, r.cross_lingual.whole, r.ambiguous, r.no_title
    ));
    Ok(())
}

pub fn run_resolve(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let store = load_store(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let mut out = Outcome::default();
    resolution_tables(cfg, &mut out, dir, &docs, &det, &store)?;
    Ok(out)
}

fn pair_tables(out: &mut Outcome, dir: &Path, reg: &LanguageRegistry, cfg: &RunConfig, pairs: &[PaperPair]) -> Result<()> {
    let detector = Detector::with_scanner(reg, MarkerScanner::new(cfg.marker_case_insensitive));
    let mut t = Table::new(["pair_id", "delta"]);
    let mut deltas = Vec::with_capacity(pairs.len());
    for p in pairs {
        let d = pair_delta(p, &detector);
        deltas.push(d);
        t.push([p.pair_id.clone(), d.to_string()])?;
    }
    out.csv(dir, "pair_deltas.csv", &t)?;
    let stats = PairDiffStats::from_deltas(&deltas)?;
    out.csv(dir, "pair_diff.csv", &pair_diff_table(&[PairDiffRow::from_stats("pairs", &stats)]))?;
    out.note(format!(
        "pairs: {} compared, {} increased, {} decreased",
        stats.pairs, stats.increased, stats.decreased
    ));
    Ok(())
}

pub fn run_diff_pairs(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let pairs = load_pairs(open(required(&cfg.pairs, "--pairs")?)?)?;
    let dir = ensure_out(cfg)?;
    let mut out = Outcome::default();
    pair_tables(&mut out, dir, &reg, cfg, &pairs)?;
    Ok(out)
}

fn impact_tables(
    cfg: &RunConfig,
    out: &mut Outcome,
    dir: &Path,
    docs: &[Document],
    det: &DetectionSet,
    store: &MetadataStore,
) -> Result<()> {
    let (random, sample) = sample_table(cfg, docs, det)?;
    out.csv(dir, "random_set.csv", &sample)?;
    let cmp = citation_compare(
        xling_docs(docs, det).map(|d| d.doc_id.as_str()),
        random.iter().map(String::as_str),
        store,
        cfg.citation_window,
    );
    out.csv(dir, "impact.csv", &impact_table(&cmp, "cross_lingual_set", "random_set"))?;
    out.note(format!(
        "impact: published {} vs {}; {} and {} documents without metadata",
        cmp.a.published, cmp.b.published, cmp.a.unresolved, cmp.b.unresolved
    ));
    resolution_tables(cfg, out, dir, docs, det, store)
}

pub fn run_impact(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let store = load_store(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let mut out = Outcome::default();
    impact_tables(cfg, &mut out, dir, &docs, &det, &store)?;
    if let Some(path) = &cfg.pairs {
        pair_tables(&mut out, dir, &reg, cfg, &load_pairs(open(path)?)?)?;
    }
    Ok(out)
}

// ---- classify ----

pub fn distribution_table(dist: &LabelDistribution) -> Result<Table> {
    let mut t = Table::new(["set", "label", "count", "percent", "excluded"]);
    for (set, counts) in &dist.per_set {
        for label in Label::all(dist.task) {
            t.push([
                set.label().to_string(),
                label.to_string(),
                counts.counts[label].to_string(),
                fmt_opt(counts.share(*label).percent(), 1),
                counts.excluded.to_string(),
            ])?;
        }
    }
    Ok(t)
}

fn discipline_table(dist: &LabelDistribution) -> Result<Table> {
    let mut t = Table::new(["set", "discipline", "label", "count", "percent"]);
    for ((set, disc), counts) in &dist.per_discipline {
        for label in Label::all(dist.task) {
            t.push([
                set.label().to_string(),
                disc.to_string(),
                label.to_string(),
                counts.counts[label].to_string(),
                fmt_opt(counts.share(*label).percent(), 1),
            ])?;
        }
    }
    Ok(t)
}

fn label_tables(out: &mut Outcome, dir: &Path, prefix: &str, sets: &ContextSets, labels: &LabelStore) -> Result<()> {
    for task in [Task::Intent, Task::Sentiment] {
        let dist = label_distribution(sets, labels, task);
        out.csv(dir, &format!("{prefix}_{task}.csv"), &distribution_table(&dist)?)?;
        out.csv(dir, &format!("{prefix}_{task}_by_discipline.csv"), &discipline_table(&dist)?)?;
    }
    Ok(())
}

fn classify_tables(cfg: &RunConfig, out: &mut Outcome, dir: &Path, sets: &ContextSets) -> Result<()> {
    let sc = StrategyConfig {
        path: cfg.lexicon.clone(),
    };
    let classifier = classifier_registry().create(&cfg.classifier, &sc)?;
    let mut labels = classify_sets(sets, Task::Intent, classifier.as_ref())?;
    let sentiment = classify_sets(sets, Task::Sentiment, classifier.as_ref())?;
    for set in ContextSet::ALL {
        for r in sets.get(set) {
            if let Some(l) = sentiment.get(&r.key(), Task::Sentiment) {
                labels.insert(r.key(), l);
            }
        }
    }
    let path = dir.join("labels.csv");
    let mut w = create(&path)?;
    labels.write_csv(&mut w)?;
    w.flush().map_err(|e| Error::file(&path, e))?;
    out.written.push(path);
    label_tables(out, dir, "distribution", sets, &labels)?;

    if let Some(path) = &cfg.labels {
        let imported = import_labels(open(path)?, cfg.sentiment_scheme)?;
        out.note(format!("imported {} labels", imported.len()));
        label_tables(out, dir, "imported", sets, &imported)?;
    }
    Ok(())
}

pub fn run_classify(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);
    let sets = extract_context_sets(&docs, &det, cfg.seed);
    let mut out = Outcome::default();
    classify_tables(cfg, &mut out, dir, &sets)?;
    Ok(out)
}

// ---- report ----

/// Every stage whose inputs are configured, sharing one load and one
/// detection pass.
pub fn run_report(cfg: &RunConfig) -> Result<Outcome> {
    let reg = load_registry(cfg)?;
    let (docs, _) = load_docs(cfg)?;
    let store = cfg.metadata.as_ref().map(|_| load_store(cfg)).transpose()?;
    let map = cfg.territory.as_ref().map(|_| load_territory(cfg)).transpose()?;
    let pairs = cfg.pairs.as_deref().map(|p| open(p).and_then(load_pairs)).transpose()?;
    let dir = ensure_out(cfg)?;
    let det = detect(cfg, &reg, &docs);

    let mut out = Outcome::default();
    write_detections(&mut out, dir, &det)?;
    prevalence_tables(cfg, &mut out, dir, &reg, &docs, &det)?;
    let sets = match (&store, &map) {
        (Some(store), Some(map)) => usage_tables(cfg, &mut out, dir, &docs, &det, store, map)?,
        _ => {
            let sets = extract_context_sets(&docs, &det, cfg.seed);
            write_contexts(&mut out, dir, &sets)?;
            sets
        }
    };
    classify_tables(cfg, &mut out, dir, &sets)?;
    match &store {
        Some(store) => impact_tables(cfg, &mut out, dir, &docs, &det, store)?,
        None => {
            let (_, t) = sample_table(cfg, &docs, &det)?;
            out.csv(dir, "random_set.csv", &t)?;
        }
    }
    if let Some(pairs) = &pairs {
        pair_tables(&mut out, dir, &reg, cfg, pairs)?;
    }
    Ok(out)
}
