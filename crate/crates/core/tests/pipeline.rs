use xling_core::classify::classifier_registry;
use xling_core::impact::{matcher_registry, resolution_rates};
use xling_core::languages::LanguageRegistry;
use xling_core::marker::Detector;
use xling_core::prevalence::prevalence_summary;
use xling_core::report::{self, RunConfig};
use xling_core::strategy::StrategyConfig;
use xling_core::synth::{generate, SynthConfig};
use xling_core::title::{evaluate_identifier, LabeledTitle, TitleLanguageIdentifier};
use xling_core::LangCode;

fn code(s: &str) -> LangCode {
    LangCode::new(s).unwrap()
}

/// Calls every other Latin title German, the way statistical identifiers
/// misfire on short English titles.
struct FlakyGerman;

impl TitleLanguageIdentifier for FlakyGerman {
    fn name(&self) -> &str {
        "flaky-german"
    }

    fn identify(&self, title: &str) -> Option<(LangCode, f64)> {
        let odd = title.bytes().map(u32::from).sum::<u32>() % 2 == 1;
        Some((if odd { code("de") } else { code("en") }, 0.9))
    }
}

#[test]
fn flaky_latin_identifier_scores_low_precision_for_german() {
    let reg = LanguageRegistry::builtin();
    let mut labeled: Vec<LabeledTitle> = (0..200)
        .map(|i| LabeledTitle {
            title: format!("Spectral bounds for operator family {i}"),
            gold: code("en"),
        })
        .collect();
    labeled.extend((0..10).map(|i| LabeledTitle {
        title: format!("Über die Theorie der Funktionen {i}"),
        gold: code("de"),
    }));
    let eval = evaluate_identifier(&labeled, Some(&FlakyGerman), &reg).unwrap();
    let de = eval.per_language[&code("de")];
    assert!(de.false_positives > 50);
    assert!(de.precision < 0.5, "precision {}", de.precision);
}

#[test]
fn synthetic_corpus_round_trips_through_the_loaders() {
    let reg = LanguageRegistry::builtin();
    let corpus = generate(&SynthConfig { docs: 40, seed: 3, ..SynthConfig::default() }, &reg);
    let dir = tempfile::tempdir().unwrap();
    corpus.write_dir(dir.path()).unwrap();
    let cfg = RunConfig {
        docs: Some(dir.path().join("docs.jsonl")),
        metadata: Some(dir.path().join("metadata.jsonl")),
        ..RunConfig::default()
    };
    let (docs, stats) = report::load_docs(&cfg).unwrap();
    assert_eq!(stats.skipped, 0);
    assert_eq!(docs, corpus.docs);
    let store = report::load_store(&cfg).unwrap();
    assert_eq!(store.len(), corpus.metadata.len());

    let found = Detector::new(&reg).detect_corpus(&docs);
    assert_eq!(found.len(), corpus.truth.len());
    let p = prevalence_summary(&docs, &found);
    assert!(p.refs.equals(corpus.truth.len() as u64, corpus.total_refs() as u64));

    let matcher = matcher_registry().create("exact-title", &StrategyConfig::default()).unwrap();
    let r = resolution_rates(&docs, &found, &store, matcher.as_ref());
    assert!(r.overall.equals(7, 10));
}

#[test]
fn registries_reject_unknown_names() {
    let err = classifier_registry()
        .create("transformer", &StrategyConfig::default())
        .err()
        .unwrap();
    assert!(err.to_string().contains("lexicon"), "{err}");
    assert!(matcher_registry().contains("exact-title"));
}
