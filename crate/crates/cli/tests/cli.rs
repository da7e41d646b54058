use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use xling_core::languages::LanguageRegistry;
use xling_core::synth::{generate, SynthConfig};

fn xling(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xling"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus(dir: &Path) -> PathBuf {
    let cfg = SynthConfig {
        docs: 120,
        marker_rate: 0.1,
        ..SynthConfig::default()
    };
    generate(&cfg, &LanguageRegistry::builtin()).write_dir(dir).unwrap();
    dir.to_path_buf()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn detect_writes_detections_and_tokens() {
    let tmp = tempfile::tempdir().unwrap();
    let data = corpus(&tmp.path().join("data"));
    let out = tmp.path().join("o");
    let r = xling(&["detect", "--docs", s(&data.join("docs.jsonl")), "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("detections.jsonl").exists());
    let tokens = fs::read_to_string(out.join("tokens.csv")).unwrap();
    assert!(tokens.starts_with("token,count\n"));
}

#[test]
fn missing_input_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.jsonl");
    let r = xling(&["detect", "--docs", s(&missing), "--out", s(tmp.path())]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("nope.jsonl"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let r = xling(&["detect", "--frobnicate"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("Usage"));
}

#[test]
fn unknown_strategy_lists_the_available_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let data = corpus(&tmp.path().join("data"));
    let r = xling(&[
        "classify",
        "--docs",
        s(&data.join("docs.jsonl")),
        "--classifier",
        "neural",
        "--out",
        s(&tmp.path().join("o")),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("available: lexicon"));
}

#[test]
fn too_many_invalid_lines_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let docs = tmp.path().join("docs.jsonl");
    fs::write(
        &docs,
        "{\"doc_id\":\"a\",\"discipline\":\"math\",\"year\":2000}\nnot json\n",
    )
    .unwrap();
    let r = xling(&["detect", "--docs", s(&docs), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(2));
    let r = xling(&[
        "detect",
        "--docs",
        s(&docs),
        "--validation",
        "abort",
        "--out",
        s(&tmp.path().join("o")),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn sample_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = corpus(&tmp.path().join("data"));
    let docs = data.join("docs.jsonl");
    let run = |dir: &str| {
        let out = tmp.path().join(dir);
        let r = xling(&["sample", "--docs", s(&docs), "--seed", "7", "--out", s(&out)]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        fs::read(out.join("random_set.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn stats_subcommands_write_their_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let data = corpus(&tmp.path().join("data"));
    let out = tmp.path().join("o");
    let (docs, meta, terr) = (data.join("docs.jsonl"), data.join("metadata.jsonl"), data.join("territory.csv"));
    let base = [
        "--docs",
        s(&docs),
        "--metadata",
        s(&meta),
        "--territory",
        s(&terr),
        "--out",
        s(&out),
    ];
    for (cmd, files) in [
        (vec!["stats", "prevalence"], vec!["prevalence.csv", "xlinguality_hist.csv", "unmarked_report.csv"]),
        (vec!["stats", "usage"], vec!["selfcite.csv", "geo_abs.csv", "geo_rel.csv", "contexts_mixed.jsonl"]),
        (vec!["stats", "impact"], vec!["impact.csv", "resolution.csv", "random_set.csv"]),
        (vec!["resolve"], vec!["resolution_summary.csv"]),
        (vec!["classify"], vec!["labels.csv", "distribution_intent.csv"]),
    ] {
        let mut args = cmd.clone();
        args.extend(base);
        let r = xling(&args);
        assert!(r.status.success(), "{cmd:?}: {}", String::from_utf8_lossy(&r.stderr));
        for f in files {
            assert!(out.join(f).exists(), "{cmd:?} did not write {f}");
        }
    }
    let geo = fs::read_to_string(out.join("geo_abs.csv")).unwrap();
    assert!(geo.starts_with("cited_language,"));
}

#[test]
fn diff_pairs_from_jsonl() {
    let tmp = tempfile::tempdir().unwrap();
    let pairs = tmp.path().join("pairs.jsonl");
    fs::write(
        &pairs,
        concat!(
            r#"{"pair_id":"p1","pre_refs":["A (in Russian)","B"],"pub_refs":["A (in Russian)","B"]}"#,
            "\n",
            r#"{"pair_id":"p2","pre_refs":["A (in Russian)"],"pub_refs":["A"]}"#,
            "\n"
        ),
    )
    .unwrap();
    let out = tmp.path().join("o");
    let r = xling(&["diff-pairs", "--pairs", s(&pairs), "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(
        fs::read_to_string(out.join("pair_diff.csv")).unwrap(),
        "evaluation,pairs,increased,decreased,mean,sd\npairs,2,0,1,-0.50,0.500\n"
    );
}
