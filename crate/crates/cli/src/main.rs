use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xling_core::classify::SentimentScheme;
use xling_core::corpus::Severity;
use xling_core::report::{self, Outcome, RunConfig};
use xling_core::Error;

#[derive(Parser, Debug)]
#[command(name = "xling", version, about = "Find and analyse citations to non-English publications")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect explicitly marked cross-lingual references
    Detect,
    /// Compute statistics
    #[command(subcommand)]
    Stats(Stats),
    /// Draw a random document set matching the cross-lingual set per year and discipline
    Sample,
    /// Resolve references to metadata records and report failure rates
    Resolve,
    /// Compare cross-lingual references of preprint/published pairs
    DiffPairs,
    /// Label the citation context sets and report class distributions
    Classify,
    /// Run every stage whose inputs are given
    Report,
}

#[derive(Subcommand, Debug)]
enum Stats {
    /// Prevalence, cross-linguality and unmarked-reference estimates
    Prevalence,
    /// Self-citation, geographic origin and citation contexts
    Usage,
    /// Random comparison set, citations received and resolution rates
    Impact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Validation {
    Abort,
    Skip,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scheme {
    ThreeClass,
    TwoClass,
}

#[derive(Args, Debug)]
struct Common {
    /// Documents JSONL
    #[arg(long, global = true)]
    docs: Option<PathBuf>,
    /// Metadata records JSONL
    #[arg(long, global = true)]
    metadata: Option<PathBuf>,
    /// Country to language CSV
    #[arg(long, global = true)]
    territory: Option<PathBuf>,
    /// Language registry CSV (defaults to the built-in one)
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Imported context labels CSV
    #[arg(long, global = true)]
    labels: Option<PathBuf>,
    /// Preprint/published pairs JSONL
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    /// Cue lexicon CSV for the lexicon classifier
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,
    /// Journals per language CSV, for the registry coverage table
    #[arg(long, global = true)]
    journal_counts: Option<PathBuf>,
    /// Titles with gold languages, for evaluating the title identifier
    #[arg(long, global = true)]
    labeled_sample: Option<PathBuf>,
    /// Data file for the title identifier (the `lookup` identifier needs one)
    #[arg(long, global = true)]
    identifier_data: Option<PathBuf>,
    /// Output directory, created if absent
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also accept "(In Language)"
    #[arg(long, global = true)]
    marker_case_insensitive: bool,
    /// What to do with invalid document lines
    #[arg(long, global = true, value_enum, default_value = "skip")]
    validation: Validation,
    /// Inclusive citation-count window "LO-HI", or "none"
    #[arg(long, global = true, default_value = "1-100", value_parser = parse_window)]
    citation_window: Window,
    #[arg(long, global = true, default_value = "script")]
    identifier: String,
    #[arg(long, global = true, default_value = "lexicon")]
    classifier: String,
    #[arg(long, global = true, default_value = "exact-title")]
    matcher: String,
    /// Label scheme of imported sentiment labels
    #[arg(long, global = true, value_enum, default_value = "three-class")]
    sentiment_scheme: Scheme,
}

#[derive(Clone, Copy, Debug)]
struct Window(Option<(u64, u64)>);

fn parse_window(s: &str) -> Result<Window, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Window(None));
    }
    let (lo, hi) = s
        .split_once('-')
        .ok_or_else(|| format!("expected LO-HI, got {s:?}"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("{hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}-{hi}"));
    }
    Ok(Window(Some((lo, hi))))
}

impl From<Common> for RunConfig {
    fn from(c: Common) -> Self {
        RunConfig {
            docs: c.docs,
            metadata: c.metadata,
            territory: c.territory,
            registry: c.registry,
            labels: c.labels,
            pairs: c.pairs,
            lexicon: c.lexicon,
            journal_counts: c.journal_counts,
            labeled_sample: c.labeled_sample,
            identifier_data: c.identifier_data,
            out: c.out,
            seed: c.seed,
            marker_case_insensitive: c.marker_case_insensitive,
            severity: match c.validation {
                Validation::Abort => Severity::Abort,
                Validation::Skip => Severity::Skip,
            },
            citation_window: c.citation_window.0,
            identifier: c.identifier,
            classifier: c.classifier,
            matcher: c.matcher,
            sentiment_scheme: match c.sentiment_scheme {
                Scheme::ThreeClass => SentimentScheme::ThreeClass,
                Scheme::TwoClass => SentimentScheme::TwoClass,
            },
        }
    }
}

fn run(command: &Command, cfg: &RunConfig) -> xling_core::Result<Outcome> {
    match command {
        Command::Detect => report::run_detect(cfg),
        Command::Stats(Stats::Prevalence) => report::run_prevalence(cfg),
        Command::Stats(Stats::Usage) => report::run_usage(cfg),
        Command::Stats(Stats::Impact) => report::run_impact(cfg),
        Command::Sample => report::run_sample(cfg),
        Command::Resolve => report::run_resolve(cfg),
        Command::DiffPairs => report::run_diff_pairs(cfg),
        Command::Classify => report::run_classify(cfg),
        Command::Report => report::run_report(cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = RunConfig::from(cli.common);
    match run(&cli.command, &cfg) {
        Ok(outcome) => {
            for line in &outcome.summary {
                eprintln!("{line}");
            }
            eprintln!("wrote {} files to {}", outcome.written.len(), cfg.out.display());
            ExitCode::SUCCESS
        }
        Err(e @ Error::ValidationThreshold { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
