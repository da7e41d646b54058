//! Writes a synthetic corpus: `synth_corpus <dir> [docs] [seed]`.

use std::path::PathBuf;

use xling_core::languages::LanguageRegistry;
use xling_core::synth::{generate, SynthConfig};

fn main() -> xling_core::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "synth".into()));
    let docs = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = SynthConfig {
        docs,
        seed,
        ..SynthConfig::default()
    };
    let corpus = generate(&cfg, &LanguageRegistry::builtin());
    corpus.write_dir(&dir)?;
    eprintln!(
        "{} documents, {} references, {} planted markers in {}",
        corpus.docs.len(),
        corpus.total_refs(),
        corpus.truth.len(),
        dir.display()
    );
    Ok(())
}
