//! Seeded synthetic corpora with known ground truth.
//!
//! The generator plants explicit language markers (with whitespace variants
//! and registry misspellings), marker-shaped decoys that must not be
//! detected, citing sentences, author lists with controlled overlap, and a
//! metadata store in which a fixed share of cited titles cannot be matched.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::codes::{CountryCode, LangCode};
use crate::corpus::{
    AffiliationCountry, Author, Discipline, Document, InTextCitation, MetadataRecord, MetadataStore,
    ReferenceEntry, TerritoryLanguageMap,
};
use crate::error::{Error, Result};
use crate::languages::LanguageRegistry;
use crate::sampling::{sample_sorted, seeded_rng, SeededRng};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub docs: usize,
    pub refs_per_doc: usize,
    pub contexts_per_doc: usize,
    /// Chance that a reference carries a language marker.
    pub marker_rate: f64,
    /// Chance that a planted marker uses a misspelled language name.
    pub misspelling_rate: f64,
    /// Chance that an unmarked reference carries a marker-shaped decoy.
    pub decoy_rate: f64,
    /// Exact share of references whose cited record has an unmatchable title.
    pub unmatchable_fraction: f64,
    /// Chance that a cited record shares an author id with the citing paper.
    pub id_self_citation_rate: f64,
    /// Chance that a cited record shares only an author name.
    pub name_self_citation_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            docs: 200,
            refs_per_doc: 20,
            contexts_per_doc: 12,
            marker_rate: 0.05,
            misspelling_rate: 0.1,
            decoy_rate: 0.05,
            unmatchable_fraction: 0.3,
            id_self_citation_rate: 0.05,
            name_self_citation_rate: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub docs: Vec<Document>,
    /// Citing records (keyed by doc id), cited records and published versions.
    pub metadata: Vec<MetadataRecord>,
    pub territory: TerritoryLanguageMap,
    /// Every planted marker: (doc_id, ref_index) → language.
    pub truth: BTreeMap<(String, usize), LangCode>,
    /// References whose cited record title was made unmatchable.
    pub unmatchable: BTreeSet<(String, usize)>,
}

impl SynthCorpus {
    pub fn store(&self) -> MetadataStore {
        let mut store = MetadataStore::new();
        for r in &self.metadata {
            store.insert(r.clone()).expect("generated ids are unique");
        }
        store
    }

    pub fn total_refs(&self) -> usize {
        self.docs.iter().map(|d| d.references.len()).sum()
    }

    /// Writes `docs.jsonl`, `metadata.jsonl` and `territory.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
        write_jsonl(&dir.join("docs.jsonl"), &self.docs)?;
        write_jsonl(&dir.join("metadata.jsonl"), &self.metadata)?;
        let path = dir.join("territory.csv");
        let mut out = BufWriter::new(File::create(&path).map_err(|e| Error::file(&path, e))?);
        writeln!(out, "country_code,language_code")?;
        for (c, l) in self.territory.iter() {
            writeln!(out, "{c},{l}")?;
        }
        out.flush()?;
        Ok(())
    }
}

fn write_jsonl<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::file(path, e))?);
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Cited-language mix, roughly shaped like a real corpus.
const LANGUAGE_WEIGHTS: [(&str, u32); 12] = [
    ("ru", 60),
    ("zh", 8),
    ("ja", 7),
    ("de", 6),
    ("fr", 5),
    ("uk", 4),
    ("pl", 2),
    ("pt", 2),
    ("es", 2),
    ("it", 2),
    ("ko", 1),
    ("bg", 1),
];

const COUNTRIES: [(&str, &str); 14] = [
    ("RU", "ru"),
    ("UA", "uk"),
    ("CN", "zh"),
    ("JP", "ja"),
    ("KR", "ko"),
    ("DE", "de"),
    ("FR", "fr"),
    ("PL", "pl"),
    ("BR", "pt"),
    ("ES", "es"),
    ("IT", "it"),
    ("US", "en"),
    ("GB", "en"),
    ("BG", "bg"),
];

/// Appears in affiliations but not in the territory map.
const UNMAPPED_COUNTRY: &str = "ZZ";

const DECOYS: [&str; 7] = [
    "(in press)",
    "(in preparation)",
    "(in print)",
    "(In Russian)",
    "(in RUSSIAN)",
    "(in English)",
    "(to appear in Russian Math. Surveys)",
];

const MARKER_FORMS: [&str; 5] = ["(in {})", "( in {} )", "(in  {})", "(in\t{})", "(in {} )"];

const SURNAMES: [&str; 24] = [
    "Ivanov", "Petrov", "Smirnov", "Kuznetsov", "Tanaka", "Suzuki", "Wang", "Li", "Zhang", "Muller",
    "Schmidt", "Dubois", "Martin", "Kowalski", "Silva", "Garcia", "Rossi", "Kim", "Smith", "Jones",
    "Brown", "Novak", "Horvath", "Popescu",
];
const INITIALS: &str = "ABCDEGIKLMNOPRSTVY";

const WORDS: [&str; 24] = [
    "spectral", "asymptotic", "invariant", "quantum", "stochastic", "boundary", "nonlinear",
    "discrete", "algebraic", "operator", "manifold", "entropy", "lattice", "kernel", "transport",
    "symmetry", "estimate", "equation", "dynamics", "geometry", "inequality", "resonance",
    "scattering", "topology",
];

const SENTENCES: [&str; 10] = [
    "We use the method of {} to compute the bound.",
    "For background on this problem see {}.",
    "Our results agree with those of {}.",
    "The seminal work {} introduced this setting.",
    "Following {}, we restrict to the compact case.",
    "However, the argument of {} does not extend here.",
    "Similar questions were studied in {}.",
    "This outperforms the estimate in {}.",
    "A limitation of {} is the smoothness assumption.",
    "The construction is based on the approach of {}.",
];

fn serial(mut n: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

/// Latin letters replaced by Cyrillic ones: a title nobody would match
/// against its Latin rendering.
fn cyrillic(title: &str) -> String {
    title
        .chars()
        .map(|c| match c.to_ascii_lowercase() {
            'a' => 'а',
            'b' => 'б',
            'c' => 'ц',
            'd' => 'д',
            'e' => 'е',
            'f' => 'ф',
            'g' => 'г',
            'h' => 'х',
            'i' => 'и',
            'j' => 'й',
            'k' | 'q' => 'к',
            'l' => 'л',
            'm' => 'м',
            'n' => 'н',
            'o' => 'о',
            'p' => 'п',
            'r' => 'р',
            's' => 'с',
            't' => 'т',
            'u' => 'у',
            'v' | 'w' => 'в',
            'x' => 'ж',
            'y' => 'ы',
            'z' => 'з',
            other => other,
        })
        .collect()
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn random_author(rng: &mut SeededRng) -> Author {
    let surname = SURNAMES.choose(rng).expect("non-empty");
    let initial = INITIALS.as_bytes()[rng.random_range(0..INITIALS.len())] as char;
    Author {
        author_id: Some(format!("a{}", rng.random_range(0..1_000_000u32))),
        name: format!("{initial}. {surname}"),
    }
}

fn pick_language(rng: &mut SeededRng) -> LangCode {
    let total: u32 = LANGUAGE_WEIGHTS.iter().map(|(_, w)| w).sum();
    let mut roll = rng.random_range(0..total);
    for (code, w) in LANGUAGE_WEIGHTS {
        if roll < w {
            return LangCode::new(code).expect("valid code");
        }
        roll -= w;
    }
    unreachable!("roll below total weight")
}

pub fn territory_map() -> TerritoryLanguageMap {
    COUNTRIES
        .iter()
        .map(|(c, l)| (CountryCode::new(c).expect("valid"), LangCode::new(l).expect("valid")))
        .collect()
}

pub fn generate(cfg: &SynthConfig, reg: &LanguageRegistry) -> SynthCorpus {
    let mut rng = seeded_rng(cfg.seed);
    let disciplines = [Discipline::Math, Discipline::Physics, Discipline::Cs];
    let misspellings: BTreeMap<LangCode, Vec<&str>> =
        reg.misspellings().fold(BTreeMap::new(), |mut m, (t, c)| {
            m.entry(c).or_insert_with(Vec::new).push(t);
            m
        });
    let mut corpus = SynthCorpus {
        docs: Vec::with_capacity(cfg.docs),
        metadata: Vec::new(),
        territory: territory_map(),
        truth: BTreeMap::new(),
        unmatchable: BTreeSet::new(),
    };
    let mut cited: Vec<MetadataRecord> = Vec::new();
    let mut title_no = 0usize;

    for d in 0..cfg.docs {
        let doc_id = format!("synth-{d:05}");
        let year = rng.random_range(2000..2020);
        let discipline = disciplines.choose(&mut rng).expect("non-empty").clone();

        let n_authors = rng.random_range(1..=3);
        let citing_authors: Vec<Author> = (0..n_authors).map(|_| random_author(&mut rng)).collect();
        let mut citing = MetadataRecord::new(&doc_id, format!("Paper {}", serial(d)));
        citing.year = Some(year);
        citing.citation_count = if rng.random_bool(0.1) {
            rng.random_range(100..1000)
        } else {
            rng.random_range(0..100)
        };
        for (pos, _) in citing_authors.iter().enumerate() {
            let code = if rng.random_bool(0.03) {
                UNMAPPED_COUNTRY
            } else {
                COUNTRIES.choose(&mut rng).expect("non-empty").0
            };
            citing.author_affiliation_countries.push(AffiliationCountry {
                author_position: pos,
                country: CountryCode::new(code).expect("valid"),
            });
        }
        citing.authors = citing_authors.clone();
        if rng.random_bool(0.6) {
            let pub_id = format!("pub-{d:05}");
            let mut published = MetadataRecord::new(&pub_id, format!("Published paper {}", serial(d)));
            published.authors = citing_authors.clone();
            citing.published_version_id = Some(pub_id);
            corpus.metadata.push(published);
        }
        corpus.metadata.push(citing);

        let mut references = Vec::with_capacity(cfg.refs_per_doc);
        for j in 0..cfg.refs_per_doc {
            let title = format!(
                "{} {} of the {} {}",
                capitalize(WORDS.choose(&mut rng).expect("non-empty")),
                WORDS.choose(&mut rng).expect("non-empty"),
                WORDS.choose(&mut rng).expect("non-empty"),
                serial(title_no)
            );
            title_no += 1;
            let author = random_author(&mut rng);
            let ref_year = rng.random_range(1950..2020);
            let mut raw = format!("{}, \"{}\", J. Math. {} ({})", author.name, title, rng.random_range(1..90), ref_year);

            if rng.random_bool(cfg.marker_rate) {
                let lang = pick_language(&mut rng);
                let name = match misspellings.get(&lang) {
                    Some(bad) if rng.random_bool(cfg.misspelling_rate) => {
                        bad.choose(&mut rng).expect("non-empty").to_string()
                    }
                    _ => {
                        let names = reg.names_for(lang);
                        names.choose(&mut rng).expect("canonical name").to_string()
                    }
                };
                let name = if rng.random_bool(0.8) { capitalize(&name) } else { name };
                let form = MARKER_FORMS.choose(&mut rng).expect("non-empty");
                raw.push(' ');
                raw.push_str(&form.replace("{}", &name));
                corpus.truth.insert((doc_id.clone(), j), lang);
            } else if rng.random_bool(cfg.decoy_rate) {
                raw.push(' ');
                raw.push_str(DECOYS.choose(&mut rng).expect("non-empty"));
            }
            raw.push('.');

            let meta_id = format!("c-{d:05}-{j:03}");
            let mut record = MetadataRecord::new(&meta_id, &title);
            record.year = Some(ref_year);
            let roll: f64 = rng.random();
            let first = if roll < cfg.id_self_citation_rate {
                citing_authors[0].clone()
            } else if roll < cfg.id_self_citation_rate + cfg.name_self_citation_rate {
                Author {
                    author_id: Some(format!("n{d}-{j}")),
                    name: citing_authors[0].name.clone(),
                }
            } else {
                author
            };
            record.authors = vec![first];
            cited.push(record);

            let mut entry = ReferenceEntry::new(j, raw);
            entry.cited_meta_id = Some(meta_id);
            entry.year = Some(ref_year);
            references.push(entry);
        }

        let mut contexts = Vec::with_capacity(cfg.contexts_per_doc);
        if !references.is_empty() {
            for s in 0..cfg.contexts_per_doc as u64 {
                let template = SENTENCES.choose(&mut rng).expect("non-empty");
                let r = rng.random_range(0..references.len());
                if r + 1 < references.len() && rng.random_bool(0.25) {
                    let text = template.replace("{}", &format!("[{},{}]", r + 1, r + 2));
                    for ref_index in [r, r + 1] {
                        contexts.push(InTextCitation {
                            sentence_id: s,
                            sentence_text: text.clone(),
                            ref_index,
                        });
                    }
                } else {
                    contexts.push(InTextCitation {
                        sentence_id: s,
                        sentence_text: template.replace("{}", &format!("[{}]", r + 1)),
                        ref_index: r,
                    });
                }
            }
        }

        corpus.docs.push(Document {
            doc_id,
            discipline,
            year,
            month: Some(rng.random_range(1..=12)),
            references,
            contexts,
        });
    }

    let total = cited.len();
    let k = (total as f64 * cfg.unmatchable_fraction).round() as usize;
    for i in sample_sorted(&mut rng, total, k.min(total)) {
        let (d, j) = (i / cfg.refs_per_doc, i % cfg.refs_per_doc);
        cited[i].title = cyrillic(&cited[i].title);
        corpus.unmatchable.insert((corpus.docs[d].doc_id.clone(), j));
    }
    corpus.metadata.extend(cited);
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marker::Detector;

    #[test]
    fn same_seed_same_corpus() {
        let reg = LanguageRegistry::builtin();
        let cfg = SynthConfig { docs: 20, ..SynthConfig::default() };
        let a = generate(&cfg, &reg);
        let b = generate(&cfg, &reg);
        assert_eq!(a.docs, b.docs);
        assert_eq!(a.truth, b.truth);
        for d in &a.docs {
            d.validate().unwrap();
        }
    }

    #[test]
    fn planted_markers_are_detected() {
        let reg = LanguageRegistry::builtin();
        let cfg = SynthConfig { docs: 50, marker_rate: 0.3, ..SynthConfig::default() };
        let c = generate(&cfg, &reg);
        let det = Detector::new(&reg).detect_corpus(&c.docs);
        let found: BTreeMap<(String, usize), LangCode> = det
            .iter()
            .map(|x| ((x.doc_id.clone(), x.ref_index), x.language))
            .collect();
        assert_eq!(found, c.truth);
    }

    #[test]
    fn unmatchable_share_is_exact() {
        let reg = LanguageRegistry::builtin();
        let cfg = SynthConfig { docs: 10, refs_per_doc: 10, ..SynthConfig::default() };
        let c = generate(&cfg, &reg);
        assert_eq!(c.unmatchable.len(), 30);
        assert_eq!(serial(0), "a");
        assert_eq!(serial(27), "bb");
    }
}
