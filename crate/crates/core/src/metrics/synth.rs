use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::MetricsError;
use crate::ingest::{default_stopwords, Corpus, DocFormat, DomainRules, RawDocument, RulesFile, SourceType};

/// Parameters of a generated corpus. The defaults give roughly the node-type
/// proportions of a mid-size industrial graph: about 9% FC and 54% PE once
/// linking nodes are counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub failure_cases: usize,
    pub project_elements: usize,
    pub product_specs: usize,
    pub pe_roots: usize,
    /// Rough branching factor of the element hierarchy.
    pub pe_fanout: usize,
    /// Probability that a given pair of failure cases shares a planted trigram.
    pub shared_trigram_prob: f64,
    /// Upper bound on element names mentioned by one failure case.
    pub mentions_per_fc: usize,
    /// Mentions are drawn from this many elements at the top of the hierarchy.
    pub mention_pool: usize,
    /// Number of distinct pseudo-words available to the generator.
    pub vocabulary_size: usize,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            seed: 1,
            failure_cases: 43,
            project_elements: 257,
            product_specs: 0,
            pe_roots: 4,
            pe_fanout: 4,
            shared_trigram_prob: 0.025,
            mentions_per_fc: 2,
            mention_pool: 48,
            vocabulary_size: 20_000,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |m: &str| Err(MetricsError::InvalidSpec(m.to_owned()));
        if !(0.0..=1.0).contains(&self.shared_trigram_prob) {
            return bad("shared_trigram_prob must lie in [0, 1]");
        }
        if self.project_elements > 0 && (self.pe_roots == 0 || self.pe_roots > self.project_elements) {
            return bad("pe_roots must be between 1 and project_elements");
        }
        if self.pe_fanout == 0 {
            return bad("pe_fanout must be positive");
        }
        if self.mentions_per_fc > 0 && self.project_elements > 0 && self.mention_pool == 0 {
            return bad("mention_pool must be positive");
        }
        Ok(())
    }
}

/// A generated corpus held in memory: manifest-relative paths and contents.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCorpus {
    pub files: Vec<(String, String)>,
    entries: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    id: String,
    source_type: SourceType,
    format: DocFormat,
    path: String,
}

pub const MANIFEST_FILE: &str = "manifest.json";
const RULES_FILE: &str = "rules.json";

impl GeneratedCorpus {
    /// Writes every file under `dir`, creating subdirectories as needed.
    pub fn write(&self, dir: &Path) -> Result<(), MetricsError> {
        for (rel, content) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, content)?;
        }
        Ok(())
    }

    /// The same documents as `write` followed by `load_corpus` would give,
    /// without touching the filesystem.
    pub fn corpus(&self) -> Result<Corpus, MetricsError> {
        let content = |p: &str| self.files.iter().find(|(rel, _)| rel == p).map(|(_, c)| c.clone());
        let mut documents = Vec::new();
        for e in &self.entries {
            let text = content(&e.path).unwrap_or_default();
            let mut doc = RawDocument::new(e.id.clone(), e.source_type, e.format, text)?;
            doc.metadata.insert("path".into(), e.path.clone());
            documents.push(doc);
        }
        Ok(Corpus {
            documents,
            rules: DomainRules::default(),
        })
    }
}

/// Mints stem-stable pseudo-words (consonant-vowel syllables ending in a, o
/// or u) without repetition.
struct Lexicon {
    used: BTreeSet<String>,
    stopwords: BTreeSet<String>,
    stemmer: Stemmer,
    cap: usize,
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";
const FINALS: &[u8] = b"aou";

impl Lexicon {
    fn new(cap: usize) -> Lexicon {
        Lexicon {
            used: BTreeSet::new(),
            stopwords: default_stopwords(),
            stemmer: Stemmer::create(Algorithm::English),
            cap,
        }
    }

    fn mint(&mut self, rng: &mut ChaCha8Rng) -> Result<String, MetricsError> {
        if self.used.len() >= self.cap {
            return Err(MetricsError::InvalidSpec(format!(
                "vocabulary_size {} exhausted",
                self.cap
            )));
        }
        loop {
            let mut w = String::with_capacity(6);
            for i in 0..3 {
                w.push(*CONSONANTS.choose(rng).unwrap() as char);
                let vowels = if i == 2 { FINALS } else { VOWELS };
                w.push(*vowels.choose(rng).unwrap() as char);
            }
            if self.stopwords.contains(&w) || self.stemmer.stem(&w) != w.as_str() {
                continue;
            }
            if self.used.insert(w.clone()) {
                return Ok(w);
            }
        }
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

struct PeNode {
    id: String,
    word: String,
    filler: String,
    parent: Option<usize>,
    children: Vec<usize>,
}

fn pe_json(nodes: &[PeNode], i: usize) -> serde_json::Value {
    let n = &nodes[i];
    let description = match n.parent {
        Some(p) => format!("{} of the {}.", capitalize(&n.filler), nodes[p].word),
        None => format!("{}.", capitalize(&n.filler)),
    };
    json!({
        "id": n.id,
        "name": capitalize(&n.word),
        "description": description,
        "children": n.children.iter().map(|&c| pe_json(nodes, c)).collect::<Vec<_>>(),
    })
}

/// Deterministic corpus: failure-case texts with planted shared trigrams and
/// element-name mentions, an element hierarchy, and optional spec tables.
///
/// Failure cases otherwise use only private words, so two of them share at
/// most `mentions_per_fc` unigrams unless a trigram was planted between them.
pub fn generate_synthetic_corpus(spec: &SyntheticSpec) -> Result<GeneratedCorpus, MetricsError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut lex = Lexicon::new(spec.vocabulary_size);
    let mut files = Vec::new();
    let mut entries = Vec::new();

    // element hierarchy; parents always precede children
    let mut pe: Vec<PeNode> = Vec::with_capacity(spec.project_elements);
    for k in 0..spec.project_elements {
        let parent = (k >= spec.pe_roots).then(|| {
            let span = spec.pe_roots.max(k.div_ceil(spec.pe_fanout));
            rng.gen_range(0..span)
        });
        pe.push(PeNode {
            id: format!("PE{:04}", k + 1),
            word: lex.mint(&mut rng)?,
            filler: lex.mint(&mut rng)?,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            pe[p].children.push(k);
        }
    }

    let n_fc = spec.failure_cases;
    let mut fc_sentences: Vec<Vec<String>> = vec![Vec::new(); n_fc];
    for sentences in fc_sentences.iter_mut() {
        let sig = [lex.mint(&mut rng)?, lex.mint(&mut rng)?];
        let f = [lex.mint(&mut rng)?, lex.mint(&mut rng)?, lex.mint(&mut rng)?];
        sentences.push(format!("{} {} {}.", capitalize(&sig[0]), sig[1], f[0]));
        sentences.push(format!(
            "The {} and {} {} in the {} {} {}.",
            sig[0], sig[1], f[1], sig[0], sig[1], f[2]
        ));
        if !pe.is_empty() && spec.mentions_per_fc > 0 {
            let pool = spec.mention_pool.min(pe.len());
            let count = rng.gen_range(1..=spec.mentions_per_fc);
            let mut picked: Vec<usize> = (0..pool).collect::<Vec<_>>();
            picked.shuffle(&mut rng);
            picked.truncate(count);
            picked.sort_unstable();
            for m in picked {
                let (a, b) = (lex.mint(&mut rng)?, lex.mint(&mut rng)?);
                sentences.push(format!("{} on the {} was {}.", capitalize(&a), pe[m].word, b));
            }
        }
    }
    for i in 0..n_fc {
        for j in i + 1..n_fc {
            if rng.gen_bool(spec.shared_trigram_prob) {
                let t = [lex.mint(&mut rng)?, lex.mint(&mut rng)?, lex.mint(&mut rng)?];
                for k in [i, j] {
                    let tail = lex.mint(&mut rng)?;
                    fc_sentences[k].push(format!("{} {} {} at {}.", capitalize(&t[0]), t[1], t[2], tail));
                }
            }
        }
    }

    for (i, sentences) in fc_sentences.iter().enumerate() {
        let id = format!("FC{:03}", i + 1);
        let path = format!("fc/{id}.txt");
        files.push((path.clone(), sentences.join("\n") + "\n"));
        entries.push(Entry {
            id,
            source_type: SourceType::FailureCase,
            format: DocFormat::PlainText,
            path,
        });
    }

    for r in (0..pe.len()).filter(|&r| pe[r].parent.is_none()) {
        let id = format!("tree{}", r + 1);
        let path = format!("pe/{id}.json");
        let mut text = serde_json::to_string_pretty(&pe_json(&pe, r)).expect("tree serializes");
        text.push('\n');
        files.push((path.clone(), text));
        entries.push(Entry {
            id,
            source_type: SourceType::ProjectElement,
            format: DocFormat::ElementTree,
            path,
        });
    }

    for s in 0..spec.product_specs {
        let id = format!("PS{:03}", s + 1);
        let path = format!("ps/{id}.tsv");
        let mut text = String::from("parameter\tvalue\n");
        for _ in 0..3 {
            let label = lex.mint(&mut rng)?;
            let value = lex.mint(&mut rng)?;
            match pe.choose(&mut rng) {
                Some(m) => text.push_str(&format!("{label}\t{} {value}\n", m.word)),
                None => text.push_str(&format!("{label}\t{value}\n")),
            }
        }
        files.push((path.clone(), text));
        entries.push(Entry {
            id,
            source_type: SourceType::ProductSpec,
            format: DocFormat::LabeledTable,
            path,
        });
    }

    let mut rules = serde_json::to_string_pretty(&RulesFile::default()).expect("rules serialize");
    rules.push('\n');
    files.push((RULES_FILE.into(), rules));

    let manifest = json!({
        "rules": RULES_FILE,
        "documents": entries.iter().map(|e| json!({
            "id": e.id,
            "type": e.source_type,
            "format": e.format,
            "path": e.path,
        })).collect::<Vec<_>>(),
    });
    let mut manifest = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest.push('\n');
    files.push((MANIFEST_FILE.into(), manifest));

    Ok(GeneratedCorpus { files, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::load_corpus;
    use crate::kgraph::{build_from_corpus, EdgeCategory, GraphConfig, NodeType};

    fn small(p: f64) -> SyntheticSpec {
        SyntheticSpec {
            failure_cases: 10,
            project_elements: 20,
            pe_roots: 2,
            shared_trigram_prob: p,
            mention_pool: 8,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = generate_synthetic_corpus(&small(0.2)).unwrap();
        let b = generate_synthetic_corpus(&small(0.2)).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic_corpus(&SyntheticSpec { seed: 2, ..small(0.2) }).unwrap();
        assert_ne!(a.files, c.files);
    }

    #[test]
    fn no_planted_trigrams_no_fc_edges() {
        let g = build_from_corpus(
            &generate_synthetic_corpus(&small(0.0)).unwrap().corpus().unwrap(),
            &GraphConfig::default(),
        )
        .unwrap();
        assert_eq!(g.count_nodes(NodeType::FC), 10);
        assert_eq!(g.count_edges(EdgeCategory::FcFc), 0);
    }

    #[test]
    fn certain_trigrams_link_every_pair() {
        let g = build_from_corpus(
            &generate_synthetic_corpus(&small(1.0)).unwrap().corpus().unwrap(),
            &GraphConfig::default(),
        )
        .unwrap();
        assert_eq!(g.count_edges(EdgeCategory::FcFc), 10 * 9 / 2);
        assert!(g.edges().iter().filter(|e| e.category == EdgeCategory::FcFc).all(|e| e.weight == 1.0));
    }

    #[test]
    fn written_corpus_matches_in_memory() {
        let gen = generate_synthetic_corpus(&SyntheticSpec { product_specs: 3, ..small(0.3) }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        gen.write(dir.path()).unwrap();
        let loaded = load_corpus(&dir.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(loaded.documents, gen.corpus().unwrap().documents);
        let g = build_from_corpus(&loaded, &GraphConfig::default()).unwrap();
        assert_eq!(g.count_nodes(NodeType::PE), 20);
        assert_eq!(g.count_nodes(NodeType::PS), 3);
        assert_eq!(g.count_edges(EdgeCategory::PePe), 18);
    }

    #[test]
    fn minted_words_survive_normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut lex = Lexicon::new(500);
        let stemmer = Stemmer::create(Algorithm::English);
        for _ in 0..500 {
            let w = lex.mint(&mut rng).unwrap();
            assert_eq!(stemmer.stem(&w), w.as_str());
        }
        assert!(lex.mint(&mut rng).is_err());
    }

    #[test]
    fn default_proportions() {
        let g = build_from_corpus(
            &generate_synthetic_corpus(&SyntheticSpec::default()).unwrap().corpus().unwrap(),
            &GraphConfig::default(),
        )
        .unwrap();
        let total = g.node_count() as f64;
        let fc = g.count_nodes(NodeType::FC) as f64 / total;
        let pe = g.count_nodes(NodeType::PE) as f64 / total;
        assert!((0.08..=0.10).contains(&fc), "FC share {fc}");
        assert!((0.50..=0.58).contains(&pe), "PE share {pe}");
    }

    #[test]
    fn invalid_specs() {
        assert!(SyntheticSpec { shared_trigram_prob: 1.5, ..small(0.0) }.validate().is_err());
        assert!(SyntheticSpec { pe_roots: 0, ..small(0.0) }.validate().is_err());
    }
}
