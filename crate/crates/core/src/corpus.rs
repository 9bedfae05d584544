//! Corpus ingestion: tokenization, annotated-TSV parsing, and deterministic
//! train/test/validation splits.
//!
//! Two ingestion paths exist. Raw text (one sentence per line) goes through
//! [`tokenize`], which splits on whitespace, peels punctuation off token
//! edges, and fills lemmas with the lowercased surface. Pre-annotated text
//! goes through [`parse_annotated`], a 4-column TSV reader (surface, lemma,
//! upos, xpos) with blank lines between sentences.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single token with its annotation layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    /// Never empty; falls back to the lowercased surface.
    pub lemma: String,
    /// Coarse part-of-speech label; may be empty on the raw ingestion path.
    pub upos: String,
    /// Fine-grained tag; may be empty until a tag lexicon is applied.
    pub xpos: String,
    /// True for digit-like tokens and spelled-out numbers.
    pub is_numlike: bool,
    /// Set lazily by [`crate::embeddings::EmbeddingStore::mark_vocab`].
    pub in_embed_vocab: bool,
}

impl Token {
    /// Builds a token from a raw surface form: lemma defaults to the
    /// lowercased surface, tags are left empty.
    pub fn from_surface(surface: &str) -> Token {
        Token {
            lemma: surface.to_lowercase(),
            is_numlike: is_numlike(surface),
            surface: surface.to_string(),
            upos: String::new(),
            xpos: String::new(),
            in_embed_vocab: false,
        }
    }

    fn from_columns(surface: &str, lemma: &str, upos: &str, xpos: &str) -> Token {
        let lemma = if lemma.is_empty() {
            surface.to_lowercase()
        } else {
            lemma.to_string()
        };
        Token {
            is_numlike: is_numlike(surface),
            surface: surface.to_string(),
            lemma,
            upos: upos.to_string(),
            xpos: xpos.to_string(),
            in_embed_vocab: false,
        }
    }
}

/// One sentence; always holds at least one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub tokens: Vec<Token>,
    /// Opaque line identifier from the source file.
    pub source_id: String,
}

impl AnnotatedSentence {
    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// The two classes under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Mt,
    Ht,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Mt => write!(f, "MT"),
            Label::Ht => write!(f, "HT"),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s.to_ascii_uppercase().as_str() {
            "MT" => Ok(Label::Mt),
            "HT" => Ok(Label::Ht),
            other => Err(Error::InvalidConfig(format!(
                "unknown label {other:?}, expected MT or HT"
            ))),
        }
    }
}

/// Which partition a sentence was assigned to by [`LabeledCorpus::split`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
    Validation,
}

/// Requested split proportions, in train/test/validation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub test: f64,
    pub validation: f64,
}

impl SplitRatios {
    pub fn new(train: f64, test: f64, validation: f64) -> Result<SplitRatios> {
        let r = SplitRatios {
            train,
            test,
            validation,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.test, self.validation];
        if parts.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "split ratios must be positive, got {parts:?}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "split ratios must sum to 1, got {sum}"
            )));
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.7,
            test: 0.1,
            validation: 0.2,
        }
    }
}

/// A labeled collection of sentences with optional split tags.
#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    pub label: Label,
    pub sentences: Vec<AnnotatedSentence>,
    /// Parallel to `sentences` once [`LabeledCorpus::split`] has run.
    pub split_tags: Option<Vec<Split>>,
}

impl LabeledCorpus {
    pub fn new(label: Label, sentences: Vec<AnnotatedSentence>) -> LabeledCorpus {
        LabeledCorpus {
            label,
            sentences,
            split_tags: None,
        }
    }

    /// Tokenizes raw text, one sentence per line. Blank lines are skipped.
    pub fn from_raw_text(label: Label, text: &str) -> Result<LabeledCorpus> {
        let mut sentences = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if let Some(mut s) = tokenize(line) {
                s.source_id = (idx + 1).to_string();
                sentences.push(s);
            }
        }
        if sentences.is_empty() {
            return Err(Error::EmptyInput("no non-empty lines in input".into()));
        }
        Ok(LabeledCorpus::new(label, sentences))
    }

    pub fn from_raw_path(label: Label, path: &Path) -> Result<LabeledCorpus> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        LabeledCorpus::from_raw_text(label, &text)
    }

    pub fn from_annotated_path(label: Label, path: &Path) -> Result<LabeledCorpus> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(LabeledCorpus::new(label, parse_annotated(&text)?))
    }

    /// Loads a corpus file, dispatching on extension: `.tsv` is treated as
    /// annotated 4-column TSV, anything else as raw one-sentence-per-line.
    pub fn from_path_auto(label: Label, path: &Path) -> Result<LabeledCorpus> {
        let annotated = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("tsv"))
            .unwrap_or(false);
        if annotated {
            LabeledCorpus::from_annotated_path(label, path)
        } else {
            LabeledCorpus::from_raw_path(label, path)
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// All tokens of all sentences, in corpus order.
    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Sentences assigned to `split`; empty when the corpus is unsplit.
    pub fn subset(&self, split: Split) -> Vec<&AnnotatedSentence> {
        match &self.split_tags {
            None => Vec::new(),
            Some(tags) => self
                .sentences
                .iter()
                .zip(tags)
                .filter(|(_, &t)| t == split)
                .map(|(s, _)| s)
                .collect(),
        }
    }

    /// Assigns every sentence to a split. The assignment is a deterministic
    /// permutation keyed by `seed` followed by contiguous blocks sized by a
    /// largest-remainder rounding of the ratios, so identical
    /// (corpus, ratios, seed) inputs yield identical assignments.
    pub fn split(mut self, ratios: SplitRatios, seed: u64) -> Result<LabeledCorpus> {
        ratios.validate()?;
        let n = self.sentences.len();
        if n < 3 {
            return Err(Error::EmptyInput(format!(
                "need at least 3 sentences to split, got {n}"
            )));
        }

        let counts = apportion(n, &[ratios.train, ratios.test, ratios.validation]);

        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);

        let mut tags = vec![Split::Train; n];
        for (pos, &sentence_idx) in order.iter().enumerate() {
            tags[sentence_idx] = if pos < counts[0] {
                Split::Train
            } else if pos < counts[0] + counts[1] {
                Split::Test
            } else {
                Split::Validation
            };
        }
        self.split_tags = Some(tags);
        Ok(self)
    }

    /// JSON manifest describing a split: seed, ratios, and sorted
    /// per-split line-index arrays.
    pub fn split_manifest(&self, ratios: SplitRatios, seed: u64) -> Result<SplitManifest> {
        let tags = self
            .split_tags
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("corpus has not been split".into()))?;
        let mut manifest = SplitManifest {
            seed,
            ratios,
            train: Vec::new(),
            test: Vec::new(),
            validation: Vec::new(),
        };
        for (idx, tag) in tags.iter().enumerate() {
            match tag {
                Split::Train => manifest.train.push(idx),
                Split::Test => manifest.test.push(idx),
                Split::Validation => manifest.validation.push(idx),
            }
        }
        Ok(manifest)
    }
}

/// Serializable record of one split assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub ratios: SplitRatios,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Splits `n` items over parts proportional to `ratios` using largest
/// remainders, so the counts always sum to `n` and each count is within
/// one of `ratio * n`.
fn apportion(n: usize, ratios: &[f64]) -> Vec<usize> {
    let mut counts: Vec<usize> = ratios.iter().map(|r| (r * n as f64).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut remainders: Vec<(usize, f64)> = ratios
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r * n as f64 - counts[i] as f64))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for k in 0..(n - assigned) {
        counts[remainders[k % remainders.len()].0] += 1;
    }
    counts
}

/// Characters peeled off token edges by the tokenizer.
fn is_edge_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '«' | '»' | '„' | '“' | '”' | '‘' | '’' | '…' | '—' | '–' | '¿' | '¡'
        )
}

/// Whitespace-and-punctuation tokenization of one line.
///
/// Punctuation is split off at token edges; word-internal punctuation such
/// as hyphens, apostrophes, and decimal points is preserved. Returns `None`
/// for lines that are empty after trimming (the skip signal).
pub fn tokenize(line: &str) -> Option<AnnotatedSentence> {
    let mut tokens = Vec::new();
    for chunk in line.split_whitespace() {
        split_chunk(chunk, &mut tokens);
    }
    if tokens.is_empty() {
        return None;
    }
    Some(AnnotatedSentence {
        tokens,
        source_id: String::new(),
    })
}

fn split_chunk(chunk: &str, out: &mut Vec<Token>) {
    let mut rest = chunk;
    // leading punctuation, unless the whole remainder is a number like "-42"
    while !rest.is_empty() && !matches_digit_pattern(rest) {
        let c = rest.chars().next().unwrap();
        if !is_edge_punct(c) {
            break;
        }
        out.push(Token::from_surface(&c.to_string()));
        rest = &rest[c.len_utf8()..];
    }
    // trailing punctuation, collected then emitted in source order
    let mut trailing = Vec::new();
    while !rest.is_empty() && !matches_digit_pattern(rest) {
        let c = rest.chars().last().unwrap();
        if !is_edge_punct(c) {
            break;
        }
        trailing.push(c);
        rest = &rest[..rest.len() - c.len_utf8()];
    }
    if !rest.is_empty() {
        out.push(Token::from_surface(rest));
    }
    for c in trailing.into_iter().rev() {
        out.push(Token::from_surface(&c.to_string()));
    }
}

/// Digit pattern: optional sign, digits with optional comma group
/// separators, at most one decimal point.
fn matches_digit_pattern(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() {
        return false;
    }
    let mut saw_digit = false;
    let mut saw_point = false;
    for c in body.chars() {
        match c {
            '0'..='9' => saw_digit = true,
            ',' => {}
            '.' if !saw_point => saw_point = true,
            _ => return false,
        }
    }
    saw_digit
}

const SPELLED_UNITS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen",
];

const SPELLED_TENS: &[&str] = &[
    "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

const SPELLED_SCALES: &[&str] = &["hundred", "thousand", "million", "billion", "trillion"];

const SPELLED_ORDINALS: &[&str] = &[
    "zeroth", "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth",
    "ninth", "tenth", "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth",
    "sixteenth", "seventeenth", "eighteenth", "nineteenth", "twentieth", "thirtieth",
    "fortieth", "fiftieth", "sixtieth", "seventieth", "eightieth", "ninetieth", "hundredth",
    "thousandth", "millionth", "billionth", "trillionth",
];

fn in_spelled_lexicon(word: &str) -> bool {
    SPELLED_UNITS.contains(&word)
        || SPELLED_TENS.contains(&word)
        || SPELLED_SCALES.contains(&word)
        || SPELLED_ORDINALS.contains(&word)
}

/// True for tokens matching the digit pattern or made of spelled-number
/// lexicon words (hyphenated compounds like "twenty-two" included).
pub fn is_numlike(surface: &str) -> bool {
    if matches_digit_pattern(surface) {
        return true;
    }
    let lower = surface.to_lowercase();
    let mut parts = lower.split('-').filter(|p| !p.is_empty()).peekable();
    if parts.peek().is_none() {
        return false;
    }
    parts.clone().all(in_spelled_lexicon) && lower.contains(|c: char| c.is_alphabetic())
}

/// Parses the 4-column annotated TSV format: surface, lemma, upos, xpos,
/// tab-separated, one token per row, blank line between sentences, `#`
/// lines ignored.
pub fn parse_annotated(text: &str) -> Result<Vec<AnnotatedSentence>> {
    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    let mut block_start = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(AnnotatedSentence {
                    tokens: std::mem::take(&mut current),
                    source_id: block_start.to_string(),
                });
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::parse(
                line_no,
                format!("expected 4 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].is_empty() {
            return Err(Error::parse(line_no, "empty surface column"));
        }
        if current.is_empty() {
            block_start = line_no;
        }
        current.push(Token::from_columns(cols[0], cols[1], cols[2], cols[3]));
    }
    if !current.is_empty() {
        sentences.push(AnnotatedSentence {
            tokens: current,
            source_id: block_start.to_string(),
        });
    }
    if sentences.is_empty() {
        return Err(Error::EmptyInput("annotated file contains no sentences".into()));
    }
    Ok(sentences)
}

/// Canonical annotated-TSV serialization: 4 columns per token, one blank
/// line between sentences, trailing newline. `parse_annotated` round-trips
/// through this byte-identically.
pub fn emit_annotated(sentences: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for (i, sentence) in sentences.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for t in &sentence.tokens {
            out.push_str(&t.surface);
            out.push('\t');
            out.push_str(&t.lemma);
            out.push('\t');
            out.push_str(&t.upos);
            out.push('\t');
            out.push_str(&t.xpos);
            out.push('\n');
        }
    }
    out
}

/// Emits the corpus as raw text, one sentence of space-joined surfaces per line.
pub fn emit_text(sentences: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        out.push_str(&sentence.surfaces().join(" "));
        out.push('\n');
    }
    out
}

/// Most-frequent-tag table used to fill xpos on the raw ingestion path and
/// to tag replacement candidates out of context.
#[derive(Debug, Clone, Default)]
pub struct TagLexicon {
    tags: BTreeMap<String, String>,
}

impl TagLexicon {
    /// Builds the lexicon from annotated sentences: for each lowercased
    /// surface, the most frequent non-empty xpos (ties broken by
    /// lexicographically smaller tag).
    pub fn from_sentences(sentences: &[AnnotatedSentence]) -> TagLexicon {
        let mut counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
        for sentence in sentences {
            for token in &sentence.tokens {
                if token.xpos.is_empty() {
                    continue;
                }
                *counts
                    .entry(token.surface.to_lowercase())
                    .or_default()
                    .entry(token.xpos.clone())
                    .or_default() += 1;
            }
        }
        let tags = counts
            .into_iter()
            .map(|(word, by_tag)| {
                let best = by_tag
                    .into_iter()
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
                    .map(|(tag, _)| tag)
                    .unwrap_or_default();
                (word, best)
            })
            .collect();
        TagLexicon { tags }
    }

    /// Out-of-context tag lookup by lowercased form.
    pub fn tag(&self, word: &str) -> Option<&str> {
        self.tags.get(&word.to_lowercase()).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    /// Fills empty xpos fields of `corpus` from the lexicon.
    pub fn annotate(&self, corpus: &mut LabeledCorpus) {
        for sentence in &mut corpus.sentences {
            for token in &mut sentence.tokens {
                if token.xpos.is_empty() {
                    if let Some(tag) = self.tag(&token.surface) {
                        token.xpos = tag.to_string();
                    }
                }
            }
        }
    }

    /// Two-column TSV serialization (word, tag), sorted by word.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (word, tag) in &self.tags {
            out.push_str(word);
            out.push('\t');
            out.push_str(tag);
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<TagLexicon> {
        let mut tags = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(Error::parse(
                    idx + 1,
                    format!("expected 2 tab-separated columns, found {}", cols.len()),
                ));
            }
            tags.insert(cols[0].to_string(), cols[1].to_string());
        }
        Ok(TagLexicon { tags })
    }

    pub fn load(path: &Path) -> Result<TagLexicon> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TagLexicon::from_tsv(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_tsv()).map_err(|e| Error::io(path, e))
    }
}
