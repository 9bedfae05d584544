//! Static word vectors with rank-restricted nearest-neighbor queries.
//!
//! The text format is one token plus d space-separated decimals per line,
//! no header. File order is meaningful: published vector files list tokens
//! by frequency, and `restrict_vocab` caps candidate search to the first N
//! ranks of that order.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::LabeledCorpus;
use crate::error::{Error, Result};

pub struct EmbeddingStore {
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    /// Row-major token vectors, `dim` values per token.
    matrix: Vec<f64>,
    /// Per-token Euclidean norms, cached at load time.
    norms: Vec<f64>,
    dim: usize,
}

impl EmbeddingStore {
    /// Parses the embedding text format. Errors name the offending line for
    /// dimension mismatches and duplicate tokens; a leading word2vec-style
    /// count/dimension header is rejected with a pointer to the expected
    /// format.
    pub fn parse(reader: impl BufRead) -> Result<EmbeddingStore> {
        let mut vocab = Vec::new();
        let mut index = HashMap::new();
        let mut matrix = Vec::new();
        let mut dim = 0usize;

        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| Error::io("<embeddings>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-empty line has a first field");
            let values: Vec<f64> = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::parse(line_no, format!("non-numeric vector component {f:?}"))
                    })
                })
                .collect::<Result<_>>()?;

            if vocab.is_empty() && values.len() == 1 && token.parse::<u64>().is_ok() {
                return Err(Error::parse(
                    line_no,
                    "file starts with a count/dimension header; expected headerless \
                     token-plus-values lines",
                ));
            }
            if values.is_empty() {
                return Err(Error::parse(line_no, "token with no vector components"));
            }
            if vocab.is_empty() {
                dim = values.len();
            } else if values.len() != dim {
                return Err(Error::parse(
                    line_no,
                    format!("expected {dim} vector components, found {}", values.len()),
                ));
            }
            if index.contains_key(token) {
                return Err(Error::parse(line_no, format!("duplicate token {token:?}")));
            }
            index.insert(token.to_string(), vocab.len());
            vocab.push(token.to_string());
            matrix.extend_from_slice(&values);
        }

        if vocab.is_empty() {
            return Err(Error::EmptyInput("embedding file contains no vectors".into()));
        }
        let norms = vocab
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let row = &matrix[i * dim..(i + 1) * dim];
                row.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .collect();
        Ok(EmbeddingStore {
            vocab,
            index,
            matrix,
            norms,
            dim,
        })
    }

    pub fn load(path: &Path) -> Result<EmbeddingStore> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        EmbeddingStore::parse(BufReader::new(file))
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Frequency rank of a token (0 = first line of the file).
    pub fn rank(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.rank(token).map(|i| &self.matrix[i * self.dim..(i + 1) * self.dim])
    }

    /// The token's vector scaled to unit length; zero vectors are returned
    /// unscaled.
    pub fn unit_vector(&self, token: &str) -> Option<Vec<f64>> {
        let i = self.rank(token)?;
        let row = &self.matrix[i * self.dim..(i + 1) * self.dim];
        let norm = self.norms[i];
        if norm == 0.0 {
            Some(row.to_vec())
        } else {
            Some(row.iter().map(|x| x / norm).collect())
        }
    }

    fn cosine_by_rank(&self, a: usize, b: usize) -> f64 {
        let na = self.norms[a];
        let nb = self.norms[b];
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        let va = &self.matrix[a * self.dim..(a + 1) * self.dim];
        let vb = &self.matrix[b * self.dim..(b + 1) * self.dim];
        let dot: f64 = va.iter().zip(vb).map(|(x, y)| x * y).sum();
        dot / (na * nb)
    }

    /// The `k` nearest neighbors of `query` by cosine similarity, drawn
    /// only from the first `restrict_vocab` ranks. The query itself is
    /// excluded; similarity ties break toward the lower (more frequent)
    /// rank.
    pub fn most_similar(
        &self,
        query: &str,
        k: usize,
        restrict_vocab: usize,
    ) -> Result<Vec<(String, f64)>> {
        let q = self
            .rank(query)
            .ok_or_else(|| Error::NotInVocabulary(query.to_string()))?;
        let limit = restrict_vocab.min(self.vocab.len());
        let mut scored: Vec<(usize, f64)> = (0..limit)
            .filter(|&i| i != q)
            .map(|i| (i, self.cosine_by_rank(q, i)))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(i, sim)| (self.vocab[i].clone(), sim))
            .collect())
    }

    /// Sets each token's `in_embed_vocab` flag: true when the surface or,
    /// failing that, the lemma has a vector (the forms a neighbor query
    /// would use).
    pub fn mark_vocab(&self, corpus: &mut LabeledCorpus) {
        for sentence in &mut corpus.sentences {
            for token in &mut sentence.tokens {
                token.in_embed_vocab =
                    self.contains(&token.surface) || self.contains(&token.lemma);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    fn store(text: &str) -> EmbeddingStore {
        EmbeddingStore::parse(Cursor::new(text)).unwrap()
    }

    #[test]
    fn load_preserves_file_order() {
        let s = store("the 1 0 0 0\ncat 0 1 0 0\nsat 0 0 1 0\n");
        assert_eq!(s.len(), 3);
        assert_eq!(s.dim(), 4);
        assert_eq!(s.rank("the"), Some(0));
        assert_eq!(s.rank("sat"), Some(2));
        assert_eq!(s.vector("cat"), Some(&[0.0, 1.0, 0.0, 0.0][..]));
    }

    #[test]
    fn inconsistent_dimension_names_line() {
        let err = EmbeddingStore::parse(Cursor::new("a 1 2 3\nb 1 2\n")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_token_rejected() {
        let err = EmbeddingStore::parse(Cursor::new("a 1 2\nb 3 4\na 5 6\n")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn word2vec_header_rejected() {
        let err = EmbeddingStore::parse(Cursor::new("40000 300\na 1 2\n")).unwrap_err();
        assert!(err.to_string().contains("header"), "{err}");
    }

    #[test]
    fn identical_direction_scores_one() {
        // "twin" points the same way as "base" at twice the length
        let s = store("base 1 2 2\ntwin 2 4 4\nother 9 -3 0\n");
        let hits = s.most_similar("base", 1, 3).unwrap();
        assert_eq!(hits[0].0, "twin");
        assert!((hits[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn restrict_vocab_one_excludes_self() {
        let s = store("top 1 0\nnext 0 1\n");
        let hits = s.most_similar("top", 3, 1).unwrap();
        assert!(hits.is_empty());
    }

    #[test]
    fn absent_query_is_oov() {
        let s = store("a 1 0\n");
        assert!(matches!(
            s.most_similar("zzz", 1, 1),
            Err(Error::NotInVocabulary(_))
        ));
    }

    #[test]
    fn matches_brute_force_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let dim = 6;
        let n = 50;
        let mut text = String::new();
        for i in 0..n {
            text.push_str(&format!("w{i}"));
            for _ in 0..dim {
                text.push_str(&format!(" {:.6}", rng.gen_range(-1.0..1.0)));
            }
            text.push('\n');
        }
        let s = store(&text);

        let cosine = |a: &[f64], b: &[f64]| {
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            dot / (na * nb)
        };

        for q in 0..n {
            let query = format!("w{q}");
            let got = s.most_similar(&query, 3, n).unwrap();
            // exhaustive all-pairs scan
            let qv = s.vector(&query).unwrap().to_vec();
            let mut all: Vec<(usize, f64)> = (0..n)
                .filter(|&i| i != q)
                .map(|i| (i, cosine(&qv, s.vector(&format!("w{i}")).unwrap())))
                .collect();
            all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            let want: Vec<(String, f64)> =
                all.into_iter().take(3).map(|(i, c)| (format!("w{i}"), c)).collect();
            for ((gt, gs), (wt, ws)) in got.iter().zip(&want) {
                assert_eq!(gt, wt);
                assert!((gs - ws).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mark_vocab_checks_surface_then_lemma() {
        let s = store("cat 1 0\nthe 0 1\n");
        let mut corpus =
            LabeledCorpus::from_raw_text(crate::corpus::Label::Ht, "The cat gallops\n").unwrap();
        s.mark_vocab(&mut corpus);
        let toks = &corpus.sentences[0].tokens;
        assert!(toks[0].in_embed_vocab, "surface The misses, lemma the hits");
        assert!(toks[1].in_embed_vocab);
        assert!(!toks[2].in_embed_vocab);
    }

    proptest! {
        // cosine ignores positive rescaling of any stored vector
        #[test]
        fn scale_invariance(scale in 0.01f64..100.0) {
            let base = store("q 1.0 2.0\na 2.0 1.0\nb -1.0 0.5\nc 0.3 0.9\n");
            let scaled_text = format!(
                "q 1.0 2.0\na {} {}\nb -1.0 0.5\nc 0.3 0.9\n",
                2.0 * scale,
                1.0 * scale
            );
            let scaled = store(&scaled_text);
            let r1 = base.most_similar("q", 3, 4).unwrap();
            let r2 = scaled.most_similar("q", 3, 4).unwrap();
            let order1: Vec<&String> = r1.iter().map(|(t, _)| t).collect();
            let order2: Vec<&String> = r2.iter().map(|(t, _)| t).collect();
            prop_assert_eq!(order1, order2);
        }

        #[test]
        fn result_length_is_min_k_eligible(k in 1usize..8, restrict in 1usize..6) {
            let s = store("a 1 0\nb 0 1\nc 1 1\nd -1 0\ne 0 -1\n");
            let hits = s.most_similar("a", k, restrict).unwrap();
            let eligible = restrict.min(5) - usize::from(restrict >= 1); // rank 0 is the query
            prop_assert_eq!(hits.len(), k.min(eligible));
        }
    }
}
