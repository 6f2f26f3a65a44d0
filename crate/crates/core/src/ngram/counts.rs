//! N-gram counting over padded token sentences.
//!
//! Each sentence is padded with one begin marker and one end marker; raw
//! counts are taken over every k-window for k = 1..=order. Adjusted counts
//! follow the Kneser-Ney convention: the top order and begin-anchored
//! n-grams keep their raw counts, everything else uses the continuation
//! count (number of distinct single-token left extensions).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::ngram::{Vocabulary, BOS_ID};

/// Raw counts per order, with the vocabulary interning built during the
/// counting pass.
#[derive(Debug, Clone)]
pub struct CountTrie {
    order: usize,
    vocab: Vocabulary,
    /// raw[k - 1] maps k-grams (token-id sequences) to occurrence counts.
    raw: Vec<HashMap<Vec<u32>, u64>>,
    token_count: u64,
}

/// Counts all n-grams of orders 1..=order over the given token sentences.
pub fn count_ngrams(sentences: &[Vec<String>], order: usize) -> Result<CountTrie> {
    if order == 0 {
        return Err(Error::Validation("n-gram order must be at least 1".into()));
    }
    let mut vocab = Vocabulary::new();
    let mut raw: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); order];
    let mut token_count = 0u64;
    let mut any = false;

    for sentence in sentences {
        if sentence.is_empty() {
            continue;
        }
        any = true;
        token_count += sentence.len() as u64;
        let mut ids = Vec::with_capacity(sentence.len() + 2);
        ids.push(BOS_ID);
        for token in sentence {
            ids.push(vocab.intern(token));
        }
        ids.push(crate::ngram::EOS_ID);

        for k in 1..=order {
            for window in ids.windows(k) {
                *raw[k - 1].entry(window.to_vec()).or_insert(0) += 1;
            }
        }
    }

    if !any {
        return Err(Error::EmptyCorpus("n-gram counting input".into()));
    }
    Ok(CountTrie {
        order,
        vocab,
        raw,
        token_count,
    })
}

impl CountTrie {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub(crate) fn into_vocab(self) -> Vocabulary {
        self.vocab
    }

    /// Number of real tokens counted (padding markers excluded).
    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    /// Raw occurrence counts for k-grams.
    pub fn raw_counts(&self, k: usize) -> &HashMap<Vec<u32>, u64> {
        &self.raw[k - 1]
    }

    pub fn raw_count(&self, ngram: &[u32]) -> u64 {
        assert!(!ngram.is_empty() && ngram.len() <= self.order);
        self.raw[ngram.len() - 1].get(ngram).copied().unwrap_or(0)
    }

    /// Adjusted (continuation) counts for k-grams.
    pub fn adjusted_counts(&self, k: usize) -> HashMap<Vec<u32>, u64> {
        assert!(k >= 1 && k <= self.order);
        if k == self.order {
            return self.raw[k - 1].clone();
        }
        // Continuation counts: number of distinct left-extension types.
        let mut continuation: HashMap<&[u32], u64> = HashMap::new();
        for key in self.raw[k].keys() {
            *continuation.entry(&key[1..]).or_insert(0) += 1;
        }
        self.raw[k - 1]
            .iter()
            .map(|(gram, &count)| {
                let adjusted = if gram[0] == BOS_ID {
                    count
                } else {
                    continuation.get(gram.as_slice()).copied().unwrap_or(0)
                };
                (gram.clone(), adjusted)
            })
            .collect()
    }
}
