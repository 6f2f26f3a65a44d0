//! Backoff n-gram language models with modified Kneser-Ney smoothing.
//!
//! Training counts n-grams over padded token sentences, estimation produces
//! interpolated probabilities in ARPA backoff form, and queries evaluate the
//! standard backoff recursion. Probabilities are natural-log internally;
//! ARPA serialization converts to log10.

pub mod arpa;
pub mod counts;
pub mod estimate;

use std::collections::HashMap;

pub use arpa::{export_arpa, import_arpa};
pub use counts::{count_ngrams, CountTrie};
pub use estimate::{estimate, Discounts};

/// Sentence-begin marker: context only, never predicted.
pub const BOS: &str = "<s>";
/// Sentence-end marker.
pub const EOS: &str = "</s>";
/// Unknown-token marker; receives the unigram interpolation mass.
pub const UNK: &str = "<unk>";

pub const BOS_ID: u32 = 0;
pub const EOS_ID: u32 = 1;
pub const UNK_ID: u32 = 2;

/// Log-probability assigned to the begin marker, which is never a predicted
/// item: the conventional ARPA sentinel of -99 in log10, kept finite so that
/// queries stay total.
pub(crate) const BOS_SENTINEL_LN: f64 = -99.0 * std::f64::consts::LN_10;

/// Token interning shared by counts and models. Ids 0..=2 are reserved for
/// the markers.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    pub fn new() -> Self {
        let tokens = vec![BOS.to_string(), EOS.to_string(), UNK.to_string()];
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { tokens, index }
    }

    pub fn intern(&mut self, token: &str) -> u32 {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len() as u32;
        self.tokens.push(token.to_owned());
        self.index.insert(token.to_owned(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    /// Id for a token, mapping unknown tokens to the unknown marker.
    pub fn id_or_unk(&self, token: &str) -> u32 {
        self.id(token).unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // markers are always present
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Ids of every predictable token: the full vocabulary minus the begin
    /// marker (which is context only).
    pub fn predicted_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.tokens.len() as u32).filter(|&id| id != BOS_ID)
    }
}

/// A trained (or imported) backoff n-gram model.
#[derive(Debug, Clone)]
pub struct NGramModel {
    order: usize,
    vocab: Vocabulary,
    /// probs[k - 1]: natural-log conditional probability of stored k-grams.
    probs: Vec<HashMap<Vec<u32>, f64>>,
    /// backoffs[k - 1]: natural-log backoff weight of stored length-k contexts.
    backoffs: Vec<HashMap<Vec<u32>, f64>>,
}

impl NGramModel {
    pub(crate) fn from_parts(
        order: usize,
        vocab: Vocabulary,
        probs: Vec<HashMap<Vec<u32>, f64>>,
        backoffs: Vec<HashMap<Vec<u32>, f64>>,
    ) -> Self {
        debug_assert_eq!(probs.len(), order);
        debug_assert_eq!(backoffs.len(), order.saturating_sub(1));
        NGramModel {
            order,
            vocab,
            probs,
            backoffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn in_vocab(&self, token: &str) -> bool {
        self.vocab.contains(token)
    }

    pub fn ngram_count(&self, k: usize) -> usize {
        self.probs[k - 1].len()
    }

    /// Directly stored log-probability for an n-gram, if present.
    pub fn stored_logprob(&self, ngram: &[u32]) -> Option<f64> {
        self.probs
            .get(ngram.len() - 1)
            .and_then(|m| m.get(ngram))
            .copied()
    }

    /// Stored log backoff weight for a context, if present.
    pub fn stored_backoff(&self, context: &[u32]) -> Option<f64> {
        self.backoffs
            .get(context.len() - 1)
            .and_then(|m| m.get(context))
            .copied()
    }

    /// Natural-log conditional probability of `token` given the preceding
    /// tokens, by the standard backoff recursion. The context is truncated
    /// to the most recent `order - 1` tokens; unknown tokens map to the
    /// unknown marker. Total over all inputs.
    pub fn logprob_ids(&self, token: u32, context: &[u32]) -> f64 {
        let start = context.len().saturating_sub(self.order - 1);
        let mut ctx = &context[start..];
        let mut backoff_sum = 0.0;
        let mut key: Vec<u32> = Vec::with_capacity(ctx.len() + 1);
        loop {
            key.clear();
            key.extend_from_slice(ctx);
            key.push(token);
            if let Some(&p) = self.probs[key.len() - 1].get(&key) {
                return backoff_sum + p;
            }
            if ctx.is_empty() {
                // Unigram miss only happens for ids outside the model's
                // vocabulary; score as the unknown marker.
                let unk = self.probs[0]
                    .get(&vec![UNK_ID])
                    .copied()
                    .expect("models always store the unknown marker");
                return backoff_sum + unk;
            }
            backoff_sum += self.stored_backoff(ctx).unwrap_or(0.0);
            ctx = &ctx[1..];
        }
    }

    /// String-token variant of [`Self::logprob_ids`].
    pub fn logprob<S: AsRef<str>>(&self, token: &str, context: &[S]) -> f64 {
        let ctx: Vec<u32> = context
            .iter()
            .map(|t| self.vocab.id_or_unk(t.as_ref()))
            .collect();
        self.logprob_ids(self.vocab.id_or_unk(token), &ctx)
    }

    /// Natural-log probability of a full sentence with begin/end padding.
    pub fn sentence_logprob<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let mut context = vec![BOS_ID];
        let mut total = 0.0;
        for token in tokens {
            let id = self.vocab.id_or_unk(token.as_ref());
            total += self.logprob_ids(id, &context);
            context.push(id);
        }
        total + self.logprob_ids(EOS_ID, &context)
    }

    /// Perplexity over token sentences (predictions include the end marker).
    pub fn perplexity(&self, sentences: &[Vec<String>]) -> f64 {
        let mut log_sum = 0.0;
        let mut n = 0u64;
        for sentence in sentences {
            log_sum += self.sentence_logprob(sentence);
            n += sentence.len() as u64 + 1;
        }
        (-log_sum / n as f64).exp()
    }

    /// Sum of conditional probabilities over the predictable vocabulary for
    /// one context. Equals 1 for a well-formed model.
    pub fn conditional_mass(&self, context: &[u32]) -> f64 {
        self.vocab
            .predicted_ids()
            .map(|id| self.logprob_ids(id, context).exp())
            .sum()
    }
}
