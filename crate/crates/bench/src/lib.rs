//! Deterministic synthetic data for the benchmarks: a corpus generator with
//! a Zipf-flavored vocabulary of inflected word families, and regression
//! rows with a planted surprisal effect.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use segsurp_core::corpus::Sentence;
use segsurp_core::surprisal::{FeatureRow, LagFeatures};

const ROOTS: [&str; 20] = [
    "walk", "talk", "jump", "cook", "play", "work", "look", "help", "turn", "open", "clean",
    "visit", "report", "cover", "plant", "water", "gather", "paint", "hunt", "garden",
];
const SUFFIXES: [&str; 5] = ["", "s", "ed", "ing", "er"];
const FUNCTION: [&str; 10] = ["the", "a", "of", "to", "in", "on", "and", "with", "for", "it"];

pub fn synth_vocab() -> Vec<String> {
    let mut vocab: Vec<String> = FUNCTION.iter().map(|w| w.to_string()).collect();
    for root in ROOTS {
        for suffix in SUFFIXES {
            vocab.push(format!("{root}{suffix}"));
        }
    }
    vocab
}

/// `n` sentences of 4..=12 words with rank-weighted sampling, seeded.
pub fn synth_corpus(n: usize, seed: u64) -> Vec<Sentence> {
    let vocab = synth_vocab();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let len = rng.random_range(4..=12);
            let words = (0..len)
                .map(|_| {
                    // Squared uniform sampling skews mass toward low ranks.
                    let r = rng.random::<f64>();
                    let idx = ((r * r) * vocab.len() as f64) as usize;
                    vocab[idx.min(vocab.len() - 1)].clone()
                })
                .collect();
            Sentence {
                text_id: format!("{i}"),
                words,
            }
        })
        .collect()
}

/// Feature rows whose response carries a planted surprisal effect.
pub fn synth_rows(n: usize, seed: u64) -> Vec<FeatureRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mk = |rng: &mut ChaCha8Rng| LagFeatures {
                surprisal: rng.random::<f64>() * 12.0,
                length: (rng.random::<f64>() * 9.0).floor() + 1.0,
                log_freq: rng.random::<f64>() * 6.0,
            };
            let l0 = mk(&mut rng);
            let l1 = mk(&mut rng);
            let noise: f64 = (0..12).map(|_| rng.random::<f64>() - 0.5).sum::<f64>() * 5.0;
            FeatureRow {
                text_id: format!("t{}", i % 13),
                word_index: (i / 13) as u32,
                rt_ms: 200.0 + 2.0 * l0.surprisal + 0.5 * l0.length - 0.3 * l0.log_freq + noise,
                fold_id: (i % 10) as u8,
                lags: vec![l0, l1],
            }
        })
        .collect()
}
