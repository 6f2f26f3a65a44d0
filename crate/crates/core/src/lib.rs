//! Train n-gram language models over orthographic, BPE, and morphological
//! token streams, compute word-level surprisal by summing subword
//! surprisals, and measure how well surprisal predicts reading times via
//! cross-validated regression and segmentation-level analyses.
//!
//! The pipeline runs end to end from plain-text inputs:
//!
//! 1. [`corpus`] loads training text, reading-time TSVs, and builds
//!    frequency tables.
//! 2. [`tokenize`] produces token streams per scheme (identity, merge-rule
//!    BPE, segmentation-lexicon morphology).
//! 3. [`ngram`] trains order-5 modified Kneser-Ney models and answers
//!    backoff log-probability queries; models round-trip through ARPA.
//! 4. [`surprisal`] sums subword surprisals into word surprisals, applies
//!    the exclusion rules, and assembles regression feature rows with
//!    spillover lags.
//! 5. [`regression`] fits OLS reading-time models and computes per-token
//!    log-likelihood differences, coefficient tests, and Cohen's f².
//! 6. [`evaluation`] orchestrates 10-fold cross-validation, rank-sum
//!    comparisons, segmentation statistics, and report/CSV emission.

pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod ngram;
pub mod regression;
pub mod surprisal;
pub mod tokenize;

pub use corpus::{
    build_frequency_table, load_rt_corpus, load_training_corpus, normalize_word, FrequencyTable,
    RTRecord, Sentence,
};
pub use error::{Error, Result};
pub use ngram::{count_ngrams, estimate, export_arpa, import_arpa, NGramModel};
pub use tokenize::{
    apply_bpe, segment_morph, tokenize_corpus, train_bpe, MergeTable, Resources, SchemeId,
    SegmentationLexicon, TokenizedWord,
};
