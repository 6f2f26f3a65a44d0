//! Property tests for the structural invariants that hold for arbitrary
//! inputs rather than handpicked fixtures.

use proptest::prelude::*;

use segsurp_core::corpus::{build_frequency_table, Sentence};
use segsurp_core::evaluation::wilcoxon_rank_sum;
use segsurp_core::ngram::{count_ngrams, estimate};
use segsurp_core::tokenize::{apply_bpe, train_bpe, SchemeId};

fn word_strategy() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-z]{1,12}").expect("valid regex")
}

fn corpus_strategy() -> impl Strategy<Value = Vec<Sentence>> {
    proptest::collection::vec(proptest::collection::vec(word_strategy(), 1..8), 1..20).prop_map(
        |sentences| {
            sentences
                .into_iter()
                .enumerate()
                .map(|(i, words)| Sentence {
                    text_id: format!("{i}"),
                    words,
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Stripping boundary marking and concatenating the tokens reproduces
    // the input word for any trained merge table.
    #[test]
    fn bpe_detokenizes_exactly(corpus in corpus_strategy(), word in word_strategy(), merges in 0usize..40) {
        let table = train_bpe(&corpus, merges).unwrap();
        let tokenized = apply_bpe(&word, &table).unwrap();
        prop_assert_eq!(tokenized.detokenize(), word);
        prop_assert!(tokenized.tokens[0].word_initial);
        prop_assert!(tokenized.tokens.iter().skip(1).all(|t| !t.word_initial));
    }

    // Identical inputs give identical outputs.
    #[test]
    fn bpe_is_deterministic(corpus in corpus_strategy(), word in word_strategy()) {
        let table = train_bpe(&corpus, 25).unwrap();
        let a = apply_bpe(&word, &table).unwrap();
        let b = apply_bpe(&word, &table).unwrap();
        prop_assert_eq!(a, b);
    }

    // Appending merges to the table never increases any word's token count.
    #[test]
    fn bpe_token_count_is_monotone(corpus in corpus_strategy(), word in word_strategy(), cut in 0usize..40) {
        let full = train_bpe(&corpus, 40).unwrap();
        let prefix = full.truncated(cut.min(full.len()));
        let with_fewer = apply_bpe(&word, &prefix).unwrap().token_count();
        let with_more = apply_bpe(&word, &full).unwrap().token_count();
        prop_assert!(with_more <= with_fewer);
    }

    // Frequency tables ignore sentence order.
    #[test]
    fn frequency_table_is_permutation_invariant(corpus in corpus_strategy(), seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = corpus.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = build_frequency_table(&corpus).unwrap();
        let b = build_frequency_table(&shuffled).unwrap();
        prop_assert_eq!(a, b);
    }

    // Rank sums of the two sample orders always cover the full rank total,
    // and the p-value is symmetric.
    #[test]
    fn rank_sum_orders_are_complementary(
        a in proptest::collection::vec(-1000i32..1000, 1..12),
        b in proptest::collection::vec(-1000i32..1000, 1..12),
    ) {
        let a: Vec<f64> = a.into_iter().map(f64::from).collect();
        let b: Vec<f64> = b.into_iter().map(f64::from).collect();
        let ab = wilcoxon_rank_sum(&a, &b).unwrap();
        let ba = wilcoxon_rank_sum(&b, &a).unwrap();
        let n = (a.len() + b.len()) as f64;
        prop_assert!((ab.w + ba.w - n * (n + 1.0) / 2.0).abs() < 1e-9);
        prop_assert!((ab.p - ba.p).abs() < 1e-12);
        prop_assert!(ab.p >= 0.0 && ab.p <= 1.0);
    }

    // Any trained model's unigram distribution is normalized, and the
    // orthographic scheme keeps one token per word.
    #[test]
    fn trained_models_normalize(corpus in corpus_strategy()) {
        let stream: Vec<Vec<String>> = corpus.iter().map(|s| s.words.clone()).collect();
        let model = estimate(count_ngrams(&stream, 3).unwrap()).unwrap();
        let mass = model.conditional_mass(&[]);
        prop_assert!((mass - 1.0).abs() < 1e-6, "unigram mass {}", mass);

        let resources = segsurp_core::tokenize::Resources::default();
        for sentence in &corpus {
            for word in &sentence.words {
                let tw = segsurp_core::tokenize::tokenize_word(word, SchemeId::Orthographic, &resources).unwrap();
                prop_assert_eq!(tw.token_count(), 1);
            }
        }
    }
}
