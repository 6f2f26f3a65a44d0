//! Word-level surprisal by summing subword token surprisals, the exclusion
//! rules applied before regression, and feature-row assembly with spillover
//! lags.
//!
//! Reading-time texts carry no sentence annotation, so the token history
//! resets after any word ending in sentence-final punctuation, matching the
//! per-sentence padding the models were trained with. Exclusion reasons are
//! ranked: a word's own non-alphabetic content outranks punctuation
//! adjacency, which outranks out-of-vocabulary status.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_word, FrequencyTable, RTRecord};
use crate::error::{Error, Result};
use crate::ngram::{NGramModel, BOS_ID};
use crate::tokenize::{tokenize_word, Resources, SchemeId, TokenizedWord};

/// Why a word was dropped from the regression data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    NonAlphabetic,
    AdjacentPunctuation,
    Oov,
}

/// Per-word surprisal under one scheme, with its exclusion flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WordSurprisal {
    pub text_id: String,
    pub word_index: u32,
    pub word: String,
    pub scheme: SchemeId,
    /// Marker-free token texts, for readable reports.
    pub tokens: Vec<String>,
    pub surprisal_bits: f64,
    pub excluded: Option<ExclusionReason>,
}

impl WordSurprisal {
    pub fn kept(&self) -> bool {
        self.excluded.is_none()
    }

    pub fn key(&self) -> (String, u32) {
        (self.text_id.clone(), self.word_index)
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Features for one lag: the word at distance `k` behind the response word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagFeatures {
    pub surprisal: f64,
    pub length: f64,
    pub log_freq: f64,
}

/// One regression observation: the response plus features for lags 0..=K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub text_id: String,
    pub word_index: u32,
    pub rt_ms: f64,
    pub fold_id: u8,
    pub lags: Vec<LagFeatures>,
}

impl FeatureRow {
    pub fn key(&self) -> (String, u32) {
        (self.text_id.clone(), self.word_index)
    }

    pub fn spillover(&self) -> usize {
        self.lags.len() - 1
    }
}

/// One reading-time text split into sentences.
#[derive(Debug, Clone)]
pub struct RtText {
    pub text_id: String,
    pub sentences: Vec<Vec<RTRecord>>,
}

impl RtText {
    pub fn words(&self) -> impl Iterator<Item = &RTRecord> {
        self.sentences.iter().flatten()
    }
}

fn ends_sentence(word: &str) -> bool {
    let trimmed = word.trim_end_matches(['"', '\'', ')', ']', '\u{201d}', '\u{2019}']);
    trimmed.ends_with(['.', '!', '?'])
}

/// Groups records into texts (first-appearance order, sorted by word index
/// within a text) and splits each text after sentence-final punctuation.
pub fn group_rt_texts(records: &[RTRecord]) -> Vec<RtText> {
    let mut order: Vec<&str> = Vec::new();
    let mut by_text: BTreeMap<&str, Vec<&RTRecord>> = BTreeMap::new();
    for record in records {
        let entry = by_text.entry(&record.text_id).or_default();
        if entry.is_empty() {
            order.push(&record.text_id);
        }
        entry.push(record);
    }

    order
        .into_iter()
        .map(|text_id| {
            let mut words = by_text.remove(text_id).unwrap();
            words.sort_by_key(|r| r.word_index);
            let mut sentences: Vec<Vec<RTRecord>> = Vec::new();
            let mut current: Vec<RTRecord> = Vec::new();
            for record in words {
                current.push(record.clone());
                if ends_sentence(&record.word) {
                    sentences.push(std::mem::take(&mut current));
                }
            }
            if !current.is_empty() {
                sentences.push(current);
            }
            RtText {
                text_id: text_id.to_owned(),
                sentences,
            }
        })
        .collect()
}

/// The query form of a word under a scheme: the orthographic model is
/// trained on normalized words, the subword schemes on raw surface forms.
pub fn scheme_query_word(scheme: SchemeId, word: &str) -> String {
    match scheme {
        SchemeId::Orthographic => normalize_word(word),
        SchemeId::Bpe | SchemeId::Morphological => word.to_owned(),
    }
}

/// Sums the token surprisals of one word, advancing the running token
/// history. Returns the total in bits and whether any token fell outside
/// the model vocabulary.
pub fn word_surprisal(
    model: &NGramModel,
    tokenized: &TokenizedWord,
    marker: &str,
    context: &mut Vec<u32>,
) -> (f64, bool) {
    let mut bits = 0.0;
    let mut oov = false;
    for token in tokenized.stream_tokens(marker) {
        if !model.in_vocab(&token) {
            oov = true;
        }
        let id = model.vocab().id_or_unk(&token);
        bits -= model.logprob_ids(id, context) / std::f64::consts::LN_2;
        context.push(id);
    }
    (bits, oov)
}

/// Flags each word of one text as kept or excluded. `oov[i]` marks words
/// that are out of vocabulary for the scheme under consideration.
pub fn apply_exclusions(words: &[String], oov: &[bool]) -> Vec<Option<ExclusionReason>> {
    assert_eq!(words.len(), oov.len());
    let non_alpha: Vec<bool> = words
        .iter()
        .map(|w| !w.chars().all(|c| c.is_ascii_alphabetic()))
        .collect();
    (0..words.len())
        .map(|i| {
            if non_alpha[i] {
                Some(ExclusionReason::NonAlphabetic)
            } else if (i > 0 && non_alpha[i - 1])
                || (i + 1 < words.len() && non_alpha[i + 1])
            {
                Some(ExclusionReason::AdjacentPunctuation)
            } else if oov[i] {
                Some(ExclusionReason::Oov)
            } else {
                None
            }
        })
        .collect()
}

/// Computes word surprisals for every word of the reading-time texts under
/// one scheme, with exclusion flags. Token history resets at sentence
/// boundaries; excluded words still advance the history.
pub fn compute_surprisals(
    model: &NGramModel,
    scheme: SchemeId,
    resources: &Resources,
    marker: &str,
    texts: &[RtText],
    freq: &FrequencyTable,
) -> Result<Vec<WordSurprisal>> {
    let mut out = Vec::new();
    for text in texts {
        let mut words: Vec<String> = Vec::new();
        let mut tokenized: Vec<TokenizedWord> = Vec::new();
        let mut oov_flags: Vec<bool> = Vec::new();
        for record in text.words() {
            let query = scheme_query_word(scheme, &record.word);
            let tw = tokenize_word(&query, scheme, resources)?;
            let token_oov = tw
                .stream_tokens(marker)
                .iter()
                .any(|t| !model.in_vocab(t));
            oov_flags.push(token_oov || freq.count(&record.word) == 0);
            tokenized.push(tw);
            words.push(record.word.clone());
        }
        let exclusions = apply_exclusions(&words, &oov_flags);

        let mut flat = 0usize;
        for sentence in &text.sentences {
            let mut context = vec![BOS_ID];
            for record in sentence {
                let tw = &tokenized[flat];
                let (bits, _) = word_surprisal(model, tw, marker, &mut context);
                out.push(WordSurprisal {
                    text_id: record.text_id.clone(),
                    word_index: record.word_index,
                    word: record.word.clone(),
                    scheme,
                    tokens: tw.tokens.iter().map(|t| t.text.clone()).collect(),
                    surprisal_bits: bits,
                    excluded: exclusions[flat],
                });
                flat += 1;
            }
        }
    }
    Ok(out)
}

/// Cross-scheme alignment: a word stays kept only if kept under every
/// scheme. Exclusions only diverge across schemes through vocabulary
/// coverage, so propagated exclusions are marked out-of-vocabulary.
pub fn align_exclusions(per_scheme: &mut [Vec<WordSurprisal>]) {
    if per_scheme.is_empty() {
        return;
    }
    let len = per_scheme[0].len();
    assert!(
        per_scheme.iter().all(|v| v.len() == len),
        "schemes must cover the same words"
    );
    for i in 0..len {
        if per_scheme.iter().any(|v| !v[i].kept()) {
            for scheme_words in per_scheme.iter_mut() {
                let w = &mut scheme_words[i];
                if w.kept() {
                    w.excluded = Some(ExclusionReason::Oov);
                }
            }
        }
    }
}

/// Builds regression rows: one per kept word whose `k` immediate
/// predecessors are kept and inside the same text. Lag 0 is the word
/// itself; lag features come from the predecessors.
pub fn build_feature_rows(
    texts: &[RtText],
    surprisals: &[WordSurprisal],
    freq: &FrequencyTable,
    k: usize,
) -> Result<Vec<FeatureRow>> {
    let total: usize = texts.iter().map(|t| t.words().count()).sum();
    if surprisals.len() != total {
        return Err(Error::Validation(format!(
            "surprisals cover {} words but texts contain {}",
            surprisals.len(),
            total
        )));
    }

    let mut rows = Vec::new();
    let mut offset = 0usize;
    for text in texts {
        let records: Vec<&RTRecord> = text.words().collect();
        let n = records.len();
        let slice = &surprisals[offset..offset + n];
        for i in 0..n {
            if i < k || !slice[i].kept() || (1..=k).any(|lag| !slice[i - lag].kept()) {
                continue;
            }
            let lags = (0..=k)
                .map(|lag| {
                    let record = records[i - lag];
                    let count = freq.count(&record.word);
                    debug_assert!(count > 0, "kept word {:?} missing from frequency table", record.word);
                    LagFeatures {
                        surprisal: slice[i - lag].surprisal_bits,
                        length: record.word.chars().count() as f64,
                        log_freq: (count.max(1) as f64).ln(),
                    }
                })
                .collect();
            rows.push(FeatureRow {
                text_id: records[i].text_id.clone(),
                word_index: records[i].word_index,
                rt_ms: records[i].rt_ms,
                fold_id: 0,
                lags,
            });
        }
        offset += n;
    }
    Ok(rows)
}

/// Writes rows as TSV: `text_id word_index rt_ms fold s0 len0 f0 s1 ...`.
pub fn dump_feature_rows(path: impl AsRef<Path>, rows: &[FeatureRow]) -> Result<()> {
    let path = path.as_ref();
    let k = rows.first().map(|r| r.spillover()).unwrap_or(0);
    let mut out = String::from("text_id\tword_index\trt_ms\tfold");
    for lag in 0..=k {
        out.push_str(&format!("\ts{lag}\tlen{lag}\tf{lag}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}",
            row.text_id, row.word_index, row.rt_ms, row.fold_id
        ));
        for lag in &row.lags {
            out.push_str(&format!(
                "\t{:.6}\t{}\t{:.6}",
                lag.surprisal, lag.length, lag.log_freq
            ));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_frequency_table, Sentence};
    use crate::ngram::{count_ngrams, estimate};
    use crate::tokenize::WORD_INITIAL_MARKER;

    fn sentences(lines: &[&str]) -> Vec<Sentence> {
        lines
            .iter()
            .enumerate()
            .map(|(i, line)| Sentence {
                text_id: format!("{}", i + 1),
                words: line.split_whitespace().map(str::to_owned).collect(),
            })
            .collect()
    }

    fn rt_records(text_id: &str, words: &[&str]) -> Vec<RTRecord> {
        words
            .iter()
            .enumerate()
            .map(|(i, w)| RTRecord {
                text_id: text_id.into(),
                word_index: i as u32,
                word: w.to_string(),
                rt_ms: 200.0 + i as f64,
            })
            .collect()
    }

    fn orth_model(corpus: &[Sentence]) -> NGramModel {
        let stream: Vec<Vec<String>> = corpus
            .iter()
            .map(|s| s.words.iter().map(|w| normalize_word(w)).collect())
            .collect();
        estimate(count_ngrams(&stream, 3).unwrap()).unwrap()
    }

    #[test]
    fn exclusion_rules_match_the_stated_cases() {
        let words: Vec<String> = ["fine", "end.", "Next", "word"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let flags = apply_exclusions(&words, &[false; 4]);
        assert_eq!(flags[0], Some(ExclusionReason::AdjacentPunctuation)); // precedes "end."
        assert_eq!(flags[1], Some(ExclusionReason::NonAlphabetic));
        assert_eq!(flags[2], Some(ExclusionReason::AdjacentPunctuation)); // follows "end."
        assert_eq!(flags[3], None);
    }

    #[test]
    fn clean_in_vocabulary_word_is_kept() {
        let words: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let flags = apply_exclusions(&words, &[false, false, false]);
        assert_eq!(flags, vec![None, None, None]);
    }

    #[test]
    fn oov_is_lowest_precedence() {
        let words: Vec<String> = ["end.", "rare"].iter().map(|s| s.to_string()).collect();
        let flags = apply_exclusions(&words, &[true, true]);
        assert_eq!(flags[0], Some(ExclusionReason::NonAlphabetic));
        assert_eq!(flags[1], Some(ExclusionReason::AdjacentPunctuation));

        let words: Vec<String> = ["fine", "rare", "fine"].iter().map(|s| s.to_string()).collect();
        let flags = apply_exclusions(&words, &[false, true, false]);
        assert_eq!(flags[1], Some(ExclusionReason::Oov));
    }

    #[test]
    fn single_and_multi_token_surprisal_sums() {
        let corpus = sentences(&["the cat sat", "the dog sat", "the cat ran"]);
        let model = orth_model(&corpus);

        // Single token: equals the direct logprob, negated and in bits.
        let tw = tokenize_word("cat", SchemeId::Orthographic, &Resources::default()).unwrap();
        let mut ctx = vec![BOS_ID];
        let the = model.vocab().id("the").unwrap();
        ctx.push(the);
        let before = ctx.clone();
        let (bits, oov) = word_surprisal(&model, &tw, WORD_INITIAL_MARKER, &mut ctx);
        assert!(!oov);
        let direct = -model.logprob_ids(model.vocab().id("cat").unwrap(), &before)
            / std::f64::consts::LN_2;
        assert_eq!(bits, direct);

        // Multi token: equals the sum of two separate logprob calls.
        let lex = crate::tokenize::SegmentationLexicon::from_entries([(
            "cats".to_string(),
            vec!["cat".to_string(), "s".to_string()],
        )])
        .unwrap();
        let tw = segment("cats", &lex);
        let mut ctx = vec![BOS_ID, the];
        let (bits, _) = word_surprisal(&model, &tw, "", &mut ctx);
        let cat = model.vocab().id("cat").unwrap();
        let s_id = model.vocab().id_or_unk("s");
        let part1 = -model.logprob_ids(cat, &[BOS_ID, the]) / std::f64::consts::LN_2;
        let part2 = -model.logprob_ids(s_id, &[BOS_ID, the, cat]) / std::f64::consts::LN_2;
        assert!((bits - (part1 + part2)).abs() < 1e-15);
        assert_eq!(ctx, vec![BOS_ID, the, cat, s_id]);
    }

    fn segment(word: &str, lex: &crate::tokenize::SegmentationLexicon) -> TokenizedWord {
        crate::tokenize::segment_morph(word, lex).unwrap()
    }

    #[test]
    fn sentence_boundaries_reset_context() {
        let corpus = sentences(&["the cat sat", "the dog sat"]);
        let model = orth_model(&corpus);
        let freq = build_frequency_table(&corpus).unwrap();
        let records = rt_records("t1", &["the", "cat", "sat.", "the", "dog"]);
        let texts = group_rt_texts(&records);
        assert_eq!(texts[0].sentences.len(), 2);

        let ws = compute_surprisals(
            &model,
            SchemeId::Orthographic,
            &Resources::default(),
            WORD_INITIAL_MARKER,
            &texts,
            &freq,
        )
        .unwrap();
        // "the" at position 3 starts a fresh sentence: same surprisal as the
        // text-initial "the".
        assert_eq!(ws[0].surprisal_bits, ws[3].surprisal_bits);
        // "sat." is non-alphabetic, neighbors are adjacent-punctuation.
        assert_eq!(ws[2].excluded, Some(ExclusionReason::NonAlphabetic));
        assert_eq!(ws[1].excluded, Some(ExclusionReason::AdjacentPunctuation));
        assert_eq!(ws[3].excluded, Some(ExclusionReason::AdjacentPunctuation));
        assert_eq!(ws[0].excluded, None);
    }

    #[test]
    fn alignment_propagates_oov_across_schemes() {
        let mk = |excluded| WordSurprisal {
            text_id: "t".into(),
            word_index: 0,
            word: "w".into(),
            scheme: SchemeId::Orthographic,
            tokens: vec!["w".into()],
            surprisal_bits: 1.0,
            excluded,
        };
        let mut per_scheme = vec![
            vec![mk(None), mk(None)],
            vec![mk(Some(ExclusionReason::Oov)), mk(None)],
        ];
        align_exclusions(&mut per_scheme);
        assert_eq!(per_scheme[0][0].excluded, Some(ExclusionReason::Oov));
        assert_eq!(per_scheme[0][1].excluded, None);
        assert_eq!(per_scheme[1][1].excluded, None);

        // Alignment never increases the kept count.
        let kept: usize = per_scheme[0].iter().filter(|w| w.kept()).count();
        assert_eq!(kept, 1);
    }

    #[test]
    fn feature_rows_respect_boundaries_and_arity() {
        let corpus = sentences(&["the cat sat on the mat", "the dog sat on a log"]);
        let model = orth_model(&corpus);
        let freq = build_frequency_table(&corpus).unwrap();
        let records = rt_records("t1", &["the", "cat", "sat", "on", "the", "mat"]);
        let texts = group_rt_texts(&records);
        let ws = compute_surprisals(
            &model,
            SchemeId::Orthographic,
            &Resources::default(),
            WORD_INITIAL_MARKER,
            &texts,
            &freq,
        )
        .unwrap();
        let rows = build_feature_rows(&texts, &ws, &freq, 1).unwrap();
        // First word has no predecessor: no row for index 0.
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].word_index, 1);
        // K=1: two lags of three features each.
        assert_eq!(rows[0].lags.len(), 2);
        assert!((rows[0].lags[1].length - 3.0).abs() < 1e-12); // "the"
        assert!((rows[0].lags[1].log_freq - (freq.count("the") as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn eligible_row_count_matches_brute_force_scan() {
        let corpus = sentences(&["a b c d e f g", "b c a f e d g"]);
        let model = orth_model(&corpus);
        let freq = build_frequency_table(&corpus).unwrap();
        // Mix in exclusions via punctuation and an OOV word.
        let records = rt_records(
            "t1",
            &["a", "b", "c.", "d", "e", "zzz", "f", "g", "a", "b", "c", "d"],
        );
        let texts = group_rt_texts(&records);
        let ws = compute_surprisals(
            &model,
            SchemeId::Orthographic,
            &Resources::default(),
            WORD_INITIAL_MARKER,
            &texts,
            &freq,
        )
        .unwrap();
        for k in [1usize, 3] {
            let rows = build_feature_rows(&texts, &ws, &freq, k).unwrap();
            // Independent eligibility scan over the kept flags.
            let kept: Vec<bool> = ws.iter().map(|w| w.kept()).collect();
            let expected = (0..kept.len())
                .filter(|&i| i >= k && (0..=k).all(|lag| kept[i - lag]))
                .count();
            assert_eq!(rows.len(), expected, "k = {k}");
        }
    }

    #[test]
    fn feature_dump_has_expected_header() {
        let rows = vec![FeatureRow {
            text_id: "t1".into(),
            word_index: 3,
            rt_ms: 250.0,
            fold_id: 2,
            lags: vec![
                LagFeatures {
                    surprisal: 5.25,
                    length: 3.0,
                    log_freq: 1.0,
                },
                LagFeatures {
                    surprisal: 4.0,
                    length: 5.0,
                    log_freq: 2.0,
                },
            ],
        }];
        let file = tempfile::NamedTempFile::new().unwrap();
        dump_feature_rows(file.path(), &rows).unwrap();
        let text = std::fs::read_to_string(file.path()).unwrap();
        assert!(text.starts_with("text_id\tword_index\trt_ms\tfold\ts0\tlen0\tf0\ts1\tlen1\tf1\n"));
        assert!(text.contains("t1\t3\t250\t2\t5.250000\t3\t1.000000"));
    }
}
