//! Segmentation-level statistics: tokens-per-word tables, surprisal
//! distributions by token count, and item-wise surprisal differences
//! between two schemes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::stopwords::StopwordList;
use crate::surprisal::{RtText, WordSurprisal};

/// One tokens-per-word bucket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationRow {
    pub token_count: usize,
    pub percent_all: f64,
    pub percent_excluding_stopwords: f64,
    pub words_all: usize,
    pub words_excluding_stopwords: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationTable {
    pub rows: Vec<SegmentationRow>,
    pub total_words: usize,
    pub total_excluding_stopwords: usize,
}

/// Percentage of corpus words split into k tokens, with and without
/// stopwords. Computed over every corpus word, kept or excluded.
pub fn segmentation_stats(
    words: &[WordSurprisal],
    stopwords: &StopwordList,
) -> Result<SegmentationTable> {
    if words.is_empty() {
        return Err(Error::Validation(
            "segmentation statistics need at least one word".into(),
        ));
    }
    let mut all: BTreeMap<usize, usize> = BTreeMap::new();
    let mut content: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total_content = 0usize;
    for word in words {
        let k = word.token_count();
        *all.entry(k).or_insert(0) += 1;
        if !stopwords.contains(&word.word) {
            *content.entry(k).or_insert(0) += 1;
            total_content += 1;
        }
    }
    let total = words.len();
    let rows = all
        .iter()
        .map(|(&k, &count)| {
            let content_count = content.get(&k).copied().unwrap_or(0);
            SegmentationRow {
                token_count: k,
                percent_all: 100.0 * count as f64 / total as f64,
                percent_excluding_stopwords: if total_content == 0 {
                    0.0
                } else {
                    100.0 * content_count as f64 / total_content as f64
                },
                words_all: count,
                words_excluding_stopwords: content_count,
            }
        })
        .collect();
    Ok(SegmentationTable {
        rows,
        total_words: total,
        total_excluding_stopwords: total_content,
    })
}

/// Distribution summary of word surprisal for one token-count bucket.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenCountSummary {
    pub token_count: usize,
    pub words: usize,
    pub mean: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Summarizes kept-word surprisal per token count (set `include_excluded`
/// to cover every word instead).
pub fn surprisal_by_token_count(
    words: &[WordSurprisal],
    include_excluded: bool,
) -> Vec<TokenCountSummary> {
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for word in words {
        if include_excluded || word.kept() {
            groups
                .entry(word.token_count())
                .or_default()
                .push(word.surprisal_bits);
        }
    }
    groups
        .into_iter()
        .map(|(k, mut values)| {
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite surprisal"));
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            TokenCountSummary {
                token_count: k,
                words: values.len(),
                mean,
                q1: percentile(&values, 0.25),
                median: percentile(&values, 0.5),
                q3: percentile(&values, 0.75),
            }
        })
        .collect()
}

/// Linear-interpolation percentile over a sorted slice.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.len() == 1 {
        return sorted[0];
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// One row of the item-wise surprisal difference report.
#[derive(Debug, Clone, Serialize)]
pub struct ItemDiff {
    pub text_id: String,
    pub word_index: u32,
    pub word: String,
    pub tokens_a: String,
    pub tokens_b: String,
    pub surprisal_a: f64,
    pub surprisal_b: f64,
    pub difference: f64,
    pub sentence: String,
}

/// Per-word surprisal differences between two schemes over the same corpus,
/// sorted by absolute difference, largest first. Covers every word kept
/// under both schemes.
pub fn item_diff_report(
    a: &[WordSurprisal],
    b: &[WordSurprisal],
    texts: &[RtText],
) -> Result<Vec<ItemDiff>> {
    if a.len() != b.len() {
        return Err(Error::Validation(format!(
            "schemes cover {} and {} words; the same corpus is required",
            a.len(),
            b.len()
        )));
    }
    let mut sentences: HashMap<(String, u32), String> = HashMap::new();
    for text in texts {
        for sentence in &text.sentences {
            let joined = sentence
                .iter()
                .map(|r| r.word.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            for record in sentence {
                sentences.insert((record.text_id.clone(), record.word_index), joined.clone());
            }
        }
    }

    let mut rows = Vec::new();
    for (wa, wb) in a.iter().zip(b) {
        if wa.key() != wb.key() {
            return Err(Error::Validation(
                "scheme surprisals are not aligned by (text_id, word_index)".into(),
            ));
        }
        if !(wa.kept() && wb.kept()) {
            continue;
        }
        rows.push(ItemDiff {
            text_id: wa.text_id.clone(),
            word_index: wa.word_index,
            word: wa.word.clone(),
            tokens_a: wa.tokens.join(" "),
            tokens_b: wb.tokens.join(" "),
            surprisal_a: wa.surprisal_bits,
            surprisal_b: wb.surprisal_bits,
            difference: wa.surprisal_bits - wb.surprisal_bits,
            sentence: sentences
                .get(&wa.key())
                .cloned()
                .unwrap_or_default(),
        });
    }
    rows.sort_by(|x, y| {
        y.difference
            .abs()
            .partial_cmp(&x.difference.abs())
            .expect("finite differences")
            .then_with(|| (&x.text_id, x.word_index).cmp(&(&y.text_id, y.word_index)))
    });
    Ok(rows)
}
