//! Evaluation orchestration: scheme-consistent 10-fold cross-validation,
//! rank-sum comparisons against the orthographic baseline, segmentation
//! tables, surprisal-by-token-count distributions, whole-versus-split
//! replications, and item-wise difference reports, assembled into one JSON
//! report plus plot-ready CSVs.

pub mod stats;
pub mod stopwords;
pub mod wilcoxon;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{FrequencyTable, RTRecord};
use crate::error::{Error, Result};
use crate::ngram::NGramModel;
use crate::regression::{
    baseline_predictors, cohens_f2, delta_loglik, fit_ols, fit_report, full_predictors, FitReport,
};
use crate::surprisal::{
    align_exclusions, build_feature_rows, compute_surprisals, group_rt_texts, FeatureRow,
    WordSurprisal,
};
use crate::tokenize::{Resources, SchemeId};

pub use stats::{
    item_diff_report, segmentation_stats, surprisal_by_token_count, ItemDiff, SegmentationRow,
    SegmentationTable, TokenCountSummary,
};
pub use stopwords::StopwordList;
pub use wilcoxon::{wilcoxon_rank_sum, RankSumTest};

/// Deterministic mapping from row keys to folds: a seeded shuffle of the
/// sorted key set dealt round-robin. A function of (key set, seed) only, so
/// every scheme sees identical folds.
#[derive(Debug, Clone)]
pub struct FoldAssignment {
    pub seed: u64,
    pub fold_count: usize,
    folds: BTreeMap<(String, u32), u8>,
}

impl FoldAssignment {
    pub fn new(
        keys: impl IntoIterator<Item = (String, u32)>,
        fold_count: usize,
        seed: u64,
    ) -> Self {
        assert!(fold_count >= 2 && fold_count <= u8::MAX as usize);
        let mut keys: Vec<(String, u32)> = keys.into_iter().collect();
        keys.sort();
        keys.dedup();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        keys.shuffle(&mut rng);
        let folds = keys
            .into_iter()
            .enumerate()
            .map(|(i, key)| (key, (i % fold_count) as u8))
            .collect();
        FoldAssignment {
            seed,
            fold_count,
            folds,
        }
    }

    pub fn fold_of(&self, key: &(String, u32)) -> Option<u8> {
        self.folds.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    /// Stamps fold ids onto rows; every row key must be assigned.
    pub fn apply(&self, rows: &mut [FeatureRow]) -> Result<()> {
        for row in rows.iter_mut() {
            row.fold_id = self.fold_of(&row.key()).ok_or_else(|| {
                Error::Validation(format!(
                    "row ({}, {}) has no fold assignment",
                    row.text_id, row.word_index
                ))
            })?;
        }
        Ok(())
    }
}

/// Held-out per-token ΔLogLik for each fold: baseline and full models are
/// fit on the other folds and evaluated on the held-out one, with training
/// coefficients and training residual variance.
pub fn cross_validate(rows: &[FeatureRow], spillover: usize, fold_count: usize) -> Result<Vec<f64>> {
    let base = baseline_predictors(spillover);
    let full = full_predictors(spillover);
    let needed = full.len() + 1;
    let mut out = Vec::with_capacity(fold_count);
    for fold in 0..fold_count {
        let train: Vec<FeatureRow> = rows
            .iter()
            .filter(|r| r.fold_id as usize != fold)
            .cloned()
            .collect();
        let test: Vec<FeatureRow> = rows
            .iter()
            .filter(|r| r.fold_id as usize == fold)
            .cloned()
            .collect();
        if test.is_empty() || train.len() <= needed {
            return Err(Error::FoldTooSmall {
                fold,
                rows: train.len().min(test.len()),
                needed,
            });
        }
        let base_fit = fit_ols(&train, &base)?;
        let full_fit = fit_ols(&train, &full)?;
        let ll_base = base_fit.heldout_loglik(&test, &base);
        let ll_full = full_fit.heldout_loglik(&test, &full);
        out.push((ll_full - ll_base) / test.len() as f64);
    }
    Ok(out)
}

/// Cross-validation over all schemes at once, requiring the schemes to
/// share the same row keys (alignment mode).
pub fn cross_validate_schemes(
    rows_per_scheme: &BTreeMap<SchemeId, Vec<FeatureRow>>,
    spillover: usize,
    fold_count: usize,
) -> Result<BTreeMap<SchemeId, Vec<f64>>> {
    let mut reference: Option<Vec<(String, u32)>> = None;
    for (scheme, rows) in rows_per_scheme {
        let mut keys: Vec<(String, u32)> = rows.iter().map(FeatureRow::key).collect();
        keys.sort();
        match &reference {
            None => reference = Some(keys),
            Some(expected) => {
                if *expected != keys {
                    return Err(Error::Validation(format!(
                        "scheme {scheme} has different row keys; cross-validation requires aligned rows"
                    )));
                }
            }
        }
    }
    rows_per_scheme
        .iter()
        .map(|(&scheme, rows)| Ok((scheme, cross_validate(rows, spillover, fold_count)?)))
        .collect()
}

/// Cross-validation results for one token-count subset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetCrossVal {
    pub rows: usize,
    pub fold_count: usize,
    pub fold_delta_loglik: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WholeVsSplit {
    pub whole: Option<SubsetCrossVal>,
    pub split: Option<SubsetCrossVal>,
}

/// Replicates the cross-validated analysis separately for unsplit
/// (token_count = 1) and split (token_count > 1) words. Subsets too small
/// for the requested fold count fall back to the largest feasible count;
/// empty or infeasible subsets are skipped.
pub fn whole_vs_split_analysis(
    rows: &[FeatureRow],
    token_counts: &HashMap<(String, u32), usize>,
    spillover: usize,
    seed: u64,
    max_folds: usize,
) -> Result<WholeVsSplit> {
    let mut whole = Vec::new();
    let mut split = Vec::new();
    for row in rows {
        let k = token_counts.get(&row.key()).ok_or_else(|| {
            Error::Validation(format!(
                "no token count for row ({}, {})",
                row.text_id, row.word_index
            ))
        })?;
        if *k == 1 {
            whole.push(row.clone());
        } else {
            split.push(row.clone());
        }
    }
    debug_assert_eq!(whole.len() + split.len(), rows.len());
    Ok(WholeVsSplit {
        whole: subset_crossval(whole, spillover, seed, max_folds)?,
        split: subset_crossval(split, spillover, seed, max_folds)?,
    })
}

fn subset_crossval(
    mut rows: Vec<FeatureRow>,
    spillover: usize,
    seed: u64,
    max_folds: usize,
) -> Result<Option<SubsetCrossVal>> {
    if rows.is_empty() {
        return Ok(None);
    }
    let n = rows.len();
    let needed = full_predictors(spillover).len() + 1;
    let feasible = (2..=max_folds)
        .rev()
        .find(|&f| f <= n && n - n.div_ceil(f) > needed);
    let Some(fold_count) = feasible else {
        log::warn!("subset of {n} rows is too small for cross-validation; skipping");
        return Ok(None);
    };
    if fold_count < max_folds {
        log::warn!("subset of {n} rows reduced to {fold_count} folds");
    }
    let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), fold_count, seed);
    folds.apply(&mut rows)?;
    Ok(Some(SubsetCrossVal {
        rows: n,
        fold_count,
        fold_delta_loglik: cross_validate(&rows, spillover, fold_count)?,
    }))
}

/// One reading-time corpus to evaluate.
#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub name: String,
    pub records: Vec<RTRecord>,
    pub spillover: usize,
}

#[derive(Debug, Clone)]
pub struct EvaluationConfig {
    pub seed: u64,
    pub fold_count: usize,
    pub alignment: bool,
    pub marker: String,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            seed: 42,
            fold_count: 10,
            alignment: true,
            marker: crate::tokenize::WORD_INITIAL_MARKER.to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeReport {
    pub kept_words: usize,
    pub rows: usize,
    pub full_delta_loglik: f64,
    pub cohens_f2: f64,
    pub fold_delta_loglik: Vec<f64>,
    pub full_fit: FitReport,
    pub segmentation: SegmentationTable,
    pub surprisal_by_token_count: Vec<TokenCountSummary>,
    pub whole_vs_split: WholeVsSplit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusReport {
    pub spillover: usize,
    pub total_words: usize,
    pub schemes: BTreeMap<String, SchemeReport>,
    pub rank_sum_vs_orthographic: BTreeMap<String, RankSumTest>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub seed: u64,
    pub fold_count: usize,
    pub alignment: bool,
    pub marker: String,
    pub stopword_sha256: Option<String>,
    pub schemes: Vec<SchemeId>,
    pub corpora: BTreeMap<String, CorpusReport>,
}

/// Everything a run produces: the report, the full item-difference
/// listings backing `item_diff.csv`, and the assembled feature rows so
/// callers can persist them.
#[derive(Debug, Clone)]
pub struct EvaluationOutcome {
    pub report: EvaluationReport,
    /// (corpus, scheme_a, scheme_b) -> rows sorted by |difference|.
    pub item_diffs: Vec<(String, SchemeId, SchemeId, Vec<ItemDiff>)>,
    /// (corpus, scheme) -> regression rows with fold ids stamped.
    pub feature_rows: Vec<(String, SchemeId, Vec<FeatureRow>)>,
}

/// Runs the full evaluation over every corpus and scheme.
pub fn run_evaluation(
    models: &BTreeMap<SchemeId, NGramModel>,
    resources: &Resources,
    freq: &FrequencyTable,
    corpora: &[CorpusSpec],
    stopwords: &StopwordList,
    config: &EvaluationConfig,
) -> Result<EvaluationOutcome> {
    if models.is_empty() {
        return Err(Error::Config("no schemes to evaluate".into()));
    }
    let schemes: Vec<SchemeId> = models.keys().copied().collect();
    let mut corpora_reports = BTreeMap::new();
    let mut item_diffs = Vec::new();
    let mut feature_rows = Vec::new();

    for corpus in corpora {
        let texts = group_rt_texts(&corpus.records);
        let total_words: usize = texts.iter().map(|t| t.words().count()).sum();

        let mut surprisals: Vec<Vec<WordSurprisal>> = schemes
            .iter()
            .map(|&scheme| {
                compute_surprisals(
                    &models[&scheme],
                    scheme,
                    resources,
                    &config.marker,
                    &texts,
                    freq,
                )
            })
            .collect::<Result<_>>()?;
        if config.alignment {
            align_exclusions(&mut surprisals);
        }

        let mut rows_per_scheme: BTreeMap<SchemeId, Vec<FeatureRow>> = BTreeMap::new();
        for (scheme, ws) in schemes.iter().zip(&surprisals) {
            rows_per_scheme.insert(
                *scheme,
                build_feature_rows(&texts, ws, freq, corpus.spillover)?,
            );
        }

        // One fold assignment per corpus, shared by every scheme.
        let all_keys = rows_per_scheme
            .values()
            .flat_map(|rows| rows.iter().map(FeatureRow::key));
        let folds = FoldAssignment::new(all_keys, config.fold_count, config.seed);
        for rows in rows_per_scheme.values_mut() {
            folds.apply(rows)?;
        }

        let fold_lls: BTreeMap<SchemeId, Vec<f64>> = if config.alignment {
            cross_validate_schemes(&rows_per_scheme, corpus.spillover, config.fold_count)?
        } else {
            rows_per_scheme
                .iter()
                .map(|(&s, rows)| Ok((s, cross_validate(rows, corpus.spillover, config.fold_count)?)))
                .collect::<Result<_>>()?
        };

        let base_preds = baseline_predictors(corpus.spillover);
        let full_preds = full_predictors(corpus.spillover);
        let mut scheme_reports = BTreeMap::new();
        for (scheme, ws) in schemes.iter().zip(&surprisals) {
            let rows = &rows_per_scheme[scheme];
            let base_fit = fit_ols(rows, &base_preds)?;
            let full_fit = fit_ols(rows, &full_preds)?;
            let delta = delta_loglik(rows, &base_preds, &full_preds)?;
            let f2 = cohens_f2(&base_fit, &full_fit)?;
            let token_counts: HashMap<(String, u32), usize> = ws
                .iter()
                .map(|w| (w.key(), w.token_count()))
                .collect();
            scheme_reports.insert(
                scheme.to_string(),
                SchemeReport {
                    kept_words: ws.iter().filter(|w| w.kept()).count(),
                    rows: rows.len(),
                    full_delta_loglik: delta.value,
                    cohens_f2: f2,
                    fold_delta_loglik: fold_lls[scheme].clone(),
                    full_fit: fit_report(&full_fit)?,
                    segmentation: segmentation_stats(ws, stopwords)?,
                    surprisal_by_token_count: surprisal_by_token_count(ws, false),
                    whole_vs_split: whole_vs_split_analysis(
                        rows,
                        &token_counts,
                        corpus.spillover,
                        config.seed,
                        config.fold_count,
                    )?,
                },
            );
        }

        let mut rank_sums = BTreeMap::new();
        if let Some(orth_folds) = fold_lls.get(&SchemeId::Orthographic) {
            for (&scheme, lls) in &fold_lls {
                if scheme != SchemeId::Orthographic {
                    rank_sums.insert(
                        scheme.to_string(),
                        wilcoxon_rank_sum(lls, orth_folds)?,
                    );
                }
            }
        }

        for i in 0..schemes.len() {
            for j in i + 1..schemes.len() {
                item_diffs.push((
                    corpus.name.clone(),
                    schemes[i],
                    schemes[j],
                    item_diff_report(&surprisals[i], &surprisals[j], &texts)?,
                ));
            }
        }

        corpora_reports.insert(
            corpus.name.clone(),
            CorpusReport {
                spillover: corpus.spillover,
                total_words,
                schemes: scheme_reports,
                rank_sum_vs_orthographic: rank_sums,
            },
        );
        for (scheme, rows) in rows_per_scheme {
            feature_rows.push((corpus.name.clone(), scheme, rows));
        }
    }

    Ok(EvaluationOutcome {
        report: EvaluationReport {
            schema_version: 1,
            seed: config.seed,
            fold_count: config.fold_count,
            alignment: config.alignment,
            marker: config.marker.clone(),
            stopword_sha256: stopwords.sha256().map(str::to_owned),
            schemes,
            corpora: corpora_reports,
        },
        item_diffs,
        feature_rows,
    })
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Writes `report.json` plus the per-figure CSVs into `out_dir`. Returns
/// the paths written.
pub fn write_outcome(out_dir: impl AsRef<Path>, outcome: &EvaluationOutcome) -> Result<Vec<PathBuf>> {
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();

    let report_path = out_dir.join("report.json");
    let mut json = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| Error::Validation(format!("report serialization failed: {e}")))?;
    json.push('\n');
    fs::write(&report_path, json).map_err(|e| Error::io(&report_path, e))?;
    written.push(report_path);

    let report = &outcome.report;
    let mut crossval = String::from("corpus,scheme,fold,delta_loglik\n");
    let mut segmentation = String::from(
        "corpus,scheme,token_count,percent_all,percent_excluding_stopwords,words_all,words_excluding_stopwords\n",
    );
    let mut by_k = String::from("corpus,scheme,token_count,words,mean,q1,median,q3\n");
    let mut whole_split = String::from("corpus,scheme,subset,fold,delta_loglik\n");
    for (corpus, corpus_report) in &report.corpora {
        for (scheme, sr) in &corpus_report.schemes {
            for (fold, ll) in sr.fold_delta_loglik.iter().enumerate() {
                crossval.push_str(&format!("{corpus},{scheme},{fold},{ll:.8}\n"));
            }
            for row in &sr.segmentation.rows {
                segmentation.push_str(&format!(
                    "{corpus},{scheme},{},{:.3},{:.3},{},{}\n",
                    row.token_count,
                    row.percent_all,
                    row.percent_excluding_stopwords,
                    row.words_all,
                    row.words_excluding_stopwords
                ));
            }
            for s in &sr.surprisal_by_token_count {
                by_k.push_str(&format!(
                    "{corpus},{scheme},{},{},{:.6},{:.6},{:.6},{:.6}\n",
                    s.token_count, s.words, s.mean, s.q1, s.median, s.q3
                ));
            }
            for (subset, cv) in [("whole", &sr.whole_vs_split.whole), ("split", &sr.whole_vs_split.split)] {
                if let Some(cv) = cv {
                    for (fold, ll) in cv.fold_delta_loglik.iter().enumerate() {
                        whole_split.push_str(&format!("{corpus},{scheme},{subset},{fold},{ll:.8}\n"));
                    }
                }
            }
        }
    }

    let mut item_diff = String::from(
        "corpus,scheme_a,scheme_b,text_id,word_index,word,tokens_a,tokens_b,surprisal_a,surprisal_b,difference,sentence\n",
    );
    for (corpus, a, b, rows) in &outcome.item_diffs {
        for row in rows {
            item_diff.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6},{}\n",
                csv_escape(corpus),
                a,
                b,
                csv_escape(&row.text_id),
                row.word_index,
                csv_escape(&row.word),
                csv_escape(&row.tokens_a),
                csv_escape(&row.tokens_b),
                row.surprisal_a,
                row.surprisal_b,
                row.difference,
                csv_escape(&row.sentence)
            ));
        }
    }

    for (name, contents) in [
        ("crossval.csv", crossval),
        ("segmentation.csv", segmentation),
        ("surprisal_by_k.csv", by_k),
        ("whole_vs_split.csv", whole_split),
        ("item_diff.csv", item_diff),
    ] {
        let path = out_dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surprisal::LagFeatures;
    use rand::prelude::*;

    fn synthetic_rows(n: usize, beta_s: f64, noise: f64, seed: u64) -> Vec<FeatureRow> {
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
                let eps: f64 = (0..12).map(|_| rng.random::<f64>() - 0.5).sum();
                FeatureRow {
                    text_id: format!("t{}", i % 7),
                    word_index: (i / 7) as u32,
                    rt_ms: 200.0 + beta_s * l0.surprisal + 0.5 * l0.length - 0.3 * l0.log_freq
                        + noise * eps,
                    fold_id: 0,
                    lags: vec![l0, l1],
                }
            })
            .collect()
    }

    #[test]
    fn fold_assignment_is_deterministic_and_partitioning() {
        let keys: Vec<(String, u32)> = (0..103).map(|i| (format!("t{}", i % 5), i)).collect();
        let a = FoldAssignment::new(keys.clone(), 10, 42);
        let mut shuffled = keys.clone();
        shuffled.reverse();
        let b = FoldAssignment::new(shuffled, 10, 42);
        for key in &keys {
            assert_eq!(a.fold_of(key), b.fold_of(key));
        }
        // Balanced partition: fold sizes differ by at most one.
        let mut sizes = [0usize; 10];
        for key in &keys {
            sizes[a.fold_of(key).unwrap() as usize] += 1;
        }
        assert_eq!(sizes.iter().sum::<usize>(), keys.len());
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);

        let c = FoldAssignment::new(keys.clone(), 10, 43);
        assert!(keys.iter().any(|k| a.fold_of(k) != c.fold_of(k)));
    }

    #[test]
    fn generative_fixture_has_positive_heldout_delta() {
        let mut rows = synthetic_rows(600, 2.0, 4.0, 9);
        let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), 10, 42);
        folds.apply(&mut rows).unwrap();
        let lls = cross_validate(&rows, 1, 10).unwrap();
        assert_eq!(lls.len(), 10);
        assert!(lls.iter().all(|&ll| ll > 0.0), "fold ΔLL: {lls:?}");
    }

    #[test]
    fn duplicated_scheme_gets_identical_folds() {
        let mut rows = synthetic_rows(300, 1.5, 5.0, 21);
        let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), 10, 7);
        folds.apply(&mut rows).unwrap();
        let mut per_scheme = BTreeMap::new();
        per_scheme.insert(SchemeId::Orthographic, rows.clone());
        per_scheme.insert(SchemeId::Bpe, rows.clone());
        let lls = cross_validate_schemes(&per_scheme, 1, 10).unwrap();
        assert_eq!(lls[&SchemeId::Orthographic], lls[&SchemeId::Bpe]);
    }

    #[test]
    fn misaligned_schemes_are_rejected() {
        let mut rows = synthetic_rows(300, 1.5, 5.0, 21);
        let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), 10, 7);
        folds.apply(&mut rows).unwrap();
        let mut fewer = rows.clone();
        fewer.pop();
        let mut per_scheme = BTreeMap::new();
        per_scheme.insert(SchemeId::Orthographic, rows);
        per_scheme.insert(SchemeId::Bpe, fewer);
        assert!(cross_validate_schemes(&per_scheme, 1, 10).is_err());
    }

    #[test]
    fn tiny_folds_error_out() {
        // Eight rows cannot populate ten folds.
        let mut rows = synthetic_rows(8, 2.0, 1.0, 3);
        let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), 10, 1);
        folds.apply(&mut rows).unwrap();
        assert!(matches!(
            cross_validate(&rows, 1, 10),
            Err(Error::FoldTooSmall { .. })
        ));
    }

    #[test]
    fn row_order_does_not_change_results() {
        let mut rows = synthetic_rows(300, 2.0, 5.0, 17);
        let folds = FoldAssignment::new(rows.iter().map(FeatureRow::key), 10, 42);
        folds.apply(&mut rows).unwrap();
        let forward = cross_validate(&rows, 1, 10).unwrap();
        rows.reverse();
        let backward = cross_validate(&rows, 1, 10).unwrap();
        for (a, b) in forward.iter().zip(&backward) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn whole_vs_split_partitions_rows() {
        let rows = synthetic_rows(400, 2.0, 4.0, 13);
        // Mark a third of the rows as split words.
        let token_counts: HashMap<(String, u32), usize> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.key(), if i % 3 == 0 { 2 } else { 1 }))
            .collect();
        let result = whole_vs_split_analysis(&rows, &token_counts, 1, 42, 10).unwrap();
        let whole = result.whole.unwrap();
        let split = result.split.unwrap();
        assert_eq!(whole.rows + split.rows, rows.len());
        assert_eq!(whole.fold_count, 10);
        assert_eq!(split.fold_count, 10);
        assert!(whole.fold_delta_loglik.iter().all(|&ll| ll > 0.0));
    }

    #[test]
    fn all_unsplit_leaves_split_subset_empty() {
        let rows = synthetic_rows(200, 2.0, 4.0, 14);
        let token_counts: HashMap<(String, u32), usize> =
            rows.iter().map(|r| (r.key(), 1)).collect();
        let result = whole_vs_split_analysis(&rows, &token_counts, 1, 42, 10).unwrap();
        assert!(result.whole.is_some());
        assert!(result.split.is_none());
    }

    #[test]
    fn small_subset_reduces_fold_count() {
        let rows = synthetic_rows(60, 2.0, 4.0, 15);
        // Nine split rows cannot fill ten folds; the largest feasible count
        // for the full model's seven parameters is nine.
        let token_counts: HashMap<(String, u32), usize> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.key(), if i < 9 { 2 } else { 1 }))
            .collect();
        let result = whole_vs_split_analysis(&rows, &token_counts, 1, 42, 10).unwrap();
        let split = result.split.unwrap();
        assert_eq!(split.rows, 9);
        assert_eq!(split.fold_count, 9);
        assert_eq!(split.fold_delta_loglik.len(), split.fold_count);

        // Too small for any fold count: skipped entirely.
        let token_counts: HashMap<(String, u32), usize> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.key(), if i < 5 { 2 } else { 1 }))
            .collect();
        let result = whole_vs_split_analysis(&rows, &token_counts, 1, 42, 10).unwrap();
        assert!(result.split.is_none());
    }
}
