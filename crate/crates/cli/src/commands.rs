//! Subcommand implementations. Each stage writes its artifacts under the
//! configured output directory; intermediate token streams and feature rows
//! are persisted so stages can be rerun independently.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use segsurp_core::corpus::{build_frequency_table, load_rt_corpus, load_training_corpus, FrequencyTable};
use segsurp_core::evaluation::{
    run_evaluation, write_outcome, CorpusSpec, EvaluationConfig, EvaluationReport, StopwordList,
};
use segsurp_core::ngram::{count_ngrams, estimate, export_arpa, import_arpa, NGramModel};
use segsurp_core::surprisal::dump_feature_rows;
use segsurp_core::tokenize::{
    dump_token_stream, scheme_training_corpus, stream_sentences, tokenize_corpus, train_bpe,
    MergeTable, Resources, SchemeId, SegmentationLexicon, WORD_INITIAL_MARKER,
};

use crate::config::RunConfig;
use crate::manifest::{hash_file, sha256_hex, Manifest};

const MERGES_OUT: &str = "bpe_merges.txt";
const FREQUENCY_OUT: &str = "frequency.tsv";

fn arpa_name(scheme: SchemeId) -> String {
    format!("{scheme}.arpa")
}

fn load_resources(config: &RunConfig, corpus: &[segsurp_core::Sentence]) -> Result<Resources> {
    let merges = if config.schemes.contains(&SchemeId::Bpe) {
        Some(match (&config.merge_file, config.bpe_merges_from_corpus) {
            (Some(path), None) => MergeTable::load(path)
                .with_context(|| format!("loading merge file {}", path.display()))?,
            (None, Some(n)) => {
                train_bpe(corpus, n).context("training BPE merges from the corpus")?
            }
            _ => unreachable!("validated by RunConfig"),
        })
    } else {
        None
    };
    let lexicon = match (&config.lexicon, config.schemes.contains(&SchemeId::Morphological)) {
        (Some(path), _) => Some(
            SegmentationLexicon::load(path)
                .with_context(|| format!("loading lexicon {}", path.display()))?,
        ),
        (None, false) => None,
        (None, true) => unreachable!("validated by RunConfig"),
    };
    Ok(Resources { merges, lexicon })
}

fn load_stopwords(config: &RunConfig) -> Result<StopwordList> {
    match &config.stopwords {
        Some(path) => StopwordList::load(path)
            .with_context(|| format!("loading stopwords {}", path.display())),
        None => Ok(StopwordList::empty()),
    }
}

/// Trains one ARPA model per scheme, dumping the token streams and the
/// frequency table, and records a manifest sufficient to reproduce the run.
pub fn cmd_train(config: &RunConfig) -> Result<()> {
    let corpus = load_training_corpus(&config.training_corpus).context("train: loading corpus")?;
    let resources = load_resources(config, &corpus).context("train: loading scheme resources")?;
    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("train: creating {}", config.out_dir.display()))?;

    let freq = build_frequency_table(&corpus).context("train: building frequency table")?;
    freq.export_tsv(config.out_dir.join(FREQUENCY_OUT))
        .context("train: writing frequency table")?;

    let mut outputs: BTreeMap<String, String> = BTreeMap::new();
    if let Some(merges) = &resources.merges {
        let path = config.out_dir.join(MERGES_OUT);
        merges.write(&path).context("train: writing merge table")?;
        outputs.insert(MERGES_OUT.into(), hash_file(&path)?);
    }

    for &scheme in &config.schemes {
        let source = scheme_training_corpus(&corpus, scheme);
        let tokenized = tokenize_corpus(&source, scheme, &resources)
            .with_context(|| format!("train: tokenizing under {scheme}"))?;
        let stream_path = config.out_dir.join(format!("{scheme}_stream.txt"));
        dump_token_stream(&stream_path, &tokenized, WORD_INITIAL_MARKER)
            .with_context(|| format!("train: dumping {scheme} token stream"))?;

        let stream = stream_sentences(&tokenized, WORD_INITIAL_MARKER);
        let counts = count_ngrams(&stream, config.order)
            .with_context(|| format!("train: counting {scheme} n-grams"))?;
        let model = estimate(counts).with_context(|| format!("train: estimating {scheme} model"))?;
        let arpa_path = config.out_dir.join(arpa_name(scheme));
        export_arpa(&model, &arpa_path)
            .with_context(|| format!("train: exporting {scheme} model"))?;
        outputs.insert(arpa_name(scheme), hash_file(&arpa_path)?);
        log::info!(
            "trained {scheme}: vocab {}, {} unigrams",
            model.vocab().len(),
            model.ngram_count(1)
        );
    }
    outputs.insert(
        FREQUENCY_OUT.into(),
        hash_file(config.out_dir.join(FREQUENCY_OUT))?,
    );

    let mut inputs = BTreeMap::new();
    inputs.insert("training_corpus".to_string(), hash_file(&config.training_corpus)?);
    if let Some(path) = &config.merge_file {
        inputs.insert("merge_file".to_string(), hash_file(path)?);
    }
    if let Some(path) = &config.lexicon {
        inputs.insert("lexicon".to_string(), hash_file(path)?);
    }
    if let Some(path) = &config.stopwords {
        inputs.insert("stopwords".to_string(), hash_file(path)?);
    }

    Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(&config.raw),
        seed: config.seed,
        order: config.order,
        schemes: config.schemes.iter().map(|s| s.to_string()).collect(),
        word_initial_marker: WORD_INITIAL_MARKER.to_string(),
        inputs,
        outputs,
    }
    .write(&config.out_dir)
    .context("train: writing manifest")?;

    println!(
        "train: wrote {} model(s) and manifest to {}",
        config.schemes.len(),
        config.out_dir.display()
    );
    Ok(())
}

struct TrainedModels {
    models: BTreeMap<SchemeId, NGramModel>,
    freq: FrequencyTable,
    merges: Option<MergeTable>,
}

fn load_models(config: &RunConfig, models_dir: &Path) -> Result<TrainedModels> {
    let manifest = Manifest::read(models_dir)?;
    if manifest.order != config.order {
        bail!(
            "manifest order {} does not match configured order {}; retrain",
            manifest.order,
            config.order
        );
    }
    for scheme in &config.schemes {
        if !manifest.schemes.iter().any(|s| s == &scheme.to_string()) {
            bail!("manifest lacks a model for scheme {scheme}; retrain with it enabled");
        }
    }

    let mut models = BTreeMap::new();
    for &scheme in &config.schemes {
        let name = arpa_name(scheme);
        manifest.verify_output(models_dir, &name)?;
        let model = import_arpa(models_dir.join(&name))
            .with_context(|| format!("importing {name}"))?;
        models.insert(scheme, model);
    }
    manifest.verify_output(models_dir, FREQUENCY_OUT)?;
    let freq = FrequencyTable::load_tsv(models_dir.join(FREQUENCY_OUT))
        .context("loading frequency table")?;
    let merges = if config.schemes.contains(&SchemeId::Bpe) {
        manifest.verify_output(models_dir, MERGES_OUT)?;
        Some(MergeTable::load(models_dir.join(MERGES_OUT)).context("loading trained merges")?)
    } else {
        None
    };
    Ok(TrainedModels { models, freq, merges })
}

/// Computes surprisals, fits the regressions, and writes the report JSON,
/// figure CSVs, and feature-row dumps.
pub fn cmd_evaluate(config: &RunConfig, models_dir: Option<PathBuf>) -> Result<()> {
    if config.rt_corpora.is_empty() {
        bail!("evaluate: config lists no rt_corpus.<name> entries");
    }
    let models_dir = models_dir.unwrap_or_else(|| config.out_dir.clone());
    let TrainedModels { models, freq, merges } =
        load_models(config, &models_dir).context("evaluate: loading models")?;

    let lexicon = match (&config.lexicon, config.schemes.contains(&SchemeId::Morphological)) {
        (Some(path), _) => Some(SegmentationLexicon::load(path).context("evaluate: loading lexicon")?),
        (None, false) => None,
        (None, true) => unreachable!("validated by RunConfig"),
    };
    let resources = Resources { merges, lexicon };
    let stopwords = load_stopwords(config).context("evaluate: loading stopwords")?;

    let mut corpora = Vec::new();
    for rt in &config.rt_corpora {
        corpora.push(CorpusSpec {
            name: rt.name.clone(),
            records: load_rt_corpus(&rt.path)
                .with_context(|| format!("evaluate: loading rt corpus {}", rt.name))?,
            spillover: rt.spillover,
        });
    }

    let outcome = run_evaluation(
        &models,
        &resources,
        &freq,
        &corpora,
        &stopwords,
        &EvaluationConfig {
            seed: config.seed,
            fold_count: 10,
            alignment: config.alignment,
            marker: WORD_INITIAL_MARKER.to_string(),
        },
    )
    .context("evaluate: running the analysis")?;

    let written = write_outcome(&config.out_dir, &outcome).context("evaluate: writing outputs")?;
    for (corpus, scheme, rows) in &outcome.feature_rows {
        let path = config.out_dir.join(format!("features_{corpus}_{scheme}.tsv"));
        dump_feature_rows(&path, rows)
            .with_context(|| format!("evaluate: dumping rows for {corpus}/{scheme}"))?;
    }

    // The evaluation gets its own manifest (the models directory already
    // holds the training one).
    let mut inputs = BTreeMap::new();
    for rt in &config.rt_corpora {
        inputs.insert(format!("rt_corpus.{}", rt.name), hash_file(&rt.path)?);
    }
    if let Some(path) = &config.stopwords {
        inputs.insert("stopwords".to_string(), hash_file(path)?);
    }
    if let Some(path) = &config.lexicon {
        inputs.insert("lexicon".to_string(), hash_file(path)?);
    }
    for &scheme in &config.schemes {
        inputs.insert(
            format!("model.{scheme}"),
            hash_file(models_dir.join(arpa_name(scheme)))?,
        );
    }
    let mut outputs = BTreeMap::new();
    for path in &written {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        outputs.insert(name, hash_file(path)?);
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_sha256: sha256_hex(&config.raw),
        seed: config.seed,
        order: config.order,
        schemes: config.schemes.iter().map(|s| s.to_string()).collect(),
        word_initial_marker: WORD_INITIAL_MARKER.to_string(),
        inputs,
        outputs,
    };
    let manifest_path = config.out_dir.join("evaluation_manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(&manifest_path, json)
        .with_context(|| format!("evaluate: writing {}", manifest_path.display()))?;

    println!(
        "evaluate: wrote report and {} CSV file(s) to {}",
        written.len() - 1,
        config.out_dir.display()
    );
    Ok(())
}

/// Prints side-by-side tokenizations of an input text, one labeled row per
/// scheme per sentence, markers stripped for readability.
pub fn cmd_tokenize(config: &RunConfig, input: &Path) -> Result<()> {
    let text = fs::read_to_string(input)
        .with_context(|| format!("tokenize: reading {}", input.display()))?;
    let sentences: Vec<Vec<String>> = text
        .lines()
        .map(|l| l.split_whitespace().map(str::to_owned).collect::<Vec<_>>())
        .filter(|words: &Vec<String>| !words.is_empty())
        .collect();
    if sentences.is_empty() {
        return Ok(());
    }
    // Resource loading may train merges from the corpus, which needs it.
    let corpus = match config.bpe_merges_from_corpus {
        Some(_) => load_training_corpus(&config.training_corpus)
            .context("tokenize: loading corpus for merge training")?,
        None => Vec::new(),
    };
    let resources = load_resources(config, &corpus).context("tokenize: loading resources")?;

    let width = config
        .schemes
        .iter()
        .map(|s| s.to_string().len())
        .max()
        .unwrap_or(0);
    let mut first = true;
    for words in &sentences {
        if !first {
            println!();
        }
        first = false;
        for &scheme in &config.schemes {
            let mut row: Vec<String> = Vec::new();
            for word in words {
                let tokenized = segsurp_core::tokenize::tokenize_word(word, scheme, &resources)
                    .with_context(|| format!("tokenize: {scheme} on {word:?}"))?;
                row.extend(tokenized.token_texts().iter().map(|t| t.to_string()));
            }
            println!("{:width$} : {}", scheme.to_string(), row.join(" "));
        }
    }
    Ok(())
}

/// Renders a report.json as readable tables.
pub fn cmd_report(report_path: &Path) -> Result<()> {
    let path = if report_path.is_dir() {
        report_path.join("report.json")
    } else {
        report_path.to_path_buf()
    };
    let bytes = fs::read(&path).with_context(|| format!("report: reading {}", path.display()))?;
    let report: EvaluationReport =
        serde_json::from_slice(&bytes).with_context(|| format!("report: parsing {}", path.display()))?;

    let scheme_names: Vec<String> = report.schemes.iter().map(|s| s.to_string()).collect();
    println!(
        "run: seed {}, {}-fold, alignment {}, schemes: {}",
        report.seed,
        report.fold_count,
        if report.alignment { "on" } else { "off" },
        scheme_names.join(", ")
    );
    if let Some(hash) = &report.stopword_sha256 {
        println!("stopword list sha256: {hash}");
    }

    for (corpus, cr) in &report.corpora {
        println!();
        println!(
            "corpus {corpus} (spillover {}, {} words)",
            cr.spillover, cr.total_words
        );
        println!(
            "  {:<14} {:>6} {:>10} {:>9} {:>10} {:>10}  vs orthographic",
            "scheme", "rows", "ΔLogLik", "f²", "CV mean", "CV sd"
        );
        for (scheme, sr) in &cr.schemes {
            let folds = &sr.fold_delta_loglik;
            let mean = folds.iter().sum::<f64>() / folds.len() as f64;
            let sd = (folds.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                / folds.len() as f64)
                .sqrt();
            let vs = cr
                .rank_sum_vs_orthographic
                .get(scheme)
                .map(|t| format!("W={:.1} p={:.3}", t.w, t.p))
                .unwrap_or_else(|| "-".to_string());
            println!(
                "  {:<14} {:>6} {:>10.6} {:>9.5} {:>10.6} {:>10.6}  {}",
                scheme, sr.rows, sr.full_delta_loglik, sr.cohens_f2, mean, sd, vs
            );
        }
        println!("  tokens per word (% all / % excluding stopwords):");
        for (scheme, sr) in &cr.schemes {
            let cells: Vec<String> = sr
                .segmentation
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "{}: {:.1}/{:.1}",
                        r.token_count, r.percent_all, r.percent_excluding_stopwords
                    )
                })
                .collect();
            println!("    {:<14} {}", scheme, cells.join("  "));
        }
    }
    Ok(())
}
