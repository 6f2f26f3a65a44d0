//! Run configuration: a flat key-value file with `#` comments. Environment
//! variables are never consulted; all input paths resolve relative to the
//! config file's directory so runs are hermetic.
//!
//! ```text
//! training_corpus = toy_corpus.txt
//! merge_file = gpt2_merges_sample.txt   # or: bpe_merges_from_corpus = 200
//! lexicon = lexicon.tsv
//! stopwords = stopwords.txt
//! order = 5
//! seed = 42
//! schemes = orthographic,bpe,morphological
//! alignment = on
//! out_dir = out
//! rt_corpus.eyetrack = toy_rt_eyetrack.tsv
//! spillover.eyetrack = 1
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use segsurp_core::tokenize::SchemeId;

#[derive(Debug, Clone)]
pub struct RtCorpusConfig {
    pub name: String,
    pub path: PathBuf,
    pub spillover: usize,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub training_corpus: PathBuf,
    pub merge_file: Option<PathBuf>,
    pub bpe_merges_from_corpus: Option<usize>,
    pub lexicon: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub order: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeId>,
    pub alignment: bool,
    pub out_dir: PathBuf,
    pub rt_corpora: Vec<RtCorpusConfig>,
    /// Raw config bytes, hashed into the manifest.
    pub raw: Vec<u8>,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read(path).with_context(|| format!("reading config {}", path.display()))?;
        let text = std::str::from_utf8(&raw)
            .with_context(|| format!("config {} is not UTF-8", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));

        let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected `key = value`", path.display(), idx + 1);
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if keys.insert(key.clone(), (idx + 1, value)).is_some() {
                bail!("{}:{}: duplicate key {key:?}", path.display(), idx + 1);
            }
        }

        let mut take = |key: &str| keys.remove(key).map(|(_, v)| v);
        let resolve = |value: &str| base.join(value);

        let training_corpus = resolve(
            &take("training_corpus").ok_or_else(|| anyhow!("config lacks training_corpus"))?,
        );
        let merge_file = take("merge_file").map(|v| resolve(&v));
        let bpe_merges_from_corpus = take("bpe_merges_from_corpus")
            .map(|v| v.parse::<usize>().context("bad bpe_merges_from_corpus"))
            .transpose()?;
        let lexicon = take("lexicon").map(|v| resolve(&v));
        let stopwords = take("stopwords").map(|v| resolve(&v));
        let order = take("order")
            .map(|v| v.parse::<usize>().context("bad order"))
            .transpose()?
            .unwrap_or(5);
        let seed = take("seed")
            .map(|v| v.parse::<u64>().context("bad seed"))
            .transpose()?
            .unwrap_or(42);
        let schemes = match take("schemes") {
            Some(list) => parse_schemes(&list)?,
            None => SchemeId::ALL.to_vec(),
        };
        let alignment = match take("alignment").as_deref() {
            None | Some("on") | Some("true") => true,
            Some("off") | Some("false") => false,
            Some(other) => bail!("alignment must be on or off, got {other:?}"),
        };
        let out_dir = resolve(&take("out_dir").unwrap_or_else(|| "out".to_string()));

        let mut rt_corpora = Vec::new();
        let rt_keys: Vec<String> = keys
            .keys()
            .filter(|k| k.starts_with("rt_corpus."))
            .cloned()
            .collect();
        for key in rt_keys {
            let name = key["rt_corpus.".len()..].to_string();
            let (_, value) = keys.remove(&key).expect("key listed above");
            let spillover = keys
                .remove(&format!("spillover.{name}"))
                .ok_or_else(|| anyhow!("rt corpus {name:?} lacks spillover.{name}"))?
                .1
                .parse::<usize>()
                .with_context(|| format!("bad spillover for {name:?}"))?;
            rt_corpora.push(RtCorpusConfig {
                name,
                path: resolve(&value),
                spillover,
            });
        }
        rt_corpora.sort_by(|a, b| a.name.cmp(&b.name));

        if let Some((key, (line, _))) = keys.into_iter().next() {
            bail!("{}:{}: unknown key {key:?}", path.display(), line);
        }

        let config = RunConfig {
            training_corpus,
            merge_file,
            bpe_merges_from_corpus,
            lexicon,
            stopwords,
            order,
            seed,
            schemes,
            alignment,
            out_dir,
            rt_corpora,
            raw,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.order < 2 {
            bail!("order must be at least 2, got {}", self.order);
        }
        if self.schemes.is_empty() {
            bail!("scheme list is empty");
        }
        let mut must_exist: Vec<(&str, &PathBuf)> = vec![("training_corpus", &self.training_corpus)];
        if self.schemes.contains(&SchemeId::Bpe) {
            match (&self.merge_file, self.bpe_merges_from_corpus) {
                (None, None) => bail!(
                    "BPE scheme requested but neither merge_file nor bpe_merges_from_corpus is set"
                ),
                (Some(_), Some(_)) => {
                    bail!("merge_file and bpe_merges_from_corpus are mutually exclusive")
                }
                (Some(path), None) => must_exist.push(("merge_file", path)),
                (None, Some(_)) => {}
            }
        }
        if self.schemes.contains(&SchemeId::Morphological) {
            match &self.lexicon {
                None => bail!("morphological scheme requested but lexicon is not set"),
                Some(path) => must_exist.push(("lexicon", path)),
            }
        }
        if let Some(path) = &self.stopwords {
            must_exist.push(("stopwords", path));
        }
        for rt in &self.rt_corpora {
            if rt.spillover != 1 && rt.spillover != 3 {
                bail!(
                    "spillover for {:?} must be 1 or 3, got {}",
                    rt.name,
                    rt.spillover
                );
            }
            must_exist.push(("rt_corpus", &rt.path));
        }
        for (what, path) in must_exist {
            if !path.exists() {
                bail!("{what} path does not exist: {}", path.display());
            }
        }
        Ok(())
    }

    /// Applies command-line overrides, revalidating afterwards.
    pub fn with_overrides(
        mut self,
        schemes: Option<&str>,
        seed: Option<u64>,
        out: Option<PathBuf>,
    ) -> Result<Self> {
        if let Some(list) = schemes {
            self.schemes = parse_schemes(list)?;
        }
        if let Some(seed) = seed {
            self.seed = seed;
        }
        if let Some(out) = out {
            self.out_dir = out;
        }
        self.validate()?;
        Ok(self)
    }
}

pub fn parse_schemes(list: &str) -> Result<Vec<SchemeId>> {
    let mut schemes = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let scheme: SchemeId = part
            .parse()
            .map_err(|e: segsurp_core::Error| anyhow!("{e}"))?;
        if !schemes.contains(&scheme) {
            schemes.push(scheme);
        }
    }
    if schemes.is_empty() {
        bail!("scheme list is empty; valid schemes: orthographic, bpe, morphological");
    }
    Ok(schemes)
}
