//! Training-corpus, reading-time-corpus, and frequency-table ingestion.
//!
//! Formats are deliberately plain: training text is one sentence per line
//! with whitespace-delimited words; reading-time data is a four-column TSV
//! (`text_id`, `word_index`, `word`, `rt_ms`); frequency tables export as
//! `word\tcount` sorted by descending count. Loaded values are immutable,
//! so they can be shared freely across threads afterwards.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One training sentence: an id and its surface words in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text_id: String,
    pub words: Vec<String>,
}

/// One averaged reading-time observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RTRecord {
    pub text_id: String,
    pub word_index: u32,
    pub word: String,
    pub rt_ms: f64,
}

/// Unigram counts over normalized orthographic words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    counts: BTreeMap<String, u64>,
    total: u64,
}

/// Canonical word normalization used for frequency counting and the
/// orthographic token stream: Unicode lowercasing, nothing else.
pub fn normalize_word(word: &str) -> String {
    word.to_lowercase()
}

/// Reads a one-sentence-per-line training corpus. Blank lines are skipped;
/// sentence ids are the 1-based line numbers of the source file.
pub fn load_training_corpus(path: impl AsRef<Path>) -> Result<Vec<Sentence>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = decode_utf8(&bytes, path)?;

    let mut sentences = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let words: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if words.is_empty() {
            continue;
        }
        sentences.push(Sentence {
            text_id: format!("{}", lineno + 1),
            words,
        });
    }
    if sentences.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Ok(sentences)
}

/// Writes a corpus back out in the same one-sentence-per-line format.
pub fn write_training_corpus(path: impl AsRef<Path>, corpus: &[Sentence]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for sentence in corpus {
        out.push_str(&sentence.words.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

const RT_COLUMNS: [&str; 4] = ["text_id", "word_index", "word", "rt_ms"];

/// Reads a reading-time corpus TSV. The header must name exactly the four
/// expected columns; `(text_id, word_index)` pairs must be unique and
/// `rt_ms` strictly positive.
pub fn load_rt_corpus(path: impl AsRef<Path>) -> Result<Vec<RTRecord>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = decode_utf8(&bytes, path)?;

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyCorpus(path.display().to_string()))?;
    let found: Vec<String> = header.split('\t').map(str::to_owned).collect();
    if found != RT_COLUMNS {
        return Err(Error::Schema {
            path: path.to_owned(),
            expected: RT_COLUMNS.iter().map(|s| s.to_string()).collect(),
            found,
        });
    }

    let mut records = Vec::new();
    let mut seen: HashSet<(String, u32)> = HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let word_index: u32 = fields[1]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad word_index {:?}", fields[1])))?;
        let rt_ms: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad rt_ms {:?}", fields[3])))?;
        if !rt_ms.is_finite() || rt_ms <= 0.0 {
            return Err(Error::Validation(format!(
                "{}:{}: rt_ms must be positive, got {}",
                path.display(),
                lineno,
                rt_ms
            )));
        }
        let word = fields[2].trim();
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(Error::parse(path, lineno, format!("bad word {:?}", word)));
        }
        let key = (fields[0].to_owned(), word_index);
        if !seen.insert(key.clone()) {
            return Err(Error::Validation(format!(
                "{}:{}: duplicate (text_id, word_index) = ({}, {})",
                path.display(),
                lineno,
                key.0,
                key.1
            )));
        }
        records.push(RTRecord {
            text_id: fields[0].to_owned(),
            word_index,
            word: word.to_owned(),
            rt_ms,
        });
    }
    Ok(records)
}

/// Writes a reading-time corpus in the canonical TSV layout.
pub fn write_rt_corpus(path: impl AsRef<Path>, records: &[RTRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("text_id\tword_index\tword\trt_ms\n");
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.text_id, r.word_index, r.word, r.rt_ms
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Counts normalized words over a training corpus.
pub fn build_frequency_table(corpus: &[Sentence]) -> Result<FrequencyTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus("frequency table input".into()));
    }
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0u64;
    for sentence in corpus {
        for word in &sentence.words {
            *counts.entry(normalize_word(word)).or_insert(0) += 1;
            total += 1;
        }
    }
    Ok(FrequencyTable { counts, total })
}

impl FrequencyTable {
    /// Count of a word after normalization; 0 when absent.
    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(&normalize_word(word)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &c)| (w.as_str(), c))
    }

    /// Writes `word\tcount`, descending by count then lexicographic.
    pub fn export_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut rows: Vec<(&str, u64)> = self.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        for (word, count) in rows {
            writeln!(file, "{word}\t{count}").map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }

    pub fn from_counts(counts: HashMap<String, u64>) -> Self {
        let counts: BTreeMap<String, u64> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let total = counts.values().sum();
        FrequencyTable { counts, total }
    }

    /// Reads a `word\tcount` TSV written by [`Self::export_tsv`].
    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut counts = BTreeMap::new();
        let mut total = 0u64;
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let Some((word, count)) = line.split_once('\t') else {
                return Err(Error::parse(path, idx + 1, "expected `word\\tcount`"));
            };
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("bad count {count:?}")))?;
            if count == 0 {
                return Err(Error::parse(path, idx + 1, "stored counts must be positive"));
            }
            if counts.insert(word.to_owned(), count).is_some() {
                return Err(Error::parse(path, idx + 1, format!("duplicate word {word:?}")));
            }
            total += count;
        }
        Ok(FrequencyTable { counts, total })
    }
}

fn decode_utf8<'a>(bytes: &'a [u8], path: &Path) -> Result<&'a str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        Error::Decode {
            path: path.to_owned(),
            line,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn temp_with(contents: &[u8]) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(contents).unwrap();
        f.flush().unwrap();
        f
    }

    #[test]
    fn loads_single_sentence() {
        let f = temp_with(b"the cat sat\n");
        let corpus = load_training_corpus(f.path()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].words, vec!["the", "cat", "sat"]);
    }

    #[test]
    fn skips_blank_lines() {
        let f = temp_with(b"a b\n\nc d\n");
        let corpus = load_training_corpus(f.path()).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus[1].words, vec!["c", "d"]);
    }

    #[test]
    fn example_sentence_has_twenty_words() {
        let f = temp_with(
            b"the sporadic nature of press coverage of the court often relegates \
              its reporters to the fringes of the journalistic community\n",
        );
        let corpus = load_training_corpus(f.path()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].words.len(), 20);
        assert_eq!(corpus[0].words[5], "coverage");
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = temp_with(b"");
        assert!(matches!(
            load_training_corpus(f.path()),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn malformed_utf8_reports_line() {
        let f = temp_with(b"ok line\nbad \xff byte\n");
        match load_training_corpus(f.path()) {
            Err(Error::Decode { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected decode error, got {other:?}"),
        }
    }

    #[test]
    fn rt_corpus_parses_rows() {
        let f = temp_with(b"text_id\tword_index\tword\trt_ms\ndoc1\t0\tthe\t201.5\n");
        let records = load_rt_corpus(f.path()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].text_id, "doc1");
        assert_eq!(records[0].word_index, 0);
        assert_eq!(records[0].word, "the");
        assert!((records[0].rt_ms - 201.5).abs() < 1e-12);
    }

    #[test]
    fn rt_corpus_header_only_is_empty() {
        let f = temp_with(b"text_id\tword_index\tword\trt_ms\n");
        assert!(load_rt_corpus(f.path()).unwrap().is_empty());
    }

    #[test]
    fn rt_corpus_rejects_duplicates() {
        let f = temp_with(
            b"text_id\tword_index\tword\trt_ms\ndoc1\t0\tthe\t200\ndoc1\t0\tcat\t300\n",
        );
        assert!(matches!(load_rt_corpus(f.path()), Err(Error::Validation(_))));
    }

    #[test]
    fn rt_corpus_rejects_bad_header() {
        let f = temp_with(b"id\tword\trt\nx\ty\t1\n");
        assert!(matches!(load_rt_corpus(f.path()), Err(Error::Schema { .. })));
    }

    #[test]
    fn rt_corpus_rejects_nonpositive_rt() {
        let f = temp_with(b"text_id\tword_index\tword\trt_ms\ndoc1\t0\tthe\t-3\n");
        match load_rt_corpus(f.path()) {
            Err(Error::Validation(msg)) => assert!(msg.contains(":2:"), "got {msg}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn frequency_counts_and_total() {
        let corpus = vec![Sentence {
            text_id: "1".into(),
            words: vec!["a".into(), "b".into(), "a".into()],
        }];
        let table = build_frequency_table(&corpus).unwrap();
        assert_eq!(table.count("a"), 2);
        assert_eq!(table.count("b"), 1);
        assert_eq!(table.total(), 3);
    }

    #[test]
    fn frequency_normalizes_case() {
        let corpus = vec![Sentence {
            text_id: "1".into(),
            words: vec!["The".into(), "the".into()],
        }];
        let table = build_frequency_table(&corpus).unwrap();
        assert_eq!(table.count("the"), 2);
        assert_eq!(table.count("The"), 2);
        assert_eq!(table.len(), 1);
    }

    #[test]
    fn frequency_empty_corpus_is_error() {
        assert!(matches!(
            build_frequency_table(&[]),
            Err(Error::EmptyCorpus(_))
        ));
    }

    #[test]
    fn corpus_round_trips_through_files() {
        let src = temp_with(b"the cat sat\na dog ran\n");
        let corpus = load_training_corpus(src.path()).unwrap();
        let dst = NamedTempFile::new().unwrap();
        write_training_corpus(dst.path(), &corpus).unwrap();
        let reloaded = load_training_corpus(dst.path()).unwrap();
        assert_eq!(corpus, reloaded);
    }

    #[test]
    fn rt_corpus_round_trips() {
        let f = temp_with(
            b"text_id\tword_index\tword\trt_ms\ndoc1\t0\tthe\t201.5\ndoc1\t1\tcat\t330.25\n",
        );
        let records = load_rt_corpus(f.path()).unwrap();
        let dst = NamedTempFile::new().unwrap();
        write_rt_corpus(dst.path(), &records).unwrap();
        assert_eq!(load_rt_corpus(dst.path()).unwrap(), records);
    }

    #[test]
    fn export_orders_by_count_then_word() {
        let corpus = vec![Sentence {
            text_id: "1".into(),
            words: vec!["b".into(), "a".into(), "b".into(), "c".into(), "a".into()],
        }];
        let table = build_frequency_table(&corpus).unwrap();
        let dst = NamedTempFile::new().unwrap();
        table.export_tsv(dst.path()).unwrap();
        let text = std::fs::read_to_string(dst.path()).unwrap();
        assert_eq!(text, "a\t2\nb\t2\nc\t1\n");
    }

    #[test]
    fn frequency_table_round_trips_through_tsv() {
        let corpus = vec![Sentence {
            text_id: "1".into(),
            words: vec!["b".into(), "a".into(), "b".into()],
        }];
        let table = build_frequency_table(&corpus).unwrap();
        let dst = NamedTempFile::new().unwrap();
        table.export_tsv(dst.path()).unwrap();
        assert_eq!(FrequencyTable::load_tsv(dst.path()).unwrap(), table);
    }

    #[test]
    fn total_is_permutation_invariant() {
        let mk = |words: Vec<&str>| Sentence {
            text_id: "t".into(),
            words: words.into_iter().map(String::from).collect(),
        };
        let forward = vec![mk(vec!["x", "y"]), mk(vec!["z"])];
        let backward = vec![mk(vec!["z"]), mk(vec!["x", "y"])];
        assert_eq!(
            build_frequency_table(&forward).unwrap(),
            build_frequency_table(&backward).unwrap()
        );
    }
}
