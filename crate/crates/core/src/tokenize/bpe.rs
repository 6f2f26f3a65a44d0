//! Byte-pair-encoding over Unicode scalar values with an ordered merge table.
//!
//! Merging is per whitespace-delimited word: the word-initial marker is
//! prepended as its own symbol, then the highest-priority applicable merge is
//! applied (all non-overlapping occurrences, left to right) until none
//! applies. The merge-file format is line-oriented `left right`, priority =
//! line order, optional `#` first line, which is what the published GPT-2
//! `merges.txt` uses.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::tokenize::{SchemeId, Token, TokenizedWord};

/// Marker for word-initial symbols, following the GPT-2 convention of
/// representing the preceding space as `Ġ`.
pub const WORD_INITIAL_MARKER: &str = "\u{0120}";

/// An ordered list of merge rules plus the word-initial marker they were
/// learned (or published) under.
#[derive(Debug, Clone)]
pub struct MergeTable {
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
    word_initial_marker: String,
}

impl MergeTable {
    pub fn new(merges: Vec<(String, String)>, word_initial_marker: &str) -> Result<Self> {
        let mut ranks = HashMap::with_capacity(merges.len());
        for (rank, pair) in merges.iter().enumerate() {
            if ranks.insert(pair.clone(), rank).is_some() {
                return Err(Error::Validation(format!(
                    "duplicate merge pair ({} {})",
                    pair.0, pair.1
                )));
            }
        }
        Ok(MergeTable {
            merges,
            ranks,
            word_initial_marker: word_initial_marker.to_owned(),
        })
    }

    pub fn empty() -> Self {
        MergeTable::new(Vec::new(), WORD_INITIAL_MARKER).expect("empty table is valid")
    }

    pub fn len(&self) -> usize {
        self.merges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.merges.is_empty()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn word_initial_marker(&self) -> &str {
        &self.word_initial_marker
    }

    /// Truncates to the first `n` merges. Useful for auditing how the token
    /// count of a word evolves as merges are appended.
    pub fn truncated(&self, n: usize) -> Self {
        let merges = self.merges.iter().take(n).cloned().collect();
        MergeTable::new(merges, &self.word_initial_marker).expect("prefix of valid table is valid")
    }

    /// Reads a merge file: optional first line beginning `#`, then one
    /// `left right` pair per line, priority = line order.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut merges = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if idx == 0 && line.starts_with('#') {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("expected `left right`, got {line:?}"),
                ));
            }
            merges.push((fields[0].to_owned(), fields[1].to_owned()));
        }
        MergeTable::new(merges, WORD_INITIAL_MARKER)
            .map_err(|e| Error::parse(path, 0, e.to_string()))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        writeln!(file, "#version: 0.2").map_err(|e| Error::io(path, e))?;
        for (left, right) in &self.merges {
            writeln!(file, "{left} {right}").map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }

    fn rank(&self, left: &str, right: &str) -> Option<usize> {
        // Avoids allocating a key tuple per lookup in the hot loop.
        self.ranks.get(&(left.to_owned(), right.to_owned())).copied()
    }
}

/// Greedy BPE application. Characters outside the merge alphabet simply stand
/// as singleton tokens. A word-initial marker left unfused after all merges
/// is dropped rather than emitted as a contentless token.
pub fn apply_bpe(word: &str, merges: &MergeTable) -> Result<TokenizedWord> {
    if word.is_empty() || word.contains(char::is_whitespace) {
        return Err(Error::Validation(format!(
            "BPE input must be a non-empty word without whitespace, got {word:?}"
        )));
    }

    let marker = &merges.word_initial_marker;
    let mut symbols: Vec<String> = Vec::with_capacity(word.chars().count() + 1);
    if !marker.is_empty() {
        symbols.push(marker.clone());
    }
    symbols.extend(word.chars().map(String::from));

    loop {
        let mut best: Option<(usize, usize)> = None; // (rank, position)
        for i in 0..symbols.len().saturating_sub(1) {
            if let Some(rank) = merges.rank(&symbols[i], &symbols[i + 1]) {
                if best.is_none_or(|(r, _)| rank < r) {
                    best = Some((rank, i));
                }
            }
        }
        let Some((rank, _)) = best else { break };
        let (left, right) = &merges.merges[rank];

        let mut merged = Vec::with_capacity(symbols.len());
        let mut i = 0;
        while i < symbols.len() {
            if i + 1 < symbols.len() && symbols[i] == *left && symbols[i + 1] == *right {
                merged.push(format!("{left}{right}"));
                i += 2;
            } else {
                merged.push(std::mem::take(&mut symbols[i]));
                i += 1;
            }
        }
        symbols = merged;
    }

    if !marker.is_empty() {
        if symbols.len() > 1 && symbols[0] == *marker {
            symbols.remove(0);
        } else if let Some(stripped) = symbols[0].strip_prefix(marker.as_str()) {
            symbols[0] = stripped.to_owned();
        }
    }

    let tokens = symbols
        .into_iter()
        .enumerate()
        .map(|(i, text)| Token {
            text,
            word_initial: i == 0,
        })
        .collect();
    Ok(TokenizedWord {
        word: word.to_owned(),
        scheme: SchemeId::Bpe,
        tokens,
    })
}

/// Learns merges by the standard frequency-greedy procedure: at each step,
/// merge the most frequent adjacent symbol pair, ties broken by the
/// lexicographically smallest `(left, right)`.
pub fn train_bpe(corpus: &[Sentence], num_merges: usize) -> Result<MergeTable> {
    train_bpe_with_marker(corpus, num_merges, WORD_INITIAL_MARKER)
}

pub fn train_bpe_with_marker(
    corpus: &[Sentence],
    num_merges: usize,
    marker: &str,
) -> Result<MergeTable> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus("BPE training input".into()));
    }

    let mut word_freqs: HashMap<&str, u64> = HashMap::new();
    for sentence in corpus {
        for word in &sentence.words {
            *word_freqs.entry(word.as_str()).or_insert(0) += 1;
        }
    }

    let mut types: Vec<(Vec<String>, u64)> = word_freqs
        .into_iter()
        .map(|(word, freq)| {
            let mut symbols = Vec::with_capacity(word.chars().count() + 1);
            if !marker.is_empty() {
                symbols.push(marker.to_owned());
            }
            symbols.extend(word.chars().map(String::from));
            (symbols, freq)
        })
        .collect();

    let mut merges: Vec<(String, String)> = Vec::with_capacity(num_merges);
    for _ in 0..num_merges {
        let mut pair_freqs: HashMap<(&str, &str), u64> = HashMap::new();
        for (symbols, freq) in &types {
            for window in symbols.windows(2) {
                *pair_freqs
                    .entry((window[0].as_str(), window[1].as_str()))
                    .or_insert(0) += *freq;
            }
        }
        let Some(best) = pair_freqs
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(pair, _)| (pair.0.to_owned(), pair.1.to_owned()))
        else {
            break;
        };

        for (symbols, _) in &mut types {
            let mut merged = Vec::with_capacity(symbols.len());
            let mut i = 0;
            while i < symbols.len() {
                if i + 1 < symbols.len() && symbols[i] == best.0 && symbols[i + 1] == best.1 {
                    merged.push(format!("{}{}", best.0, best.1));
                    i += 2;
                } else {
                    merged.push(std::mem::take(&mut symbols[i]));
                    i += 1;
                }
            }
            *symbols = merged;
        }
        merges.push(best);
    }

    MergeTable::new(merges, marker)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(words: &[&str]) -> Sentence {
        Sentence {
            text_id: "t".into(),
            words: words.iter().map(|w| w.to_string()).collect(),
        }
    }

    fn texts(tw: &TokenizedWord) -> Vec<&str> {
        tw.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn empty_table_yields_characters() {
        let tw = apply_bpe("a", &MergeTable::empty()).unwrap();
        assert_eq!(texts(&tw), vec!["a"]);
        assert!(tw.tokens[0].word_initial);

        let tw = apply_bpe("cat", &MergeTable::empty()).unwrap();
        assert_eq!(texts(&tw), vec!["c", "a", "t"]);
        assert_eq!(tw.token_count(), 3);
    }

    #[test]
    fn merges_apply_in_priority_order() {
        // (a,b) outranks (b,c): "abc" becomes [ab, c], not [a, bc].
        let table = MergeTable::new(
            vec![("a".into(), "b".into()), ("b".into(), "c".into())],
            "",
        )
        .unwrap();
        let tw = apply_bpe("abc", &table).unwrap();
        assert_eq!(texts(&tw), vec!["ab", "c"]);
    }

    #[test]
    fn marker_participates_in_merges() {
        let m = WORD_INITIAL_MARKER;
        let table = MergeTable::new(
            vec![
                (m.into(), "t".into()),
                (format!("{m}t"), "h".into()),
                (format!("{m}th"), "e".into()),
            ],
            m,
        )
        .unwrap();
        let tw = apply_bpe("the", &table).unwrap();
        assert_eq!(texts(&tw), vec!["the"]);
        assert_eq!(tw.token_count(), 1);
    }

    #[test]
    fn unfused_marker_is_dropped() {
        let table = MergeTable::new(vec![("a".into(), "b".into())], WORD_INITIAL_MARKER).unwrap();
        let tw = apply_bpe("ab", &table).unwrap();
        assert_eq!(texts(&tw), vec!["ab"]);
    }

    #[test]
    fn unknown_characters_stand_alone() {
        let table = MergeTable::new(vec![("a".into(), "b".into())], "").unwrap();
        let tw = apply_bpe("a§b", &table).unwrap();
        assert_eq!(texts(&tw), vec!["a", "§", "b"]);
    }

    #[test]
    fn rejects_empty_and_whitespace_words() {
        assert!(apply_bpe("", &MergeTable::empty()).is_err());
        assert!(apply_bpe("two words", &MergeTable::empty()).is_err());
    }

    #[test]
    fn first_merge_on_repeated_aaab_is_aa() {
        let corpus = vec![sentence(&["aaab"]), sentence(&["aaab"]), sentence(&["aaab"])];
        let table = train_bpe(&corpus, 1).unwrap();
        assert_eq!(table.merges(), &[("a".to_string(), "a".to_string())]);
    }

    #[test]
    fn zero_merges_trains_empty_table() {
        let corpus = vec![sentence(&["abc", "abd"])];
        let table = train_bpe(&corpus, 0).unwrap();
        assert!(table.is_empty());
        assert_eq!(apply_bpe("abc", &table).unwrap().token_count(), 3);
    }

    #[test]
    fn ties_break_lexicographically() {
        // "ab" and "cd" both appear once; (a,b) < (c,d).
        let corpus = vec![sentence(&["ab", "cd"])];
        let table = train_bpe_with_marker(&corpus, 1, "").unwrap();
        assert_eq!(table.merges(), &[("a".to_string(), "b".to_string())]);
    }

    #[test]
    fn no_remaining_pair_outranks_the_last_merge() {
        // Brute-force frequency audit: retokenize the corpus under the full
        // table; every remaining adjacent pair must be no more frequent than
        // the last merge was at the moment it was learned.
        let words = [
            "walking", "walked", "walks", "talking", "talked", "talks", "helper", "helping",
            "reader", "reading", "reads", "gardens", "gardening",
        ];
        let corpus: Vec<Sentence> = (0..40)
            .map(|i| sentence(&[words[i % words.len()], words[(i * 7 + 3) % words.len()]]))
            .collect();
        let n = 50;
        let table = train_bpe(&corpus, n).unwrap();
        let learned = table.len(); // may be < n if pairs ran out
        assert!(learned > 10, "fixture too small to exercise training");

        // Frequency of the last merge at the time it was learned: retokenize
        // under the table truncated just before it.
        let prefix = table.truncated(learned - 1);
        let last = &table.merges()[learned - 1];
        let mut last_freq = 0u64;
        let mut remaining: HashMap<(String, String), u64> = HashMap::new();
        for s in &corpus {
            for word in &s.words {
                let before = apply_bpe_symbols(word, &prefix);
                for w in before.windows(2) {
                    if w[0] == last.0 && w[1] == last.1 {
                        last_freq += 1;
                    }
                }
                let after = apply_bpe_symbols(word, &table);
                for w in after.windows(2) {
                    *remaining.entry((w[0].clone(), w[1].clone())).or_insert(0) += 1;
                }
            }
        }
        let max_remaining = remaining.values().copied().max().unwrap_or(0);
        assert!(
            max_remaining <= last_freq,
            "remaining pair frequency {max_remaining} exceeds last merge frequency {last_freq}"
        );
    }

    // Raw merged symbol sequences (marker retained) for the audit above.
    fn apply_bpe_symbols(word: &str, table: &MergeTable) -> Vec<String> {
        let tw = apply_bpe(word, table).unwrap();
        let mut out: Vec<String> = tw.tokens.iter().map(|t| t.text.clone()).collect();
        out[0] = format!("{}{}", table.word_initial_marker(), out[0]);
        out
    }

    #[test]
    fn merge_file_round_trips() {
        let corpus = vec![sentence(&["walking", "walked", "talks", "talked"])];
        let table = train_bpe(&corpus, 12).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        table.write(file.path()).unwrap();
        let reloaded = MergeTable::load(file.path()).unwrap();
        assert_eq!(table.merges(), reloaded.merges());
    }

    #[test]
    fn duplicate_merge_lines_rejected() {
        let file = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(file.path(), "#version: 0.2\na b\na b\n").unwrap();
        assert!(MergeTable::load(file.path()).is_err());
    }

    #[test]
    fn detokenization_recovers_the_word() {
        let corpus = vec![sentence(&["coverage", "fringes", "reporters"])];
        let table = train_bpe(&corpus, 20).unwrap();
        for word in ["coverage", "fringes", "reporters", "unseen"] {
            let tw = apply_bpe(word, &table).unwrap();
            assert_eq!(tw.detokenize(), word);
        }
    }
}
