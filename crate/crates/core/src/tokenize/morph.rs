//! Morphological segmentation via a lexicon of precomputed analyses.
//!
//! The segmenter itself is external; its output enters as a TSV mapping each
//! surface word to its morph sequence. Analyses may be canonicalized (e.g.
//! `community -> commune ity`), so concatenating morphs does not always
//! reproduce the surface form; entries where it does are flagged
//! surface-concatenative.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tokenize::{SchemeId, Token, TokenizedWord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub morphs: Vec<String>,
    /// True when the morphs concatenate exactly to the surface word.
    pub surface_concatenative: bool,
}

/// Map from surface word to its morph analysis.
#[derive(Debug, Clone, Default)]
pub struct SegmentationLexicon {
    entries: HashMap<String, LexiconEntry>,
}

impl SegmentationLexicon {
    /// Reads a `word\tmorph1 morph2 ...` TSV.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((word, morph_field)) = line.split_once('\t') else {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("expected `word\\tmorphs`, got {line:?}"),
                ));
            };
            let morphs: Vec<String> = morph_field.split_whitespace().map(str::to_owned).collect();
            if word.is_empty() || morphs.is_empty() {
                return Err(Error::parse(path, lineno, "empty word or morph list"));
            }
            let entry = LexiconEntry {
                surface_concatenative: morphs.concat() == word,
                morphs,
            };
            if entries.insert(word.to_owned(), entry).is_some() {
                return Err(Error::parse(path, lineno, format!("duplicate entry {word:?}")));
            }
        }
        Ok(SegmentationLexicon { entries })
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (String, Vec<String>)>) -> Result<Self> {
        let mut map = HashMap::new();
        for (word, morphs) in entries {
            if word.is_empty() || morphs.is_empty() || morphs.iter().any(|m| m.is_empty()) {
                return Err(Error::Validation(format!(
                    "lexicon entry for {word:?} has an empty word or morph"
                )));
            }
            let entry = LexiconEntry {
                surface_concatenative: morphs.concat() == word,
                morphs,
            };
            map.insert(word, entry);
        }
        Ok(SegmentationLexicon { entries: map })
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Looks the word up in the lexicon; absent words fall back to a single
/// morph equal to the word itself.
pub fn segment_morph(word: &str, lexicon: &SegmentationLexicon) -> Result<TokenizedWord> {
    if word.is_empty() {
        return Err(Error::Validation("cannot segment an empty word".into()));
    }
    let morphs: Vec<String> = match lexicon.get(word) {
        Some(entry) => entry.morphs.clone(),
        None => vec![word.to_owned()],
    };
    let tokens = morphs
        .into_iter()
        .enumerate()
        .map(|(i, text)| Token {
            text,
            word_initial: i == 0,
        })
        .collect();
    Ok(TokenizedWord {
        word: word.to_owned(),
        scheme: SchemeId::Morphological,
        tokens,
    })
}
