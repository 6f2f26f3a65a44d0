//! Stopword list with a content hash, so reports record exactly which list
//! produced the stopword-excluding segmentation percentages.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::corpus::normalize_word;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct StopwordList {
    words: HashSet<String>,
    sha256: Option<String>,
}

impl StopwordList {
    /// Reads a UTF-8 list, one word per line; blank lines are skipped.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::Decode {
            path: path.to_owned(),
            line: 0,
        })?;
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(normalize_word)
            .collect();
        let mut hex = String::with_capacity(64);
        for byte in Sha256::digest(&bytes) {
            write!(hex, "{byte:02x}").expect("writing to a String cannot fail");
        }
        Ok(StopwordList {
            words,
            sha256: Some(hex),
        })
    }

    /// An empty list is legal: the stopword-excluding column then equals the
    /// all-words column.
    pub fn empty() -> Self {
        StopwordList::default()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&normalize_word(word))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn sha256(&self) -> Option<&str> {
        self.sha256.as_deref()
    }
}
