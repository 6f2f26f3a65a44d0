//! Subword token streams under three segmentation schemes: orthographic
//! (identity), BPE via an ordered merge table, and morphological via a
//! segmentation lexicon. Word boundaries are preserved as a flag on each
//! token; the stream form prefixes word-initial subword tokens with the
//! marker so that models see distinct word-initial vocabulary items.

pub mod bpe;
pub mod morph;

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Sentence;
use crate::error::{Error, Result};

pub use bpe::{apply_bpe, train_bpe, train_bpe_with_marker, MergeTable, WORD_INITIAL_MARKER};
pub use morph::{segment_morph, LexiconEntry, SegmentationLexicon};

/// The three segmentation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeId {
    Orthographic,
    Bpe,
    Morphological,
}

impl SchemeId {
    pub const ALL: [SchemeId; 3] = [
        SchemeId::Orthographic,
        SchemeId::Bpe,
        SchemeId::Morphological,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeId::Orthographic => "orthographic",
            SchemeId::Bpe => "bpe",
            SchemeId::Morphological => "morphological",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthographic" => Ok(SchemeId::Orthographic),
            "bpe" => Ok(SchemeId::Bpe),
            "morphological" => Ok(SchemeId::Morphological),
            other => Err(Error::Config(format!(
                "unknown scheme {:?}; valid schemes: orthographic, bpe, morphological",
                other
            ))),
        }
    }
}

/// One subword token with its word-boundary flag. Token text never contains
/// the word-initial marker; the marker is applied in the stream form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub word_initial: bool,
}

/// A word together with its ordered subword tokens under one scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedWord {
    pub word: String,
    pub scheme: SchemeId,
    pub tokens: Vec<Token>,
}

impl TokenizedWord {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Token texts without boundary marking, as presented in readable output.
    pub fn token_texts(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// Concatenation of the token texts. Equals the input word for BPE and
    /// orthographic tokens; for morphological analyses it equals the surface
    /// word only for surface-concatenative lexicon entries.
    pub fn detokenize(&self) -> String {
        self.tokens.iter().map(|t| t.text.as_str()).collect()
    }

    /// The token strings a language model is trained on and queried with:
    /// subword schemes mark word-initial tokens with the marker, the
    /// orthographic scheme is the bare word stream.
    pub fn stream_tokens(&self, marker: &str) -> Vec<String> {
        match self.scheme {
            SchemeId::Orthographic => vec![self.word.clone()],
            SchemeId::Bpe | SchemeId::Morphological => self
                .tokens
                .iter()
                .map(|t| {
                    if t.word_initial {
                        format!("{marker}{}", t.text)
                    } else {
                        t.text.clone()
                    }
                })
                .collect(),
        }
    }
}

/// Scheme resources bundled for dispatch: a merge table for BPE and a
/// segmentation lexicon for the morphological scheme.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub merges: Option<MergeTable>,
    pub lexicon: Option<SegmentationLexicon>,
}

impl Resources {
    pub fn for_scheme(&self, scheme: SchemeId) -> Result<()> {
        match scheme {
            SchemeId::Orthographic => Ok(()),
            SchemeId::Bpe if self.merges.is_none() => Err(Error::Config(
                "BPE scheme requested but no merge table is loaded".into(),
            )),
            SchemeId::Morphological if self.lexicon.is_none() => Err(Error::Config(
                "morphological scheme requested but no segmentation lexicon is loaded".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Tokenizes one word under the given scheme.
pub fn tokenize_word(word: &str, scheme: SchemeId, resources: &Resources) -> Result<TokenizedWord> {
    resources.for_scheme(scheme)?;
    match scheme {
        SchemeId::Orthographic => {
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(Error::Validation(format!(
                    "expected a non-empty word without whitespace, got {word:?}"
                )));
            }
            Ok(TokenizedWord {
                word: word.to_owned(),
                scheme,
                tokens: vec![Token {
                    text: word.to_owned(),
                    word_initial: true,
                }],
            })
        }
        SchemeId::Bpe => apply_bpe(word, resources.merges.as_ref().expect("checked above")),
        SchemeId::Morphological => {
            segment_morph(word, resources.lexicon.as_ref().expect("checked above"))
        }
    }
}

/// The training-corpus form a scheme consumes: the orthographic scheme is
/// trained on normalized (lowercased) words, the subword schemes on raw
/// surface forms since merge files are case-sensitive.
pub fn scheme_training_corpus(corpus: &[Sentence], scheme: SchemeId) -> Vec<Sentence> {
    match scheme {
        SchemeId::Orthographic => corpus
            .iter()
            .map(|s| Sentence {
                text_id: s.text_id.clone(),
                words: s.words.iter().map(|w| crate::corpus::normalize_word(w)).collect(),
            })
            .collect(),
        SchemeId::Bpe | SchemeId::Morphological => corpus.to_vec(),
    }
}

/// Tokenizes a corpus sentence by sentence, preserving word order and
/// boundary flags.
pub fn tokenize_corpus(
    corpus: &[Sentence],
    scheme: SchemeId,
    resources: &Resources,
) -> Result<Vec<Vec<TokenizedWord>>> {
    resources.for_scheme(scheme)?;
    corpus
        .iter()
        .map(|sentence| {
            sentence
                .words
                .iter()
                .map(|word| tokenize_word(word, scheme, resources))
                .collect()
        })
        .collect()
}

/// Flattens tokenized sentences into model-ready token strings, one
/// `Vec<String>` per sentence.
pub fn stream_sentences(sentences: &[Vec<TokenizedWord>], marker: &str) -> Vec<Vec<String>> {
    sentences
        .iter()
        .map(|words| {
            words
                .iter()
                .flat_map(|tw| tw.stream_tokens(marker))
                .collect()
        })
        .collect()
}

/// Writes a token-stream dump: one sentence per line, tokens space-separated,
/// word-initial subword tokens carrying the marker prefix.
pub fn dump_token_stream(
    path: impl AsRef<Path>,
    sentences: &[Vec<TokenizedWord>],
    marker: &str,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for sentence in stream_sentences(sentences, marker) {
        out.push_str(&sentence.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
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

    #[test]
    fn orthographic_is_identity() {
        let resources = Resources::default();
        let corpus = vec![sentence(&["the", "cat", "sat"])];
        let tokenized = tokenize_corpus(&corpus, SchemeId::Orthographic, &resources).unwrap();
        let stream = stream_sentences(&tokenized, WORD_INITIAL_MARKER);
        assert_eq!(stream, vec![vec!["the", "cat", "sat"]]);
        assert!(tokenized[0].iter().all(|tw| tw.token_count() == 1));
    }

    #[test]
    fn missing_resources_are_configuration_errors() {
        let resources = Resources::default();
        let corpus = vec![sentence(&["x"])];
        assert!(matches!(
            tokenize_corpus(&corpus, SchemeId::Bpe, &resources),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            tokenize_corpus(&corpus, SchemeId::Morphological, &resources),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn subword_streams_mark_word_initial_tokens() {
        let resources = Resources {
            merges: None,
            lexicon: Some(
                SegmentationLexicon::from_entries([(
                    "coverage".to_string(),
                    vec!["cover".to_string(), "age".to_string()],
                )])
                .unwrap(),
            ),
        };
        let corpus = vec![sentence(&["press", "coverage"])];
        let tokenized = tokenize_corpus(&corpus, SchemeId::Morphological, &resources).unwrap();
        let stream = stream_sentences(&tokenized, WORD_INITIAL_MARKER);
        assert_eq!(stream, vec![vec!["Ġpress", "Ġcover", "age"]]);
    }

    #[test]
    fn scheme_names_round_trip() {
        for scheme in SchemeId::ALL {
            assert_eq!(scheme.as_str().parse::<SchemeId>().unwrap(), scheme);
        }
        assert!("wordpiece".parse::<SchemeId>().is_err());
    }

    #[test]
    fn dump_writes_one_sentence_per_line() {
        let resources = Resources::default();
        let corpus = vec![sentence(&["a", "b"]), sentence(&["c"])];
        let tokenized = tokenize_corpus(&corpus, SchemeId::Orthographic, &resources).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        dump_token_stream(file.path(), &tokenized, WORD_INITIAL_MARKER).unwrap();
        assert_eq!(std::fs::read_to_string(file.path()).unwrap(), "a b\nc\n");
    }
}
