//! ARPA text serialization: standard section layout with log10 values.
//!
//! Export is deterministic (n-grams sorted lexicographically by token
//! strings per order), so identical models serialize to identical bytes.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ngram::{NGramModel, Vocabulary, BOS, EOS, UNK};

const LN_10: f64 = std::f64::consts::LN_10;

/// Writes the model in ARPA format.
pub fn export_arpa(model: &NGramModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if model.ngram_count(1) == 0 {
        return Err(Error::Validation(
            "cannot export an empty model; ARPA requires at least one unigram".into(),
        ));
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path, e);

    writeln!(w, "\\data\\").map_err(io_err)?;
    for k in 1..=model.order() {
        writeln!(w, "ngram {}={}", k, model.ngram_count(k)).map_err(io_err)?;
    }

    for k in 1..=model.order() {
        writeln!(w).map_err(io_err)?;
        writeln!(w, "\\{}-grams:", k).map_err(io_err)?;
        let mut entries: Vec<(Vec<&str>, Vec<u32>)> = model.probs[k - 1]
            .keys()
            .map(|gram| {
                let words: Vec<&str> = gram.iter().map(|&id| model.vocab().token(id)).collect();
                (words, gram.clone())
            })
            .collect();
        entries.sort();
        for (words, gram) in entries {
            let prob10 = model.probs[k - 1][&gram] / LN_10;
            write!(w, "{:.7}\t{}", prob10, words.join(" ")).map_err(io_err)?;
            if k < model.order() {
                if let Some(b) = model.stored_backoff(&gram) {
                    write!(w, "\t{:.7}", b / LN_10).map_err(io_err)?;
                }
            }
            writeln!(w).map_err(io_err)?;
        }
    }

    writeln!(w).map_err(io_err)?;
    writeln!(w, "\\end\\").map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Reads an ARPA file into a queryable model. The unigram section must
/// contain the `<s>`, `</s>`, and `<unk>` markers.
pub fn import_arpa(path: impl AsRef<Path>) -> Result<NGramModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().peekable();

    let parse_err =
        |line: usize, message: String| Error::ArpaParse { line: line + 1, message };

    // Header: \data\ followed by `ngram K=N` lines.
    let mut declared: Vec<usize> = Vec::new();
    loop {
        let Some((idx, line)) = lines.next() else {
            return Err(parse_err(0, "missing \\data\\ header".into()));
        };
        if line.trim().is_empty() {
            continue;
        }
        if line.trim() != "\\data\\" {
            return Err(parse_err(idx, format!("expected \\data\\, got {line:?}")));
        }
        break;
    }
    loop {
        let Some(&(idx, line)) = lines.peek() else {
            return Err(parse_err(0, "unterminated \\data\\ section".into()));
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            lines.next();
            break;
        }
        let rest = trimmed
            .strip_prefix("ngram ")
            .ok_or_else(|| parse_err(idx, format!("expected `ngram K=N`, got {line:?}")))?;
        let (k, n) = rest
            .split_once('=')
            .ok_or_else(|| parse_err(idx, format!("expected `ngram K=N`, got {line:?}")))?;
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| parse_err(idx, format!("bad order in {line:?}")))?;
        let n: usize = n
            .trim()
            .parse()
            .map_err(|_| parse_err(idx, format!("bad count in {line:?}")))?;
        if k != declared.len() + 1 {
            return Err(parse_err(idx, format!("out-of-order ngram declaration {line:?}")));
        }
        declared.push(n);
        lines.next();
    }
    let order = declared.len();
    if order == 0 || declared[0] == 0 {
        return Err(parse_err(0, "ARPA requires at least one unigram".into()));
    }

    let mut vocab = Vocabulary::new();
    let mut probs: Vec<HashMap<Vec<u32>, f64>> = vec![HashMap::new(); order];
    let mut backoffs: Vec<HashMap<Vec<u32>, f64>> = vec![HashMap::new(); order.saturating_sub(1)];

    for k in 1..=order {
        // Section header.
        loop {
            let Some((idx, line)) = lines.next() else {
                return Err(parse_err(0, format!("missing \\{k}-grams: section")));
            };
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if trimmed != format!("\\{k}-grams:") {
                return Err(parse_err(idx, format!("expected \\{k}-grams:, got {line:?}")));
            }
            break;
        }
        let mut read = 0usize;
        while read < declared[k - 1] {
            let Some((idx, line)) = lines.next() else {
                return Err(parse_err(
                    0,
                    format!("\\{k}-grams: section ended after {read} of {} entries", declared[k - 1]),
                ));
            };
            if line.trim().is_empty() {
                return Err(parse_err(
                    idx,
                    format!("\\{k}-grams: section ended after {read} of {} entries", declared[k - 1]),
                ));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let has_backoff = match fields.len() {
                n if n == k + 1 => false,
                n if n == k + 2 && k < order => true,
                _ => {
                    return Err(parse_err(
                        idx,
                        format!("expected {} or {} fields, got {}", k + 1, k + 2, fields.len()),
                    ))
                }
            };
            let prob10: f64 = fields[0]
                .parse()
                .map_err(|_| parse_err(idx, format!("bad log10 probability {:?}", fields[0])))?;
            let gram: Vec<u32> = if k == 1 {
                vec![vocab.intern(fields[1])]
            } else {
                fields[1..=k]
                    .iter()
                    .map(|tok| {
                        vocab.id(tok).ok_or_else(|| {
                            parse_err(idx, format!("token {tok:?} missing from unigram section"))
                        })
                    })
                    .collect::<Result<_>>()?
            };
            if probs[k - 1].insert(gram.clone(), prob10 * LN_10).is_some() {
                return Err(parse_err(idx, format!("duplicate {k}-gram {:?}", &fields[1..=k])));
            }
            if has_backoff {
                let bo10: f64 = fields[k + 1]
                    .parse()
                    .map_err(|_| parse_err(idx, format!("bad backoff {:?}", fields[k + 1])))?;
                backoffs[k - 1].insert(gram, bo10 * LN_10);
            }
            read += 1;
        }
    }

    // Footer.
    loop {
        let Some((idx, line)) = lines.next() else {
            return Err(parse_err(0, "missing \\end\\".into()));
        };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed != "\\end\\" {
            return Err(parse_err(idx, format!("expected \\end\\, got {line:?}")));
        }
        break;
    }

    for marker in [BOS, EOS, UNK] {
        if vocab.id(marker).map(|id| probs[0].contains_key(&vec![id])) != Some(true) {
            return Err(parse_err(0, format!("unigram section lacks the {marker} marker")));
        }
    }

    Ok(NGramModel::from_parts(order, vocab, probs, backoffs))
}
