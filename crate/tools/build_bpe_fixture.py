#!/usr/bin/env python3
"""Builds fixtures/gpt2_merges_sample.txt.

A compact merge file, format-compatible with the published GPT-2
merges.txt, that reproduces the reference GPT-2 tokenizations of the
bundled example sentence (and the item-difference demo words): every word
is a single token except relegates -> releg + ates, fringes -> fr + inges,
and tulips -> tul + ips.

Construction: each target token contributes a left-to-right merge chain;
single-token words are listed before the split-word chains so their chains
always outrank pair merges that could bite into them. The script verifies
the result with its own greedy BPE before writing.
"""

from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
MARKER = "Ġ"

SINGLE_TOKEN_WORDS = [
    "the", "sporadic", "nature", "of", "press", "coverage", "court", "often",
    "its", "reporters", "to", "journalistic", "community",
    # Item-difference demo words that GPT-2 keeps whole. The bare "tulip"
    # must stay out: its chain would outrank the tulips -> tul + ips split.
    "bulbs", "carefully", "bulb",
]

# word -> target token sequence (marker on the word-initial token).
SPLIT_WORDS = {
    "relegates": [MARKER + "releg", "ates"],
    "fringes": [MARKER + "fr", "inges"],
    "tulips": [MARKER + "tul", "ips"],
}


def chain(token):
    """Left-to-right merge chain building `token` from its characters."""
    chars = list(token)
    merges = []
    acc = chars[0]
    for c in chars[1:]:
        merges.append((acc, c))
        acc += c
    return merges


def build_merges():
    merges = []
    seen = set()

    def push(pairs):
        for pair in pairs:
            if pair not in seen:
                seen.add(pair)
                merges.append(pair)

    for word in SINGLE_TOKEN_WORDS:
        push(chain(MARKER + word))
    for tokens in SPLIT_WORDS.values():
        for token in tokens:
            push(chain(token))
    return merges


def apply_bpe(word, ranks):
    symbols = [MARKER] + list(word)
    while True:
        best = None
        for i in range(len(symbols) - 1):
            rank = ranks.get((symbols[i], symbols[i + 1]))
            if rank is not None and (best is None or rank < best[0]):
                best = (rank, symbols[i], symbols[i + 1])
        if best is None:
            return symbols
        _, left, right = best
        merged = []
        i = 0
        while i < len(symbols):
            if i + 1 < len(symbols) and symbols[i] == left and symbols[i + 1] == right:
                merged.append(left + right)
                i += 2
            else:
                merged.append(symbols[i])
                i += 1
        symbols = merged


def verify(merges):
    ranks = {pair: i for i, pair in enumerate(merges)}
    for word in SINGLE_TOKEN_WORDS:
        got = apply_bpe(word, ranks)
        assert got == [MARKER + word], f"{word!r} tokenized as {got}"
    for word, target in SPLIT_WORDS.items():
        got = apply_bpe(word, ranks)
        assert got == target, f"{word!r} tokenized as {got}, wanted {target}"
    sentence = (ROOT / "fixtures" / "example_sentence.txt").read_text().split()
    tokens = []
    for word in sentence:
        tokens.extend(t.replace(MARKER, "") for t in apply_bpe(word, ranks))
    expected = (
        "the sporadic nature of press coverage of the court often releg ates "
        "its reporters to the fr inges of the journalistic community"
    )
    assert " ".join(tokens) == expected, " ".join(tokens)


def main():
    merges = build_merges()
    verify(merges)
    out = ROOT / "fixtures" / "gpt2_merges_sample.txt"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("#version: 0.2\n")
        for left, right in merges:
            fh.write(f"{left} {right}\n")
    print(f"wrote {len(merges)} merges to {out}")


if __name__ == "__main__":
    main()
