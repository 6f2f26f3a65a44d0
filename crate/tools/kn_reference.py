#!/usr/bin/env python3
"""Standalone modified Kneser-Ney reference implementation.

Trains an order-N model over the lowercased word stream of a
one-sentence-per-line corpus and writes it in ARPA format. Written directly
from the estimator definition, sharing no code with the main implementation,
so the two can cross-check each other:

  - sentences padded with one <s> and one </s>; raw counts at orders 1..N
  - adjusted counts: raw at the top order and for <s>-anchored n-grams,
    continuation counts (distinct left extensions) elsewhere
  - per-order discounts D1/D2/D3+ from the count-of-counts, with the fixed
    0.75 fallback for degenerate count-of-counts
  - interpolated probabilities; the interpolation weight of a context is
    its backoff weight
  - unigrams interpolate with the uniform distribution over the
    predictable vocabulary (everything but <s>); <unk> receives exactly the
    uniform share; <s> carries the conventional -99 sentinel

Usage: kn_reference.py CORPUS ORDER OUT.arpa
"""

import sys
from collections import defaultdict
from pathlib import Path

BOS, EOS, UNK = "<s>", "</s>", "<unk>"


def raw_counts(sentences, order):
    counts = [defaultdict(int) for _ in range(order)]
    for words in sentences:
        padded = [BOS] + words + [EOS]
        for k in range(1, order + 1):
            for i in range(len(padded) - k + 1):
                counts[k - 1][tuple(padded[i:i + k])] += 1
    return counts


def adjusted_counts(raw, order):
    adjusted = [dict() for _ in range(order)]
    adjusted[order - 1] = dict(raw[order - 1])
    for k in range(order - 1, 0, -1):
        continuation = defaultdict(int)
        for gram in raw[k]:
            continuation[gram[1:]] += 1
        adjusted[k - 1] = {
            gram: (count if gram[0] == BOS else continuation[gram])
            for gram, count in raw[k - 1].items()
        }
    return adjusted


def discounts_for(adj, unigram_level):
    n = [0, 0, 0, 0]
    max_count = 0
    for gram, count in adj.items():
        if unigram_level and gram[0] == BOS:
            continue
        if 1 <= count <= 4:
            n[count - 1] += 1
        max_count = max(max_count, count)
    fallback = (0.75, 0.75, 0.75)
    if n[0] == 0 or n[1] == 0:
        return fallback
    y = n[0] / (n[0] + 2.0 * n[1])
    d1 = 1.0 - 2.0 * y * n[1] / n[0]
    d2 = 2.0 - 3.0 * y * n[2] / n[1]
    if max_count >= 3:
        if n[2] == 0:
            return fallback
        d3 = 3.0 - 4.0 * y * n[3] / n[2]
    else:
        d3 = d2
    if not (0.0 <= d1 <= 1.0 and 0.0 <= d2 <= 2.0 and 0.0 <= d3 <= 3.0):
        return fallback
    return (d1, d2, d3)


def discount(ds, count):
    if count == 0:
        return 0.0
    return ds[min(count, 3) - 1]


def train(sentences, order):
    raw = raw_counts(sentences, order)
    adjusted = adjusted_counts(raw, order)
    ds = [discounts_for(adjusted[k], k == 0) for k in range(order)]

    vocab = sorted({w for g in raw[0] for w in g} | {UNK})
    predicted = [w for w in vocab if w != BOS]

    probs = [dict() for _ in range(order)]
    backoffs = [dict() for _ in range(max(order - 1, 0))]

    total = sum(c for g, c in adjusted[0].items() if g[0] != BOS)
    mass = sum(discount(ds[0], c) for g, c in adjusted[0].items() if g[0] != BOS)
    gamma1 = max(mass / total, 5e-324)
    for w in predicted:
        adj = adjusted[0].get((w,), 0)
        p = max(adj - discount(ds[0], adj), 0.0) / total + gamma1 / len(predicted)
        probs[0][(w,)] = p
    probs[0][(BOS,)] = 1e-99

    for k in range(2, order + 1):
        groups = defaultdict(list)
        for gram, count in adjusted[k - 1].items():
            groups[gram[:-1]].append((gram[-1], count))
        for ctx, extensions in groups.items():
            a = float(sum(c for _, c in extensions))
            mass = sum(discount(ds[k - 1], c) for _, c in extensions)
            gamma = max(mass / a, 5e-324)
            for last, count in extensions:
                lower = probs[k - 2][ctx[1:] + (last,)]
                p = max(count - discount(ds[k - 1], count), 0.0) / a + gamma * lower
                probs[k - 1][ctx + (last,)] = p
            backoffs[k - 2][ctx] = gamma
    return probs, backoffs


def write_arpa(path, probs, backoffs, order):
    import math

    def log10(p):
        return math.log10(p)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\\data\\\n")
        for k in range(1, order + 1):
            fh.write(f"ngram {k}={len(probs[k - 1])}\n")
        for k in range(1, order + 1):
            fh.write(f"\n\\{k}-grams:\n")
            for gram in sorted(probs[k - 1]):
                fh.write(f"{log10(probs[k - 1][gram]):.7f}\t{' '.join(gram)}")
                if k < order and gram in backoffs[k - 1]:
                    fh.write(f"\t{log10(backoffs[k - 1][gram]):.7f}")
                fh.write("\n")
        fh.write("\n\\end\\\n")


def main():
    corpus, order, out = Path(sys.argv[1]), int(sys.argv[2]), Path(sys.argv[3])
    sentences = []
    for line in corpus.read_text(encoding="utf-8").splitlines():
        words = line.lower().split()
        if words:
            sentences.append(words)
    probs, backoffs, = train(sentences, order)
    write_arpa(out, probs, backoffs, order)
    sizes = ", ".join(f"{k + 1}: {len(p)}" for k, p in enumerate(probs))
    print(f"wrote {out} ({sizes})")


if __name__ == "__main__":
    main()
