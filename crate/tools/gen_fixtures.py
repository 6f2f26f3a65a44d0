#!/usr/bin/env python3
"""Regenerates the bundled fixture data under fixtures/.

Produces a 1000-sentence training corpus, two reading-time corpora in the
TSV layout the loader expects, a morphological segmentation lexicon, and a
stopword list. Deterministic: rerunning reproduces identical bytes.
"""

import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

SEED = 20250811

# Roots that inflect with -s/-ed/-ing/-er. Keep everything lowercase.
VERB_ROOTS = [
    "walk", "talk", "jump", "cook", "play", "work", "look", "help", "turn",
    "open", "clean", "visit", "report", "cover", "plant", "water", "gather",
    "paint", "farm", "hunt", "fish", "garden", "answer", "listen", "wonder",
]

NOUNS = [
    "cat", "dog", "bird", "house", "tree", "river", "road", "child", "man",
    "woman", "day", "night", "story", "court", "reporter", "fringe", "bulb",
    "tulip", "press", "nature", "community", "field", "window", "door",
    "letter", "market", "village", "winter", "summer", "morning", "evening",
]

ADJECTIVES = ["quick", "slow", "careful", "quiet", "bright", "old", "young",
              "small", "large", "sporadic", "journalistic", "useful"]

ADVERBS = ["quickly", "slowly", "carefully", "quietly", "often", "never",
           "always", "today"]

FUNCTION_WORDS = ["the", "a", "an", "of", "to", "in", "on", "at", "and",
                  "with", "for", "from", "by", "it", "its", "he", "she",
                  "they", "we", "this", "that", "not", "very", "some"]

# Appendix-style sentences woven into the corpus so the illustrative
# example words are comfortably in vocabulary.
SEEDED_SENTENCES = [
    "the sporadic nature of press coverage of the court often relegates its reporters to the fringes of the journalistic community",
    "the press coverage of the court was sporadic",
    "its reporters often visited the fringes of the community",
    "the journalistic community often relegates young reporters to the fringes",
    "press coverage of the village market was useful",
    "the court relegates the press to the fringes of the road",
    "she planted the tulip bulbs in the garden",
    "the tulip bulb opened in the bright morning",
    "he carefully watered the tulips near the window",
    "they gathered the bulbs carefully in winter",
]


def build_vocab(rng):
    verbs = []
    for root in VERB_ROOTS:
        doubled = root[-1] in "bdgmnpt" and root[-2] in "aeiou" and root not in ("open", "gather", "listen", "answer", "garden", "wonder", "water", "visit", "cover")
        ed = root + root[-1] + "ed" if doubled else root + "ed"
        ing = root + root[-1] + "ing" if doubled else root + "ing"
        verbs.append({
            "root": root,
            "3sg": root + "s",
            "past": ed,
            "ing": ing,
            "er": root + "er",
        })
    nouns = [{"sg": n, "pl": n + "s"} for n in NOUNS]
    # Irregular-looking plurals stay unsuffixed in the corpus.
    for n in nouns:
        if n["sg"] in ("child", "man", "woman", "press", "nature", "community"):
            n["pl"] = n["sg"]
    return verbs, nouns


def zipf_choice(rng, items, s=1.1):
    weights = [1.0 / (rank + 1) ** s for rank in range(len(items))]
    total = sum(weights)
    r = rng.random() * total
    acc = 0.0
    for item, w in zip(items, weights):
        acc += w
        if r <= acc:
            return item
    return items[-1]


def make_sentence(rng, verbs, nouns):
    det = lambda: zipf_choice(rng, ["the", "a", "some", "this", "that"])
    noun = lambda: zipf_choice(rng, nouns)
    verb = lambda: zipf_choice(rng, verbs)
    prep = lambda: zipf_choice(rng, ["of", "in", "on", "at", "to", "with", "from", "by", "for"])

    words = []
    v = verb()
    n1, n2 = noun(), noun()
    shape = rng.random()
    if shape < 0.30:
        words = [det(), n1["sg"], v["past"], prep(), det(), n2["sg"]]
    elif shape < 0.50:
        words = [det(), zipf_choice(rng, ADJECTIVES), n1["sg"], v["3sg"], det(), n2["pl"]]
    elif shape < 0.65:
        words = [zipf_choice(rng, ["he", "she", "they", "we", "it"]), v["past"],
                 det(), n1["pl"], prep(), det(), n2["sg"]]
    elif shape < 0.80:
        words = [det(), n1["sg"], "and", det(), n2["sg"], v["past"], zipf_choice(rng, ADVERBS)]
    elif shape < 0.92:
        words = [det(), n1["sg"], "was", v["ing"], prep(), det(), n2["sg"]]
    else:
        words = [det(), v["er"], v2fallback(rng, verbs), det(), n1["pl"], zipf_choice(rng, ADVERBS)]
    if rng.random() < 0.25:
        words.insert(0, zipf_choice(rng, ADVERBS))
    if rng.random() < 0.2:
        words.extend([prep(), det(), noun()["sg"]])
    return words


def v2fallback(rng, verbs):
    return zipf_choice(rng, verbs)["past"]


def gen_training(rng, verbs, nouns, count=1000):
    sentences = []
    seeded = list(SEEDED_SENTENCES) * 8
    for line in seeded:
        sentences.append(line.split())
    while len(sentences) < count:
        sentences.append(make_sentence(rng, verbs, nouns))
    rng.shuffle(sentences)
    return sentences[:count]


def word_freqs(sentences):
    freqs = {}
    total = 0
    for s in sentences:
        for w in s:
            freqs[w] = freqs.get(w, 0) + 1
            total += 1
    return freqs, total


def bigram_counts(sentences):
    unigrams = {}
    bigrams = {}
    for s in sentences:
        padded = ["<s>"] + s
        for prev, word in zip(padded, padded[1:]):
            unigrams[prev] = unigrams.get(prev, 0) + 1
            bigrams[(prev, word)] = bigrams.get((prev, word), 0) + 1
    return unigrams, bigrams


def bigram_surprisal(prev, word, unigrams, bigrams, vocab_size):
    # Add-half smoothing; contextual, so the length and log-frequency
    # controls cannot absorb it the way a unigram proxy would be.
    num = bigrams.get((prev, word), 0) + 0.5
    den = unigrams.get(prev, 0) + 0.5 * vocab_size
    return -math.log2(num / den)


def gen_rt_corpus(rng, verbs, nouns, grams, texts, sentences_per_text, clauses=1):
    unigrams, bigrams, vocab_size = grams
    rows = []
    oov_words = ["zorp", "flibber", "quumble"]
    for t in range(texts):
        text_id = f"text{t + 1:02d}"
        idx = 0
        for _ in range(sentences_per_text):
            words = []
            for _ in range(clauses):
                words.extend(make_sentence(rng, verbs, nouns))
            if rng.random() < 0.04:
                words[rng.randrange(len(words))] = rng.choice(oov_words)
            prev = "<s>"
            for pos, word in enumerate(words):
                surface = word
                if pos == len(words) - 1:
                    surface += "."
                elif rng.random() < 0.02:
                    surface += ","
                proxy = bigram_surprisal(prev, word, unigrams, bigrams, vocab_size)
                rt = 160.0 + 2.5 * proxy + 2.5 * len(word) + rng.gauss(0.0, 18.0)
                rt = max(rt, 80.0)
                rows.append((text_id, idx, surface, round(rt, 1)))
                prev = word
                idx += 1
    return rows


def gen_lexicon(verbs, nouns):
    entries = {
        # Analyses for the illustrative sentence and the item-difference
        # examples; `community` is canonicalized by the segmenter.
        "coverage": "cover age",
        "relegates": "relegate s",
        "its": "it s",
        "reporters": "re port er s",
        "fringes": "fringe s",
        "journalistic": "journal istic",
        "community": "commune ity",
        "bulbs": "bulb s",
        "carefully": "care ful ly",
        "tulips": "tulip s",
        "useful": "use ful",
        "quickly": "quick ly",
        "slowly": "slow ly",
        "quietly": "quiet ly",
        "relegated": "relegate ed",
    }
    for v in VERB_ROOTS:
        entries.setdefault(v + "s", f"{v} s")
        for form, morphs in ((v + "ed", f"{v} ed"), (v + "ing", f"{v} ing"), (v + "er", f"{v} er")):
            entries.setdefault(form, morphs)
    # Doubled-consonant inflections keep the canonical root.
    for v in ("jump", "plant", "hunt"):
        pass
    for n in NOUNS:
        if n not in ("child", "man", "woman", "press", "nature", "community"):
            entries.setdefault(n + "s", f"{n} s")
    return dict(sorted(entries.items()))


STOPWORDS = """a about above after again all an and any are as at be because been
before being below between both but by can did do does down during each few for
from had has have he her here hers him his how i if in into is it its just me
more most my no nor not now of off on once only or other our out over own same
she should so some such than that the their them then there these they this
those through to too under until up very was we were what when where which
while who why will with you your""".split()


def main():
    rng = random.Random(SEED)
    FIXTURES.mkdir(exist_ok=True)
    verbs, nouns = build_vocab(rng)

    training = gen_training(rng, verbs, nouns)
    (FIXTURES / "toy_corpus.txt").write_text(
        "".join(" ".join(s) + "\n" for s in training), encoding="utf-8"
    )
    freqs, _total = word_freqs(training)
    unigrams, bigrams = bigram_counts(training)
    grams = (unigrams, bigrams, len(freqs))

    # Self-paced texts use long multi-clause sentences so that spillover-3
    # rows (which need three consecutive kept predecessors) stay plentiful.
    for name, texts, spt, clauses in (
        ("toy_rt_eyetrack.tsv", 30, 9, 1),
        ("toy_rt_selfpaced.tsv", 20, 8, 3),
    ):
        rows = gen_rt_corpus(rng, verbs, nouns, grams, texts, spt, clauses)
        with open(FIXTURES / name, "w", encoding="utf-8") as fh:
            fh.write("text_id\tword_index\tword\trt_ms\n")
            for text_id, idx, word, rt in rows:
                fh.write(f"{text_id}\t{idx}\t{word}\t{rt}\n")

    lexicon = gen_lexicon(verbs, nouns)
    with open(FIXTURES / "lexicon.tsv", "w", encoding="utf-8") as fh:
        for word, morphs in lexicon.items():
            fh.write(f"{word}\t{morphs}\n")

    (FIXTURES / "stopwords.txt").write_text(
        "".join(w + "\n" for w in sorted(set(STOPWORDS))), encoding="utf-8"
    )

    (FIXTURES / "example_sentence.txt").write_text(
        SEEDED_SENTENCES[0] + "\n", encoding="utf-8"
    )

    print(f"training sentences: {len(training)}, vocab: {len(freqs)}, tokens: {_total}")


if __name__ == "__main__":
    main()
