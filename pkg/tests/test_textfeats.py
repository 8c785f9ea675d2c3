"""Side-feature formula tests with hand-evaluated oracles."""

import math

from hypothesis import given, settings
from hypothesis import strategies as st

from streamguard.preprocess import RawPost, preprocess
from streamguard.textfeats import (
    EMOTIONS,
    count_sentences,
    count_syllables,
    difficult_word_count,
    emotion_load,
    fit_ngram_vocabulary,
    flesch_score,
    mcalpine_eflaw,
    polarity,
    pos_ratios,
    reading_time,
    side_features,
    transform_ngrams,
    word_count,
)
import pytest

# twenty fixed sentences; expected values are recomputed in-test from the
# closed forms so any regression in either formula or counter shows up
READABILITY_GOLDEN = [
    "The cat sat.",
    "Extraordinary circumstances happened.",
    "One two three four five.",
    "Readability is a wonderful property of text!",
    "Short. Very short. Tiny!",
    "Why would anyone write incomprehensible documentation?",
    "He ran. She jumped over the wall. They laughed!",
    "a b c d e",
    "Supercalifragilisticexpialidocious",
    "This sentence has exactly seven little words.",
    "What?!",
    "Punctuation... everywhere; isn't it strange?",
    "I like pie",
    "Education requires dedication and perseverance.",
    "Go!",
    "The extraordinarily complicated mechanism malfunctioned repeatedly.",
    "no yes more but very",
    "Evaluation of articulation hesitation",
    "one syllable words can be found here",
    "Mixing LONG multisyllabic constructions with tiny bits.",
]


def _flesch_oracle(text):
    words = text.split()
    if not words:
        return 0.0
    syllables = sum(count_syllables(w) for w in words)
    return (
        206.835
        - 1.015 * (len(words) / count_sentences(text))
        - 84.6 * (syllables / len(words))
    )


def _eflaw_oracle(text):
    import re

    words = [w for w in text.split() if re.search(r"[a-zA-Z]", w)]
    if not words:
        return 0.0
    minis = sum(1 for w in words if len(re.sub(r"[^a-zA-Z]", "", w)) <= 3)
    return (len(words) + minis) / count_sentences(text)


def test_word_count_basics():
    assert word_count("") == 0
    assert word_count("hello world") == 2
    assert word_count("a b c") == 3


def test_flesch_hand_case():
    # 3 words, 1 sentence, 3 syllables
    assert abs(flesch_score("The cat sat.") - 119.19) < 0.01
    assert flesch_score("") == 0.0


def test_flesch_monotonic_in_syllables():
    base = "The cat sat on the mat"
    harder = base + " bananas"  # 3-syllable word
    assert flesch_score(harder) < flesch_score(base)


def test_readability_golden_file():
    assert len(READABILITY_GOLDEN) == 20
    for text in READABILITY_GOLDEN:
        assert abs(flesch_score(text) - _flesch_oracle(text)) < 1e-6
        assert abs(mcalpine_eflaw(text) - _eflaw_oracle(text)) < 1e-6


def test_mcalpine_hand_cases():
    assert mcalpine_eflaw("The cat sat.") == pytest.approx(6.0)
    assert mcalpine_eflaw("") == 0.0
    assert mcalpine_eflaw("Extraordinary circumstances happened.") == pytest.approx(3.0)


def test_difficult_words():
    assert difficult_word_count("") == 0
    assert difficult_word_count("cat dog") == 0
    assert difficult_word_count("incomprehensible obfuscation") == 2


def test_emotion_load():
    assert emotion_load("") == (0.0,) * 5
    only_anger = emotion_load("furious")
    assert only_anger[EMOTIONS.index("anger")] == 1.0
    assert sum(only_anger) == 1.0
    mixed = emotion_load("happy happy furious")
    assert mixed == pytest.approx((1 / 3, 0.0, 2 / 3, 0.0, 0.0))


def test_polarity():
    assert polarity("") == 0.0
    assert polarity("great") == pytest.approx(0.8)  # lexicon valence of "great"
    assert polarity("cool mean") == pytest.approx(0.0)  # +0.5 and -0.5


def test_pos_ratios():
    assert pos_ratios("") == (0.0,) * 6
    adj, det, noun, pron, punct, verb = pos_ratios("the dog runs")
    assert det == pytest.approx(1 / 3)
    assert noun == pytest.approx(1 / 3)
    assert verb == pytest.approx(1 / 3)
    assert adj == pron == punct == 0.0
    assert pos_ratios("!!!")[4] == 1.0


def test_reading_time():
    assert reading_time("") == 0.0
    assert reading_time("ab" * 50) == pytest.approx(1.469)
    text = "some words here"
    assert reading_time(text * 2) == pytest.approx(2 * reading_time(text))


def _posts(texts):
    return [preprocess(RawPost(id=str(i), text=t)) for i, t in enumerate(texts)]


def test_vocabulary_document_frequency_bounds():
    # "ubiquitous" in every doc -> df 1.0 > 0.7 -> excluded
    corpus = _posts(["ubiquitous snake" if i < 3 else "ubiquitous bird" for i in range(10)])
    vocab = fit_ngram_vocabulary(corpus)
    assert "ubiquitous" not in vocab.terms
    assert "snake" in vocab.terms  # df 0.3 within [0.01, 0.7]

    # one hit among 200 docs -> df 0.005 < 0.01 -> excluded
    many = _posts(["common words stream"] * 199 + ["unicorn appears once"])
    vocab2 = fit_ngram_vocabulary(many)
    assert "unicorn" not in vocab2.terms

    with pytest.raises(ValueError):
        fit_ngram_vocabulary([])


def test_vocabulary_is_sorted_and_frozen():
    corpus = _posts(["zebra apple", "apple mango", "mango zebra", "apple zebra"])
    vocab = fit_ngram_vocabulary(corpus)
    assert list(vocab.terms) == sorted(vocab.terms)
    before = vocab.terms
    post = _posts(["apple zebra apple"])[0]
    first = transform_ngrams(post, vocab)
    # new stream content cannot alter a fitted vocabulary
    _ = fit_ngram_vocabulary(_posts(["totally different words now"]))
    assert vocab.terms == before
    assert transform_ngrams(post, vocab) == first


def test_transform_counts():
    # "dog" df = 0.5, within the [0.01, 0.7] bounds
    corpus = _posts(["dog cat", "dog bird", "cat fish", "fish wombat"])
    vocab = fit_ngram_vocabulary(corpus)
    post = _posts(["dog dog"])[0]
    k = vocab.index_of("dog")
    assert transform_ngrams(post, vocab) == {k: 2}
    empty = _posts([""])[0]
    assert transform_ngrams(empty, vocab) == {}
    oov = _posts(["platypus axolotl"])[0]
    assert transform_ngrams(oov, vocab) == {}


@given(st.text(max_size=400))
@settings(max_examples=250, deadline=None)
def test_side_feature_ranges(raw):
    cleaned = raw.lower()
    feats = side_features(cleaned, raw)
    assert feats.difficult_words >= 0
    assert all(0.0 <= e <= 1.0 for e in feats.emotion)
    assert -1.0 <= feats.polarity <= 1.0
    assert all(0.0 <= r <= 1.0 for r in feats.pos_ratios)
    assert feats.reading_time_s >= 0.0
    assert feats.word_count >= 0
    assert feats.mcalpine_eflaw >= 0.0
    assert math.isfinite(feats.flesch)


@given(st.lists(st.sampled_from(["dog", "cat", "bird", "fish", "wombat"]), max_size=30))
@settings(max_examples=150, deadline=None)
def test_ngram_total_bounded_by_token_count(tokens):
    corpus = _posts(["dog cat", "dog bird", "cat fish", "fish wombat"])
    vocab = fit_ngram_vocabulary(corpus)

    class Stub:
        pass

    stub = Stub()
    stub.tokens = tuple(tokens)
    counts = transform_ngrams(stub, vocab)
    assert sum(counts.values()) <= len(tokens)
    assert all(c >= 1 for c in counts.values())
