"""Formula-based text features: readability, emotion, polarity, POS ratios,
reading time, word counts, and the unigram frequency vectors.

All lexicons are bundled, versioned snapshots so every score is reproducible
offline. The syllable counter is a vowel-group heuristic with a silent-e
rule; both readability formulas consume it and the [.!?]-run sentence
splitter, so their outputs are exact deterministic functions of the text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

READING_TIME_PER_CHAR_S = 0.01469

EMOTIONS = ("anger", "fear", "happiness", "sadness", "surprise")
POS_CLASSES = ("adjective", "determiner", "noun", "pronoun", "punctuation", "verb")

_WORD_RE = re.compile(r"[a-z']+")
_SENT_SPLIT_RE = re.compile(r"[.!?]+")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")
_POS_TOKEN_RE = re.compile(r"\w+|[^\w\s]+")

_TAG_TO_CLASS = {
    "ADJ": "adjective",
    "DET": "determiner",
    "NOUN": "noun",
    "PRON": "pronoun",
    "VERB": "verb",
}


def _read(name: str) -> list[str]:
    text = resources.files("streamguard.data").joinpath(name).read_text("utf-8")
    return [line for line in text.splitlines() if line.strip()]


EASY_WORDS = frozenset(w.strip() for w in _read("easy_words.txt"))
EMOTION_LEXICON: dict[str, str] = {}
for _line in _read("emotion_lexicon.tsv"):
    _w, _e = _line.split("\t")
    EMOTION_LEXICON[_w] = _e
POLARITY_LEXICON: dict[str, float] = {}
for _line in _read("polarity_lexicon.tsv"):
    _w, _v = _line.split("\t")
    POLARITY_LEXICON[_w] = float(_v)
POS_LEXICON: dict[str, str] = {}
for _line in _read("pos_lexicon.tsv"):
    _w, _t = _line.split("\t")
    POS_LEXICON[_w] = _t


@dataclass(frozen=True)
class SideFeatures:
    """Numeric side features of one post (the non-LLM ones)."""

    difficult_words: int
    emotion: tuple[float, float, float, float, float]  # EMOTIONS order
    flesch: float
    mcalpine_eflaw: float
    polarity: float
    pos_ratios: tuple[float, float, float, float, float, float]  # POS_CLASSES order
    reading_time_s: float
    word_count: int

    def as_features(self) -> dict[str, float]:
        out = {
            "difficult_words": float(self.difficult_words),
            "flesch": self.flesch,
            "mcalpine_eflaw": self.mcalpine_eflaw,
            "polarity": self.polarity,
            "reading_time_s": self.reading_time_s,
            "word_count": float(self.word_count),
        }
        for name, value in zip(EMOTIONS, self.emotion):
            out[f"emotion_{name}"] = value
        for name, value in zip(POS_CLASSES, self.pos_ratios):
            out[f"pos_{name}"] = value
        return out


def _lexicon_tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def count_syllables(word: str) -> int:
    """Vowel-group heuristic with a silent trailing-e subtraction, min 1."""
    w = "".join(c for c in word.lower() if c.isalpha())
    if not w:
        return 0
    groups = len(_VOWEL_GROUP_RE.findall(w))
    if groups > 1 and w.endswith("e") and not w.endswith(("le", "ee", "ye")):
        groups -= 1
    return max(1, groups)


def count_sentences(text: str) -> int:
    """Number of [.!?]-delimited segments containing a word character, min 1."""
    segments = _SENT_SPLIT_RE.split(text)
    n = sum(1 for seg in segments if re.search(r"\w", seg))
    return max(1, n)


def word_count(cleaned: str) -> int:
    return len(cleaned.split())


def flesch_score(text: str) -> float:
    """206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)."""
    words = text.split()
    if not words:
        return 0.0
    n_words = len(words)
    n_sentences = count_sentences(text)
    n_syllables = sum(count_syllables(w) for w in words)
    return 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words)


def mcalpine_eflaw(text: str) -> float:
    """(words + mini-words)/sentences, where mini-words have <= 3 letters."""
    words = [w for w in text.split() if re.search(r"[a-zA-Z]", w)]
    if not words:
        return 0.0
    minis = sum(1 for w in words if len(re.sub(r"[^a-zA-Z]", "", w)) <= 3)
    return (len(words) + minis) / count_sentences(text)


def difficult_word_count(text: str) -> int:
    """Tokens with >= 3 heuristic syllables that are not on the easy list."""
    count = 0
    for tok in _lexicon_tokens(text):
        word = tok.strip("'")
        if word and word not in EASY_WORDS and count_syllables(word) >= 3:
            count += 1
    return count


def emotion_load(text: str) -> tuple[float, float, float, float, float]:
    """Share of emotion-bearing tokens per class; zeros when none."""
    hits = {e: 0 for e in EMOTIONS}
    total = 0
    for tok in _lexicon_tokens(text):
        cls = EMOTION_LEXICON.get(tok.strip("'"))
        if cls is not None:
            hits[cls] += 1
            total += 1
    if total == 0:
        return (0.0,) * 5
    return tuple(hits[e] / total for e in EMOTIONS)


def polarity(text: str) -> float:
    """Mean valence of lexicon-hit tokens, 0 when nothing matches."""
    values = []
    for tok in _lexicon_tokens(text):
        v = POLARITY_LEXICON.get(tok.strip("'"))
        if v is not None:
            values.append(v)
    if not values:
        return 0.0
    return sum(values) / len(values)


def _tag_token(token: str) -> str | None:
    if not re.search(r"\w", token):
        return "punctuation"
    low = token.lower()
    tag = POS_LEXICON.get(low)
    if tag is not None:
        return _TAG_TO_CLASS.get(tag)  # ADP/ADV/CONJ fall outside the six
    if low.endswith("ly"):
        return None
    if low.endswith(("ing", "ed")):
        return "verb"
    if low.endswith(("ous", "ful", "ive", "able", "est")):
        return "adjective"
    return "noun"


def pos_ratios(raw_text: str) -> tuple[float, float, float, float, float, float]:
    """Tag-class shares over all tokens of the raw text (punctuation counts
    as its own token class, which is why this runs before cleaning)."""
    tokens = _POS_TOKEN_RE.findall(raw_text)
    if not tokens:
        return (0.0,) * 6
    counts = {c: 0 for c in POS_CLASSES}
    for tok in tokens:
        cls = _tag_token(tok)
        if cls is not None:
            counts[cls] += 1
    n = len(tokens)
    return tuple(counts[c] / n for c in POS_CLASSES)


def reading_time(text: str) -> float:
    """Seconds to read: non-whitespace characters times a fixed per-char cost."""
    chars = sum(1 for c in text if not c.isspace())
    return chars * READING_TIME_PER_CHAR_S


def side_features(cleaned_text: str, raw_text: str) -> SideFeatures:
    """All formula features for one post. Readability, emotion, polarity and
    counts run on the cleaned text; POS ratios need the raw text so the
    punctuation share survives cleaning."""
    return SideFeatures(
        difficult_words=difficult_word_count(cleaned_text),
        emotion=emotion_load(cleaned_text),
        flesch=flesch_score(cleaned_text),
        mcalpine_eflaw=mcalpine_eflaw(cleaned_text),
        polarity=polarity(cleaned_text),
        pos_ratios=pos_ratios(raw_text),
        reading_time_s=reading_time(cleaned_text),
        word_count=word_count(cleaned_text),
    )


class NgramVocabulary:
    """Frozen unigram vocabulary fitted on the cold-start buffer.

    Terms are kept when their document-frequency fraction lies in
    [min_df, max_df]; ordering is lexicographic and never changes after fit.
    """

    min_df = 0.01
    max_df = 0.7

    def __init__(self, terms: tuple[str, ...], fitted_on: int):
        self.terms = terms
        self.fitted_on = fitted_on
        self._index = {t: i for i, t in enumerate(terms)}

    def __len__(self) -> int:
        return len(self.terms)

    def index_of(self, term: str) -> int | None:
        return self._index.get(term)


def fit_ngram_vocabulary(corpus) -> NgramVocabulary:
    """Fit the unigram vocabulary on tokenized posts; raises without data."""
    corpus = list(corpus)
    if not corpus:
        raise ValueError("cold start required: empty corpus for vocabulary fit")
    n_docs = len(corpus)
    doc_freq: dict[str, int] = {}
    for post in corpus:
        for term in set(post.tokens):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    terms = sorted(
        term
        for term, df in doc_freq.items()
        if NgramVocabulary.min_df <= df / n_docs <= NgramVocabulary.max_df
    )
    return NgramVocabulary(terms=tuple(terms), fitted_on=n_docs)


def transform_ngrams(post, vocab: NgramVocabulary) -> dict[int, int]:
    """Sparse term-index -> count map; out-of-vocabulary tokens are ignored."""
    counts: dict[int, int] = {}
    for tok in post.tokens:
        idx = vocab.index_of(tok)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return counts
