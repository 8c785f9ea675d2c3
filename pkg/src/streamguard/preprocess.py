"""Deterministic text cleaning for the NLP feature extractors.

The cleaning cascade lowercases the input and then removes, in order: links,
digit runs (with any letters glued to them), punctuation, special characters
(including every non-ASCII symbol, which is how emoji get dropped), and
redundant whitespace. Tokens are then filtered against a bundled stop-word
snapshot — minus a small set of retained signal words such as "no" and
"yes" — and mapped through a lemma table with a suffix-rule fallback.

Everything here is pure and reentrant; the lexicon files are read once at
import. LLM trait extraction never sees this output: it always works on the
raw post text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

# stop-list entries kept as features despite appearing in the standard list
RETAINED_TERMS = frozenset(
    ["no", "yes", "more", "but", "very", "without", "much", "little", "nothing"]
)

_URL_RE = re.compile(r"(?:(?:pic\.|http|www|\w+)?:(?://)*)\S+")
_NUMBER_RE = re.compile(r"\d+[A-Za-z]*")
_PUNCT_RE = re.compile(r"[,.\u2019\u2018'`:;!?\-]+")
_SPECIAL_RE = re.compile(r"[*\[\]=(){}$\"\\|+&/~\u00b0\u20ac\u00a3\u2014\u2013]+|[^\x00-\x7f]+")
_SPACE_RE = re.compile(r"\s+")

# fallback lemma suffix rules, tried in order; each strips the suffix and
# appends the replacement, subject to the guards in _suffix_lemma
_SUFFIX_RULES = (("ies", "y"), ("es", ""), ("ing", ""), ("ed", ""), ("s", ""))
_ES_STEMS = ("ss", "ch", "sh", "x", "z")
_DOUBLES = ("bb", "dd", "gg", "mm", "nn", "pp", "rr", "tt")
_E_RESTORE = ("v", "c", "g", "bl", "iz")
_VOWELS = set("aeiouy")


def _load_lines(name: str) -> list[str]:
    text = resources.files("streamguard.data").joinpath(name).read_text("utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


def _load_stopwords() -> frozenset[str]:
    return frozenset(_load_lines("stopwords.txt")) - RETAINED_TERMS


def _load_lemma_table() -> dict[str, str]:
    table: dict[str, str] = {}
    for line in _load_lines("lemmas.tsv"):
        surface, lemma = line.split("\t")
        table[surface] = lemma
    # resolve chains so the table maps straight to canonical forms
    for surface, lemma in list(table.items()):
        seen = {surface}
        while lemma in table and lemma not in seen and table[lemma] != lemma:
            seen.add(lemma)
            lemma = table[lemma]
        table[surface] = lemma
    return table


STOPWORDS = _load_stopwords()
LEMMA_TABLE = _load_lemma_table()


@dataclass(frozen=True)
class RawPost:
    """An ingested post, text kept byte-exact."""

    id: str
    text: str
    received_at: float | None = None
    label: str | None = None  # "absent" | "present" when ground truth exists


@dataclass(frozen=True)
class TokenizedPost:
    post_id: str
    cleaned_text: str
    tokens: tuple[str, ...] = field(default_factory=tuple)


def clean_text(raw: str) -> str:
    """Apply the removal cascade; total on any string, may return ''."""
    t = raw.lower()
    t = _URL_RE.sub(" ", t)
    t = _NUMBER_RE.sub(" ", t)
    t = _PUNCT_RE.sub(" ", t)
    t = _SPECIAL_RE.sub(" ", t)
    t = _SPACE_RE.sub(" ", t)
    return t.strip()


def tokenize_and_filter(cleaned: str) -> list[str]:
    """Whitespace-split and drop stop words and words shorter than 3 chars.

    Retained signal terms bypass both filters, which is why "no" survives.
    """
    out = []
    for tok in cleaned.split():
        if tok in RETAINED_TERMS:
            out.append(tok)
        elif tok not in STOPWORDS and len(tok) >= 3:
            out.append(tok)
    return out


def _suffix_lemma(word: str) -> str:
    """Iterated suffix stripping; terminates at a fixed point."""
    current = word
    while True:
        nxt = _suffix_step(current)
        if nxt == current:
            return current
        current = nxt


def _suffix_step(word: str) -> str:
    for suffix, repl in _SUFFIX_RULES:
        if not word.endswith(suffix):
            continue
        stem = word[: -len(suffix)]
        if suffix == "ies":
            cand = stem + "y"
            if len(cand) >= 3:
                return cand
            continue
        if suffix == "es":
            if stem.endswith(_ES_STEMS) and len(stem) >= 3:
                return stem
            continue
        if suffix in ("ing", "ed"):
            if suffix == "ed" and word.endswith("eed"):
                continue
            if len(stem) < 3 or not (_VOWELS & set(stem)):
                continue
            if stem.endswith(_DOUBLES):
                return stem[:-1]
            if stem.endswith(_E_RESTORE):
                return stem + "e"
            return stem
        if suffix == "s":
            if word.endswith(("ss", "us", "is")):
                continue
            if len(stem) >= 3:
                return stem
            continue
    return word


def lemma_of(token: str) -> str:
    """Lemma for one token: table lookup first, suffix rules otherwise."""
    if token in RETAINED_TERMS:
        return token
    if token in LEMMA_TABLE:
        return LEMMA_TABLE[token]
    return _suffix_lemma(token)


def lemmatize(tokens: list[str]) -> list[str]:
    """Map tokens to lemmas, dropping results shorter than 3 characters
    (retained terms excepted)."""
    out = []
    for tok in tokens:
        lemma = lemma_of(tok)
        if lemma in RETAINED_TERMS or len(lemma) >= 3:
            out.append(lemma)
    return out


def preprocess(post: RawPost) -> TokenizedPost:
    """clean -> tokenize/filter -> lemmatize."""
    cleaned = clean_text(post.text)
    tokens = lemmatize(tokenize_and_filter(cleaned))
    return TokenizedPost(post_id=post.id, cleaned_text=cleaned, tokens=tuple(tokens))
