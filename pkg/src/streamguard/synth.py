"""Seeded synthetic post generator for tests, benchmarks, and the bundled
evaluation corpus.

Posts are built from neutral filler words plus, for the positive class,
phrases drawn from the bundled trait lexicons (the same ones the offline
mock backend matches on, so planted traits deterministically become trait
features). The observed label equals the concept label with an optional
noise flip, and an optional abrupt concept inversion at ``drift_at``.
"""

from __future__ import annotations

import numpy as np

from streamguard.llmfeats import TRAIT_PHRASES, TRAITS
from streamguard.preprocess import RawPost

# filler vocabulary chosen to be disjoint from every trait-phrase word
FILLER_WORDS = (
    "coffee", "morning", "sunshine", "garden", "travel", "recipe", "novel",
    "cinema", "stream", "bicycle", "football", "market", "weekend", "meeting",
    "project", "playlist", "museum", "harbor", "sketch", "keyboard",
    "mountain", "lantern", "pancake", "library", "festival", "puzzle",
    "camera", "orchard", "river", "castle",
)

BENIGN_PHRASES = (
    "have a great day",
    "love this song",
    "beautiful sunset photos",
    "congrats on the win",
    "thanks for sharing",
    "happy birthday friend",
    "excited for the weekend",
    "lovely weather today",
    "proud of the team",
    "enjoyed the movie",
)

HAPPY_WORDS = ("happy", "wonderful", "delighted", "grateful", "cheerful")
ANGRY_WORDS = ("furious", "disgusting", "hateful", "outraged", "miserable")

_URL_DECOR = ("https://t.co/{i:04d}", "http://pix.example/{i:03d}")


def make_synthetic_stream(seed: int, n: int, drift_at: int | None = None,
                          noise: float = 0.1) -> list[RawPost]:
    """n labelled posts; ~balanced classes; deterministic for a seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    trait_names = list(TRAITS)
    posts = []
    for i in range(n):
        bully = rng.random() < 0.5
        words = list(rng.choice(FILLER_WORDS, size=rng.integers(4, 10)))
        if bully:
            n_traits = 2 if rng.random() < 0.3 else 1
            picks = rng.choice(len(trait_names), size=n_traits, replace=False)
            for t in sorted(picks):
                phrases = TRAIT_PHRASES[trait_names[int(t)]]
                words.insert(
                    int(rng.integers(0, len(words) + 1)),
                    phrases[int(rng.integers(0, len(phrases)))],
                )
            if rng.random() < 0.6:
                words.append(ANGRY_WORDS[int(rng.integers(0, len(ANGRY_WORDS)))])
        else:
            words.insert(
                int(rng.integers(0, len(words) + 1)),
                BENIGN_PHRASES[int(rng.integers(0, len(BENIGN_PHRASES)))],
            )
            if rng.random() < 0.6:
                words.append(HAPPY_WORDS[int(rng.integers(0, len(HAPPY_WORDS)))])
        text = " ".join(words)
        if rng.random() < 0.15:
            text += " " + _URL_DECOR[int(rng.integers(0, 2))].format(i=i)
        if rng.random() < 0.2:
            text += f" {int(rng.integers(1, 999))}"
        if rng.random() < 0.3:
            text += "!!"

        concept = bully
        if drift_at is not None and i >= drift_at:
            concept = not concept
        observed = concept if rng.random() >= noise else not concept
        posts.append(
            RawPost(
                id=f"synth-{i:06d}",
                text=text,
                received_at=float(i),
                label="present" if observed else "absent",
            )
        )
    return posts


def stream_to_csv_rows(posts) -> list[tuple[str, str]]:
    return [(p.text, p.label) for p in posts]
