import numpy as np

from streamguard.llmfeats import (
    TRAIT_PHRASES,
    MockLlmBackend,
    TraitExtractor,
)
from streamguard.synth import (
    ANGRY_WORDS,
    BENIGN_PHRASES,
    FILLER_WORDS,
    HAPPY_WORDS,
    make_synthetic_stream,
)


def test_fixed_seed_is_reproducible():
    a = make_synthetic_stream(seed=7, n=200)
    b = make_synthetic_stream(seed=7, n=200)
    assert [(p.text, p.label) for p in a] == [(p.text, p.label) for p in b]
    c = make_synthetic_stream(seed=8, n=200)
    assert [p.text for p in a] != [p.text for p in c]


def test_class_balance_at_scale():
    posts = make_synthetic_stream(seed=3, n=10_000, noise=0.0)
    present = sum(1 for p in posts if p.label == "present")
    assert abs(present / 10_000 - 0.5) <= 0.03


def test_benign_vocabulary_never_fires_traits():
    all_phrases = [p for phrases in TRAIT_PHRASES.values() for p in phrases]
    benign_text = " ".join(
        FILLER_WORDS + BENIGN_PHRASES + HAPPY_WORDS + ANGRY_WORDS
    ).lower()
    for phrase in all_phrases:
        assert phrase not in benign_text


def test_noise_free_labels_follow_planted_traits():
    posts = make_synthetic_stream(seed=5, n=400, noise=0.0)
    extractor = TraitExtractor(MockLlmBackend())
    for post in posts:
        traits = extractor.extract(post.text).traits
        has_any = any(traits.as_features().values())
        assert has_any == (post.label == "present")


def test_drift_inverts_the_label_function():
    n, flip = 600, 300
    posts = make_synthetic_stream(seed=9, n=n, drift_at=flip, noise=0.0)
    extractor = TraitExtractor(MockLlmBackend())
    for i, post in enumerate(posts):
        traits = extractor.extract(post.text).traits
        has_any = any(traits.as_features().values())
        expected = has_any if i < flip else not has_any
        assert expected == (post.label == "present")


def test_noise_rate_and_determinism():
    clean = make_synthetic_stream(seed=11, n=5000, noise=0.0)
    noisy = make_synthetic_stream(seed=11, n=5000, noise=0.1)
    # the noise draw is consumed either way, so texts are identical and
    # only labels flip
    assert [p.text for p in clean] == [p.text for p in noisy]
    flipped = sum(1 for a, b in zip(clean, noisy) if a.label != b.label)
    assert 0.07 <= flipped / 5000 <= 0.13
    present = sum(1 for p in noisy if p.label == "present")
    assert 0.35 <= present / 5000 <= 0.65
