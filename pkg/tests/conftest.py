import numpy as np
import pytest

from streamguard import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # JIT compilation happens once here so timed tests measure the work,
    # not the compiler
    kernels.warmup()


def make_feature_stream(seed, n, n_features=8, flip_at=None, noise=0.0,
                        margin=0.5):
    """Labelled vectors where feature 0 separates the classes with a clean
    margin; optional label-function inversion at ``flip_at`` and optional
    label noise."""
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(n, n_features))
    concept = (rng.random(n) < 0.5).astype(int)
    signs = 2 * concept - 1
    xs[:, 0] = signs * (margin + np.abs(xs[:, 0]))
    ys = concept.copy()
    if flip_at is not None:
        ys[flip_at:] = 1 - ys[flip_at:]
    if noise > 0.0:
        flips = rng.random(n) < noise
        ys = np.where(flips, 1 - ys, ys)
    return xs, ys
