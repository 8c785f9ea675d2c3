"""Model-bundle persistence.

A snapshot is a gzip-compressed pickle with a small validated header:

    {"format": "streamguard.snapshot", "version": 1, "payload": {...}}

The payload carries everything needed to resume a stream bit-exactly on the
same kernel backend: model (including RNG state), selection mask, variance
tracker, n-gram vocabulary, feature space, and the run configuration.
Snapshots written by one minor release load in any later minor release of
the same major version; the header version bumps on layout change.
"""

from __future__ import annotations

import gzip
import pickle

FORMAT_NAME = "streamguard.snapshot"
FORMAT_VERSION = 1


def save_bundle(path: str, payload: dict) -> None:
    record = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "payload": payload}
    with gzip.open(path, "wb") as fh:
        pickle.dump(record, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_bundle(path: str) -> dict:
    with gzip.open(path, "rb") as fh:
        record = pickle.load(fh)
    if not isinstance(record, dict) or record.get("format") != FORMAT_NAME:
        raise ValueError(f"{path}: not a streamguard snapshot")
    if record.get("version") != FORMAT_VERSION:
        raise ValueError(
            f"{path}: snapshot version {record.get('version')} not supported "
            f"(expected {FORMAT_VERSION})"
        )
    return record["payload"]
