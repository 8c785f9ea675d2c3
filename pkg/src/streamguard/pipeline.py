"""Stream orchestration: cold start (grid search, importance-based feature
selection, vocabulary fitting) and the prequential test-then-train loop.

Scenario 1 uses only the side features (LLM traits plus the formula
features); Scenario 2 adds the unigram count features fitted on the
cold-start buffer. One global selection mask gates what every learner sees,
and the variance filter keeps editing it during streaming.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field

import numpy as np

from streamguard.learners import (
    CLASSES,
    AdaptiveRandomForest,
    ArfParams,
    GaussianNaiveBayes,
    HoeffdingAdaptiveTree,
    HoeffdingTreeParams,
)
from streamguard.llmfeats import (
    TRAITS,
    MockLlmBackend,
    RemoteLlmBackend,
    TraitCache,
    TraitExtractor,
)
from streamguard.metrics import StreamMetrics
from streamguard.preprocess import RawPost, preprocess
from streamguard.selection import (
    SelectionMask,
    VarianceTracker,
    run_cold_start_selection,
)
from streamguard.textfeats import (
    NgramVocabulary,
    fit_ngram_vocabulary,
    side_features,
    transform_ngrams,
)

LABEL_TO_INT = {name: i for i, name in enumerate(CLASSES)}
NGRAM_PREFIX = "ng:"


@dataclass(frozen=True)
class Prediction:
    label: str
    proba: dict
    model_id: str


@dataclass
class PipelineConfig:
    scenario: int = 1
    cold_start_size: int = 1500
    model: str = "arfc"  # gnb | hatc | arfc
    params: dict | None = None  # fixed hyperparameters (single grid point)
    grid_search: bool = False  # full cartesian grid from the config lists
    seed: int = 1
    llm: str = "mock"  # mock | remote
    llm_cache: str | None = None
    llm_workers: int = 4

    def __post_init__(self):
        if self.scenario not in (1, 2):
            raise ValueError("scenario must be 1 or 2")
        if self.model not in ("gnb", "hatc", "arfc"):
            raise ValueError("model must be gnb, hatc or arfc")
        if self.cold_start_size < 2:
            raise ValueError("cold_start_size must be >= 2")


# hyperparameter grids; the asterisked defaults are the selected points
HATC_GRID = {
    "max_depth": (None, 50, 100, 200),
    "tie_threshold": (0.9, 0.5, 0.05, 0.005),
    "max_size_mb": (15, 50, 100, 200),
}
ARFC_GRID = {
    "n_models": (10, 25, 50, 75, 100),
    "max_features": ("sqrt", 4, 10, 25),
    "lam": (2, 6, 10, 25),
}
DEFAULT_PARAMS = {
    "gnb": {},
    "hatc": {"max_depth": 200, "tie_threshold": 0.005, "max_size_mb": 200},
    "arfc": {"n_models": 100, "max_features": 25, "lam": 25},
}


def grid_points(model: str) -> list[dict]:
    if model == "gnb":
        return [{}]
    grid = HATC_GRID if model == "hatc" else ARFC_GRID
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*grid.values())]


def build_model(model: str, params: dict, n_features: int, seed: int):
    if model == "gnb":
        return GaussianNaiveBayes(n_features)
    if model == "hatc":
        tp = HoeffdingTreeParams(
            max_depth=params.get("max_depth", 200),
            tie_threshold=params.get("tie_threshold", 0.005),
            max_size_mb=params.get("max_size_mb", 200),
        )
        return HoeffdingAdaptiveTree(n_features, tp)
    if model == "arfc":
        ap = ArfParams(
            n_models=params.get("n_models", 100),
            max_features=params.get("max_features", 25),
            lam=params.get("lam", 25),
        )
        return AdaptiveRandomForest(n_features, ap, seed=seed)
    raise ValueError(f"unknown model {model!r}")


class FeatureSpace:
    """Canonical (lexicographic) feature ordering plus dict -> vector
    conversion. Unknown names are rejected at this boundary; names masked
    out by selection become NaN so learners treat them as missing."""

    def __init__(self, names):
        self.names = tuple(sorted(names))
        self._order = {n: i for i, n in enumerate(self.names)}

    def __len__(self):
        return len(self.names)

    def vectorize(self, features: dict, active=None) -> np.ndarray:
        unknown = [n for n in features if n not in self._order]
        if unknown:
            raise ValueError(f"features outside the space: {sorted(unknown)[:5]}")
        x = np.zeros(len(self.names))
        for name, value in features.items():
            v = float(value)
            if not np.isfinite(v):
                raise ValueError(f"non-finite value for feature {name!r}")
            x[self._order[name]] = v
        if active is not None:
            for i, name in enumerate(self.names):
                if name not in active:
                    x[i] = np.nan
        return x


class FeatureExtractor:
    """raw post -> named feature dict (sparse over n-gram features)."""

    def __init__(self, trait_extractor: TraitExtractor,
                 vocab: NgramVocabulary | None = None):
        self.trait_extractor = trait_extractor
        self.vocab = vocab

    def extract(self, post: RawPost):
        tokenized = preprocess(post)
        feats = side_features(tokenized.cleaned_text, post.text).as_features()
        result = self.trait_extractor.extract(post.text)
        feats.update(result.traits.as_features())
        if self.vocab is not None:
            for idx, count in transform_ngrams(tokenized, self.vocab).items():
                feats[NGRAM_PREFIX + self.vocab.terms[idx]] = float(count)
        return feats, result

    def universe(self) -> list[str]:
        """All feature names this extractor can emit."""
        names = list(side_features("", "").as_features())
        names += list(TRAITS)
        if self.vocab is not None:
            names += [NGRAM_PREFIX + t for t in self.vocab.terms]
        return names


def make_trait_extractor(config: PipelineConfig) -> TraitExtractor:
    backend = MockLlmBackend() if config.llm == "mock" else RemoteLlmBackend()
    return TraitExtractor(backend, TraitCache(config.llm_cache))


@dataclass
class GridSearchReport:
    rows: list = field(default_factory=list)  # {"params": ..., "macro_f1": ...}
    selected: dict | None = None

    def as_dict(self) -> dict:
        return {"rows": self.rows, "selected": self.selected}


def _grid_rank_key(row) -> tuple:
    params = row["params"]
    depth = params.get("max_depth", 0)
    depth_rank = float("inf") if depth is None else depth
    return (
        -row["macro_f1"],
        params.get("n_models", 0),
        depth_rank,
        repr(sorted(params.items())),
    )


@dataclass
class ColdStartResult:
    model: object
    model_params: dict
    mask: SelectionMask
    vocab: NgramVocabulary | None
    report: GridSearchReport
    space: FeatureSpace
    tracker: VarianceTracker
    importances: dict
    cold_log: list  # prediction rows from the final model's training pass
    metrics_cold: StreamMetrics


def run_cold_start(config: PipelineConfig, posts: list[RawPost],
                   extractor: FeatureExtractor | None = None) -> ColdStartResult:
    posts = list(posts)
    if not posts:
        raise ValueError("cold start required: empty buffer")
    if any(p.label not in CLASSES for p in posts):
        raise ValueError("cold start requires labeled samples")
    labels = [LABEL_TO_INT[p.label] for p in posts]
    if len(set(labels)) < 2:
        raise ValueError("cold start requires both classes")

    if extractor is None:
        extractor = FeatureExtractor(make_trait_extractor(config))
    if config.scenario == 2 and extractor.vocab is None:
        extractor.vocab = fit_ngram_vocabulary(preprocess(p) for p in posts)

    # trait extraction may fan out; feature assembly stays ordered
    extractor.trait_extractor.extract_many(
        [p.text for p in posts], max_workers=config.llm_workers
    )
    feature_dicts = [extractor.extract(p)[0] for p in posts]
    space = FeatureSpace(extractor.universe())
    vectors = [space.vectorize(f) for f in feature_dicts]

    # hyperparameter search: seeded prequential pass per grid point
    points = (
        grid_points(config.model)
        if config.grid_search
        else [dict(DEFAULT_PARAMS[config.model], **(config.params or {}))]
    )
    report = GridSearchReport()
    for params in points:
        model = build_model(config.model, params, len(space), config.seed)
        metrics = StreamMetrics()
        for x, y in zip(vectors, labels):
            proba = model.predict_proba(x)
            metrics.update(CLASSES[int(np.argmax(proba))], CLASSES[y])
            model.learn_one(x, y)
        report.rows.append({"params": params, "macro_f1": metrics.macro_f1})
    best = min(report.rows, key=_grid_rank_key)
    report.selected = best["params"]

    # importance-based selection, once, on the full buffer
    matrix = np.vstack(vectors)
    selection = run_cold_start_selection(
        matrix, np.array(labels), list(space.names), seed=config.seed
    )
    mask = selection.mask

    # fresh model with the winning parameters, trained through the mask
    model = build_model(config.model, best["params"], len(space), config.seed)
    metrics_cold = StreamMetrics()
    cold_log = []
    for post, feats, y in zip(posts, feature_dicts, labels):
        x = space.vectorize(feats, mask.active)
        proba = model.predict_proba(x)
        predicted = CLASSES[int(np.argmax(proba))]
        metrics_cold.update(predicted, CLASSES[y])
        cold_log.append(
            {
                "id": post.id,
                "predicted": predicted,
                "proba": {c: float(p) for c, p in zip(CLASSES, proba)},
                "true": CLASSES[y],
                "mask_version": mask.version,
            }
        )
        model.learn_one(x, y)

    tracker = VarianceTracker(mask.sorted_names(), mask)
    return ColdStartResult(
        model=model,
        model_params=best["params"],
        mask=mask,
        vocab=extractor.vocab,
        report=report,
        space=space,
        tracker=tracker,
        importances=selection.importances,
        cold_log=cold_log,
        metrics_cold=metrics_cold,
    )


class StreamingPipeline:
    """Post-cold-start consumer: predict, score, learn, refilter — in that
    order, one post at a time."""

    def __init__(self, config: PipelineConfig, cold: ColdStartResult,
                 extractor: FeatureExtractor):
        self.config = config
        self.model = cold.model
        self.space = cold.space
        self.tracker = cold.tracker
        self.extractor = extractor
        self.model_id = f"{config.model}-s{config.seed}"
        self.metrics_stream = StreamMetrics()
        self.log: list[dict] = list(cold.cold_log)
        self._cold_rows = len(cold.cold_log)
        self.metrics_full = StreamMetrics(
            tp=cold.metrics_cold.tp, fp=cold.metrics_cold.fp,
            tn=cold.metrics_cold.tn, fn=cold.metrics_cold.fn,
            samples_seen=cold.metrics_cold.samples_seen,
        )

    def step(self, post: RawPost) -> Prediction:
        if post.label not in CLASSES:
            raise ValueError("evaluation mode needs a label on every post")
        feats, _ = self.extractor.extract(post)
        mask = self.tracker.mask
        x = self.space.vectorize(feats, mask.active)
        proba = self.model.predict_proba(x)
        prediction = Prediction(
            label=CLASSES[int(np.argmax(proba))],
            proba={c: float(p) for c, p in zip(CLASSES, proba)},
            model_id=self.model_id,
        )
        y = LABEL_TO_INT[post.label]
        self.metrics_stream.update(prediction.label, post.label)
        self.metrics_full.update(prediction.label, post.label)
        self.log.append(
            {
                "id": post.id,
                "predicted": prediction.label,
                "proba": prediction.proba,
                "true": post.label,
                "mask_version": mask.version,
            }
        )
        self.model.learn_one(x, y)
        self.tracker.update({n: feats.get(n, 0.0) for n in self.tracker.feature_names})
        return prediction

    def stream_rows(self) -> list[dict]:
        return self.log[self._cold_rows:]


@dataclass
class RunResult:
    config: PipelineConfig
    report: GridSearchReport
    mask: SelectionMask
    metrics_full: StreamMetrics
    metrics_stream: StreamMetrics
    log: list
    cold_rows: int
    pipeline: StreamingPipeline


def run_stream(config: PipelineConfig, posts: list[RawPost]) -> RunResult:
    """Cold start on the first ``cold_start_size`` posts, then prequential
    evaluation over the remainder."""
    posts = list(posts)
    buffer = posts[: config.cold_start_size]
    rest = posts[config.cold_start_size:]
    extractor = FeatureExtractor(make_trait_extractor(config))
    cold = run_cold_start(config, buffer, extractor)
    pipeline = StreamingPipeline(config, cold, extractor)
    for post in rest:
        pipeline.step(post)
    return RunResult(
        config=config,
        report=cold.report,
        mask=pipeline.tracker.mask,
        metrics_full=pipeline.metrics_full,
        metrics_stream=pipeline.metrics_stream,
        log=pipeline.log,
        cold_rows=len(cold.cold_log),
        pipeline=pipeline,
    )


def posts_from_csv(path: str, limit: int | None = None) -> list[RawPost]:
    """Read a `text,label` CSV into posts (header required)."""
    posts = []
    with open(path, "r", encoding="utf-8", errors="replace", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "text" not in reader.fieldnames:
            raise ValueError("input CSV needs a 'text' column")
        for i, row in enumerate(reader):
            if limit is not None and i >= limit:
                break
            label = (row.get("label") or "").strip() or None
            if label is not None and label not in CLASSES:
                raise ValueError(f"row {i}: label must be absent/present, got {label!r}")
            posts.append(
                RawPost(id=f"row-{i:06d}", text=row["text"], received_at=float(i),
                        label=label)
            )
    return posts


def posts_to_csv(path: str, posts: list[RawPost]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["text", "label"])
        for p in posts:
            writer.writerow([p.text, p.label or ""])
