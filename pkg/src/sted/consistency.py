"""Consistency of repeated generations.

Two aggregates over the pairwise similarity set: the plain mean, and a
dispersion score ``(1 / (1 + 2 * sigma_hat)) ** alpha`` where ``sigma_hat``
is the population standard deviation divided by the largest one attainable
by the same number of values in [0, 1].
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .core import MODES, Comparator, StedConfig
from .embeddings import Embedder
from .errors import EmptySet, InputError, PairComparisonError, StedError, TooFew
from .tree import DocumentTree

DEFAULT_ALPHA = 20.0


@dataclass(frozen=True)
class SimilaritySet:
    values: tuple[float, ...]
    n_outputs: int
    mode: str = "hybrid"

    def __post_init__(self):
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise InputError("similarity values must lie in [0, 1]")


@dataclass(frozen=True)
class Summary:
    mean: float
    std: float
    min: float
    max: float
    median: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "min": self.min, "max": self.max, "median": self.median}


@dataclass(frozen=True)
class ConsistencyReport:
    mean_consistency: float
    sigma: float
    sigma_max: float
    sigma_hat: float
    consistency_score: float
    alpha: float
    mode: str
    n_outputs: int
    summary: Summary | None

    def to_dict(self) -> dict:
        return {
            "mean_consistency": self.mean_consistency,
            "sigma": self.sigma,
            "sigma_max": self.sigma_max,
            "sigma_hat": self.sigma_hat,
            "consistency_score": self.consistency_score,
            "alpha": self.alpha,
            "mode": self.mode,
            "n_outputs": self.n_outputs,
            "summary": None if self.summary is None else self.summary.to_dict(),
        }


def _pair_task(args) -> float | StedError:
    a, b, config, embedder = args
    try:
        return Comparator(config, embedder).similarity(a, b)
    except StedError as exc:
        return exc


def pairwise_similarities(
    outputs: Sequence[DocumentTree],
    config: StedConfig | None = None,
    embedder: Embedder | None = None,
    jobs: int = 1,
) -> SimilaritySet:
    """STED scores of all unordered pairs, in lexicographic (i, j) order.

    ``jobs > 1`` spreads the pairs over worker processes; the result is the
    same as the sequential one.
    """
    config = config or StedConfig()
    pairs = list(combinations(range(len(outputs)), 2))
    if jobs > 1 and len(pairs) > 1:
        tasks = [(outputs[i], outputs[j], config, embedder) for i, j in pairs]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_pair_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        comp = Comparator(config, embedder)
        results = []
        for i, j in pairs:
            try:
                results.append(comp.similarity(outputs[i], outputs[j]))
            except StedError as exc:
                results.append(exc)
                break
    for (i, j), r in zip(pairs, results):
        if isinstance(r, StedError):
            raise PairComparisonError(i, j, r) from r
    return SimilaritySet(tuple(results), len(outputs), config.mode)


def mean_consistency(values: SimilaritySet | Sequence[float]) -> float:
    vals = values.values if isinstance(values, SimilaritySet) else tuple(values)
    if not vals:
        raise EmptySet("mean of an empty similarity set")
    return math.fsum(vals) / len(vals)


def sigma_max(n: int) -> float:
    """Population std of floor(n/2) zeros and ceil(n/2) ones."""
    if n < 2:
        raise TooFew(f"sigma_max needs at least 2 values, got {n}")
    ones = (n + 1) // 2
    m = ones / n
    return math.sqrt(m * (1.0 - m))


def _pstdev(vals: Sequence[float]) -> float:
    if min(vals) == max(vals):
        return 0.0  # exact for constant lists, no rounding noise
    mu = math.fsum(vals) / len(vals)
    return math.sqrt(math.fsum((v - mu) ** 2 for v in vals) / len(vals))


def score_from_sigma_hat(sigma_hat: float, alpha: float = DEFAULT_ALPHA) -> float:
    return (1.0 / (1.0 + 2.0 * sigma_hat)) ** alpha


def summary_stats(values: Sequence[float]) -> Summary:
    vals = list(values)
    if not vals:
        raise EmptySet("summary of an empty list")
    return Summary(math.fsum(vals) / len(vals), _pstdev(vals), min(vals), max(vals), statistics.median(vals))


def consistency_score(
    values: SimilaritySet | Sequence[float],
    alpha: float = DEFAULT_ALPHA,
    mode: str | None = None,
) -> ConsistencyReport:
    if isinstance(values, SimilaritySet):
        vals, n_outputs, mode = values.values, values.n_outputs, mode or values.mode
    else:
        vals = tuple(values)
        # n(n-1)/2 = len(vals) solved for n; only meaningful for triangular counts
        n_outputs = int(round((1 + math.sqrt(1 + 8 * len(vals))) / 2)) if vals else 0
    mode = mode or "hybrid"
    if alpha <= 0:
        raise InputError("alpha must be positive")
    if not vals:
        return ConsistencyReport(1.0, 0.0, 0.0, 0.0, 1.0, alpha, mode, n_outputs, None)
    summary = summary_stats(vals)
    if len(vals) < 2:
        return ConsistencyReport(summary.mean, 0.0, 0.0, 0.0, 1.0, alpha, mode, n_outputs, summary)
    sigma = summary.std
    smax = sigma_max(len(vals))
    sigma_hat = min(1.0, sigma / smax) if smax > 0 else 0.0
    return ConsistencyReport(
        summary.mean, sigma, smax, sigma_hat, score_from_sigma_hat(sigma_hat, alpha), alpha, mode, n_outputs, summary
    )


def evaluate_consistency(
    outputs: Sequence[DocumentTree],
    mode: str = "hybrid",
    config: StedConfig | None = None,
    embedder: Embedder | None = None,
    alpha: float = DEFAULT_ALPHA,
    jobs: int = 1,
) -> ConsistencyReport:
    """Score a set of outputs under one evaluation mode's weight preset."""
    if mode not in MODES:
        raise InputError(f"mode must be one of {sorted(MODES)}")
    if not outputs:
        raise EmptySet("need at least one output")
    cfg = config or StedConfig()
    if cfg.mode != mode:
        cfg = cfg.with_mode(mode)
    return consistency_score(pairwise_similarities(outputs, cfg, embedder, jobs), alpha, mode)
