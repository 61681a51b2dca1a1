"""Hyper-parameter search: grid over tiling (w, k, f), linear over split length.

Each configuration is scored by the mean over episodes of a selection
objective, (Pk + WD) / 2 by default; per-episode failures are recorded and
excluded from that configuration's mean rather than disqualifying it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .corpus import AnnotatedEpisode
from .embeddings import EmbeddingStore
from .errors import PodsegError
from .segmetrics import EvalReport, WindowConfig, pk, window_diff
from .textmodel import Segmentation, Transcript
from .textsplit import SplitParams, split
from .texttiling import TilingParams, tile

__all__ = ["GridSpec", "ConfigResult", "TuneResult", "tune_tiling", "tune_textsplit", "select_best"]

OBJECTIVES = ("pk+wd", "pk", "wd")


@dataclass(frozen=True)
class GridSpec:
    """Search space; defaults bracket the classic defaults and the tuned optimum."""

    w_values: tuple[int, ...] = (10, 20, 30, 40)
    k_values: tuple[int, ...] = (5, 10, 15)
    f_values: tuple[int, ...] = (0, 1)
    l_values: tuple[int, ...] = (5, 10, 15, 20, 30)

    def __post_init__(self) -> None:
        for name in ("w_values", "k_values", "f_values", "l_values"):
            values = getattr(self, name)
            if not values:
                raise ValueError(f"{name} must be non-empty")
        if any(v < 1 for v in self.w_values + self.k_values + self.l_values):
            raise ValueError("grid values must be positive")
        if any(f not in (0, 1) for f in self.f_values):
            raise ValueError("f values must be 0 or 1")


@dataclass(frozen=True)
class ConfigResult:
    """Corpus-level outcome for one configuration."""

    segmenter: str
    parameters: Mapping[str, object]
    mean_pk: float
    mean_wd: float
    objective: float
    failures: int
    reports: tuple[EvalReport, ...]


@dataclass(frozen=True)
class TuneResult:
    segmenter: str
    objective_name: str
    results: tuple[ConfigResult, ...]
    best: ConfigResult


def _objective_value(mean_pk: float, mean_wd: float, objective: str) -> float:
    if objective == "pk+wd":
        return (mean_pk + mean_wd) / 2
    if objective == "pk":
        return mean_pk
    if objective == "wd":
        return mean_wd
    raise ValueError(f"unknown objective {objective!r}, expected one of {OBJECTIVES}")


def _evaluate_config(
    corpus: Sequence[AnnotatedEpisode],
    segmenter: str,
    parameters: Mapping[str, object],
    run: Callable[[Transcript], Segmentation],
    objective: str,
    window: WindowConfig,
    embedding_identity: str = "",
) -> ConfigResult:
    reports = []
    failures = 0
    for episode in corpus:
        try:
            hypothesis = run(episode.transcript)
            k = window.resolve(episode.reference)
            report = EvalReport(
                episode_id=episode.transcript.episode_id,
                segmenter=segmenter,
                parameters=dict(parameters),
                pk=pk(episode.reference, hypothesis, k),
                wd=window_diff(episode.reference, hypothesis, k),
                window_k=k,
                embedding_identity=embedding_identity,
            )
        except PodsegError:
            failures += 1
            continue
        reports.append(report)
    if reports:
        mean_pk = sum(r.pk for r in reports) / len(reports)
        mean_wd = sum(r.wd for r in reports) / len(reports)
        value = _objective_value(mean_pk, mean_wd, objective)
    else:
        mean_pk = mean_wd = value = math.inf
    return ConfigResult(
        segmenter=segmenter,
        parameters=dict(parameters),
        mean_pk=mean_pk,
        mean_wd=mean_wd,
        objective=value,
        failures=failures,
        reports=tuple(reports),
    )


def tune_tiling(
    corpus: Sequence[AnnotatedEpisode],
    grid: GridSpec | None = None,
    objective: str = "pk+wd",
    window: WindowConfig | None = None,
) -> TuneResult:
    """Grid search over (w, k, f); ties prefer smaller w, then k, then f."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    grid = grid or GridSpec()
    window = window or WindowConfig()
    results = []
    for w in sorted(grid.w_values):
        for k in sorted(grid.k_values):
            for f in sorted(grid.f_values):
                params = TilingParams(w=w, k=k, f=f)
                results.append(
                    _evaluate_config(
                        corpus,
                        "tiling",
                        {"w": w, "k": k, "f": f},
                        lambda t, p=params: tile(t, p),
                        objective,
                        window,
                    )
                )
    best = min(results, key=lambda r: r.objective)
    return TuneResult(segmenter="tiling", objective_name=objective, results=tuple(results), best=best)


def tune_textsplit(
    corpus: Sequence[AnnotatedEpisode],
    store: EmbeddingStore,
    l_values: Sequence[int] | None = None,
    objective: str = "pk+wd",
    window: WindowConfig | None = None,
    variant: str = "dynamic",
) -> TuneResult:
    """Linear search over the target segment length l."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    values = tuple(l_values) if l_values is not None else GridSpec().l_values
    if not values or any(v < 1 for v in values):
        raise ValueError(f"l values must be positive, got {values}")
    window = window or WindowConfig()
    results = []
    for l in sorted(values):
        params = SplitParams(target_length=l, variant=variant)
        results.append(
            _evaluate_config(
                corpus,
                "textsplit",
                {"l": l, "variant": variant},
                lambda t, p=params: split(t, store, p),
                objective,
                window,
                embedding_identity=store.identity,
            )
        )
    best = min(results, key=lambda r: r.objective)
    return TuneResult(
        segmenter="textsplit", objective_name=objective, results=tuple(results), best=best
    )


def select_best(results: Sequence[TuneResult]) -> ConfigResult:
    """The lowest-objective configuration across segmenters; name breaks ties."""
    if not results:
        raise ValueError("need at least one tuning result")
    return min(results, key=lambda r: (r.best.objective, r.segmenter)).best
