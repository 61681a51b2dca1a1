"""Segmentation error metrics and survey analytics.

Pk slides a window of width k over the sentence units and counts windows
whose endpoints the hypothesis and reference classify differently
(same segment vs. different segments). WindowDiff counts windows whose
interior boundary counts differ. Both average over the N - k windows.

Survey analytics aggregate 1-5 relevancy ratings per title source and
correlate them with per-segment covariates via Pearson's r with a
two-sided t-test p-value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    BadScore,
    DegenerateVariance,
    DuplicateRow,
    LengthMismatch,
    MissingScores,
    WindowTooLarge,
)
from .textmodel import Segmentation

__all__ = [
    "WindowConfig",
    "SurveyRow",
    "SurveyTable",
    "EvalReport",
    "PearsonResult",
    "pk",
    "window_diff",
    "random_baseline",
    "relevancy",
    "pearson",
    "is_significant",
    "SIGNIFICANCE_LEVEL",
]

SIGNIFICANCE_LEVEL = 0.05


@dataclass(frozen=True)
class WindowConfig:
    """Window width for Pk/WindowDiff: explicit, or derived from the reference.

    The derived width is half the mean reference segment length,
    max(1, round(N / (2 * number of reference segments))).
    """

    k: int | None = None
    derivation: str = "half-mean-segment"

    def __post_init__(self) -> None:
        if self.derivation not in ("explicit", "half-mean-segment"):
            raise ValueError(f"unknown derivation {self.derivation!r}")
        if self.derivation == "explicit" and (self.k is None or self.k < 1):
            raise ValueError("explicit window needs k >= 1")

    def resolve(self, reference: Segmentation) -> int:
        if self.derivation == "explicit":
            return int(self.k)
        n_segments = len(reference.boundaries)
        return max(1, round(reference.total / (2 * n_segments)))


def _resolve_window(window: int | WindowConfig, reference: Segmentation) -> int:
    if isinstance(window, WindowConfig):
        return window.resolve(reference)
    return int(window)


def _boundary_counts(seg: Segmentation, k: int) -> np.ndarray:
    """Boundary count strictly inside each window [i, i+k], i = 1..N-k.

    A boundary after sentence b lies inside the window iff i <= b <= i+k-1;
    the final boundary at N can never fall inside a valid window.
    """
    n = seg.total
    indicator = np.zeros(n + 1, dtype=np.int64)
    for b in seg.boundaries:
        if b < n:
            indicator[b] = 1
    cumulative = np.cumsum(indicator)
    return cumulative[k:n] - cumulative[0 : n - k]


def _check_pair(reference: Segmentation, hypothesis: Segmentation, k: int) -> None:
    if reference.total != hypothesis.total:
        raise LengthMismatch(
            f"reference covers {reference.total} sentences, hypothesis {hypothesis.total}"
        )
    if k < 1:
        raise WindowTooLarge(f"window must be >= 1, got {k}")
    if k >= reference.total:
        raise WindowTooLarge(f"window {k} must be smaller than N={reference.total}")


def pk(
    reference: Segmentation,
    hypothesis: Segmentation,
    window: int | WindowConfig = WindowConfig(),
) -> float:
    """Fraction of windows whose endpoints the two segmentations classify differently."""
    k = _resolve_window(window, reference)
    _check_pair(reference, hypothesis, k)
    ref_diff = _boundary_counts(reference, k) > 0
    hyp_diff = _boundary_counts(hypothesis, k) > 0
    return float(np.mean(ref_diff != hyp_diff))


def window_diff(
    reference: Segmentation,
    hypothesis: Segmentation,
    window: int | WindowConfig = WindowConfig(),
) -> float:
    """Fraction of windows with differing interior boundary counts."""
    k = _resolve_window(window, reference)
    _check_pair(reference, hypothesis, k)
    ref_counts = _boundary_counts(reference, k)
    hyp_counts = _boundary_counts(hypothesis, k)
    return float(np.mean(np.abs(ref_counts - hyp_counts) > 0))


def random_baseline(n: int, boundary_prob: float, rng_seed: int) -> Segmentation:
    """Place each internal boundary independently with the given probability."""
    if n < 1:
        raise ValueError(f"need N >= 1, got {n}")
    if not 0.0 < boundary_prob <= 1.0:
        raise ValueError(f"boundary probability must be in (0, 1], got {boundary_prob}")
    rng = np.random.default_rng(rng_seed)
    hits = rng.random(n - 1) < boundary_prob
    boundaries = [i + 1 for i in range(n - 1) if hits[i]]
    boundaries.append(n)
    return Segmentation(total=n, boundaries=tuple(boundaries))


@dataclass(frozen=True)
class SurveyRow:
    segment_id: str
    title_source: str
    participant_id: str
    score: int


@dataclass(frozen=True)
class SurveyTable:
    """Validated per-participant relevancy ratings."""

    rows: tuple[SurveyRow, ...]

    def __post_init__(self) -> None:
        seen = set()
        for row in self.rows:
            if not isinstance(row.score, int) or isinstance(row.score, bool) or not 1 <= row.score <= 5:
                raise BadScore(
                    f"score must be an integer 1-5, got {row.score!r} "
                    f"({row.segment_id}, {row.title_source}, {row.participant_id})"
                )
            key = (row.segment_id, row.title_source, row.participant_id)
            if key in seen:
                raise DuplicateRow(f"duplicate rating {key}")
            seen.add(key)

    def sources(self) -> list[str]:
        return sorted({r.title_source for r in self.rows})


@dataclass(frozen=True)
class EvalReport:
    """Per-episode metric values for one segmenter configuration."""

    episode_id: str
    segmenter: str
    parameters: Mapping[str, object]
    pk: float
    wd: float
    window_k: int
    embedding_identity: str = ""

    def __post_init__(self) -> None:
        for name, value in (("pk", self.pk), ("wd", self.wd)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")


def relevancy(table: SurveyTable, title_source: str) -> float:
    """Mean rating of one title source over its sampled segments and participants.

    Requires a complete grid: every sampled segment rated by every counted
    participant.
    """
    rows = [r for r in table.rows if r.title_source == title_source]
    if not rows:
        raise MissingScores(f"no rows for title source {title_source!r}")
    segments = sorted({r.segment_id for r in rows})
    participants = sorted({r.participant_id for r in rows})
    cells = {(r.segment_id, r.participant_id): r.score for r in rows}
    total = 0
    for seg in segments:
        for part in participants:
            if (seg, part) not in cells:
                raise MissingScores(
                    f"missing score for segment {seg!r}, participant {part!r}, "
                    f"source {title_source!r}"
                )
            total += cells[(seg, part)]
    return total / (len(segments) * len(participants))


class PearsonResult(NamedTuple):
    r: float
    p_value: float


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Continued fraction for the regularised incomplete beta (Lentz's method)."""
    max_iterations = 300
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-14:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge for a={a}, b={b}, x={x}")


def _incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularised incomplete beta I_x(a, b), absolute error well under 1e-10."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def pearson(xs: Sequence[float], ys: Sequence[float]) -> PearsonResult:
    """Sample correlation with a two-sided p-value from the t distribution."""
    if len(xs) != len(ys):
        raise ValueError(f"series lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    ssx = float(np.sum(dx * dx))
    ssy = float(np.sum(dy * dy))
    if ssx == 0.0 or ssy == 0.0:
        raise DegenerateVariance("correlation is undefined for a constant series")
    r = float(np.sum(dx * dy)) / math.sqrt(ssx * ssy)
    r = max(-1.0, min(1.0, r))
    df = n - 2
    if abs(r) == 1.0:
        return PearsonResult(r=r, p_value=0.0)
    t_squared = r * r * df / (1.0 - r * r)
    p = _incomplete_beta(df / 2.0, 0.5, df / (df + t_squared))
    return PearsonResult(r=r, p_value=min(1.0, max(0.0, p)))


def is_significant(p_value: float, alpha: float = SIGNIFICANCE_LEVEL) -> bool:
    """Starred in reports iff p is strictly below the significance level."""
    return p_value < alpha
