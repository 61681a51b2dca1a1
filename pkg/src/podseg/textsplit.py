"""Embedding-based segmentation by penalised segment-vector norms.

A segment's score is the Euclidean norm of the sum of its sentence vectors;
aligned (topically coherent) sentences reinforce each other while mixed
segments partially cancel. Both variants optimise

    sum of segment scores - penalty * (number of segments - 1)

the greedy variant by repeated best-gain splitting, the dynamic variant
exactly by dynamic programming over prefix optima. The penalty can be
calibrated from a target mean segment length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingStore, sentence_vector
from .errors import DegenerateInput, EmptyInput, TooShort
from .textmodel import Segmentation, Transcript

__all__ = [
    "SplitParams",
    "segment_score",
    "greedy_split",
    "dynamic_split",
    "split_objective",
    "penalty_from_length",
    "split",
]

_CALIBRATION_ITERATIONS = 40


@dataclass(frozen=True)
class SplitParams:
    """Penalty (or target length it is derived from) plus the variant."""

    penalty: float | None = None
    target_length: int | None = 10
    variant: str = "dynamic"

    def __post_init__(self) -> None:
        if self.penalty is None and self.target_length is None:
            raise ValueError("set at least one of penalty, target_length")
        if self.penalty is not None and self.penalty < 0:
            raise ValueError(f"penalty must be >= 0, got {self.penalty}")
        if self.target_length is not None and self.target_length < 1:
            raise ValueError(f"target_length must be >= 1, got {self.target_length}")
        if self.variant not in ("greedy", "dynamic"):
            raise ValueError(f"variant must be 'greedy' or 'dynamic', got {self.variant!r}")


class _Scores:
    """Prefix-sum backed segment scores; one float path for all variants."""

    def __init__(self, vectors: Sequence[Sequence[float]] | np.ndarray):
        arr = np.asarray(vectors, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError(f"expected a list of equal-length vectors, got shape {arr.shape}")
        self.n = arr.shape[0]
        self.prefix = np.vstack([np.zeros((1, arr.shape[1])), np.cumsum(arr, axis=0)])

    def score(self, a: int, b: int) -> float:
        return float(np.linalg.norm(self.prefix[b] - self.prefix[a]))

    def scores_from(self, a: int, ends: np.ndarray) -> np.ndarray:
        """Scores of [a, e) for every e in ends."""
        return np.linalg.norm(self.prefix[ends] - self.prefix[a], axis=1)


def segment_score(sentence_vectors: Sequence[Sequence[float]] | np.ndarray, a: int, b: int) -> float:
    """Euclidean norm of the sum of vectors a..b-1."""
    scores = _Scores(sentence_vectors)
    if not 0 <= a < b <= scores.n:
        raise ValueError(f"need 0 <= a < b <= {scores.n}, got a={a}, b={b}")
    return scores.score(a, b)


def _best_split(scores: _Scores, a: int, b: int) -> tuple[float, int] | None:
    """Highest raw gain (before penalty) of any single split of [a, b)."""
    if b - a < 2:
        return None
    ts = np.arange(a + 1, b)
    gains = scores.scores_from(a, ts) + np.linalg.norm(scores.prefix[b] - scores.prefix[ts], axis=1)
    gains -= scores.score(a, b)
    best = int(np.argmax(gains))  # first maximum: smallest t wins ties
    return float(gains[best]), int(ts[best])


def greedy_split(sentence_vectors: Sequence[Sequence[float]] | np.ndarray, p: float) -> Segmentation:
    """Repeatedly apply the best-gain split until no split gains more than p."""
    if p < 0:
        raise ValueError(f"penalty must be >= 0, got {p}")
    scores = _Scores(sentence_vectors)
    n = scores.n
    if n < 1:
        raise EmptyInput("need at least one sentence vector")

    segments = [(0, n)]
    best: dict[tuple[int, int], tuple[float, int] | None] = {(0, n): _best_split(scores, 0, n)}
    while True:
        winner = None
        for seg in segments:
            cand = best[seg]
            if cand is None:
                continue
            gain, t = cand
            if winner is None or gain - p > winner[0] or (gain - p == winner[0] and t < winner[1]):
                winner = (gain - p, t, seg)
        if winner is None or winner[0] <= 0:
            break
        _, t, seg = winner
        a, b = seg
        segments.remove(seg)
        segments.extend([(a, t), (t, b)])
        best[(a, t)] = _best_split(scores, a, t)
        best[(t, b)] = _best_split(scores, t, b)
    return Segmentation(total=n, boundaries=tuple(sorted(b for _, b in segments)))


def dynamic_split(sentence_vectors: Sequence[Sequence[float]] | np.ndarray, p: float) -> Segmentation:
    """Exact optimum of the penalised objective.

    Among equal-objective solutions the result has the fewest segments and,
    within that, the lexicographically earliest boundary list.
    """
    if p < 0:
        raise ValueError(f"penalty must be >= 0, got {p}")
    scores = _Scores(sentence_vectors)
    n = scores.n
    if n < 1:
        raise EmptyInput("need at least one sentence vector")

    # value[i]: best (sum of scores - p * internal splits) for the suffix [i, n)
    value = np.zeros(n + 1)
    count = np.zeros(n + 1, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        ends = np.arange(i + 1, n + 1)
        totals = scores.scores_from(i, ends)
        totals[:-1] += value[i + 1 : n] - p  # ending anywhere but n costs one split
        best = float(np.max(totals))
        value[i] = best
        optimal = ends[totals == best]
        count[i] = 1 + int(np.min(count[optimal]))  # count[n] stays 0

    boundaries = []
    i = 0
    while i < n:
        ends = np.arange(i + 1, n + 1)
        totals = scores.scores_from(i, ends)
        totals[:-1] += value[i + 1 : n] - p
        for t, total in zip(ends, totals):
            tail = 0 if t == n else count[t]
            if total == value[i] and 1 + tail == count[i]:
                boundaries.append(int(t))
                i = int(t)
                break
    return Segmentation(total=n, boundaries=tuple(boundaries))


def split_objective(scores_input: Sequence[Sequence[float]] | np.ndarray, seg: Segmentation, p: float) -> float:
    """Objective value of a given segmentation under penalty p."""
    scores = _Scores(scores_input)
    prev = 0
    total = 0.0
    for b in seg.boundaries:
        total += scores.score(prev, b)
        prev = b
    return total - p * (len(seg.boundaries) - 1)


def penalty_from_length(sentence_vectors: Sequence[Sequence[float]] | np.ndarray, l: int) -> float:
    """Smallest penalty at which the greedy mean segment length reaches l.

    Found by 40-iteration binary search on [0, score of the whole document];
    if even the top of that range over-splits (possible when vectors cancel),
    the upper bound is lifted to the sum of vector norms, which always yields
    a single segment.
    """
    arr = np.asarray(sentence_vectors, dtype=np.float64)
    scores = _Scores(arr)
    n = scores.n
    if n < 1:
        raise EmptyInput("need at least one sentence vector")
    if not 1 <= l <= n:
        raise TooShort(f"need n >= l >= 1, got n={n}, l={l}")
    norms_total = float(np.linalg.norm(arr, axis=1).sum())
    if norms_total == 0.0:
        raise DegenerateInput("all sentence vectors are zero")

    def mean_length(p: float) -> float:
        return n / len(greedy_split(arr, p).boundaries)

    lo = 0.0
    hi = scores.score(0, n)
    if mean_length(hi) < l:
        hi = norms_total
    if mean_length(lo) >= l:
        return lo
    for _ in range(_CALIBRATION_ITERATIONS):
        mid = (lo + hi) / 2
        if mean_length(mid) >= l:
            hi = mid
        else:
            lo = mid
    return hi


def split(
    transcript: Transcript,
    store: EmbeddingStore,
    params: SplitParams | None = None,
) -> Segmentation:
    """Segment a transcript with the configured variant and penalty."""
    params = params or SplitParams()
    if not transcript.sentences:
        raise EmptyInput("transcript has no sentences")
    vectors = np.array([sentence_vector(s, store) for s in transcript.sentences])
    if params.penalty is not None:
        penalty = params.penalty
    else:
        penalty = penalty_from_length(vectors, params.target_length)
    if params.variant == "greedy":
        return greedy_split(vectors, penalty)
    return dynamic_split(vectors, penalty)
