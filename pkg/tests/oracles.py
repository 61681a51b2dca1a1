"""Independent brute-force oracles used to validate the fast implementations.

Everything here is written directly from the defining equations, favouring
clarity over speed, and stays independent of the code paths under test.
"""

from __future__ import annotations

from itertools import combinations
from statistics import fmean

import numpy as np


def segment_ids(masses: list[int]) -> list[int]:
    """Segment id of each 1-based unit, e.g. [3, 2] -> [0, 0, 0, 1, 1]."""
    out = []
    for seg, mass in enumerate(masses):
        out.extend([seg] * mass)
    return out


def pk_oracle(ref_masses: list[int], hyp_masses: list[int], k: int) -> float:
    """Window enumeration of the endpoint-disagreement rate."""
    n = sum(ref_masses)
    ref = segment_ids(ref_masses)
    hyp = segment_ids(hyp_masses)
    errors = 0
    for i in range(1, n - k + 1):  # 1-based unit indices
        ref_differs = ref[i - 1] != ref[i + k - 1]
        hyp_differs = hyp[i - 1] != hyp[i + k - 1]
        if ref_differs != hyp_differs:
            errors += 1
    return errors / (n - k)


def wd_oracle(ref_masses: list[int], hyp_masses: list[int], k: int) -> float:
    """Window enumeration of differing interior boundary counts."""
    n = sum(ref_masses)
    ref = segment_ids(ref_masses)
    hyp = segment_ids(hyp_masses)

    def boundaries_inside(ids: list[int], i: int) -> int:
        return sum(1 for u in range(i, i + k) if ids[u - 1] != ids[u])

    errors = 0
    for i in range(1, n - k + 1):
        if boundaries_inside(ref, i) != boundaries_inside(hyp, i):
            errors += 1
    return errors / (n - k)


def all_masses(n: int) -> list[list[int]]:
    """Every composition of n, i.e. every segmentation of n units."""
    out = []
    for r in range(n):
        for cut in combinations(range(1, n), r):
            prev = 0
            masses = []
            for c in list(cut) + [n]:
                masses.append(c - prev)
                prev = c
            out.append(masses)
    return out


def smooth_oracle(values: list[float], width: int, rounds: int) -> list[float]:
    """Naive truncated mean filter."""
    half = width // 2
    out = list(values)
    for _ in range(rounds):
        previous = out
        out = []
        for i in range(len(previous)):
            window = previous[max(0, i - half) : min(len(previous), i + half + 1)]
            out.append(fmean(window))
    return out


def depth_oracle(values: list[float]) -> list[float]:
    """Hill-climb depth: walk outward while the curve keeps rising."""
    depths = []
    for i, score in enumerate(values):
        left = score
        j = i - 1
        while j >= 0 and values[j] >= left:
            left = values[j]
            j -= 1
        right = score
        j = i + 1
        while j < len(values) and values[j] >= right:
            right = values[j]
            j += 1
        depths.append((left - score) + (right - score))
    return depths


def exhaustive_best_split(vectors: np.ndarray, p: float) -> tuple[float, tuple[int, ...]]:
    """Exhaustive optimum of the penalised objective over all segmentations.

    Uses prefix-sum segment scores (the objective's defining primitive) and
    applies the published tie-breaks: fewer segments, then lexicographically
    earliest boundaries.
    """
    n = len(vectors)
    prefix = np.vstack([np.zeros((1, vectors.shape[1])), np.cumsum(vectors, axis=0)])

    best_key = None
    best_value = 0.0
    best_bounds: tuple[int, ...] = (n,)
    for masses in all_masses(n):
        bounds = tuple(int(b) for b in np.cumsum(masses))
        prev = 0
        value = 0.0
        for b in bounds:
            value += float(np.linalg.norm(prefix[b] - prefix[prev]))
            prev = b
        value -= p * (len(bounds) - 1)
        key = (-value, len(bounds), bounds)
        if best_key is None or key < best_key:
            best_value, best_bounds, best_key = value, bounds, key
    return best_value, best_bounds


def direct_objective(vectors: np.ndarray, boundaries: tuple[int, ...], p: float) -> float:
    """Objective recomputed with plain per-segment summation (no prefix trick)."""
    prev = 0
    total = 0.0
    for b in boundaries:
        segment = vectors[prev:b]
        total += float(np.linalg.norm(segment.sum(axis=0)))
        prev = b
    return total - p * (len(boundaries) - 1)
