"""Lexical-cohesion segmentation over fixed-size pseudosentence windows.

The transcript's non-stopword tokens are chunked into pseudosentences of
``w`` tokens. Adjacent blocks of up to ``k`` pseudosentences are compared
by term-frequency cosine; smoothed similarity valleys are scored by depth
(the summed drop from the nearest left and right peaks) and valleys whose
depth clears a statistical cutoff become boundaries, snapped back to real
sentence boundaries of the transcript.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from statistics import fmean, pstdev
from typing import Iterable, Sequence

from .errors import EmptyInput, TooShort
from .textmodel import Segmentation, Transcript

__all__ = [
    "TilingParams",
    "GapScores",
    "default_stopwords",
    "pseudosentences",
    "block_similarities",
    "smooth",
    "depth_scores",
    "valley_indices",
    "boundary_cutoff",
    "tile",
]


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    """The English stopword list shipped with the package."""
    text = resources.files("podseg").joinpath("data/stopwords.txt").read_text(encoding="utf-8")
    return frozenset(
        line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")
    )


@dataclass(frozen=True)
class TilingParams:
    """Tuning knobs; the defaults are the tuned optimum for podcast transcripts."""

    w: int = 30
    k: int = 5
    f: int = 0
    smoothing_width: int = 3
    smoothing_rounds: int = 1
    stopwords: frozenset[str] | None = None  # None selects the packaged list

    def __post_init__(self) -> None:
        if self.w < 1:
            raise ValueError(f"pseudosentence length w must be >= 1, got {self.w}")
        if self.k < 1:
            raise ValueError(f"block size k must be >= 1, got {self.k}")
        if self.f not in (0, 1):
            raise ValueError(f"cutoff policy f must be 0 or 1, got {self.f}")
        if self.smoothing_width < 1 or self.smoothing_width % 2 == 0:
            raise ValueError(f"smoothing width must be a positive odd integer, got {self.smoothing_width}")
        if self.smoothing_rounds < 0:
            raise ValueError(f"smoothing rounds must be >= 0, got {self.smoothing_rounds}")

    def resolved_stopwords(self) -> frozenset[str]:
        return self.stopwords if self.stopwords is not None else default_stopwords()


@dataclass(frozen=True)
class GapScores:
    """One similarity score per gap between adjacent pseudosentences.

    ``gap_token_offsets[i]`` is the number of (non-stopword) tokens before
    gap i, used to snap chosen gaps back to sentence boundaries.
    """

    values: tuple[float, ...]
    gap_token_offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.gap_token_offsets):
            raise ValueError("values and gap_token_offsets must have equal length")


def _kept_tokens(transcript: Transcript, stopwords: frozenset[str]) -> tuple[list[str], list[int]]:
    """Non-stopword tokens in order plus the sentence index of each."""
    tokens: list[str] = []
    owners: list[int] = []
    for sent in transcript.sentences:
        for tok in sent.tokens:
            if tok not in stopwords:
                tokens.append(tok)
                owners.append(sent.index)
    return tokens, owners


def pseudosentences(
    transcript: Transcript, w: int, stopwords: frozenset[str] | None = None
) -> list[list[str]]:
    """Chunk the surviving tokens into runs of exactly ``w``.

    A trailing remainder shorter than ``w`` is merged into the last full
    chunk; fewer than ``w`` tokens overall form a single short chunk.
    """
    stop = stopwords if stopwords is not None else default_stopwords()
    tokens, _ = _kept_tokens(transcript, stop)
    if not tokens:
        raise EmptyInput("no tokens survive stopword removal")
    return _chunk(tokens, w)


def _chunk(tokens: list[str], w: int) -> list[list[str]]:
    chunks = [tokens[i : i + w] for i in range(0, len(tokens), w)]
    if len(chunks) > 1 and len(chunks[-1]) < w:
        tail = chunks.pop()
        chunks[-1] = chunks[-1] + tail
    return chunks


def _cosine(left: Counter[str], right: Counter[str]) -> float:
    if not left or not right:
        return 0.0
    dot = sum(count * right[tok] for tok, count in left.items())
    norm_l = math.sqrt(sum(c * c for c in left.values()))
    norm_r = math.sqrt(sum(c * c for c in right.values()))
    if norm_l == 0.0 or norm_r == 0.0:
        return 0.0
    return dot / (norm_l * norm_r)


def block_similarities(pseudos: Sequence[Sequence[str]], k: int) -> GapScores:
    """Cosine similarity of the k-pseudosentence blocks on each side of each gap."""
    if len(pseudos) < 2:
        raise TooShort(f"need at least 2 pseudosentences, got {len(pseudos)}")
    values = []
    offsets = []
    offset = 0
    for gap in range(len(pseudos) - 1):
        offset += len(pseudos[gap])
        left = Counter()
        for p in pseudos[max(0, gap - k + 1) : gap + 1]:
            left.update(p)
        right = Counter()
        for p in pseudos[gap + 1 : gap + 1 + k]:
            right.update(p)
        values.append(_cosine(left, right))
        offsets.append(offset)
    return GapScores(values=tuple(values), gap_token_offsets=tuple(offsets))


def smooth(scores: GapScores, width: int, rounds: int) -> GapScores:
    """Mean-filter the gap scores ``rounds`` times with an odd window, truncated at the ends."""
    if width < 1 or width % 2 == 0:
        raise ValueError(f"smoothing width must be a positive odd integer, got {width}")
    if rounds < 0:
        raise ValueError(f"smoothing rounds must be >= 0, got {rounds}")
    half = width // 2
    values = list(scores.values)
    for _ in range(rounds):
        values = [fmean(values[max(0, i - half) : i + half + 1]) for i in range(len(values))]
    return GapScores(values=tuple(values), gap_token_offsets=scores.gap_token_offsets)


def _peaks(values: Sequence[float], i: int) -> tuple[float, float]:
    """Highest score reached walking out from i while values keep rising."""
    left = values[i]
    for j in range(i - 1, -1, -1):
        if values[j] >= left:
            left = values[j]
        else:
            break
    right = values[i]
    for j in range(i + 1, len(values)):
        if values[j] >= right:
            right = values[j]
        else:
            break
    return left, right


def depth_scores(scores: GapScores) -> list[float]:
    """Depth of each gap: summed rise to the nearest non-decreasing peak on each side."""
    if not scores.values:
        raise TooShort("need at least one gap score")
    values = scores.values
    out = []
    for i, s in enumerate(values):
        left, right = _peaks(values, i)
        out.append((left - s) + (right - s))
    return out


def valley_indices(values: Sequence[float]) -> list[int]:
    """Gaps that sit strictly below a peak on both sides."""
    out = []
    for i, s in enumerate(values):
        left, right = _peaks(values, i)
        if left > s and right > s:
            out.append(i)
    return out


def boundary_cutoff(depths: Sequence[float], f: int) -> float:
    """Depth threshold: mean - stdev/2 for policy 0, mean - stdev for policy 1."""
    if not depths:
        return math.inf
    mu = fmean(depths)
    sigma = pstdev(depths)
    return mu - sigma / 2 if f == 0 else mu - sigma


def _snap_to_sentence(transcript: Transcript, stopwords: frozenset[str], offsets: Iterable[int]) -> set[int]:
    """Map kept-token offsets to the nearest sentence boundary (ties go earlier)."""
    counts = [0] * len(transcript.sentences)
    _, owners = _kept_tokens(transcript, stopwords)
    for owner in owners:
        counts[owner] += 1
    cumulative = []
    acc = 0
    for c in counts:
        acc += c
        cumulative.append(acc)  # tokens up to and including each sentence

    snapped = set()
    for off in offsets:
        best = min(
            range(len(cumulative)),
            key=lambda s: (abs(cumulative[s] - off), s),
        )
        snapped.add(best + 1)
    return snapped


def tile(transcript: Transcript, params: TilingParams | None = None) -> Segmentation:
    """Segment a transcript by lexical cohesion.

    Boundaries are placed at similarity valleys whose depth reaches the
    policy cutoff computed over the valley depths, then snapped to the
    nearest true sentence boundary; duplicates collapse and the final
    boundary is always the sentence count.
    """
    params = params or TilingParams()
    stop = params.resolved_stopwords()
    tokens, _ = _kept_tokens(transcript, stop)
    if not tokens:
        raise EmptyInput("no tokens survive stopword removal")
    total = len(transcript.sentences)

    pseudos = _chunk(tokens, params.w)
    if len(pseudos) < 2:
        return Segmentation(total=total, boundaries=(total,))

    gaps = block_similarities(pseudos, params.k)
    smoothed = smooth(gaps, params.smoothing_width, params.smoothing_rounds)
    depths = depth_scores(smoothed)
    candidates = valley_indices(smoothed.values)
    cutoff = boundary_cutoff([depths[i] for i in candidates], params.f)
    chosen = [i for i in candidates if depths[i] >= cutoff]

    snapped = _snap_to_sentence(transcript, stop, (smoothed.gap_token_offsets[i] for i in chosen))
    snapped.add(total)
    return Segmentation(total=total, boundaries=tuple(sorted(snapped)))
