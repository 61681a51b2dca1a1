"""Canonical text representations shared by every segmenter and metric.

A transcript is resolved into indexed sentences; a segmentation is a set of
1-based boundary indices, each marking the last sentence of a segment, with
the final boundary pinned to the sentence count. Segment masses (lengths)
and boundary indices are interchangeable views of the same partition.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "Sentence",
    "Transcript",
    "Segmentation",
    "tokenize",
    "masses_of",
    "boundaries_of",
    "segment_spans",
    "segment_texts",
]

_TOKEN_RE = re.compile(r"[a-z0-9']+")
# A run of sentence terminators followed by whitespace ends a sentence.
_SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s)")
# A blank line (possibly with horizontal whitespace) is a hard break.
_HARD_BREAK_RE = re.compile(r"\n[ \t\r\f\v]*\n+")


@dataclass(frozen=True)
class Sentence:
    """One sentence: lowercase word tokens plus its span in the source text."""

    index: int
    tokens: tuple[str, ...]
    char_span: tuple[int, int]


@dataclass(frozen=True)
class Transcript:
    """An episode's text resolved into indexed, tokenised sentences.

    ``raw_text`` holds the NFC-normalised input; sentence spans index into
    it. Sentences that contain no word tokens are dropped at construction,
    so indices are contiguous 0..N-1 in document order.
    """

    episode_id: str
    raw_text: str
    sentences: tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class Segmentation:
    """A partition of ``total`` sentences into contiguous segments.

    ``boundaries`` are strictly increasing 1-based indices of each segment's
    last sentence; the final boundary always equals ``total``.
    """

    total: int
    boundaries: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError(f"segmentation needs at least one sentence, got total={self.total}")
        if not self.boundaries:
            raise ValueError("segmentation needs at least one boundary")
        prev = 0
        for b in self.boundaries:
            if b <= prev:
                raise ValueError(f"boundaries must be strictly increasing, got {self.boundaries}")
            prev = b
        if self.boundaries[-1] != self.total:
            raise ValueError(
                f"last boundary must equal total ({self.total}), got {self.boundaries[-1]}"
            )

    @property
    def masses(self) -> tuple[int, ...]:
        return tuple(masses_of(self))


def tokenize(raw_text: str, episode_id: str = "") -> Transcript:
    """Split text into sentences and lowercase word tokens.

    Sentences end at '.', '!' or '?' runs followed by whitespace, and at
    blank lines. Tokens are maximal runs of [a-z0-9'] after lowercasing;
    anything else separates tokens. Chunks without tokens are dropped.
    """
    text = unicodedata.normalize("NFC", raw_text)
    cuts = {m.end() for m in _SENTENCE_END_RE.finditer(text)}
    cuts.update(m.start() for m in _HARD_BREAK_RE.finditer(text))
    cuts.add(len(text))

    sentences: list[Sentence] = []
    prev = 0
    for cut in sorted(cuts):
        chunk = text[prev:cut]
        tokens = tuple(_TOKEN_RE.findall(chunk.lower()))
        if tokens:
            lead = len(chunk) - len(chunk.lstrip())
            trail = len(chunk) - len(chunk.rstrip())
            span = (prev + lead, cut - trail)
            sentences.append(Sentence(index=len(sentences), tokens=tokens, char_span=span))
        prev = cut
    return Transcript(episode_id=episode_id, raw_text=text, sentences=tuple(sentences))


def masses_of(seg: Segmentation) -> list[int]:
    """Segment lengths: masses[j] = boundary[j] - boundary[j-1]."""
    prev = 0
    out = []
    for b in seg.boundaries:
        out.append(b - prev)
        prev = b
    return out


def boundaries_of(masses: Sequence[int], total: int) -> Segmentation:
    """Inverse of :func:`masses_of`; masses must be positive and sum to total."""
    acc = 0
    bounds = []
    for m in masses:
        if m < 1:
            raise ValueError(f"every mass must be >= 1, got {list(masses)}")
        acc += m
        bounds.append(acc)
    if acc != total:
        raise ValueError(f"masses sum to {acc}, expected total {total}")
    return Segmentation(total=total, boundaries=tuple(bounds))


def segment_spans(seg: Segmentation) -> list[tuple[int, int]]:
    """Half-open [start, end) sentence-index ranges, one per segment."""
    spans = []
    prev = 0
    for b in seg.boundaries:
        spans.append((prev, b))
        prev = b
    return spans


def segment_texts(transcript: Transcript, seg: Segmentation) -> list[str]:
    """Per-segment text rebuilt from sentence spans, joined by single spaces."""
    if seg.total != len(transcript.sentences):
        raise ValueError(
            f"segmentation covers {seg.total} sentences, transcript has {len(transcript.sentences)}"
        )
    out = []
    for start, end in segment_spans(seg):
        parts = [transcript.raw_text[s.char_span[0] : s.char_span[1]] for s in transcript.sentences[start:end]]
        out.append(" ".join(parts))
    return out
