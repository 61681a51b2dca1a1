"""Corpus ingestion and synthetic corpus generation.

File formats owned here:

* transcripts: plain text, or the ASR JSON layout nesting the text under
  results -> alternatives -> transcript;
* boundary annotations: a header line ``N=<total>`` followed by 1-based
  last-sentence-of-segment indices, one per line (the final boundary may
  be omitted and is appended);
* survey tables: delimited text with header
  ``segment_id,title_source,participant_id,score``.
"""

from __future__ import annotations

import csv
import hashlib
import json
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .embeddings import EmbeddingStore
from .errors import (
    BadScore,
    NonMonotonic,
    OutOfRange,
    ParseError,
    UnsupportedFormat,
)
from .segmetrics import SurveyRow, SurveyTable
from .textmodel import Segmentation, Transcript, boundaries_of, tokenize

__all__ = [
    "AnnotatedEpisode",
    "load_transcript",
    "load_annotations",
    "save_annotations",
    "load_survey",
    "synth_corpus",
    "synth_embeddings",
]

_TOPIC_WORD_RE = re.compile(r"^t(\d+)w\d+$")


@dataclass(frozen=True)
class AnnotatedEpisode:
    """A transcript paired with its reference segmentation."""

    transcript: Transcript
    reference: Segmentation
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.reference.total != len(self.transcript.sentences):
            raise ValueError(
                f"reference covers {self.reference.total} sentences, transcript has "
                f"{len(self.transcript.sentences)}"
            )


def load_transcript(path: str | Path, format: str = "plain") -> Transcript:
    """Read a transcript file and tokenise it; episode id is the file stem."""
    path = Path(path)
    if format == "plain":
        text = path.read_text(encoding="utf-8")
    elif format == "spotify-json":
        text = _extract_asr_text(path)
    else:
        raise UnsupportedFormat(f"unknown transcript format {format!r}")
    return tokenize(text, episode_id=path.stem)


def _extract_asr_text(path: Path) -> str:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or "results" not in doc:
        raise ParseError(f"{path}: missing 'results' field")
    parts = []
    for i, result in enumerate(doc["results"]):
        if not isinstance(result, dict) or "alternatives" not in result:
            raise ParseError(f"{path}: results[{i}] missing 'alternatives' field")
        alternatives = result["alternatives"]
        if not isinstance(alternatives, list) or not alternatives:
            raise ParseError(f"{path}: results[{i}] has empty 'alternatives'")
        first = alternatives[0]
        if not isinstance(first, dict) or "transcript" not in first:
            raise ParseError(f"{path}: results[{i}].alternatives[0] missing 'transcript' field")
        parts.append(first["transcript"])
    return "".join(parts)


def load_annotations(path: str | Path) -> Segmentation:
    """Read a boundary-annotation file into a segmentation."""
    path = Path(path)
    lines = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("N="):
        raise ParseError(f"{path}: first line must be 'N=<total>'")
    try:
        total = int(lines[0][2:])
    except ValueError:
        raise ParseError(f"{path}: malformed total in header {lines[0]!r}") from None
    if total < 1:
        raise ParseError(f"{path}: total must be >= 1, got {total}")

    boundaries: list[int] = []
    for lineno, line in enumerate(lines[1:], start=2):
        try:
            b = int(line)
        except ValueError:
            raise ParseError(f"{path}: line {lineno}: expected an integer, got {line!r}") from None
        if not 1 <= b <= total:
            raise OutOfRange(f"{path}: line {lineno}: boundary {b} outside 1..{total}")
        if boundaries and b <= boundaries[-1]:
            raise NonMonotonic(
                f"{path}: line {lineno}: boundary {b} not greater than {boundaries[-1]}"
            )
        boundaries.append(b)
    if not boundaries or boundaries[-1] != total:
        boundaries.append(total)
    return Segmentation(total=total, boundaries=tuple(boundaries))


def save_annotations(seg: Segmentation, path: str | Path) -> None:
    """Write a segmentation in the annotation format above."""
    lines = [f"N={seg.total}"] + [str(b) for b in seg.boundaries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_survey(path: str | Path) -> SurveyTable:
    """Read a survey CSV into a validated table."""
    path = Path(path)
    required = ["segment_id", "title_source", "participant_id", "score"]
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(f"{path}: header missing column(s) {missing}")
        for lineno, record in enumerate(reader, start=2):
            raw = (record["score"] or "").strip()
            try:
                score = int(raw)
            except ValueError:
                raise BadScore(f"{path}: line {lineno}: score {raw!r} is not an integer") from None
            if not 1 <= score <= 5:
                raise BadScore(f"{path}: line {lineno}: score {score} outside 1..5")
            rows.append(
                SurveyRow(
                    segment_id=record["segment_id"].strip(),
                    title_source=record["title_source"].strip(),
                    participant_id=record["participant_id"].strip(),
                    score=score,
                )
            )
    return SurveyTable(rows=tuple(rows))


def synth_corpus(
    seed: int,
    episodes: int,
    topics_per_episode: tuple[int, int] = (3, 6),
    sentences_per_topic: tuple[int, int] = (8, 16),
    vocab_per_topic: int = 30,
    overlap: float = 0.0,
    tokens_per_sentence: int = 10,
) -> list[AnnotatedEpisode]:
    """Generate annotated episodes from per-topic vocabularies.

    Each episode concatenates topic blocks; each sentence draws uniformly
    from its topic's vocabulary, of which an ``overlap`` fraction is a pool
    shared by every topic. Reference boundaries sit at the block joins.
    Deterministic for a fixed seed.
    """
    if not 0.0 <= overlap < 1.0:
        raise ValueError(f"overlap must lie in [0, 1), got {overlap}")
    if vocab_per_topic < 1 or tokens_per_sentence < 1 or episodes < 1:
        raise ValueError("counts must be positive")
    rng = random.Random(seed)
    shared_count = round(overlap * vocab_per_topic)
    shared = [f"sw{j}" for j in range(shared_count)]

    corpus = []
    for e in range(episodes):
        n_topics = rng.randint(*topics_per_episode)
        sentences: list[str] = []
        masses: list[int] = []
        for t in range(n_topics):
            own = [f"t{t}w{j}" for j in range(vocab_per_topic - shared_count)]
            vocabulary = own + shared
            n_sentences = rng.randint(*sentences_per_topic)
            masses.append(n_sentences)
            for _ in range(n_sentences):
                words = [rng.choice(vocabulary) for _ in range(tokens_per_sentence)]
                sentences.append(" ".join(words) + ".")
        raw_text = " ".join(sentences)
        transcript = tokenize(raw_text, episode_id=f"synth-{seed}-{e:03d}")
        reference = boundaries_of(masses, sum(masses))
        corpus.append(
            AnnotatedEpisode(
                transcript=transcript,
                reference=reference,
                metadata={
                    "show": "synthetic",
                    "generator_seed": str(seed),
                    "episode_index": str(e),
                },
            )
        )
    return corpus


def _unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _group_rng(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def synth_embeddings(tokens: Iterable[str], dim: int = 50, seed: int = 0) -> EmbeddingStore:
    """Deterministic vectors for a synthetic vocabulary.

    Words of one synthetic topic (``t<i>w<j>``) cluster around a shared
    topic centre; shared-pool and unrecognised words get unclustered noise.
    Mirrors how real embeddings place same-topic words near each other.
    """
    table: dict[str, np.ndarray] = {}
    centres: dict[str, np.ndarray] = {}
    for token in sorted(set(tokens)):
        match = _TOPIC_WORD_RE.match(token)
        group = f"t{match.group(1)}" if match else None
        noise = 0.45 * _unit_vector(_group_rng(seed, f"token:{token}"), dim)
        if group is not None:
            if group not in centres:
                centres[group] = _unit_vector(_group_rng(seed, f"centre:{group}"), dim)
            table[token] = centres[group] + noise
        else:
            table[token] = noise * 2.0
    return EmbeddingStore(dimension=dim, table=table, identity=f"synthetic-{dim}d-seed{seed}")
