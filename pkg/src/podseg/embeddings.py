"""Word-vector storage and sentence-vector construction.

Vectors load from GloVe-style whitespace text ("token v1 ... vd" per line,
optionally preceded by a "count dim" header). Sentence vectors are sums of
in-vocabulary token vectors; out-of-vocabulary tokens are skipped.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Mapping

import numpy as np

from .errors import FormatError
from .textmodel import Sentence

__all__ = ["EmbeddingStore", "load_vectors", "save_vectors", "sentence_vector"]


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable token -> d-dimensional vector table."""

    dimension: int
    table: Mapping[str, np.ndarray]
    identity: str = ""  # provenance label recorded into evaluation reports

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, token: str) -> bool:
        return token in self.table


def _parse_lines(lines: list[str]) -> tuple[int, dict[str, np.ndarray]]:
    table: dict[str, np.ndarray] = {}
    dimension: int | None = None
    start = 0
    if lines:
        first = lines[0].split()
        if len(first) == 2:
            try:
                int(first[0]), int(first[1])
                start = 1  # "count dim" header
            except ValueError:
                pass
    for lineno in range(start, len(lines)):
        line = lines[lineno]
        if not line.strip():
            continue
        fields = line.split()
        token, raw = fields[0], fields[1:]
        if not raw:
            raise FormatError(f"line {lineno + 1}: no vector components")
        if dimension is None:
            dimension = len(raw)
        elif len(raw) != dimension:
            raise FormatError(
                f"line {lineno + 1}: expected {dimension} components, got {len(raw)}"
            )
        try:
            vec = np.array([float(x) for x in raw], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"line {lineno + 1}: non-numeric component ({exc})") from None
        if not np.all(np.isfinite(vec)):
            raise FormatError(f"line {lineno + 1}: non-finite component")
        table[token] = vec  # later duplicates overwrite earlier entries
    if dimension is None:
        raise FormatError("no vectors found")
    return dimension, table


def load_vectors(source: str | Path | IO[str], identity: str | None = None) -> EmbeddingStore:
    """Parse a GloVe-style vector file or text stream into a store.

    When ``source`` is a path and no identity is given, the identity is the
    file name plus a short content hash, so reports can pin the vector set.
    """
    if isinstance(source, (str, Path)):
        data = Path(source).read_text(encoding="utf-8")
        if identity is None:
            digest = hashlib.sha256(data.encode("utf-8")).hexdigest()[:12]
            identity = f"{Path(source).name}#{digest}"
    else:
        data = source.read()
        if identity is None:
            identity = ""
    dimension, table = _parse_lines(data.splitlines())
    return EmbeddingStore(dimension=dimension, table=table, identity=identity)


def save_vectors(store: EmbeddingStore, path: str | Path) -> None:
    """Write a store back out in GloVe text format (full float precision)."""
    with open(path, "w", encoding="utf-8") as fh:
        for token in sorted(store.table):
            components = " ".join(repr(float(x)) for x in store.table[token])
            fh.write(f"{token} {components}\n")


def sentence_vector(
    sentence: Sentence,
    store: EmbeddingStore,
    weights: Mapping[str, float] | None = None,
) -> np.ndarray:
    """Sum of the sentence's in-vocabulary token vectors.

    ``weights`` optionally multiplies each token's contribution (tf/idf
    style); an all-out-of-vocabulary sentence yields the zero vector.
    """
    out = np.zeros(store.dimension, dtype=np.float64)
    for tok in sentence.tokens:
        vec = store.table.get(tok)
        if vec is None:
            continue
        if weights is not None:
            out += vec * weights.get(tok, 1.0)
        else:
            out += vec
    return out
