"""HTTP client for an external summarisation service that titles segments.

The service contract is a single endpoint: POST a JSON body
``{"text": ..., "max_words": ...}`` and receive ``{"title": ..., "model": ...}``.
Timeouts, connection errors and 5xx responses are retried with exponential
backoff; other failures surface immediately. Episode titling preserves
segment order and embeds per-segment failures instead of dropping them.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import requests

from .errors import BadResponse, EmptyTitle, ServiceUnavailable
from .textmodel import Segmentation, Transcript, segment_spans

__all__ = ["ClientConfig", "TitledSegment", "TitleFailure", "summarize", "title_episode"]


@dataclass(frozen=True)
class ClientConfig:
    endpoint: str
    timeout: float = 30.0
    max_retries: int = 2
    max_title_words: int = 12
    auth_token: str | None = None
    max_request_chars: int = 30_000
    max_in_flight: int = 4
    backoff_base: float = 1.0
    backoff_factor: float = 2.0

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")
        if self.max_retries < 0:
            raise ValueError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.max_title_words < 1:
            raise ValueError(f"max_title_words must be >= 1, got {self.max_title_words}")
        if self.max_in_flight < 1:
            raise ValueError(f"max_in_flight must be >= 1, got {self.max_in_flight}")


@dataclass(frozen=True)
class TitledSegment:
    """A successfully titled segment; ``source`` echoes the serving model."""

    index: int
    sentence_span: tuple[int, int]
    title: str
    source: str
    truncated: bool = False

    def __post_init__(self) -> None:
        if not self.title:
            raise ValueError("title must be non-empty")


@dataclass(frozen=True)
class TitleFailure:
    """A segment whose request ultimately failed; kept in place in the output."""

    index: int
    sentence_span: tuple[int, int]
    error: str
    kind: str


def _request_title(text: str, cfg: ClientConfig) -> tuple[str, str]:
    """One titled request with retries; returns (title, model)."""
    headers = {}
    if cfg.auth_token:
        headers["Authorization"] = f"Bearer {cfg.auth_token}"
    attempts = 1 + cfg.max_retries
    last_error = "no attempt made"
    for attempt in range(attempts):
        if attempt > 0:
            time.sleep(cfg.backoff_base * cfg.backoff_factor ** (attempt - 1))
        try:
            response = requests.post(
                cfg.endpoint,
                json={"text": text, "max_words": cfg.max_title_words},
                timeout=cfg.timeout,
                headers=headers,
            )
        except (requests.Timeout, requests.ConnectionError) as exc:
            last_error = f"{type(exc).__name__}: {exc}"
            continue
        if 500 <= response.status_code < 600:
            last_error = f"HTTP {response.status_code}"
            continue
        if response.status_code != 200:
            raise BadResponse(f"HTTP {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
        except ValueError:
            raise BadResponse(f"response is not JSON: {response.text[:200]}") from None
        if not isinstance(body, dict) or not isinstance(body.get("title"), str):
            raise BadResponse(f"response lacks a string 'title': {body!r}")
        title = " ".join(body["title"].split())
        if not title:
            raise EmptyTitle("service returned a blank title")
        words = title.split()
        if len(words) > cfg.max_title_words:
            title = " ".join(words[: cfg.max_title_words])
        model = body.get("model", "")
        return title, str(model)
    raise ServiceUnavailable(f"giving up after {attempts} attempt(s); last error: {last_error}")


def summarize(text: str, cfg: ClientConfig) -> str:
    """Title one piece of text; see :func:`_request_title` for the protocol."""
    if not text:
        raise ValueError("text must be non-empty")
    title, _ = _request_title(text, cfg)
    return title


def _segment_request_text(sentence_texts: Sequence[str], cap: int) -> tuple[str, bool]:
    """Join sentence texts, truncating at a sentence boundary to fit the cap."""
    kept: list[str] = []
    length = 0
    for text in sentence_texts:
        extra = len(text) + (1 if kept else 0)
        if kept and length + extra > cap:
            return " ".join(kept), True
        kept.append(text)
        length += extra
    joined = " ".join(kept)
    if len(joined) > cap:  # a single sentence longer than the cap
        return joined[:cap], True
    return joined, False


def title_episode(
    transcript: Transcript,
    segmentation: Segmentation,
    cfg: ClientConfig,
) -> list[TitledSegment | TitleFailure]:
    """Title every segment, in order; failures are embedded, never dropped."""
    if segmentation.total != len(transcript.sentences):
        raise ValueError(
            f"segmentation covers {segmentation.total} sentences, transcript has "
            f"{len(transcript.sentences)}"
        )
    spans = segment_spans(segmentation)
    requests_text = []
    for start, end in spans:
        sentence_texts = [
            transcript.raw_text[s.char_span[0] : s.char_span[1]]
            for s in transcript.sentences[start:end]
        ]
        requests_text.append(_segment_request_text(sentence_texts, cfg.max_request_chars))

    def work(item: tuple[int, str, bool]) -> TitledSegment | TitleFailure:
        index, text, truncated = item
        try:
            title, model = _request_title(text, cfg)
        except (ServiceUnavailable, EmptyTitle, BadResponse) as exc:
            return TitleFailure(
                index=index, sentence_span=spans[index], error=str(exc), kind=type(exc).__name__
            )
        return TitledSegment(
            index=index, sentence_span=spans[index], title=title, source=model, truncated=truncated
        )

    items = [(i, text, trunc) for i, (text, trunc) in enumerate(requests_text)]
    workers = min(cfg.max_in_flight, len(items)) or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, items))
