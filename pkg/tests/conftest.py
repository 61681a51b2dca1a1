from __future__ import annotations

from pathlib import Path

import pytest

from podseg.corpus import AnnotatedEpisode, synth_corpus, synth_embeddings
from podseg.embeddings import EmbeddingStore, save_vectors

FIXTURES = Path(__file__).parent / "fixtures"


def make_two_topic_episode(seed: int, **overrides) -> AnnotatedEpisode:
    """The 40+40 sentence disjoint-vocabulary fixture used across tests."""
    kwargs = dict(
        topics_per_episode=(2, 2),
        sentences_per_topic=(40, 40),
        vocab_per_topic=30,
        overlap=0.0,
        tokens_per_sentence=10,
    )
    kwargs.update(overrides)
    return synth_corpus(seed, 1, **kwargs)[0]


def corpus_vocabulary(corpus: list[AnnotatedEpisode]) -> set[str]:
    return {
        token
        for ep in corpus
        for sentence in ep.transcript.sentences
        for token in sentence.tokens
    }


@pytest.fixture(scope="session")
def bench_corpus() -> list[AnnotatedEpisode]:
    """A small tuning corpus shared by the slower integration tests."""
    return synth_corpus(
        7,
        6,
        topics_per_episode=(3, 5),
        sentences_per_topic=(10, 18),
        vocab_per_topic=30,
        overlap=0.2,
    )


@pytest.fixture(scope="session")
def bench_store(bench_corpus) -> EmbeddingStore:
    return synth_embeddings(corpus_vocabulary(bench_corpus), dim=50, seed=0)


@pytest.fixture(scope="session")
def bench_store_file(bench_store, tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("vectors") / "bench_vectors.txt"
    save_vectors(bench_store, path)
    return path
