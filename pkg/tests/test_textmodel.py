from __future__ import annotations

import json
import random
import re
import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from podseg.textmodel import (
    Segmentation,
    boundaries_of,
    masses_of,
    segment_spans,
    segment_texts,
    tokenize,
)

from conftest import FIXTURES

TOKEN_CHARSET = re.compile(r"^[a-z0-9']+$")


class TestTokenize:
    def test_two_sentences(self):
        t = tokenize("Hello world. Bye.")
        assert [list(s.tokens) for s in t.sentences] == [["hello", "world"], ["bye"]]

    def test_empty_input(self):
        assert len(tokenize("")) == 0

    def test_sentence_count_fixture(self):
        cases = json.loads((FIXTURES / "sentence_counts.json").read_text())["cases"]
        assert len(cases) == 30
        for case in cases:
            got = len(tokenize(case["text"]))
            assert got == case["sentences"], f"{case['text']!r}: {got} != {case['sentences']}"

    def test_indices_contiguous_and_spans_increasing(self):
        t = tokenize("One. !!! Two. Three?? Four\n\nFive end.")
        assert [s.index for s in t.sentences] == list(range(len(t)))
        last_end = -1
        for s in t.sentences:
            start, end = s.char_span
            assert start > last_end
            assert start < end
            last_end = end

    def test_span_text_contains_tokens(self):
        t = tokenize("  Dr. Smith spoke.  Then left.")
        for s in t.sentences:
            chunk = t.raw_text[s.char_span[0] : s.char_span[1]]
            assert chunk == chunk.strip()
            for token in s.tokens:
                assert token in chunk.lower()

    @given(st.text(alphabet=string.printable, max_size=200))
    def test_deterministic_and_token_charset(self, text):
        first = tokenize(text)
        second = tokenize(text)
        assert first == second
        for sentence in first.sentences:
            assert sentence.tokens
            for token in sentence.tokens:
                assert TOKEN_CHARSET.match(token), token


class TestSegmentation:
    def test_masses_example(self):
        assert masses_of(Segmentation(total=6, boundaries=(3, 6))) == [3, 3]

    def test_single_segment(self):
        assert masses_of(Segmentation(total=5, boundaries=(5,))) == [5]

    def test_invalid_constructions(self):
        with pytest.raises(ValueError):
            Segmentation(total=5, boundaries=(3,))
        with pytest.raises(ValueError):
            Segmentation(total=5, boundaries=(3, 3, 5))
        with pytest.raises(ValueError):
            Segmentation(total=5, boundaries=())
        with pytest.raises(ValueError):
            Segmentation(total=0, boundaries=(0,))

    def test_boundaries_of_validates(self):
        with pytest.raises(ValueError):
            boundaries_of([2, 0, 3], 5)
        with pytest.raises(ValueError):
            boundaries_of([2, 2], 5)

    def test_round_trip_1000_random(self):
        rng = random.Random(12345)
        for _ in range(1000):
            total = rng.randint(1, 50)
            cuts = sorted(rng.sample(range(1, total), rng.randint(0, total - 1)))
            seg = Segmentation(total=total, boundaries=tuple(cuts + [total]))
            assert boundaries_of(masses_of(seg), total) == seg

    @given(st.integers(1, 60), st.data())
    def test_round_trip_property(self, total, data):
        cuts = data.draw(
            st.lists(st.integers(1, max(1, total - 1)), unique=True, max_size=total - 1)
            if total > 1
            else st.just([])
        )
        seg = Segmentation(total=total, boundaries=tuple(sorted(cuts) + [total]))
        masses = masses_of(seg)
        assert sum(masses) == total
        assert all(m >= 1 for m in masses)
        assert boundaries_of(masses, total) == seg


class TestSegmentText:
    def test_spans_reconstruct_segments(self):
        t = tokenize("Alpha beta. Gamma delta. Epsilon zeta.")
        seg = Segmentation(total=3, boundaries=(2, 3))
        texts = segment_texts(t, seg)
        assert texts == ["Alpha beta. Gamma delta.", "Epsilon zeta."]

    def test_spans_cover_in_order(self):
        t = tokenize("A one. B two. C three. D four.")
        seg = Segmentation(total=4, boundaries=(1, 3, 4))
        assert segment_spans(seg) == [(0, 1), (1, 3), (3, 4)]
        texts = segment_texts(t, seg)
        assert texts[0] == "A one."
        assert texts[1] == "B two. C three."

    def test_total_mismatch_rejected(self):
        t = tokenize("A one. B two.")
        with pytest.raises(ValueError):
            segment_texts(t, Segmentation(total=3, boundaries=(3,)))
