from __future__ import annotations

import json

import numpy as np
import pytest

from podseg.corpus import (
    AnnotatedEpisode,
    load_annotations,
    load_survey,
    load_transcript,
    save_annotations,
    synth_corpus,
    synth_embeddings,
)
from podseg.errors import (
    BadScore,
    DuplicateRow,
    NonMonotonic,
    OutOfRange,
    ParseError,
    UnsupportedFormat,
)
from podseg.segmetrics import WindowConfig, pk
from podseg.textmodel import Segmentation, masses_of
from podseg.texttiling import TilingParams, tile

from conftest import corpus_vocabulary


class TestLoadTranscript:
    def test_plain(self, tmp_path):
        path = tmp_path / "ep1.txt"
        path.write_text("A b. C d.")
        t = load_transcript(path, "plain")
        assert len(t) == 2
        assert t.episode_id == "ep1"

    def test_asr_json_concatenation(self, tmp_path):
        doc = {
            "results": [
                {"alternatives": [{"transcript": "Hello there. ", "confidence": 0.9}]},
                {"alternatives": [{"transcript": "Bye now."}]},
            ]
        }
        path = tmp_path / "ep2.json"
        path.write_text(json.dumps(doc))
        t = load_transcript(path, "spotify-json")
        assert [list(s.tokens) for s in t.sentences] == [["hello", "there"], ["bye", "now"]]

    def test_missing_results_field(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"nope": []}))
        with pytest.raises(ParseError, match="results"):
            load_transcript(path, "spotify-json")

    def test_missing_transcript_field(self, tmp_path):
        path = tmp_path / "bad2.json"
        path.write_text(json.dumps({"results": [{"alternatives": [{"confidence": 1}]}]}))
        with pytest.raises(ParseError, match="transcript"):
            load_transcript(path, "spotify-json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="JSON"):
            load_transcript(path, "spotify-json")

    def test_unsupported_format(self, tmp_path):
        path = tmp_path / "x.txt"
        path.write_text("hi there.")
        with pytest.raises(UnsupportedFormat):
            load_transcript(path, "rtf")


class TestAnnotations:
    def write(self, tmp_path, content: str):
        path = tmp_path / "ep.ref"
        path.write_text(content)
        return path

    def test_two_boundaries(self, tmp_path):
        seg = load_annotations(self.write(tmp_path, "N=10\n4\n10\n"))
        assert masses_of(seg) == [4, 6]

    def test_final_boundary_appended(self, tmp_path):
        seg = load_annotations(self.write(tmp_path, "N=10\n4\n"))
        assert masses_of(seg) == [4, 6]

    def test_out_of_range(self, tmp_path):
        with pytest.raises(OutOfRange):
            load_annotations(self.write(tmp_path, "N=10\n11\n"))

    def test_non_monotonic(self, tmp_path):
        with pytest.raises(NonMonotonic):
            load_annotations(self.write(tmp_path, "N=10\n4\n4\n"))

    def test_header_required(self, tmp_path):
        with pytest.raises(ParseError):
            load_annotations(self.write(tmp_path, "4\n10\n"))

    def test_round_trip(self, tmp_path):
        seg = Segmentation(total=9, boundaries=(2, 5, 9))
        path = tmp_path / "out.ref"
        save_annotations(seg, path)
        assert load_annotations(path) == seg


class TestSurvey:
    HEADER = "segment_id,title_source,participant_id,score\n"

    def write(self, tmp_path, body: str):
        path = tmp_path / "survey.csv"
        path.write_text(self.HEADER + body)
        return path

    def test_four_rows(self, tmp_path):
        table = load_survey(
            self.write(tmp_path, "s1,human,p1,5\ns1,human,p2,4\ns1,t5,p1,3\ns1,t5,p2,4\n")
        )
        assert len(table.rows) == 4
        assert table.sources() == ["human", "t5"]

    def test_score_out_of_scale(self, tmp_path):
        with pytest.raises(BadScore):
            load_survey(self.write(tmp_path, "s1,human,p1,6\n"))

    def test_non_integer_score(self, tmp_path):
        with pytest.raises(BadScore):
            load_survey(self.write(tmp_path, "s1,human,p1,4.5\n"))

    def test_duplicate_triple(self, tmp_path):
        with pytest.raises(DuplicateRow):
            load_survey(self.write(tmp_path, "s1,human,p1,4\ns1,human,p1,5\n"))

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("segment_id,participant_id,score\ns1,p1,4\n")
        with pytest.raises(ParseError):
            load_survey(path)


class TestSynthCorpus:
    def test_two_disjoint_topics_single_boundary(self):
        eps = synth_corpus(3, 1, topics_per_episode=(2, 2), overlap=0.0)
        assert len(eps[0].reference.boundaries) == 2

    def test_deterministic(self):
        a = synth_corpus(11, 3)
        b = synth_corpus(11, 3)
        assert [ep.transcript.raw_text for ep in a] == [ep.transcript.raw_text for ep in b]
        assert [ep.reference for ep in a] == [ep.reference for ep in b]

    def test_invariants(self):
        for ep in synth_corpus(5, 4, overlap=0.3):
            assert ep.reference.total == len(ep.transcript.sentences)
            assert all(m >= 1 for m in masses_of(ep.reference))
            assert ep.metadata["show"] == "synthetic"

    def test_episode_mismatch_rejected(self):
        ep = synth_corpus(1, 1)[0]
        with pytest.raises(ValueError):
            AnnotatedEpisode(
                transcript=ep.transcript,
                reference=Segmentation(total=ep.reference.total + 1,
                                       boundaries=(ep.reference.total + 1,)),
            )

    def test_high_overlap_degrades_tiling(self):
        # 20 episodes per setting; vague vocabularies must hurt the segmenter
        def mean_pk(overlap: float) -> float:
            corpus = synth_corpus(
                123, 20, topics_per_episode=(3, 4), sentences_per_topic=(10, 14),
                overlap=overlap,
            )
            values = []
            for ep in corpus:
                hyp = tile(ep.transcript, TilingParams(w=20, k=5))
                values.append(pk(ep.reference, hyp, WindowConfig()))
            return sum(values) / len(values)

        assert mean_pk(0.9) > mean_pk(0.0)


class TestSynthEmbeddings:
    def test_topic_words_cluster(self):
        store = synth_embeddings(["t0w1", "t0w2", "t1w1", "sw3"], dim=16, seed=1)
        assert store.dimension == 16

        def cos(a, b):
            return float(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))

        same = cos(store.table["t0w1"], store.table["t0w2"])
        cross = cos(store.table["t0w1"], store.table["t1w1"])
        assert same > cross

    def test_deterministic(self):
        a = synth_embeddings(["t0w1", "sw2"], dim=8, seed=5)
        b = synth_embeddings(["t0w1", "sw2"], dim=8, seed=5)
        assert np.array_equal(a.table["t0w1"], b.table["t0w1"])

    def test_covers_corpus_vocabulary(self):
        corpus = synth_corpus(2, 2, overlap=0.2)
        vocab = corpus_vocabulary(corpus)
        store = synth_embeddings(vocab, dim=12, seed=0)
        assert vocab <= set(store.table)
