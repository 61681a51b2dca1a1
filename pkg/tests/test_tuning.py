from __future__ import annotations

import pytest

from podseg.corpus import synth_corpus
from podseg.tuning import GridSpec, select_best, tune_textsplit, tune_tiling


@pytest.fixture(scope="module")
def small_corpus():
    return synth_corpus(
        42, 4, topics_per_episode=(3, 4), sentences_per_topic=(8, 12), overlap=0.1
    )


def recompute_objective(config, objective_name: str) -> float:
    mean_pk = sum(r.pk for r in config.reports) / len(config.reports)
    mean_wd = sum(r.wd for r in config.reports) / len(config.reports)
    if objective_name == "pk":
        return mean_pk
    if objective_name == "wd":
        return mean_wd
    return (mean_pk + mean_wd) / 2


class TestGridSpec:
    def test_defaults_bracket_tuned_optimum(self):
        grid = GridSpec()
        assert 30 in grid.w_values and 5 in grid.k_values and 0 in grid.f_values
        assert 10 in grid.l_values
        # classic defaults stay inside the search space too
        assert 20 in grid.w_values and 10 in grid.k_values

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(w_values=())
        with pytest.raises(ValueError):
            GridSpec(f_values=(0, 2))


class TestTuneTiling:
    def test_singleton_grid_returned(self, small_corpus):
        grid = GridSpec(w_values=(20,), k_values=(5,), f_values=(0,))
        result = tune_tiling(small_corpus, grid)
        assert len(result.results) == 1
        assert result.best.parameters == {"w": 20, "k": 5, "f": 0}

    def test_best_matches_recomputed_argmin(self, small_corpus):
        grid = GridSpec(w_values=(10, 20), k_values=(3, 5), f_values=(0, 1))
        result = tune_tiling(small_corpus, grid)
        assert len(result.results) == 8
        objectives = [recompute_objective(c, "pk+wd") for c in result.results]
        assert result.best.objective == pytest.approx(min(objectives), abs=1e-12)
        for config, value in zip(result.results, objectives):
            assert config.objective == pytest.approx(value, abs=1e-12)

    def test_tie_break_and_order_invariance(self, small_corpus):
        forward = tune_tiling(small_corpus, GridSpec(w_values=(10, 20), k_values=(5,)))
        reversed_grid = tune_tiling(small_corpus, GridSpec(w_values=(20, 10), k_values=(5,)))
        assert forward.best.parameters == reversed_grid.best.parameters

    def test_failures_recorded_not_fatal(self, small_corpus):
        # w larger than any episode's token count still evaluates: a single
        # pseudosentence means a single segment, not an error; instead check
        # the failure path with an empty-vocabulary episode via stopwords-only
        # transcripts being impossible here, so use textsplit below.
        result = tune_tiling(small_corpus, GridSpec(w_values=(10,), k_values=(5,), f_values=(0,)))
        assert result.best.failures == 0

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            tune_tiling([], GridSpec())


class TestTuneTextsplit:
    def test_singleton_l(self, small_corpus, bench_store):
        result = tune_textsplit(small_corpus, bench_store, l_values=(10,))
        assert len(result.results) == 1
        assert result.best.parameters["l"] == 10
        assert all(r.embedding_identity == bench_store.identity for r in result.best.reports)

    def test_argmin_consistency(self, small_corpus, bench_store):
        result = tune_textsplit(small_corpus, bench_store, l_values=(5, 10, 20))
        objectives = [recompute_objective(c, "pk+wd") for c in result.results]
        assert result.best.objective == pytest.approx(min(objectives), abs=1e-12)

    def test_default_l_values_include_ten(self):
        assert 10 in GridSpec().l_values

    def test_too_long_target_counts_as_failure(self, small_corpus, bench_store):
        # target length beyond every episode's sentence count: all episodes fail
        result = tune_textsplit(small_corpus, bench_store, l_values=(10_000,))
        config = result.results[0]
        assert config.failures == len(small_corpus)
        assert config.objective == float("inf")


class TestSelectBest:
    def test_single_result(self, small_corpus):
        result = tune_tiling(small_corpus, GridSpec(w_values=(20,), k_values=(5,), f_values=(0,)))
        assert select_best([result]) is result.best

    def test_min_objective_wins(self, small_corpus, bench_store):
        tiling = tune_tiling(small_corpus, GridSpec(w_values=(20,), k_values=(5,), f_values=(0,)))
        textsplit = tune_textsplit(small_corpus, bench_store, l_values=(10,))
        best = select_best([tiling, textsplit])
        expected = min(
            [tiling.best, textsplit.best], key=lambda c: (c.objective, c.segmenter)
        )
        assert best == expected

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            select_best([])
