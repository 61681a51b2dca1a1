#!/usr/bin/env python3
"""Desk-scale benchmark: tune both segmenters on a synthetic corpus and
compare them against the seeded random baseline.

Example:
    python scripts/run_synthetic_benchmark.py --seed 101 --episodes 20
"""

from __future__ import annotations

import argparse
import time

from podseg.corpus import synth_corpus, synth_embeddings
from podseg.segmetrics import WindowConfig, pk, random_baseline, window_diff
from podseg.tuning import GridSpec, tune_textsplit, tune_tiling


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=101)
    parser.add_argument("--episodes", type=int, default=20)
    parser.add_argument("--overlap", type=float, default=0.2)
    parser.add_argument("--iterations", type=int, default=10, help="baseline draws per episode")
    parser.add_argument("--dim", type=int, default=50, help="synthetic embedding dimension")
    args = parser.parse_args()

    start = time.monotonic()
    corpus = synth_corpus(
        args.seed,
        args.episodes,
        topics_per_episode=(3, 6),
        sentences_per_topic=(8, 16),
        vocab_per_topic=30,
        overlap=args.overlap,
    )
    vocabulary = {
        tok for ep in corpus for sentence in ep.transcript.sentences for tok in sentence.tokens
    }
    store = synth_embeddings(vocabulary, dim=args.dim, seed=args.seed)

    tiling = tune_tiling(corpus, GridSpec())
    textsplit = tune_textsplit(corpus, store)

    window = WindowConfig()
    baseline_pk = baseline_wd = 0.0
    for ep in corpus:
        k = window.resolve(ep.reference)
        prob = len(ep.reference.boundaries) / ep.reference.total
        pks, wds = [], []
        for i in range(args.iterations):
            draw = random_baseline(ep.reference.total, prob, i)
            pks.append(pk(ep.reference, draw, k))
            wds.append(window_diff(ep.reference, draw, k))
        baseline_pk += sum(pks) / len(pks) / len(corpus)
        baseline_wd += sum(wds) / len(wds) / len(corpus)

    elapsed = time.monotonic() - start
    print(f"corpus: {args.episodes} episodes, overlap {args.overlap}, seed {args.seed}")
    print(f"{'segmenter':<12}{'configuration':<32}{'mean Pk':>9}{'mean WD':>9}")
    print(f"{'baseline':<12}{f'prob=refs/N x{args.iterations}':<32}{baseline_pk:>9.3f}{baseline_wd:>9.3f}")
    for result in (tiling, textsplit):
        best = result.best
        config = ", ".join(f"{k}={v}" for k, v in best.parameters.items())
        print(f"{result.segmenter:<12}{config:<32}{best.mean_pk:>9.3f}{best.mean_wd:>9.3f}")
    print(f"done in {elapsed:.1f}s")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
