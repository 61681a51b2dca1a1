#!/usr/bin/env python3
"""Run the full CLI workflow end to end against the bundled stub service.

Generates a synthetic episode and its embedding file, segments it with both
segmenters, evaluates them against the reference annotation, and titles the
best segmentation through the stub summariser. Everything lands in the
given working directory for inspection.

Example:
    python scripts/demo_pipeline.py --workdir /tmp/podseg-demo
"""

from __future__ import annotations

import argparse
from pathlib import Path

from podseg.cli import main as podseg
from podseg.corpus import save_annotations, synth_corpus, synth_embeddings
from podseg.embeddings import save_vectors
from podseg.stub_service import StubSummarizer


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workdir", default="demo-workdir")
    parser.add_argument("--seed", type=int, default=5)
    args = parser.parse_args()

    workdir = Path(args.workdir)
    (workdir / "refs").mkdir(parents=True, exist_ok=True)

    episode = synth_corpus(
        args.seed, 1, topics_per_episode=(3, 4), sentences_per_topic=(10, 16), overlap=0.1
    )[0]
    transcript = workdir / "episode.txt"
    transcript.write_text(episode.transcript.raw_text)
    save_annotations(episode.reference, workdir / "refs" / "episode.ref")

    vocabulary = {tok for s in episode.transcript.sentences for tok in s.tokens}
    vectors = workdir / "vectors.txt"
    save_vectors(synth_embeddings(vocabulary, dim=50, seed=args.seed), vectors)

    for segmenter, extra in (
        ("tiling", ["--w", "10"]),
        ("textsplit", ["--embeddings", str(vectors)]),
    ):
        out = workdir / segmenter
        print(f"\n== segment ({segmenter}) ==")
        code = podseg(
            ["segment", str(transcript), "--segmenter", segmenter,
             "--output-dir", str(out), *extra]
        )
        if code != 0:
            return code
        (out / "episode.seg").rename(out / "episode.hyp")
        print(f"== evaluate ({segmenter}) ==")
        code = podseg(
            ["evaluate", "--hypotheses", str(out), "--references", str(workdir / "refs"),
             "--baseline", "--report", str(out / "eval_report.jsonl")]
        )
        if code != 0:
            return code

    print("\n== title (textsplit segments, stub service) ==")
    with StubSummarizer(title_words=4) as stub:
        code = podseg(
            ["title", "--transcript", str(transcript),
             "--annotation", str(workdir / "textsplit" / "episode.hyp"),
             "--endpoint", stub.url, "--backoff-base", "0.01",
             "--report", str(workdir / "titles.jsonl")]
        )
    print(f"\nreports and annotations are under {workdir}/")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
