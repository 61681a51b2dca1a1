"""Command-line workflow: segment, evaluate, tune, title, survey.

Reports are line-delimited JSON records with a fixed field order; the first
record is always the run manifest (command, resolved configuration, input
hashes, tool version, timestamp). A human-readable table goes to stdout.
Byte-identical reports across runs require pinning the manifest timestamp
via --timestamp or the SOURCE_DATE_EPOCH environment variable.

Exit codes: 0 success, 1 completed with warnings, 2 input error,
3 configuration error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import __version__
from .corpus import (
    AnnotatedEpisode,
    load_annotations,
    load_survey,
    load_transcript,
    save_annotations,
)
from .embeddings import load_vectors
from .errors import MissingScores, PodsegError
from .segmetrics import (
    WindowConfig,
    is_significant,
    pearson,
    pk,
    random_baseline,
    relevancy,
    window_diff,
)
from .summarizer import ClientConfig, TitledSegment, title_episode
from .textmodel import Transcript
from .textsplit import SplitParams, split
from .texttiling import TilingParams, tile
from .tuning import GridSpec, TuneResult, select_best, tune_textsplit, tune_tiling

__all__ = ["main"]

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_INPUT = 2
EXIT_CONFIG = 3

AUTH_TOKEN_ENV = "PODSEG_AUTH_TOKEN"


class ConfigError(Exception):
    """Bad flag combination; maps to exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse defaults to exit 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# report plumbing


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _resolve_timestamp(value: str | None) -> str:
    if value:
        return value
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        return datetime.fromtimestamp(int(epoch), tz=timezone.utc).isoformat()
    return datetime.now(tz=timezone.utc).isoformat()


def _manifest(command: str, config: dict, inputs: Iterable[Path], timestamp: str | None) -> dict:
    return {
        "record": "manifest",
        "command": command,
        "config": {k: config[k] for k in sorted(config)},
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "version": __version__,
        "timestamp": _resolve_timestamp(timestamp),
    }


def _write_report(path: Path, records: list[dict], fmt: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        payload = json.dumps(records, indent=2) + "\n"
    else:
        payload = "".join(json.dumps(r) + "\n" for r in records)
    path.write_text(payload, encoding="utf-8")


def _print_table(headers: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    table = [list(map(str, headers))] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    for row in table:
        print("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())


def _detect_format(path: Path, flag: str) -> str:
    if flag != "auto":
        return flag
    return "spotify-json" if path.suffix.lower() == ".json" else "plain"


def _map_jobs(jobs: int, fn: Callable, items: Sequence) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# segment


def _build_tiling_params(args: argparse.Namespace) -> TilingParams:
    try:
        return TilingParams(
            w=args.w,
            k=args.k,
            f=args.f,
            smoothing_width=args.smoothing_width,
            smoothing_rounds=args.smoothing_rounds,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build_split_params(args: argparse.Namespace) -> SplitParams:
    try:
        if args.penalty is not None:
            return SplitParams(penalty=args.penalty, target_length=None, variant=args.variant)
        return SplitParams(target_length=args.target_length, variant=args.variant)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_segment(args: argparse.Namespace) -> int:
    inputs = [Path(p) for p in args.inputs]
    output_dir = Path(args.output_dir)
    if args.segmenter == "textsplit":
        if not args.embeddings:
            raise ConfigError("--segmenter textsplit requires --embeddings")
        store = load_vectors(args.embeddings)
        params = _build_split_params(args)
        parameters = {
            "penalty": args.penalty,
            "target_length": None if args.penalty is not None else args.target_length,
            "variant": args.variant,
            "embeddings": store.identity,
        }
        run = lambda t: split(t, store, params)
    else:
        params = _build_tiling_params(args)
        parameters = {
            "w": params.w,
            "k": params.k,
            "f": params.f,
            "smoothing_width": params.smoothing_width,
            "smoothing_rounds": params.smoothing_rounds,
        }
        run = lambda t: tile(t, params)

    def work(path: Path) -> tuple[str, Transcript, object]:
        transcript = load_transcript(path, _detect_format(path, args.transcript_format))
        return path.stem, transcript, run(transcript)

    results = _map_jobs(args.jobs, work, inputs)

    output_dir.mkdir(parents=True, exist_ok=True)
    records = [
        _manifest(
            "segment",
            {
                "segmenter": args.segmenter,
                "parameters": parameters,
                "output_dir": str(output_dir),
            },
            inputs,
            args.timestamp,
        )
    ]
    rows = []
    for stem, transcript, seg in results:
        save_annotations(seg, output_dir / f"{stem}.seg")
        records.append(
            {
                "record": "segmentation",
                "episode": stem,
                "sentences": seg.total,
                "segments": len(seg.boundaries),
                "boundaries": list(seg.boundaries),
                "segmenter": args.segmenter,
                "parameters": parameters,
            }
        )
        rows.append([stem, seg.total, len(seg.boundaries)])
    report = Path(args.report) if args.report else output_dir / "segment_report.jsonl"
    _write_report(report, records, args.format)
    _print_table(["episode", "sentences", "segments"], rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate


def _annotation_files(directory: Path) -> dict[str, Path]:
    if not directory.is_dir():
        raise ConfigError(f"{directory} is not a directory")
    return {p.stem: p for p in sorted(directory.iterdir()) if p.is_file()}


def _window_config(flag: str) -> WindowConfig:
    if flag == "auto":
        return WindowConfig()
    try:
        return WindowConfig(k=int(flag), derivation="explicit")
    except ValueError as exc:
        raise ConfigError(f"--window must be 'auto' or a positive integer: {exc}") from None


def cmd_evaluate(args: argparse.Namespace) -> int:
    hyp_files = _annotation_files(Path(args.hypotheses))
    ref_files = _annotation_files(Path(args.references))
    unmatched = sorted(set(hyp_files) ^ set(ref_files))
    if unmatched:
        print(f"error: unmatched episode ids: {', '.join(unmatched)}", file=sys.stderr)
        return EXIT_INPUT
    window = _window_config(args.window)
    stems = sorted(hyp_files)

    def work(stem: str) -> dict:
        reference = load_annotations(ref_files[stem])
        hypothesis = load_annotations(hyp_files[stem])
        k = window.resolve(reference)
        entry = {
            "record": "evaluation",
            "episode": stem,
            "window": k,
            "pk": pk(reference, hypothesis, k),
            "wd": window_diff(reference, hypothesis, k),
        }
        if args.baseline:
            prob = len(reference.boundaries) / reference.total
            base_pk, base_wd = [], []
            for i in range(args.iterations):
                draw = random_baseline(reference.total, prob, args.seed + i)
                base_pk.append(pk(reference, draw, k))
                base_wd.append(window_diff(reference, draw, k))
            entry["baseline_pk"] = sum(base_pk) / len(base_pk)
            entry["baseline_wd"] = sum(base_wd) / len(base_wd)
            entry["baseline_iterations"] = args.iterations
        return entry

    entries = _map_jobs(args.jobs, work, stems)

    records = [
        _manifest(
            "evaluate",
            {
                "window": args.window,
                "baseline": args.baseline,
                "iterations": args.iterations,
                "seed": args.seed,
            },
            [ref_files[s] for s in stems] + [hyp_files[s] for s in stems],
            args.timestamp,
        )
    ]
    records.extend(entries)
    summary = {
        "record": "summary",
        "episodes": len(entries),
        "mean_pk": sum(e["pk"] for e in entries) / len(entries),
        "mean_wd": sum(e["wd"] for e in entries) / len(entries),
    }
    if args.baseline:
        summary["baseline_mean_pk"] = sum(e["baseline_pk"] for e in entries) / len(entries)
        summary["baseline_mean_wd"] = sum(e["baseline_wd"] for e in entries) / len(entries)
    records.append(summary)
    if args.report:
        _write_report(Path(args.report), records, args.format)

    headers = ["episode", "k", "pk", "wd"] + (["base_pk", "base_wd"] if args.baseline else [])
    rows = []
    for e in entries:
        row = [e["episode"], e["window"], f"{e['pk']:.4f}", f"{e['wd']:.4f}"]
        if args.baseline:
            row += [f"{e['baseline_pk']:.4f}", f"{e['baseline_wd']:.4f}"]
        rows.append(row)
    mean_row = ["MEAN", "", f"{summary['mean_pk']:.4f}", f"{summary['mean_wd']:.4f}"]
    if args.baseline:
        mean_row += [f"{summary['baseline_mean_pk']:.4f}", f"{summary['baseline_mean_wd']:.4f}"]
    rows.append(mean_row)
    _print_table(headers, rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# tune


def _load_corpus_dir(directory: Path, transcript_format: str) -> list[AnnotatedEpisode]:
    if not directory.is_dir():
        raise ConfigError(f"{directory} is not a directory")
    transcripts = {
        p.stem: p
        for p in sorted(directory.iterdir())
        if p.suffix.lower() in (".txt", ".json")
    }
    refs = {p.stem: p for p in sorted(directory.glob("*.ref"))}
    missing = sorted(set(transcripts) ^ set(refs))
    if missing:
        raise PodsegError(f"corpus episodes without a transcript/.ref pair: {', '.join(missing)}")
    episodes = []
    for stem in sorted(transcripts):
        transcript = load_transcript(
            transcripts[stem], _detect_format(transcripts[stem], transcript_format)
        )
        reference = load_annotations(refs[stem])
        episodes.append(AnnotatedEpisode(transcript=transcript, reference=reference))
    return episodes


def _tune_records(result: TuneResult) -> list[dict]:
    records = []
    for config in result.results:
        records.append(
            {
                "record": "config",
                "segmenter": config.segmenter,
                "parameters": dict(config.parameters),
                "mean_pk": config.mean_pk,
                "mean_wd": config.mean_wd,
                "objective": config.objective,
                "failures": config.failures,
                "episodes": len(config.reports),
            }
        )
        for report in config.reports:
            records.append(
                {
                    "record": "episode",
                    "segmenter": config.segmenter,
                    "parameters": dict(config.parameters),
                    "episode": report.episode_id,
                    "window": report.window_k,
                    "pk": report.pk,
                    "wd": report.wd,
                    "embeddings": report.embedding_identity,
                }
            )
    return records


def cmd_tune(args: argparse.Namespace) -> int:
    corpus = _load_corpus_dir(Path(args.corpus), args.transcript_format)
    window = _window_config(args.window)
    grid = GridSpec(
        w_values=tuple(args.w) if args.w else GridSpec().w_values,
        k_values=tuple(args.k) if args.k else GridSpec().k_values,
        f_values=tuple(args.f) if args.f else GridSpec().f_values,
        l_values=tuple(args.l) if args.l else GridSpec().l_values,
    )
    results = []
    inputs = [Path(args.corpus)]
    if args.segmenter in ("tiling", "both"):
        results.append(tune_tiling(corpus, grid, objective=args.objective, window=window))
    if args.segmenter in ("textsplit", "both"):
        if not args.embeddings:
            raise ConfigError(f"--segmenter {args.segmenter} requires --embeddings")
        store = load_vectors(args.embeddings)
        inputs.append(Path(args.embeddings))
        results.append(
            tune_textsplit(
                corpus, store, grid.l_values, objective=args.objective, window=window
            )
        )

    best = select_best(results)
    records = [
        _manifest(
            "tune",
            {
                "segmenter": args.segmenter,
                "objective": args.objective,
                "window": args.window,
                "w": list(grid.w_values),
                "k": list(grid.k_values),
                "f": list(grid.f_values),
                "l": list(grid.l_values),
            },
            [p for p in inputs if p.is_file()],
            args.timestamp,
        )
    ]
    for result in results:
        records.extend(_tune_records(result))
    records.append(
        {
            "record": "best",
            "segmenter": best.segmenter,
            "parameters": dict(best.parameters),
            "mean_pk": best.mean_pk,
            "mean_wd": best.mean_wd,
            "objective": best.objective,
        }
    )
    if args.report:
        _write_report(Path(args.report), records, args.format)

    rows = [
        [r.segmenter, json.dumps(dict(c.parameters)), f"{c.mean_pk:.4f}", f"{c.mean_wd:.4f}", f"{c.objective:.4f}"]
        for r in results
        for c in r.results
    ]
    rows.append(["BEST", json.dumps(dict(best.parameters)), f"{best.mean_pk:.4f}", f"{best.mean_wd:.4f}", f"{best.objective:.4f}"])
    _print_table(["segmenter", "parameters", "mean_pk", "mean_wd", "objective"], rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# title


def cmd_title(args: argparse.Namespace) -> int:
    transcript_path = Path(args.transcript)
    annotation_path = Path(args.annotation)
    transcript = load_transcript(
        transcript_path, _detect_format(transcript_path, args.transcript_format)
    )
    segmentation = load_annotations(annotation_path)
    try:
        cfg = ClientConfig(
            endpoint=args.endpoint,
            timeout=args.timeout,
            max_retries=args.retries,
            max_title_words=args.max_title_words,
            auth_token=os.environ.get(AUTH_TOKEN_ENV),
            max_in_flight=args.max_in_flight,
            backoff_base=args.backoff_base,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    outcomes = title_episode(transcript, segmentation, cfg)
    records = [
        _manifest(
            "title",
            {
                "endpoint": args.endpoint,
                "timeout": args.timeout,
                "retries": args.retries,
                "max_title_words": args.max_title_words,
            },
            [transcript_path, annotation_path],
            args.timestamp,
        )
    ]
    rows = []
    failures = 0
    for outcome in outcomes:
        if isinstance(outcome, TitledSegment):
            records.append(
                {
                    "record": "title",
                    "segment": outcome.index,
                    "span": list(outcome.sentence_span),
                    "title": outcome.title,
                    "model": outcome.source,
                    "truncated": outcome.truncated,
                }
            )
            rows.append([outcome.index, outcome.title])
        else:
            failures += 1
            records.append(
                {
                    "record": "title_error",
                    "segment": outcome.index,
                    "span": list(outcome.sentence_span),
                    "kind": outcome.kind,
                    "error": outcome.error,
                }
            )
            rows.append([outcome.index, f"<{outcome.kind}: {outcome.error}>"])
    if args.report:
        _write_report(Path(args.report), records, args.format)
    _print_table(["segment", "title"], rows)
    return EXIT_WARNINGS if failures else EXIT_OK


# ---------------------------------------------------------------------------
# survey


def _load_variables(path: Path) -> tuple[list[str], dict[str, dict[str, float]]]:
    """Wide CSV: segment_id column plus one numeric column per covariate."""
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if "segment_id" not in header:
            raise PodsegError(f"{path}: variables file needs a segment_id column")
        covariates = [c for c in header if c != "segment_id"]
        values: dict[str, dict[str, float]] = {c: {} for c in covariates}
        for lineno, row in enumerate(reader, start=2):
            for c in covariates:
                try:
                    values[c][row["segment_id"].strip()] = float(row[c])
                except (TypeError, ValueError):
                    raise PodsegError(
                        f"{path}: line {lineno}: non-numeric value for {c!r}"
                    ) from None
    return covariates, values


def cmd_survey(args: argparse.Namespace) -> int:
    survey_path = Path(args.survey)
    table = load_survey(survey_path)
    sources = table.sources()
    inputs = [survey_path]

    records = []
    rows = []
    for source in sources:
        value = relevancy(table, source)
        records.append({"record": "relevancy", "source": source, "value": value})
        rows.append([source, f"{value:.4f}"])
    _print_table(["source", "relevancy"], rows)

    if args.variables:
        variables_path = Path(args.variables)
        inputs.append(variables_path)
        covariates, values = _load_variables(variables_path)
        corr_rows = []
        for covariate in covariates:
            for source in sources:
                per_segment: dict[str, list[int]] = {}
                for row in table.rows:
                    if row.title_source == source:
                        per_segment.setdefault(row.segment_id, []).append(row.score)
                segments = sorted(per_segment)
                missing = [s for s in segments if s not in values[covariate]]
                if missing:
                    raise PodsegError(
                        f"{variables_path}: no {covariate!r} value for segment(s) {missing}"
                    )
                xs = [values[covariate][s] for s in segments]
                ys = [sum(scores) / len(scores) for s in segments for scores in [per_segment[s]]]
                entry = {
                    "record": "correlation",
                    "variable": covariate,
                    "source": source,
                }
                try:
                    result = pearson(xs, ys)
                    entry["r"] = result.r
                    entry["p"] = result.p_value
                    entry["significant"] = is_significant(result.p_value)
                except PodsegError as exc:
                    entry["error"] = str(exc)
                records.append(entry)
                if "r" in entry:
                    star = "*" if entry["significant"] else ""
                    corr_rows.append(
                        [covariate, source, f"{entry['r']:.3f}{star}", f"{entry['p']:.4f}"]
                    )
                else:
                    corr_rows.append([covariate, source, "n/a", entry["error"]])
        print()
        _print_table(["variable", "source", "r", "p"], corr_rows)

    manifest = _manifest("survey", {"variables": bool(args.variables)}, inputs, args.timestamp)
    if args.report:
        _write_report(Path(args.report), [manifest] + records, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--report", help="write a structured report to this path")
    parser.add_argument("--format", choices=("jsonl", "json"), default="jsonl")
    parser.add_argument("--timestamp", help="pin the manifest timestamp (for reproducible output)")
    parser.add_argument(
        "--transcript-format",
        choices=("auto", "plain", "spotify-json"),
        default="auto",
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="podseg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"podseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_segment = sub.add_parser("segment", help="segment transcripts into topical spans")
    p_segment.add_argument("inputs", nargs="+", help="transcript files")
    p_segment.add_argument("--segmenter", choices=("tiling", "textsplit"), default="tiling")
    p_segment.add_argument("--w", type=int, default=30, help="pseudosentence length")
    p_segment.add_argument("--k", type=int, default=5, help="block size")
    p_segment.add_argument("--f", type=int, default=0, choices=(0, 1), help="cutoff policy")
    p_segment.add_argument("--smoothing-width", type=int, default=3)
    p_segment.add_argument("--smoothing-rounds", type=int, default=1)
    p_segment.add_argument("--penalty", type=float, default=None)
    p_segment.add_argument("--target-length", type=int, default=10)
    p_segment.add_argument("--variant", choices=("greedy", "dynamic"), default="dynamic")
    p_segment.add_argument("--embeddings", help="GloVe-style vector file (textsplit)")
    p_segment.add_argument("--output-dir", required=True)
    p_segment.add_argument("--jobs", type=int, default=1)
    _add_common(p_segment)
    p_segment.set_defaults(func=cmd_segment)

    p_eval = sub.add_parser("evaluate", help="score hypothesis segmentations against references")
    p_eval.add_argument("--hypotheses", required=True, help="directory of hypothesis files")
    p_eval.add_argument("--references", required=True, help="directory of reference files")
    p_eval.add_argument("--window", default="auto", help="'auto' or an explicit width")
    p_eval.add_argument("--baseline", action="store_true", help="add a random-baseline comparison")
    p_eval.add_argument("--iterations", type=int, default=10)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--jobs", type=int, default=1)
    _add_common(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_tune = sub.add_parser("tune", help="search segmenter hyper-parameters over a corpus")
    p_tune.add_argument("--corpus", required=True, help="directory of transcripts plus .ref files")
    p_tune.add_argument("--segmenter", choices=("tiling", "textsplit", "both"), default="tiling")
    p_tune.add_argument("--w", type=int, action="append")
    p_tune.add_argument("--k", type=int, action="append")
    p_tune.add_argument("--f", type=int, action="append")
    p_tune.add_argument("--l", type=int, action="append")
    p_tune.add_argument("--embeddings")
    p_tune.add_argument("--objective", choices=("pk+wd", "pk", "wd"), default="pk+wd")
    p_tune.add_argument("--window", default="auto")
    _add_common(p_tune)
    p_tune.set_defaults(func=cmd_tune)

    p_title = sub.add_parser("title", help="title each segment via the summarisation service")
    p_title.add_argument("--transcript", required=True)
    p_title.add_argument("--annotation", required=True)
    p_title.add_argument("--endpoint", required=True)
    p_title.add_argument("--timeout", type=float, default=30.0)
    p_title.add_argument("--retries", type=int, default=2)
    p_title.add_argument("--max-title-words", type=int, default=12)
    p_title.add_argument("--max-in-flight", type=int, default=4)
    p_title.add_argument("--backoff-base", type=float, default=1.0)
    _add_common(p_title)
    p_title.set_defaults(func=cmd_title)

    p_survey = sub.add_parser("survey", help="aggregate relevancy scores and correlations")
    p_survey.add_argument("--survey", required=True)
    p_survey.add_argument("--variables", help="wide CSV of per-segment covariates")
    _add_common(p_survey)
    p_survey.set_defaults(func=cmd_survey)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingScores as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PodsegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
