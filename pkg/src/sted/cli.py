"""Command-line interface.

Reports go to stdout (JSON, or CSV for ``sweep``), diagnostics to stderr.
Exit codes: 0 ok, 1 internal error, 2 bad input, 3 score below threshold,
4 embedding provider failure.
"""

from __future__ import annotations

import argparse
import csv
import glob
import io
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import RunConfig
from .consistency import evaluate_consistency
from .core import MODES, compare_report, sted_similarity
from .corpus import METRICS, build_corpus, expand_kinds, sweep
from .embeddings import REMOTE, EmbeddingCache
from .errors import InputError, PairComparisonError, ProviderError, StedError
from .ted import ted_report
from .tree import DocumentTree, parse_document
from .variation import RATIO_LEVELS, BaseDocSpec

log = logging.getLogger("sted")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_THRESHOLD, EXIT_PROVIDER = 0, 1, 2, 3, 4
DEFAULT_CACHE = Path(os.path.expanduser("~")) / ".cache" / "sted"


def _emit(obj, pretty: bool = False) -> None:
    sys.stdout.write(json.dumps(obj, indent=2 if pretty else None, ensure_ascii=False) + "\n")


def _read(path: str) -> DocumentTree:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_document(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _run_config(args) -> RunConfig:
    return RunConfig.load(args.config) if args.config else RunConfig()


def _embedder(args, cfg: RunConfig):
    cache_path = args.cache or cfg.cache_path
    if cache_path is None and cfg.provider.kind == REMOTE:
        cache_path = str(DEFAULT_CACHE)
    return replace(cfg, cache_path=cache_path).embedder()


def _sted_config(args, cfg: RunConfig):
    # an explicit --mode selects that mode's weight preset
    return cfg.sted_config(args.mode) if args.mode else cfg.sted_config()


# -- commands -------------------------------------------------------------------


def cmd_compare(args) -> int:
    cfg = _run_config(args)
    a, b = _read(args.file_a), _read(args.file_b)
    if args.metric == "ted":
        result = ted_report(a, b)
    else:
        config = _sted_config(args, cfg)
        emb = _embedder(args, cfg)
        if args.full:
            result = compare_report(a, b, config, emb, include_unchanged=True)
        else:
            result = sted_similarity(a, b, config, emb)
    if args.pretty:
        sys.stdout.write(f"{result.metric} score: {result.score:.6f} ({result.mode})\n")
        for d in result.differences:
            sys.stdout.write(f"  {d.kind:<14} {d.path}  cost={d.cost:.4f}  {d.left} -> {d.right}\n")
    else:
        _emit(result.to_dict())
    return EXIT_OK if result.score >= args.threshold else EXIT_THRESHOLD


def _expand_inputs(items: Sequence[str]) -> list[str]:
    paths: list[str] = []
    for item in items:
        p = Path(item)
        if p.is_dir():
            paths.extend(sorted(str(q) for q in p.iterdir() if q.suffix == ".json" and q.is_file()))
        elif any(ch in item for ch in "*?["):
            paths.extend(sorted(glob.glob(item)))
        else:
            paths.append(item)
    return paths


def cmd_consistency(args) -> int:
    cfg = _run_config(args)
    paths = _expand_inputs(args.inputs)
    if not paths:
        raise InputError("no input documents matched")
    outputs = []
    for p in paths:
        try:
            outputs.append(_read(p))
        except InputError as exc:
            if not args.skip_bad:
                raise
            log.warning("skipping %s", exc)
    if not outputs:
        raise InputError("no input document could be parsed")
    emb = _embedder(args, cfg)
    alpha = args.alpha if args.alpha is not None else cfg.alpha
    if args.all_modes:
        configs = {m: cfg.sted_config(m) for m in MODES}
    else:
        config = _sted_config(args, cfg)
        configs = {config.mode: config}
    reports = {m: evaluate_consistency(outputs, m, c, emb, alpha, args.jobs).to_dict() for m, c in configs.items()}
    if args.all_modes:
        _emit(reports, args.pretty)
    else:
        _emit(next(iter(reports.values())), args.pretty)
    worst = min(r["consistency_score"] for r in reports.values())
    return EXIT_OK if worst >= args.threshold else EXIT_THRESHOLD


def _load_base_spec(path: str) -> BaseDocSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot load base spec {path}: {exc}") from exc
    allowed = {"target_depth", "target_fields", "type_mix"}
    if not isinstance(data, dict) or not {"target_depth", "target_fields"} <= set(data) <= allowed:
        raise InputError(f"base spec needs target_depth and target_fields (optional type_mix), got {data!r}")
    kwargs = {k: data[k] for k in allowed if k in data}
    return BaseDocSpec(**kwargs)


def cmd_generate(args) -> int:
    kinds = expand_kinds(args.kind)
    ratios = None
    if args.ratio is not None:
        r = round(args.ratio, 1)
        if r not in RATIO_LEVELS or abs(r - args.ratio) > 1e-9:
            raise InputError(f"--ratio must be one of {RATIO_LEVELS}")
        ratios = [r]
    template = _load_base_spec(args.base_spec) if args.base_spec else None
    if args.count < 1:
        raise InputError("--count must be at least 1")
    manifest = build_corpus(args.out, args.count, args.seed, kinds, ratios, template)
    n_cases = sum(1 for _ in manifest.open(encoding="utf-8"))
    _emit({"manifest": str(manifest), "bases": args.count, "cases": n_cases}, args.pretty)
    return EXIT_OK


def _format_ratio(r) -> str:
    return "" if r is None else f"{r:.1f}"


def cmd_sweep(args) -> int:
    cfg = _run_config(args)
    manifest = Path(args.corpus)
    if manifest.is_dir():
        manifest = manifest / "manifest.jsonl"
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if not metrics:
        raise InputError(f"--metrics must list some of {METRICS}")
    rows = sweep(manifest, metrics, _sted_config(args, cfg), _embedder(args, cfg), args.keep_going, args.jobs)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["case_id", "kind", "ratio", "metric", "score"] + (["error"] if args.keep_going else [])
    writer.writerow(header)
    for row in rows:
        line = [row.case_id, row.kind, _format_ratio(row.ratio), row.metric, "" if row.score is None else repr(row.score)]
        if args.keep_going:
            line.append(row.error)
        writer.writerow(line)
    if args.out and args.out != "-":
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    else:
        sys.stdout.write(buf.getvalue())
    failed = sum(1 for r in rows if r.error)
    if failed:
        log.warning("%d of %d rows failed", failed, len(rows))
    return EXIT_OK


def cmd_cache(args) -> int:
    cfg = _run_config(args)
    path = args.cache or cfg.cache_path or str(DEFAULT_CACHE)
    cache = EmbeddingCache(path)
    if args.action == "stats":
        _emit(cache.stats(), args.pretty)
    else:
        _emit({"path": str(cache.storage_path), "removed": cache.clear()}, args.pretty)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration file")
    common.add_argument("--cache", help="embedding cache directory")
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="sted", description="Semantic tree edit distance for JSON documents.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", parents=[common], help="score two documents")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--metric", choices=METRICS, default="sted")
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--threshold", type=float, default=0.0, help="exit 3 when the score is below this")
    p.add_argument("--full", action="store_true", help="list every matched path, including unchanged ones")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("consistency", parents=[common], help="consistency of repeated outputs")
    p.add_argument("inputs", nargs="+", help="files, directories or glob patterns")
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--alpha", type=float)
    p.add_argument("--all-modes", action="store_true")
    p.add_argument("--skip-bad", action="store_true", help="ignore files that fail to parse")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("generate", parents=[common], help="write a variation corpus")
    p.add_argument("--count", type=int, default=75)
    p.add_argument("--kind", default="all", help="field-rename, expression, semantic, flatten, nest, all-gradual or all")
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--base-spec", help="JSON file with target_depth, target_fields and optional type_mix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sweep", parents=[common], help="score every case of a corpus")
    p.add_argument("--corpus", required=True, help="manifest.jsonl or the corpus directory")
    p.add_argument("--metrics", default="sted,ted")
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--keep-going", action="store_true", help="record per-case failures instead of stopping")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cache", parents=[common], help="inspect or clear the embedding cache")
    p.add_argument("action", choices=["stats", "clear"])
    p.set_defaults(func=cmd_cache)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, PairComparisonError):
        return _exit_code(exc.cause)
    if isinstance(exc, ProviderError):
        return EXIT_PROVIDER
    if isinstance(exc, InputError):
        return EXIT_INPUT
    return EXIT_INTERNAL


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="sted: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except StedError as exc:
        sys.stderr.write(f"sted: error: {exc}\n")
        return _exit_code(exc)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 1
        log.debug("internal error", exc_info=True)
        sys.stderr.write(f"sted: internal error: {exc!r}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
