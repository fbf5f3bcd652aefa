"""Variation corpora on disk and metric sweeps over them.

A corpus directory holds ``base/base_NNN.json``, ``variants/<kind>/NNN[_rX.X].json``
and ``manifest.jsonl`` with one record per case. Paths in the manifest are
relative to the manifest's directory.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .core import StedConfig, sted_score
from .embeddings import Embedder
from .errors import InputError, StedError
from .tree import DocumentTree, dump_document, parse_document
from .ted import ted_similarity
from .variation import (
    GRADUAL_KINDS,
    KINDS,
    RATIO_LEVELS,
    BaseDocSpec,
    VariationSpec,
    apply_variation,
    derive_seed,
    gen_base_document,
    sample_base_specs,
)

MANIFEST_FIELDS = ("case_id", "base_seed", "kind", "ratio", "base_path", "variant_path")
METRICS = ("sted", "ted")


@dataclass(frozen=True)
class CorpusCase:
    case_id: str
    index: int
    base_seed: int
    kind: str
    ratio: float | None
    base: DocumentTree
    variant: DocumentTree


def expand_kinds(kind: str) -> tuple[str, ...]:
    if kind == "all":
        return KINDS
    if kind == "all-gradual":
        return GRADUAL_KINDS
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}; expected one of {KINDS + ('all-gradual', 'all')}")
    return (kind,)


def base_specs(count: int, seed: int, template: BaseDocSpec | None = None) -> list[BaseDocSpec]:
    if template is None:
        return sample_base_specs(count, seed)
    return [
        BaseDocSpec(template.target_depth, template.target_fields, dict(template.type_mix), seed * 1000 + i)
        for i in range(count)
    ]


def _case_id(kind: str, index: int, ratio: float | None) -> str:
    return f"{kind}-{index:03d}" + (f"-r{ratio:.1f}" if ratio is not None else "")


def generate_cases(
    count: int,
    seed: int,
    kinds: Sequence[str] = KINDS,
    ratios: Sequence[float] | None = None,
    template: BaseDocSpec | None = None,
) -> tuple[list[DocumentTree], list[CorpusCase]]:
    """Base documents and every requested variant, in a fixed order."""
    specs = base_specs(count, seed, template)
    bases = [gen_base_document(s) for s in specs]
    cases: list[CorpusCase] = []
    for kind in kinds:
        levels: Sequence[float | None] = (ratios or RATIO_LEVELS) if kind in GRADUAL_KINDS else (None,)
        for i, (spec, base) in enumerate(zip(specs, bases)):
            vseed = derive_seed(spec.seed, kind)
            for r in levels:
                variant = apply_variation(base, VariationSpec(kind, r, vseed))
                cases.append(CorpusCase(_case_id(kind, i, r), i, spec.seed, kind, r, base, variant))
    return bases, cases


def _write(path: Path, tree: DocumentTree) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_document(tree, indent=2) + "\n", encoding="utf-8")


def build_corpus(
    out_dir: str | os.PathLike,
    count: int,
    seed: int,
    kinds: Sequence[str] = KINDS,
    ratios: Sequence[float] | None = None,
    template: BaseDocSpec | None = None,
) -> Path:
    """Write a corpus and return the manifest path."""
    out = Path(out_dir)
    bases, cases = generate_cases(count, seed, kinds, ratios, template)
    for i, b in enumerate(bases):
        _write(out / "base" / f"base_{i:03d}.json", b)
    lines = []
    for c in cases:
        name = f"{c.index:03d}" + (f"_r{c.ratio:.1f}" if c.ratio is not None else "") + ".json"
        variant_path = Path("variants") / c.kind / name
        _write(out / variant_path, c.variant)
        record = {
            "case_id": c.case_id,
            "base_seed": c.base_seed,
            "kind": c.kind,
            "ratio": c.ratio,
            "base_path": f"base/base_{c.index:03d}.json",
            "variant_path": variant_path.as_posix(),
        }
        lines.append(json.dumps(record))
    manifest = out / "manifest.jsonl"
    manifest.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return manifest


def load_manifest(path: str | os.PathLike) -> list[dict]:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {p}: {exc}") from exc
    records = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"{p}:{n}: invalid JSON ({exc.msg})") from exc
        if not isinstance(rec, dict) or set(rec) != set(MANIFEST_FIELDS):
            raise InputError(f"{p}:{n}: manifest records need exactly {MANIFEST_FIELDS}")
        if rec["kind"] not in KINDS:
            raise InputError(f"{p}:{n}: unknown kind {rec['kind']!r}")
        records.append(rec)
    if not records:
        raise InputError(f"manifest {p} has no cases")
    return records


@dataclass(frozen=True)
class SweepRow:
    case_id: str
    kind: str
    ratio: float | None
    metric: str
    score: float | None
    error: str = ""


def score_pair(
    a: DocumentTree, b: DocumentTree, metric: str, config: StedConfig | None = None, embedder: Embedder | None = None
) -> float:
    if metric == "sted":
        return sted_score(a, b, config, embedder)
    if metric == "ted":
        return ted_similarity(a, b)
    raise InputError(f"unknown metric {metric!r}")


def _read_doc(path: Path) -> DocumentTree:
    try:
        return parse_document(path.read_bytes())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _sweep_case(args) -> list[SweepRow]:
    rec, root, metrics, config, embedder, keep_going = args
    rows = []
    try:
        base = _read_doc(root / rec["base_path"])
        variant = _read_doc(root / rec["variant_path"])
    except StedError as exc:
        if not keep_going:
            raise
        return [SweepRow(rec["case_id"], rec["kind"], rec["ratio"], m, None, str(exc)) for m in metrics]
    for m in metrics:
        try:
            rows.append(SweepRow(rec["case_id"], rec["kind"], rec["ratio"], m, score_pair(base, variant, m, config, embedder)))
        except StedError as exc:
            if not keep_going:
                raise
            rows.append(SweepRow(rec["case_id"], rec["kind"], rec["ratio"], m, None, str(exc)))
    return rows


def sweep(
    manifest: str | os.PathLike,
    metrics: Iterable[str] = METRICS,
    config: StedConfig | None = None,
    embedder: Embedder | None = None,
    keep_going: bool = False,
    jobs: int = 1,
) -> list[SweepRow]:
    """Score every case of a manifest; rows follow manifest order, then metric order."""
    metrics = tuple(metrics)
    for m in metrics:
        if m not in METRICS:
            raise InputError(f"unknown metric {m!r}; expected some of {METRICS}")
    records = load_manifest(manifest)
    root = Path(manifest).parent
    tasks = [(rec, root, metrics, config, embedder, keep_going) for rec in records]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_case, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        chunks = [_sweep_case(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]
