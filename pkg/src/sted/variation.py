"""Seeded base documents and controlled variations.

Gradual variants (field rename, expression, semantic) modify exactly
``round_half_up(ratio * eligible)`` sites chosen by a seeded shuffle; the
shuffle depends only on the seed, so a higher ratio modifies a superset of
the sites modified by a lower one. Structural variants (flatten, nest) are
deterministic rewrites of the hierarchy.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Iterable, Mapping, Sequence

from . import tables
from .errors import (
    EmptyPool,
    InfeasibleSpec,
    InputError,
    NoEligibleKeys,
    NoEligibleValues,
    OverlappingGroups,
    UnknownKey,
)
from .tree import DocumentTree, JsonNumber, to_value, tree_from_value, tree_stats

RATIO_LEVELS = tuple(round(0.1 * i, 1) for i in range(1, 11))
GRADUAL_KINDS = ("field-rename", "expression", "semantic")
STRUCTURAL_KINDS = ("flatten", "nest")
KINDS = GRADUAL_KINDS + STRUCTURAL_KINDS

DEFAULT_TYPE_MIX = {"string": 0.682, "integer": 0.184, "array": 0.085, "object": 0.049}

# Depth and field-count distributions of the reference base set.
DEPTH_WEIGHTS = {2: 8, 3: 7, 4: 44, 5: 13, 6: 2, 7: 1}
FIELD_RANGE_WEIGHTS = {(4, 10): 6, (11, 25): 22, (26, 50): 27, (51, 100): 16, (101, 228): 4}

_ROOT_WEIGHT = 0.25


@dataclass(frozen=True)
class BaseDocSpec:
    target_depth: int
    target_fields: int
    type_mix: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_TYPE_MIX))
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.target_depth <= 7:
            raise InfeasibleSpec(f"target_depth must lie in [2, 7], got {self.target_depth}")
        if not 4 <= self.target_fields <= 228:
            raise InfeasibleSpec(f"target_fields must lie in [4, 228], got {self.target_fields}")
        if set(self.type_mix) != set(DEFAULT_TYPE_MIX):
            raise InfeasibleSpec(f"type_mix must cover exactly {sorted(DEFAULT_TYPE_MIX)}")
        if any(v < 0 for v in self.type_mix.values()) or abs(sum(self.type_mix.values()) - 1.0) > 1e-9:
            raise InfeasibleSpec("type_mix proportions must be non-negative and sum to 1")
        if self.target_fields < self.target_depth - 1:
            raise InfeasibleSpec(
                f"depth {self.target_depth} needs at least {self.target_depth - 1} fields, got {self.target_fields}"
            )


@dataclass(frozen=True)
class VariationSpec:
    kind: str
    ratio: float | None = None
    seed: int = 0
    synonym_table: Mapping[str, str] = field(default_factory=lambda: tables.SYNONYMS)
    paraphrase_table: Mapping[str, str] = field(default_factory=lambda: tables.PARAPHRASES)
    substitution_pool: Sequence[Any] = field(default_factory=lambda: tables.SUBSTITUTION_POOL)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown variation kind {self.kind!r}")
        if self.kind in GRADUAL_KINDS and self.ratio not in RATIO_LEVELS:
            raise InputError(f"ratio must be one of {RATIO_LEVELS}, got {self.ratio!r}")


def round_half_up(x: float | Decimal) -> int:
    return int(Decimal(str(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def sites_to_modify(ratio: float, n: int, seed: int) -> list[int]:
    """Indices of the sites to modify, as a seeded prefix of a shuffled order."""
    if not 0.0 <= ratio <= 1.0:
        raise InputError(f"ratio must lie in [0, 1], got {ratio}")
    k = round_half_up(Decimal(str(ratio)) * n)
    order = list(range(n))
    random.Random(seed).shuffle(order)
    return sorted(order[:k])


def derive_seed(*parts: Any) -> int:
    digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


# -- base documents -----------------------------------------------------------


def _type_counts(spec: BaseDocSpec) -> dict[str, int]:
    d, f = spec.target_depth, spec.target_fields
    mix = spec.type_mix
    chain = d - 2
    n_obj = max(chain, round(mix["object"] * f)) if d >= 3 else 0
    n_arr = round(mix["array"] * f) if d >= 3 else 0
    n_int = round(mix["integer"] * f)
    # every object needs a member that is not itself a chain object
    while n_obj > chain and f - n_obj < (n_obj - chain) + 1:
        n_obj -= 1
    n_prim = f - n_obj - n_arr - n_int
    while n_prim < 1 and n_arr > 0:
        n_arr -= 1
        n_prim += 1
    while n_prim < 1 and n_int > 0:
        n_int -= 1
        n_prim += 1
    if n_prim + n_int + n_arr < (n_obj - chain) + (1 if chain else 0):
        raise InfeasibleSpec(f"cannot fit depth {d} into {f} fields")
    return {"object": n_obj, "array": n_arr, "integer": n_int, "string": n_prim}


def _primitive(rng: random.Random, kind: str):
    if kind == "integer":
        return rng.randint(0, 9999)
    return rng.choice(tables.PHRASES)


def _array(rng: random.Random) -> list:
    kind = "string" if rng.random() < 0.6 else "integer"
    return [_primitive(rng, kind) for _ in range(rng.randint(2, 5))]


def gen_base_document(spec: BaseDocSpec) -> DocumentTree:
    """Generate one document with exactly the requested depth and field count."""
    rng = random.Random(spec.seed)
    counts = _type_counts(spec)
    depth = spec.target_depth
    chain = depth - 2

    # containers: [members(list of (kind, payload)), depth]
    root: list = []
    containers: list[tuple[list, int]] = [(root, 1)]
    parent = root
    chain_objs = []
    for k in range(chain):
        members: list = []
        parent.append(("object", members))
        containers.append((members, k + 2))
        chain_objs.append(members)
        parent = members

    extra = counts["object"] - chain
    for _ in range(extra):
        eligible = [c for c in containers if c[1] <= depth - 2]
        host = rng.choice(eligible)
        members = []
        host[0].append(("object", members))
        containers.append((members, host[1] + 1))

    fillers = ["integer"] * counts["integer"] + ["string"] * counts["string"]
    rng.shuffle(fillers)
    # objects with no leaf-capable member yet get one first
    for members, d in containers[1:]:
        if not members or (members is chain_objs[-1] if chain_objs else False):
            if not any(kind != "object" for kind, _ in members):
                if not fillers:
                    raise InfeasibleSpec("not enough primitive fields for the requested objects")
                members.append((fillers.pop(), None))

    def pick(cands):
        weights = [_ROOT_WEIGHT if m is root else 1.0 for m, _ in cands]
        return rng.choices(cands, weights=weights)[0][0]

    array_hosts = [c for c in containers if c[1] <= depth - 2]
    for _ in range(counts["array"]):
        pick(array_hosts).append(("array", None))
    for kind in fillers:
        pick(containers).append((kind, None))

    def realize(members: list) -> dict:
        rng.shuffle(members)
        keys = rng.sample(tables.KEY_VOCABULARY, min(len(members), len(tables.KEY_VOCABULARY)))
        while len(keys) < len(members):
            keys.append(f"field_{len(keys)}")
        out = {}
        for key, (kind, payload) in zip(keys, members):
            if kind == "object":
                out[key] = realize(payload)
            elif kind == "array":
                out[key] = _array(rng)
            else:
                out[key] = _primitive(rng, kind)
        return out

    doc = realize(root)
    _ensure_rename_site(doc, rng)
    return tree_from_value(doc)


def _all_keys(value: Any) -> Iterable[str]:
    if isinstance(value, dict):
        for k, v in value.items():
            yield k
            yield from _all_keys(v)
    elif isinstance(value, list):
        for v in value:
            yield from _all_keys(v)


def _ensure_rename_site(doc: dict, rng: random.Random) -> None:
    """Give tiny documents at least one key the default synonym table covers."""
    if any(k in tables.SYNONYMS for k in _all_keys(doc)):
        return
    pool = sorted(k for k in tables.KEY_VOCABULARY if k in tables.SYNONYMS and k not in doc)
    victim = rng.choice(list(doc))
    new = rng.choice(pool)
    items = [(new if k == victim else k, v) for k, v in doc.items()]
    doc.clear()
    doc.update(items)


def _quota(weights: Mapping[Any, int], count: int) -> list:
    """Largest-remainder apportionment of ``count`` items over ``weights``."""
    total = sum(weights.values())
    exact = {k: count * w / total for k, w in weights.items()}
    alloc = {k: math.floor(x) for k, x in exact.items()}
    left = count - sum(alloc.values())
    for k in sorted(weights, key=lambda k: (alloc[k] - exact[k], list(weights).index(k)))[:left]:
        alloc[k] += 1
    return [k for k in weights for _ in range(alloc[k])]


def sample_base_specs(count: int, seed: int, type_mix: Mapping[str, float] | None = None) -> list[BaseDocSpec]:
    """Base specs whose depth and field-count bins follow the reference shares.

    Bins are apportioned by largest remainder, so a batch of 75 reproduces the
    reference counts exactly; bins are then shuffled and paired at random.
    """
    if count < 0:
        raise InputError("count must be non-negative")
    rng = random.Random(seed)
    depths = _quota(DEPTH_WEIGHTS, count)
    ranges = _quota(FIELD_RANGE_WEIGHTS, count)
    rng.shuffle(depths)
    rng.shuffle(ranges)
    specs = []
    for i, (d, (lo, hi)) in enumerate(zip(depths, ranges)):
        f = max(rng.randint(lo, hi), d + 2)
        specs.append(BaseDocSpec(d, f, dict(type_mix or DEFAULT_TYPE_MIX), seed * 1000 + i))
    return specs


# -- gradual variations ---------------------------------------------------------


def _rename_sites(value: Any, table: Mapping[str, str], path: tuple = (), out: list | None = None) -> list:
    out = [] if out is None else out
    if isinstance(value, dict):
        siblings = set(value)
        claimed: set[str] = set()
        for k in value:
            target = table.get(k)
            if target is not None and target != k and target not in siblings and target not in claimed:
                out.append((path, k))
                claimed.add(target)
        for k, v in value.items():
            _rename_sites(v, table, path + (k,), out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _rename_sites(v, table, path + (i,), out)
    return out


def _rename(value: Any, renames: dict[tuple, set[str]], table: Mapping[str, str], path: tuple = ()) -> Any:
    if isinstance(value, dict):
        chosen = renames.get(path, ())
        return {
            (table[k] if k in chosen else k): _rename(v, renames, table, path + (k,))
            for k, v in value.items()
        }
    if isinstance(value, list):
        return [_rename(v, renames, table, path + (i,)) for i, v in enumerate(value)]
    return value


def apply_field_rename(doc: DocumentTree, ratio: float, table: Mapping[str, str] | None = None, seed: int = 0) -> DocumentTree:
    """Rename a seeded subset of keys that have an equivalent in ``table``."""
    table = tables.SYNONYMS if table is None else table
    value = to_value(doc, exact_numbers=True)
    sites = _rename_sites(value, table)
    if not sites:
        raise NoEligibleKeys("no key of the document appears in the synonym table")
    renames: dict[tuple, set[str]] = {}
    for idx in sites_to_modify(ratio, len(sites), seed):
        path, key = sites[idx]
        renames.setdefault(path, set()).add(key)
    return tree_from_value(_rename(value, renames, table))


def _leaf_sites(value: Any, path: tuple = (), out: list | None = None) -> list:
    out = [] if out is None else out
    if isinstance(value, dict):
        for k, v in value.items():
            _leaf_sites(v, path + (k,), out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _leaf_sites(v, path + (i,), out)
    else:
        out.append((path, value))
    return out


def _replace_leaves(value: Any, replacements: dict[tuple, Any], path: tuple = ()) -> Any:
    if isinstance(value, dict):
        return {k: _replace_leaves(v, replacements, path + (k,)) for k, v in value.items()}
    if isinstance(value, list):
        return [_replace_leaves(v, replacements, path + (i,)) for i, v in enumerate(value)]
    return replacements.get(path, value)


def apply_expression_variation(doc: DocumentTree, ratio: float, table: Mapping[str, str] | None = None, seed: int = 0) -> DocumentTree:
    """Swap a seeded subset of string values for their paraphrases."""
    table = tables.PARAPHRASES if table is None else table
    value = to_value(doc, exact_numbers=True)
    sites = [
        (p, v) for p, v in _leaf_sites(value)
        if isinstance(v, str) and v in table and table[v] != v
    ]
    if not sites:
        raise NoEligibleValues("no string value of the document appears in the paraphrase table")
    replacements = {sites[i][0]: table[sites[i][1]] for i in sites_to_modify(ratio, len(sites), seed)}
    return tree_from_value(_replace_leaves(value, replacements))


def _prim_kind(v: Any) -> str | None:
    if isinstance(v, bool):
        return "boolean"
    if isinstance(v, str):
        return "string"
    if isinstance(v, (int, float, Decimal, JsonNumber)):
        return "number"
    return None


def _num(v: Any) -> Decimal:
    return v.value if isinstance(v, JsonNumber) else Decimal(str(v))


def _differs(a: Any, b: Any, kind: str) -> bool:
    if kind == "number":
        return _num(a) != _num(b)
    return a != b


def apply_semantic_variation(doc: DocumentTree, ratio: float, pool: Sequence[Any] | None = None, seed: int = 0) -> DocumentTree:
    """Replace a seeded subset of leaves with unrelated values of the same type."""
    pool = tables.SUBSTITUTION_POOL if pool is None else pool
    if not pool:
        raise EmptyPool("substitution pool is empty")
    by_kind: dict[str, list] = {}
    for item in pool:
        kind = _prim_kind(item)
        if kind is not None:
            by_kind.setdefault(kind, []).append(item)
    value = to_value(doc, exact_numbers=True)
    sites = []
    for path, v in _leaf_sites(value):
        kind = _prim_kind(v)
        if kind is None:
            continue
        cands = [c for c in by_kind.get(kind, ()) if _differs(c, v, kind)]
        if cands:
            sites.append((path, cands))
    if not sites:
        raise NoEligibleValues("no leaf has a same-type replacement in the pool")
    replacements = {}
    for i in sites_to_modify(ratio, len(sites), seed):
        path, cands = sites[i]
        # per-site draw, independent of how many sites are chosen
        replacements[path] = random.Random(f"{seed}/{i}").choice(cands)
    return tree_from_value(_replace_leaves(value, replacements))


# -- structural variations -------------------------------------------------------


def _require_object(value: Any) -> None:
    if not isinstance(value, dict):
        raise InputError("structural variations need an object at the document root")


def flatten_structure(doc: DocumentTree) -> DocumentTree:
    """Hoist nested object members to the root under underscore-joined keys."""
    value = to_value(doc, exact_numbers=True)
    _require_object(value)
    out: dict[str, Any] = {}
    warnings: list[str] = []

    def place(key: str, v: Any) -> None:
        if key in out:
            n = 2
            while f"{key}_{n}" in out:
                n += 1
            warnings.append(f"flatten collision on {key!r}; stored as {key}_{n!s}")
            key = f"{key}_{n}"
        out[key] = v

    def walk(obj: dict, prefix: str) -> None:
        for k, v in obj.items():
            key = f"{prefix}_{k}" if prefix else k
            if isinstance(v, dict) and v:
                walk(v, key)
            else:
                place(key, v)

    walk(value, "")
    return tree_from_value(out, warnings=doc.warnings + tuple(warnings))


def nest_structure(doc: DocumentTree, grouping: Mapping[str, Iterable[str]]) -> DocumentTree:
    """Move listed root members under new group objects."""
    value = to_value(doc, exact_numbers=True)
    _require_object(value)
    owner: dict[str, str] = {}
    groups = {name: list(keys) for name, keys in grouping.items()}
    for name, keys in groups.items():
        for k in keys:
            if k not in value:
                raise UnknownKey(f"group {name!r} lists {k!r}, which is not a root member")
            if k in owner:
                raise OverlappingGroups(f"{k!r} is listed by both {owner[k]!r} and {name!r}")
            owner[k] = name
    for name in groups:
        if name in value and name not in owner:
            raise InputError(f"group name {name!r} collides with an ungrouped root member")
    out: dict[str, Any] = {}
    for k, v in value.items():
        name = owner.get(k)
        if name is None:
            out[k] = v
        elif name not in out:
            out[name] = {m: value[m] for m in groups[name]}
    return tree_from_value(out, warnings=doc.warnings)


def default_grouping(doc: DocumentTree, seed: int = 0) -> dict[str, list[str]]:
    """Partition every root member into groups of two or three."""
    value = to_value(doc)
    _require_object(value)
    keys = list(value)
    rng = random.Random(seed)
    chunks: list[list[str]] = []
    i = 0
    while i < len(keys):
        size = rng.randint(2, 3)
        chunks.append(keys[i : i + size])
        i += size
    if len(chunks) > 1 and len(chunks[-1]) == 1:
        chunks[-2].extend(chunks.pop())
    names = [n for n in tables.GROUP_NAMES if n not in value]
    k = 0
    while len(names) < len(chunks):
        k += 1
        if f"group_{k}" not in value:
            names.append(f"group_{k}")
    return {names[i]: chunk for i, chunk in enumerate(chunks)}


def apply_variation(doc: DocumentTree, spec: VariationSpec) -> DocumentTree:
    if spec.kind == "field-rename":
        return apply_field_rename(doc, spec.ratio, spec.synonym_table, spec.seed)
    if spec.kind == "expression":
        return apply_expression_variation(doc, spec.ratio, spec.paraphrase_table, spec.seed)
    if spec.kind == "semantic":
        return apply_semantic_variation(doc, spec.ratio, spec.substitution_pool, spec.seed)
    if spec.kind == "flatten":
        return flatten_structure(doc)
    return nest_structure(doc, default_grouping(doc, spec.seed))


def type_shares(docs: Iterable[DocumentTree]) -> dict[str, float]:
    """Aggregate member-type shares (string/integer/array/object/...) over docs."""
    totals: dict[str, int] = {}
    for d in docs:
        for k, v in tree_stats(d)["field_type_histogram"].items():
            totals[k] = totals.get(k, 0) + v
    n = sum(totals.values())
    return {k: v / n for k, v in sorted(totals.items())} if n else {}


__all__ = [
    "BaseDocSpec", "VariationSpec", "RATIO_LEVELS", "KINDS", "GRADUAL_KINDS", "STRUCTURAL_KINDS",
    "gen_base_document", "sample_base_specs", "apply_field_rename", "apply_expression_variation",
    "apply_semantic_variation", "flatten_structure", "nest_structure", "default_grouping",
    "apply_variation", "round_half_up", "sites_to_modify", "derive_seed", "type_shares",
]

