"""Semantic tree edit distance.

The distance between two nodes is

    cost = w_s * (1 - struct_sim) + w_c * (1 - content_sim)

For leaves, ``struct_sim = label_sim * type_agreement`` and ``content_sim`` is
the typed scalar similarity. For two containers of the same type the
children are matched with the Hungarian method on a padded square cost matrix
of recursive pair costs, and the level similarity

    level = 1 - min(1, (matched_cost + lambda * |n_left - n_right|) / max(n_left, n_right))

serves as ``content_sim`` and also scales ``struct_sim`` (``label_sim * level``),
so that a reorganised hierarchy counts against structure, not only content.
Mismatched node kinds cost 1. The document score is ``1 - cost(root, root)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .embeddings import Embedder, default_embedder
from .errors import ConfigError
from .hungarian import hungarian_solve
from .similarity import (
    DEFAULT_POLICY,
    ScalarComparisonPolicy,
    label_similarity,
    normalize_field_name,
    scalar_similarity,
    string_coercible,
    type_agreement,
)
from .tree import (
    BOOLEAN,
    DEFAULT_MAX_DEPTH,
    NODE_TYPES,
    NULL,
    NUMBER,
    STRING,
    DocumentTree,
    TreeNode,
    dump_node,
    ensure_recursion_headroom,
)

log = logging.getLogger(__name__)

MODES = {"structural": (1.0, 0.0), "semantic": (0.0, 1.0), "hybrid": (0.5, 0.5)}
DIFF_KINDS = ("key-renamed", "value-changed", "type-changed", "missing", "extra", "restructured", "unchanged")
LARGE_BRANCHING = 512
_EXCERPT = 80


@dataclass(frozen=True)
class StedConfig:
    """Weights and costs. ``w_s``/``w_c`` default to the preset of ``mode``."""

    mode: str = "hybrid"
    w_s: float | None = None
    w_c: float | None = None
    lam: float = 0.1
    insert_cost: float = 1.0
    delete_cost: float = 1.0
    padding: str = "subtree"
    report_threshold: float = 0.05
    scalar_policy: ScalarComparisonPolicy = field(default=DEFAULT_POLICY)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {sorted(MODES)}, got {self.mode!r}")
        ws, wc = MODES[self.mode]
        if self.w_s is None and self.w_c is None:
            object.__setattr__(self, "w_s", ws)
            object.__setattr__(self, "w_c", wc)
        elif self.w_s is None:
            object.__setattr__(self, "w_s", 1.0 - self.w_c)
        elif self.w_c is None:
            object.__setattr__(self, "w_c", 1.0 - self.w_s)
        if not (0.0 <= self.w_s <= 1.0 and 0.0 <= self.w_c <= 1.0):
            raise ConfigError("w_s and w_c must lie in [0, 1]")
        if abs(self.w_s + self.w_c - 1.0) > 1e-9:
            raise ConfigError(f"w_s + w_c must equal 1, got {self.w_s + self.w_c}")
        if self.lam < 0 or self.insert_cost < 0 or self.delete_cost < 0:
            raise ConfigError("lambda and insert/delete costs must be non-negative")
        if self.padding not in ("subtree", "descendants"):
            raise ConfigError("padding must be 'subtree' or 'descendants'")

    @classmethod
    def for_mode(cls, mode: str, **overrides) -> StedConfig:
        return cls(mode=mode, **overrides)

    def with_mode(self, mode: str) -> StedConfig:
        """Same costs, weights reset to the preset of ``mode``."""
        return replace(self, mode=mode, w_s=None, w_c=None)


@dataclass(frozen=True)
class CostMatrix:
    entries: np.ndarray
    n_left: int
    n_right: int

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def is_phantom_row(self, i: int) -> bool:
        return i >= self.n_left

    def is_phantom_col(self, j: int) -> bool:
        return j >= self.n_right


@dataclass(frozen=True)
class MatchResult:
    assignment: tuple[tuple[int, int], ...]
    matched_cost: float
    unmatched_delta: int
    level_similarity: float
    n_left: int
    n_right: int

    def matched_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in self.assignment if i < self.n_left and j < self.n_right]

    def deleted(self) -> list[int]:
        return [i for i, j in self.assignment if i < self.n_left and j >= self.n_right]

    def inserted(self) -> list[int]:
        return [j for i, j in self.assignment if i >= self.n_left and j < self.n_right]


@dataclass(frozen=True)
class Difference:
    path: str
    kind: str
    left: str | None
    right: str | None
    cost: float

    def to_dict(self) -> dict:
        return {"path": self.path, "kind": self.kind, "left": self.left, "right": self.right, "cost": self.cost}


@dataclass(frozen=True)
class SimilarityResult:
    score: float
    differences: tuple[Difference, ...] = ()
    mode: str = "hybrid"
    metric: str = "sted"

    def to_dict(self) -> dict:
        out: dict = {"score": self.score, "mode": self.mode}
        if self.metric != "sted":
            out["metric"] = self.metric
        out["differences"] = [d.to_dict() for d in self.differences]
        return out


class PairCost(NamedTuple):
    cost: float
    struct_sim: float
    content_sim: float
    label_sim: float
    type_factor: float
    match: MatchResult | None


_ZERO = PairCost(0.0, 1.0, 1.0, 1.0, 1.0, None)

# leaf-pair counts from which cost-matrix blocks are computed with array ops
_BLOCK_MIN = 8
_TYPE_CODES = {t: k for k, t in enumerate(NODE_TYPES)}
_COERCIBLE_TYPES = (NUMBER, BOOLEAN, NULL)
_NOT_TEXT, _EMPTY_TEXT, _SHORT_TEXT, _LONG_TEXT = range(4)


class _LeafPack(NamedTuple):
    """Array view of the leaf children of one child list."""

    index: list[int]
    nodes: list[TreeNode]
    label_vec: np.ndarray
    label_id: np.ndarray
    type_code: np.ndarray
    value_id: np.ndarray
    text_vec: np.ndarray
    text_kind: np.ndarray
    coercible_to: np.ndarray  # per string leaf: bool mask over type codes


def _root(t: DocumentTree | TreeNode) -> TreeNode:
    return t.root if isinstance(t, DocumentTree) else t


def _prepare(*trees: DocumentTree | TreeNode) -> None:
    depth = max(t.max_depth if isinstance(t, DocumentTree) else DEFAULT_MAX_DEPTH for t in trees)
    ensure_recursion_headroom(depth)


def excerpt(node: TreeNode | None) -> str | None:
    if node is None:
        return None
    text = dump_node(node)
    return text if len(text) <= _EXCERPT else text[: _EXCERPT - 3] + "..."


class Comparator:
    """One STED evaluation context; memoizes container-pair results."""

    def __init__(self, config: StedConfig | None = None, embedder: Embedder | None = None):
        self.config = config or StedConfig()
        self.embedder = embedder or default_embedder()
        self._memo: dict[tuple, PairCost] = {}
        self._packs: dict[int, tuple[tuple[TreeNode, ...], _LeafPack]] = {}
        self._ids: dict[str, int] = {}

    def reset(self) -> None:
        self._memo.clear()
        self._packs.clear()
        self._ids.clear()

    def pair(self, a: TreeNode, b: TreeNode) -> PairCost:
        if a.label == b.label and a.digest == b.digest:
            return _ZERO
        cfg = self.config
        a_leaf, b_leaf = a.children is None, b.children is None
        if a_leaf and b_leaf:
            pol = cfg.scalar_policy
            label = label_similarity(a.label, b.label, self.embedder, pol)
            tf = type_agreement(a, b, pol)
            content = scalar_similarity(a, b, self.embedder, pol)
            struct = label * tf
            cost = cfg.w_s * (1.0 - struct) + cfg.w_c * (1.0 - content)
            return PairCost(cost, struct, content, label, tf, None)
        if a_leaf or b_leaf or a.node_type != b.node_type:
            return PairCost(cfg.w_s + cfg.w_c, 0.0, 0.0, 0.0, 0.0, None)
        key = (a.label, a.odigest, b.label, b.odigest)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        label = label_similarity(a.label, b.label, self.embedder, cfg.scalar_policy)
        match = self.match_children(a.children, b.children)
        level = match.level_similarity
        struct = label * level
        cost = cfg.w_s * (1.0 - struct) + cfg.w_c * (1.0 - level)
        result = PairCost(cost, struct, level, label, 1.0, match)
        self._memo[key] = result
        return result

    def cost(self, a: TreeNode, b: TreeNode) -> float:
        return self.pair(a, b).cost

    def _delete_cost(self, node: TreeNode) -> float:
        c = self.config.delete_cost
        return c * node.size if self.config.padding == "descendants" else c

    def _insert_cost(self, node: TreeNode) -> float:
        c = self.config.insert_cost
        return c * node.size if self.config.padding == "descendants" else c

    def _pack(self, children: tuple[TreeNode, ...]) -> _LeafPack:
        hit = self._packs.get(id(children))
        if hit is not None and hit[0] is children:
            return hit[1]
        pol = self.config.scalar_policy
        ids = self._ids
        index, nodes, label_id, type_code, value_id, text_kind, coercible = [], [], [], [], [], [], []
        label_texts: list[tuple[int, str]] = []
        value_texts: list[tuple[int, str]] = []
        for pos, node in enumerate(children):
            if node.children is not None:
                continue
            k = len(index)
            index.append(pos)
            nodes.append(node)
            if node.label is None:
                label_id.append(-1)
            elif node.label == "":
                label_id.append(ids.setdefault("\0", len(ids)))
            else:
                norm = normalize_field_name(node.label)
                label_id.append(ids.setdefault("l:" + norm, len(ids)))
                label_texts.append((k, norm))
            type_code.append(_TYPE_CODES[node.node_type])
            value_id.append(ids.setdefault("d:" + node.digest, len(ids)))
            row = [False] * len(NODE_TYPES)
            if node.node_type == STRING and pol.coercion_enabled:
                for t in _COERCIBLE_TYPES:
                    row[_TYPE_CODES[t]] = string_coercible(node.value, t)
            coercible.append(row)
            if node.node_type != STRING:
                text_kind.append(_NOT_TEXT)
            elif not node.value:
                text_kind.append(_EMPTY_TEXT)
            elif len(node.value) < pol.string_threshold_chars:
                text_kind.append(_SHORT_TEXT)
                value_texts.append((k, node.value))
            else:
                text_kind.append(_LONG_TEXT)
        dim = self.embedder.spec.dimension
        label_vec = np.zeros((len(index), dim))
        text_vec = np.zeros((len(index), dim))
        for rows, texts in ((label_vec, label_texts), (text_vec, value_texts)):
            if texts:
                vecs = self.embedder.embed_many([t for _, t in texts])
                rows[[k for k, _ in texts]] = np.stack(vecs).astype(np.float64)
        pack = _LeafPack(
            index, nodes, label_vec, np.array(label_id), np.array(type_code),
            np.array(value_id), text_vec, np.array(text_kind),
            np.array(coercible, dtype=bool).reshape(len(index), len(NODE_TYPES)),
        )
        self._packs[id(children)] = (children, pack)
        return pack

    def _leaf_block(self, pa: _LeafPack, pb: _LeafPack) -> np.ndarray:
        """Pair costs of all leaf children at once; mirrors :meth:`pair` for leaves."""
        cfg = self.config
        la, lb = pa.label_id[:, None], pb.label_id[None, :]
        label = np.clip(pa.label_vec @ pb.label_vec.T, 0.0, 1.0)
        label[la == lb] = 1.0
        label[(la < 0) != (lb < 0)] = 0.0
        same = pa.type_code[:, None] == pb.type_code[None, :]
        equal = pa.value_id[:, None] == pb.value_id[None, :]
        ka, kb = pa.text_kind[:, None], pb.text_kind[None, :]
        content = equal.astype(np.float64)
        short = (ka == _SHORT_TEXT) & (kb == _SHORT_TEXT) & ~equal
        if short.any():
            content = np.where(short, np.clip(pa.text_vec @ pb.text_vec.T, 0.0, 1.0), content)
        content[~same] = 0.0
        cost = cfg.w_s * (1.0 - label * same) + cfg.w_c * (1.0 - content)
        # chunked long strings and coercible cross-type pairs take the scalar path
        special = same & ((ka == _LONG_TEXT) | (kb == _LONG_TEXT)) & ~equal
        if cfg.scalar_policy.coercion_enabled:
            special |= pa.coercible_to[:, pb.type_code] | pb.coercible_to[:, pa.type_code].T
        for i, j in zip(*np.nonzero(special)):
            cost[i, j] = self.pair(pa.nodes[i], pb.nodes[j]).cost
        return cost

    def cost_matrix(self, left: tuple[TreeNode, ...] | list[TreeNode], right: tuple[TreeNode, ...] | list[TreeNode]) -> CostMatrix:
        left, right = tuple(left), tuple(right)
        n1, n2 = len(left), len(right)
        n = max(n1, n2)
        if n > LARGE_BRANCHING:
            log.warning("exact assignment over %d children; this is slow", n)
        m = np.empty((n, n))
        pair = self.pair
        n_leaf_left = sum(1 for c in left if c.children is None)
        n_leaf_right = sum(1 for c in right if c.children is None)
        if n_leaf_left * n_leaf_right >= _BLOCK_MIN:
            pa, pb = self._pack(left), self._pack(right)
            mixed = self.config.w_s + self.config.w_c
            m[:n1, :n2] = mixed
            m[np.ix_(pa.index, pb.index)] = self._leaf_block(pa, pb)
            for i, a in enumerate(left):
                if a.children is None:
                    continue
                row = m[i]
                for j, b in enumerate(right):
                    if b.children is not None:
                        row[j] = pair(a, b).cost
        else:
            for i, a in enumerate(left):
                row = m[i]
                for j, b in enumerate(right):
                    row[j] = pair(a, b).cost
        for i, a in enumerate(left):
            if n2 < n:
                m[i, n2:] = self._delete_cost(a)
        for j, b in enumerate(right):
            if n1 < n:
                m[n1:, j] = self._insert_cost(b)
        return CostMatrix(m, n1, n2)

    def match_children(self, left, right) -> MatchResult:
        n1, n2 = len(left), len(right)
        n = max(n1, n2)
        if n == 0:
            return MatchResult((), 0.0, 0, 1.0, 0, 0)
        cm = self.cost_matrix(left, right)
        assignment, total = hungarian_solve(cm.entries)
        delta = abs(n1 - n2)
        level = 1.0 - min(1.0, (total + self.config.lam * delta) / n)
        return MatchResult(tuple(assignment), total, delta, level, n1, n2)

    def similarity(self, t1: DocumentTree | TreeNode, t2: DocumentTree | TreeNode) -> float:
        _prepare(t1, t2)
        return min(1.0, max(0.0, 1.0 - self.pair(_root(t1), _root(t2)).cost))

    # -- difference report -------------------------------------------------

    def differences(self, t1, t2, threshold: float | None = None, include_unchanged: bool = False) -> list[Difference]:
        _prepare(t1, t2)
        th = self.config.report_threshold if threshold is None else threshold
        out: list[Difference] = []
        self._collect(_root(t1), _root(t2), out, th, include_unchanged)
        out.sort(key=lambda d: (d.path, d.kind))
        return out

    def _collect(self, a: TreeNode, b: TreeNode, out: list[Difference], th: float, unchanged: bool) -> None:
        cfg = self.config
        pc = self.pair(a, b)
        containers = a.children is not None and b.children is not None and a.node_type == b.node_type
        if containers:
            if pc.cost == 0.0 and not unchanged:
                return
            label_part = cfg.w_s * (1.0 - pc.label_sim)
            if a.label != b.label and label_part > th:
                out.append(Difference(a.path, "key-renamed", a.label, b.label, label_part))
            match = pc.match or self.match_children(a.children, b.children)
            for i, j in match.assignment:
                if i < match.n_left and j < match.n_right:
                    self._collect(a.children[i], b.children[j], out, th, unchanged)
                elif i < match.n_left:
                    child = a.children[i]
                    out.append(Difference(child.path, "missing", excerpt(child), None, self._delete_cost(child)))
                else:
                    child = b.children[j]
                    out.append(Difference(child.path, "extra", None, excerpt(child), self._insert_cost(child)))
            return
        if pc.cost > th or (unchanged and pc.cost == 0.0):
            out.append(Difference(a.path, self._classify(a, b, pc), excerpt(a), excerpt(b), pc.cost))

    def _classify(self, a: TreeNode, b: TreeNode, pc: PairCost) -> str:
        if pc.cost == 0.0:
            return "unchanged"
        if a.children is not None or b.children is not None:
            return "restructured"
        s = self.config.w_s * (1.0 - pc.struct_sim)
        c = self.config.w_c * (1.0 - pc.content_sim)
        if s >= c and s > 0.0:
            return "type-changed" if pc.type_factor < 1.0 else "key-renamed"
        return "value-changed"


def node_update_cost(a: TreeNode, b: TreeNode, config: StedConfig | None = None, embedder: Embedder | None = None) -> float:
    return Comparator(config, embedder).cost(a, b)


def optimal_children_matching(left, right, config: StedConfig | None = None, embedder: Embedder | None = None) -> MatchResult:
    return Comparator(config, embedder).match_children(tuple(left), tuple(right))


def sted_similarity(t1, t2, config: StedConfig | None = None, embedder: Embedder | None = None) -> SimilarityResult:
    """Score two documents in [0, 1] and list the notable per-path differences."""
    comp = Comparator(config, embedder)
    score = comp.similarity(t1, t2)
    diffs = comp.differences(t1, t2)
    return SimilarityResult(score, tuple(diffs), comp.config.mode)


def sted_score(t1, t2, config: StedConfig | None = None, embedder: Embedder | None = None) -> float:
    """Score only, skipping the difference report."""
    return Comparator(config, embedder).similarity(t1, t2)


def compare_report(
    t1,
    t2,
    config: StedConfig | None = None,
    embedder: Embedder | None = None,
    *,
    threshold: float = 0.0,
    include_unchanged: bool = False,
) -> SimilarityResult:
    """Like :func:`sted_similarity` but reports every non-zero-cost pair.

    With ``include_unchanged`` zero-cost leaf matches are listed as well,
    with kind ``"unchanged"``.
    """
    comp = Comparator(config, embedder)
    score = comp.similarity(t1, t2)
    diffs = comp.differences(t1, t2, threshold=threshold, include_unchanged=include_unchanged)
    return SimilarityResult(score, tuple(diffs), comp.config.mode)
