"""Ordered, exact-match tree edit distance baseline.

Children are compared by position (index i against index i, overflow counts
as insertion or deletion) and each level is normalized the same way as STED,
so the two scores are directly comparable. There is no semantic matching and
no reordering, which is exactly what makes it a useful baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import SimilarityResult, _prepare, _root
from .errors import ConfigError
from .tree import DocumentTree, TreeNode


@dataclass(frozen=True)
class TedConfig:
    insert_cost: float = 1.0
    delete_cost: float = 1.0
    lam: float = 0.1

    def __post_init__(self):
        if self.insert_cost < 0 or self.delete_cost < 0 or self.lam < 0:
            raise ConfigError("TED costs must be non-negative")


def _same_leaf(a: TreeNode, b: TreeNode) -> bool:
    # digest covers type and value; labels are compared separately
    return a.node_type == b.node_type and a.label == b.label and a.digest == b.digest


def ted_update_cost(a: TreeNode, b: TreeNode, config: TedConfig | None = None) -> float:
    """Unit update cost for leaves; one minus the positional level score for containers."""
    config = config or TedConfig()
    if a.node_type != b.node_type or a.label != b.label:
        return 1.0
    if a.children is None:
        return 0.0 if _same_leaf(a, b) else 1.0
    return 1.0 - ted_level_similarity(a.children, b.children, config)


def ted_level_similarity(left, right, config: TedConfig | None = None) -> float:
    config = config or TedConfig()
    n1, n2 = len(left), len(right)
    n = max(n1, n2)
    if n == 0:
        return 1.0
    total = 0.0
    for i in range(min(n1, n2)):
        total += ted_update_cost(left[i], right[i], config)
    total += (n1 - min(n1, n2)) * config.delete_cost + (n2 - min(n1, n2)) * config.insert_cost
    return 1.0 - min(1.0, (total + config.lam * abs(n1 - n2)) / n)


def ted_similarity(t1: DocumentTree | TreeNode, t2: DocumentTree | TreeNode, config: TedConfig | None = None) -> float:
    _prepare(t1, t2)
    a, b = _root(t1), _root(t2)
    return max(0.0, min(1.0, 1.0 - ted_update_cost(a, b, config)))


def ted_report(t1, t2, config: TedConfig | None = None) -> SimilarityResult:
    return SimilarityResult(ted_similarity(t1, t2, config), (), "ordered", metric="ted")
