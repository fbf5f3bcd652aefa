"""Leaf-level similarity: key normalization, text similarity, typed scalars."""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from functools import lru_cache

import numpy as np

from .embeddings import Embedder, default_embedder
from .errors import ConfigError, EmptyName, NotALeaf
from .tree import BOOLEAN, NULL, NUMBER, STRING, TreeNode

_SEPARATORS = re.compile(r"[_\-\s]+")
_ACRONYM = re.compile(r"([A-Z]+)([A-Z][a-z])")
_CAMEL = re.compile(r"([a-z])([A-Z])")
_ALPHA_DIGIT = re.compile(r"([^\W\d_])(\d)")
_DIGIT_ALPHA = re.compile(r"(\d)([^\W\d_])")
_JSON_NUMBER = re.compile(r"^-?(0|[1-9]\d*)(\.\d+)?([eE][+-]?\d+)?$")


@dataclass(frozen=True)
class ScalarComparisonPolicy:
    coercion_enabled: bool = True
    coercion_penalty: float = 0.2
    number_rule: str = "exact"
    string_threshold_chars: int = 300
    chunk_overlap_chars: int = 50

    def __post_init__(self):
        if not 0.0 <= self.coercion_penalty <= 1.0:
            raise ConfigError("coercion_penalty must lie in [0, 1]")
        if self.number_rule != "exact":
            raise ConfigError("only the 'exact' number rule is supported")
        if self.string_threshold_chars <= 0 or self.chunk_overlap_chars <= 0:
            raise ConfigError("chunk thresholds must be positive")
        if self.chunk_overlap_chars >= self.string_threshold_chars:
            raise ConfigError("chunk overlap must be smaller than the chunk size")


DEFAULT_POLICY = ScalarComparisonPolicy()


@lru_cache(maxsize=65536)
def normalize_field_name(name: str) -> str:
    """``"userName"``, ``"user_name"``, ``"user-name"`` all become ``"user name"``."""
    if not name:
        raise EmptyName("field name must be non-empty")
    s = _SEPARATORS.sub(" ", name)
    s = _ACRONYM.sub(r"\1 \2", s)
    s = _CAMEL.sub(r"\1 \2", s)
    s = _ALPHA_DIGIT.sub(r"\1 \2", s)
    s = _DIGIT_ALPHA.sub(r"\1 \2", s)
    s = " ".join(s.lower().split())
    return s or name.lower()


def chunk_text(text: str, size: int = 300, overlap: int = 50) -> list[str]:
    if len(text) < size:
        return [text]
    step = size - overlap
    chunks = []
    start = 0
    while True:
        chunks.append(text[start : start + size])
        if start + size >= len(text):
            return chunks
        start += step


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    return max(0.0, min(1.0, float(np.dot(u.astype(np.float64), v.astype(np.float64)))))


def text_similarity(
    a: str,
    b: str,
    embedder: Embedder | None = None,
    policy: ScalarComparisonPolicy = DEFAULT_POLICY,
) -> float:
    """Embedding cosine in [0, 1]; long texts are compared chunk-wise.

    Texts shorter than the threshold are compared directly. Otherwise each
    chunk of the longer text takes its best cosine against the chunks of the
    shorter one, and those maxima are averaged.
    """
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    emb = embedder or default_embedder()
    # canonical order makes the result exactly symmetric
    if (len(a), a) > (len(b), b):
        a, b = b, a
    key = (a, b, policy.string_threshold_chars, policy.chunk_overlap_chars)
    hit = emb._sims.get(key)
    if hit is not None:
        return hit
    size, overlap = policy.string_threshold_chars, policy.chunk_overlap_chars
    if len(a) < size and len(b) < size:
        ea, eb = emb.embed_many([a, b])
        sim = _cosine(ea, eb)
    else:
        short = chunk_text(a, size, overlap)
        long_ = chunk_text(b, size, overlap)
        es = np.stack(emb.embed_many(short)).astype(np.float64)
        el = np.stack(emb.embed_many(long_)).astype(np.float64)
        best = np.clip(el @ es.T, 0.0, 1.0).max(axis=1)
        sim = float(min(1.0, max(0.0, best.mean())))
    if len(emb._sims) > emb._memo_size:
        emb._sims.clear()
    emb._sims[key] = sim
    return sim


def label_similarity(a: str | None, b: str | None, embedder: Embedder | None = None, policy: ScalarComparisonPolicy = DEFAULT_POLICY) -> float:
    if a is None and b is None:
        return 1.0
    if a is None or b is None:
        return 0.0
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0  # the empty key has no words to compare
    return text_similarity(normalize_field_name(a), normalize_field_name(b), embedder, policy)


def _string_as(text: str, target: str):
    """Coerce a string to ``target`` type; return None when impossible."""
    stripped = text.strip()
    if target == NUMBER:
        if _JSON_NUMBER.match(stripped):
            try:
                return Decimal(stripped)
            except InvalidOperation:
                return None
        return None
    if target == BOOLEAN:
        low = stripped.lower()
        if low in ("true", "false"):
            return low == "true"
        return None
    if target == NULL:
        return True if stripped.lower() == "null" else None
    return None


def string_coercible(text: str, target: str) -> bool:
    return _string_as(text, target) is not None


def _cross_pair(a: TreeNode, b: TreeNode):
    """Return (string_node, other_node) for a string vs primitive pair, else None."""
    if a.node_type == STRING and b.node_type in (NUMBER, BOOLEAN, NULL):
        return a, b
    if b.node_type == STRING and a.node_type in (NUMBER, BOOLEAN, NULL):
        return b, a
    return None


def type_agreement(a: TreeNode, b: TreeNode, policy: ScalarComparisonPolicy = DEFAULT_POLICY) -> float:
    """1 for equal node types, 1 - penalty for coercible primitive pairs, else 0."""
    if a.node_type == b.node_type:
        return 1.0
    if not policy.coercion_enabled:
        return 0.0
    pair = _cross_pair(a, b)
    if pair is None:
        return 0.0
    s, other = pair
    return 1.0 - policy.coercion_penalty if _string_as(s.value, other.node_type) is not None else 0.0


def _check_leaf(node: TreeNode) -> None:
    if node.children is not None:
        raise NotALeaf(f"{node.path} is a {node.node_type}, not a primitive")


def scalar_similarity(
    a: TreeNode,
    b: TreeNode,
    embedder: Embedder | None = None,
    policy: ScalarComparisonPolicy = DEFAULT_POLICY,
) -> float:
    _check_leaf(a)
    _check_leaf(b)
    if a.node_type == b.node_type:
        t = a.node_type
        if t == STRING:
            return text_similarity(a.value, b.value, embedder, policy)
        if t == NUMBER:
            return 1.0 if a.value == b.value else 0.0
        if t == BOOLEAN:
            return 1.0 if a.value == b.value else 0.0
        return 1.0  # null
    if not policy.coercion_enabled:
        return 0.0
    pair = _cross_pair(a, b)
    if pair is None:
        return 0.0
    s, other = pair
    coerced = _string_as(s.value, other.node_type)
    if coerced is None:
        return 0.0
    if other.node_type == NULL or coerced == other.value:
        return 1.0 - policy.coercion_penalty
    return 0.0
