"""Typed tree representation of JSON documents.

Objects become internal nodes whose children carry the member key as
``label``; arrays are internal nodes with unlabeled children; primitives are
leaves. Every node carries a unique path (``$``, ``.key`` / ``["key"]``,
``[i]``) plus two content hashes used by the comparators:

``digest``
    order-invariant hash of the subtree below the node (its own label is
    excluded). Equal digests imply a zero-cost STED match.
``odigest``
    order-sensitive variant, safe as a memo key for match traces.
"""

from __future__ import annotations

import hashlib
import json
import re
import sys
from collections import Counter
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Any, Iterator

from .errors import DepthExceeded, InputError, ParseError

OBJECT = "object"
ARRAY = "array"
STRING = "string"
NUMBER = "number"
BOOLEAN = "boolean"
NULL = "null"

NODE_TYPES = (OBJECT, ARRAY, STRING, NUMBER, BOOLEAN, NULL)
CONTAINER_TYPES = frozenset({OBJECT, ARRAY})

DEFAULT_MAX_DEPTH = 512

_PLAIN_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_INT_LITERAL = re.compile(r"^-?\d+$")


class _NullMarker:
    __slots__ = ()

    def __repr__(self) -> str:
        return "JSON_NULL"

    def __reduce__(self):
        return "JSON_NULL"


JSON_NULL = _NullMarker()


@dataclass(frozen=True)
class JsonNumber:
    """A JSON number literal: exact source text plus normalized value."""

    raw: str

    @property
    def value(self) -> Decimal:
        return Decimal(self.raw)

    def __str__(self) -> str:
        return self.raw


@dataclass(frozen=True, eq=True)
class TreeNode:
    node_type: str
    path: str
    label: str | None = None
    value: Any = None
    children: tuple[TreeNode, ...] | None = None
    raw: str | None = None
    digest: str = field(default="", compare=False)
    odigest: str = field(default="", compare=False)
    size: int = field(default=1, compare=False)

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    def __repr__(self) -> str:
        if self.children is None:
            shown = self.raw if self.node_type == NUMBER else self.value
            return f"TreeNode({self.node_type} {self.path} = {shown!r})"
        return f"TreeNode({self.node_type} {self.path}, {len(self.children)} children)"


@dataclass(frozen=True)
class DocumentTree:
    root: TreeNode
    node_count: int
    max_depth: int
    max_branching: int
    warnings: tuple[str, ...] = ()

    @classmethod
    def from_root(cls, root: TreeNode, warnings: tuple[str, ...] = ()) -> DocumentTree:
        count = depth = branching = 0
        stack = [(root, 1)]
        while stack:
            node, d = stack.pop()
            count += 1
            depth = max(depth, d)
            if node.children is not None:
                branching = max(branching, len(node.children))
                stack.extend((c, d + 1) for c in node.children)
        return cls(root, count, depth, branching, tuple(warnings))


def child_path(parent: str, step: str | int) -> str:
    if isinstance(step, int):
        return f"{parent}[{step}]"
    if _PLAIN_KEY.match(step):
        return f"{parent}.{step}"
    return f"{parent}[{json.dumps(step, ensure_ascii=False)}]"


def _hash(text: str) -> str:
    return hashlib.blake2b(text.encode("utf-8"), digest_size=16).hexdigest()


def _canon_number(value: Decimal) -> str:
    # Exact canonical form, no context rounding: strip trailing zeros.
    sign, digits, exp = value.as_tuple()
    digits = list(digits)
    while len(digits) > 1 and digits[-1] == 0:
        digits.pop()
        exp += 1
    if digits == [0]:
        return "0"
    return ("-" if sign else "") + "".join(map(str, digits)) + f"e{exp}"


def _leaf(node_type: str, path: str, label: str | None, value: Any, raw: str | None = None) -> TreeNode:
    if node_type == NUMBER:
        canon = _canon_number(value)
    elif node_type == BOOLEAN:
        canon = "true" if value else "false"
    elif node_type == NULL:
        canon = "null"
    else:
        canon = value
    d = _hash(f"{node_type}:{canon}")
    return TreeNode(node_type, path, label, value, None, raw, d, d, 1)


def _container(node_type: str, path: str, label: str | None, children: list[TreeNode]) -> TreeNode:
    tag = "o" if node_type == OBJECT else "a"
    if node_type == OBJECT:
        parts = [json.dumps(c.label) + "=" + c.digest for c in children]
        oparts = [json.dumps(c.label) + "=" + c.odigest for c in children]
    else:
        parts = [c.digest for c in children]
        oparts = [c.odigest for c in children]
    digest = _hash(tag + ":" + ",".join(sorted(parts)))
    odigest = _hash(tag + ":" + ",".join(oparts))
    size = 1 + sum(c.size for c in children)
    return TreeNode(node_type, path, label, None, tuple(children), None, digest, odigest, size)


class _Pairs(list):
    """Raw object member list from the decoder (keeps duplicates)."""


def _number_from_python(value: int | float | Decimal) -> tuple[Decimal, str]:
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise InputError(f"non-finite number {value!r} is not valid JSON")
        raw = repr(value)
    elif isinstance(value, Decimal):
        if not value.is_finite():
            raise InputError(f"non-finite number {value!r} is not valid JSON")
        raw = str(value)
    else:
        raw = str(int(value))
    return Decimal(raw), raw


class _Builder:
    def __init__(self, max_depth: int):
        self.max_depth = max_depth
        self.warnings: list[str] = []

    def build(self, value: Any, path: str = "$", label: str | None = None, nesting: int = 0) -> TreeNode:
        if isinstance(value, (dict, _Pairs)):
            nesting += 1
            if nesting > self.max_depth:
                raise DepthExceeded(self.max_depth)
            items = self._members(value, path)
            kids = [self.build(v, child_path(path, k), k, nesting) for k, v in items]
            return _container(OBJECT, path, label, kids)
        if isinstance(value, (list, tuple)):
            nesting += 1
            if nesting > self.max_depth:
                raise DepthExceeded(self.max_depth)
            kids = [self.build(v, child_path(path, i), None, nesting) for i, v in enumerate(value)]
            return _container(ARRAY, path, label, kids)
        if value is None or value is JSON_NULL:
            return _leaf(NULL, path, label, JSON_NULL)
        if isinstance(value, bool):
            return _leaf(BOOLEAN, path, label, value)
        if isinstance(value, str):
            return _leaf(STRING, path, label, value)
        if isinstance(value, JsonNumber):
            try:
                num = value.value
            except InvalidOperation:
                raise InputError(f"invalid number literal {value.raw!r}") from None
            return _leaf(NUMBER, path, label, num, value.raw)
        if isinstance(value, (int, float, Decimal)):
            num, raw = _number_from_python(value)
            return _leaf(NUMBER, path, label, num, raw)
        raise InputError(f"unsupported value of type {type(value).__name__} at {path}")

    def _members(self, value: Any, path: str) -> list[tuple[str, Any]]:
        if isinstance(value, dict):
            for k in value:
                if not isinstance(k, str):
                    raise InputError(f"object key {k!r} at {path} is not a string")
            return list(value.items())
        merged: dict[str, Any] = {}
        for k, v in value:
            if k in merged:
                self.warnings.append(f"duplicate key {k!r} in {path}; last occurrence wins")
            merged[k] = v
        return list(merged.items())


def ensure_recursion_headroom(depth: int) -> None:
    """Make room on the interpreter stack for recursing ``depth`` levels.

    Tree walks use a few frames per level; the limit is only ever raised,
    never lowered, so concurrent callers cannot undercut each other.
    """
    need = 4 * depth + 256
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def _reject_constant(name: str) -> Any:
    raise ValueError(f"non-standard constant {name}")


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


def parse_document(text: str | bytes, *, max_depth: int = DEFAULT_MAX_DEPTH) -> DocumentTree:
    """Parse JSON text into a :class:`DocumentTree`.

    Source key order is preserved. Duplicate keys keep the position of the
    first occurrence and the value of the last, and leave a warning on the
    returned tree.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(exc.start, "invalid UTF-8") from None
    ensure_recursion_headroom(max_depth)
    if text.startswith("﻿"):
        text = text[1:]
    try:
        data = json.loads(
            text,
            object_pairs_hook=_Pairs,
            parse_int=JsonNumber,
            parse_float=JsonNumber,
            parse_constant=_reject_constant,
        )
    except json.JSONDecodeError as exc:
        raise ParseError(_byte_offset(text, exc.pos), exc.msg) from None
    except RecursionError:
        raise DepthExceeded(max_depth) from None
    except ValueError as exc:
        name = str(exc).rsplit(" ", 1)[-1]
        pos = max(text.find(name), 0)
        raise ParseError(_byte_offset(text, pos), str(exc)) from None
    builder = _Builder(max_depth)
    try:
        root = builder.build(data)
    except RecursionError:
        raise DepthExceeded(max_depth) from None
    return DocumentTree.from_root(root, tuple(builder.warnings))


def tree_from_value(value: Any, *, max_depth: int = DEFAULT_MAX_DEPTH, warnings: tuple[str, ...] = ()) -> DocumentTree:
    """Build a tree from plain Python data (dict/list/str/int/float/bool/None)."""
    ensure_recursion_headroom(max_depth)
    builder = _Builder(max_depth)
    root = builder.build(value)
    return DocumentTree.from_root(root, tuple(warnings) + tuple(builder.warnings))


def node_to_value(node: TreeNode, *, exact_numbers: bool = False) -> Any:
    if node.node_type == OBJECT:
        return {c.label: node_to_value(c, exact_numbers=exact_numbers) for c in node.children}
    if node.node_type == ARRAY:
        return [node_to_value(c, exact_numbers=exact_numbers) for c in node.children]
    if node.node_type == NUMBER:
        if exact_numbers:
            return JsonNumber(node.raw)
        return int(node.raw) if _INT_LITERAL.match(node.raw) else float(node.raw)
    if node.node_type == NULL:
        return None
    return node.value


def to_value(tree: DocumentTree | TreeNode, *, exact_numbers: bool = False) -> Any:
    node = tree.root if isinstance(tree, DocumentTree) else tree
    return node_to_value(node, exact_numbers=exact_numbers)


def dump_node(node: TreeNode, indent: int | None = None, _level: int = 0) -> str:
    if node.node_type == STRING:
        return json.dumps(node.value, ensure_ascii=False)
    if node.node_type == NUMBER:
        return node.raw
    if node.node_type == BOOLEAN:
        return "true" if node.value else "false"
    if node.node_type == NULL:
        return "null"
    opener, closer = ("{", "}") if node.node_type == OBJECT else ("[", "]")
    if not node.children:
        return opener + closer
    parts = []
    for c in node.children:
        body = dump_node(c, indent, _level + 1)
        if node.node_type == OBJECT:
            body = json.dumps(c.label, ensure_ascii=False) + ": " + body
        parts.append(body)
    if indent is None:
        return opener + ", ".join(parts) + closer
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    return opener + "\n" + ",\n".join(pad + p for p in parts) + "\n" + end + closer


def dump_document(tree: DocumentTree | TreeNode, indent: int | None = None) -> str:
    """Serialize back to JSON text, reproducing number literals verbatim."""
    node = tree.root if isinstance(tree, DocumentTree) else tree
    return dump_node(node, indent)


def iter_nodes(node: DocumentTree | TreeNode) -> Iterator[TreeNode]:
    """Pre-order traversal, children in source order."""
    if isinstance(node, DocumentTree):
        node = node.root
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        if cur.children:
            stack.extend(reversed(cur.children))


def field_type(node: TreeNode) -> str:
    """Field-type bucket of a member value: string/integer/float/array/object/boolean/null."""
    if node.node_type == NUMBER:
        return "integer" if _INT_LITERAL.match(node.raw) else "float"
    return node.node_type


def tree_stats(tree: DocumentTree | TreeNode) -> dict[str, Any]:
    root = tree.root if isinstance(tree, DocumentTree) else tree
    types: Counter[str] = Counter()
    field_types: Counter[str] = Counter()
    count = depth = branching = fields = 0
    stack = [(root, 1)]
    while stack:
        node, d = stack.pop()
        count += 1
        depth = max(depth, d)
        types[node.node_type] += 1
        if node.children is not None:
            branching = max(branching, len(node.children))
            if node.node_type == OBJECT:
                fields += len(node.children)
                field_types.update(field_type(c) for c in node.children)
            stack.extend((c, d + 1) for c in node.children)
    return {
        "node_count": count,
        "max_depth": depth,
        "max_branching": branching,
        "field_count": fields,
        "type_histogram": dict(sorted(types.items())),
        "field_type_histogram": dict(sorted(field_types.items())),
    }
