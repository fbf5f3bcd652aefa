"""Exact minimum-cost assignment.

The default backend is SciPy's ``linear_sum_assignment`` (a compiled
shortest-augmenting-path solver). A pure-Python Hungarian method is kept as
the ``"python"`` backend: rows are inserted one at a time, each insertion
grows a Dijkstra-like alternating tree over the columns using reduced costs
``c[i][j] - u[i] - v[j]`` and augments along the cheapest path, ``O(n^3)``
overall. Both backends are deterministic.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import NonFinite, NonSquare

# Below this size the pure-Python loop beats numpy's per-call overhead.
_VECTOR_THRESHOLD = 12


def _as_square(matrix) -> np.ndarray:
    arr = np.asarray(matrix, dtype=np.float64)
    if arr.size == 0 and arr.ndim in (1, 2) and (arr.ndim == 1 or arr.shape[0] == arr.shape[-1]):
        return np.zeros((0, 0))
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"cost matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("cost matrix contains NaN or infinite entries")
    return arr


def _solve_small(c: list[list[float]], n: int) -> list[int]:
    inf = math.inf
    u = [0.0] * (n + 1)
    v = [0.0] * (n + 1)
    p = [0] * (n + 1)  # p[j] = row matched to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            row = c[i0 - 1]
            ui0 = u[i0]
            delta = inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of = [0] * n
    for j in range(1, n + 1):
        col_of[p[j] - 1] = j - 1
    return col_of


def _solve_vector(c: np.ndarray, n: int) -> list[int]:
    cost = np.zeros((n + 1, n + 1))
    cost[1:, 1:] = c
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used
            free[0] = False
            cur = cost[i0] - u[i0] - v
            better = free & (cur < minv)
            minv[better] = cur[better]
            way[better] = j0
            masked = np.where(free, minv, np.inf)
            j1 = int(np.argmin(masked))  # first index among ties
            delta = masked[j1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of = [0] * n
    for j in range(1, n + 1):
        col_of[int(p[j]) - 1] = j - 1
    return col_of


BACKENDS = ("scipy", "python")


def hungarian_solve(
    matrix: Sequence[Sequence[float]] | np.ndarray, backend: str = "scipy"
) -> tuple[list[tuple[int, int]], float]:
    """Minimum-cost perfect matching on a square matrix.

    Returns ``(assignment, total_cost)`` where ``assignment`` lists
    ``(row, column)`` pairs in row order and ``total_cost`` is the sum of the
    selected entries taken in that order.
    """
    if backend not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}")
    arr = _as_square(matrix)
    n = arr.shape[0]
    if n == 0:
        return [], 0.0
    if n == 1:
        return [(0, 0)], float(arr[0, 0])
    if backend == "scipy":
        _, cols = linear_sum_assignment(arr)
        col_of = cols.tolist()
    elif n < _VECTOR_THRESHOLD:
        col_of = _solve_small(arr.tolist(), n)
    else:
        col_of = _solve_vector(arr, n)
    assignment = [(i, col_of[i]) for i in range(n)]
    total = 0.0
    for i, j in assignment:
        total += float(arr[i, j])
    return assignment, total
