"""Brute-force reference solvers. Exponential on purpose: tiny inputs only."""
from __future__ import annotations

import functools
import itertools
from typing import List, Optional, Sequence, Tuple

import numpy as np

INF = float("inf")


def chain_lmax(values: Sequence[int], borders: Sequence[int]) -> int:
    edges = [0, *borders, len(values)]
    return max(sum(values[edges[i]:edges[i + 1]]) for i in range(len(edges) - 1))


def best_1d(values: Sequence[int], m: int) -> int:
    """Minimum over every non-decreasing cut tuple (empty intervals allowed)."""
    n = len(values)
    return min(chain_lmax(values, c)
               for c in itertools.combinations_with_replacement(range(n + 1), m - 1))


def best_1d_nonempty(values: Sequence[int], m: int) -> Optional[int]:
    n = len(values)
    if m > n:
        return None
    return min(chain_lmax(values, c) for c in itertools.combinations(range(1, n), m - 1))


def best_multi(arrays: Sequence[Sequence[int]], m: int) -> int:
    """Every split of m over the arrays (>= 1 each) times the 1D optimum."""
    k = len(arrays)
    best = INF
    for qs in itertools.product(range(1, m + 1), repeat=k):
        if sum(qs) == m:
            best = min(best, max(best_1d(a, q) for a, q in zip(arrays, qs)))
    return best


def naive_lmax(A: np.ndarray, rects) -> int:
    return max(int(A[r.x1 - 1:r.x2, r.y1 - 1:r.y2].sum()) for r in rects)


def owned_once(n1: int, n2: int, rects) -> bool:
    """Per-cell ownership count check."""
    own = np.zeros((n1, n2), dtype=int)
    for r in rects:
        if r.x1 < 1 or r.y1 < 1 or r.x2 > n1 or r.y2 > n2:
            return False
        own[r.x1 - 1:r.x2, r.y1 - 1:r.y2] += 1
    return bool(np.all(own == 1))


def _stripes(n: int, P: int):
    for c in itertools.combinations(range(1, n), P - 1):
        yield (0, *c, n)


def best_pq_jagged(A: np.ndarray, P: int, Q: int) -> int:
    """Every stripe-border set, each stripe cut optimally into Q non-empty parts."""
    n1 = A.shape[0]
    best = INF
    for e in _stripes(n1, P):
        v = max(best_1d_nonempty(list(A[e[i]:e[i + 1]].sum(axis=0)), Q) for i in range(P))
        best = min(best, v)
    return best


def best_m_jagged(A: np.ndarray, m: int) -> int:
    """Every stripe count, border set and processor distribution."""
    n1, n2 = A.shape
    best = INF
    for P in range(1, min(n1, m) + 1):
        for e in _stripes(n1, P):
            cols = [list(A[e[i]:e[i + 1]].sum(axis=0)) for i in range(P)]
            for qs in itertools.product(range(1, n2 + 1), repeat=P):
                if sum(qs) == m:
                    best = min(best, max(best_1d_nonempty(c, q) for c, q in zip(cols, qs)))
    return best


def best_stripe_sequence(A: np.ndarray, q: Sequence[int]) -> int:
    n1 = A.shape[0]
    P = len(q)
    best = INF
    for e in _stripes(n1, P):
        v = max(best_1d_nonempty(list(A[e[i]:e[i + 1]].sum(axis=0)), q[i]) for i in range(P))
        best = min(best, v)
    return best


def best_hierarchical(A: np.ndarray, m: int) -> int:
    """Exhaustive recursion over every axis, cut and processor split."""
    @functools.lru_cache(maxsize=None)
    def f(x1, x2, y1, y2, q):
        if (x2 - x1 + 1) * (y2 - y1 + 1) < q:
            return INF
        if q == 1:
            return int(A[x1 - 1:x2, y1 - 1:y2].sum())
        best = INF
        for j in range(1, q):
            for c in range(x1, x2):
                best = min(best, max(f(x1, c, y1, y2, j), f(c + 1, x2, y1, y2, q - j)))
            for c in range(y1, y2):
                best = min(best, max(f(x1, x2, y1, c, j), f(x1, x2, c + 1, y2, q - j)))
        return best
    return f(1, A.shape[0], 1, A.shape[1], m)


def best_rectilinear(A: np.ndarray, P: int, Q: int) -> int:
    n1, n2 = A.shape
    best = INF
    for r in _stripes(n1, P):
        for c in _stripes(n2, Q):
            v = max(int(A[r[i]:r[i + 1], c[j]:c[j + 1]].sum())
                    for i in range(P) for j in range(Q))
            best = min(best, v)
    return best


def p_candidates_naive(m: int, min_P: int) -> List[int]:
    """Group P by ceil((m - P) / P) and keep each group's largest member."""
    groups = {}
    for P in range(min_P, m // 2 + 1):
        key = -(-(m - P) // P)
        groups[key] = max(groups.get(key, P), P)
    return sorted(groups.values())
