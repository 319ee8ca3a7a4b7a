"""One dimensional chain partitioning.

A workload is any interval-load function that is monotone by inclusion.
Plain arrays (and the max-over-stripes workload of rectilinear refinement)
are stored as prefix rows and go through the compiled kernels; arbitrary
workloads, such as "optimal load of this stripe on Q processors", go through
the generic Python paths that only call :meth:`Workload1D.span`.

Borders are positions in ``0..n``: interval ``t`` covers the 1-based indices
``borders[t-1] + 1 .. borders[t]``. Empty intervals are allowed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .grid import PartitionError, PrefixSum2D


class Workload1D:
    n: int

    def span(self, a: int, b: int) -> int:
        """Load of positions ``(a, b]``."""
        raise NotImplementedError

    def load(self, i: int, j: int) -> int:
        """Load of the 1-based inclusive interval ``i..j`` (0 when empty)."""
        if i < 1 or j > self.n or i > j + 1:
            raise PartitionError(f"interval ({i}, {j}) outside 1..{self.n}")
        return self.span(i - 1, j)

    @property
    def total(self) -> int:
        return self.span(0, self.n)


class PrefixWorkload(Workload1D):
    """Workload backed by k non-decreasing prefix rows; load = max over rows."""

    def __init__(self, pre):
        pre = np.ascontiguousarray(pre, dtype=np.int64)
        if pre.ndim == 1:
            pre = pre[None, :]
        if pre.shape[1] < 1 or np.any(pre[:, 0] != 0) or np.any(np.diff(pre, axis=1) < 0):
            raise PartitionError("prefix rows must start at 0 and be non-decreasing")
        pre.setflags(write=False)
        self.pre = pre
        self.n = pre.shape[1] - 1

    @classmethod
    def from_values(cls, values) -> "PrefixWorkload":
        v = np.asarray(values, dtype=np.int64)
        if np.any(v < 0):
            raise PartitionError("loads must be non-negative")
        return cls(np.concatenate(([0], np.cumsum(v))))

    def span(self, a, b):
        return int(kernels.interval_load(self.pre, a, b))

    def max_task(self) -> int:
        return int(kernels.max_element(self.pre))


class FunctionWorkload(Workload1D):
    """Workload given by a callable on positions ``(a, b]``; results memoised."""

    def __init__(self, n: int, fn: Callable[[int, int], int]):
        self.n = n
        self._fn = fn
        self._memo: Dict[Tuple[int, int], int] = {}

    def span(self, a, b):
        if a >= b:
            return 0
        key = (a, b)
        v = self._memo.get(key)
        if v is None:
            v = self._memo[key] = int(self._fn(a, b))
        return v


@dataclass(frozen=True)
class Cuts1D:
    n: int
    borders: Tuple[int, ...]
    lmax: int

    @property
    def m(self) -> int:
        return len(self.borders) + 1

    def bounds(self) -> List[Tuple[int, int]]:
        """Position pairs ``(a, b]`` of every interval."""
        edges = (0,) + self.borders + (self.n,)
        return list(zip(edges[:-1], edges[1:]))

    def intervals(self) -> List[Tuple[int, int]]:
        """1-based inclusive ``(i, j)``; empty intervals have ``i == j + 1``."""
        return [(a + 1, b) for a, b in self.bounds()]


@dataclass(frozen=True)
class MultiCuts:
    cuts: Tuple[Cuts1D, ...]
    lmax: int

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(c.m for c in self.cuts)

    @property
    def m(self) -> int:
        return sum(self.counts)


def workload_from_columns(ps: PrefixSum2D, rowlo: int, rowhi: int) -> PrefixWorkload:
    """Column workload of rows ``rowlo..rowhi``: load(i, j) = L(rowlo, rowhi, i, j)."""
    if not 1 <= rowlo <= rowhi <= ps.n1:
        raise PartitionError(f"bad row range {rowlo}..{rowhi} for {ps.n1} rows")
    return PrefixWorkload(ps.gamma[rowhi] - ps.gamma[rowlo - 1])


def workload_from_rows(ps: PrefixSum2D, collo: int, colhi: int) -> PrefixWorkload:
    if not 1 <= collo <= colhi <= ps.n2:
        raise PartitionError(f"bad column range {collo}..{colhi} for {ps.n2} columns")
    return PrefixWorkload(ps.gamma[:, colhi] - ps.gamma[:, collo - 1])


def chain_lmax(w: Workload1D, borders: Sequence[int]) -> int:
    if isinstance(w, PrefixWorkload):
        return int(kernels.chain_lmax(w.pre, np.asarray(borders, dtype=np.int64)))
    edges = [0, *borders, w.n]
    return max(w.span(a, b) for a, b in zip(edges[:-1], edges[1:]))


def _cuts(w: Workload1D, borders) -> Cuts1D:
    borders = tuple(int(b) for b in borders)
    return Cuts1D(w.n, borders, chain_lmax(w, borders))


def _check_m(m: int) -> None:
    if m < 1:
        raise PartitionError("processor count must be >= 1")


def tighten(borders: Sequence[int], n: int) -> Tuple[int, ...]:
    """Shift borders so every interval is non-empty (requires m <= n).

    Each resulting interval is a sub-interval of an original one or a single
    element, so no interval load grows for a workload monotone by inclusion.
    """
    m = len(borders) + 1
    if m > n:
        raise PartitionError(f"cannot make {m} non-empty intervals out of {n} elements")
    out = list(borders)
    prev = 0
    for t in range(m - 1):
        if out[t] <= prev:
            out[t] = prev + 1
        prev = out[t]
    nxt = n
    for t in range(m - 2, -1, -1):
        if out[t] >= nxt:
            out[t] = nxt - 1
        nxt = out[t]
    return tuple(out)


# --------------------------------------------------------------------------
# heuristics


def direct_cut(w: Workload1D, m: int) -> Cuts1D:
    """Processor t ends at the first prefix reaching t/m of the total load.

    Thresholds are compared exactly (``prefix >= ceil(t * total / m)``).
    Needs an additive workload; k-row workloads cut on their summed rows.
    """
    _check_m(m)
    if not isinstance(w, PrefixWorkload):
        raise PartitionError("direct_cut needs an additive (prefix-array) workload")
    row = w.pre[0] if w.pre.shape[0] == 1 else w.pre.sum(axis=0)
    out = np.zeros(m - 1, dtype=np.int64)
    kernels.direct_cut_borders(np.ascontiguousarray(row), m, out)
    return _cuts(w, out)


def recursive_bisection_1d(w: Workload1D, m: int) -> Cuts1D:
    """Halve the processors, cut where the per-processor loads cross, recurse."""
    _check_m(m)
    borders = [0] * (m - 1)
    stack = [(0, w.n, 0, m)]
    while stack:
        lo, hi, p0, q = stack.pop()
        if q == 1:
            continue
        j = q // 2
        s = _bisect_split(w, lo, hi, j, q - j)
        borders[p0 + j - 1] = s
        stack.append((lo, s, p0, j))
        stack.append((s, hi, p0 + j, q - j))
    return _cuts(w, borders)


def _bisect_split(w: Workload1D, lo: int, hi: int, jl: int, jr: int) -> int:
    # smallest s where left/jl >= right/jr, then compare s-1 and s
    a, b = lo, hi
    while a < b:
        mid = (a + b) // 2
        if w.span(lo, mid) * jr >= w.span(mid, hi) * jl:
            b = mid
        else:
            a = mid + 1
    best = None
    for s in (a - 1, a):
        if s < lo or s > hi:
            continue
        l, r = w.span(lo, s), w.span(s, hi)
        num, den = (l, jl) if l * jr >= r * jl else (r, jr)
        if best is None or num * best[2] < best[1] * den:
            best = (s, num, den)
    return best[0]


# --------------------------------------------------------------------------
# optimal


def dp_optimal_1d(w: Workload1D, m: int) -> Cuts1D:
    """Dynamic program over (elements covered, intervals used).

    ``L[p][j] = min_k max(L[p-1][k], load(k, j))``; the two terms are
    monotone in ``k`` so each minimum is found by binary search. Among the
    optimal partitions the componentwise smallest borders are returned.
    """
    _check_m(m)
    n = w.n

    def first_le(j: int, hi: int, value: int) -> int:
        # smallest k in [0, hi] with load(k, j) <= value (load non-increasing in k)
        lo = 0
        while lo < hi:
            mid = (lo + hi) // 2
            if w.span(mid, j) <= value:
                hi = mid
            else:
                lo = mid + 1
        return lo

    levels = [[w.span(0, j) for j in range(n + 1)]]
    for _p in range(2, m + 1):
        prev = levels[-1]
        cur = [0] * (n + 1)
        for j in range(n + 1):
            # smallest c with prev[c] >= load(c, j); c = j always qualifies
            lo, hi = 0, j
            while lo < hi:
                mid = (lo + hi) // 2
                if prev[mid] >= w.span(mid, j):
                    hi = mid
                else:
                    lo = mid + 1
            c = lo
            cur[j] = min(prev[c], w.span(c - 1, j)) if c >= 1 else prev[c]
        levels.append(cur)
    value = levels[-1][n]
    borders = []
    j = n
    for p in range(m - 1, 0, -1):
        j = first_le(j, j, value)
        assert levels[p - 1][j] <= value
        borders.append(j)
    borders.reverse()
    cuts = _cuts(w, borders)
    assert cuts.lmax == value
    return cuts


def probe(w: Workload1D, m: int, target: int, *, sliced: bool = True) -> Tuple[bool, Cuts1D]:
    """Greedy maximal intervals of load <= target.

    Returns the feasibility flag and the cuts actually produced; when
    infeasible the last interval simply takes what is left.
    """
    _check_m(m)
    if target < 0:
        raise PartitionError("target must be non-negative")
    if isinstance(w, PrefixWorkload):
        out = np.zeros(max(m - 1, 1), dtype=np.int64)
        lo_b = np.zeros(max(m, 1), dtype=np.int64)
        hi_b = np.full(max(m, 1), w.n, dtype=np.int64)
        chunk = _chunk_size(w.n, m) if sliced else 0
        ok = kernels.probe(w.pre, 0, m, int(target), out, lo_b, hi_b, chunk)
        return bool(ok), _cuts(w, out[:m - 1])
    ok, borders = _probe_indexed(lambda t, a, b: w.span(a, b), w.n, 0, 0, m, target, False)
    return ok, _cuts(w, borders)


def _chunk_size(n: int, m: int) -> int:
    return max(1, -(-n // max(m, 1)))


def nicol_plus(w: Workload1D, m: int, *, use_bounds: bool = True) -> Cuts1D:
    """Optimal m-way chain partition.

    Returned borders are the componentwise smallest among optimal solutions
    (right-to-left greedy at the optimal value), so they match
    :func:`dp_optimal_1d` exactly.
    """
    _check_m(m)
    if isinstance(w, PrefixWorkload):
        value = _nicol_prefix(w, m, use_bounds)
        return _canonical(w, m, value)
    value = nicol_value_indexed(lambda t, a, b: w.span(a, b), w.n, m)
    return _canonical(w, m, value)


def _nicol_prefix(w: PrefixWorkload, m: int, use_bounds: bool) -> int:
    pre = w.pre
    if m == 1:
        return w.total
    ub = direct_cut(w, m).lmax
    row_totals = pre[:, -1]
    lb = max(-(-int(row_totals.max()) // m), w.max_task())
    if lb >= ub:
        return ub
    chunk = _chunk_size(w.n, m) if use_bounds else 0
    return int(kernels.nicol(pre, m, lb, ub, use_bounds, chunk))


def _canonical(w: Workload1D, m: int, value: int) -> Cuts1D:
    if isinstance(w, PrefixWorkload):
        out = np.zeros(max(m - 1, 1), dtype=np.int64)
        ok = kernels.reverse_cuts(w.pre, m, value, out)
        borders = out[:m - 1]
    else:
        ok, borders = _reverse_indexed(lambda t, a, b: w.span(a, b), w.n, m, value)
    if not ok:
        raise RuntimeError(f"optimal value {value} is not reachable; search invariant broken")
    cuts = _cuts(w, borders)
    assert cuts.lmax == value, (cuts.lmax, value)
    return cuts


# --------------------------------------------------------------------------
# generic engines over ``span(t, a, b)``: load of positions (a, b] when used
# as interval number t. Homogeneous callers ignore t.

SpanT = Callable[[int, int, int], int]


def _probe_indexed(span: SpanT, n: int, start: int, t0: int, r: int,
                   target: int) -> Tuple[bool, List[int]]:
    """Greedy probe of intervals ``t0 .. t0 + r - 1`` over positions ``(start, n]``."""
    borders = []
    a = start
    for k in range(r - 1):
        t = t0 + k
        lo, hi = a, n
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if span(t, a, mid) <= target:
                lo = mid
            else:
                hi = mid - 1
        borders.append(lo)
        a = lo
    return span(t0 + r - 1, a, n) <= target, borders


def _reverse_indexed(span: SpanT, n: int, m: int, target: int) -> Tuple[bool, List[int]]:
    borders = [0] * (m - 1)
    b = n
    for t in range(m - 1, 0, -1):
        lo, hi = 0, b
        while lo < hi:
            mid = (lo + hi) // 2
            if span(t, mid, b) <= target:
                hi = mid
            else:
                lo = mid + 1
        borders[t - 1] = lo
        b = lo
    return span(0, 0, b) <= target, borders


def nicol_value_indexed(span: SpanT, n: int, m: int, *, lb: int = 0,
                        ub: Optional[int] = None) -> int:
    """Optimal bottleneck value for interval costs ``span(t, a, b)``.

    Each step searches the smallest end ``i`` of the current interval whose
    load is a feasible target for the remaining chain; that load is a
    candidate optimum and the interval ending at ``i - 1`` can be fixed.
    Costs must be monotone by inclusion and zero on empty intervals.
    """
    if ub is None:
        ub = max(span(t, 0, n) for t in range(m))
    best = ub
    i0 = 0
    for p in range(m - 1):
        if best <= lb:
            return best
        r = m - p

        def first_at_least(value):
            if span(p, i0, n) < value:
                return n + 1
            lo, hi = i0, n
            while lo < hi:
                mid = (lo + hi) // 2
                if span(p, i0, mid) >= value:
                    hi = mid
                else:
                    lo = mid + 1
            return lo

        hi = first_at_least(best)
        lo = min(first_at_least(lb), hi)
        while lo < hi:
            mid = (lo + hi) // 2
            target = span(p, i0, mid)
            ok, _ = _probe_indexed(span, n, i0, p, r, target)
            if ok:
                hi = mid
                best = min(best, target)
            else:
                lo = mid + 1
                lb = max(lb, target + 1)
            if best <= lb:
                return best
        if lo == i0 or lo > n:
            return best
        i0 = lo - 1
    return min(best, span(m - 1, i0, n))


def nicol_indexed(span: SpanT, n: int, m: int) -> Tuple[int, List[int]]:
    """Optimal value plus componentwise smallest borders reaching it."""
    value = nicol_value_indexed(span, n, m)
    ok, borders = _reverse_indexed(span, n, m, value)
    if not ok:
        raise RuntimeError(f"optimal value {value} is not reachable; search invariant broken")
    return value, borders


def stripe_sequence_dp(span: SpanT, n: int, m: int) -> Tuple[int, List[int]]:
    """Optimal non-empty intervals when interval t is charged ``span(t, a, b)``.

    Per-interval costs break the monotonicity greedy probing relies on once
    intervals must be non-empty, so this is an exact DP over (interval,
    border), pruned by the monotonicity of each cost in its start.
    Ties keep the smallest border.
    """
    if m > n:
        raise PartitionError(f"cannot make {m} non-empty intervals out of {n} elements")
    inf = None
    f = [inf] * (n + 1)
    for j in range(1, n - m + 2):
        f[j] = span(0, 0, j)
    args: List[List[int]] = []
    for t in range(1, m):
        g = [inf] * (n + 1)
        arg = [0] * (n + 1)
        for j in range(t + 1, n - (m - 1 - t) + 1):
            best, bk = None, 0
            for k in range(j - 1, t - 1, -1):
                c = span(t, k, j)
                if best is not None and c > best:
                    break  # c only grows as k moves left
                if f[k] is None:
                    continue
                v = max(f[k], c)
                if best is None or v <= best:
                    best, bk = v, k
            g[j], arg[j] = best, bk
        args.append(arg)
        f = g
    value = f[n]
    borders = []
    j = n
    for arg in reversed(args):
        j = arg[j]
        borders.append(j)
    borders.reverse()
    return value, borders


# --------------------------------------------------------------------------
# several chains


def _flatten(ws: Sequence[Workload1D]):
    rows = []
    for w in ws:
        if not isinstance(w, PrefixWorkload) or w.pre.shape[0] != 1:
            raise PartitionError("multi-chain partitioning needs plain prefix-array workloads")
        if w.n < 1:
            raise PartitionError("every chain needs at least one element")
        rows.append(w.pre[0])
    offs = np.zeros(len(rows) + 1, dtype=np.int64)
    offs[1:] = np.cumsum([len(r) for r in rows])
    return np.ascontiguousarray(np.concatenate(rows)), offs


def _multi_from_flat(ws, counts, borders, r) -> MultiCuts:
    cuts = []
    pos = 0
    lmax = 0
    for s, w in enumerate(ws):
        c = int(counts[s])
        ends = [int(b) for b in borders[pos:pos + c]]
        pos += c
        cut = _cuts(w, ends[:-1])
        lmax = max(lmax, cut.lmax)
        cuts.append(cut)
    return MultiCuts(tuple(cuts), lmax)


def probe_multi(ws: Sequence[Workload1D], m: int, target: int, *,
                sliced: bool = True) -> Tuple[bool, Optional[MultiCuts]]:
    """Per-chain greedy interval counts; feasible iff they fit in ``m``.

    Spare processors become empty intervals at the end of the last chain.
    Returns ``(False, None)`` when infeasible.
    """
    _check_m(m)
    if not ws:
        raise PartitionError("need at least one chain")
    flat, offs = _flatten(ws)
    counts = np.zeros(len(ws), dtype=np.int64)
    borders = np.zeros(m + 1, dtype=np.int64)
    chunk = 0
    if sliced:
        n = max(w.n for w in ws)
        chunk = max(1, -(-n * len(ws) // m))
    used = kernels.probe_multi(flat, offs, 0, 0, m, int(target), counts, borders, chunk)
    if used < 0:
        return False, None
    return True, _multi_from_flat(ws, counts, borders, m)


def _multi_bounds(ws, m):
    totals = [w.total for w in ws]
    lb = max(-(-sum(totals) // m), max(w.max_task() for w in ws))
    ub = max(totals)
    return lb, ub


def nicol_plus_multi(ws: Sequence[Workload1D], m: int, *, method: str = "nicol") -> MultiCuts:
    """Optimal split of ``m`` processors across several chains.

    ``method="nicol"`` runs the candidate search in probe order;
    ``method="bisect"`` binary searches the integer target with
    :func:`probe_multi`. Both return the same canonical cuts.
    """
    _check_m(m)
    if not ws:
        raise PartitionError("need at least one chain")
    if m < len(ws):
        raise PartitionError(f"{len(ws)} chains need at least as many processors, got {m}")
    lb, ub = _multi_bounds(ws, m)
    flat, offs = _flatten(ws)
    if lb >= ub:
        value = ub
    elif method == "nicol":
        value = int(kernels.nicol_multi(flat, offs, m, lb, ub))
    elif method == "bisect":
        counts = np.zeros(len(ws), dtype=np.int64)
        borders = np.zeros(m + 1, dtype=np.int64)
        lo, hi = lb, ub
        while lo < hi:
            mid = (lo + hi) // 2
            if kernels.probe_multi(flat, offs, 0, 0, m, mid, counts, borders, 0) >= 0:
                hi = mid
            else:
                lo = mid + 1
        value = lo
    else:
        raise ValueError(f"unknown method {method!r}")
    ok, cuts = probe_multi(ws, m, value, sliced=False)
    if not ok:
        raise RuntimeError(f"optimal value {value} is not reachable; search invariant broken")
    return cuts
