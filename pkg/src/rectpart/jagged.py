"""Jagged partitions: stripes along a main dimension, each cut independently.

Every algorithm is written for main dimension = rows and run on the
transposed prefix array for the column orientation. ``Orientation.BEST``
runs both and keeps the lower max load (ties keep rows).
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .grid import (InfeasibleError, Partition, PartitionError, PrefixSum2D, Rect,
                   as_prefix, check_processors)
from .oned import (Cuts1D, FunctionWorkload, PrefixWorkload, _nicol_prefix, direct_cut,
                   dp_optimal_1d, nicol_plus, nicol_plus_multi, stripe_sequence_dp,
                   tighten)


class Orientation(enum.Enum):
    HOR = "hor"  # stripes are row ranges
    VER = "ver"  # stripes are column ranges
    BEST = "best"

    @classmethod
    def parse(cls, value) -> "Orientation":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise PartitionError(f"unknown orientation {value!r}") from None


@dataclass(frozen=True)
class JaggedPartition:
    n1: int
    n2: int
    orientation: Orientation
    stripe_borders: Tuple[int, ...]
    stripe_cuts: Tuple[Cuts1D, ...]

    @property
    def P(self) -> int:
        return len(self.stripe_borders) + 1

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(c.m for c in self.stripe_cuts)

    @property
    def m(self) -> int:
        return sum(self.counts)

    @property
    def lmax(self) -> int:
        return max(c.lmax for c in self.stripe_cuts)

    def to_partition(self) -> Partition:
        main_n = self.n1 if self.orientation is Orientation.HOR else self.n2
        edges = (0,) + self.stripe_borders + (main_n,)
        rects = []
        for s, cuts in enumerate(self.stripe_cuts):
            for c, d in cuts.bounds():
                r = Rect(edges[s] + 1, edges[s + 1], c + 1, d)
                rects.append(r if self.orientation is Orientation.HOR else r.transpose())
        return Partition(self.n1, self.n2, tuple(rects))


# ---------------------------------------------------------------------------
# shared pieces (main dimension = rows of ``ps``)


class StripeCosts:
    """Memoised optimal q-way load of row stripes ``(a, b]`` of a prefix array."""

    def __init__(self, ps: PrefixSum2D):
        self.ps = ps
        self.g = ps.gamma
        self._exact: Dict[Tuple[int, int, int], int] = {}
        self._ub: Dict[Tuple[int, int, int], int] = {}

    def row(self, a: int, b: int) -> np.ndarray:
        return np.ascontiguousarray(self.g[b] - self.g[a])

    def load(self, a: int, b: int) -> int:
        return int(self.g[b, -1] - self.g[a, -1])

    def value(self, a: int, b: int, q: int) -> int:
        if a >= b:
            return 0
        q = min(q, self.ps.n2)  # more processors than columns cannot help
        key = (a, b, q)
        v = self._exact.get(key)
        if v is None:
            v = self._exact[key] = _nicol_prefix(PrefixWorkload(self.row(a, b)), q, True)
        return v

    def lower(self, a: int, b: int, q: int) -> int:
        q = min(q, self.ps.n2)
        return -(-self.load(a, b) // q)

    def upper(self, a: int, b: int, q: int) -> int:
        q = min(q, self.ps.n2)
        key = (a, b, q)
        v = self._exact.get(key)
        if v is not None:
            return v
        v = self._ub.get(key)
        if v is None:
            v = self._ub[key] = direct_cut(PrefixWorkload(self.row(a, b)), q).lmax
        return v

    def at_most(self, a: int, b: int, q: int, bound: int) -> bool:
        """``value(a, b, q) <= bound``, deciding by cheap bounds when possible."""
        if a >= b:
            return bound >= 0
        if self.lower(a, b, q) > bound:
            return False
        if self.upper(a, b, q) <= bound:
            return True
        return self.value(a, b, q) <= bound

    def cuts(self, a: int, b: int, q: int) -> Cuts1D:
        if q > self.ps.n2:
            raise InfeasibleError(f"{q} processors cannot cut a stripe of {self.ps.n2} columns")
        w = PrefixWorkload(self.row(a, b))
        borders = tighten(nicol_plus(w, q).borders, self.ps.n2)
        return Cuts1D(self.ps.n2, borders, int(kernels.chain_lmax(w.pre, np.asarray(borders, dtype=np.int64))))


def row_projection(ps: PrefixSum2D) -> PrefixWorkload:
    return PrefixWorkload(np.ascontiguousarray(ps.gamma[:, -1]))


def _check_stripes(borders: Sequence[int], n: int) -> Tuple[int, ...]:
    borders = tuple(int(b) for b in borders)
    edges = (0,) + borders + (n,)
    if any(edges[i] >= edges[i + 1] for i in range(len(edges) - 1)):
        raise PartitionError(f"stripe borders {borders} must be strictly increasing inside (0, {n})")
    return borders


def _oriented(ps, orientation, solve: Callable[[PrefixSum2D], Tuple[Tuple[int, ...], List[Cuts1D]]]
              ) -> JaggedPartition:
    ps = as_prefix(ps)
    o = Orientation.parse(orientation)
    if o is Orientation.BEST:
        hor = _oriented(ps, Orientation.HOR, solve)
        try:
            ver = _oriented(ps, Orientation.VER, solve)
        except PartitionError:
            return hor
        return ver if ver.lmax < hor.lmax else hor
    main = ps if o is Orientation.HOR else ps.transpose()
    borders, cuts = solve(main)
    return JaggedPartition(ps.n1, ps.n2, o, tuple(borders), tuple(cuts))


def _round_sqrt(m: int) -> int:
    r = math.isqrt(m)
    return r + 1 if m - r * r > r else r  # round half up; sqrt(m) is never exactly r + 1/2


def default_stripes(m: int, n1: int, n2: int) -> int:
    """round(sqrt(m)) clamped to [1, min(n1, m)], raised so P * n2 >= m when possible."""
    hi = max(1, min(n1, m))
    P = min(max(_round_sqrt(m), 1), hi)
    need = -(-m // n2)
    return min(max(P, need), hi)


def proportional_counts(loads: Sequence[int], m: int,
                        caps: Optional[Sequence[int]] = None) -> List[int]:
    """Ceiling rule over ``m - P`` processors, at least one each, then leftovers.

    Leftover processors go one at a time to the part with the largest
    load-per-processor (ties to the lowest index). ``caps`` bounds each count.
    """
    P = len(loads)
    if P < 1:
        raise PartitionError("need at least one part")
    if P > m:
        raise PartitionError(f"{P} parts need at least as many processors, got m={m}")
    total = sum(loads)
    free = m - P
    counts = [max(1, -(-free * int(L) // total)) if total else 1 for L in loads]
    if caps is not None:
        if sum(caps) < m:
            raise InfeasibleError(f"parts can hold at most {sum(caps)} processors, m={m}")
        counts = [min(c, k) for c, k in zip(counts, caps)]
    left = m - sum(counts)
    heap = [(-Fraction(int(L), c), i) for i, (L, c) in enumerate(zip(loads, counts))
            if caps is None or c < caps[i]]
    heapq.heapify(heap)
    while left > 0:
        _, i = heapq.heappop(heap)
        counts[i] += 1
        left -= 1
        if caps is None or counts[i] < caps[i]:
            heapq.heappush(heap, (-Fraction(int(loads[i]), counts[i]), i))
    return counts


def _settle(costs: StripeCosts, borders: Tuple[int, ...], counts: List[int], m: int
            ) -> Tuple[Tuple[int, ...], List[Cuts1D]]:
    """Turn stripes plus processor counts into a valid jagged partition of m.

    Counts above the column count are clipped (the extra processors cannot
    lower that stripe's load) and all spare processors are handed to the
    currently worst stripe that can still take one. Only if every stripe is
    full is a stripe split, its last row becoming a new stripe.
    """
    n1, n2 = costs.ps.n1, costs.ps.n2
    if m > n1 * n2:
        raise InfeasibleError(f"m={m} exceeds the {n1 * n2} cells of the matrix")
    edges = [0, *borders, n1]
    counts = [min(c, n2) for c in counts]
    spare = m - sum(counts)
    if spare < 0:
        raise PartitionError("processor counts exceed m")
    while spare > 0:
        open_ = [s for s in range(len(counts)) if counts[s] < n2]
        if not open_:
            s = max(range(len(counts)), key=lambda t: (edges[t + 1] - edges[t], -t))
            if edges[s + 1] - edges[s] < 2:
                raise InfeasibleError(f"m={m} exceeds the cells of the matrix")
            take = min(spare, n2)
            edges.insert(s + 1, edges[s + 1] - 1)
            counts.insert(s + 1, take)
            spare -= take
            continue
        # one at a time to the worst stripe with room
        vals = {s: costs.value(edges[s], edges[s + 1], counts[s]) for s in open_}
        heap = [(-vals[s], s) for s in open_]
        heapq.heapify(heap)
        while spare > 0 and heap:
            _, s = heapq.heappop(heap)
            counts[s] += 1
            spare -= 1
            if counts[s] < n2:
                heapq.heappush(heap, (-costs.value(edges[s], edges[s + 1], counts[s]), s))
    cuts = [costs.cuts(edges[s], edges[s + 1], counts[s]) for s in range(len(counts))]
    return tuple(edges[1:-1]), cuts


# ---------------------------------------------------------------------------
# P x Q-way


def _pq_checks(ps: PrefixSum2D, P: int, Q: int) -> None:
    if P < 1 or Q < 1:
        raise PartitionError("P and Q must be >= 1")
    if P > ps.n1:
        raise PartitionError(f"P={P} exceeds the {ps.n1} stripes available on the main dimension")
    if Q > ps.n2:
        raise InfeasibleError(f"Q={Q} exceeds the {ps.n2} positions of the auxiliary dimension")


def _uniform_cuts(costs: StripeCosts, borders, Q):
    edges = (0,) + tuple(borders) + (costs.ps.n1,)
    return [costs.cuts(edges[s], edges[s + 1], Q) for s in range(len(edges) - 1)]


def jag_pq_heur(ps, P: int, Q: int, orientation=Orientation.HOR) -> JaggedPartition:
    """Optimal stripes of the projection, then an optimal Q-way cut per stripe."""
    def solve(main):
        _pq_checks(main, P, Q)
        borders = tighten(nicol_plus(row_projection(main), P).borders, main.n1)
        return borders, _uniform_cuts(StripeCosts(main), borders, Q)
    return _oriented(ps, orientation, solve)


def _pq_opt(ps, P, Q, orientation, engine):
    def solve(main):
        _pq_checks(main, P, Q)
        costs = StripeCosts(main)
        w = FunctionWorkload(main.n1, lambda a, b: costs.value(a, b, Q))
        borders = tighten(engine(w, P).borders, main.n1)
        return borders, _uniform_cuts(costs, borders, Q)
    return _oriented(ps, orientation, solve)


def jag_pq_opt_nicol(ps, P: int, Q: int, orientation=Orientation.HOR) -> JaggedPartition:
    """Optimal P x Q jagged partition: chain partitioning of the rows where a
    stripe costs its optimal Q-way load."""
    return _pq_opt(ps, P, Q, orientation, nicol_plus)


def jag_pq_opt_dp(ps, P: int, Q: int, orientation=Orientation.HOR) -> JaggedPartition:
    """Same optimum as :func:`jag_pq_opt_nicol`, reached by dynamic programming."""
    return _pq_opt(ps, P, Q, orientation, dp_optimal_1d)


# ---------------------------------------------------------------------------
# m-way


def _m_checks(main: PrefixSum2D, m: int, P: int) -> None:
    check_processors(main, m)
    if P < 1:
        raise PartitionError("P must be >= 1")
    if P > main.n1:
        raise PartitionError(f"P={P} exceeds the {main.n1} stripes available on the main dimension")
    if P > m:
        raise PartitionError(f"P={P} exceeds m={m}")
    if m > P * main.n2:
        raise InfeasibleError(f"m={m} does not fit in {P} stripes of {main.n2} cells")


def _heur_stripes(main: PrefixSum2D, m: int, P: Optional[int]):
    if P is None:
        P = default_stripes(m, main.n1, main.n2)
    _m_checks(main, m, P)
    borders = tighten(nicol_plus(row_projection(main), P).borders, main.n1)
    return borders


def jag_m_heur(ps, m: int, P: Optional[int] = None, orientation=Orientation.HOR) -> JaggedPartition:
    """Optimal P stripes of the projection; processors shared by stripe load."""
    def solve(main):
        borders = _heur_stripes(main, m, P)
        costs = StripeCosts(main)
        edges = (0,) + borders + (main.n1,)
        loads = [costs.load(edges[s], edges[s + 1]) for s in range(len(edges) - 1)]
        counts = proportional_counts(loads, m, [main.n2] * len(loads))
        return borders, [costs.cuts(edges[s], edges[s + 1], counts[s]) for s in range(len(counts))]
    return _oriented(ps, orientation, solve)


def _probe_stripes(main: PrefixSum2D, borders: Tuple[int, ...], m: int):
    borders = _check_stripes(borders, main.n1)
    P = len(borders) + 1
    if m < P:
        raise PartitionError(f"{P} stripes need at least as many processors, got m={m}")
    check_processors(main, m)
    costs = StripeCosts(main)
    edges = (0,) + borders + (main.n1,)
    ws = [PrefixWorkload(costs.row(edges[s], edges[s + 1])) for s in range(P)]
    mc = nicol_plus_multi(ws, m)
    return _settle(costs, borders, list(mc.counts), m)


def jag_m_probe(ps, stripe_borders: Sequence[int], m: int,
                orientation=Orientation.HOR) -> JaggedPartition:
    """Best processor split and cuts for fixed stripes (multi-chain optimum)."""
    o = Orientation.parse(orientation)
    if o is Orientation.BEST:
        raise PartitionError("fixed stripe borders need an explicit orientation")
    return _oriented(ps, o, lambda main: _probe_stripes(main, stripe_borders, m))


def jag_m_heur_probe(ps, m: int, P: Optional[int] = None,
                     orientation=Orientation.HOR) -> JaggedPartition:
    """Stripes of :func:`jag_m_heur`, processors and cuts from the multi-chain optimum."""
    return _oriented(ps, orientation,
                     lambda main: _probe_stripes(main, _heur_stripes(main, m, P), m))


def jag_m_alloc(ps, q: Sequence[int], orientation=Orientation.HOR) -> JaggedPartition:
    """Best stripe borders when stripe t must receive exactly ``q[t]`` processors."""
    q = [int(v) for v in q]

    def solve(main):
        P = len(q)
        if P < 1 or any(v < 1 for v in q):
            raise PartitionError("every stripe needs at least one processor")
        if P > main.n1:
            raise PartitionError(f"{P} stripes exceed the {main.n1} positions of the main dimension")
        if any(v > main.n2 for v in q):
            raise InfeasibleError(f"a stripe cannot hold more than {main.n2} processors")
        costs = StripeCosts(main)
        _, borders = stripe_sequence_dp(lambda t, a, b: costs.value(a, b, q[t]), main.n1, P)
        edges = (0, *borders, main.n1)
        return tuple(borders), [costs.cuts(edges[s], edges[s + 1], q[s]) for s in range(P)]
    return _oriented(ps, orientation, solve)


def jag_m_opt(ps, m: int, orientation=Orientation.HOR) -> JaggedPartition:
    """Optimal m-way jagged partition.

    Table ``L[k][x]``: best max load of the first ``k`` rows on at most ``x``
    processors. The last stripe starts at ``k'`` and takes ``y`` processors;
    for fixed ``y`` the two terms are monotone in ``k'`` in opposite
    directions, so a binary search finds the crossover. Stripe costs are
    compared through cheap lower/upper bounds first and solved exactly only
    when the bounds straddle. Values are capped at the heuristic incumbent,
    which is returned unchanged when nothing beats it.
    """
    def solve(main):
        check_processors(main, m)
        n, n2 = main.n1, main.n2
        inc_borders, inc_cuts = _probe_stripes(main, _heur_stripes(main, m, None), m)
        U = max(c.lmax for c in inc_cuts)
        costs = StripeCosts(main)
        L = [[0] * (m + 1)]
        choice: List[List[Tuple[int, int]]] = [[(0, 0)] * (m + 1)]
        for k in range(1, n + 1):
            row = [U] * (m + 1)
            arg = [(-1, 0)] * (m + 1)
            for x in range(1, m + 1):
                best, pick = U, (-1, 0)
                for y in range(1, min(x, n2) + 1):
                    r = x - y
                    if r == 0:
                        if costs.lower(0, k, y) < best:
                            v = costs.value(0, k, y)
                            if v < best:
                                best, pick = v, (0, y)
                        continue
                    # smallest c in [0, k-1] with cost(c, k, y) <= L[c][r]
                    lo, hi = 0, k
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if costs.at_most(mid, k, y, L[mid][r]):
                            hi = mid
                        else:
                            lo = mid + 1
                    c = lo
                    if c < k and L[c][r] < best:
                        best, pick = L[c][r], (c, y)
                    if c >= 1 and costs.lower(c - 1, k, y) < best:
                        v = costs.value(c - 1, k, y)
                        if v < best:
                            best, pick = v, (c - 1, y)
                row[x], arg[x] = best, pick
            L.append(row)
            choice.append(arg)
        if L[n][m] >= U:
            return inc_borders, inc_cuts
        stripes = []
        k, x = n, m
        while k > 0:
            c, y = choice[k][x]
            stripes.append((c, k, y))
            k, x = c, x - y
        stripes.reverse()
        borders = tuple(s[1] for s in stripes[:-1])
        return _settle(costs, borders, [s[2] for s in stripes], m)
    return _oriented(ps, orientation, solve)


# ---------------------------------------------------------------------------
# worst-case bounds for strictly positive matrices (all exact rationals)


def direct_cut_bound(total: int, m: int, n: int, delta) -> Fraction:
    """Max-load bound of DirectCut on a positive array of length n."""
    return Fraction(total, m) * (1 + Fraction(delta) * m / n)


def pq_heur_bound(delta, P: int, Q: int, n1: int, n2: int) -> Fraction:
    """Imbalance bound of jag_pq_heur."""
    d = Fraction(delta)
    return (1 + d * P / n1) * (1 + d * Q / n2) - 1


def pq_ratio(P, m: int, n1: int, n2: int, delta) -> Fraction:
    """Approximation ratio of jag_pq_heur as a function of P (Q = m / P)."""
    d, P = Fraction(delta), Fraction(P)
    return (1 + d / n1 * P) * (1 + d * m / n2 / P)


def pq_best_stripes(m: int, n1: int, n2: int) -> float:
    """Real minimiser of :func:`pq_ratio`: sqrt(m * n1 / n2)."""
    return math.sqrt(m * n1 / n2)


def m_heur_ratio(P, m: int, n1: int, n2: int, delta) -> Fraction:
    """Approximation ratio of jag_m_heur as a function of P."""
    d, P = Fraction(delta), Fraction(P)
    return Fraction(m) / (m - P) + m * d / (P * n2) + d * d * m / (n1 * n2)


def m_heur_bound(delta, m: int, P: int, n1: int, n2: int) -> Fraction:
    """Imbalance bound of jag_m_heur."""
    return m_heur_ratio(P, m, n1, n2, delta) - 1


def m_heur_best_stripes(m: int, n2: int, delta) -> float:
    """Real minimiser of :func:`m_heur_ratio`.

    Positive root of ``(n2 - d) P^2 + 2 m d P - d m^2 = 0``, written in the
    form that stays valid when ``d >= n2``: ``m sqrt(d) / (sqrt(n2) + sqrt(d))``.
    """
    d = float(delta)
    return m * math.sqrt(d) / (math.sqrt(n2) + math.sqrt(d))


def m_heur_best_stripes_exact(m: int, n2: int, delta) -> Optional[Fraction]:
    """Exact minimiser when ``d * n2`` is a rational square, else None."""
    d = Fraction(delta)
    num, den = d.numerator * n2, d.denominator
    # sqrt(d * n2) rational iff num * den is a perfect square
    s = math.isqrt(num * den)
    if s * s != num * den:
        return None
    root = Fraction(s, den)  # sqrt(d * n2)
    if d == n2:
        return Fraction(m, 2)
    return m * (root - d) / (n2 - d)
