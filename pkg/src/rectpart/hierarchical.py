"""Recursive bipartition: load-halving RB variants, the average-load
relaxation, and the exact dynamic program for tiny instances."""
from __future__ import annotations

import enum
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from . import kernels
from ._jit import pure_kernels
from .grid import (InfeasibleError, Partition, PartitionError, PrefixSum2D, Rect,
                   ResourceLimitError, as_prefix, check_processors)

# kernels multiply loads by processor counts; past this the int64 path is unsafe
_SAFE_PRODUCT = 1 << 62


class HierVariant(enum.Enum):
    LOAD = "load"  # try both axes, keep the lower estimate
    DIST = "dist"  # cut across the longer side
    HOR = "hor"    # alternate by depth, rows first
    VER = "ver"    # alternate by depth, columns first

    @classmethod
    def parse(cls, value) -> "HierVariant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise PartitionError(f"unknown variant {value!r}") from None


@dataclass(frozen=True)
class Leaf:
    rect: Rect


@dataclass(frozen=True)
class Node:
    rect: Rect
    axis: int  # 0: cut between rows, 1: cut between columns
    cut: int   # last index on the left/top side
    left: "Tree"
    right: "Tree"


Tree = Union[Leaf, Node]


@dataclass(frozen=True)
class BisectionTree:
    n1: int
    n2: int
    root: Tree

    def leaves(self) -> Iterator[Rect]:
        stack = [self.root]
        while stack:
            t = stack.pop()
            if isinstance(t, Leaf):
                yield t.rect
            else:
                stack.append(t.right)
                stack.append(t.left)

    @property
    def m(self) -> int:
        return sum(1 for _ in self.leaves())

    def to_partition(self) -> Partition:
        return Partition(self.n1, self.n2, tuple(self.leaves()))


def _split(r: Rect, axis: int, cut: int) -> Tuple[Rect, Rect]:
    if axis == 0:
        return Rect(r.x1, cut, r.y1, r.y2), Rect(cut + 1, r.x2, r.y1, r.y2)
    return Rect(r.x1, r.x2, r.y1, cut), Rect(r.x1, r.x2, cut + 1, r.y2)


def _length(r: Rect, axis: int) -> int:
    return r.x2 - r.x1 + 1 if axis == 0 else r.y2 - r.y1 + 1


def _kernel(ps: PrefixSum2D, m: int, fn):
    """The compiled kernel, or its Python body on exact integers when the
    products of loads and processor counts could overflow int64."""
    if ps.total * max(m, 1) < _SAFE_PRODUCT:
        return fn, ps.gamma
    return getattr(pure_kernels(), fn.__name__), ps.gamma.astype(object)


def _cut_window(r: Rect, axis: int, jl: int, jr: int) -> Tuple[int, int]:
    # cuts leaving at least jl cells on the left and jr on the right
    length = _length(r, axis)
    width = r.area // length
    kmin = -(-jl // width)
    kmax = length - -(-jr // width)
    start = r.x1 if axis == 0 else r.y1
    return start + kmin - 1, start + kmax - 1


def _axes(variant: HierVariant, r: Rect, depth: int) -> List[int]:
    if variant is HierVariant.LOAD:
        order = [0, 1]
    elif variant is HierVariant.DIST:
        order = [0, 1] if _length(r, 0) >= _length(r, 1) else [1, 0]
    else:
        first = depth % 2 if variant is HierVariant.HOR else 1 - depth % 2
        order = [first, 1 - first]
    return order


class _Builder:
    def __init__(self, ps: PrefixSum2D, m: int):
        check_processors(ps, m)
        self.ps = ps
        self.bisect, self.g_bisect = _kernel(ps, m, kernels.bisect_cut)
        self.scan, self.g_scan = _kernel(ps, m, kernels.relaxed_scan)

    def rb_option(self, r: Rect, m: int, axis: int):
        """Best (value, cut, jl) on one axis with jl = m // 2 or m - m // 2.

        Falls back to the split closest to the middle that the cell counts
        allow when neither half-split fits.
        """
        if _length(r, axis) < 2:
            return None
        half = m // 2
        for dist in range(0, m):
            best = None
            for jl in sorted({half - dist, m - half + dist} if dist else {half, m - half}):
                jr = m - jl
                if jl < 1 or jr < 1:
                    continue
                lo, hi = _cut_window(r, axis, jl, jr)
                if lo > hi:
                    continue
                c, num, den = self.bisect(self.g_bisect, r.x1, r.x2, r.y1, r.y2, axis, jl, jr, lo, hi)
                val = Fraction(int(num), int(den))
                if best is None or val < best[0]:
                    best = (val, int(c), jl)
            if best is not None:
                return best
        return None

    def relaxed_option(self, r: Rect, m: int, axis: int):
        if _length(r, axis) < 2:
            return None
        c, j, num, den = self.scan(self.g_scan, r.x1, r.x2, r.y1, r.y2, m, axis)
        if c < 0:
            return None
        return Fraction(int(num), int(den)), int(c), int(j)

    def build(self, variant: HierVariant, m: int, relaxed: bool) -> Tree:
        option = self.relaxed_option if relaxed else self.rb_option
        root_holder: List[Optional[Tree]] = [None]
        # iterative post-order so deep trees do not hit the recursion limit
        stack = [(Rect(1, self.ps.n1, 1, self.ps.n2), m, 0, root_holder, 0)]
        pending: List[tuple] = []
        while stack:
            r, q, depth, holder, slot = stack.pop()
            if q == 1:
                holder[slot] = Leaf(r)
                continue
            if r.area < q:
                raise InfeasibleError(f"{q} processors exceed the {r.area} cells of {r.as_tuple()}")
            choice = None
            axes = _axes(variant, r, depth)
            tries = axes if variant is HierVariant.LOAD else axes[:1]
            for axis in tries:
                opt = option(r, q, axis)
                if opt is not None and (choice is None or opt[0] < choice[0][0]):
                    choice = (opt, axis)
            if choice is None:
                for axis in axes[1:]:
                    opt = option(r, q, axis)
                    if opt is not None:
                        choice = (opt, axis)
                        break
            if choice is None:
                raise InfeasibleError(f"cannot split {r.as_tuple()} for {q} processors")
            (_, cut, jl), axis = choice
            lr, rr = _split(r, axis, cut)
            kids: List[Optional[Tree]] = [None, None]
            pending.append((holder, slot, r, axis, cut, kids))
            stack.append((rr, q - jl, depth + 1, kids, 1))
            stack.append((lr, jl, depth + 1, kids, 0))
        for holder, slot, r, axis, cut, kids in reversed(pending):
            holder[slot] = Node(r, axis, cut, kids[0], kids[1])
        return root_holder[0]


def hier_rb(ps, m: int, variant=HierVariant.LOAD) -> BisectionTree:
    """Halve the processors at every node and cut where the per-processor
    loads of the two sides balance; an odd extra processor goes to
    whichever side gives the lower estimate."""
    ps = as_prefix(ps)
    root = _Builder(ps, m).build(HierVariant.parse(variant), m, relaxed=False)
    return BisectionTree(ps.n1, ps.n2, root)


def hier_relaxed(ps, m: int, variant=HierVariant.LOAD) -> BisectionTree:
    """Pick cut and processor split together, scoring each side by its
    average load per processor instead of recursing."""
    ps = as_prefix(ps)
    root = _Builder(ps, m).build(HierVariant.parse(variant), m, relaxed=True)
    return BisectionTree(ps.n1, ps.n2, root)


DEFAULT_MEMO_CAP = 2_000_000


def hier_opt(ps, m: int, *, memo_cap: int = DEFAULT_MEMO_CAP) -> BisectionTree:
    """Optimal recursive bipartition by memoised recursion.

    The memo is keyed by (rectangle, processors) and can reach
    ``n1^2 * n2^2 * m / 4`` entries, so this is for small matrices only;
    ``memo_cap`` turns runaway growth into :class:`ResourceLimitError`.
    For a fixed axis and split ``j`` the left optimum grows with the cut and
    the right one shrinks, so each (axis, j) pair needs a binary search
    rather than a scan.
    """
    ps = as_prefix(ps)
    check_processors(ps, m)
    g = ps.gamma if ps.total < _SAFE_PRODUCT else ps.gamma.astype(object)
    memo: Dict[Tuple[int, int, int, int, int], Tuple[int, Optional[tuple]]] = {}

    def load(x1, x2, y1, y2):
        return int(g[x2, y2] - g[x1 - 1, y2] - g[x2, y1 - 1] + g[x1 - 1, y1 - 1])

    def solve(x1, x2, y1, y2, q) -> int:
        key = (x1, x2, y1, y2, q)
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        if q == 1:
            memo[key] = (load(x1, x2, y1, y2), None)
            return memo[key][0]
        if len(memo) >= memo_cap:
            raise ResourceLimitError(f"hier_opt memo exceeded {memo_cap} entries")
        r = Rect(x1, x2, y1, y2)
        best, arg = None, None
        for axis in (0, 1):
            if _length(r, axis) < 2:
                continue
            for jl in range(1, q):
                lo, hi = _cut_window(r, axis, jl, q - jl)
                if lo > hi:
                    continue

                def sides(c):
                    a, b = _split(r, axis, c)
                    return (solve(a.x1, a.x2, a.y1, a.y2, jl),
                            solve(b.x1, b.x2, b.y1, b.y2, q - jl))

                # smallest c with left >= right
                a, b = lo, hi
                while a < b:
                    mid = (a + b) // 2
                    lv, rv = sides(mid)
                    if lv >= rv:
                        b = mid
                    else:
                        a = mid + 1
                for c in (a - 1, a):
                    if lo <= c <= hi:
                        v = max(sides(c))
                        if best is None or v < best:
                            best, arg = v, (axis, c, jl)
        memo[key] = (best, arg)
        return best

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10_000))
    try:
        solve(1, ps.n1, 1, ps.n2, m)
    finally:
        sys.setrecursionlimit(limit)

    def build(r: Rect, q: int) -> Tree:
        _, arg = memo[(r.x1, r.x2, r.y1, r.y2, q)]
        if arg is None:
            return Leaf(r)
        axis, c, jl = arg
        a, b = _split(r, axis, c)
        return Node(r, axis, c, build(a, jl), build(b, q - jl))

    return BisectionTree(ps.n1, ps.n2, build(Rect(1, ps.n1, 1, ps.n2), m))
