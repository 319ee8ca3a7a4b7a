"""Load matrices, prefix sums, rectangles and partition metrics.

Rectangles use 1-based inclusive coordinates ``(x1, x2, y1, y2)``; ``x`` runs
over the first dimension (rows) and ``y`` over the second (columns). The
prefix array is padded with a zero row and column so ``gamma[x1 - 1]`` never
needs a special case.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels

INT64_MAX = np.iinfo(np.int64).max


class PartitionError(ValueError):
    """Raised for malformed inputs: bad matrices, rectangles, partitions."""


class InfeasibleError(PartitionError):
    """The requested partition cannot exist (e.g. more processors than cells)."""


class ResourceLimitError(RuntimeError):
    """A configured memory/size cap was exceeded."""


@dataclass(frozen=True)
class LoadMatrix:
    cells: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.cells)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise PartitionError(f"load matrix must be 2D and non-empty, got shape {a.shape}")
        if a.dtype.kind not in "iub":
            if a.dtype.kind == "f" and np.all(np.isfinite(a)) and np.all(a == np.floor(a)):
                pass
            elif a.dtype == object:
                pass
            else:
                raise PartitionError(f"load matrix must hold integers, got dtype {a.dtype}")
        if a.dtype == object or a.dtype == np.uint64:
            # may hold values beyond int64; check before casting
            for (x, y), v in np.ndenumerate(a):
                if int(v) < 0:
                    raise PartitionError(f"negative load {int(v)} at cell ({x + 1}, {y + 1})")
                if int(v) > INT64_MAX:
                    raise PartitionError(f"load {int(v)} at cell ({x + 1}, {y + 1}) exceeds 64-bit range")
            a = np.array([[int(v) for v in row] for row in a], dtype=np.int64)
        else:
            a = a.astype(np.int64)
            neg = np.argwhere(a < 0)
            if len(neg):
                x, y = neg[0]
                raise PartitionError(f"negative load {a[x, y]} at cell ({x + 1}, {y + 1})")
        maxv = int(a.max())
        if maxv and maxv > INT64_MAX // a.size:
            _check_overflow(a)
        a.setflags(write=False)
        object.__setattr__(self, "cells", a)

    @property
    def n1(self) -> int:
        return self.cells.shape[0]

    @property
    def n2(self) -> int:
        return self.cells.shape[1]

    def stats(self) -> "MatrixStats":
        lo = int(self.cells.min())
        hi = int(self.cells.max())
        total = sum(int(v) for v in self.cells.sum(axis=1, dtype=object))
        return MatrixStats(total=total, max_cell=hi, min_cell=lo,
                           delta=Fraction(hi, lo) if lo > 0 else None)

    def __eq__(self, other):
        if not isinstance(other, LoadMatrix):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))


@dataclass(frozen=True)
class MatrixStats:
    total: int
    max_cell: int
    min_cell: int
    delta: Optional[Fraction]  # None when some cell is zero


@dataclass(frozen=True)
class PrefixSum2D:
    gamma: np.ndarray

    @property
    def n1(self) -> int:
        return self.gamma.shape[0] - 1

    @property
    def n2(self) -> int:
        return self.gamma.shape[1] - 1

    @property
    def total(self) -> int:
        return int(self.gamma[-1, -1])

    def transpose(self) -> "PrefixSum2D":
        g = np.ascontiguousarray(self.gamma.T)
        g.setflags(write=False)
        return PrefixSum2D(g)

    def sub(self, r: "Rect") -> "PrefixSum2D":
        """Prefix sums of the sub-matrix covered by ``r``."""
        g = self.gamma[r.x1 - 1:r.x2 + 1, r.y1 - 1:r.y2 + 1]
        g = g - g[0:1, :]
        g = g - g[:, 0:1]
        g = np.ascontiguousarray(g)
        g.setflags(write=False)
        return PrefixSum2D(g)

    def cells(self) -> np.ndarray:
        return np.diff(np.diff(self.gamma, axis=0), axis=1)

    def max_cell(self) -> int:
        return int(self.cells().max())


def build_prefix_sum(matrix: LoadMatrix) -> PrefixSum2D:
    a = matrix.cells  # overflow already ruled out by LoadMatrix
    n1, n2 = a.shape
    g = np.zeros((n1 + 1, n2 + 1), dtype=np.int64)
    np.cumsum(a, axis=0, out=g[1:, 1:])
    np.cumsum(g[1:, 1:], axis=1, out=g[1:, 1:])
    g.setflags(write=False)
    return PrefixSum2D(g)


def _check_overflow(a: np.ndarray) -> None:
    # exact Python-int scan of the prefix sums; only reached when the cheap
    # max * size bound cannot rule out overflow
    n1, n2 = a.shape
    col = [0] * n2
    for x in range(n1):
        run = 0
        for y in range(n2):
            run += int(a[x, y])
            col[y] += run
            if col[y] > INT64_MAX:
                raise PartitionError(
                    f"prefix sum overflows 64-bit accumulator at cell ({x + 1}, {y + 1})")


@dataclass(frozen=True, order=True)
class Rect:
    x1: int
    x2: int
    y1: int
    y2: int

    def __post_init__(self):
        if self.x1 < 1 or self.y1 < 1 or self.x2 < self.x1 or self.y2 < self.y1:
            raise PartitionError(f"invalid rectangle {self.as_tuple()}")

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.x1, self.x2, self.y1, self.y2)

    @property
    def area(self) -> int:
        return (self.x2 - self.x1 + 1) * (self.y2 - self.y1 + 1)

    def transpose(self) -> "Rect":
        return Rect(self.y1, self.y2, self.x1, self.x2)

    def shift(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x1 + dx, self.x2 + dx, self.y1 + dy, self.y2 + dy)

    def intersects(self, other: "Rect") -> bool:
        return (self.x1 <= other.x2 and other.x1 <= self.x2
                and self.y1 <= other.y2 and other.y1 <= self.y2)


@dataclass(frozen=True)
class Partition:
    n1: int
    n2: int
    rects: Tuple[Rect, ...]

    def __post_init__(self):
        object.__setattr__(self, "rects", tuple(self.rects))

    @property
    def m(self) -> int:
        return len(self.rects)

    def as_array(self) -> np.ndarray:
        if not self.rects:
            return np.zeros((0, 4), dtype=np.int64)
        return np.array([r.as_tuple() for r in self.rects], dtype=np.int64)

    def transpose(self) -> "Partition":
        return Partition(self.n2, self.n1, tuple(r.transpose() for r in self.rects))


@dataclass(frozen=True)
class Violation:
    kind: str  # "overlap" | "bounds" | "coverage"
    detail: Tuple[int, ...] = ()
    message: str = ""

    def __str__(self):
        return self.message


@dataclass(frozen=True)
class PartitionStats:
    lmax: int
    lavg: Fraction
    imbalance: Fraction
    loads: Tuple[int, ...] = field(repr=False)
    runtime_ms: float = 0.0

    @property
    def m(self) -> int:
        return len(self.loads)


def rect_load(ps: PrefixSum2D, r: Rect) -> int:
    if r.x2 > ps.n1 or r.y2 > ps.n2:
        raise PartitionError(f"rectangle {r.as_tuple()} outside {ps.n1}x{ps.n2} matrix")
    g = ps.gamma
    return int(g[r.x2, r.y2] - g[r.x1 - 1, r.y2] - g[r.x2, r.y1 - 1] + g[r.x1 - 1, r.y1 - 1])


def validate_partition(p: Partition) -> List[Violation]:
    """Pairwise overlap test plus bounds and area-coverage checks."""
    out: List[Violation] = []
    area = 0
    for i, r in enumerate(p.rects):
        if r.x2 > p.n1 or r.y2 > p.n2:
            out.append(Violation("bounds", (i,), f"out of bounds: rect {i} {r.as_tuple()}"))
        area += r.area
    if p.rects:
        for i, j in kernels.overlap_pairs(p.as_array()):
            out.append(Violation("overlap", (int(i), int(j)), f"overlap: rect {i}, rect {j}"))
    if area != p.n1 * p.n2:
        out.append(Violation("coverage", (area, p.n1 * p.n2),
                             f"coverage: area {area} != {p.n1 * p.n2}"))
    return out


def rect_loads(ps: PrefixSum2D, p: Partition) -> np.ndarray:
    return kernels.rect_loads(ps.gamma, p.as_array())


def evaluate_partition(ps: PrefixSum2D, p: Partition, runtime_ms: float = 0.0) -> PartitionStats:
    if (p.n1, p.n2) != (ps.n1, ps.n2):
        raise PartitionError(f"partition is for {p.n1}x{p.n2}, matrix is {ps.n1}x{ps.n2}")
    bad = validate_partition(p)
    if bad:
        raise PartitionError("invalid partition: " + "; ".join(str(v) for v in bad[:5]))
    loads = tuple(int(v) for v in rect_loads(ps, p))
    lmax = max(loads)
    lavg = Fraction(ps.total, p.m)
    imbalance = (lmax / lavg - 1) if lavg else Fraction(0)
    return PartitionStats(lmax=lmax, lavg=lavg, imbalance=imbalance, loads=loads, runtime_ms=runtime_ms)


def lower_bounds(ps: PrefixSum2D, m: int) -> Tuple[Fraction, int]:
    if m < 1:
        raise PartitionError("processor count must be >= 1")
    return Fraction(ps.total, m), ps.max_cell()


def check_processors(ps: PrefixSum2D, m: int) -> None:
    if m < 1:
        raise PartitionError("processor count must be >= 1")
    if m > ps.n1 * ps.n2:
        raise InfeasibleError(f"m={m} exceeds the {ps.n1 * ps.n2} cells of the matrix")


def partition_lmax(ps: PrefixSum2D, p: Partition) -> int:
    return int(rect_loads(ps, p).max())


def as_prefix(obj) -> PrefixSum2D:
    """Accept a PrefixSum2D, LoadMatrix or array-like."""
    if isinstance(obj, PrefixSum2D):
        return obj
    if isinstance(obj, LoadMatrix):
        return build_prefix_sum(obj)
    return build_prefix_sum(LoadMatrix(np.asarray(obj)))


def stitch(n1: int, n2: int, parts: Sequence[Tuple[Rect, Partition]]) -> Partition:
    """Merge sub-partitions, each given relative to its enclosing rectangle."""
    rects = []
    for outer, sub in parts:
        rects.extend(r.shift(outer.x1 - 1, outer.y1 - 1) for r in sub.rects)
    return Partition(n1, n2, tuple(rects))
