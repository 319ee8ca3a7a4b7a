"""P x Q grid partitions: uniform area split and iterative refinement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from . import kernels
from .grid import Partition, PartitionError, PrefixSum2D, Rect, as_prefix
from .oned import PrefixWorkload, nicol_plus, tighten


@dataclass(frozen=True)
class RectilinearPartition:
    n1: int
    n2: int
    row_borders: Tuple[int, ...]
    col_borders: Tuple[int, ...]

    @property
    def P(self) -> int:
        return len(self.row_borders) + 1

    @property
    def Q(self) -> int:
        return len(self.col_borders) + 1

    def to_partition(self) -> Partition:
        rows = (0,) + self.row_borders + (self.n1,)
        cols = (0,) + self.col_borders + (self.n2,)
        rects = [Rect(rows[i] + 1, rows[i + 1], cols[j] + 1, cols[j + 1])
                 for i in range(self.P) for j in range(self.Q)]
        return Partition(self.n1, self.n2, tuple(rects))


def _check_pq(n1: int, n2: int, P: int, Q: int) -> None:
    if P < 1 or Q < 1:
        raise PartitionError("P and Q must be >= 1")
    if P > n1:
        raise PartitionError(f"P={P} exceeds the {n1} rows")
    if Q > n2:
        raise PartitionError(f"Q={Q} exceeds the {n2} columns")


def uniform_borders(n: int, parts: int) -> Tuple[int, ...]:
    """Sizes differ by at most one; the leading intervals take the remainder."""
    q, r = divmod(n, parts)
    out = []
    b = 0
    for t in range(parts - 1):
        b += q + (1 if t < r else 0)
        out.append(b)
    return tuple(out)


def rect_uniform(n1: int, n2: int, P: int, Q: int) -> RectilinearPartition:
    _check_pq(n1, n2, P, Q)
    return RectilinearPartition(n1, n2, uniform_borders(n1, P), uniform_borders(n2, Q))


def _stripe_rows(gamma: np.ndarray, borders: Tuple[int, ...], n: int) -> np.ndarray:
    # prefix rows of each stripe along the other axis: gamma[b] - gamma[a]
    edges = np.array((0,) + borders + (n,), dtype=np.int64)
    return np.ascontiguousarray(gamma[edges[1:]] - gamma[edges[:-1]])


def grid_lmax(ps: PrefixSum2D, rows: Tuple[int, ...], cols: Tuple[int, ...]) -> int:
    w = PrefixWorkload(_stripe_rows(ps.gamma, rows, ps.n1))
    return int(kernels.chain_lmax(w.pre, np.asarray(cols, dtype=np.int64)))


def rect_nicol(ps, P: int, Q: int, *, max_iter: int | None = None) -> RectilinearPartition:
    """Alternately re-optimise column then row borders until neither changes.

    With one dimension fixed, the best borders of the other are an optimal
    1D solve whose interval load is the maximum over the fixed stripes, so
    the max load never increases from one iteration to the next.
    """
    ps = as_prefix(ps)
    n1, n2 = ps.n1, ps.n2
    _check_pq(n1, n2, P, Q)
    rows, cols = uniform_borders(n1, P), uniform_borders(n2, Q)
    gt = ps.transpose().gamma
    cap = max_iter if max_iter is not None else n1 * n2
    seen = {(rows, cols)}
    for _ in range(cap):
        wc = PrefixWorkload(_stripe_rows(ps.gamma, rows, n1))
        new_cols = tighten(nicol_plus(wc, Q).borders, n2)
        wr = PrefixWorkload(_stripe_rows(gt, new_cols, n2))
        new_rows = tighten(nicol_plus(wr, P).borders, n1)
        done = (new_rows, new_cols) in seen  # fixed point, or a cycle of equal-load grids
        seen.add((new_rows, new_cols))
        rows, cols = new_rows, new_cols
        if done:
            break
    return RectilinearPartition(n1, n2, rows, cols)
