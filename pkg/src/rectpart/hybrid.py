"""Two-phase partitioning.

Phase 1 splits the matrix into P coarse parts, processors are shared out in
proportion to part load, and phase 2 partitions every part on its own. A
cheap ("fast") phase-2 algorithm runs everywhere first; the expensive
("slow") one is then retried on the worst part for as long as it helps.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .grid import (Partition, PartitionError, PrefixSum2D, Rect, as_prefix,
                   check_processors, evaluate_partition, rect_load, stitch)
from .hierarchical import HierVariant, hier_relaxed
from .jagged import _round_sqrt, proportional_counts, row_projection
from .oned import nicol_plus, tighten

PHASE1 = ("hier-relaxed", "jag-m-heur", "jag-m-opt")


@dataclass(frozen=True)
class HybridConfig:
    P: Optional[int] = None          # fixed part count; None means sweep
    min_P: Optional[int] = None      # sweep lower end, default round(sqrt(m))
    phase1: str = "hier-relaxed"
    phase2_fast: str = "jag-m-heur-probe"
    phase2_slow: str = "jag-m-opt"


@dataclass(frozen=True)
class Candidate:
    P: int
    parts: Tuple[Rect, ...]
    alloc: Tuple[int, ...]
    eli: Fraction


@dataclass(frozen=True)
class HybridResult:
    partition: Partition
    P: int
    parts: Tuple[Rect, ...]
    alloc: Tuple[int, ...]
    part_lmax: Tuple[int, ...]
    history: Tuple[int, ...]  # global lmax after the fast pass and after each accepted slow run
    eli: Fraction
    candidates: Tuple[Candidate, ...] = field(default=(), repr=False)

    @property
    def lmax(self) -> int:
        return max(self.part_lmax)


def allocate_processors(part_loads: Sequence[int], m: int,
                        caps: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """Proportional ceiling rule plus greedy leftovers; see :func:`proportional_counts`."""
    return tuple(proportional_counts([int(v) for v in part_loads], m, caps))


def expected_max_load(part_loads: Sequence[int], alloc: Sequence[int]) -> Fraction:
    if len(part_loads) != len(alloc) or not alloc:
        raise PartitionError("loads and allocation must have the same non-zero length")
    return max(Fraction(int(L), int(q)) for L, q in zip(part_loads, alloc))


def expected_li(part_loads: Sequence[int], alloc: Sequence[int], m: Optional[int] = None) -> Fraction:
    """Expected max load over the ideal average, minus one."""
    m = sum(alloc) if m is None else m
    total = sum(int(v) for v in part_loads)
    if total == 0:
        return Fraction(0)
    return expected_max_load(part_loads, alloc) / Fraction(total, m) - 1


def phase1_parts(ps: PrefixSum2D, P: int, phase1: str = "hier-relaxed") -> Tuple[Rect, ...]:
    if phase1 == "hier-relaxed":
        return tuple(hier_relaxed(ps, P, HierVariant.LOAD).leaves())
    if phase1 == "jag-m-heur":
        # the stripes themselves are the parts
        if P > ps.n1:
            raise PartitionError(f"P={P} exceeds the {ps.n1} rows")
        borders = tighten(nicol_plus(row_projection(ps), P).borders, ps.n1)
        edges = (0,) + borders + (ps.n1,)
        return tuple(Rect(edges[i] + 1, edges[i + 1], 1, ps.n2) for i in range(P))
    if phase1 == "jag-m-opt":
        from .jagged import Orientation, jag_m_opt
        return jag_m_opt(ps, P, Orientation.BEST).to_partition().rects
    raise PartitionError(f"unknown phase-1 algorithm {phase1!r}; choose from {', '.join(PHASE1)}")


def _phase2(name: str, sub: PrefixSum2D, q: int) -> Partition:
    from .algorithms import run_algorithm
    return run_algorithm(name, sub, q).partition


def _allocate(ps, parts):
    loads = [rect_load(ps, r) for r in parts]
    return loads, [r.area for r in parts]


def hybrid_run(ps, m: int, cfg: HybridConfig = HybridConfig(), *,
               parts: Optional[Sequence[Rect]] = None) -> HybridResult:
    """Phase 1 with ``cfg.P`` parts, allocation, fast pass, slow refinement."""
    ps = as_prefix(ps)
    check_processors(ps, m)
    P = cfg.P if cfg.P is not None else 1
    if P < 1 or P > m:
        raise PartitionError(f"P={P} must lie in [1, m={m}]")
    if parts is None:
        parts = phase1_parts(ps, P, cfg.phase1)
    parts = tuple(parts)
    loads, caps = _allocate(ps, parts)
    alloc = allocate_processors(loads, m, caps)
    subs = [ps.sub(r) for r in parts]
    sols = [_phase2(cfg.phase2_fast, s, q) for s, q in zip(subs, alloc)]
    lm = [evaluate_partition(s, p).lmax for s, p in zip(subs, sols)]
    history = [max(lm)]
    tried = set()
    while True:
        worst = max(range(len(lm)), key=lambda i: (lm[i], -i))
        if worst in tried:
            break  # the slow algorithm already produced this part's solution
        tried.add(worst)
        cand = _phase2(cfg.phase2_slow, subs[worst], alloc[worst])
        v = evaluate_partition(subs[worst], cand).lmax
        if v >= lm[worst]:
            break
        sols[worst], lm[worst] = cand, v
        history.append(max(lm))
    partition = stitch(ps.n1, ps.n2, list(zip(parts, sols)))
    return HybridResult(partition, len(parts), parts, alloc, tuple(lm), tuple(history),
                        expected_li(loads, alloc, m))


def p_candidates(m: int, min_P: int) -> List[int]:
    """Largest P in [min_P, m // 2] for every distinct value of ceil((m - P) / P)."""
    if min_P < 2:
        raise PartitionError("min_P must be >= 2")
    out = []
    for P in range(min_P, m // 2 + 1):
        if P == m // 2 or -(-(m - P) // P) != -(-(m - P - 1) // (P + 1)):
            out.append(P)
    return out


def p_sweep(ps, m: int, cfg: HybridConfig = HybridConfig()) -> HybridResult:
    """Rank candidate P by expected imbalance; run phase 2 on the best only."""
    ps = as_prefix(ps)
    check_processors(ps, m)
    min_P = cfg.min_P if cfg.min_P is not None else max(2, _round_sqrt(m))
    cands = p_candidates(m, min_P)
    if not cands:
        raise PartitionError(f"no candidate P in [{min_P}, {m // 2}]")
    scored = []
    for P in cands:
        if P > ps.n1 * ps.n2:
            break
        parts = phase1_parts(ps, P, cfg.phase1)
        loads, caps = _allocate(ps, parts)
        alloc = allocate_processors(loads, m, caps)
        scored.append(Candidate(P, parts, alloc, expected_li(loads, alloc, m)))
    if not scored:
        raise PartitionError("no candidate P fits the matrix")
    best = min(scored, key=lambda c: (c.eli, c.P))
    res = hybrid_run(ps, m, HybridConfig(best.P, cfg.min_P, cfg.phase1, cfg.phase2_fast,
                                         cfg.phase2_slow), parts=best.parts)
    return HybridResult(res.partition, res.P, res.parts, res.alloc, res.part_lmax, res.history,
                        res.eli, tuple(scored))
