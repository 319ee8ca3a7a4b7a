"""Name-based dispatch over every partitioner, shared by the CLI, the
benchmark harness and the hybrid phase-2 step."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence

from .grid import Partition, PartitionError, as_prefix, check_processors
from .hierarchical import HierVariant, hier_opt, hier_rb, hier_relaxed
from .jagged import (Orientation, _round_sqrt, default_stripes, jag_m_alloc, jag_m_heur,
                     jag_m_heur_probe, jag_m_opt, jag_m_probe, jag_pq_heur, jag_pq_opt_dp,
                     jag_pq_opt_nicol)
from .rectilinear import rect_nicol, rect_uniform, uniform_borders


class UsageError(ValueError):
    """Bad or missing algorithm options (as opposed to an infeasible instance)."""


@dataclass(frozen=True)
class Options:
    P: Optional[int] = None
    Q: Optional[int] = None
    orientation: str = "best"
    variant: str = "load"
    min_P: Optional[int] = None
    phase1: str = "hier-relaxed"
    phase2_fast: str = "jag-m-heur-probe"
    phase2_slow: str = "jag-m-opt"
    alloc: Optional[Sequence[int]] = None


@dataclass(frozen=True)
class RunResult:
    partition: Partition
    variant: str
    P: Optional[int]
    Q: Optional[int]
    runtime_ms: float


def grid_shape(m: int, P: Optional[int], Q: Optional[int]):
    """Resolve P x Q = m; without either, m must be a perfect square."""
    if P is not None and Q is not None:
        if P * Q != m:
            raise UsageError(f"P*Q = {P * Q} does not match m = {m}")
        return P, Q
    if P is not None or Q is not None:
        k = P if P is not None else Q
        if k < 1 or m % k:
            raise UsageError(f"{k} does not divide m = {m}; give both P and Q")
        return (k, m // k) if P is not None else (m // k, k)
    r = _round_sqrt(m)
    if r * r != m:
        raise UsageError(f"m = {m} is not a square; P and Q must be specified")
    return r, r


def _pq_algo(fn):
    def run(ps, m, o):
        P, Q = grid_shape(m, o.P, o.Q)
        return fn(ps, P, Q, o.orientation), o.orientation, P, Q
    return run


def _rect(fn):
    def run(ps, m, o):
        P, Q = grid_shape(m, o.P, o.Q)
        if fn is rect_uniform:
            return fn(ps.n1, ps.n2, P, Q), "", P, Q
        return fn(ps, P, Q), "", P, Q
    return run


def _m_heur(fn):
    def run(ps, m, o):
        return fn(ps, m, o.P, o.orientation), o.orientation, o.P, None
    return run


def _m_probe(ps, m, o):
    # fixed stripes for the standalone probe: equal-width ones
    orient = "hor" if o.orientation == "best" else o.orientation
    main_n, aux_n = (ps.n1, ps.n2) if orient == "hor" else (ps.n2, ps.n1)
    P = o.P if o.P is not None else default_stripes(m, main_n, aux_n)
    return jag_m_probe(ps, uniform_borders(main_n, P), m, orient), orient, P, None


def _m_alloc(ps, m, o):
    orient = "hor" if o.orientation == "best" else o.orientation
    main_n, aux_n = (ps.n1, ps.n2) if orient == "hor" else (ps.n2, ps.n1)
    if o.alloc is not None:
        q = [int(v) for v in o.alloc]
        if sum(q) != m:
            raise UsageError(f"allocation {q} sums to {sum(q)}, not m = {m}")
    else:
        P = o.P if o.P is not None else default_stripes(m, main_n, aux_n)
        base, extra = divmod(m, P)
        q = [base + (1 if i < extra else 0) for i in range(P)]
    return jag_m_alloc(ps, q, orient), orient, len(q), None


def _m_opt(ps, m, o):
    return jag_m_opt(ps, m, o.orientation), o.orientation, None, None


def _hier(fn):
    def run(ps, m, o):
        return fn(ps, m, o.variant), o.variant, None, None
    return run


def _hier_opt(ps, m, o):
    return hier_opt(ps, m), "", None, None


def _hybrid(ps, m, o):
    from .hybrid import HybridConfig, hybrid_run, p_sweep
    cfg = HybridConfig(o.P, o.min_P, o.phase1, o.phase2_fast, o.phase2_slow)
    res = hybrid_run(ps, m, cfg) if o.P is not None else p_sweep(ps, m, cfg)
    return res.partition, o.phase1, res.P, None


ALGORITHMS: Dict[str, Callable] = {
    "rect-uniform": _rect(rect_uniform),
    "rect-nicol": _rect(rect_nicol),
    "jag-pq-heur": _pq_algo(jag_pq_heur),
    "jag-pq-opt-nicol": _pq_algo(jag_pq_opt_nicol),
    "jag-pq-opt-dp": _pq_algo(jag_pq_opt_dp),
    "jag-m-heur": _m_heur(jag_m_heur),
    "jag-m-probe": _m_probe,
    "jag-m-alloc": _m_alloc,
    "jag-m-heur-probe": _m_heur(jag_m_heur_probe),
    "jag-m-opt": _m_opt,
    "hier-rb": _hier(hier_rb),
    "hier-relaxed": _hier(hier_relaxed),
    "hier-opt": _hier_opt,
    "hybrid": _hybrid,
}


def run_algorithm(name: str, ps, m: int, options: Options = Options()) -> RunResult:
    """Run ``name`` on ``ps`` with ``m`` processors; time excludes prefix sums."""
    fn = ALGORITHMS.get(name)
    if fn is None:
        raise UsageError(f"unknown algorithm {name!r}")
    ps = as_prefix(ps)
    Orientation.parse(options.orientation)
    HierVariant.parse(options.variant)
    check_processors(ps, m)
    t0 = time.perf_counter()
    out, variant, P, Q = fn(ps, m, options)
    part = out if isinstance(out, Partition) else out.to_partition()
    if P is None:
        P = getattr(out, "P", None)
    if hasattr(out, "orientation"):
        variant = out.orientation.value  # BEST resolves to the orientation it kept
    ms = (time.perf_counter() - t0) * 1000.0
    if part.m != m:
        raise PartitionError(f"{name} produced {part.m} rectangles for m = {m}")
    return RunResult(part, variant, P, Q, ms)
