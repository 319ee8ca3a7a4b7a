from fractions import Fraction

import numpy as np
import pytest

from rectpart import (HybridConfig, LoadMatrix, PartitionError, allocate_processors,
                      build_prefix_sum, evaluate_partition, expected_li, expected_max_load,
                      hybrid_run, p_candidates, p_sweep, rect_load, run_algorithm,
                      validate_partition)
from rectpart.hybrid import PHASE1, phase1_parts

import oracles


def ps_of(a):
    return build_prefix_sum(LoadMatrix(np.asarray(a)))


def test_allocation_examples():
    assert allocate_processors([60, 40], 6) == (4, 2)
    assert allocate_processors([50, 30, 20], 10) == (5, 3, 2)
    assert allocate_processors([7, 7, 7, 7], 12) == (3, 3, 3, 3)
    assert allocate_processors([0, 10], 3) == (1, 2)
    with pytest.raises(PartitionError):
        allocate_processors([1, 1, 1], 2)


def test_expected_load_examples():
    assert expected_max_load([60, 40], [4, 2]) == 20
    assert expected_li([60, 40], [4, 2], 6) == Fraction(1, 5)
    assert expected_max_load([90], [9]) == 10 and expected_li([90], [9]) == 0
    assert expected_li([30, 30], [3, 3]) == 0
    rng = np.random.default_rng(31)
    for _ in range(50):
        loads = [int(v) for v in rng.integers(0, 100, size=4)]
        m = int(rng.integers(4, 30))
        assert expected_li(loads, allocate_processors(loads, m), m) >= 0


def test_candidates_examples():
    assert p_candidates(12, 2) == [2, 3, 5, 6]
    assert p_candidates(4, 2) == [2]
    assert p_candidates(5, 3) == []
    for m in (12, 16, 100, 512, 1000):
        for lo in (2, 3, 7):
            assert p_candidates(m, lo) == oracles.p_candidates_naive(m, lo)
    with pytest.raises(PartitionError):
        p_candidates(12, 1)


def test_sweep_empty_candidate_set():
    ps = ps_of(np.ones((4, 4), dtype=int))
    with pytest.raises(PartitionError):
        p_sweep(ps, 5, HybridConfig(min_P=3))


def test_symmetric_instance():
    ps = ps_of(np.ones((4, 4), dtype=int))
    res = hybrid_run(ps, 4, HybridConfig(P=2))
    assert evaluate_partition(ps, res.partition).imbalance == 0


def test_single_part_is_plain_phase2():
    rng = np.random.default_rng(32)
    a = rng.integers(0, 50, size=(6, 7))
    ps = ps_of(a)
    res = hybrid_run(ps, 5, HybridConfig(P=1))
    fast = run_algorithm("jag-m-heur-probe", ps, 5).partition
    slow = run_algorithm("jag-m-opt", ps, 5).partition
    assert res.history[0] == evaluate_partition(ps, fast).lmax
    assert res.lmax == min(evaluate_partition(ps, fast).lmax, evaluate_partition(ps, slow).lmax)


def check_result(ps, res, m):
    p = res.partition
    assert validate_partition(p) == [] and p.m == m
    st = evaluate_partition(ps, p)
    assert st.lmax == res.lmax == res.history[-1]
    assert all(x > y for x, y in zip(res.history, res.history[1:]))
    assert len(res.history) <= m + 1
    assert sum(res.alloc) == m and len(res.parts) == res.P
    for r, q, lm in zip(res.parts, res.alloc, res.part_lmax):
        assert lm * q >= rect_load(ps, r)


def test_refinement_never_worse():
    rng = np.random.default_rng(33)
    for _ in range(15):
        a = rng.integers(0, 30, size=(6, 6))
        ps = ps_of(a)
        res = hybrid_run(ps, 4, HybridConfig(P=2))
        check_result(ps, res, 4)
        assert res.lmax <= res.history[0]


@pytest.mark.parametrize("phase1", PHASE1)
def test_phase1_choices(phase1):
    rng = np.random.default_rng(34)
    a = rng.integers(0, 100, size=(12, 10))
    ps = ps_of(a)
    parts = phase1_parts(ps, 3, phase1)
    assert len(parts) == 3
    res = hybrid_run(ps, 12, HybridConfig(P=3, phase1=phase1))
    check_result(ps, res, 12)


def test_phase1_unknown():
    with pytest.raises(PartitionError):
        phase1_parts(ps_of([[1, 2]]), 1, "nope")


def test_sweep_picks_argmin():
    rng = np.random.default_rng(35)
    a = rng.integers(0, 100, size=(16, 16))
    ps = ps_of(a)
    res = p_sweep(ps, 40, HybridConfig(min_P=2))
    check_result(ps, res, 40)
    assert [c.P for c in res.candidates] == p_candidates(40, 2)
    assert all(res.eli <= c.eli for c in res.candidates)
    assert res.P == min(res.candidates, key=lambda c: (c.eli, c.P)).P


def test_phase2_choices():
    rng = np.random.default_rng(36)
    ps = ps_of(rng.integers(0, 100, size=(10, 10)))
    for fast, slow in (("hier-rb", "hier-relaxed"), ("jag-m-heur", "jag-m-heur-probe")):
        res = hybrid_run(ps, 9, HybridConfig(P=3, phase2_fast=fast, phase2_slow=slow))
        check_result(ps, res, 9)
