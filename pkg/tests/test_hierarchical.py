import numpy as np
import pytest

from rectpart import (BisectionTree, HierVariant, InfeasibleError, LoadMatrix, ResourceLimitError,
                      build_prefix_sum, evaluate_partition, hier_opt, hier_rb, hier_relaxed,
                      validate_partition)
from rectpart.hierarchical import Leaf, Node

import oracles

SMALL = [[1, 2], [3, 4]]
ALGOS = (hier_rb, hier_relaxed)


def ps_of(a):
    return build_prefix_sum(LoadMatrix(np.asarray(a)))


def lmax_of(ps, tree):
    p = tree.to_partition()
    assert validate_partition(p) == []
    return evaluate_partition(ps, p).lmax


def check_tiling(t):
    if isinstance(t, Leaf):
        return 1
    a, b = t.left.rect, t.right.rect
    if t.axis == 0:
        assert (a.x1, a.x2, b.x1, b.x2) == (t.rect.x1, t.cut, t.cut + 1, t.rect.x2)
        assert (a.y1, a.y2) == (b.y1, b.y2) == (t.rect.y1, t.rect.y2)
    else:
        assert (a.y1, a.y2, b.y1, b.y2) == (t.rect.y1, t.cut, t.cut + 1, t.rect.y2)
        assert (a.x1, a.x2) == (b.x1, b.x2) == (t.rect.x1, t.rect.x2)
    return check_tiling(t.left) + check_tiling(t.right)


def test_rb_examples():
    ps = ps_of([[4, 0], [0, 4]])
    t = hier_rb(ps, 2, HierVariant.HOR)
    assert t.root.axis == 0 and t.root.cut == 1
    assert evaluate_partition(ps, t.to_partition()).imbalance == 0
    t = hier_rb(ps_of(SMALL), 2, HierVariant.LOAD)
    assert t.root.axis == 1 and lmax_of(ps_of(SMALL), t) == 6
    ones = ps_of(np.ones((4, 4), dtype=int))
    t = hier_rb(ones, 4, HierVariant.HOR)
    assert sorted(r.as_tuple() for r in t.leaves()) == [
        (1, 2, 1, 2), (1, 2, 3, 4), (3, 4, 1, 2), (3, 4, 3, 4)]
    assert evaluate_partition(ones, t.to_partition()).imbalance == 0


def test_relaxed_examples():
    ps = ps_of([[1, 5, 1, 1]])
    t = hier_relaxed(ps, 2)
    assert t.root.axis == 1 and t.root.cut == 2 and lmax_of(ps, t) == 6
    assert lmax_of(ps_of(SMALL), hier_relaxed(ps_of(SMALL), 2)) == 6
    # all-ones 4x4 on 3 processors: 8 | 8 then the 8 splits 4 | 4
    ones = ps_of(np.ones((4, 4), dtype=int))
    assert lmax_of(ones, hier_relaxed(ones, 3)) == 6


def test_opt_examples():
    ps = ps_of(SMALL)
    assert lmax_of(ps, hier_opt(ps, 2)) == 6
    assert lmax_of(ps, hier_opt(ps, 1)) == 10
    assert lmax_of(ps, hier_opt(ps, 4)) == 4


def test_opt_oracle():
    rng = np.random.default_rng(21)
    for _ in range(30):
        a = rng.integers(0, 10, size=(4, 4))
        ps = ps_of(a)
        for m in range(1, 5):
            t = hier_opt(ps, m)
            assert check_tiling(t.root) == m
            assert lmax_of(ps, t) == oracles.best_hierarchical(a, m)


def test_opt_dominates_heuristics():
    rng = np.random.default_rng(22)
    for _ in range(15):
        a = rng.integers(0, 30, size=(int(rng.integers(2, 7)), int(rng.integers(2, 7))))
        ps = ps_of(a)
        for m in range(1, min(6, a.size) + 1):
            best = lmax_of(ps, hier_opt(ps, m))
            for fn in ALGOS:
                for v in HierVariant:
                    assert best <= lmax_of(ps, fn(ps, m, v))


def test_variants_valid_and_deterministic():
    rng = np.random.default_rng(23)
    for _ in range(60):
        n1, n2 = (int(v) for v in rng.integers(1, 12, size=2))
        a = rng.integers(0, 50, size=(n1, n2))
        ps = ps_of(a)
        m = int(rng.integers(1, n1 * n2 + 1))
        for fn in ALGOS:
            for v in HierVariant:
                t = fn(ps, m, v)
                assert check_tiling(t.root) == m == t.m
                p = t.to_partition()
                assert validate_partition(p) == []
                assert sum(evaluate_partition(ps, p).loads) == int(a.sum())
                assert fn(ps, m, v) == t


def test_axis_rules():
    ps = ps_of(np.ones((3, 8), dtype=int))
    assert hier_rb(ps, 2, HierVariant.DIST).root.axis == 1
    assert hier_rb(ps, 2, HierVariant.HOR).root.axis == 0
    assert hier_rb(ps, 2, HierVariant.VER).root.axis == 1
    t = hier_rb(ps_of(np.ones((8, 8), dtype=int)), 4, HierVariant.HOR)
    assert t.root.axis == 0 and t.root.left.axis == 1 and t.root.right.axis == 1
    t = hier_rb(ps_of(np.ones((8, 8), dtype=int)), 4, HierVariant.VER)
    assert t.root.axis == 1 and t.root.left.axis == 0
    # square with equal estimates: ties go to rows
    assert hier_rb(ps_of(np.ones((4, 4), dtype=int)), 2, HierVariant.LOAD).root.axis == 0
    assert hier_rb(ps_of(np.ones((4, 4), dtype=int)), 2, HierVariant.DIST).root.axis == 0


def test_odd_processor_count_split():
    ps = ps_of(np.ones((1, 9), dtype=int))
    t = hier_rb(ps, 3)
    assert sorted(r.area for r in t.leaves()) == [3, 3, 3]


def test_cells_limit():
    ps = ps_of(np.ones((2, 2), dtype=int))
    for fn in (hier_rb, hier_relaxed, hier_opt):
        with pytest.raises(InfeasibleError):
            fn(ps, 5)
    t = hier_rb(ps_of([[0, 0, 0, 9]]), 4)
    assert sorted(r.area for r in t.leaves()) == [1, 1, 1, 1]


def test_memo_cap():
    ps = ps_of(np.arange(64).reshape(8, 8))
    with pytest.raises(ResourceLimitError):
        hier_opt(ps, 6, memo_cap=50)
    assert isinstance(hier_opt(ps, 3), BisectionTree)


def test_huge_loads_use_exact_path():
    big = 2 ** 60
    a = np.array([[big, 1], [1, big // 2]], dtype=object)
    ps = ps_of(a)
    for fn in ALGOS:
        t = fn(ps, 3)
        assert validate_partition(t.to_partition()) == []
    assert lmax_of(ps, hier_opt(ps, 2)) == big + 1
