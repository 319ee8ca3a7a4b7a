from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from rectpart import (LoadMatrix, Partition, PartitionError, Rect, build_prefix_sum,
                      evaluate_partition, lower_bounds, rect_load, validate_partition)
from rectpart.grid import INT64_MAX, rect_loads, stitch

from oracles import owned_once


def ps_of(rows):
    return build_prefix_sum(LoadMatrix(np.array(rows)))


matrices = st.integers(1, 6).flatmap(
    lambda n1: st.integers(1, 6).flatmap(
        lambda n2: st.lists(st.lists(st.integers(0, 50), min_size=n2, max_size=n2),
                            min_size=n1, max_size=n1)))


@pytest.mark.parametrize("rows, body", [
    ([[1, 2], [3, 4]], [[1, 3], [4, 10]]),
    ([[0]], [[0]]),
    ([[5, 5, 5]], [[5, 10, 15]]),
])
def test_prefix_examples(rows, body):
    g = ps_of(rows).gamma
    assert g.dtype == np.int64
    assert np.all(g[0, :] == 0) and np.all(g[:, 0] == 0)
    assert g[1:, 1:].tolist() == body


@given(matrices)
def test_prefix_matches_double_loop(rows):
    a = np.array(rows)
    g = build_prefix_sum(LoadMatrix(a)).gamma
    for x in range(a.shape[0] + 1):
        for y in range(a.shape[1] + 1):
            assert g[x, y] == sum(int(a[i, j]) for i in range(x) for j in range(y))


def test_overflow_names_cell():
    a = np.array([[INT64_MAX // 2, INT64_MAX // 2], [2, 0]], dtype=object)
    with pytest.raises(PartitionError, match=r"cell \(2, 2\)"):
        LoadMatrix(a)


def test_matrix_rejects_bad_input():
    with pytest.raises(PartitionError, match="negative"):
        LoadMatrix(np.array([[1, -1]]))
    with pytest.raises(PartitionError):
        LoadMatrix(np.zeros((0, 3), dtype=int))
    with pytest.raises(PartitionError):
        LoadMatrix(np.array([[0.5]]))


def test_matrix_stats():
    s = LoadMatrix(np.array([[2, 8], [4, 4]])).stats()
    assert (s.total, s.max_cell, s.min_cell, s.delta) == (18, 8, 2, Fraction(4))
    assert LoadMatrix(np.array([[0, 1]])).stats().delta is None


def test_rect_load_examples():
    ps = ps_of([[1, 2], [3, 4]])
    assert rect_load(ps, Rect(1, 2, 1, 2)) == 10
    assert rect_load(ps, Rect(2, 2, 1, 2)) == 7
    with pytest.raises(PartitionError):
        rect_load(ps, Rect(1, 3, 1, 1))


@given(matrices, st.data())
def test_rect_load_naive(rows, data):
    a = np.array(rows)
    ps = build_prefix_sum(LoadMatrix(a))
    n1, n2 = a.shape
    x1 = data.draw(st.integers(1, n1))
    x2 = data.draw(st.integers(x1, n1))
    y1 = data.draw(st.integers(1, n2))
    y2 = data.draw(st.integers(y1, n2))
    assert rect_load(ps, Rect(x1, x2, y1, y2)) == int(a[x1 - 1:x2, y1 - 1:y2].sum())
    assert rect_load(ps, Rect(x1, x1, y1, y1)) == a[x1 - 1, y1 - 1]


def test_rect_rejects_inverted():
    with pytest.raises(PartitionError):
        Rect(2, 1, 1, 1)
    with pytest.raises(PartitionError):
        Rect(0, 1, 1, 1)


def test_evaluate_examples():
    ones = ps_of([[1, 1], [1, 1]])
    quads = Partition(2, 2, [Rect(x, x, y, y) for x in (1, 2) for y in (1, 2)])
    st_ = evaluate_partition(ones, quads)
    assert (st_.lmax, st_.lavg, st_.imbalance) == (1, 1, 0)

    ps = ps_of([[1, 2], [3, 4]])
    st_ = evaluate_partition(ps, Partition(2, 2, [Rect(1, 1, 1, 2), Rect(2, 2, 1, 2)]))
    assert (st_.lmax, st_.lavg, st_.imbalance) == (7, 5, Fraction(2, 5))

    ps = ps_of([[1, 5, 1, 1]])
    st_ = evaluate_partition(ps, Partition(1, 4, [Rect(1, 1, 1, 2), Rect(1, 1, 3, 4)]))
    assert (st_.lmax, st_.imbalance) == (6, Fraction(1, 2))


def test_evaluate_rejects_invalid():
    ps = ps_of([[1, 2], [3, 4]])
    with pytest.raises(PartitionError, match="coverage"):
        evaluate_partition(ps, Partition(2, 2, [Rect(1, 1, 1, 1)]))
    with pytest.raises(PartitionError):
        evaluate_partition(ps, Partition(1, 2, [Rect(1, 1, 1, 2)]))


def test_validate_examples():
    p = Partition(2, 2, [Rect(1, 2, 1, 2), Rect(1, 2, 1, 2)])
    kinds = {v.kind for v in validate_partition(p)}
    assert "overlap" in kinds
    assert [str(v) for v in validate_partition(p) if v.kind == "overlap"] == ["overlap: rect 0, rect 1"]
    bad = validate_partition(Partition(2, 2, [Rect(1, 1, 1, 1)]))
    assert [v.kind for v in bad] == ["coverage"]
    assert bad[0].detail == (1, 4)
    assert validate_partition(Partition(2, 2, [Rect(1, 2, 1, 1), Rect(1, 2, 2, 2)])) == []
    assert any(v.kind == "bounds" for v in validate_partition(Partition(1, 1, [Rect(1, 2, 1, 1)])))


@given(st.integers(1, 5), st.integers(1, 5), st.lists(
    st.tuples(st.integers(1, 5), st.integers(0, 2), st.integers(1, 5), st.integers(0, 2)),
    min_size=1, max_size=6))
def test_validate_agrees_with_ownership(n1, n2, raw):
    rects = [Rect(x, x + dx, y, y + dy) for x, dx, y, dy in raw]
    p = Partition(n1, n2, rects)
    assert (validate_partition(p) == []) == owned_once(n1, n2, rects)


def test_lower_bounds():
    assert lower_bounds(ps_of([[1, 2], [3, 4]]), 2) == (5, 4)
    assert lower_bounds(ps_of(np.ones((4, 4), dtype=int)), 16) == (1, 1)
    assert lower_bounds(ps_of([[9, 0], [0, 0]]), 4) == (Fraction(9, 4), 9)
    with pytest.raises(PartitionError):
        lower_bounds(ps_of([[1]]), 0)


def test_sub_and_transpose(rng):
    a = rng.integers(0, 9, size=(5, 7))
    ps = build_prefix_sum(LoadMatrix(a))
    r = Rect(2, 4, 3, 6)
    assert np.array_equal(ps.sub(r).cells(), a[1:4, 2:6])
    assert np.array_equal(ps.transpose().cells(), a.T)


def test_stitch_and_loads():
    ps = ps_of([[1, 2, 3], [4, 5, 6]])
    left = Partition(2, 1, [Rect(1, 2, 1, 1)])
    right = Partition(2, 2, [Rect(1, 1, 1, 2), Rect(2, 2, 1, 2)])
    p = stitch(2, 3, [(Rect(1, 2, 1, 1), left), (Rect(1, 2, 2, 3), right)])
    assert validate_partition(p) == []
    assert rect_loads(ps, p).tolist() == [5, 5, 11]
