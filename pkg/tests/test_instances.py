from fractions import Fraction

import numpy as np
import pytest

from rectpart import (GenSpec, LoadMatrix, Partition, ParseError, PartitionError, Rect,
                      gen_gravity, gen_uniform, generate, read_matrix, read_partition,
                      write_matrix, write_partition)
from rectpart.instances import KINDS, PRNG


def put(tmp_path, text, name="f.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_uniform_range_and_determinism():
    a = gen_uniform(GenSpec("uniform", 40, 30, 1.2, seed=7)).cells
    assert a.shape == (40, 30) and a.min() >= 1000 and a.max() <= 1200
    assert np.array_equal(a, gen_uniform(GenSpec("uniform", 40, 30, 1.2, seed=7)).cells)
    assert not np.array_equal(a, gen_uniform(GenSpec("uniform", 40, 30, 1.2, seed=8)).cells)
    ones = gen_uniform(GenSpec("uniform", 5, 5, 1.0, seed=1)).cells
    assert np.all(ones == 1000)
    st = LoadMatrix(a).stats()
    assert st.delta <= Fraction(6, 5)


def test_uniform_frozen_stream():
    # locks the documented generator (PCG64 seeded with the GenSpec seed)
    assert PRNG == "PCG64"
    a = gen_uniform(GenSpec("uniform", 2, 3, 1.2, seed=0)).cells
    b = np.random.Generator(np.random.PCG64(0)).integers(1000, 1200, size=(2, 3), endpoint=True)
    assert np.array_equal(a, b)


def test_delta_validation():
    with pytest.raises(PartitionError):
        GenSpec("uniform", 4, 4, 0.5)
    with pytest.raises(PartitionError):
        GenSpec("spiral", 4, 4)
    with pytest.raises(PartitionError):
        GenSpec("peak", 0, 4)
    with pytest.raises(PartitionError):
        GenSpec("multipeak", 4, 4, peak_count=0)


@pytest.mark.parametrize("kind", ["diagonal", "peak", "multipeak"])
def test_gravity_deterministic(kind):
    s = GenSpec(kind, 20, 25, peak_count=3, seed=5)
    a = generate(s).cells
    assert a.shape == (20, 25) and a.min() >= 0
    assert np.array_equal(a, gen_gravity(s).cells)


def test_diagonal_structure():
    # on the diagonal the divisor is 0.1, off it at least 1 / sqrt(2) + 0.1
    s = GenSpec("diagonal", 30, 30, seed=3)
    rng = np.random.Generator(np.random.PCG64(3))
    num = rng.uniform(0.0, 900.0, size=(30, 30))
    a = gen_gravity(s).cells
    for i in range(30):
        assert a[i, i] == np.floor(num[i, i] / 0.1 + 0.5)


def test_peak_structure():
    s = GenSpec("peak", 15, 15, seed=9)
    rng = np.random.Generator(np.random.PCG64(9))
    px = int(rng.integers(1, 15, endpoint=True))
    py = int(rng.integers(1, 15, endpoint=True))
    num = rng.uniform(0.0, 225.0, size=(15, 15))
    a = gen_gravity(s).cells
    assert a[px - 1, py - 1] == np.floor(num[px - 1, py - 1] / 0.1 + 0.5)


def test_all_kinds_valid():
    for kind in KINDS:
        for seed in range(3):
            m = generate(GenSpec(kind, 9, 13, 2.0, 4, seed))
            assert isinstance(m, LoadMatrix) and m.cells.dtype == np.int64


def test_matrix_format(tmp_path):
    m = read_matrix(put(tmp_path, "2 2\n1 2\n3 4\n"))
    assert m.cells.tolist() == [[1, 2], [3, 4]]
    out = tmp_path / "o.mat"
    write_matrix(m, out)
    assert out.read_text() == "2 2\n1 2\n3 4\n"
    g = generate(GenSpec("multipeak", 17, 11, seed=2))
    write_matrix(g, out)
    assert read_matrix(out) == g


@pytest.mark.parametrize("text, line", [
    ("2 2\n1 2\n3\n", 3),
    ("", 1),
    ("2\n1 2\n", 1),
    ("2 x\n", 1),
    ("2 2\n1 -2\n3 4\n", 2),
    ("2 2\n1 2\n", 3),
    ("2 2\n1 2\n3 4\n5 6\n", 4),
    ("1 2\n1 2.5\n", 2),
])
def test_matrix_parse_errors(tmp_path, text, line):
    with pytest.raises(ParseError) as exc:
        read_matrix(put(tmp_path, text))
    assert exc.value.line == line
    assert f":{line}:" in str(exc.value)


def test_partition_format(tmp_path):
    p = read_partition(put(tmp_path, "2 2 2\n1 1 1 2\n2 2 1 2\n"))
    assert p == Partition(2, 2, (Rect(1, 1, 1, 2), Rect(2, 2, 1, 2)))
    out = tmp_path / "o.part"
    write_partition(p, out)
    assert out.read_text() == "2 2 2\n1 1 1 2\n2 2 1 2\n"
    assert read_partition(out) == p


@pytest.mark.parametrize("text, line", [
    ("2 2 2\n1 1 1 2\n2 3 1 2\n", 3),
    ("2 2 2\n1 1 1 2\n", 3),
    ("2 2\n", 1),
    ("2 2 1\n1 1 1\n", 2),
    ("2 2 1\n2 1 1 1\n", 2),
    ("2 2 1\n1 2 1 2\n1 1 1 1\n", 3),
])
def test_partition_parse_errors(tmp_path, text, line):
    with pytest.raises(ParseError) as exc:
        read_partition(put(tmp_path, text))
    assert exc.value.line == line
