"""Synthetic load matrices and the plain-text matrix / partition formats.

Random streams come from numpy's PCG64 bit generator seeded with
``GenSpec.seed``, so a given :class:`GenSpec` always yields the same matrix
on every platform numpy supports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import numpy as np

from .grid import LoadMatrix, Partition, PartitionError, Rect

KINDS = ("uniform", "diagonal", "peak", "multipeak")
PRNG = "PCG64"

PathLike = Union[str, Path]


class ParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n1: int
    n2: int
    delta: float = 1.0
    peak_count: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PartitionError(f"unknown kind {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.n1 < 1 or self.n2 < 1:
            raise PartitionError("matrix dimensions must be >= 1")
        if self.kind == "uniform" and not self.delta >= 1:
            raise PartitionError(f"delta must be >= 1, got {self.delta}")
        if self.kind == "multipeak" and self.peak_count < 1:
            raise PartitionError("peak_count must be >= 1")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def gen_uniform(spec: GenSpec) -> LoadMatrix:
    """Independent integers in ``[1000, round(1000 * delta)]``."""
    if spec.delta < 1:
        raise PartitionError(f"delta must be >= 1, got {spec.delta}")
    hi = int(math.floor(1000 * spec.delta + 0.5))
    cells = _rng(spec.seed).integers(1000, hi, size=(spec.n1, spec.n2), endpoint=True)
    return LoadMatrix(cells)


def _distance(spec: GenSpec, rng: np.random.Generator) -> np.ndarray:
    x = np.arange(1, spec.n1 + 1, dtype=float)[:, None]
    y = np.arange(1, spec.n2 + 1, dtype=float)[None, :]
    if spec.kind == "diagonal":
        # nearest point of the segment (1, 1) -> (n1, n2)
        dx, dy = spec.n1 - 1.0, spec.n2 - 1.0
        norm = dx * dx + dy * dy
        t = np.zeros((spec.n1, spec.n2)) if norm == 0 else np.clip(((x - 1) * dx + (y - 1) * dy) / norm, 0, 1)
        return np.hypot(x - (1 + t * dx), y - (1 + t * dy))
    k = 1 if spec.kind == "peak" else spec.peak_count
    px = rng.integers(1, spec.n1, size=k, endpoint=True)
    py = rng.integers(1, spec.n2, size=k, endpoint=True)
    d = np.full((spec.n1, spec.n2), np.inf)
    for a, b in zip(px, py):
        d = np.minimum(d, np.hypot(x - a, y - b))
    return d


def gen_gravity(spec: GenSpec) -> LoadMatrix:
    """``round(U[0, n1 * n2] / (distance to reference + 0.1))``, half up.

    Reference: the diagonal, one random cell (peak) or the nearest of
    ``peak_count`` random cells (multipeak). Reference cells are drawn
    before the numerators.
    """
    if spec.kind == "uniform":
        raise PartitionError("uniform instances come from gen_uniform")
    rng = _rng(spec.seed)
    dist = _distance(spec, rng)
    num = rng.uniform(0.0, float(spec.n1 * spec.n2), size=(spec.n1, spec.n2))
    return LoadMatrix(np.floor(num / (dist + 0.1) + 0.5).astype(np.int64))


def generate(spec: GenSpec) -> LoadMatrix:
    return gen_uniform(spec) if spec.kind == "uniform" else gen_gravity(spec)


# ---------------------------------------------------------------------------
# file formats


def _ints(path, lineno: int, text: str, what: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError:
        raise ParseError(path, lineno, f"{what} must be integers") from None


def _lines(path: PathLike) -> List[str]:
    try:
        return Path(path).read_text(encoding="ascii").splitlines()
    except UnicodeDecodeError:
        raise ParseError(path, 1, "file is not ASCII") from None


def write_matrix(matrix: LoadMatrix, path: PathLike) -> None:
    a = matrix.cells
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{a.shape[0]} {a.shape[1]}\n")
        for row in a:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_matrix(path: PathLike) -> LoadMatrix:
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file, expected header 'n1 n2'")
    head = _ints(path, 1, lines[0], "header")
    if len(head) != 2 or head[0] < 1 or head[1] < 1:
        raise ParseError(path, 1, "header must be 'n1 n2' with positive sizes")
    n1, n2 = head
    rows = []
    for i in range(n1):
        lineno = i + 2
        if lineno > len(lines):
            raise ParseError(path, lineno, f"expected {n1} rows, file ends after {i}")
        vals = _ints(path, lineno, lines[i + 1], "cells")
        if len(vals) != n2:
            raise ParseError(path, lineno, f"expected {n2} values, found {len(vals)}")
        for v in vals:
            if v < 0:
                raise ParseError(path, lineno, f"negative load {v}")
        rows.append(vals)
    for j in range(n1 + 1, len(lines)):
        if lines[j].strip():
            raise ParseError(path, j + 1, "unexpected data after the last row")
    try:
        return LoadMatrix(np.array(rows, dtype=object))
    except PartitionError as exc:
        raise ParseError(path, 2, str(exc)) from None


def write_partition(p: Partition, path: PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"{p.n1} {p.n2} {p.m}\n")
        for r in p.rects:
            fh.write(f"{r.x1} {r.x2} {r.y1} {r.y2}\n")


def read_partition(path: PathLike) -> Partition:
    lines = _lines(path)
    if not lines:
        raise ParseError(path, 1, "empty file, expected header 'n1 n2 m'")
    head = _ints(path, 1, lines[0], "header")
    if len(head) != 3 or head[0] < 1 or head[1] < 1 or head[2] < 0:
        raise ParseError(path, 1, "header must be 'n1 n2 m'")
    n1, n2, m = head
    rects = []
    for i in range(m):
        lineno = i + 2
        if lineno > len(lines):
            raise ParseError(path, lineno, f"expected {m} rectangles, file ends after {i}")
        vals = _ints(path, lineno, lines[i + 1], "coordinates")
        if len(vals) != 4:
            raise ParseError(path, lineno, "expected 'x1 x2 y1 y2'")
        x1, x2, y1, y2 = vals
        if not (1 <= x1 <= x2 <= n1 and 1 <= y1 <= y2 <= n2):
            raise ParseError(path, lineno, f"rectangle {tuple(vals)} outside {n1}x{n2}")
        rects.append(Rect(x1, x2, y1, y2))
    for j in range(m + 1, len(lines)):
        if lines[j].strip():
            raise ParseError(path, j + 1, "unexpected data after the last rectangle")
    return Partition(n1, n2, tuple(rects))
