"""Small exact linear algebra over the rationals.

Everything here operates on plain Python ints and Fractions; no floats.
These routines back the polyhedral geometry (kernels, ranks and solves for
facet enumeration) and the log2-space rescaling solver, where floating
error would corrupt exact face and membership decisions.

Matrices are lists of row sequences.  Inputs may mix ints and Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

Vector = Sequence[Fraction | int]
Matrix = Sequence[Vector]


def dot(u: Vector, v: Vector) -> Fraction | int:
    """Inner product; stays in int when both vectors are int."""
    if len(u) != len(v):
        raise ValueError("length mismatch in dot product")
    return sum(a * b for a, b in zip(u, v))


def rref(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.  Returns (rows, pivot column indices)."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def affine_rank(points: Sequence[Vector]) -> int:
    """Dimension of the affine hull of a point set (0 for a single point)."""
    if not points:
        raise ValueError("affine_rank of empty point set")
    base = points[0]
    diffs = [[x - b for x, b in zip(p, base)] for p in points[1:]]
    return rank(diffs) if diffs else 0


def kernel_basis(rows: Matrix, ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of the right kernel of the given rows (each of length ncols)."""
    m, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(tuple(v))
    return basis


def solve_square(a: Matrix, b: Vector) -> tuple[Fraction, ...] | None:
    """Solve a square system exactly.  None when singular."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots == list(range(n)):
        return tuple(m[i][n] for i in range(n))
    return None


def invert(a: Matrix) -> list[list[Fraction]] | None:
    """Exact matrix inverse.  None when singular."""
    n = len(a)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots != list(range(n)):
        return None
    return [row[n:] for row in m]


def inf_operator_norm(a: Matrix) -> Fraction:
    """Max-row-sum norm, i.e. the operator norm on sup-norm vectors."""
    return max(sum(abs(Fraction(x)) for x in row) for row in a)


def primitive(vec: Vector) -> tuple[int, ...]:
    """Scale a rational vector by a positive rational to primitive integers.

    Direction is preserved (no sign flip); the zero vector is rejected.
    """
    fr = [Fraction(x) for x in vec]
    if all(x == 0 for x in fr):
        raise ValueError("primitive of zero vector")
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints)
