"""Exact linear algebra over the rationals (small dense systems).

Everything here works on lists of ``fractions.Fraction`` and never touches
floating point; it backs the certificate machinery, where results must be
checkable identities rather than approximations.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

Matrix = list[list[Fraction]]

__all__ = ["rank", "solve_particular", "invert", "det", "lcm_of_denominators"]


def _copy(rows: Matrix) -> Matrix:
    return [list(r) for r in rows]


def rank(rows: Matrix) -> int:
    """Rank over Q by Gaussian elimination with exact pivots."""
    if not rows:
        return 0
    work = _copy(rows)
    n_cols = len(work[0])
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        inv = 1 / work[r][col]
        work[r] = [v * inv for v in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                factor = work[i][col]
                work[i] = [v - factor * p for v, p in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return r


def solve_particular(rows: Matrix, rhs: list[Fraction]) -> list[Fraction] | None:
    """One exact solution of rows . u = rhs, free variables set to zero.

    Returns None when the system is inconsistent.  Underdetermined systems
    are fine; overdetermined consistent ones too.
    """
    if len(rows) != len(rhs):
        raise ValueError("rhs length must match row count")
    if not rows:
        return []
    n_cols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots: list[tuple[int, int]] = []  # (row, col)
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, len(aug)) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col]:
                factor = aug[i][col]
                aug[i] = [v - factor * p for v, p in zip(aug[i], aug[r])]
        pivots.append((r, col))
        r += 1
        if r == len(aug):
            break
    for i in range(r, len(aug)):
        if aug[i][n_cols]:
            return None  # 0 = nonzero
    u = [Fraction(0)] * n_cols
    for row, col in pivots:
        u[col] = aug[row][n_cols]
    return u


def det(matrix: Matrix) -> Fraction:
    """Determinant by fraction-free-ish elimination (exact)."""
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("determinant needs a square matrix")
    work = _copy(matrix)
    result = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if work[i][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            result = -result
        result *= work[col][col]
        inv = 1 / work[col][col]
        for i in range(col + 1, n):
            if work[i][col]:
                factor = work[i][col] * inv
                work[i] = [v - factor * p for v, p in zip(work[i], work[col])]
    return result


def invert(matrix: Matrix) -> Matrix:
    """Exact inverse; raises ValueError on a singular matrix."""
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError("inverse needs a square matrix")
    work = _copy(matrix)
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if work[i][col]), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        out[col], out[pivot] = out[pivot], out[col]
        inv = 1 / work[col][col]
        work[col] = [v * inv for v in work[col]]
        out[col] = [v * inv for v in out[col]]
        for i in range(n):
            if i != col and work[i][col]:
                factor = work[i][col]
                work[i] = [v - factor * p for v, p in zip(work[i], work[col])]
                out[i] = [v - factor * p for v, p in zip(out[i], out[col])]
    return out


def lcm_of_denominators(matrix: Matrix) -> int:
    """Least common multiple of all entry denominators."""
    result = 1
    for row in matrix:
        for v in row:
            result = lcm(result, v.denominator)
    return result
