"""Exact detection and certification of translation antisymmetries.

A translation u makes f(x+u) = -f(x) exactly when every frequency nu in the
support satisfies nu . u = 1/2 (mod 1): each term then picks up a phase shift
by an odd multiple of pi.  Two exact finders are provided:

* semi-integral search: u = w/2 with w in {0,1}^n, found (or refuted with a
  checkable parity witness) by Gaussian elimination over GF(2);
* independent-frequency construction: exact rational solve of nu_i . u = 1/2,
  available whenever the frequencies are linearly independent over Q.

All certificate arithmetic is exact rational; floats appear only in the
optional numerical spot-check tier.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ratlinalg
from .trigpoly import (
    EPS,
    TrigPolynomial,
    classify,
    evaluate_with_error,
    gradient_bound,
)

__all__ = [
    "NotInClassS",
    "NotABasis",
    "NotT2Eigenfunction",
    "ExactCheckFailed",
    "TranslationCertificate",
    "ParityObstruction",
    "SemiIntegralSearch",
    "ReductionTrace",
    "CoveringMatrix",
    "AntisymmetryReport",
    "dyadic_reduce",
    "find_semi_integral",
    "find_class_s_translation",
    "covering_matrix",
    "verify_antisymmetry",
    "t2_symmetry_theorem",
]


class NotInClassS(ValueError):
    """Frequencies are linearly dependent over Q."""


class NotABasis(ValueError):
    """Fewer independent frequencies than the ambient dimension."""


class NotT2Eigenfunction(ValueError):
    """Input is not a nonconstant eigenfunction on the 2-torus."""


class ExactCheckFailed(ValueError):
    """A certificate fails the exact rational check; carries the offender."""

    def __init__(self, nu: tuple[int, ...], value: Fraction):
        self.nu = nu
        self.value = value
        super().__init__(f"nu.u = {value} is not 1/2 (mod 1) at nu = {nu}")


@dataclass(frozen=True)
class ReductionTrace:
    """Result of halving all-even frequency supports until an odd entry appears."""

    steps: int
    reduced: TrigPolynomial


@dataclass(frozen=True)
class ParityObstruction:
    """Checkable proof that no semi-integral translation exists.

    ``row_indices`` lists support frequencies whose parity equations sum,
    over GF(2), to the contradiction 0 = 1: the parities XOR to the zero
    vector while the right-hand sides (all 1) sum to an odd count.
    """

    row_indices: tuple[int, ...]
    frequencies: tuple[tuple[int, ...], ...]

    def check(self) -> bool:
        n = len(self.frequencies[0])
        combo = [0] * n
        for nu in self.frequencies:
            combo = [(c + abs(v)) % 2 for c, v in zip(combo, nu)]
        return not any(combo) and len(self.frequencies) % 2 == 1

    def describe(self) -> str:
        rows = " + ".join(str(nu) for nu in self.frequencies)
        return (
            f"parities of {rows} sum to the zero vector over GF(2) "
            f"while the {len(self.frequencies)} right-hand sides sum to 1: 0 = 1"
        )


@dataclass(frozen=True)
class TranslationCertificate:
    """A rational torus translation u with f(x+u) = -f(x).

    ``kind`` is "semi-integral" (u = w/2, integer w) or "class-s-rational"
    (exact solve against independent frequencies).  ``witness`` records the
    data that produced u; ``reduction`` carries the dyadic trace when the
    certificate refers to a reduced polynomial.
    """

    u: tuple[Fraction, ...]
    kind: str
    witness: dict
    verified_exact: bool = True
    reduction: ReductionTrace | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "u": [f"{q.numerator}/{q.denominator}" for q in self.u],
            "witness": self.witness,
            "verified_exact": self.verified_exact,
            "reduction_steps": self.reduction.steps if self.reduction else 0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class SemiIntegralSearch:
    """Outcome of the GF(2) search: a certificate or a parity obstruction."""

    certificate: TranslationCertificate | None
    obstruction: ParityObstruction | None


@dataclass(frozen=True)
class CoveringMatrix:
    """Integer matrix B with B^t nu_i = N e_i, pulling f back to a separable form."""

    B: tuple[tuple[int, ...], ...]
    N: int
    degree: int
    pullback: TrigPolynomial

    def to_dict(self) -> dict:
        return {"B": [list(r) for r in self.B], "N": self.N, "degree": self.degree,
                "pullback": self.pullback.to_dict()}


@dataclass(frozen=True)
class AntisymmetryReport:
    """Two-tier verification outcome for a translation certificate."""

    exact_ok: bool
    samples: int
    max_abs_sum: float
    tolerance: float
    numerical_ok: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def dyadic_reduce(f: TrigPolynomial) -> ReductionTrace:
    """Halve all frequencies while every component of every frequency is even.

    The reduced polynomial has the same distribution function as f: with an
    all-even support f is 1/2-periodic in each coordinate, so halving the
    frequencies only reparametrizes the torus.
    """
    steps = 0
    current = f
    while all(c % 2 == 0 for t in current.terms for c in t.nu):
        current = TrigPolynomial.from_terms(
            current.dim,
            [(tuple(c // 2 for c in t.nu), t.sin_coeff, t.cos_coeff) for t in current.terms],
        )
        steps += 1
    return ReductionTrace(steps, current)


def _parity_solve(parity_rows: list[tuple[int, ...]]) -> tuple[list[int] | None, tuple[int, ...] | None]:
    """Solve (parities) . w = 1 over GF(2).

    Returns (w, None) on success or (None, row_indices) with a certificate of
    infeasibility: a set of input rows whose equations XOR to 0 = 1.
    Rows are packed into Python ints: coefficient bits 0..n-1, the right-hand
    side at bit n, and provenance indicator bits above.
    """
    if not parity_rows:
        return None, ()
    n = len(parity_rows[0])
    rhs_bit = 1 << n
    rows = []
    for i, parities in enumerate(parity_rows):
        packed = sum((p & 1) << c for c, p in enumerate(parities))
        rows.append(packed | rhs_bit | (1 << (n + 1 + i)))
    coeff_mask = (1 << n) - 1
    pivots: list[tuple[int, int]] = []  # (row position, column)
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i] >> col & 1), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i] >> col & 1:
                rows[i] ^= rows[r]
        pivots.append((r, col))
        r += 1
    for row in rows[r:]:
        if row & rhs_bit:  # coefficient part is zero here: contradiction 0 = 1
            indices = tuple(i for i in range(len(parity_rows)) if row >> (n + 1 + i) & 1)
            return None, indices
    w = [0] * n
    for pos, col in reversed(pivots):
        row = rows[pos]
        acc = (row & rhs_bit) >> n
        for c in range(col + 1, n):
            if row >> c & 1:
                acc ^= w[c]
        w[col] = acc
    return w, None


def find_semi_integral(f: TrigPolynomial) -> SemiIntegralSearch:
    """Search for u = w/2 with nu . w odd for every support frequency.

    Solvability of the parity system is decided exactly over GF(2); on
    failure the returned obstruction is itself a checkable certificate.
    Run :func:`dyadic_reduce` first if the support might be all-even,
    since all-even rows make the system trivially infeasible.
    """
    parities = [tuple(abs(c) % 2 for c in t.nu) for t in f.terms]
    w, bad_rows = _parity_solve(parities)
    if w is None:
        obstruction = ParityObstruction(
            row_indices=bad_rows,
            frequencies=tuple(f.terms[i].nu for i in bad_rows),
        )
        return SemiIntegralSearch(None, obstruction)
    for t in f.terms:  # postcondition: every nu . w is odd
        assert sum(c * wc for c, wc in zip(t.nu, w)) % 2 == 1
    cert = TranslationCertificate(
        u=tuple(Fraction(wc, 2) for wc in w),
        kind="semi-integral",
        witness={"w": list(w)},
    )
    return SemiIntegralSearch(cert, None)


def find_class_s_translation(f: TrigPolynomial) -> TranslationCertificate:
    """Exact rational u with nu_i . u = 1/2 for every stored frequency.

    Requires linearly independent frequencies (raises NotInClassS otherwise).
    For k < dim independent frequencies any particular solution of the
    underdetermined system certifies the antisymmetry; entries are reduced
    into [0,1).
    """
    spec = classify(f)
    if not spec.in_class_s:
        raise NotInClassS(
            f"frequency rank {spec.rank} < {len(f.terms)} terms: "
            "support is linearly dependent over Q"
        )
    rows = [[Fraction(c) for c in t.nu] for t in f.terms]
    rhs = [Fraction(1, 2)] * len(rows)
    solution = ratlinalg.solve_particular(rows, rhs)
    assert solution is not None  # independent rows: always consistent
    u = tuple(q - math.floor(q) for q in solution)
    for t in f.terms:
        dot = sum(Fraction(c) * uc for c, uc in zip(t.nu, u))
        assert (dot - Fraction(1, 2)).denominator == 1
    return TranslationCertificate(
        u=u,
        kind="class-s-rational",
        witness={
            "system": [list(map(str, r)) for r in rows],
            "rhs": "1/2",
            "raw_solution": [str(q) for q in solution],
        },
    )


def covering_matrix(f: TrigPolynomial) -> CoveringMatrix:
    """Integer covering matrix B = N (A^-1)^t for a full frequency basis.

    A has the n independent frequencies as columns; N is the minimal scale
    (lcm of the denominators of (A^-1)^t) making B integral.  The pullback
    f(Bx) = sum_i a_i sin(2 pi N x_i) + b_i cos(2 pi N x_i) is returned for
    verification, and |det B| is the covering degree.
    """
    n = f.dim
    if len(f.terms) != n or not classify(f).in_class_s:
        raise NotABasis(
            f"need exactly {n} independent frequencies, "
            f"got {len(f.terms)} terms of rank {classify(f).rank}"
        )
    A = [[Fraction(f.terms[j].nu[i]) for j in range(n)] for i in range(n)]  # columns nu_j
    A_inv_t = [list(col) for col in zip(*ratlinalg.invert(A))]
    scale = ratlinalg.lcm_of_denominators(A_inv_t)
    B = [[int(v * scale) for v in row] for row in A_inv_t]
    for j, t in enumerate(f.terms):  # B^t nu_j = N e_j, exactly
        image = [sum(B[i][k] * t.nu[i] for i in range(n)) for k in range(n)]
        assert image == [scale if k == j else 0 for k in range(n)]
    degree = abs(int(ratlinalg.det([[Fraction(v) for v in row] for row in B])))
    pullback = TrigPolynomial.from_terms(
        n,
        [
            (tuple(scale if i == j else 0 for i in range(n)), t.sin_coeff, t.cos_coeff)
            for j, t in enumerate(f.terms)
        ],
    )
    return CoveringMatrix(
        B=tuple(tuple(row) for row in B),
        N=scale,
        degree=degree,
        pullback=pullback,
    )


def verify_antisymmetry(
    f: TrigPolynomial,
    cert: TranslationCertificate,
    samples: int = 1000,
    seed: int = 0,
) -> AntisymmetryReport:
    """Two-tier certificate check.

    Tier (i), exact: nu . u = 1/2 (mod 1) in rational arithmetic for every
    support frequency; a violation raises :class:`ExactCheckFailed` naming
    the offender.  Tier (ii), numerical: max over random points of
    |f(x+u) + f(x)|, compared against the tracked evaluation error plus the
    float-conversion slack of u.
    """
    if len(cert.u) != f.dim:
        raise ValueError(f"certificate has dimension {len(cert.u)}, expected {f.dim}")
    for t in f.terms:
        dot = sum(Fraction(c) * uc for c, uc in zip(t.nu, cert.u))
        if (dot - Fraction(1, 2)).denominator != 1:
            raise ExactCheckFailed(t.nu, dot)
    rng = np.random.default_rng(seed)
    pts = rng.random((samples, f.dim))
    # u enters through floats; bound the induced perturbation via the gradient
    u_float = [float(q) for q in cert.u]
    u_drift = math.fsum(abs(float(q - Fraction(fq))) for q, fq in zip(cert.u, u_float))
    grad = gradient_bound(f)
    max_abs = 0.0
    tol = 0.0
    for row in pts:
        x = list(row)
        shifted = [(xv + uv) % 1.0 for xv, uv in zip(x, u_float)]
        v1, e1 = evaluate_with_error(f, x)
        v2, e2 = evaluate_with_error(f, shifted)
        max_abs = max(max_abs, abs(v1 + v2))
        tol = max(tol, e1 + e2 + grad * (u_drift + 4.0 * EPS * f.dim))
    return AntisymmetryReport(
        exact_ok=True,
        samples=samples,
        max_abs_sum=max_abs,
        tolerance=tol,
        numerical_ok=max_abs <= tol,
    )


def t2_symmetry_theorem(f: TrigPolynomial) -> TranslationCertificate:
    """Certificate for a nonconstant eigenfunction on T^2.

    Composes the dyadic reduction with the semi-integral search; after full
    reduction the eigenvalue is 1 or 2 mod 4, whose parity patterns always
    admit a solution, so the search cannot fail.  The certificate refers to
    the reduced polynomial and carries the reduction trace, under which
    distribution statements transfer back to f.
    """
    if f.dim != 2:
        raise NotT2Eigenfunction(f"dimension {f.dim}, expected 2")
    spec = classify(f)
    if not spec.is_eigenfunction:
        raise NotT2Eigenfunction("frequencies do not share a common |nu|^2")
    trace = dyadic_reduce(f)
    search = find_semi_integral(trace.reduced)
    assert search.certificate is not None, "reduced T^2 eigenfunction must admit w"
    return dataclasses.replace(search.certificate, reduction=trace)
