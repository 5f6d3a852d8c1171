"""Shared builders and independent oracles for the test suite."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

import toralsym as ts


@pytest.fixture
def g():
    return ts.t3_counterexample()


@pytest.fixture
def lam5():
    # cos(2pi(2x+y)) + sin(2pi(x-2y)): eigenvalue 5, parities (0,1)/(1,0)
    return ts.TrigPolynomial.from_terms(2, [((2, 1), 0, 1), ((1, -2), 1, 0)])


def mp_reference(f: ts.TrigPolynomial, x, prec: int = 256) -> float:
    """256-bit reference evaluation (independent of the library's paths)."""
    import mpmath

    with mpmath.workprec(prec):
        total = mpmath.mpf(0)
        for t in f.terms:
            phase = 2 * mpmath.pi * mpmath.fsum(
                mpmath.mpf(c) * mpmath.mpf(float(v)) for c, v in zip(t.nu, x)
            )
            a = mpmath.mpf(t.sin_coeff.numerator) / t.sin_coeff.denominator
            b = mpmath.mpf(t.cos_coeff.numerator) / t.cos_coeff.denominator
            total += a * mpmath.sin(phase) + b * mpmath.cos(phase)
        return float(total)


def random_poly(rng, dim, n_terms, max_entry=3, rational=False) -> ts.TrigPolynomial:
    terms = []
    seen = set()
    while len(terms) < n_terms:
        nu = tuple(int(c) for c in rng.integers(-max_entry, max_entry + 1, size=dim))
        if not any(nu):
            continue
        canon = nu if next(c for c in nu if c) > 0 else tuple(-c for c in nu)
        if canon in seen:
            continue
        seen.add(canon)
        if rational:
            a = Fraction(int(rng.integers(-8, 9)), int(rng.integers(1, 9)))
            b = Fraction(int(rng.integers(-8, 9)), int(rng.integers(1, 9)))
            if a == 0 and b == 0:
                a = Fraction(1)
        else:
            a = float(rng.normal())
            b = float(rng.normal())
        terms.append((nu, a, b))
    return ts.TrigPolynomial.from_terms(dim, terms)


def random_class_s(rng, dim, n_terms, max_entry=3) -> ts.TrigPolynomial:
    """Random polynomial with linearly independent frequencies, exact coefficients."""
    assert n_terms <= dim
    while True:
        f = random_poly(rng, dim, n_terms, max_entry, rational=True)
        if ts.classify(f).in_class_s:
            return f


def circle_frequencies(lam: int) -> list[tuple[int, int]]:
    """Canonical representatives (first nonzero positive) of |nu|^2 = lam on Z^2."""
    out = set()
    r = math.isqrt(lam)
    for p in range(-r, r + 1):
        q2 = lam - p * p
        q = math.isqrt(q2)
        if q * q != q2:
            continue
        for qq in {q, -q}:
            nu = (p, qq)
            if nu == (0, 0):
                continue
            if next(c for c in nu if c) < 0:
                nu = (-nu[0], -nu[1])
            out.add(nu)
    return sorted(out)


def sums_of_two_squares(limit: int) -> list[int]:
    return [lam for lam in range(1, limit + 1) if circle_frequencies(lam)]


def random_t2_eigenfunction(rng, lam: int) -> ts.TrigPolynomial:
    freqs = circle_frequencies(lam)
    take = sorted(rng.choice(len(freqs), size=rng.integers(1, len(freqs) + 1), replace=False))
    terms = []
    for i in take:
        a, b = rng.normal(size=2)
        if a == 0 and b == 0:
            a = 1.0
        terms.append((freqs[i], float(a), float(b)))
    return ts.TrigPolynomial.from_terms(2, terms)


def gradient_values(f: ts.TrigPolynomial, points: np.ndarray) -> np.ndarray:
    """|grad f|_2 at each point, computed from the analytic term-by-term form."""
    phases = 2.0 * np.pi * (points @ f.freq_array.T)  # (m, terms)
    weights = f.sin_array * np.cos(phases) - f.cos_array * np.sin(phases)
    grads = 2.0 * np.pi * (weights @ f.freq_array.astype(float))  # (m, dim)
    return np.sqrt(np.sum(grads ** 2, axis=1))
