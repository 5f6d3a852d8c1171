"""Real trigonometric polynomials on the flat unit torus.

A polynomial is a finite sum

    f(x) = sum_i  a_i sin(2 pi nu_i . x) + b_i cos(2 pi nu_i . x)

with integer frequency vectors nu_i in Z^n \\ {0} and real coefficients,
viewed as a function on [0,1)^n with opposite faces identified.  When all
frequencies share the same squared norm lambda = |nu|^2, f is a Laplace
eigenfunction; in the unit-torus convention used here -laplace(f) equals
4 pi^2 lambda f.

Coefficients are kept as exact ``fractions.Fraction`` values internally
(floats convert exactly, strings like "3/4" parse exactly), so that
canonicalization and the moment machinery never lose precision.  Fast
float views are cached for numerical evaluation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ratlinalg import rank as _rational_rank

__all__ = [
    "PolynomialFormatError",
    "Term",
    "TrigPolynomial",
    "SpectralClass",
    "parse",
    "load",
    "evaluate",
    "evaluate_with_error",
    "evaluate_many",
    "classify",
    "gradient_bound",
    "t3_counterexample",
]

EPS = 2.0 ** -52
TWO_PI = 2.0 * math.pi
# Budget for one math.sin/math.cos call on a reduced argument.  glibc keeps
# these well under 1 ulp; 2^-50 (about 4 ulp at magnitude 1) leaves slack for
# other libms and is validated against a 256-bit reference in the test suite.
LIBM_TRIG_ERR = 2.0 ** -50


class PolynomialFormatError(ValueError):
    """Raised for malformed polynomial documents or degenerate inputs."""


Coefficient = Fraction


def _as_fraction(value, what: str) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise PolynomialFormatError(f"{what}: boolean is not a coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)  # exact binary expansion
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise PolynomialFormatError(f"{what}: bad rational literal {value!r}") from exc
    raise PolynomialFormatError(f"{what}: unsupported coefficient type {type(value).__name__}")


@dataclass(frozen=True)
class Term:
    """One frequency with its sine and cosine coefficients."""

    nu: tuple[int, ...]
    sin_coeff: Fraction
    cos_coeff: Fraction


@dataclass(frozen=True)
class SpectralClass:
    """Spectral classification of a polynomial's frequency support."""

    is_eigenfunction: bool
    eigenvalue: int | None
    lambda_mod_4: int | None
    rank: int
    in_class_s: bool


@dataclass(frozen=True)
class TrigPolynomial:
    """Canonical trigonometric polynomial on the unit torus T^dim.

    Canonical form: for each +-nu pair exactly one representative is stored
    (first nonzero component positive), duplicate frequencies are merged,
    identically zero terms are dropped, and terms are sorted by frequency.
    Instances are immutable; construct via :meth:`from_terms` or :func:`parse`.
    """

    dim: int
    terms: tuple[Term, ...]

    @classmethod
    def from_terms(
        cls,
        dim: int,
        raw_terms: Iterable[tuple[Sequence[int], object, object]],
    ) -> "TrigPolynomial":
        """Build the canonical polynomial from (nu, sin, cos) triples."""
        if dim < 1:
            raise PolynomialFormatError(f"dimension must be >= 1, got {dim}")
        merged: dict[tuple[int, ...], list[Fraction]] = {}
        order: list[tuple[int, ...]] = []
        for i, (nu_raw, a_raw, b_raw) in enumerate(raw_terms):
            nu = tuple(int(c) for c in nu_raw)
            if len(nu) != dim:
                raise PolynomialFormatError(
                    f"term {i}: frequency {nu} has length {len(nu)}, expected {dim}"
                )
            if not any(nu):
                raise PolynomialFormatError(f"term {i}: zero frequency is not allowed")
            a = _as_fraction(a_raw, f"term {i} sin")
            b = _as_fraction(b_raw, f"term {i} cos")
            # sign rule: first nonzero component positive; sin is odd, cos even
            first = next(c for c in nu if c)
            if first < 0:
                nu = tuple(-c for c in nu)
                a = -a
            if nu not in merged:
                merged[nu] = [a, b]
                order.append(nu)
            else:
                merged[nu][0] += a
                merged[nu][1] += b
        terms = tuple(
            Term(nu, merged[nu][0], merged[nu][1])
            for nu in sorted(order)
            if merged[nu][0] or merged[nu][1]
        )
        if not terms:
            raise PolynomialFormatError("polynomial is empty after canonicalization")
        return cls(dim, terms)

    # -- cached numeric views ------------------------------------------------

    @cached_property
    def freq_array(self) -> np.ndarray:
        """Frequencies as an int64 array of shape (n_terms, dim)."""
        return np.array([t.nu for t in self.terms], dtype=np.int64)

    @cached_property
    def sin_array(self) -> np.ndarray:
        return np.array([float(t.sin_coeff) for t in self.terms])

    @cached_property
    def cos_array(self) -> np.ndarray:
        return np.array([float(t.cos_coeff) for t in self.terms])

    @cached_property
    def coeff_l1_bound(self) -> float:
        """Upper bound on sup|f|: sum of per-term amplitudes, rounded up."""
        s = math.fsum(math.hypot(float(t.sin_coeff), float(t.cos_coeff)) for t in self.terms)
        return s * (1.0 + 1e-12) + 4.0 * EPS

    @cached_property
    def _coeff_abs_sums(self) -> list[float]:
        return [abs(float(t.sin_coeff)) + abs(float(t.cos_coeff)) for t in self.terms]

    @cached_property
    def _coeff_repr_errors(self) -> list[float]:
        # |a - float(a)| + |b - float(b)| per term, exact then rounded up
        out = []
        for t in self.terms:
            d = abs(t.sin_coeff - Fraction(float(t.sin_coeff)))
            d += abs(t.cos_coeff - Fraction(float(t.cos_coeff)))
            out.append(math.nextafter(float(d), math.inf))
        return out

    # -- evaluation ----------------------------------------------------------

    def __call__(self, x: Sequence[float]) -> float:
        return evaluate(self, x)

    def to_dict(self) -> dict:
        def enc(q: Fraction):
            return int(q) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

        return {
            "dim": self.dim,
            "terms": [
                {"nu": list(t.nu), "sin": enc(t.sin_coeff), "cos": enc(t.cos_coeff)}
                for t in self.terms
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def describe(self) -> str:
        """One-line human-readable form, e.g. '+1*sin(2pi(x0+x1))'."""
        pieces = []
        for t in self.terms:
            arg = "+".join(
                f"{c}*x{i}" if c not in (1, -1) else (f"x{i}" if c == 1 else f"-x{i}")
                for i, c in enumerate(t.nu)
                if c
            ).replace("+-", "-")
            if t.sin_coeff:
                pieces.append(f"{t.sin_coeff}*sin(2pi({arg}))")
            if t.cos_coeff:
                pieces.append(f"{t.cos_coeff}*cos(2pi({arg}))")
        return " + ".join(pieces).replace("+ -", "- ")


def parse(document) -> TrigPolynomial:
    """Parse a polynomial document (JSON text, bytes, or an already-decoded mapping).

    Schema: {"dim": int, "terms": [{"nu": [int,...], "sin": number|"p/q",
    "cos": number|"p/q"}, ...]}; missing "sin"/"cos" default to 0.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise PolynomialFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise PolynomialFormatError("document must be a JSON object")
    if "dim" not in document:
        raise PolynomialFormatError("missing 'dim'")
    try:
        dim = int(document["dim"])
    except (TypeError, ValueError) as exc:
        raise PolynomialFormatError(f"bad 'dim': {document['dim']!r}") from exc
    terms_doc = document.get("terms")
    if not isinstance(terms_doc, list) or not terms_doc:
        raise PolynomialFormatError("'terms' must be a non-empty list")
    raw = []
    for i, td in enumerate(terms_doc):
        if not isinstance(td, Mapping) or "nu" not in td:
            raise PolynomialFormatError(f"term {i}: expected an object with 'nu'")
        raw.append((td["nu"], td.get("sin", 0), td.get("cos", 0)))
    return TrigPolynomial.from_terms(dim, raw)


def load(path) -> TrigPolynomial:
    """Read and parse a polynomial JSON file."""
    with open(path, "rb") as fh:
        return parse(fh.read())


def t3_counterexample() -> TrigPolynomial:
    """The asymmetric lambda=2 eigenfunction on T^3:
    sin(2pi(x+y)) - cos(2pi(y-z)) - sin(2pi(x+z))."""
    return TrigPolynomial.from_terms(
        3,
        [((1, 1, 0), 1, 0), ((0, 1, -1), 0, -1), ((1, 0, 1), -1, 0)],
    )


def _check_point(f: TrigPolynomial, x: Sequence[float]) -> list[float]:
    xs = [float(c) for c in x]
    if len(xs) != f.dim:
        raise ValueError(f"point has length {len(xs)}, expected {f.dim}")
    return xs


def evaluate_with_error(f: TrigPolynomial, x: Sequence[float]) -> tuple[float, float]:
    """Evaluate f at x together with a rigorous bound on the rounding error.

    Returns (value, err) with |value - f(x)| <= err, where f(x) is the exact
    real value at the exact rational point represented by the float vector x.
    The bound is accumulated per operation: correctly-rounded dot products and
    sums via math.fsum, exact fractional reduction of the phase, a libm
    sin/cos budget of 2^-50, and the exact coefficient representation error.
    """
    xs = _check_point(f, x)
    abs_x = [abs(v) for v in xs]
    term_values: list[float] = []
    err = 0.0
    for i, t in enumerate(f.terms):
        nu = t.nu
        d = math.fsum(c * v for c, v in zip(nu, xs))
        amp = math.fsum(abs(c) * av for c, av in zip(nu, abs_x))
        dot_err = EPS * amp * 1.01  # one rounding per product + fsum half-ulp
        if abs(d) >= 2.0 ** 52:
            dot_err += EPS * abs(d)  # fractional reduction no longer exact
        m = d - math.floor(d)
        theta = TWO_PI * m
        s = math.sin(theta)
        c = math.cos(theta)
        trig_err = TWO_PI * dot_err + TWO_PI * EPS + LIBM_TRIG_ERR
        habs = f._coeff_abs_sums[i]
        af = float(t.sin_coeff)
        bf = float(t.cos_coeff)
        term_values.append(math.fsum((af * s, bf * c)))
        err += habs * trig_err + f._coeff_repr_errors[i] + 1.6 * EPS * habs
    value = math.fsum(term_values)
    err += EPS * math.fsum(f._coeff_abs_sums)
    return value, err * (1.0 + 1e-7)


def evaluate(f: TrigPolynomial, x: Sequence[float]) -> float:
    """Exact-in-real-arithmetic value of f at x, up to tracked rounding."""
    return evaluate_with_error(f, x)[0]


def evaluate_many(f: TrigPolynomial, points: np.ndarray) -> np.ndarray:
    """Vectorized evaluation at an (m, dim) array of points.

    Fast diagnostic path without individual error tracking; accuracy is
    libm-level (~1e-15 for unit-size coefficients).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[1] != f.dim:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {f.dim}")
    phases = 2.0 * np.pi * (pts @ f.freq_array.T)
    return np.sin(phases) @ f.sin_array + np.cos(phases) @ f.cos_array


def classify(f: TrigPolynomial) -> SpectralClass:
    """Eigenfunction test, eigenvalue residue, and rational rank of the support.

    The eigenvalue is reported as lambda = |nu|^2 (2pi-period convention);
    on the unit torus the polynomial then satisfies -laplace(f) = 4 pi^2
    lambda f.  Membership in the independent-frequency class requires the
    rational rank of the support to equal the number of stored terms.
    """
    norms = {sum(c * c for c in t.nu) for t in f.terms}
    is_eig = len(norms) == 1
    lam = norms.pop() if is_eig else None
    rk = _rational_rank([[Fraction(c) for c in t.nu] for t in f.terms])
    return SpectralClass(
        is_eigenfunction=is_eig,
        eigenvalue=lam,
        lambda_mod_4=(lam % 4) if lam is not None else None,
        rank=rk,
        in_class_s=(rk == len(f.terms)),
    )


def gradient_bound(f: TrigPolynomial, override: float | None = None) -> float:
    """Rigorous sup bound on |grad f|_2 over the torus.

    Triangle inequality: 2 pi sum_i sqrt(a_i^2+b_i^2) |nu_i|_2, rounded up.
    ``override`` substitutes an externally justified bound (used to reproduce
    published constants); it is returned as-is.
    """
    if override is not None:
        g = float(override)
        if g <= 0.0:
            raise ValueError("gradient bound override must be positive")
        return g
    total = math.fsum(
        math.hypot(float(t.sin_coeff), float(t.cos_coeff))
        * math.sqrt(sum(c * c for c in t.nu))
        for t in f.terms
    )
    return math.nextafter(TWO_PI * total * (1.0 + 1e-12), math.inf)
