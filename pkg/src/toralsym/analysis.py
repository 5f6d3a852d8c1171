"""Exact odd moments and empirical distribution-symmetry diagnostics.

Odd moments are computed exactly: writing f in complex-exponential form with
coefficients c_nu = (b_nu - i a_nu)/2 (and the conjugate at -nu), the integral
of f^(2k+1) over the torus is the coefficient at frequency zero of the
(2k+1)-fold convolution power, accumulated by dynamic programming over the
reachable partial frequency sums in exact rational arithmetic.  The only
surviving products are those whose signed frequency multiplicities sum to the
zero vector, which is impossible when the frequencies are linearly
independent; the report can enumerate the surviving combinations.

Even signed moments and distribution statistics are grid estimates (single
deterministic sweep), not certified quantities.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .gridsweep import GridSweep
from .trigpoly import TrigPolynomial

__all__ = [
    "OrderTooLarge",
    "MomentCombination",
    "MomentReport",
    "DistributionEstimate",
    "odd_moment_exact",
    "odd_moment_quadrature",
    "alias_free_grid_log2",
    "signed_even_moment",
    "distribution",
]


class OrderTooLarge(RuntimeError):
    """The requested moment order exceeds the configured state budget."""


ComplexFraction = tuple[Fraction, Fraction]  # (re, im)


def _cmul(x: ComplexFraction, y: ComplexFraction) -> ComplexFraction:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _signed_coefficients(f: TrigPolynomial) -> dict[tuple[int, ...], ComplexFraction]:
    coeffs: dict[tuple[int, ...], ComplexFraction] = {}
    for t in f.terms:
        a, b = t.sin_coeff, t.cos_coeff
        coeffs[t.nu] = (b / 2, -a / 2)
        coeffs[tuple(-c for c in t.nu)] = (b / 2, a / 2)
    return coeffs


@dataclass(frozen=True)
class MomentCombination:
    """A zero-sum frequency multiset (grouped with its conjugate) and its
    exact net contribution to the moment."""

    picks: tuple[tuple[tuple[int, ...], int], ...]  # signed frequency -> count
    net_multiplicities: tuple[tuple[tuple[int, ...], int], ...]  # base frequency -> A
    contribution: Fraction

    def to_dict(self) -> dict:
        return {
            "picks": [[list(nu), c] for nu, c in self.picks],
            "net_multiplicities": [[list(nu), a] for nu, a in self.net_multiplicities],
            "contribution": str(self.contribution),
        }


@dataclass(frozen=True)
class MomentReport:
    """Value of the (2k+1)-th moment with the combinatorial evidence."""

    k: int
    order: int
    method: str  # "sparse-convolution" | "quadrature"
    value: Fraction | float
    surviving_combinations: tuple[MomentCombination, ...] | None = None
    combinations_truncated: bool = False
    grid_log2: int | None = None

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "order": self.order,
            "method": self.method,
            "value": str(self.value) if isinstance(self.value, Fraction) else self.value,
            "surviving_combinations": None
            if self.surviving_combinations is None
            else [c.to_dict() for c in self.surviving_combinations],
            "combinations_truncated": self.combinations_truncated,
            "grid_log2": self.grid_log2,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _zero(dim: int) -> tuple[int, ...]:
    return (0,) * dim


def _convolution_moment(
    f: TrigPolynomial, order: int, max_states: int
) -> Fraction:
    coeffs = _signed_coefficients(f)
    states: dict[tuple[int, ...], ComplexFraction] = {_zero(f.dim): (Fraction(1), Fraction(0))}
    for _ in range(order):
        new: dict[tuple[int, ...], ComplexFraction] = {}
        for sigma, amp in states.items():
            for nu, c in coeffs.items():
                key = tuple(s + v for s, v in zip(sigma, nu))
                prod = _cmul(amp, c)
                if key in new:
                    prev = new[key]
                    new[key] = (prev[0] + prod[0], prev[1] + prod[1])
                else:
                    new[key] = prod
        states = {k: v for k, v in new.items() if v[0] or v[1]}
        if len(states) > max_states:
            raise OrderTooLarge(
                f"{len(states)} partial sums exceed the budget of {max_states}"
            )
    re, im = states.get(_zero(f.dim), (Fraction(0), Fraction(0)))
    assert im == 0, "moment of a real polynomial must be real"
    return re


def _surviving_combinations(
    f: TrigPolynomial, order: int, max_enumeration: int
) -> tuple[tuple[MomentCombination, ...] | None, bool]:
    coeffs = _signed_coefficients(f)
    support = sorted(coeffs)
    stored = {t.nu for t in f.terms}
    n_multisets = math.comb(len(support) + order - 1, order)
    if n_multisets > max_enumeration:
        return None, True
    fact = math.factorial(order)
    groups: dict[tuple, ComplexFraction] = {}
    group_picks: dict[tuple, Counter] = {}
    dim = f.dim
    for combo in combinations_with_replacement(support, order):
        total = [0] * dim
        for nu in combo:
            for i, c in enumerate(nu):
                total[i] += c
        if any(total):
            continue
        picks = Counter(combo)
        multinomial = fact
        for c in picks.values():
            multinomial //= math.factorial(c)
        contribution: ComplexFraction = (Fraction(multinomial), Fraction(0))
        for nu, cnt in picks.items():
            for _ in range(cnt):
                contribution = _cmul(contribution, coeffs[nu])
        conj = Counter({tuple(-c for c in nu): cnt for nu, cnt in picks.items()})
        key = min(
            tuple(sorted(picks.items())),
            tuple(sorted(conj.items())),
        )
        if key in groups:
            prev = groups[key]
            groups[key] = (prev[0] + contribution[0], prev[1] + contribution[1])
        else:
            groups[key] = contribution
            group_picks[key] = picks
    out = []
    for key, (re, im) in sorted(groups.items()):
        assert im == 0, "conjugate-grouped contribution must be real"
        if re == 0:
            continue
        picks = group_picks[key]
        net: Counter = Counter()
        for nu, cnt in picks.items():
            if nu in stored:
                net[nu] += cnt
            else:
                net[tuple(-c for c in nu)] -= cnt
        out.append(
            MomentCombination(
                picks=tuple(sorted(picks.items())),
                net_multiplicities=tuple(sorted(net.items())),
                contribution=re,
            )
        )
    return tuple(out), False


def odd_moment_exact(
    f: TrigPolynomial,
    k: int,
    include_combinations: bool = True,
    max_states: int = 250_000,
    max_enumeration: int = 200_000,
) -> MomentReport:
    """Exact rational value of the (2k+1)-th moment of f over the torus.

    Raises :class:`OrderTooLarge` when the partial-sum map exceeds
    ``max_states``.  When ``include_combinations`` is set, the surviving
    zero-sum frequency combinations (grouped with their conjugates, zero net
    contributions dropped) are attached, unless their enumeration exceeds
    ``max_enumeration``, which only truncates the listing, never the value.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    order = 2 * k + 1
    value = _convolution_moment(f, order, max_states)
    combos: tuple[MomentCombination, ...] | None = None
    truncated = False
    if include_combinations:
        combos, truncated = _surviving_combinations(f, order, max_enumeration)
        if combos is not None:
            total = sum((c.contribution for c in combos), Fraction(0))
            assert total == value, "combination ledger must reproduce the moment"
    return MomentReport(
        k=k,
        order=order,
        method="sparse-convolution",
        value=value,
        surviving_combinations=combos,
        combinations_truncated=truncated,
    )


def alias_free_grid_log2(f: TrigPolynomial, k: int) -> int:
    """Smallest grid_log2 whose Riemann sum integrates f^(2k+1) without
    aliasing: N must exceed (2k+1) * max frequency component."""
    order = 2 * k + 1
    max_comp = max(abs(c) for t in f.terms for c in t.nu)
    need = order * max_comp + 1
    return max(1, (need - 1).bit_length())


def odd_moment_quadrature(
    f: TrigPolynomial, k: int, grid_log2: int | None = None, offset: str = "half"
) -> MomentReport:
    """Grid Riemann-sum estimate of the (2k+1)-th moment.

    With ``grid_log2`` at least :func:`alias_free_grid_log2` the sum is exact
    up to floating rounding; this is the independent cross-check for the
    sparse-convolution route.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if grid_log2 is None:
        grid_log2 = alias_free_grid_log2(f, k)
    order = 2 * k + 1
    sweep = GridSweep(f, grid_log2, offset)
    chunks = [float(np.sum(v ** order)) for _, v in sweep.iter_values()]
    return MomentReport(
        k=k,
        order=order,
        method="quadrature",
        value=math.fsum(chunks) / sweep.n_points,
        grid_log2=grid_log2,
    )


def signed_even_moment(
    f: TrigPolynomial, k: int, grid_log2: int, offset: str = "half"
) -> float:
    """Grid estimate of the integral of f^(2k) * sign(f); not certified."""
    if k < 0:
        raise ValueError("k must be >= 0")
    sweep = GridSweep(f, grid_log2, offset)
    chunks = []
    for _, v in sweep.iter_values():
        if k == 0:
            chunks.append(float(np.count_nonzero(v > 0.0) - np.count_nonzero(v < 0.0)))
        else:
            chunks.append(float(np.sum(np.sign(v) * v ** (2 * k))))
    return math.fsum(chunks) / sweep.n_points


@dataclass(frozen=True)
class DistributionEstimate:
    """Histogram, EDF symmetry, sign balance, and L^p balance of one sweep.

    ``sign_ratio`` is the volume ratio vol{f<0} / vol{f>0}; a value of 1
    indicates sign equidistribution, values away from 1 refute it.
    ``lp_ratios`` maps p to (integral of |f|^p over {f>0} / over {f<0})^(1/p).
    """

    grid_log2: int
    offset: str
    samples: int
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    pos_count: int
    neg_count: int
    zero_count: int
    edf_symmetry: float
    sign_ratio: float
    lp_ratios: dict[float, float]
    lp_integrals: dict[float, tuple[float, float]]
    extrema: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "grid_log2": self.grid_log2,
            "offset": self.offset,
            "samples": self.samples,
            "bin_edges": list(self.bin_edges),
            "counts": list(self.counts),
            "pos_count": self.pos_count,
            "neg_count": self.neg_count,
            "zero_count": self.zero_count,
            "edf_symmetry": self.edf_symmetry,
            "sign_ratio": self.sign_ratio,
            "lp_ratios": {str(p): v for p, v in self.lp_ratios.items()},
            "lp_integrals": {str(p): list(v) for p, v in self.lp_integrals.items()},
            "extrema": list(self.extrema),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def distribution(
    f: TrigPolynomial,
    grid_log2: int,
    bins: int = 64,
    p_list: tuple[float, ...] = (1.0, 2.0, 4.0),
    offset: str = "half",
) -> DistributionEstimate:
    """One sweep over the grid collecting all distribution diagnostics.

    ``bins`` must be even so that 0 is a bin edge and the binning is exactly
    mirror-symmetric; the range is the coefficient amplitude bound, so no
    sample can fall outside.
    """
    if bins < 2 or bins % 2:
        raise ValueError("bins must be a positive even count")
    if any(p <= 0 for p in p_list):
        raise ValueError("p values must be positive")
    half = bins // 2
    top = f.coeff_l1_bound + 1e-9  # sup|f| plus evaluation-error headroom
    step = top / half
    pos_edges = step * np.arange(1, half + 1)
    pos_edges[-1] = top
    edges = np.concatenate([-pos_edges[::-1], [0.0], pos_edges])
    sweep = GridSweep(f, grid_log2, offset)
    hist = np.zeros(bins, dtype=np.int64)
    pos = neg = 0
    vmax = -math.inf
    vmin = math.inf
    pos_sums = {p: [] for p in p_list}
    neg_sums = {p: [] for p in p_list}
    for _, v in sweep.iter_values():
        hist += np.histogram(v, bins=edges)[0]
        pos += int(np.count_nonzero(v > 0.0))
        neg += int(np.count_nonzero(v < 0.0))
        vmax = max(vmax, float(v.max()))
        vmin = min(vmin, float(v.min()))
        vpos = v[v > 0.0]
        vneg = -v[v < 0.0]
        for p in p_list:
            pos_sums[p].append(float(np.sum(vpos ** p)))
            neg_sums[p].append(float(np.sum(vneg ** p)))
    samples = sweep.n_points
    assert int(hist.sum()) == samples, "histogram range must cover all samples"
    cum = np.concatenate([[0], np.cumsum(hist)])  # cum[j] = #{v < edges[j]}
    edf = max(
        abs((int(cum[half + j]) + int(cum[half - j])) / samples - 1.0)
        for j in range(1, half + 1)
    )
    lp_ratios = {}
    lp_integrals = {}
    for p in p_list:
        sp = math.fsum(pos_sums[p])
        sn = math.fsum(neg_sums[p])
        lp_integrals[p] = (sp / samples, sn / samples)
        lp_ratios[p] = (sp / sn) ** (1.0 / p) if sn > 0.0 else math.inf
    return DistributionEstimate(
        grid_log2=grid_log2,
        offset=offset,
        samples=samples,
        bin_edges=tuple(float(e) for e in edges),
        counts=tuple(int(c) for c in hist),
        pos_count=pos,
        neg_count=neg,
        zero_count=samples - pos - neg,
        edf_symmetry=edf,
        sign_ratio=neg / pos if pos else math.inf,
        lp_ratios=lp_ratios,
        lp_integrals=lp_integrals,
        extrema=(vmax, vmin),
    )
