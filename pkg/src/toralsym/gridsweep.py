"""Deterministic chunked evaluation of trigonometric polynomials on dyadic grids.

Grid points are x_l = (j_l + offset)/N with N = 2^k, so every phase
nu . x is an exact multiple of 1/(2N): evaluation reduces to integer index
arithmetic modulo 2N plus a lookup into per-term value tables

    tab_i[m] = a_i sin(pi m / N) + b_i cos(pi m / N),   m = 0 .. 2N-1.

The sine table is built from one quadrant and extended by its exact
symmetries, so tab[m+N] is the bitwise negation of tab[m]; any translation
that maps grid points to grid points therefore negates computed values
exactly, and counts on both sides of symmetric thresholds match exactly.

Because indices are exact, the per-point rounding error has a uniform
computable bound (table-entry error plus summation error) independent of the
point, which is what the certification error budget consumes.

Values are produced block by block in flat row-major order; blocks are
independent, so parallel runs over disjoint block ranges reduce to the same
integer counts regardless of scheduling.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .trigpoly import EPS, TrigPolynomial

__all__ = ["GridSweep", "MAX_POINTS"]

CHUNK = 1 << 20  # target points per block
TABLE_MAX = 1 << 22  # largest 2N for which value tables are built
# Budget for one numpy sin/cos evaluation on a reduced argument (tableless
# path) and for the table-entry construction; validated against a 256-bit
# reference in the test suite.
VEC_TRIG_ERR = 2.0 ** -48
PHASE_ERR = EPS * 2.0 * math.pi  # fl(pi * (m/N)) vs exact, m/N dyadic
MAX_POINTS = 1 << 32


class GridSweep:
    """Block iterator over f's values at the N^dim dyadic grid points.

    Not thread-safe (blocks share scratch buffers); create one instance per
    worker.  ``offset`` is "half" for cell centers (j+1/2)/N or "zero" for
    lattice points j/N.
    """

    def __init__(self, poly: TrigPolynomial, grid_log2: int, offset: str = "half"):
        if grid_log2 < 1:
            raise ValueError("grid_log2 must be >= 1")
        if offset not in ("half", "zero"):
            raise ValueError(f"unknown offset {offset!r}")
        self.poly = poly
        self.grid_log2 = grid_log2
        self.offset = offset
        self.n = 1 << grid_log2
        self.dim = poly.dim
        self.n_points = self.n ** self.dim
        if self.n_points > MAX_POINTS:
            raise ValueError(f"grid of {self.n_points} points is too large")
        self.two_n = 2 * self.n
        self.mask = self.two_n - 1
        toff = 1 if offset == "half" else 0
        self._freqs = [t.nu for t in poly.terms]
        self._shift = [sum(t.nu) * toff for t in poly.terms]

        self._streaming = self.dim == 1 and self.n > CHUNK
        self._use_table = self.two_n <= TABLE_MAX
        if self._use_table:
            self._tables = self._build_tables()
        if self._streaming:
            self.n_blocks = -(-self.n // CHUNK)
            self.block_points = CHUNK
            self._trail_axes = 0
        else:
            t_axes = 1
            while t_axes < self.dim and self.n ** (t_axes + 1) <= CHUNK:
                t_axes += 1
            self._trail_axes = t_axes
            self.block_points = self.n ** t_axes
            self.n_blocks = self.n ** (self.dim - t_axes)
            self._trails = [self._trail_indices(i) for i in range(len(poly.terms))]
            self._ibuf = np.empty(self.block_points, dtype=np.int32)
            self._fbuf = np.empty(self.block_points, dtype=np.float64)
            self._acc = np.empty(self.block_points, dtype=np.float64)
        self.eval_error_bound = self._error_bound()

    # -- construction --------------------------------------------------------

    def _build_tables(self) -> list[np.ndarray]:
        n, two_n = self.n, self.two_n
        half = n // 2
        quadrant = np.sin(np.pi * (np.arange(half + 1) / n))
        sin_tab = np.empty(two_n)
        sin_tab[: half + 1] = quadrant
        sin_tab[half + 1 : n + 1] = quadrant[half - 1 :: -1]  # sin(pi - t) = sin t
        sin_tab[n + 1 :] = -sin_tab[1:n]  # sin(t + pi) = -sin t, bit-exact
        cos_tab = np.concatenate([sin_tab[half:], sin_tab[:half]])  # cos t = sin(t + pi/2)
        tables = []
        for t in self.poly.terms:
            a, b = float(t.sin_coeff), float(t.cos_coeff)
            # a*(-s) + b*(-c) == -(a*s + b*c) in IEEE arithmetic, so the
            # half-period negation symmetry survives into the combined table
            tables.append(a * sin_tab + b * cos_tab)
        return tables

    def _trail_indices(self, i: int) -> np.ndarray:
        nu = self._freqs[i]
        trail = np.zeros((), dtype=np.int64)
        for axis in range(self.dim - self._trail_axes, self.dim):
            contrib = (2 * nu[axis]) * np.arange(self.n, dtype=np.int64)
            trail = trail[..., None] + contrib
        trail = (trail + self._shift[i]) % self.two_n
        return np.ascontiguousarray(trail.ravel(), dtype=np.int32)

    def _error_bound(self) -> float:
        habs = self.poly._coeff_abs_sums
        rep = math.fsum(self.poly._coeff_repr_errors)
        per_term = math.fsum(h * (PHASE_ERR + VEC_TRIG_ERR + 1.5 * EPS) for h in habs)
        summation = EPS * len(habs) * math.fsum(habs)
        return math.nextafter((per_term + rep + summation) * (1.0 + 1e-9), math.inf)

    # -- geometry ------------------------------------------------------------

    def block_start(self, b: int) -> int:
        return b * (CHUNK if self._streaming else self.block_points)

    def block_size(self, b: int) -> int:
        if self._streaming:
            return min(CHUNK, self.n - b * CHUNK)
        return self.block_points

    def decompose(self, flat: int) -> tuple[int, ...]:
        js = []
        for _ in range(self.dim):
            flat, j = divmod(flat, self.n)
            js.append(j)
        return tuple(reversed(js))

    def center(self, flat: int) -> tuple[Fraction, ...]:
        """Exact coordinates of the grid point with the given flat index."""
        toff = 1 if self.offset == "half" else 0
        return tuple(Fraction(2 * j + toff, self.two_n) for j in self.decompose(flat))

    def cell_halfwidth(self) -> Fraction:
        return Fraction(1, self.two_n)

    # -- evaluation ----------------------------------------------------------

    def _lead_index(self, b: int, i: int) -> int:
        nu = self._freqs[i]
        acc = 0
        rem = b
        for axis in range(self.dim - self._trail_axes - 1, -1, -1):
            rem, j = divmod(rem, self.n)
            acc += 2 * nu[axis] * j
        return acc % self.two_n

    def values(self, b: int) -> np.ndarray:
        """Values at block b, flat row-major order.  The array is scratch:
        it is overwritten by the next call."""
        if self._streaming:
            return self._values_streaming(b)
        acc, fbuf, ibuf = self._acc, self._fbuf, self._ibuf
        for i, trail in enumerate(self._trails):
            np.add(trail, self._lead_index(b, i), out=ibuf)
            np.bitwise_and(ibuf, self.mask, out=ibuf)
            np.take(self._tables[i], ibuf, out=fbuf)
            if i == 0:
                acc[:] = fbuf
            else:
                np.add(acc, fbuf, out=acc)
        return acc

    def _values_streaming(self, b: int) -> np.ndarray:
        lo = b * CHUNK
        hi = min(self.n, lo + CHUNK)
        j = np.arange(lo, hi, dtype=np.int64)
        acc = None
        for i, t in enumerate(self.poly.terms):
            k = (2 * self._freqs[i][0] * j + self._shift[i]) & self.mask
            if self._use_table:
                v = self._tables[i][k]
            else:
                theta = (2.0 * math.pi) * (k * (1.0 / self.two_n))  # k/2N exact
                v = float(t.sin_coeff) * np.sin(theta) + float(t.cos_coeff) * np.cos(theta)
            acc = v if acc is None else acc + v
        return acc

    def iter_values(self, b_lo: int = 0, b_hi: int | None = None):
        """Yield (flat_start, values) over a block range."""
        if b_hi is None:
            b_hi = self.n_blocks
        for b in range(b_lo, b_hi):
            yield self.block_start(b), self.values(b)

    def count_signs(
        self, neg_threshold: float, pos_threshold: float, b_lo: int = 0, b_hi: int | None = None
    ) -> tuple[int, int]:
        """Exact counts of values < neg_threshold and > pos_threshold."""
        neg = pos = 0
        for _, v in self.iter_values(b_lo, b_hi):
            neg += int(np.count_nonzero(v < neg_threshold))
            pos += int(np.count_nonzero(v > pos_threshold))
        return neg, pos
