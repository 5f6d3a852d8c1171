"""Error-budgeted grid certification of sign volumes.

The sweep checks f at every dyadic grid point against the threshold
+-(threshold_factor * e), where e bounds the variation of f over one grid
cell via the gradient.  For a counted-negative center x and any y in its
cell,

    f(y) = [f(y) - f(x)] + [f(x) - computed] + computed
         < e + accuracy_budget_factor * e - threshold_factor * e < 0,

provided the tracked evaluation error stayed below accuracy_budget_factor*e
(the certificate's ``sound`` flag).  Counts are exact integers accumulated
per block, so results are bit-identical for any thread count or chunking.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gridsweep import GridSweep
from .trigpoly import TrigPolynomial, gradient_bound, parse

__all__ = [
    "CertificationConfig",
    "GridCertificate",
    "paper_config",
    "cell_error",
    "certify_signs",
    "certify_claim",
    "sample_flagged_cells",
]


@dataclass(frozen=True)
class CertificationConfig:
    """Sweep parameters; defaults follow the published certification run."""

    grid_log2: int
    gradient_override: float | None = None
    cell_error_formula: str = "paper"  # G*sqrt(n)*L; "half" uses the tight G*sqrt(n)*L/2
    threshold_factor: float = 1.1
    accuracy_budget_factor: float = 0.05
    offset: str = "half"  # cell centers (j+1/2)/N; "zero" for lattice points j/N
    threads: int = 1

    def __post_init__(self):
        if self.grid_log2 < 1:
            raise ValueError("grid_log2 must be >= 1")
        if self.cell_error_formula not in ("paper", "half"):
            raise ValueError(f"unknown cell error formula {self.cell_error_formula!r}")
        if self.offset not in ("half", "zero"):
            raise ValueError(f"unknown offset {self.offset!r}")
        if not self.threshold_factor > 1.0:
            raise ValueError("threshold_factor must exceed 1")
        if not 0.0 < self.accuracy_budget_factor < self.threshold_factor - 1.0:
            raise ValueError("need 0 < accuracy_budget_factor < threshold_factor - 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {
            "grid_log2": self.grid_log2,
            "gradient_override": self.gradient_override,
            "cell_error_formula": self.cell_error_formula,
            "threshold_factor": self.threshold_factor,
            "accuracy_budget_factor": self.accuracy_budget_factor,
            "offset": self.offset,
            "threads": self.threads,
        }


def paper_config(grid_log2: int, threads: int = 1, offset: str = "half") -> CertificationConfig:
    """The published constants: gradient bound 6*pi, full-diagonal cell error,
    threshold 1.1e, accuracy budget 0.05e."""
    return CertificationConfig(
        grid_log2=grid_log2,
        gradient_override=6.0 * math.pi,
        cell_error_formula="paper",
        threshold_factor=1.1,
        accuracy_budget_factor=0.05,
        offset=offset,
        threads=threads,
    )


def cell_error(grad_bound: float, mesh: float, dim: int, formula: str = "paper") -> float:
    """Bound on |f(x) - f(y)| over a cube of side ``mesh``, rounded up.

    "paper" uses G*sqrt(n)*L (full diagonal); "half" the center-to-corner
    distance G*sqrt(n)*L/2, which already suffices for centered cells.
    """
    if grad_bound <= 0.0 or mesh <= 0.0:
        raise ValueError("gradient bound and mesh must be positive")
    e = grad_bound * math.sqrt(dim) * mesh
    if formula == "half":
        e *= 0.5
    elif formula != "paper":
        raise ValueError(f"unknown cell error formula {formula!r}")
    return math.nextafter(e * (1.0 + 1e-14), math.inf)


@dataclass(frozen=True)
class GridCertificate:
    """Certified counts and the full error budget of one sweep."""

    config: CertificationConfig
    dim: int
    n_cells: int
    m_negative: int
    m_positive: int
    gradient_bound_used: float
    cell_err: float
    threshold: float
    max_eval_error: float
    sound: bool
    wall_time_s: float

    @property
    def neg_fraction(self) -> Fraction:
        return Fraction(self.m_negative, self.n_cells)

    @property
    def pos_fraction(self) -> Fraction:
        return Fraction(self.m_positive, self.n_cells)

    @property
    def uncertain_fraction(self) -> Fraction:
        return 1 - self.neg_fraction - self.pos_fraction

    def to_dict(self) -> dict:
        d = self.config.to_dict()
        d.update(
            dim=self.dim,
            n_cells=self.n_cells,
            m_negative=self.m_negative,
            m_positive=self.m_positive,
            neg_fraction=float(self.neg_fraction),
            pos_fraction=float(self.pos_fraction),
            uncertain_fraction=float(self.uncertain_fraction),
            gradient_bound_used=self.gradient_bound_used,
            cell_err=self.cell_err,
            threshold=self.threshold,
            max_eval_error=self.max_eval_error,
            sound=self.sound,
            wall_time_s=self.wall_time_s,
        )
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _thresholds(f: TrigPolynomial, config: CertificationConfig) -> tuple[float, float, float]:
    grad = gradient_bound(f, config.gradient_override)
    e = cell_error(grad, 2.0 ** -config.grid_log2, f.dim, config.cell_error_formula)
    # round the threshold up: strictly more conservative counting
    thr = math.nextafter(config.threshold_factor * e, math.inf)
    return grad, e, thr


def _count_range(args) -> tuple[int, int]:
    poly_json, grid_log2, offset, neg_thr, pos_thr, b_lo, b_hi = args
    sweep = GridSweep(parse(poly_json), grid_log2, offset)
    return sweep.count_signs(neg_thr, pos_thr, b_lo, b_hi)


def _split_ranges(n_blocks: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n_blocks))
    step, extra = divmod(n_blocks, parts)
    ranges = []
    lo = 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        ranges.append((lo, hi))
        lo = hi
    return ranges


def certify_signs(f: TrigPolynomial, config: CertificationConfig) -> GridCertificate:
    """Sweep the grid and certify lower bounds on vol{f<0} and vol{f>0}.

    A budget overrun is reported through sound=False on the certificate,
    never raised; the counts are still exact counts of the threshold test.
    """
    t0 = time.perf_counter()
    grad, e, thr = _thresholds(f, config)
    sweep = GridSweep(f, config.grid_log2, config.offset)
    if config.threads == 1 or sweep.n_blocks < 2:
        neg, pos = sweep.count_signs(-thr, thr)
    else:
        payload = f.to_json()
        jobs = [
            (payload, config.grid_log2, config.offset, -thr, thr, lo, hi)
            for lo, hi in _split_ranges(sweep.n_blocks, config.threads)
        ]
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            parts = list(pool.map(_count_range, jobs))
        neg = sum(p[0] for p in parts)
        pos = sum(p[1] for p in parts)
    max_err = sweep.eval_error_bound
    return GridCertificate(
        config=config,
        dim=f.dim,
        n_cells=sweep.n_points,
        m_negative=neg,
        m_positive=pos,
        gradient_bound_used=grad,
        cell_err=e,
        threshold=thr,
        max_eval_error=max_err,
        sound=max_err < config.accuracy_budget_factor * e,
        wall_time_s=time.perf_counter() - t0,
    )


def certify_claim(
    f: TrigPolynomial, config: CertificationConfig, sign: str, fraction: float
) -> tuple[bool, GridCertificate]:
    """True iff a sound certificate proves vol{f sign 0} >= fraction."""
    if sign not in ("neg", "pos"):
        raise ValueError(f"sign must be 'neg' or 'pos', got {sign!r}")
    if not 0.0 < fraction < 1.0:
        raise ValueError("claimed fraction must lie in (0,1)")
    cert = certify_signs(f, config)
    achieved = cert.neg_fraction if sign == "neg" else cert.pos_fraction
    return cert.sound and achieved >= Fraction(fraction), cert


def sample_flagged_cells(
    f: TrigPolynomial,
    config: CertificationConfig,
    sign: str = "neg",
    count: int = 20,
    seed: int = 0,
    certificate: GridCertificate | None = None,
) -> list[tuple[Fraction, ...]]:
    """Exact centers of ``count`` uniformly sampled flagged cells.

    Streams the same deterministic sweep, selecting flagged cells by rank,
    so the sample is reproducible for a fixed seed.
    """
    if certificate is None:
        certificate = certify_signs(f, config)
    total = certificate.m_negative if sign == "neg" else certificate.m_positive
    if total == 0:
        return []
    _, _, thr = _thresholds(f, config)
    rng = np.random.default_rng(seed)
    ranks = sorted(int(r) for r in rng.choice(total, size=min(count, total), replace=False))
    sweep = GridSweep(f, config.grid_log2, config.offset)
    centers = []
    want = 0
    seen = 0
    for start, v in sweep.iter_values():
        if want >= len(ranks):
            break
        flags = np.nonzero(v < -thr if sign == "neg" else v > thr)[0]
        here = len(flags)
        while want < len(ranks) and ranks[want] < seen + here:
            flat = start + int(flags[ranks[want] - seen])
            centers.append(sweep.center(flat))
            want += 1
        seen += here
    return centers
