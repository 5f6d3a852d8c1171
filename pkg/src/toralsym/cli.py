"""Command-line interface: analyze, certify, moments, dist, reproduce-cx.

Exit codes form a stable contract for CI: 0 success / claim verified,
1 claim failed, 2 evaluation-error budget exceeded (certificate unsound),
3 input error.  Every emitted JSON artifact embeds the run manifest that
produced it (command echo, config hash, input digest, version, wall time).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .analysis import (
    OrderTooLarge,
    distribution,
    odd_moment_exact,
    odd_moment_quadrature,
)
from .certify import CertificationConfig, certify_signs, paper_config
from .symmetry import (
    NotABasis,
    NotInClassS,
    covering_matrix,
    dyadic_reduce,
    find_class_s_translation,
    find_semi_integral,
    verify_antisymmetry,
)
from .trigpoly import PolynomialFormatError, classify, load, t3_counterexample

EXIT_OK = 0
EXIT_CLAIM_FAILED = 1
EXIT_UNSOUND = 2
EXIT_INPUT_ERROR = 3

PAPER_COARSE_COUNT = 1123200  # published m_negative at grid_log2 = 7


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems are input errors (exit 3)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="toralsym", description=__doc__)
    parser.add_argument("--version", action="version", version=f"toralsym {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--out", metavar="PATH", help="write the JSON report to PATH")
    common.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="spectral class and symmetry certificates")
    p.add_argument("poly", help="polynomial JSON file")

    p = sub.add_parser("certify", parents=[common], help="certified sign-volume lower bounds")
    p.add_argument("poly", help="polynomial JSON file")
    p.add_argument("--grid-log2", type=int, required=True, metavar="K", help="2^K points per axis")
    grad = p.add_mutually_exclusive_group()
    grad.add_argument("--paper-constants", action="store_true",
                      help="published run: gradient bound 6*pi, factors 1.1/0.05")
    grad.add_argument("--grad-override", type=float, metavar="X",
                      help="externally justified gradient sup bound")
    p.add_argument("--formula", choices=["paper", "half"], default="paper",
                   help="cell error: G*sqrt(n)*L or half of it")
    p.add_argument("--offset", choices=["half", "zero"], default="half",
                   help="grid at cell centers (j+1/2)/N or lattice points j/N")
    p.add_argument("--claim", metavar="SIGN:FRACTION", help="e.g. neg:0.52")

    p = sub.add_parser("moments", parents=[common], help="odd moments of the polynomial")
    p.add_argument("poly", help="polynomial JSON file")
    p.add_argument("--k", type=int, required=True, help="moment order 2k+1")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact sparse convolution (default)")
    mode.add_argument("--quad", action="store_true", help="grid quadrature estimate")
    p.add_argument("--grid-log2", type=int, default=None,
                   help="quadrature grid (default: smallest alias-free grid)")

    p = sub.add_parser("dist", parents=[common], help="distribution symmetry diagnostics")
    p.add_argument("poly", help="polynomial JSON file")
    p.add_argument("--grid-log2", type=int, required=True)
    p.add_argument("--bins", type=int, default=64, help="even histogram bin count")
    p.add_argument("--p", default="1,2,4", help="comma-separated L^p exponents")

    p = sub.add_parser("reproduce-cx", parents=[common],
                       help="reproduce the asymmetric T^3 counterexample certification")
    p.add_argument("--grid-log2", type=int, required=True, metavar="K", help="5 <= K <= 12")
    return parser


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _manifest(args: argparse.Namespace, input_digest: str | None, t0: float,
              outputs: list[str]) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "json")}
    return {
        "command": sys.argv[1:] if sys.argv[0].endswith(("toralsym", "cli.py")) else vars(args)["command"],
        "config_hash": _digest(json.dumps(config, sort_keys=True, default=str).encode()),
        "input_digest": input_digest,
        "tool_version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 6),
        "outputs": outputs,
    }


def _emit(args: argparse.Namespace, doc: dict, human_lines: list[str],
          input_digest: str | None, t0: float) -> None:
    outputs = [args.out] if args.out else []
    doc["manifest"] = _manifest(args, input_digest, t0, outputs)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        for line in human_lines:
            print(line)
        if args.out:
            print(f"report written to {args.out}")


def _load_poly(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        poly = load(path)
    except PolynomialFormatError as exc:
        raise PolynomialFormatError(f"{path}: {exc}") from exc
    return poly, _digest(data)


def _cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    f, digest = _load_poly(args.poly)
    spec = classify(f)
    trace = dyadic_reduce(f)
    lines = [f"polynomial: {f.describe()}"]
    spectral = {
        "is_eigenfunction": spec.is_eigenfunction,
        "eigenvalue": spec.eigenvalue,
        "lambda_mod_4": spec.lambda_mod_4,
        "rank": spec.rank,
        "n_terms": len(f.terms),
        "in_class_s": spec.in_class_s,
    }
    if spec.is_eigenfunction:
        lines.append(
            f"eigenfunction: lambda = {spec.eigenvalue} (mod 4 = {spec.lambda_mod_4})"
        )
    else:
        lines.append("not an eigenfunction (mixed squared norms)")
    lines.append(
        f"frequency rank {spec.rank} of {len(f.terms)} terms; "
        f"independent support: {'yes' if spec.in_class_s else 'no'}"
    )
    lines.append(f"dyadic reduction: {trace.steps} halving(s)")
    doc: dict = {
        "polynomial": f.to_dict(),
        "spectral": spectral,
        "reduction": {"steps": trace.steps, "reduced": trace.reduced.to_dict()},
    }

    search = find_semi_integral(trace.reduced)
    if search.certificate is not None:
        cert = search.certificate
        report = verify_antisymmetry(trace.reduced, cert, samples=256, seed=args.seed)
        u_str = "(" + ", ".join(str(q) for q in cert.u) + ")"
        lines.append(f"semi-integral antisymmetry: f(x + {u_str}) = -f(x), w = {cert.witness['w']}")
        lines.append(
            f"  exact check passed; numeric max |f(x+u)+f(x)| = {report.max_abs_sum:.3e}"
        )
        doc["semi_integral"] = {"certificate": cert.to_dict(), "verify": report.to_dict()}
    else:
        obs = search.obstruction
        lines.append("no semi-integral translation exists; parity obstruction:")
        lines.append(f"  {obs.describe()}")
        doc["semi_integral"] = {
            "certificate": None,
            "obstruction": {
                "row_indices": list(obs.row_indices),
                "frequencies": [list(nu) for nu in obs.frequencies],
                "description": obs.describe(),
            },
        }

    try:
        cert = find_class_s_translation(f)
        report = verify_antisymmetry(f, cert, samples=256, seed=args.seed)
        u_str = "(" + ", ".join(str(q) for q in cert.u) + ")"
        lines.append(f"independent-frequency translation: u = {u_str}")
        doc["class_s"] = {"certificate": cert.to_dict(), "verify": report.to_dict()}
    except NotInClassS as exc:
        lines.append(f"independent-frequency translation: not applicable ({exc})")
        doc["class_s"] = {"certificate": None, "error": str(exc)}

    try:
        cov = covering_matrix(f)
        lines.append(f"covering matrix: N = {cov.N}, degree {cov.degree}, B = {list(cov.B)}")
        doc["covering"] = cov.to_dict()
    except NotABasis as exc:
        lines.append(f"covering matrix: not applicable ({exc})")
        doc["covering"] = {"error": str(exc)}

    _emit(args, doc, lines, digest, t0)
    return EXIT_OK


def _parse_claim(text: str) -> tuple[str, float]:
    try:
        sign, frac = text.split(":")
        fraction = float(frac)
    except ValueError as exc:
        raise PolynomialFormatError(f"bad claim {text!r}, expected SIGN:FRACTION") from exc
    if sign not in ("neg", "pos") or not 0.0 < fraction < 1.0:
        raise PolynomialFormatError(f"bad claim {text!r}: sign neg|pos, fraction in (0,1)")
    return sign, fraction


def _certificate_lines(cert) -> list[str]:
    return [
        f"grid: {cert.n_cells} cells (2^{cert.config.grid_log2} per axis, offset {cert.config.offset})",
        f"cell error e = {cert.cell_err:.6g} (gradient bound {cert.gradient_bound_used:.6g}, "
        f"{cert.config.cell_error_formula} formula); threshold {cert.threshold:.6g}",
        f"negative: {cert.m_negative} cells ({float(cert.neg_fraction):.4%})",
        f"positive: {cert.m_positive} cells ({float(cert.pos_fraction):.4%})",
        f"uncertain: {float(cert.uncertain_fraction):.4%}",
        f"max evaluation error {cert.max_eval_error:.3e} vs budget "
        f"{cert.config.accuracy_budget_factor * cert.cell_err:.3e} -> "
        f"{'sound' if cert.sound else 'BUDGET EXCEEDED (unsound)'}",
        f"wall time {cert.wall_time_s:.3f} s",
    ]


def _cmd_certify(args) -> int:
    t0 = time.perf_counter()
    f, digest = _load_poly(args.poly)
    if args.paper_constants:
        config = paper_config(args.grid_log2, threads=args.threads, offset=args.offset)
        if args.formula != config.cell_error_formula:
            config = CertificationConfig(
                grid_log2=args.grid_log2, gradient_override=config.gradient_override,
                cell_error_formula=args.formula, offset=args.offset, threads=args.threads,
            )
    else:
        config = CertificationConfig(
            grid_log2=args.grid_log2,
            gradient_override=args.grad_override,
            cell_error_formula=args.formula,
            offset=args.offset,
            threads=args.threads,
        )
    cert = certify_signs(f, config)
    lines = _certificate_lines(cert)
    doc = {"certificate": cert.to_dict()}
    status = EXIT_OK if cert.sound else EXIT_UNSOUND
    if args.claim:
        sign, fraction = _parse_claim(args.claim)
        achieved = cert.neg_fraction if sign == "neg" else cert.pos_fraction
        ok = cert.sound and achieved >= Fraction(fraction)
        lines.append(
            f"claim vol{{f {'<' if sign == 'neg' else '>'} 0}} >= {fraction}: "
            f"{'VERIFIED' if ok else 'NOT VERIFIED'}"
        )
        doc["claim"] = {"sign": sign, "fraction": fraction, "verified": ok}
        if cert.sound:
            status = EXIT_OK if ok else EXIT_CLAIM_FAILED
    _emit(args, doc, lines, digest, t0)
    return status


def _cmd_moments(args) -> int:
    t0 = time.perf_counter()
    f, digest = _load_poly(args.poly)
    if args.k < 0:
        raise PolynomialFormatError("--k must be >= 0")
    if args.quad:
        report = odd_moment_quadrature(f, args.k, args.grid_log2)
        lines = [
            f"moment of order {report.order} (quadrature, grid 2^{report.grid_log2}): "
            f"{report.value:.12g}"
        ]
    else:
        report = odd_moment_exact(f, args.k)
        lines = [f"moment of order {report.order} (exact): {report.value}"]
        combos = report.surviving_combinations
        if combos is not None:
            lines.append(f"surviving zero-sum frequency combinations: {len(combos)}")
            for c in combos[:10]:
                picks = ", ".join(f"{nu}x{cnt}" for nu, cnt in c.picks)
                lines.append(f"  [{picks}] contributes {c.contribution}")
            if len(combos) > 10:
                lines.append(f"  ... {len(combos) - 10} more")
        elif report.combinations_truncated:
            lines.append("surviving combinations not enumerated (too many multisets)")
    _emit(args, {"moment": report.to_dict()}, lines, digest, t0)
    return EXIT_OK


def _cmd_dist(args) -> int:
    t0 = time.perf_counter()
    f, digest = _load_poly(args.poly)
    try:
        p_list = tuple(float(p) for p in args.p.split(",") if p)
    except ValueError as exc:
        raise PolynomialFormatError(f"bad --p list {args.p!r}") from exc
    est = distribution(f, args.grid_log2, bins=args.bins, p_list=p_list)
    lines = [
        f"samples: {est.samples} (grid 2^{est.grid_log2} per axis)",
        f"sign counts: {est.neg_count} negative / {est.pos_count} positive / {est.zero_count} zero",
        f"sign ratio vol-/vol+: {est.sign_ratio:.6f}",
        f"EDF symmetry defect: {est.edf_symmetry:.3e}",
        f"extrema: max {est.extrema[0]:.9f}, min {est.extrema[1]:.9f}",
    ]
    for p in p_list:
        lines.append(f"L^{p} balance (pos/neg)^(1/p): {est.lp_ratios[p]:.6f}")
    _emit(args, {"distribution": est.to_dict()}, lines, digest, t0)
    return EXIT_OK


def _cmd_reproduce_cx(args) -> int:
    t0 = time.perf_counter()
    if not 5 <= args.grid_log2 <= 12:
        raise PolynomialFormatError("--grid-log2 must lie in [5, 12]")
    g = t3_counterexample()
    lines = [f"certifying g = {g.describe()}"]
    runs = []
    offsets = ["half", "zero"] if args.grid_log2 == 7 else ["half"]
    chosen = None
    for offset in offsets:
        cert = certify_signs(g, paper_config(args.grid_log2, threads=args.threads, offset=offset))
        runs.append(cert)
        match = cert.m_negative == PAPER_COARSE_COUNT if args.grid_log2 == 7 else None
        lines.append(f"offset {offset}: m_negative = {cert.m_negative} of {cert.n_cells}"
                     + (f" (published count {'matched' if match else 'NOT matched'})"
                        if match is not None else ""))
        if chosen is None or (match and chosen[1] is not True):
            chosen = (cert, match)
    cert, matched = chosen
    lines += _certificate_lines(cert)
    claim_ok = cert.sound and cert.neg_fraction >= Fraction("0.52")
    lines.append(f"claim vol{{g < 0}} >= 52%: {'VERIFIED' if claim_ok else 'NOT VERIFIED'}")
    doc = {
        "runs": [c.to_dict() for c in runs],
        "selected_offset": cert.config.offset,
        "published_count_matched": matched,
        "claim": {"sign": "neg", "fraction": 0.52, "verified": claim_ok},
    }
    _emit(args, doc, lines, None, t0)
    if not cert.sound:
        return EXIT_UNSOUND
    return EXIT_OK if claim_ok else EXIT_CLAIM_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "certify": _cmd_certify,
        "moments": _cmd_moments,
        "dist": _cmd_dist,
        "reproduce-cx": _cmd_reproduce_cx,
    }
    try:
        return handlers[args.command](args)
    except (PolynomialFormatError, OrderTooLarge, OSError, ValueError) as exc:
        print(f"toralsym: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
