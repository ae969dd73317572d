"""Command-line front end: ``chebsos <command> ...``.

Exit codes: 0 success, 1 input error, 2 solver error, 3 verification failure.
"""
from chebsos.certificates import (
    dump_certificate,
    load_certificate,
    norm_gap_certificate,
    verify,
)
from chebsos.config import get_settings
from chebsos.jackson import apriori_gap_bound, product_kernel, smooth, smoothing_error
from chebsos.poly import (
    Basis,
    Poly,
    coeff_one_norm,
    dump_polynomial,
    load_polynomial,
    parse_polynomial,
)
from chebsos.solvers import SolverError, SolverOptions
from chebsos.sos_compiler import GeneratorSet, lower_bound, rho
from chebsos.tables import OutputFormat, TableSpec, ThetaTableBuilder
from chebsos.utils import estimate_minimum
from pathlib import Path
from typing import List, Optional
import argparse
import json
import logging
import sys
import warnings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_VERIFICATION = 3


def parse_range(text: str) -> List[int]:
    """Parse ``"1-5"``, ``"1,2,4"`` or mixtures such as ``"1-3,6"``.

    Examples
    --------
    >>> parse_range("1-3,6")
    [1, 2, 3, 6]

    """
    values = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                low, high = (int(p) for p in part.split("-", 1))
                if low > high:
                    raise ValueError
                values.update(range(low, high + 1))
            elif part:
                values.add(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Invalid range '{text}'.")
    if not values:
        raise argparse.ArgumentTypeError("Range must not be empty.")
    return sorted(values)


def read_polynomial(source: str) -> Poly:
    """Load a polynomial from a file, or parse ``source`` itself when no such file exists."""
    path = Path(source)
    if path.is_file():
        return load_polynomial(path)
    return parse_polynomial(source)


def _solver_options(args) -> SolverOptions:
    overrides = {}
    if getattr(args, "sdp_tol", None) is not None:
        overrides["tolerance"] = args.sdp_tol
    return SolverOptions.from_settings(**overrides)


def cmd_theta_table(args) -> int:
    settings = get_settings()
    if args.n > settings.max_theta_nvars:
        if not args.allow_large_n:
            print(
                f"n={args.n} exceeds {settings.max_theta_nvars}; pass --allow-large-n to run anyway.",
                file=sys.stderr,
            )
            return EXIT_INPUT
        message = f"Computing Theta tables for n={args.n}; cells may take very long."
        logger.warning(message)
        warnings.warn(message)
    spec = TableSpec(
        n=args.n,
        d_range=args.d,
        r_range=args.r,
        output_path=args.out,
        format=OutputFormat(args.format),
        jobs=args.jobs or settings.jobs,
        time_budget=args.time_budget or settings.time_budget,
    )
    builder = ThetaTableBuilder(_solver_options(args), silent=True, progress=not args.quiet)
    table = builder.build(spec)
    if args.out is None:
        print(table.to_csv(), end="")
    return EXIT_SOLVER if builder.has_errors else EXIT_OK


def cmd_lower_bound(args) -> int:
    f = read_polynomial(args.poly)
    scheme = GeneratorSet(args.scheme)
    result = lower_bound(f, args.r, scheme, options=_solver_options(args))
    print(f"{result.value:.6f}")
    print(f"status: {result.report.status.value}")
    n, d = f.nvars, f.degree
    per_variable = args.r // n
    bound = None
    if per_variable >= 1:
        bound = apriori_gap_bound(n, d, per_variable, coeff_one_norm(f))
    print(f"jackson a-priori gap: {'—' if bound is None else f'{bound:.6f}'}")
    if args.compare_grid:
        value, point = estimate_minimum(f)
        print(f"grid minimum: {value:.6f} at {point.tolist()}")
    if args.gram_out is not None:
        payload = {
            label: {
                "basis": [list(alpha) for alpha in result.gram_bases[label]],
                "gram": gram.tolist(),
            }
            for label, gram in result.gram.items()
        }
        Path(args.gram_out).write_text(json.dumps(payload, indent=2))
    return EXIT_OK


def cmd_certify_norm(args) -> int:
    p = read_polynomial(args.poly)
    cert = norm_gap_certificate(p)
    if args.out is not None:
        dump_certificate(cert, args.out)
    print(f"summands: {len(cert.summands)}")
    print(f"residual: {verify(cert):.3e}")
    return EXIT_OK


def cmd_verify_certificate(args) -> int:
    cert = load_certificate(args.certificate)
    residual = verify(cert)
    print(f"residual: {residual:.3e}")
    if residual > args.tol:
        print(f"certificate rejected (tolerance {args.tol:.1e})", file=sys.stderr)
        return EXIT_VERIFICATION
    return EXIT_OK


def cmd_jackson_smooth(args) -> int:
    f = read_polynomial(args.poly)
    kernel = product_kernel(f.nvars, args.r, f.degree)
    smoothed = smooth(f, kernel)
    if args.out is not None:
        dump_polynomial(smoothed, args.out)
    else:
        print(smoothed.to_basis(Basis.CHEBYSHEV).to_text())
    bound = apriori_gap_bound(f.nvars, f.degree, args.r, coeff_one_norm(f))
    print(f"smoothing error: {smoothing_error(f, kernel):.6e}")
    print(f"a-priori bound: {'—' if bound is None else f'{bound:.6e}'}")
    return EXIT_OK


def cmd_rho(args) -> int:
    f = read_polynomial(args.poly)
    result = rho(f, args.d, options=_solver_options(args))
    print(f"rho: {result.rho:.6e}")
    print("lambda: " + " ".join(f"{v:.6e}" for v in result.lambda_star))
    print(f"status: {result.report.status.value}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="chebsos",
        description="Chebyshev sum-of-squares bounds and certificates on the hypercube.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--sdp-tol", type=float, default=None, help="solver feasibility tolerance")
    sub = parser.add_subparsers(dest="command", required=True)

    table = sub.add_parser("theta-table", help="upper bounds on Theta^r_{n,d}")
    table.add_argument("--n", type=int, required=True)
    table.add_argument("--d", type=parse_range, required=True, help="e.g. 1-3 or 1,2,4")
    table.add_argument("--r", type=parse_range, required=True)
    table.add_argument("--out", type=Path, default=None)
    table.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default=OutputFormat.CSV.value
    )
    table.add_argument("--jobs", type=int, default=None)
    table.add_argument("--time-budget", type=float, default=None, help="seconds per cell")
    table.add_argument("--allow-large-n", action="store_true")
    table.add_argument("--quiet", action="store_true", help="no progress bar")
    table.set_defaults(func=cmd_theta_table)

    bound = sub.add_parser("lower-bound", help="pre-ordering lower bound on min f")
    bound.add_argument("poly", help="polynomial file (JSON or text) or expression")
    bound.add_argument("--r", type=int, required=True)
    bound.add_argument(
        "--scheme",
        choices=[s.value for s in GeneratorSet],
        default=GeneratorSet.PLUS_MINUS.value,
    )
    bound.add_argument("--gram-out", type=Path, default=None)
    bound.add_argument("--compare-grid", action="store_true")
    bound.set_defaults(func=cmd_lower_bound)

    certify = sub.add_parser("certify-norm", help="certificate of ||p||_{1,T} - p")
    certify.add_argument("poly")
    certify.add_argument("--out", type=Path, default=None)
    certify.set_defaults(func=cmd_certify_norm)

    check = sub.add_parser("verify-certificate", help="re-expand a certificate file")
    check.add_argument("certificate", type=Path)
    check.add_argument("--tol", type=float, default=1e-9)
    check.set_defaults(func=cmd_verify_certificate)

    jackson = sub.add_parser("jackson-smooth", help="apply the product Jackson kernel")
    jackson.add_argument("poly")
    jackson.add_argument("--r", type=int, required=True)
    jackson.add_argument("--out", type=Path, default=None)
    jackson.set_defaults(func=cmd_jackson_smooth)

    distance = sub.add_parser("rho", help="1-norm distance to the SOS cone")
    distance.add_argument("poly")
    distance.add_argument("--d", type=int, required=True)
    distance.set_defaults(func=cmd_rho)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except SolverError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
