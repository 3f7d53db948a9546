"""Command-line interface: verification suites, point analyses, sweeps.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 I/O
failure.  The seed resolves as flag > NKS3_SEED environment variable >
default 0.  Reals in CSV output use 12 significant digits and a '.'
decimal point.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import hypersurfaces as hs
from . import verify
from .errors import DegenerateImmersionError, DomainError, PreconditionError

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_IO = 3

MIN_SWEEP_R = 0.05

SWEEP_HEADER = [
    "family", "r", "k", "l",
    "ev1", "ev2", "ev3", "ev4", "ev5",
    "mult_pattern", "traceA", "pxi_class", "theta",
]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("NKS3_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise DomainError(f"NKS3_SEED must be an integer, got {env!r}") from exc
    return 0


def _family_params(args) -> dict:
    if args.family in hs.THREE_CURVATURE_FAMILIES:
        if args.r is None:
            raise DomainError(f"family {args.family} requires --r")
        if args.r < MIN_SWEEP_R or args.r > 1.0:
            raise DomainError(f"r must lie in [{MIN_SWEEP_R}, 1]")
        return {"r": args.r}
    if args.k is None:
        raise DomainError(f"family {args.family} requires --k (and optionally --l)")
    l = args.l if args.l is not None else math.sqrt(max(0.0, 1.0 - args.k ** 2))
    return {"k": args.k, "l": l}


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify(args) -> int:
    seed = _resolve_seed(args)
    reports = []
    if args.suite in ("structure", "all"):
        reports.append(
            verify.run_structure_suite(seed, args.samples or 1000)
        )
    if args.suite in ("isometry", "all"):
        reports.append(verify.run_isometry_suite(seed, args.samples or 100))
    if args.suite in ("hypersurface", "all"):
        reports.append(
            verify.run_default_hypersurface_suites(seed, args.samples or 5)
        )

    payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
    text = json.dumps(payload, indent=2)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as f:
                f.write(text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    print(text)
    return EXIT_OK if all(r.all_pass for r in reports) else EXIT_CHECK_FAILURE


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

def _report_dict(family: str, params: dict, u, rep: hs.SpectralReport,
                 data: hs.HypersurfacePointData) -> dict:
    try:
        pxi_class = hs.classify_normal_action(rep)
    except PreconditionError:
        pxi_class = None
    return {
        "family": family,
        **params,
        "at": [float(x) for x in u],
        "alpha": rep.alpha,
        "eigenvalues": [float(v) for v in rep.eigenvalues],
        "multiplicities": list(rep.multiplicities),
        "trace_A": rep.trace,
        "mean_curvature": rep.mean_curvature,
        "hopf_residual": rep.hopf_residual,
        "shape_symmetry_residual": data.symmetry_residual,
        "dim_distribution": rep.dim_distribution,
        "a": rep.a,
        "b": rep.b,
        "c": rep.c,
        "theta": rep.theta,
        "pxi_class": pxi_class,
    }


def cmd_analyze(args) -> int:
    seed = _resolve_seed(args)
    params = _family_params(args)
    M = hs.make_example(args.family, **params)
    if args.at is not None:
        u = np.asarray(args.at, dtype=float)
    else:
        u = hs.random_chart_point(np.random.default_rng(seed))
    data = hs.analyze_point(M, u)
    rep = hs.spectral_report(data)
    print(json.dumps(_report_dict(args.family, params, u, rep, data), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

def _sweep_rows(args, seed: int):
    rng = np.random.default_rng(seed)
    rows = []
    worst_spread = 0.0
    if args.family in hs.THREE_CURVATURE_FAMILIES:
        if not args.r_values:
            raise DomainError("sweep over m1..m3 requires --r with a comma list")
        grid = [{"r": r} for r in args.r_values]
    else:
        if not args.k_values:
            raise DomainError("sweep over m4..m6 requires --k with a comma list")
        grid = [
            {"k": k, "l": math.sqrt(max(0.0, 1.0 - k * k))} for k in args.k_values
        ]
    for params in grid:
        if "r" in params and not MIN_SWEEP_R <= params["r"] <= 1.0:
            raise DomainError(f"r must lie in [{MIN_SWEEP_R}, 1]")
        if "k" in params and not 0.0 < params["k"] < 1.0:
            raise DomainError("k must lie in (0, 1)")
        M = hs.make_example(args.family, **params)
        spectra = []
        thetas = []
        classes = set()
        for _ in range(args.samples):
            u = hs.random_chart_point(rng)
            rep = hs.spectral_report(hs.analyze_point(M, u))
            spectra.append(rep.eigenvalues)
            if rep.theta is not None:
                thetas.append(rep.theta)
            try:
                classes.add(hs.classify_normal_action(rep))
            except PreconditionError:
                classes.add("UNDEFINED")
        spectra = np.stack(spectra)
        spread = float(np.max(np.ptp(spectra, axis=0)))
        worst_spread = max(worst_spread, spread)
        mean_spec = np.mean(spectra, axis=0)
        mult = tuple(
            len(c) for c in hs.cluster_eigenvalues(mean_spec)
        )
        row = {
            "family": args.family,
            "r": _fmt(params["r"]) if "r" in params else "",
            "k": _fmt(params["k"]) if "k" in params else "",
            "l": _fmt(params["l"]) if "l" in params else "",
            "mult_pattern": "-".join(str(m) for m in mult),
            "traceA": _fmt(float(np.sum(mean_spec))),
            "pxi_class": classes.pop() if len(classes) == 1 else "MIXED",
            "theta": _fmt(float(np.mean(thetas))) if thetas else "",
        }
        for i in range(5):
            row[f"ev{i + 1}"] = _fmt(float(mean_spec[i]))
        rows.append(row)
    return rows, worst_spread


def cmd_sweep(args) -> int:
    seed = _resolve_seed(args)
    rows, worst_spread = _sweep_rows(args, seed)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_HEADER)
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    if worst_spread > 1e-6:
        print(
            f"error: eigenvalue spread {worst_spread:.3e} exceeds 1e-6; "
            "principal curvatures are not constant across sample points",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILURE
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _float_list(text: str):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc


def _at_list(text: str):
    vals = _float_list(text)
    if len(vals) != 5:
        raise argparse.ArgumentTypeError("--at needs exactly 5 comma-separated reals")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nks3", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run a verification suite, emit JSON")
    pv.add_argument("--suite", required=True,
                    choices=["structure", "hypersurface", "isometry", "all"])
    pv.add_argument("--seed", type=int, default=None)
    pv.add_argument("--samples", type=int, default=None)
    pv.add_argument("--out", default=None, help="also write the JSON report here")
    pv.set_defaults(func=cmd_verify)

    pa = sub.add_parser("analyze", help="analyze one point, emit JSON")
    pa.add_argument("--family", required=True, choices=list(hs.FAMILIES))
    pa.add_argument("--r", type=float, default=None)
    pa.add_argument("--k", type=float, default=None)
    pa.add_argument("--l", type=float, default=None)
    pa.add_argument("--at", type=_at_list, default=None,
                    help="chart point, 5 comma-separated reals")
    pa.add_argument("--seed", type=int, default=None)
    pa.set_defaults(func=cmd_analyze)

    ps = sub.add_parser("sweep", help="sweep a parameter grid, emit CSV")
    ps.add_argument("--family", required=True, choices=list(hs.FAMILIES))
    ps.add_argument("--r", dest="r_values", type=_float_list, default=None,
                    help="comma list of r values (m1..m3)")
    ps.add_argument("--k", dest="k_values", type=_float_list, default=None,
                    help="comma list of k values (m4..m6); l = sqrt(1 - k^2)")
    ps.add_argument("--samples", type=int, default=5,
                    help="surface points per grid value")
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--out", default=None, help="CSV output path (default stdout)")
    ps.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors and 0 for --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DomainError, PreconditionError, DegenerateImmersionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
