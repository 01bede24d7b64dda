"""Command-line front end.

Subcommands::

    graphdim generate SPEC          sample an expression to CSV
    graphdim estimate SPEC|FILE     box-counting scan and dimension fit
    graphdim decompose SPEC --beta B [--alpha A]
    graphdim verify SUITE|all       run the dimension-rule suites

Exit status: 0 success, 1 a verification suite failed, 2 bad input (parse
error, malformed file, zero crossing, unsupported endpoint), 3 infeasible
decomposition target.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, decomp, fileio, funcgen, verify
from .boxdim import MIN_SAMPLES_EXP, Estimator, estimate_sampled
from .errors import (
    GraphDimError, InfeasibleError, InputFormatError, ResolutionError, UnsupportedEndpointError,
    ZeroCrossingError,
)
from .parse import parse

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3

FORMATS = ("csv", "json", "svg", "bin")


def _window(text):
    try:
        a, b = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like 6:16, got {text!r}") from None
    if not 2 <= a < b:
        raise argparse.ArgumentTypeError(f"window needs 2 <= k_min < k_max, got {text!r}")
    return a, b


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit value, got {v}")
    return v


def _formats(text):
    items = [s.strip() for s in text.split(",") if s.strip()]
    bad = [s for s in items if s not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats are a comma list from {', '.join(FORMATS)}; got {text!r}")
    return tuple(dict.fromkeys(items))


def _grid_m(text):
    m = int(text)
    if not funcgen.M_MIN <= m <= funcgen.M_MAX:
        raise argparse.ArgumentTypeError(f"-m must lie in [{funcgen.M_MIN}, {funcgen.M_MAX}], got {m}")
    return m


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-m", type=_grid_m, default=20, help="grid exponent: 2^m + 1 samples (default 20)")
    common.add_argument("--window", type=_window, default=(6, 16), metavar="A:B",
                        help="scale exponents k_min:k_max of the fit (default 6:16)")
    common.add_argument("--seed", type=_seed, default=42, help="random seed (default 42)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory (default .)")

    p = argparse.ArgumentParser(prog="graphdim", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="sample an expression on the grid")
    g.add_argument("spec", help='expression, e.g. "weier(0.5,3)+2"')
    g.add_argument("--name", default="function", help="output file stem (default function)")
    g.add_argument("--format", type=_formats, default=("csv",), help="comma list of csv,json,bin")

    e = sub.add_parser("estimate", parents=[common], help="scan and fit the graph dimension")
    e.add_argument("input", help="expression, or a sampled CSV (.bin for raw binary)")
    e.add_argument("--name", default="estimate", help="output file stem (default estimate)")
    e.add_argument("--format", type=_formats, default=("json",), help="comma list of csv,json,svg")

    d = sub.add_parser("decompose", parents=[common], help="factor f = g*h with target dimensions")
    d.add_argument("spec")
    d.add_argument("--beta", type=float, required=True, help="target dimension")
    d.add_argument("--alpha", type=float, default=None,
                   help="dimension of f; selects the two-target construction with beta < alpha")
    d.add_argument("--format", type=_formats, default=("csv", "json"), help="comma list of csv,json,bin")

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", choices=["all", *verify.SUITES], help="suite name or all")
    v.add_argument("--format", type=_formats, default=("json",), help="json writes report.json")
    return p


def _check_window(m, window):
    if window[1] > m - MIN_SAMPLES_EXP:
        raise ResolutionError(f"window {window[0]}:{window[1]} needs k_max <= m - {MIN_SAMPLES_EXP} = {m - MIN_SAMPLES_EXP}")


def _write_samples(f, out, stem, formats):
    paths = []
    if "csv" in formats:
        paths.append(fileio.write_samples_csv(f, out / f"{stem}.csv"))
    if "bin" in formats:
        paths.append(fileio.write_samples_bin(f, out / f"{stem}.bin"))
    return paths


def _zero_free(f):
    try:
        funcgen.check_zero_free(f.source, f.values, f.x, on_grid=True)
    except ZeroCrossingError:
        return False
    return True


def cmd_generate(args) -> int:
    expr = parse(args.spec)
    f = funcgen.sample(expr, args.m)
    paths = _write_samples(f, args.out, args.name, args.format)
    summary = {
        "expression": expr.describe(),
        "tree": expr.to_dict(),
        "m": f.m,
        "points": int(f.values.size),
        "min": float(f.values.min()),
        "max": float(f.values.max()),
        "zero_free": _zero_free(f),
    }
    if "json" in args.format:
        paths.append(fileio.write_json(summary, args.out / f"{args.name}.json"))
    print(f"{summary['expression']}: {summary['points']} samples, "
          f"min {summary['min']!r}, max {summary['max']!r}, zero-free {summary['zero_free']}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def load_input(text, m):
    """A sampled function from a file path, or from an expression at grid ``m``."""
    path = Path(text)
    if path.is_file():
        return fileio.read_samples(path), False
    if text.endswith((".csv", ".bin")) and not any(c in text for c in "()+*"):
        raise InputFormatError(f"no such file: {text}")
    return funcgen.sample(parse(text), m), True


def cmd_estimate(args) -> int:
    f, from_spec = load_input(args.input, args.m)
    _check_window(f.m, args.window)
    # files carry arbitrary data: sandwich failures are reported, not raised
    est = estimate_sampled(f, args.window, strict=from_spec)
    report = fileio.estimate_report(est)
    fit = est.fit
    print(f"{est.source}: slope {fit.slope:.4f} (r2 {fit.r2:.4f}), "
          f"proxies [{fit.lower_proxy:.4f}, {fit.upper_proxy:.4f}], window {fit.window[0]}:{fit.window[1]}, "
          f"m {est.m}, sandwich {'ok' if est.sandwich_ok else 'VIOLATED'}")
    paths = []
    if "json" in args.format:
        paths.append(fileio.write_json(report, args.out / f"{args.name}.json"))
    if "csv" in args.format:
        paths.append(fileio.write_scan_csv(est.records, args.out / f"{args.name}_scan.csv"))
    if "svg" in args.format:
        paths.append(fileio.write_estimate_svg(est, args.out / f"{args.name}.svg"))
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    _check_window(args.m, args.window)
    expr = parse(args.spec)
    est = Estimator(m=args.m, window=args.window)
    if args.alpha is None:
        res = decomp.decompose_target(expr, args.beta, est)
    else:
        res = decomp.decompose_two_targets(expr, args.alpha, args.beta, est)
    paths = []
    for stem, e in (("g", res.g), ("h", res.h)):
        paths += _write_samples(funcgen.sample(e, args.m), args.out, stem, args.format)
    if "json" in args.format:
        paths.append(fileio.write_json(res.to_dict(), args.out / "decomposition.json"))
    print(f"route {res.route}: est f {res.est_f.slope:.4f}, est g {res.est_g.slope:.4f}, "
          f"est h {res.est_h.slope:.4f}, recon error {res.recon_error:.3g}")
    print(f"g = {res.g.describe()}")
    print(f"h = {res.h.describe()}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_window(args.m, args.window)
    report = verify.run_suite(args.suite, seed=args.seed, m=args.m, window=args.window)
    print(report.table())
    if "json" in args.format:
        path = fileio.atomic_write(args.out / "report.json", report.to_json())
        print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_SUITE_FAILED


COMMANDS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "decompose": cmd_decompose,
    "verify": cmd_verify,
}


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, UnsupportedEndpointError):
        return EXIT_INPUT
    if isinstance(exc, InfeasibleError):
        return EXIT_INFEASIBLE
    return EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (GraphDimError, ValueError, OSError) as exc:
        kind = type(exc).__name__
        print(f"graphdim {args.command}: {kind}: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
