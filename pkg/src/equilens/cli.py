"""Command-line front end.

``equilens analyze`` runs one measure on a sequence, ``equilens verify``
runs the built-in consistency checks and ``equilens generate`` writes
points in the point-file format.  Results go to stdout as JSON (schema
"1") or CSV; exit status 2 flags bad arguments and 3 a resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from .errors import CapabilityError, ResourceLimitError
from .measures import SCHEMA_VERSION

MEASURES = (
    "spectral",
    "diaphony",
    "discrete-discrepancy",
    "star",
    "extreme-oracle",
    "sigma-lattice",
    "p-alpha",
    "bz-index",
    "discrepancy-spectral",
)
LATTICE_MEASURES = ("sigma-lattice", "p-alpha", "bz-index")
CSV_FIELDS = ("measure", "N", "value", "K", "tail_bound", "argmax_index", "system", "weight")

EXIT_ARGS = 2
EXIT_RESOURCE = 3


class ArgumentFailure(Exception):
    """Invalid request detected before any computation."""


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ArgumentFailure(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="equilens", description="Uniform distribution measures for point sequences.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute one measure")
    a.add_argument("--seq", required=True, help="halton:2,3 | kron:sqrt2-1 | glp:1,5@8 | hybrid:(..)+(..) | file:PATH")
    a.add_argument("--N", type=int, help="number of points (defaults to the rule size for glp and files)")
    a.add_argument("--measure", required=True, choices=MEASURES)
    a.add_argument("--system", help="per-coordinate tags, e.g. w2,g3,t (default: trigonometric)")
    a.add_argument("--weight", default=None, help="r | euclidean | digit | hybrid (default depends on system)")
    a.add_argument("--alpha", type=float, default=2.0)
    a.add_argument("--rel-tol", type=float, default=1e-3)
    a.add_argument("--method", choices=("auto", "kernel", "shells"), default="auto")
    a.add_argument("--base", default="2", help="base or comma-separated bases")
    a.add_argument("--resolution", help="resolution exponent(s) g")
    a.add_argument("--eps", type=float, help="choose the resolution for this accuracy")
    a.add_argument("--star", action="store_true")
    a.add_argument("--K", type=int, help="truncation for p-alpha")
    a.add_argument("--max-K", type=int, default=None, help="shell budget for spectral and diaphony")
    a.add_argument("--allow-large", action="store_true", help="permit large exhaustive lattice searches")
    a.add_argument("--format", choices=("json", "csv"), default="json")
    a.add_argument("--sweep", help="comma-separated N values; one CSV row each")

    v = sub.add_parser("verify", help="run a verification suite")
    vs = v.add_subparsers(dest="suite", required=True)
    d = vs.add_parser("digits", help="group axioms for every partition addition")
    d.add_argument("--base", type=int, default=2)
    d.add_argument("--m", type=int, default=3)
    sk = vs.add_parser("sloan-kachoyan", help="character sums over lattice nodes")
    sk.add_argument("--seq", required=True, help="glp:a1,...,as@N")
    sk.add_argument("--K", type=int, help="index bound (default N)")
    sw = vs.add_parser("sandwich", help="discrete discrepancy brackets the exact value")
    sw.add_argument("--seq", required=True)
    sw.add_argument("--N", type=int)
    sw.add_argument("--base", default="2")
    sw.add_argument("--resolution", required=True)

    g = sub.add_parser("generate", help="write points in the point-file format")
    g.add_argument("--seq", required=True)
    g.add_argument("--N", type=int)
    return p


# --- request validation --------------------------------------------------


def _sequence(text: str):
    from .sequences import parse_sequence

    try:
        return parse_sequence(text)
    except (ValueError, OSError) as exc:
        raise ArgumentFailure(str(exc)) from None


def _resolve_N(seq, N):
    fixed = getattr(seq, "N", None)
    if N is None:
        if fixed is None:
            raise ArgumentFailure("--N is required for this sequence")
        return fixed
    if N < 1:
        raise ArgumentFailure(f"--N must be positive, got {N}")
    if fixed is not None and N > fixed:
        raise ArgumentFailure(f"sequence has only {fixed} points, --N {N} requested")
    return N


def _system(args, s: int):
    from .padic import HybridSystemConfig

    if args.system is None:
        return HybridSystemConfig.trigonometric(s)
    try:
        system = HybridSystemConfig.from_tags(args.system)
    except ValueError as exc:
        raise ArgumentFailure(str(exc)) from None
    if system.s != s:
        raise ArgumentFailure(f"system has {system.s} coordinates, sequence has {s}")
    return system


def _weight(args, system):
    from .weights import digit_weight, euclidean_weight, hybrid_weight, r_weight

    kinds = {kind for kind, _, _ in system.slots}
    name = args.weight or ("r" if kinds == {"trig"} else "hybrid")
    s = system.s
    if name == "r":
        if kinds != {"trig"}:
            raise ArgumentFailure("the r weight needs a trigonometric system; use --weight hybrid")
        return r_weight(s)
    if name == "euclidean":
        if kinds != {"trig"}:
            raise ArgumentFailure("the euclidean weight needs a trigonometric system")
        return euclidean_weight(s)
    if name == "digit":
        if "trig" in kinds:
            raise ArgumentFailure("the digit weight needs Walsh or b-adic slots only")
        return digit_weight([b for _, b, _ in system.slots])
    if name == "hybrid":
        return hybrid_weight(system)
    raise ArgumentFailure(f"unknown weight {name!r}")


def _bases(text: str, s: int):
    b = _int_list(text)
    if len(b) == 1:
        b = b * s
    if len(b) != s or any(v < 2 for v in b):
        raise ArgumentFailure(f"--base needs 1 or {s} values >= 2, got {text!r}")
    return b


def _resolution(args, s: int, bases):
    from .discrepancy import choose_resolution

    if args.eps is not None:
        if args.resolution is not None:
            raise ArgumentFailure("give either --resolution or --eps, not both")
        if not 0 < args.eps <= 1:
            raise ArgumentFailure(f"--eps must lie in (0, 1], got {args.eps}")
        return list(choose_resolution(args.eps, bases, s).g)
    if args.resolution is None:
        raise ArgumentFailure("this measure needs --resolution or --eps")
    g = _int_list(args.resolution)
    if len(g) == 1:
        g = g * s
    if len(g) != s or any(v < 1 for v in g):
        raise ArgumentFailure(f"--resolution needs 1 or {s} values >= 1, got {args.resolution!r}")
    return g


def _plan(args):
    """Validate everything and return a function ``N -> result dict``."""
    seq = _sequence(args.seq)
    m = args.measure
    if args.sweep:
        Ns = _int_list(args.sweep)
        if not Ns:
            raise ArgumentFailure("--sweep needs at least one N")
    else:
        Ns = [args.N]
    Ns = [_resolve_N(seq, N) for N in Ns]

    if m in LATTICE_MEASURES:
        from .sequences import GoodLatticePoint

        if not isinstance(seq, GoodLatticePoint):
            raise ArgumentFailure(f"{m} needs a glp: sequence")
        if args.alpha <= 1:
            raise ArgumentFailure(f"--alpha must exceed 1, got {args.alpha}")
        return Ns, lambda N: _run_lattice(args, seq)

    if m in ("spectral", "diaphony"):
        system = _system(args, seq.s)
        weight = _weight(args, system)
        if m == "diaphony" and args.alpha <= 1:
            raise ArgumentFailure(f"--alpha must exceed 1, got {args.alpha}")
        if not 0 < args.rel_tol < 1:
            raise ArgumentFailure(f"--rel-tol must lie in (0, 1), got {args.rel_tol}")
        return Ns, lambda N: _run_weyl(args, seq, N, system, weight)

    bases = _bases(args.base, seq.s)
    if m == "extreme-oracle":
        return Ns, lambda N: _run_oracle(args, seq, N)
    g = _resolution(args, seq.s, bases)
    return Ns, lambda N: _run_discrete(args, seq, N, bases, g)


# --- runners ------------------------------------------------------------


def _result(measure, value, N, **extra):
    out = {
        "schema": SCHEMA_VERSION,
        "measure": measure,
        "value": value,
        "argmax_index": None,
        "K": None,
        "tail_bound": None,
        "N": N,
        "system": None,
        "weight": None,
    }
    out.update(extra)
    return out


def _run_weyl(args, seq, N, system, weight):
    from .measures import DEFAULT_MAX_K, diaphony, spectral_test

    max_K = args.max_K or DEFAULT_MAX_K
    if args.measure == "spectral":
        res = spectral_test(seq, N, system, weight, max_K=max_K)
    else:
        res = diaphony(seq, N, system, weight, args.alpha, args.rel_tol, method=args.method, max_K=max_K)
    out = res.to_dict()
    out["sequence"] = seq.describe()
    return out


def _run_lattice(args, seq):
    from .lattice import min_r_dual_vector, p_alpha, shortest_dual_vector

    spec = seq.spec
    common = dict(system="t" + ",t" * (spec.s - 1), sequence=seq.describe())
    if args.measure == "sigma-lattice":
        sq, k = shortest_dual_vector(spec, allow_large=args.allow_large)
        return _result("sigma-lattice", 1 / math.sqrt(sq), spec.N, argmax_index=list(k), K=spec.N,
                       weight={"name": "euclidean", "norm": "euclidean"}, **common)
    if args.measure == "bz-index":
        r, k = min_r_dual_vector(spec, allow_large=args.allow_large)
        return _result("bz-index", 1 / r, spec.N, argmax_index=list(k), K=spec.N,
                       weight={"name": "r", "norm": "max"}, **common)
    K = args.K or spec.N
    value, tail = p_alpha(spec, args.alpha, K)
    return _result("p-alpha", value, spec.N, K=K, tail_bound=tail, alpha=args.alpha,
                   weight={"name": "r", "norm": "max"}, **common)


def _run_discrete(args, seq, N, bases, g):
    from .discrepancy import discrepancy_spectral_test, discrete_discrepancy, epsilon_bounds

    params = {"bases": bases, "g": g, "star": bool(args.star or args.measure == "star")}
    star = params["star"]
    if args.measure == "discrepancy-spectral":
        value = discrepancy_spectral_test(seq, N, bases, g, star)
        measure = "discrepancy-spectral"
    else:
        value = discrete_discrepancy(seq, N, bases, g, star=star)
        measure = "star" if star else "discrete-discrepancy"
    eps = epsilon_bounds(bases, g)
    return _result(measure, value, N, tail_bound=float(eps.eps_star if star else eps.eps),
                   system="indicator", weight={"name": "rho_g", **params}, sequence=seq.describe())


def _run_oracle(args, seq, N):
    from .discrepancy import exact_extreme_discrepancy_small, exact_star_discrepancy_1d

    if args.star:
        if seq.s != 1:
            raise ArgumentFailure("the exact star oracle is one-dimensional")
        value = exact_star_discrepancy_1d(seq, N)
        measure = "star-oracle"
    else:
        value = exact_extreme_discrepancy_small(seq, N)
        measure = "extreme-oracle"
    return _result(measure, value, N, sequence=seq.describe())


def _emit(rows, fmt: str, sweep: bool, out):
    if fmt == "json" and not sweep:
        out.write(json.dumps(rows[0], sort_keys=True) + "\n")
        return
    if fmt == "json":
        out.write(json.dumps(rows, sort_keys=True) + "\n")
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        w.writerow([_csv_cell(r.get(f)) for f in CSV_FIELDS])
    out.write(buf.getvalue())


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def cmd_analyze(args, out):
    Ns, run = _plan(args)
    rows = [run(N) for N in Ns]
    _emit(rows, args.format, bool(args.sweep), out)
    return 0


def cmd_verify(args, out):
    if args.suite == "digits":
        from .digits import AdditionSpec, enumerate_partitions, verify_group_axioms

        if args.base < 2 or args.m < 1:
            raise ArgumentFailure("--base must be >= 2 and --m >= 1")
        rows = []
        for part in enumerate_partitions(args.m):
            rep = verify_group_axioms(AdditionSpec(args.base, part))
            rows.append({"partition": list(part.parts), "exhaustive": rep.exhaustive, "ok": rep.ok,
                         "violations": [str(v) for v in rep.violations[:5]]})
        ok = all(r["ok"] for r in rows)
        out.write(json.dumps({"schema": SCHEMA_VERSION, "suite": "digits", "base": args.base,
                              "m": args.m, "ok": ok, "partitions": rows}, sort_keys=True) + "\n")
        return 0 if ok else 1
    if args.suite == "sloan-kachoyan":
        from .lattice import sloan_kachoyan_check
        from .sequences import GoodLatticePoint

        seq = _sequence(args.seq)
        if not isinstance(seq, GoodLatticePoint):
            raise ArgumentFailure("sloan-kachoyan needs a glp: sequence")
        K = args.K if args.K is not None else seq.N
        if K < 0:
            raise ArgumentFailure("--K must be nonnegative")
        rep = sloan_kachoyan_check(seq.spec, K)
        out.write(json.dumps({"schema": SCHEMA_VERSION, "suite": "sloan-kachoyan", "sequence": seq.describe(),
                              "K": K, "checked": rep.checked, "max_deviation": rep.max_deviation,
                              "violations": [list(k) for k, _ in rep.violations[:20]], "ok": rep.ok},
                             sort_keys=True) + "\n")
        return 0 if rep.ok else 1
    # sandwich
    from .discrepancy import discrete_discrepancy, epsilon_bounds, exact_extreme_discrepancy_small

    seq = _sequence(args.seq)
    N = _resolve_N(seq, args.N)
    bases = _bases(args.base, seq.s)
    g = _int_list(args.resolution)
    if len(g) == 1:
        g = g * seq.s
    if len(g) != seq.s or any(v < 1 for v in g):
        raise ArgumentFailure(f"--resolution needs 1 or {seq.s} values >= 1")
    lower = discrete_discrepancy(seq, N, bases, g, exact=True)
    eps = epsilon_bounds(bases, g).eps
    exact = exact_extreme_discrepancy_small(seq, N, exact=True)
    ok = lower <= exact <= lower + eps
    out.write(json.dumps({"schema": SCHEMA_VERSION, "suite": "sandwich", "sequence": seq.describe(), "N": N,
                          "lower": float(lower), "exact": float(exact), "upper": float(lower + eps), "ok": ok},
                         sort_keys=True) + "\n")
    return 0 if ok else 1


def _format_coord(v) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else str(v.numerator)
    return repr(float(v))


def cmd_generate(args, out):
    seq = _sequence(args.seq)
    N = _resolve_N(seq, args.N)
    pts = seq.points(N)
    out.write(f"# {seq.describe()} N={N}\n")
    for n in range(N):
        out.write(" ".join(_format_coord(c) for c in pts.point(n)) + "\n")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = sys.stdout
    try:
        if args.command == "analyze":
            return cmd_analyze(args, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        return cmd_generate(args, out)
    except (ArgumentFailure, CapabilityError, ValueError, IndexError) as exc:
        print(f"equilens: error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ResourceLimitError as exc:
        msg = f"equilens: resource limit: {exc}"
        if exc.bracket is not None:
            msg += f"; value lies in [{exc.bracket[0]!r}, {exc.bracket[1]!r}]"
        print(msg, file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
