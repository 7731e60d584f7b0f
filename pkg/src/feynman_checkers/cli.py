"""Command-line interface.

Exit codes: 0 success, 1 a verification check failed, 2 bad arguments or an
invalid site / bypass file, 3 a resource limit was hit, 4 conservation was
requested for a non-blocking bypass set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import random
import sys
from fractions import Fraction

from . import amplitude as amp
from . import bypass as byp
from . import identities as ids
from . import stats
from .config import LIMITS, env_tau_max
from .errors import (
    CheckersError,
    HypothesisViolation,
    InvalidBypassSet,
    NonBlockingSetError,
    ResourceLimitError,
    UnreachableSiteError,
)
from .lattice import Site, SiteClass, as_mass, classify

log = logging.getLogger("feynman_checkers")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_LIMIT, EXIT_NONBLOCKING = 0, 1, 2, 3, 4

SUITES = ("conservation", "nonzero", "velocity", "symmetry", "series", "bypass", "linear", "quadratic")

SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["suite", "passed", "checks"],
    "properties": {
        "suite": {"type": "string"},
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["suite", "name", "params", "passed"],
                "properties": {
                    "suite": {"type": "string"},
                    "name": {"type": "string"},
                    "params": {"type": "object"},
                    "passed": {"type": "boolean"},
                    "detail": {"type": "string"},
                },
            },
        },
    },
}


class UsageError(CheckersError):
    pass


# --------------------------------------------------------------------------
# formatting helpers


def fmt(x) -> str:
    """Exact values as ``num/den``; floats with 17 significant digits."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_mass(text: str, mode: str | None):
    """Resolve ``(mass, mode)``; decimal input forces float mode."""
    exact_input = "." not in text and "e" not in text.lower()
    if mode is None:
        mode = "exact" if exact_input else "float"
    if mode == "exact" and not exact_input:
        raise UsageError(f"decimal mass {text!r} cannot be used in exact mode; give it as p/q")
    try:
        mass = as_mass(text, exact=(mode == "exact"))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad mass {text!r}: {exc}") from exc
    return mass, mode


def _site_from_args(args) -> Site:
    if args.eps is not None:
        if args.x is None or args.t is None:
            raise UsageError("--eps needs --x and --t")
        eps = Fraction(args.eps)
        n, tau = Fraction(args.x) / eps, Fraction(args.t) / eps
        if n.denominator != 1 or tau.denominator != 1:
            raise UsageError("x/eps and t/eps must be integers")
        n, tau = int(n), int(tau)
    else:
        if args.n is None or args.tau is None:
            raise UsageError("give --n and --tau (or --x, --t, --eps)")
        n, tau = args.n, args.tau
    if tau < 1:
        raise UsageError("tau must be >= 1")
    return Site(n, tau)


def _mass_from_args(args):
    text = args.mass
    if getattr(args, "eps", None) is not None and getattr(args, "m", None) is not None:
        text = str(Fraction(args.m) * Fraction(args.eps))
    return _parse_mass(text, args.mode)


# --------------------------------------------------------------------------
# amplitude


def cmd_amplitude(args) -> int:
    site = _site_from_args(args)
    mass, mode = _mass_from_args(args)
    if not site.reachable:
        raise UnreachableSiteError(f"site (n={site.n}, tau={site.tau}) is not reachable (parity or light cone)")
    if args.method == "dp":
        a = amp.amplitude_dp(site, mass, mode)
    elif args.method == "closed":
        if classify(site) is SiteClass.CONE_BOUNDARY:
            a = amp.amplitude_edge(site, mass, mode)
        else:
            a = amp.amplitude_closed_form(site, mass, mode)
    else:
        a = amp.amplitude_oracle(site, mass, mode)
    record = {"n": site.n, "tau": site.tau, "mass": str(mass.value), "mode": mode, "method": args.method}
    if mode == "exact":
        f = a.to_float()
        record.update(a1=fmt(f.a1), a2=fmt(f.a2), P=fmt(a.prob), A1=fmt(a.A1), A2=fmt(a.A2), k=a.k)
    else:
        record.update(a1=fmt(a.a1), a2=fmt(a.a2), P=fmt(a.prob))
    if args.format == "json":
        _emit(json.dumps(record, sort_keys=True) + "\n", args.output)
    else:
        _emit(" ".join(f"{k}={v}" for k, v in record.items()) + "\n", args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# distribution


def distribution_csv(dist: stats.Distribution, totals: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "p_minus", "p_plus", "p_total"])
    for n in sorted(dist.entries):
        pm, pp = dist.entries[n]
        w.writerow([n, fmt(pm), fmt(pp), fmt(pm + pp)])
    if totals:
        pms = [v[0] for v in dist.entries.values()]
        pps = [v[1] for v in dist.entries.values()]
        tm, tp = stats._sum(pms, dist.exact), stats._sum(pps, dist.exact)
        w.writerow(["total", fmt(tm), fmt(tp), fmt(dist.total)])
    return buf.getvalue()


def cmd_distribution(args) -> int:
    mass, mode = _parse_mass(args.mass, args.mode)
    if args.tau < 1:
        raise UsageError("tau must be >= 1")
    if args.tau > args.tau_max:
        raise ResourceLimitError(f"tau={args.tau} exceeds --tau-max {args.tau_max}")
    dist = stats.distribution(args.tau, mass, mode)
    if args.format == "json":
        payload = {
            "tau": dist.tau,
            "mass": str(mass.value),
            "mode": mode,
            "rows": [
                {"n": n, "p_minus": fmt(pm), "p_plus": fmt(pp), "p_total": fmt(pm + pp)}
                for n, (pm, pp) in sorted(dist.entries.items())
            ],
            "total": fmt(dist.total),
        }
        _emit(json.dumps(payload, sort_keys=True) + "\n", args.output)
    else:
        _emit(distribution_csv(dist, args.totals), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# verification suites


def _check(suite, name, params, passed, detail=""):
    return {"suite": suite, "name": name, "params": params, "passed": bool(passed), "detail": detail}


def _masses(args, default):
    if args.mass is None:
        return [Fraction(x) for x in default]
    mass, mode = _parse_mass(args.mass, "exact")
    return [mass.value]


def suite_conservation(args):
    tau_max = args.tau_max or 200
    out = []
    for m in _masses(args, ["1", "1/2", "3/7"]):
        bad = [row.tau for row in amp.iter_rows(m, "exact", tau_max) if sum(row.sum_squares()) != 1]
        out.append(_check("conservation", "probability-conservation", {"mass": str(m), "tau_max": tau_max},
                          not bad, f"rows with total != 1: {bad[:10]}" if bad else "all rows sum to 1"))
    return out


def suite_nonzero(args):
    tau_max = args.tau_max or 60
    out = []
    for m in _masses(args, ["1", "1/2", "2", "3/7"]):
        zeros = stats.nonzero_scan(tau_max, m)
        out.append(_check("nonzero", "nonvanishing-inside-cone", {"mass": str(m), "tau_max": tau_max},
                          not zeros, f"{len(zeros)} zero-probability interior sites"))
    return out


def suite_velocity(args):
    T_max = args.tau_max or 100
    out = []
    for m in _masses(args, ["1", "1/2", "3/7"]):
        avg, inst = stats.velocity_series(T_max, m, "exact")
        bad, running = [], Fraction(0)
        for T in range(1, T_max + 1):
            running += inst[T - 1]
            if avg[T - 1] != running / T:
                bad.append(T)
        bound = all(abs(v) <= 1 for v in avg)
        out.append(_check("velocity", "average-equals-time-average", {"mass": str(m), "T_max": T_max},
                          not bad and bound, f"failing T: {bad[:10]}" if bad else "exact equality for all T"))
    return out


def suite_symmetry(args):
    tau_max = args.tau_max or 60
    out = []
    for m in _masses(args, ["1", "1/2", "2", "3/7"]):
        bad = amp.symmetry_violations(tau_max, m)
        out.append(_check("symmetry", "a1-even-a2-reflection", {"mass": str(m), "tau_max": tau_max},
                          not bad, f"{len(bad)} violations"))
    return out


def suite_series(args):
    t_max = args.tau_max or 200
    bad = [t for t in range(1, t_max + 1) if len(set(stats.left_prob_series(t, 1))) != 1]
    out = [_check("series", "left-mass-central-binomial", {"mass": "1", "t_max": t_max},
                  not bad, f"failing t: {bad[:10]}" if bad else "exact equality")]
    ct = stats.ct_sequence(max(t_max, 400) if args.tau_max is None else t_max)
    for fact, failures in ct.facts.items():
        out.append(_check("series", f"c_t-{fact}", {"mass": "1", "t_max": ct.t_max}, not failures,
                          f"failing t: {failures[:10]}" if failures else "holds"))
    return out


def suite_bypass(args):
    out = []
    masses = _masses(args, ["1", "3/7"])
    for m in masses:
        for tau in (3, 5, 10):
            total = byp.conservation_bypass(byp.BypassSet.row(tau), m)
            out.append(_check("bypass", "conservation-full-row", {"mass": str(m), "tau": tau}, total == 1, fmt(total)))
        for mu_hat in range(1, 4):
            for n in range(1, 6):
                total = byp.conservation_bypass(byp.staircase_set(mu_hat, n), m)
                out.append(_check("bypass", "conservation-staircase", {"mass": str(m), "mu_hat": mu_hat, "n": n},
                                  total == 1, fmt(total)))
        rng = random.Random(args.seed)
        for i in range(20):
            T = byp.random_staircase(rng)
            total = byp.conservation_bypass(T, m)
            out.append(_check("bypass", "conservation-random-staircase",
                              {"mass": str(m), "index": i, "set": T.to_json()}, total == 1, fmt(total)))
        tau_max = args.tau_max or 20
        for T in (byp.BypassSet(), byp.BypassSet([(2, 2)])):
            bad = byp.kirchhoff_check(tau_max, T, m)
            out.append(_check("bypass", "kirchhoff-flux", {"mass": str(m), "tau_max": tau_max, "set": T.to_json()},
                              not bad, f"{len(bad)} violations"))
    return out


def suite_linear(args):
    tau_max = args.tau_max or 200
    out = []
    for m in _masses(args, ["1", "1/2", "3/7"]):
        bad_exact = [t for t in range(1, tau_max + 1) if not ids.linear_identity_exact(t, m)]
        worst = 0.0
        for row in amp.iter_rows(float(m), "float", tau_max):
            s1, s2 = math.fsum(row.c1), math.fsum(row.c2)
            t1, t2 = ids.linear_targets(row.tau, m)
            worst = max(worst, abs(s1 - t1), abs(s2 - t2))
        out.append(_check("linear", "gaussian-rational-form", {"mass": str(m), "tau_max": tau_max},
                          not bad_exact, f"failing tau: {bad_exact[:10]}" if bad_exact else "exact"))
        out.append(_check("linear", "sin-cos-form", {"mass": str(m), "tau_max": tau_max, "tol": 1e-10},
                          worst <= 1e-10, f"max deviation {worst:.3e}"))
    return out


def suite_quadratic(args):
    tol = args.tol
    kmax = 10
    out = []
    masses = [float(m) for m in _masses(args, ["1/2", "1", "2"])]
    for m in masses:
        for k in range(1, kmax + 1):
            results = {
                "row-sum-b1": ids.rotated_row_sum(k, m, tol)[0],
                "row-sum-b2": ids.rotated_row_sum(k, m, tol)[1],
                "col-sum-b1": ids.rotated_col_sum(k, m, tol)[0],
                "col-sum-b2": ids.rotated_col_sum(k, m, tol)[1],
                "row-squares-b1": ids.quadratic_sums("row", k, m, tol),
                "col-squares-b1": ids.quadratic_sums("col", k, m, tol, "b1"),
                "col-squares-b2": ids.quadratic_sums("col", k, m, tol, "b2"),
            }
            for name, r in results.items():
                out.append(_check("quadratic", name, {"mass": fmt(m), "index": k, "tol": tol},
                                  r.converged and r.diff <= tol, f"diff {r.diff:.3e}, terms {r.terms_used}"))
    return out


SUITE_FUNCS = {
    "conservation": suite_conservation,
    "nonzero": suite_nonzero,
    "velocity": suite_velocity,
    "symmetry": suite_symmetry,
    "series": suite_series,
    "bypass": suite_bypass,
    "linear": suite_linear,
    "quadratic": suite_quadratic,
}


def run_suite(args) -> dict:
    names = SUITES if args.suite == "all" else (args.suite,)
    checks = []
    for name in names:
        log.info("running suite %s", name)
        checks.extend(SUITE_FUNCS[name](args))
    return {"suite": args.suite, "passed": all(c["passed"] for c in checks), "checks": checks}


def cmd_verify(args) -> int:
    summary = run_suite(args)
    text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    _emit(text, args.output)
    n_fail = sum(not c["passed"] for c in summary["checks"])
    print(f"{args.suite}: {'PASS' if summary['passed'] else 'FAIL'} "
          f"({len(summary['checks']) - n_fail}/{len(summary['checks'])} checks)", file=sys.stderr)
    return EXIT_OK if summary["passed"] else EXIT_FAIL


# --------------------------------------------------------------------------
# identities report


IDENTITY_FIELDS = ["name", "parameters", "lhs", "rhs", "diff", "converged", "terms_used", "alt_rhs", "alt_diff", "status"]


def identity_rows(mass: float, index_max: int, tol: float, conj_max: int) -> list[dict]:
    rows = []

    def add(name, params, res, status=""):
        rows.append({
            "name": name, "parameters": params, "lhs": res.value, "rhs": res.target, "diff": res.diff,
            "converged": res.converged, "terms_used": res.terms_used, "alt_rhs": None, "alt_diff": None,
            "status": status or ("agree" if res.converged and res.diff <= tol else "disagree"),
        })

    for k in range(1, index_max + 1):
        p = f"mass={fmt(mass)};mu={k}"
        r1, r2 = ids.rotated_row_sum(k, mass, tol)
        add("row-sum-b1", p, r1)
        add("row-sum-b2", p, r2)
        add("row-squares-b1", p, ids.quadratic_sums("row", k, mass, tol))
        p = f"mass={fmt(mass)};lam={k}"
        c1, c2 = ids.rotated_col_sum(k, mass, tol)
        add("col-sum-b1", p, c1)
        add("col-sum-b2", p, c2)
        add("col-squares-b1", p, ids.quadratic_sums("col", k, mass, tol, "b1"))
        add("col-squares-b2", p, ids.quadratic_sums("col", k, mass, tol, "b2"))
    for r in ids.conjecture_report(conj_max, min(tol, 1e-12), Fraction(mass).limit_denominator(10**6)):
        rows.append({
            "name": f"conjecture-{r.item}", "parameters": f"mass={r.mass};mu={r.mu}", "lhs": r.lhs,
            "rhs": r.rhs, "diff": r.diff, "converged": r.converged, "terms_used": r.terms_used,
            "alt_rhs": r.alt_rhs, "alt_diff": r.alt_diff, "status": r.status,
        })
    return rows


def cmd_identities(args) -> int:
    mass, _ = _parse_mass(args.mass, "float")
    if float(mass) <= 0:
        raise UsageError("identities need a positive mass")
    rows = identity_rows(float(mass), args.index_max, args.tol, args.conjecture_max)
    if args.format == "json":
        payload = [{k: (fmt(v) if isinstance(v, float) else v) for k, v in r.items()} for r in rows]
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(IDENTITY_FIELDS)
        for r in rows:
            w.writerow(["" if r[k] is None else (fmt(r[k]) if isinstance(r[k], float) else r[k]) for k in IDENTITY_FIELDS])
        _emit(buf.getvalue(), args.output)
    return EXIT_OK


# --------------------------------------------------------------------------
# bypass


def cmd_bypass(args) -> int:
    try:
        T = byp.BypassSet.load(args.set)
    except OSError as exc:
        raise InvalidBypassSet(f"cannot read {args.set}: {exc}") from exc
    mass, mode = _parse_mass(args.mass, args.mode)
    lines = []
    if args.conservation:
        total = byp.conservation_bypass(T, mass, mode)
        lines.append(f"conservation={fmt(total)}")
    elif args.n is not None or args.tau is not None:
        if args.n is None or args.tau is None:
            raise UsageError("a query needs both --n and --tau")
        site = Site(args.n, args.tau)
        a = byp.amplitude_bypass(site, T, mass, mode)
        lines.append(_amp_line(site, a, mode))
    else:
        rows = byp.arrival_amplitudes(T, mass, mode)
        wanted = {s: None for s in T}
        for row in rows:
            for s in wanted:
                if s.tau == row.tau:
                    wanted[s] = row[s.n]
        for s, a in wanted.items():
            lines.append(_amp_line(s, a, mode))
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _amp_line(site: Site, a, mode: str) -> str:
    if mode == "exact":
        f = a.to_float()
        return (f"n={site.n} tau={site.tau} a1={fmt(f.a1)} a2={fmt(f.a2)} P={fmt(a.prob)} "
                f"A1={fmt(a.A1)} A2={fmt(a.A2)} k={a.k}")
    return f"n={site.n} tau={site.tau} a1={fmt(a.a1)} a2={fmt(a.a2)} P={fmt(a.prob)}"


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feynman-checkers", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json")):
        p.add_argument("--mass", default="1", help="m*eps as p/q (exact) or decimal (float)")
        p.add_argument("--mode", choices=amp.MODES, default=None)
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("amplitude", help="amplitude at one site")
    common(p, ("text", "json"))
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--x", help="physical position (with --t, --eps)")
    p.add_argument("--t", help="physical time")
    p.add_argument("--eps", help="lattice step")
    p.add_argument("--m", help="physical mass (with --eps)")
    p.add_argument("--method", choices=("dp", "closed", "oracle"), default="dp")
    p.set_defaults(func=cmd_amplitude)

    p = sub.add_parser("distribution", help="probabilities along one row as CSV")
    common(p)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--tau-max", type=int, default=env_tau_max(LIMITS.float_tau))
    p.add_argument("--totals", action="store_true")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--tau-max", type=int, default=None)
    p.add_argument("--mass", default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=20210)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("identities", help="identity and conjecture report")
    p.add_argument("--mass", default="1")
    p.add_argument("--index-max", type=int, default=10)
    p.add_argument("--conjecture-max", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_identities)

    p = sub.add_parser("bypass", help="amplitudes avoiding a set of sites")
    common(p, ("text",))
    p.add_argument("--set", required=True, help="JSON file [[n, tau], ...]")
    p.add_argument("--n", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--conservation", action="store_true")
    p.set_defaults(func=cmd_bypass)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "tol", 1.0) <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except NonBlockingSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONBLOCKING
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, UnreachableSiteError, InvalidBypassSet, HypothesisViolation, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
