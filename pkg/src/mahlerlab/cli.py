"""Command-line front end: ``mahlerlab {eval, verify, lfun, nome}``.

Exit codes: 0 success, 1 verification failure, 2 domain error,
3 convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import harness
from .errors import ConvergenceError, DomainError, MahlerLabError, NotImplementedIdentity
from .lfun import KNOWN_CONDUCTORS, ApCache, curve_from_k2, lprime_at_0
from .nome import invert_base, nome_qj
from .numkit import precision, set_precision
from .qseries import FamilyId, family_argument, mahler_qseries
from .torus import family_polynomial, jensen_integrand, mahler_jensen, mu_polynomial

EXIT_OK, EXIT_FAIL, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3
AUTO_AGREEMENT = 1e-6


def parse_number(text: str) -> complex | float:
    """Parse a real or complex literal; ``i`` and ``j`` both denote the unit."""
    s = text.strip().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    try:
        z = complex(s.replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    return z.real if z.imag == 0 else z


def number_arg(text: str) -> str:
    """argparse type: validate a numeric literal but keep its text, so that
    extended precision can re-read it without a binary rounding step."""
    parse_number(text)
    return text.strip().replace(" ", "")


def _value(text):
    """Numeric value of a literal at the active precision."""
    if text is None:
        return None
    if precision().name != "extended":
        return parse_number(text)
    return precision().literal(text)


def _scalar(v):
    """Native value as float when real, complex otherwise (full digits kept
    for extended precision by :func:`_fmt`)."""
    try:
        return float(v)
    except TypeError:
        c = complex(v)
        return c.real if c.imag == 0 else c


def _num_out(v):
    """JSON-friendly number: float, or [re, im] for complex."""
    v = _scalar(v)
    return [v.real, v.imag] if isinstance(v, complex) else v


def _fmt(v) -> str:
    if precision().name == "extended":
        return str(v.real if hasattr(v, "imag") and v.imag == 0 else v)
    return repr(_scalar(v))


def _emit(payload: dict | list, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    rows = payload if isinstance(payload, list) else [payload]
    if fmt == "csv":
        keys = list(rows[0])
        w = csv.DictWriter(out, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        return
    for r in rows:
        out.write("  ".join(f"{k}={v}" for k, v in r.items()) + "\n")


# ---------------------------------------------------------------------------
# eval


def _series_tol() -> float:
    return float(precision().eps)


def _eval_one(f, t, q, k, method):
    """(value, tolerance estimate) for one route."""
    if method == "integral":
        P = mu_polynomial(k) if k is not None else family_polynomial(f, t)
        val, info = mahler_jensen(P, full_output=True)
        return val, info.error_estimate
    if method == "qseries" and q is not None:
        return mahler_qseries(f, q), _series_tol()
    if method == "lattice":
        return harness.evaluate(f, t, method), 1e-12
    return harness.evaluate(f, t, method, keep_precision=True), _series_tol()


def _dump_grid(path, f, t, k, n):
    P = mu_polynomial(k) if k is not None else family_polynomial(f, t)
    th = 2 * math.pi * (np.arange(n) + 0.5) / n
    vals = jensen_integrand(P, th)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta", "integrand"])
        for a, b in zip(th, vals):
            w.writerow([repr(float(a)), repr(float(b))])


def cmd_eval(args, out) -> int:
    f = FamilyId.parse(args.family)
    t = q = k = None
    args.t, args.k, args.q = _value(args.t), _value(args.k), _value(args.q)
    if args.k is not None:
        if f is not FamilyId.MU:
            raise DomainError("--k applies only to the mu family")
        k = args.k
        if k != 0:
            t = 16 / k ** 2
    elif args.q is not None:
        q = args.q
        t = complex(family_argument(f, q))
        t = t.real if t.imag == 0 else t
    else:
        t = args.t
    if args.dump_grid:
        _dump_grid(args.dump_grid, f, t, k, args.grid_n)
    if t is None and args.method not in ("integral", "auto"):
        raise DomainError("k = 0 is reachable only by the integral method")
    methods = ["qseries", "integral"] if args.method == "auto" else [args.method]
    if args.method == "auto" and t is None:
        methods = ["integral"]
    results = {}
    errors = {}
    for m in methods:
        try:
            results[m] = _eval_one(f, t, q, k, m)
        except DomainError as exc:
            if args.method != "auto":
                raise
            errors[m] = str(exc)
    if not results:
        raise DomainError("; ".join(f"{m}: {e}" for m, e in errors.items()))
    primary = next(iter(results))
    value, tol = results[primary]
    payload = {
        "family": f.value,
        "argument": _num_out(t) if t is not None else None,
        "method": primary,
        "value": _num_out(value),
        "value_str": _fmt(value),
        "tol_estimate": float(tol),
        "precision": precision().name,
    }
    if q is not None:
        payload["q"] = _num_out(q)
    if k is not None:
        payload["k"] = _num_out(k)
    code = EXIT_OK
    if args.method == "auto":
        payload["routes"] = {m: _num_out(v) for m, (v, _) in results.items()}
        if errors:
            payload["skipped"] = errors
        if len(results) > 1:
            vals = [float(v) for v, _ in results.values()]
            spread = max(vals) - min(vals)
            payload["route_spread"] = spread
            if spread > AUTO_AGREEMENT:
                code = EXIT_FAIL
    _emit(payload, args.format, out)
    return code


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, out) -> int:
    if args.all:
        reports = harness.verify_all(n_samples=args.samples, seed=args.seed)
        if args.tol is not None:
            for r in reports:
                r.tol = args.tol
                r.passed = bool(r.samples) and r.max_residual < args.tol
    elif args.id is None:
        raise DomainError("give --id or --all")
    elif args.id.upper() in harness.MODULAR_PARAMS:
        qs = [args.q] if args.q is not None else [0.03, 0.06]
        tol = 1e-10 if args.tol is None else args.tol
        reports = [harness.verify_modular_param(args.id, q, tol) for q in qs]
    else:
        reports = [harness.verify(args.id, args.samples, args.tol, args.seed)]
    if args.format == "json":
        out.write(harness.reports_to_json(reports) + "\n")
    elif args.format == "csv":
        out.write(harness.reports_to_csv(reports))
    else:
        for r in reports:
            flag = "PASS" if r.passed else ("INFO" if r.conjectural else "FAIL")
            tag = " (conjectural)" if r.conjectural else ""
            out.write(f"{flag} {r.id}{tag}: max residual {r.max_residual:.3e} "
                      f"tol {r.tol:.0e} over {len(r.samples)} sample(s) [{r.route}]"
                      + (f" {r.note}" if r.note else "") + "\n")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


# ---------------------------------------------------------------------------
# lfun


def cmd_lfun(args, out) -> int:
    curve = curve_from_k2(args.k2, twist=not args.no_twist)
    conductor = args.conductor
    if conductor is None:
        k2 = int(args.k2)
        if args.no_twist or k2 not in KNOWN_CONDUCTORS:
            raise DomainError("no recorded conductor for this model; pass --conductor")
        conductor = KNOWN_CONDUCTORS[k2]
    cache = ApCache(curve.label, args.cache_dir) if args.cache_dir else None
    res = lprime_at_0(curve, conductor, N_terms=args.terms, cache=cache)
    payload = {
        "k2": args.k2,
        "model": f"v^2 = u^3 + {curve.A} u^2 + {curve.B} u",
        "label": curve.label,
        "conductor": res.conductor,
        "n_coefficients": res.n_terms,
        "fe_residual": res.fe_residual,
    }
    if args.deriv0:
        payload["lprime_at_0"] = res.value
    else:
        payload["l_at_2"] = res.value * 4 * math.pi ** 2 / conductor
    _emit(payload, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# nome


def cmd_nome(args, out) -> int:
    if (args.j is None) == (args.family is None):
        raise DomainError("give exactly one of --j or --family")
    args.alpha = _value(args.alpha)
    if args.j is not None:
        v = nome_qj(args.j, args.alpha, method=args.method)
        payload = {"j": args.j, "alpha": _num_out(args.alpha), "q": _num_out(v), "q_str": _fmt(v)}
    else:
        v = invert_base(args.family, args.alpha)
        payload = {"family": FamilyId.parse(args.family).value, "alpha": _num_out(args.alpha),
                   "q": _num_out(v), "q_str": _fmt(v)}
    _emit(payload, args.format, out)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mahlerlab", description="Mahler measures of genus-one families.")
    p.add_argument("--prec", choices=["double", "extended"], default=None,
                   help="precision mode (default: $MAHLERLAB_PREC or double)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=["json", "csv", "plain"], default="plain")

    e = sub.add_parser("eval", help="evaluate a Mahler measure")
    e.add_argument("--family", required=True, choices=[f.value for f in FamilyId])
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--t", type=number_arg)
    g.add_argument("--k", type=number_arg, help="mu family only: t = 16/k^2")
    g.add_argument("--q", type=number_arg, help="nome; the argument is the base function at q")
    e.add_argument("--method", choices=["auto", *harness.METHODS], default="auto")
    e.add_argument("--dump-grid", metavar="PATH", help="write theta,integrand CSV of the Jensen integrand")
    e.add_argument("--grid-n", type=int, default=512)
    common(e)

    v = sub.add_parser("verify", help="check identities")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--id")
    g.add_argument("--all", action="store_true")
    v.add_argument("--samples", type=int, default=5)
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--q", type=float, default=None, help="q for modular-equation certificates")
    common(v)

    lf = sub.add_parser("lfun", help="L-function of the curve attached to k^2")
    lf.add_argument("--k2", type=int, required=True)
    lf.add_argument("--deriv0", action="store_true", help="print L'(E, 0) (default prints L(E, 2))")
    lf.add_argument("--terms", type=int, default=100_000, help="maximum number of coefficients")
    lf.add_argument("--cache-dir", default=os.environ.get("MAHLERLAB_CACHE_DIR"))
    lf.add_argument("--conductor", type=int, default=None)
    lf.add_argument("--no-twist", action="store_true", help="use the untwisted model")
    common(lf)

    n = sub.add_parser("nome", help="elliptic nome or base-function inversion")
    n.add_argument("--j", type=int)
    n.add_argument("--family", choices=[f.value for f in FamilyId])
    n.add_argument("--alpha", type=number_arg, required=True)
    n.add_argument("--method", choices=["log", "direct"], default="log")
    common(n)
    return p


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "lfun": cmd_lfun, "nome": cmd_nome}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    old = set_precision(args.prec) if args.prec else None
    try:
        return COMMANDS[args.command](args, out)
    except (DomainError, NotImplementedIdentity) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONVERGENCE
    except MahlerLabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    finally:
        if old is not None:
            set_precision(old)


if __name__ == "__main__":
    sys.exit(main())
