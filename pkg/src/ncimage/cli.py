"""Command-line front end: parse, dispatch, emit a JSON (or text) report.

Exit codes: 0 a verdict was produced, 2 the analysis was inconclusive,
1 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .analyzer import (
    Budget,
    _jsonable,
    classify_finiteness,
    central_index,
    density_report,
    in_scaled_orbit,
    is_central,
    is_identity,
    make_report,
    orbit_signature,
    random_tuple,
    similar_mod_scalar,
)
from .errors import NcImageError, ParseError
from .evaluator import evaluate
from .exactmat import Matrix, parse_matrix
from .parser import parse_poly, poly_to_text
from .scalars import div, format_scalar

INCONCLUSIVE = {"inconclusive", "not_certified"}
FAMILIES = ("gl", "nilindex", "distinct-eigs", "idem-nilp", "capelli")


class UsageError(Exception):
    pass


def _parser():
    p = argparse.ArgumentParser(prog="ncimage", description="Images of noncommutative polynomials on matrices.")
    p.add_argument("--version", action="version", version=f"ncimage {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int, default=2, help="matrix size")
        sp.add_argument("--seed", type=int, default=None, help="random seed (default: $NCIMAGE_SEED or 0)")
        sp.add_argument("--trials", type=int, default=30)
        sp.add_argument("--format", choices=("json", "text"), default="json")

    for name in ("identity", "central", "central-index", "finiteness", "density", "obstruction", "lie-witness"):
        sp = sub.add_parser(name)
        sp.add_argument("expr")
        common(sp)
        sp.add_argument("--jmax", type=int, default=None)
        sp.add_argument("--target", default=None, help="matrix literal, rows ';' entries ','")
        sp.add_argument("--verify", default=None, help="witness tuple to replay, matrices separated by '|'")
        sp.add_argument("--k", type=int, default=2, help="power for obstruction")
        sp.add_argument("--nmax", type=int, default=3)
    sp = sub.add_parser("orbit")
    sp.add_argument("matrix")
    common(sp)
    sp.add_argument("--target", default=None, help="second matrix: test target in the scaled orbit of matrix")
    sp = sub.add_parser("construct")
    sp.add_argument("family", choices=FAMILIES)
    common(sp)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--target", default=None)
    sp.add_argument("--verify", default=None)
    sp.add_argument("--central-file", default=None)
    sp = sub.add_parser("synth-carrier")
    common(sp)
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--central-file", default=None)
    return p


def _budget(args):
    seed = args.seed
    if seed is None:
        env = os.environ.get("NCIMAGE_SEED")
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"NCIMAGE_SEED is not an integer: {env!r}") from None
    args.seed = seed
    return Budget(seed=seed, trials=args.trials)


def _flags(args):
    return {k: v for k, v in sorted(vars(args).items())}


def _matrix(text, n=None, what="target"):
    if text is None:
        raise UsageError(f"--{what} is required")
    m = parse_matrix(text)
    if n is not None and m.n != n:
        raise UsageError(f"{what} is {m.n}x{m.n} but --n is {n}")
    return m


def _args_tuple(text):
    return [parse_matrix(part.strip()) for part in text.split("|")]


def _literal(args):
    return " | ".join(a.to_literal() for a in args)


def _scalar_ratio(v, t):
    """c with v = c t, or None."""
    k = next((i for i, x in enumerate(t.e) if x != 0), None)
    if k is None:
        return 1 if v.is_zero() else None
    c = div(v.e[k], t.e[k])
    return c if v == t * c else None


# -- commands ---------------------------------------------------------------------


def cmd_identity(args, budget):
    f = parse_poly(args.expr)
    if args.verify:
        w = _args_tuple(args.verify)
        v = evaluate(f, w, args.n)
        return make_report("identity", [str(f), args.n], budget, "replayed", [], {}, value=v, nonzero=not v.is_zero()), 0
    dec = is_identity(f, args.n, budget)
    wit = [_literal(dec.witness)] if dec.witness else []
    return make_report("identity", [str(f), args.n], budget, dec.verdict, wit, {"failure": dec.bound}, detail=dec), 0


def cmd_central(args, budget):
    f = parse_poly(args.expr)
    if args.verify:
        w = _args_tuple(args.verify)
        v = evaluate(f, w, args.n)
        return make_report("central", [str(f), args.n], budget, "replayed", [], {}, value=v, scalar=v.is_scalar()), 0
    dec = is_central(f, args.n, budget)
    wit = [_literal(dec.witness)] if dec.witness else []
    return make_report("central", [str(f), args.n], budget, dec.verdict, wit, {"failure": dec.bound}, detail=dec), 0


def cmd_central_index(args, budget):
    f = parse_poly(args.expr)
    ci = central_index(f, args.n, args.jmax, budget)
    verdict = f"j={ci.j}" if ci.j else "none_up_to_jmax"
    return make_report("central_index", [str(f), args.n, args.jmax], budget, verdict, [], {}, j=ci.j, detail=ci), 0


def cmd_finiteness(args, budget):
    f = parse_poly(args.expr)
    rep = classify_finiteness(f, args.n, budget, args.jmax)
    code = 2 if rep.verdict in INCONCLUSIVE else 0
    return make_report("finiteness", [str(f), args.n], budget, rep.verdict, [], {}, j=rep.j, detail=rep), code


def cmd_density(args, budget):
    f = parse_poly(args.expr)
    rep = density_report(f, args.n, budget)
    degenerate = rep.identity is not None and rep.identity.holds
    code = 2 if rep.verdict in INCONCLUSIVE and not degenerate else 0
    verdict = "identity" if degenerate else rep.verdict
    return make_report("density", [str(f), args.n], budget, verdict, [], {}, jacobian_rank=rep.jacobian_rank, detail=rep), code


def cmd_orbit(args, budget):
    a = _matrix(args.matrix, None, "matrix")
    sig = orbit_signature(a)
    if args.target is None:
        return make_report("orbit", [a], budget, sig.kind, [], {}, signature=sig), 0
    b = _matrix(args.target, a.n)
    res = similar_mod_scalar(a, b)
    inside = in_scaled_orbit(a, b)
    verdict = {True: "in_scaled_orbit", False: "not_in_scaled_orbit", None: "inconclusive"}[inside]
    lam = format_scalar(res.lam) if res else None
    return (
        make_report("orbit", [a, b], budget, verdict, [], {}, signature=sig, lam=lam, diagnostic=res.diagnostic),
        2 if inside is None else 0,
    )


def _build(args, budget):
    from . import synth

    n = args.n
    carriers = None
    if args.central_file:
        cert = synth.load_central(args.central_file, budget)
        if cert.n != n:
            raise UsageError(f"central file is for n={cert.n}, not {n}")
        ks = list(range(1, min(n, 2) + 1))
        carriers = synth.CarrierSet(n, {k: synth.synthesize_trace_carrier(n, k, cert.poly, budget) for k in ks})
    fam = args.family
    if fam == "gl":
        return synth.gl_image_poly(n, carriers, budget)
    if fam == "nilindex":
        return synth.nilindex_poly(n, args.k, carriers, budget)
    if fam == "distinct-eigs":
        return synth.distinct_eigs_poly(n, args.k, carriers, budget)
    if fam == "idem-nilp":
        return synth.idem_nilp_poly(n, carriers, budget)
    return synth.minpoly_capelli_poly(n, carriers, budget)


def _classify_value(fam, f, v):
    from . import synth

    if v.is_zero():
        return "zero"
    if fam == "gl":
        return "invertible" if v.det() != 0 else "singular_nonzero"
    if fam == "capelli":
        return "nonzero"
    return "in_variety_nonzero" if f.spec.contains(v) else "outside_variety"


def cmd_construct(args, budget):
    f = _build(args, budget)
    fam = args.family
    n = args.n
    inputs = [fam, n, args.k, f.describe()]
    if args.verify:
        w = _args_tuple(args.verify)
        v = f(w)
        out = {"value": v}
        if args.target:
            t = _matrix(args.target, n)
            c = _scalar_ratio(v, t)
            out["mu"] = format_scalar(c) if c is not None else None
            out["verified"] = c is not None and c != 0
        verdict = "verified" if out.get("verified", True) else "rejected"
        return make_report("construct", inputs, budget, verdict, [], {}, polynomial=f.to_dict(), **out), 0 if verdict == "verified" else 1
    rng = budget.rng("construct-samples")
    counts = {}
    for _ in range(budget.trials):
        v = f(random_tuple(rng, n, f.arity, 9))
        key = _classify_value(fam, f, v)
        counts[key] = counts.get(key, 0) + 1
    extra = {"polynomial": f.to_dict(), "samples": dict(sorted(counts.items()))}
    witnesses = []
    verdict = "constructed"
    if args.target:
        t = _matrix(args.target, n)
        if fam == "gl":
            w, mu = f.witness(t), 1
        elif fam == "capelli":
            wt = f.witness(t, budget)
            w, mu = wt.args, wt.mu
        else:
            wt = f.witness(t)
            w, mu = wt.args, wt.mu
        ok = f(w) == t * mu
        witnesses.append(_literal(w))
        extra.update({"mu": format_scalar(mu), "verified": ok})
        verdict = "witness_verified" if ok else "witness_failed"
    return make_report("construct", inputs, budget, verdict, witnesses, {}, **extra), 0


def cmd_lie_witness(args, budget):
    from .lie import lie_witness

    f = parse_poly(args.expr)
    t = _matrix(args.target, args.n)
    if args.verify:
        w = _args_tuple(args.verify)
        ok = evaluate(f, w, args.n) == t
        return make_report("lie_witness", [str(f), t], budget, "verified" if ok else "rejected", [], {}, verified=ok), 0 if ok else 1
    w = lie_witness(f, t, budget)
    ok = evaluate(f, w, args.n) == t
    return make_report("lie_witness", [str(f), t], budget, "witness", [_literal(w)], {}, verified=ok), 0


def cmd_obstruction(args, budget):
    from .lie import sum_commutators_obstruction

    f = parse_poly(args.expr)
    rep = sum_commutators_obstruction(f, args.k, args.nmax, budget)
    wit = [_literal(rep.witness[1])] if rep.witness else []
    code = 2 if rep.verdict in INCONCLUSIVE else 0
    return make_report("obstruction", [str(f), args.k, args.nmax], budget, rep.verdict, wit, {}, detail=rep), code


def cmd_synth_carrier(args, budget):
    from . import synth

    n = args.n
    if args.central_file:
        c0 = synth.load_central(args.central_file, budget).poly
    else:
        c0 = synth.builtin_central(n)
    car = synth.synthesize_trace_carrier(n, args.i, c0, budget)
    return (
        make_report(
            "synth_carrier",
            [n, args.i, poly_to_text(c0)],
            budget,
            "verified" if car.verified else "unverified",
            [],
            {},
            c0=poly_to_text(c0),
            ci=poly_to_text(car.ci),
            terms=len(car.ci),
            certificate=car.certificate,
        ),
        0,
    )


COMMANDS = {
    "identity": cmd_identity,
    "central": cmd_central,
    "central-index": cmd_central_index,
    "finiteness": cmd_finiteness,
    "density": cmd_density,
    "orbit": cmd_orbit,
    "construct": cmd_construct,
    "lie-witness": cmd_lie_witness,
    "obstruction": cmd_obstruction,
    "synth-carrier": cmd_synth_carrier,
}


def _text(report):
    lines = [f"{report['operation']}: {report['verdict']}"]
    for k in sorted(report):
        if k in ("operation", "verdict", "detail", "flags", "polynomial"):
            continue
        v = report[k]
        if v in (None, [], {}):
            continue
        lines.append(f"  {k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    return "\n".join(lines)


def emit(report, fmt, stream):
    if fmt == "text":
        stream.write(_text(report) + "\n")
    else:
        stream.write(json.dumps(report, sort_keys=True, indent=2) + "\n")


def run(argv, stdout=None):
    """Run one command; returns (report, exit code) and writes the report."""
    stdout = stdout or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, 1 if exc.code else 0
    fmt = getattr(args, "format", "json")
    try:
        budget = _budget(args)
        report, code = COMMANDS[args.command](args, budget)
        report["flags"] = _jsonable(_flags(args))
    except (UsageError, NcImageError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, ParseError):
            err.update({"line": exc.line, "column": exc.column})
        report = {"error": err, "version": __version__, "flags": _jsonable(_flags(args))}
        code = 1
        if fmt == "text":
            stdout.write(f"error: {err['type']}: {err['message']}\n")
            return report, code
    emit(report, fmt, stdout)
    return report, code


def main(argv=None):
    _, code = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
