"""Command-line front end.

Every subcommand builds one flat record and prints it either as compact
JSON (the default) or as ``key: value`` lines with ``--human``.  Numbers
are exact: integers as decimal strings, rationals as ``INT/INT``.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import bounds, constructions, slp
from .arith import format_rational, parse_polynomial, parse_rational
from .errors import ParseError, PreconditionError, SaqError
from .formula import (SignCondition, additive_format, dense_format, eval_formula,
                      is_p_closed, nonstrict_to_strict, parse_formula,
                      relaxed_sign_condition, sign_condition_formula, to_dnf)
from .limits import current_limits
from .line import intervals, sampling
from .line.algebraic import format_point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return str(v)


def render(record, human=False):
    record = jsonable(record)
    if not human:
        return json.dumps(record, separators=(",", ":"), ensure_ascii=False)
    lines = []
    for key, val in record.items():
        if isinstance(val, list):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(x, ensure_ascii=False) if isinstance(x, (dict, list)) else x}"
                         for x in val)
        elif isinstance(val, dict):
            lines.append(f"{key}: " + ", ".join(
                f"{k}={','.join(map(str, v)) if isinstance(v, list) else v}" for k, v in val.items()))
        else:
            lines.append(f"{key}: {'true' if val is True else 'false' if val is False else val}")
    return "\n".join(lines)


# argument helpers

def _ints(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"bad integer list {text!r}") from None


def _rationals(text, sep=","):
    return [parse_rational(x.strip()) for x in text.split(sep) if x.strip()]


def _split(text):
    return [x.strip() for x in text.split(";") if x.strip()]


def _poly(text, nvars=None):
    return parse_polynomial(text, nvars)


def _polys(text, nvars=None):
    raw = [parse_polynomial(x) for x in _split(text)]
    n = max([p.nvars for p in raw] + [nvars or 0])
    return [parse_polynomial(x, n) for x in _split(text)]


def _formula(args):
    if args.formula is None:
        raise ParseError("--formula is required")
    return parse_formula(args.formula, args.dim)


def _points(text):
    return [tuple(_rationals(p)) for p in _split(text)]


def _box(text):
    out = []
    for axis in _split(text):
        pair = _rationals(axis)
        if len(pair) != 2:
            raise ParseError(f"box axis needs lo,hi: {axis!r}")
        out.append(tuple(pair))
    return out


def _formula_record(name, f, **extra):
    dense = dense_format(f)
    add = additive_format(f)
    rec = {"construction": name, "dim": f.dim, "formula": str(f),
           "dense": {"s": dense.s, "d": dense.d, "k": dense.k},
           "additive": {"a": add.a, "k": add.k}}
    rec.update(extra)
    return rec


# subcommands

def cmd_chi(args):
    degs = _ints(args.d)
    return bounds.BoundReport("chi", bounds.chi(args.k, degs),
                              {"k": args.k, "degs": degs}).to_dict()


def cmd_bound(args):
    kind = args.kind
    if kind == "main":
        rep = bounds.report("main_bound_uniform",
                            bounds.main_bound_uniform(args.s, args.d, args.d0, args.k, args.kprime),
                            s=args.s, d=args.d, d0=args.d0, k=args.k, kprime=args.kprime)
        out = rep.to_dict()
        if args.consistency:
            out["consistency"] = bounds.bound_consistency(args.s, args.d, args.d0, args.k, args.kprime)
        return out
    if kind == "main-list":
        degs = _ints(args.degrees)
        return bounds.report("main_bound_list",
                             bounds.main_bound_list(degs, args.d0, args.k, args.kprime),
                             degrees=degs, d0=args.d0, k=args.k, kprime=args.kprime).to_dict()
    if kind == "bpr8":
        return bounds.report("bpr8", bounds.bpr8_bound(args.s, args.d, args.k, args.kprime),
                             s=args.s, d=args.d, k=args.k, kprime=args.kprime).to_dict()
    if kind == "beta":
        degs = _ints(args.degrees)
        out = bounds.report("beta_bound", bounds.beta_bound(args.k, degs), k=args.k, degs=degs).to_dict()
        out["chi_abs_bound"] = str(bounds.chi_abs_bound(args.k, degs))
        return out
    if kind == "gp":
        return bounds.geometric_permutations_bound(args.n, args.d, args.kt).to_dict()
    if kind == "tight":
        return bounds.report("tight_example_count",
                             bounds.tight_example_count(args.s, args.d, args.d0, args.k),
                             s=args.s, d=args.d, d0=args.d0, k=args.k).to_dict()
    if kind == "formats":
        jf = bounds.join_format(args.p, args.k, args.a, args.s, args.d)
        sf = bounds.star_format(args.p, args.k, args.a)
        return {"formula": "formats", "params": {"p": args.p, "k": args.k, "a": args.a,
                                                 "s": args.s, "d": args.d},
                "join": {"M": jf.M, "Mprime": jf.Mprime, "N": jf.N, "degree": jf.degree},
                "star": {"M": sf.M, "N": sf.N, "Mprime": sf.Mprime, "check": sf.check}}
    if kind == "homotopy":
        return {"formula": "homotopy", "reports": [r.to_dict() for r in
                                                   bounds.homotopy_exponents(args.k, args.a)]}
    raise ParseError(f"unknown bound {kind!r}")


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise PreconditionError(f"cannot read {path}: {exc.strerror}") from None


def cmd_slp(args):
    reps = [slp.parse_slp(_read(p)) for p in args.file]
    if not reps:
        raise ParseError("--file is required")
    rep = reps[0]
    if args.action == "validate":
        out = []
        for path, r in zip(args.file, reps):
            v = slp.validate(r, division_free=not args.normal_form)
            out.append({"file": path, "ok": v.ok, "step": v.step, "field": v.field,
                        "message": v.message, "length": r.length})
        return {"action": "validate", "ok": all(x["ok"] for x in out), "reports": out}
    if args.action == "expand":
        val = slp.expand(rep, current_limits()["term_limit"])
        if isinstance(val, tuple):
            return {"action": "expand", "numerator": str(val[0]), "denominator": str(val[1]),
                    "length": rep.length}
        return {"action": "expand", "polynomial": str(val), "length": rep.length}
    if args.action == "split":
        num, den = slp.split_quotient(rep)
        return {"action": "split", "numerator": slp.format_slp(num),
                "denominator": slp.format_slp(den), "numerator_length": num.length,
                "denominator_length": den.length, "shared_steps": slp.shared_steps(rep)}
    if args.action == "reduce":
        f = _formula(args)
        limit = current_limits()["term_limit"]
        table = {}
        for r in reps:
            val = slp.expand(r, limit)
            if isinstance(val, tuple):
                raise PreconditionError("fewnomial reduction needs division-free programs")
            table[val.extend(f.dim) if val.nvars < f.dim else val] = r
        system = slp.fewnomial_reduce(f, table, limit)
        return {"action": "reduce", "k": system.k, "ambient": system.ambient,
                "trinomial_count": len(system.trinomials),
                "trinomials": [str(t) for t in system.trinomials],
                "formula": str(system.rewritten)}
    raise ParseError(f"unknown slp action {args.action!r}")


def _sigma(args):
    fam = _polys(args.family, args.dim)
    signs = [{"+": 1, "-": -1, "0": 0}.get(s.strip()) for s in args.signs.split(",")]
    if None in signs or len(signs) != len(fam):
        raise ParseError("--signs needs one of +,-,0 per family member")
    return SignCondition(zip(fam, signs))


def cmd_formula(args):
    if args.action == "format":
        f = _formula(args)
        return _formula_record("format", f, p_closed=is_p_closed(f))
    if args.action == "dnf":
        f = _formula(args)
        d = to_dnf(f, current_limits()["clause_limit"])
        return {"action": "dnf", "dim": f.dim, "formula": str(d)}
    if args.action == "eval":
        f = _formula(args)
        if args.point is None:
            raise ParseError("--point is required")
        pt = _rationals(args.point)
        return {"action": "eval", "point": pt, "value": eval_formula(f, pt)}
    if args.action == "signcond":
        return {"action": "signcond", "formula": str(sign_condition_formula(_sigma(args)))}
    if args.action == "relax":
        sigma = _sigma(args)
        if args.strict:
            f = nonstrict_to_strict(sigma, parse_rational(args.eps), parse_rational(args.delta),
                                    parse_rational(args.omega), args.dim)
        else:
            f = relaxed_sign_condition(sigma, parse_rational(args.delta), args.dim)
        return {"action": "relax", "formula": str(f)}
    raise ParseError(f"unknown formula action {args.action!r}")


def _map(args, k):
    if args.map is None:
        return constructions.PolyMap.identity(k)
    return constructions.PolyMap(tuple(_polys(args.map, k)))


def cmd_construct(args):
    c = args.action
    R = parse_rational(args.R)
    if c in ("tube", "defpoly", "cr"):
        return _construct_poly(args, R)
    phi = _formula(args)
    if c == "join":
        f = constructions.join(phi, args.p, R)
    elif c == "fibjoin":
        f = constructions.fibered_join(phi, _map(args, phi.dim), args.p, R)
    elif c == "thickjoin":
        f = constructions.thickened_fibered_join(phi, _map(args, phi.dim), args.p, R,
                                                 parse_rational(args.eps))
    elif c == "diagonal":
        f = constructions.thickened_diagonal(phi, args.p, R, parse_rational(args.eps))
    elif c == "dagger":
        if args.Rprime is None:
            f = constructions.dagger(phi, args.literal)
        else:
            f = constructions.dagger_RRprime(phi, R, parse_rational(args.Rprime), args.literal)
    elif c == "star":
        f = constructions.star_formula(phi, args.p, R, parse_rational(args.Rprime or "1"),
                                       args.literal)
    elif c == "bar":
        radii = _rationals(args.radii) if args.radii else None
        blocks = _ints(args.blocks) if args.blocks else None
        f = constructions.level1_bar(phi, radii=radii, blocks=blocks)
    else:
        raise ParseError(f"unknown construction {c!r}")
    return _formula_record(c, f)


def _construct_poly(args, R):
    c = args.action
    if c == "tube":
        if args.P is None or args.Q is None:
            raise ParseError("--P and --Q are required")
        P, Q = _polys(f"{args.P};{args.Q}")
        if args.t is not None:
            f = constructions.tube_at(P, Q, R, parse_rational(args.t))
        else:
            f = constructions.deformation_tube(P, Q, R)
        return _formula_record("tube", f, N=constructions.tube_exponent(Q))
    if args.H is None:
        raise ParseError("--H is required")
    if c == "defpoly":
        if args.Q is None:
            raise ParseError("--Q is required")
        Q, H = _polys(f"{args.Q};{args.H}")
        return {"construction": "defpoly",
                "polynomial": str(constructions.def_poly(Q, H, parse_rational(args.zeta)))}
    H = _poly(args.H, args.dim)
    system = constructions.cr_system(H, args.p, args.homogenized)
    return {"construction": "cr", "polynomials": [str(q) for q in system]}


def _sets(args):
    if args.sets is None:
        raise ParseError("--sets is required")
    return [intervals.realize_univariate(parse_formula(t, 1)) for t in _split(args.sets)]


def cmd_line(args):
    a = args.action
    if a == "census":
        if args.family is None:
            raise ParseError("--family is required")
        fam = _polys(args.family, 1)
        if any(p.nvars != 1 for p in fam):
            raise PreconditionError("census family must be univariate")
        census = intervals.sign_condition_census(fam)
        if args.check:
            s = len(fam)
            d = max(p.total_degree() for p in fam)
            if args.check == "bpr8":
                bound = bounds.bpr8_bound(s, d, 1, 1)
            else:
                bound = bounds.main_bound_uniform(s, d, 1, 1, 1)
            return {"sum_b0": census.total, "bound": bound, "ok": census.total <= bound}
        return {"action": "census", "rows": census.to_rows(), "sum_b0": census.total}
    if a == "realize":
        f = _formula(args)
        return {"action": "realize", "set": str(intervals.realize_univariate(f))}
    sets = _sets(args)
    if a == "endpoints":
        pts = sorted({p for s in sets for p in s.endpoints()})
        return {"action": "endpoints", "sets": [str(s) for s in sets],
                "endpoints": [format_point(p) for p in pts]}
    if a == "refine":
        part = intervals.common_refinement(sets)
        return {"action": "refine", "partition": str(part), "cells": len(part)}
    if a == "boolean":
        alg = intervals.basic_boolean_algebra(sets)
        return {"action": "boolean",
                "atoms": [{"labels": sorted(k), "set": str(s)} for k, s in alg.atoms],
                "components": [str(s) for s in alg.components]}
    if a == "cdd":
        part = intervals.cdd_line(sets)
        return {"action": "cdd", "partition": str(part), "cells": len(part),
                "adapted": intervals.is_adapted(part, sets)}
    raise ParseError(f"unknown line action {a!r}")


def cmd_sample(args):
    a = args.action
    if a == "grid":
        f = _formula(args)
        pts = sampling.grid_sample(f, _box(args.box), parse_rational(args.step))
        return {"action": "grid", "count": len(pts), "points": [list(p) for p in pts]}
    if a == "hausdorff":
        if args.A is None or args.B is None:
            raise ParseError("--A and --B are required")
        return {"action": "hausdorff", "d2": sampling.hausdorff_grid(_points(args.A), _points(args.B))}
    if a == "tube-limit":
        if args.P is None or args.Q is None or args.F is None:
            raise ParseError("--P, --Q and --F are required")
        P, Q, F = _polys(f"{args.P};{args.Q};{args.F}", 2)
        ts = _rationals(args.ts)
        records, monotone = sampling.tube_limit_experiment(
            P, Q, F, parse_rational(args.R), ts, parse_rational(args.step), threads=args.threads)
        return {"action": "tube-limit", "records": records, "monotone": monotone}
    raise ParseError(f"unknown sample action {a!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="key: value output")
    common.add_argument("--json", action="store_true", help="compact JSON output (default)")
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="saq", description="Exact quantitative real algebraic geometry toolkit.",
                parents=[common])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("chi", parents=[common], help="Euler characteristic of a complete intersection")
    c.add_argument("-k", type=int, required=True)
    c.add_argument("-d", required=True, help="comma-separated degrees")
    c.set_defaults(run=cmd_chi)

    b = sub.add_parser("bound", parents=[common], help="explicit bounds")
    b.add_argument("kind", choices=["main", "main-list", "bpr8", "beta", "gp", "tight",
                                    "formats", "homotopy"])
    for flag, default in (("-s", 1), ("-d", 1), ("--d0", 1), ("-k", 1), ("--kprime", None),
                          ("-n", 2), ("--kt", 1), ("-p", 1), ("-a", 0)):
        b.add_argument(flag, type=int, default=default)
    b.add_argument("--degrees", default="")
    b.add_argument("--consistency", action="store_true")
    b.set_defaults(run=cmd_bound)

    s = sub.add_parser("slp", parents=[common], help="additive straight-line programs")
    s.add_argument("action", choices=["validate", "expand", "split", "reduce"])
    s.add_argument("--file", action="append", default=[])
    s.add_argument("--formula")
    s.add_argument("--dim", type=int)
    s.add_argument("--normal-form", action="store_true", help="allow negative exponents in the final step")
    s.set_defaults(run=cmd_slp)

    f = sub.add_parser("formula", parents=[common], help="formula utilities")
    f.add_argument("action", choices=["format", "dnf", "eval", "signcond", "relax"])
    f.add_argument("--formula")
    f.add_argument("--dim", type=int)
    f.add_argument("--point")
    f.add_argument("--family", default="")
    f.add_argument("--signs", default="")
    f.add_argument("--delta", default="1/10")
    f.add_argument("--eps", default="1/100")
    f.add_argument("--omega", default="10")
    f.add_argument("--strict", action="store_true")
    f.set_defaults(run=cmd_formula)

    k = sub.add_parser("construct", parents=[common], help="join, dagger, tube and related formulas")
    k.add_argument("action", choices=["join", "fibjoin", "thickjoin", "diagonal", "dagger",
                                      "star", "tube", "bar", "defpoly", "cr"])
    k.add_argument("--formula")
    k.add_argument("--dim", type=int)
    k.add_argument("-p", type=int, default=1)
    k.add_argument("-R", default="1")
    k.add_argument("--Rprime")
    k.add_argument("--eps", default="1/100")
    k.add_argument("--map", help="semicolon-separated components")
    k.add_argument("--literal", action="store_true", help="use the slack rules exactly as printed")
    k.add_argument("--P")
    k.add_argument("--Q")
    k.add_argument("--t")
    k.add_argument("--H")
    k.add_argument("--zeta", default="1/2")
    k.add_argument("--homogenized", action="store_true")
    k.add_argument("--radii")
    k.add_argument("--blocks")
    k.set_defaults(run=cmd_construct)

    ln = sub.add_parser("line", parents=[common], help="exact computations on the real line")
    ln.add_argument("action", choices=["realize", "endpoints", "refine", "boolean", "cdd", "census"])
    ln.add_argument("--formula")
    ln.add_argument("--dim", type=int, default=1)
    ln.add_argument("--sets", help="semicolon-separated formulas in x1")
    ln.add_argument("--family", help="semicolon-separated polynomials in x1")
    ln.add_argument("--check", choices=["bpr8", "main"])
    ln.set_defaults(run=cmd_line)

    sm = sub.add_parser("sample", parents=[common], help="grid sampling (k <= 3)")
    sm.add_argument("action", choices=["grid", "hausdorff", "tube-limit"])
    sm.add_argument("--formula")
    sm.add_argument("--dim", type=int)
    sm.add_argument("--box", default="-1,1")
    sm.add_argument("--step", default="1/10")
    sm.add_argument("--A")
    sm.add_argument("--B")
    sm.add_argument("--P")
    sm.add_argument("--Q")
    sm.add_argument("--F")
    sm.add_argument("-R", default="2")
    sm.add_argument("--ts", default="1/10,1/100,1/1000")
    sm.set_defaults(run=cmd_sample)
    return p


# values that may start with "-" and would otherwise look like flags
_VALUE_FLAGS = {"--box", "--point", "--A", "--B", "--P", "--Q", "--F", "--H", "--map",
                "--family", "--formula", "--sets", "--radii", "--ts", "--zeta", "--eps",
                "--delta", "--omega", "-R", "--Rprime", "--t", "--step"}


def _glue(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, out=None):
    """Run one invocation; returns the exit code."""
    out = out or sys.stdout
    human = False
    try:
        current_limits()
        args = build_parser().parse_args(_glue(sys.argv[1:] if argv is None else argv))
        human = args.human
        if args.threads < 1:
            raise PreconditionError("--threads must be positive")
        if getattr(args, "kprime", 0) is None:
            args.kprime = args.k
        record = args.run(args)
    except SaqError as exc:
        code = exc.exit_code
        reason = str(exc).replace("\n", " ")
    except RecursionError:
        code, reason = 3, "recursion limit exceeded"
    except (ValueError, ArithmeticError, TypeError, KeyError, IndexError) as exc:
        code, reason = 2, f"{type(exc).__name__}: {exc}".replace("\n", " ")
    else:
        print(render(record, human), file=out)
        return 0
    kind = {1: "parse", 2: "precondition", 3: "resource"}[code]
    print(json.dumps({"error": kind, "reason": reason}, separators=(",", ":")), file=out)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
