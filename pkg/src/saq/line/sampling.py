"""Exact membership sampling on rational grids (k <= 3).

Sampling is a one-sided witness: it lists grid points that satisfy a
formula exactly and never claims that a region is empty.  Distances are
reported squared, as rationals.
"""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import floor, lcm

import numpy as np
from scipy.spatial import cKDTree

from ..arith import Polynomial, as_rational
from ..errors import PreconditionError, ResourceLimitError
from ..formula import And, Atom, Not, holds
from ..limits import limit
from .algebraic import isolate_roots
from .upoly import from_polynomial

INT64_SAFE = 2 ** 62


def grid_axes(box, step):
    step = as_rational(step)
    if step <= 0:
        raise PreconditionError("step must be positive")
    if not box:
        raise PreconditionError("box must have at least one axis")
    if len(box) > 3:
        raise PreconditionError("grid sampling supports at most 3 dimensions")
    axes = []
    for lo, hi in box:
        lo, hi = as_rational(lo), as_rational(hi)
        if hi < lo:
            raise PreconditionError("empty box")
        axes.append((lo, floor((hi - lo) / step)))
    total = 1
    for _, n in axes:
        total *= n + 1
    cap = limit("grid_cap")
    if total > cap:
        raise ResourceLimitError(f"grid_cap exceeded: {total} > {cap}")
    return axes, step


def _lattice_terms(poly, axes, step):
    """Integer polynomial in the grid indices with the same signs as ``poly``."""
    k = poly.nvars
    ring = [Polynomial.var(k, i + 1).scale(step) + lo for i, (lo, _) in enumerate(axes)]
    sub = poly.substitute(ring) if k else poly
    if not isinstance(sub, Polynomial):
        sub = Polynomial.constant(k, sub)
    den = 1
    for c in sub.terms.values():
        den = lcm(den, c.denominator)
    return {e: int(c * den) for e, c in sub.terms.items()}


def _eval_lattice(terms, axes):
    shape = tuple(n + 1 for _, n in axes)
    k = len(axes)
    bound = sum(abs(c) * int(np.prod([max(n, 1) ** e for (_, n), e in zip(axes, exps)]))
                for exps, c in terms.items())
    dtype = np.int64 if bound < INT64_SAFE else object
    out = np.zeros(shape, dtype=dtype)
    powers = {}
    for exps, c in terms.items():
        val = np.full(shape, c, dtype=dtype) if dtype is object else np.int64(c)
        term = None
        for i, e in enumerate(exps):
            if not e:
                continue
            key = (i, e)
            if key not in powers:
                idx = np.arange(shape[i], dtype=np.int64)
                arr = idx.astype(object) ** e if dtype is object else idx ** e
                view = [1] * k
                view[i] = shape[i]
                powers[key] = arr.reshape(view)
            term = powers[key] if term is None else term * powers[key]
        out = out + (val if term is None else val * term)
    return out


def _sign_array(arr):
    if arr.dtype == object:
        return np.vectorize(lambda v: (v > 0) - (v < 0), otypes=[np.int8])(arr)
    return np.sign(arr).astype(np.int8)


def _eval_formula_grid(f, axes, step):
    cache = {}
    shape = tuple(n + 1 for _, n in axes)

    def go(node):
        if isinstance(node, Atom):
            if node.poly not in cache:
                cache[node.poly] = _sign_array(_eval_lattice(_lattice_terms(node.poly, axes, step), axes))
            s = cache[node.poly]
            return np.broadcast_to(_holds_array(s, node.rel), shape)
        if isinstance(node, Not):
            return ~go(node.arg)
        vals = [go(a) for a in node.args]
        if isinstance(node, And):
            out = np.ones(shape, dtype=bool)
            for v in vals:
                out &= v
        else:
            out = np.zeros(shape, dtype=bool)
            for v in vals:
                out |= v
        return out

    return go(f)


def _holds_array(s, rel):
    if rel == "=":
        return s == 0
    if rel == ">":
        return s > 0
    if rel == "<":
        return s < 0
    if rel == ">=":
        return s >= 0
    return s <= 0


def grid_sample(f, box, step):
    """Grid points ``lo + step * n`` inside ``box`` satisfying ``f`` exactly."""
    if len(box) != f.dim:
        raise PreconditionError(f"box has {len(box)} axes, formula has dimension {f.dim}")
    axes, step = grid_axes(box, step)
    mask = _eval_formula_grid(f, axes, step)
    idx = np.argwhere(mask)
    return [tuple(lo + step * int(j) for (lo, _), j in zip(axes, row)) for row in idx]


def _dyadic(x, bits):
    scale = 2 ** bits
    return Fraction(round(x * scale), scale)


def zero_set_sample(F, box, step, bits=20, threads=1):
    """Points of ``F = 0`` on the axis-parallel grid lines of a planar box.

    Roots along each line are exact algebraic numbers, reported as dyadic
    rationals within ``2**-bits``; lines contained in the zero set
    contribute all their grid points.
    """
    if F.nvars != 2 or len(box) != 2:
        raise PreconditionError("zero-set sampling is planar")
    axes, step = grid_axes(box, step)
    lines = []
    for axis in (0, 1):
        lo, n = axes[axis]
        for j in range(n + 1):
            lines.append((axis, lo + step * j))
    (xlo, xn), (ylo, yn) = axes
    xhi, yhi = xlo + step * xn, ylo + step * yn
    width = Fraction(1, 2 ** bits)

    def on_line(job):
        axis, c = job
        other = 1 - axis
        vals = [None, None]
        vals[axis] = Polynomial.constant(1, c)
        vals[other] = Polynomial.var(1, 1)
        restricted = F.substitute(vals)
        lo, n = axes[other]
        hi = lo + step * n
        if restricted.is_zero():
            pts = [lo + step * j for j in range(n + 1)]
        else:
            pts = []
            for r in isolate_roots(from_polynomial(restricted)) if restricted.total_degree() else []:
                r = r.refined_to(width)
                v = r.exact if r.exact is not None else _dyadic((r.lo + r.hi) / 2, bits)
                if lo <= v <= hi:
                    pts.append(v)
        return [(c, v) if axis == 0 else (v, c) for v in pts]

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            chunks = list(ex.map(on_line, lines))
    else:
        chunks = [on_line(job) for job in lines]
    out = sorted({p for chunk in chunks for p in chunk})
    return [p for p in out if xlo <= p[0] <= xhi and ylo <= p[1] <= yhi]


def _to_int_array(points, den):
    data = [[int(c * den) for c in p] for p in points]
    top = max((abs(v) for row in data for v in row), default=0)
    k = len(points[0])
    if (2 * top) ** 2 * k < INT64_SAFE:
        return np.array(data, dtype=np.int64), False
    return np.array(data, dtype=object), True


def _directed(A, B, tree):
    """Exact ``max_a min_b |a - b|^2`` on integer arrays."""
    dist, _ = tree.query(A.astype(np.float64))
    top = dist.max()
    margin = top * 1e-9 + 1e-9
    cand = np.nonzero(dist >= top - margin)[0]
    best = 0
    for i in cand:
        diff = B - A[i]
        d2 = (diff * diff).sum(axis=1).min()
        best = max(best, int(d2))
    return best


def hausdorff_grid(A, B):
    """Exact squared Hausdorff distance between two finite rational point sets."""
    A = [tuple(as_rational(c) for c in p) for p in A]
    B = [tuple(as_rational(c) for c in p) for p in B]
    if not A and not B:
        return Fraction(0)
    if not A or not B:
        raise PreconditionError("Hausdorff distance to an empty sample is undefined")
    if len({len(p) for p in A + B}) != 1:
        raise PreconditionError("point sets must share a dimension")
    den = 1
    for p in A + B:
        for c in p:
            den = lcm(den, c.denominator)
    IA, big_a = _to_int_array(A, den)
    IB, big_b = _to_int_array(B, den)
    if big_a or big_b:
        best = 0
        for a in A:
            best = max(best, min(sum((x - y) ** 2 for x, y in zip(a, b)) for b in B))
        for b in B:
            best = max(best, min(sum((x - y) ** 2 for x, y in zip(a, b)) for a in A))
        return Fraction(best)
    ta = cKDTree(IA.astype(np.float64))
    tb = cKDTree(IB.astype(np.float64))
    d2 = max(_directed(IA, IB, tb), _directed(IB, IA, ta))
    return Fraction(d2, den * den)


def tube_limit_experiment(P, Q, F, R, ts, step, bits=20, threads=1):
    """Squared grid-Hausdorff distance between tube slices and the zero set in the ball.

    Returns one record per ``t`` plus whether the distances never increase.
    """
    from .. import constructions

    R = as_rational(R)
    k = P.nvars
    box = [(-R, R)] * k
    zero = [p for p in zero_set_sample(F, box, step, bits, threads)
            if sum(c * c for c in p) <= R * R]
    records = []
    for t in ts:
        t = as_rational(t)
        slice_ = constructions.tube_at(P, Q, R, t)
        pts = grid_sample(slice_, box, step)
        d2 = hausdorff_grid(pts, zero) if pts else None
        records.append({"t": t, "tube_points": len(pts), "zero_points": len(zero), "d2": d2})
    vals = [r["d2"] for r in records]
    monotone = all(a is not None and b is not None and b <= a for a, b in zip(vals, vals[1:]))
    return records, monotone
