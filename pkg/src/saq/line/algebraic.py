"""Exact real algebraic numbers by isolating intervals.

An :class:`AlgebraicPoint` is a square-free primitive integer polynomial
with exactly one root in an open interval ``(lo, hi)`` whose rational
endpoints are not roots.  Rational roots are pinned exactly: they are
stored with ``exact`` set, ``lo == hi == exact`` and the linear defining
polynomial ``b*x - a``.
"""

from fractions import Fraction
from functools import total_ordering

from ..errors import PreconditionError
from .upoly import (cauchy_bound, degree, format_upoly, gcd_poly, primitive, sign_at,
                    squarefree, sturm_count, sturm_sequence, trim)

INF = float("inf")


def _linear(r):
    r = Fraction(r)
    return (-r.numerator, r.denominator)


@total_ordering
class AlgebraicPoint:
    __slots__ = ("poly", "lo", "hi", "exact")

    def __init__(self, poly, lo, hi, exact=None):
        self.poly = tuple(poly)
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        self.exact = None if exact is None else Fraction(exact)

    @classmethod
    def rational(cls, r):
        r = Fraction(r)
        return cls(_linear(r), r, r, r)

    @property
    def is_rational(self):
        return self.exact is not None

    def refine(self):
        """Halve the isolating interval (no-op for rational points)."""
        if self.exact is not None:
            return self
        mid = (self.lo + self.hi) / 2
        s = sign_at(self.poly, mid)
        if s == 0:
            return AlgebraicPoint.rational(mid)
        if s == sign_at(self.poly, self.lo):
            return AlgebraicPoint(self.poly, mid, self.hi)
        return AlgebraicPoint(self.poly, self.lo, mid)

    def refined_to(self, width):
        p = self
        while p.exact is None and p.hi - p.lo > width:
            p = p.refine()
        return p

    def approx(self):
        if self.exact is not None:
            return float(self.exact)
        return float((self.lo + self.hi) / 2)

    def __float__(self):
        return self.approx()

    def __eq__(self, other):
        if not isinstance(other, AlgebraicPoint):
            return NotImplemented
        return compare(self, other) == 0

    def __lt__(self, other):
        if not isinstance(other, AlgebraicPoint):
            return NotImplemented
        return compare(self, other) < 0

    def __hash__(self):
        # equal irrational points may carry different polynomials
        return hash(self.exact) if self.exact is not None else 0

    def __repr__(self):
        return f"AlgebraicPoint({format_point(self)})"


def format_point(a):
    from ..arith import format_rational
    if a.exact is not None:
        return f"pt {format_rational(a.exact)}"
    return (f"alg {format_upoly(a.poly)} in "
            f"({format_rational(a.lo)},{format_rational(a.hi)})")


def _pin(poly, lo, hi):
    """Shrink ``(lo, hi)`` (one simple root) until a rational root is caught or ruled out."""
    lead = abs(poly[-1])
    width = Fraction(1, 2 * lead * lead)
    slo = sign_at(poly, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s = sign_at(poly, mid)
        if s == 0:
            return AlgebraicPoint.rational(mid)
        if s == slo:
            lo = mid
        else:
            hi = mid
    cand = ((lo + hi) / 2).limit_denominator(lead)
    if lo < cand < hi and sign_at(poly, cand) == 0:
        return AlgebraicPoint.rational(cand)
    return AlgebraicPoint(poly, lo, hi)


def _split_point(poly, lo, hi):
    """A rational in ``(lo, hi)`` that is not a root of ``poly``."""
    n = 2
    while True:
        for i in range(1, n):
            x = lo + (hi - lo) * Fraction(i, n)
            if sign_at(poly, x) != 0:
                return x
        n += 1


def isolate_roots(p):
    """All distinct real roots of ``p``, sorted, each in its own interval."""
    p = trim(p)
    if not p:
        raise PreconditionError("zero polynomial has infinitely many roots")
    sq = squarefree(p)
    if degree(sq) < 1:
        return []
    seq = sturm_sequence(sq)
    bound = cauchy_bound(sq)
    out = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = sturm_count(sq, lo, hi, seq)
        if n == 0:
            continue
        if n == 1:
            out.append(_pin(sq, lo, hi))
            continue
        mid = _split_point(sq, lo, hi)
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort(key=lambda a: (a.lo, a.hi))
    return out


def real_roots(p):
    return isolate_roots(p)


def _has_common_root(a, q):
    """Is the root of ``a`` (irrational) also a root of ``q``?"""
    g = gcd_poly(a.poly, q)
    if degree(g) < 1:
        return False
    return sturm_count(g, a.lo, a.hi) > 0


def sign_at_point(q, a):
    """Exact sign of the univariate polynomial ``q`` at the algebraic point ``a``."""
    q = trim(q)
    if not q:
        return 0
    if a.exact is not None:
        return sign_at(q, a.exact)
    if _has_common_root(a, q):
        return 0
    qs = squarefree(q) if degree(q) >= 1 else primitive(q)
    if degree(qs) < 1:
        return sign_at(q, a.lo)
    seq = sturm_sequence(qs)
    while sturm_count(qs, a.lo, a.hi, seq) > 0:
        a = a.refine()
        if a.exact is not None:
            return sign_at(q, a.exact)
    return sign_at(q, a.hi)


def compare(a, b):
    """-1, 0 or 1 according to the order of two algebraic points."""
    if a.exact is not None and b.exact is not None:
        return (a.exact > b.exact) - (a.exact < b.exact)
    if b.exact is not None:
        return _compare_rational(a, b.exact)
    if a.exact is not None:
        return -_compare_rational(b, a.exact)
    while True:
        if a.hi <= b.lo:
            return -1
        if b.hi <= a.lo:
            return 1
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        g = gcd_poly(a.poly, b.poly)
        if degree(g) >= 1 and sturm_count(g, lo, hi) > 0:
            return 0
        a, b = a.refine(), b.refine()
        if a.exact is not None or b.exact is not None:
            return compare(a, b)


def _compare_rational(a, r):
    """Order of the irrational-or-rational point ``a`` against the rational ``r``."""
    while True:
        if a.exact is not None:
            return (a.exact > r) - (a.exact < r)
        if a.hi <= r:
            return -1
        if a.lo >= r:
            return 1
        if sign_at(a.poly, r) == 0:
            return 0
        a = a.refine()


def rational_between(a, b):
    """A rational strictly between the points ``a < b``; ``None`` stands for infinity."""
    if a is None and b is None:
        return Fraction(0)
    if a is None:
        return (b.lo if b.exact is None else b.exact) - 1
    if b is None:
        return (a.hi if a.exact is None else a.exact) + 1
    while True:
        left = a.exact if a.exact is not None else a.hi
        right = b.exact if b.exact is not None else b.lo
        if left < right:
            return (left + right) / 2
        if left == right and a.exact is None and b.exact is None:
            return left
        if a.exact is None:
            a = a.refine()
        if b.exact is None:
            b = b.refine()
