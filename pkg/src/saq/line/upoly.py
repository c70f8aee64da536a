"""Dense univariate polynomials over the rationals.

A polynomial is a tuple of coefficients, constant term first, with no
trailing zeros; the zero polynomial is ``()``.  Coefficients are ints or
Fractions.  Root-finding code works on primitive integer polynomials
(positive leading coefficient, content 1) since sign questions are
unchanged by positive scaling.
"""

from fractions import Fraction
from math import gcd

from ..arith import Polynomial, format_polynomial
from ..errors import PreconditionError


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p):
    return len(p) - 1


def from_polynomial(poly):
    """Coefficient tuple of a polynomial in one variable."""
    if poly.nvars != 1:
        raise PreconditionError(f"expected a univariate polynomial, got {poly.nvars} variables")
    if poly.is_zero():
        return ()
    out = [Fraction(0)] * (poly.total_degree() + 1)
    for (e,), c in poly.terms.items():
        out[e] = c
    return trim(out)


def to_polynomial(p):
    return Polynomial(1, {(i,): c for i, c in enumerate(p) if c})


def add(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def neg(p):
    return tuple(-c for c in p)


def sub(p, q):
    return add(p, neg(q))


def mul(p, q):
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p, c):
    return trim([a * c for a in p])


def derivative(p):
    return trim([i * p[i] for i in range(1, len(p))])


def divmod_poly(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = [Fraction(c) for c in p]
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        shift = len(p) - len(q)
        quot[shift] = c
        for i, b in enumerate(q):
            p[shift + i] -= c * b
        p = list(trim(p))
    return trim(quot), trim(p)


def primitive(p, keep_sign=False):
    """Multiple with coprime integer coefficients and positive lead.

    With ``keep_sign`` only positive multiples are used, so the lead keeps
    its sign.
    """
    p = trim(p)
    if not p:
        return ()
    den = 1
    for c in p:
        c = Fraction(c)
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0 and not keep_sign:
        ints = [-c for c in ints]
    return tuple(ints)


def gcd_poly(p, q):
    """Greatest common divisor as a primitive integer polynomial (``()`` if both zero)."""
    p, q = trim(p), trim(q)
    while q:
        _, r = divmod_poly(p, q)
        p, q = q, primitive(r)
    return primitive(p)


def squarefree(p):
    """Primitive square-free part."""
    p = trim(p)
    if not p:
        raise PreconditionError("zero polynomial has no square-free part")
    g = gcd_poly(p, derivative(p))
    if len(g) <= 1:
        return primitive(p)
    quot, rem = divmod_poly(p, g)
    assert not rem
    return primitive(quot)


def evaluate(p, x):
    out = 0
    for c in reversed(p):
        out = out * x + c
    return out


def sign_at(p, x):
    """Sign of ``p(x)`` for rational ``x`` (integer arithmetic for integer ``p``)."""
    x = Fraction(x)
    a, b = x.numerator, x.denominator
    acc = 0
    bp = 1
    # Horner on b^n p(a/b) = sum c_i a^i b^(n-i)
    for c in reversed(p):
        acc = acc * a + c * bp
        bp *= b
    return (acc > 0) - (acc < 0)


def sign_at_inf(p, positive=True):
    if not p:
        return 0
    s = (p[-1] > 0) - (p[-1] < 0)
    if not positive and degree(p) % 2:
        s = -s
    return s


def sturm_sequence(p):
    """Sturm chain of ``p`` with every member made primitive."""
    p = primitive(p, keep_sign=True)
    seq = [p, primitive(derivative(p), keep_sign=True)]
    while seq[-1] and degree(seq[-1]) > 0:
        _, r = divmod_poly(seq[-2], seq[-1])
        if not r:
            break
        seq.append(primitive(neg(r), keep_sign=True))
    return [q for q in seq if q]


def _variations(signs):
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _signs_at(seq, x):
    if x == float("inf"):
        return [sign_at_inf(q, True) for q in seq]
    if x == float("-inf"):
        return [sign_at_inf(q, False) for q in seq]
    return [sign_at(q, x) for q in seq]


def sturm_count(p, lo, hi, seq=None):
    """Number of distinct real roots of ``p`` in ``(lo, hi]``; ends may be infinite."""
    if not trim(p):
        raise PreconditionError("zero polynomial")
    if seq is None:
        seq = sturm_sequence(p)
    if lo >= hi:
        return 0
    return _variations(_signs_at(seq, lo)) - _variations(_signs_at(seq, hi))


def cauchy_bound(p):
    """Every real root lies strictly inside ``(-B, B)``."""
    lead = abs(Fraction(p[-1]))
    return 1 + max((abs(Fraction(c)) / lead for c in p[:-1]), default=Fraction(0))


def format_upoly(p, var="x"):
    return format_polynomial(to_polynomial(p), var=var)
