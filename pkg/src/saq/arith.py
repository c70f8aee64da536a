"""Exact sparse multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`; monomials are dense exponent
tuples of length ``nvars``.  Polynomials are immutable and hashable, and
their canonical form drops zero coefficients, so structural equality is
polynomial identity.

Variables print as ``x1 .. xk``.  :meth:`Polynomial.homogenize` prepends a
new variable which prints as ``x0``; such polynomials carry
``first_index == 0``.
"""

import re
from fractions import Fraction
from math import comb

from .errors import ParseError, PreconditionError, ResourceLimitError

Rational = Fraction


def as_rational(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"not an exact rational: {value!r}")


def parse_rational(text):
    m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*", text)
    if not m:
        raise ParseError(f"bad rational {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _grlex_key(exps):
    return (-sum(exps), tuple(-e for e in exps))


class Polynomial:
    """A polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms", "first_index", "_hash")

    def __init__(self, nvars, terms=None, first_index=1):
        if nvars < 0:
            raise PreconditionError("variable count must be non-negative")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise PreconditionError(
                    f"monomial {exps} has length {len(exps)}, expected {nvars}")
            if any(e < 0 for e in exps):
                raise PreconditionError(f"negative exponent in {exps}")
            coeff = as_rational(coeff)
            if coeff:
                clean[exps] = clean.get(exps, 0) + coeff
                if not clean[exps]:
                    del clean[exps]
        self.nvars = nvars
        self.terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0])))
        self.first_index = first_index
        self._hash = None

    # construction helpers

    @classmethod
    def _raw(cls, nvars, terms, first_index=1):
        # terms already canonical (nonzero Fractions, right lengths)
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = dict(sorted(terms.items(), key=lambda kv: _grlex_key(kv[0])))
        p.first_index = first_index
        p._hash = None
        return p

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: as_rational(value)})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def var(cls, nvars, index):
        """The variable ``x{index}`` (1-based) in an ``nvars``-variable ring."""
        if not 1 <= index <= nvars:
            raise PreconditionError(f"variable x{index} out of range 1..{nvars}")
        exps = [0] * nvars
        exps[index - 1] = 1
        return cls(nvars, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, exps, coeff=1):
        return cls(len(exps), {tuple(exps): as_rational(coeff)})

    # basic queries

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def total_degree(self):
        """Total degree; the zero polynomial has degree 0 by convention."""
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, index):
        return max((e[index - 1] for e in self.terms), default=0)

    def num_terms(self):
        return len(self.terms)

    def is_homogeneous(self):
        return len({sum(e) for e in self.terms}) <= 1

    def variables_used(self):
        used = set()
        for exps in self.terms:
            used.update(i + 1 for i, e in enumerate(exps) if e)
        return sorted(used)

    # ring operations

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise PreconditionError(
                    f"variable-count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for exps, c in other.terms.items():
            s = out.get(exps, 0) + c
            if s:
                out[exps] = s
            else:
                out.pop(exps, None)
        return Polynomial._raw(self.nvars, out, self.first_index)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()},
                               self.first_index)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._raw(self.nvars, out, self.first_index)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise PreconditionError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, q):
        q = as_rational(q)
        if not q:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {e: c * q for e, c in self.terms.items()},
                               self.first_index)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (self.nvars == other.nvars and self.first_index == other.first_index
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.first_index,
                               frozenset(self.terms.items())))
        return self._hash

    # evaluation and calculus

    def eval(self, point):
        if len(point) != self.nvars:
            raise PreconditionError(
                f"point has dimension {len(point)}, polynomial has {self.nvars} variables")
        point = [as_rational(v) for v in point]
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for v, e in zip(point, exps):
                if e:
                    term *= v ** e
            total += term
        return total

    __call__ = eval

    def partial_derivative(self, index):
        """Formal partial derivative with respect to ``x{index}`` (1-based)."""
        lo = self.first_index
        if not lo <= index < lo + self.nvars:
            raise PreconditionError(f"variable index {index} out of range")
        pos = index - lo
        out = {}
        for exps, c in self.terms.items():
            if exps[pos]:
                e = list(exps)
                e[pos] -= 1
                out[tuple(e)] = c * exps[pos]
        return Polynomial._raw(self.nvars, out, self.first_index)

    def homogenize(self):
        """Prepend ``x0`` and pad every term up to the total degree."""
        if self.is_zero():
            raise PreconditionError("cannot homogenize the zero polynomial")
        d = self.total_degree()
        out = {(d - sum(e),) + e: c for e, c in self.terms.items()}
        return Polynomial._raw(self.nvars + 1, out, first_index=0)

    def dehomogenize(self):
        """Set ``x0 = 1`` on a polynomial produced by :meth:`homogenize`."""
        if self.first_index != 0:
            raise PreconditionError("polynomial has no x0 variable")
        out = {}
        for e, c in self.terms.items():
            s = out.get(e[1:], 0) + c
            if s:
                out[e[1:]] = s
            else:
                out.pop(e[1:], None)
        return Polynomial._raw(self.nvars - 1, out)

    # variable management

    def embed(self, nvars, mapping):
        """Rename variables: old position ``i`` (0-based) goes to ``mapping[i]``."""
        if len(mapping) != self.nvars:
            raise PreconditionError("mapping length must equal variable count")
        out = {}
        for exps, c in self.terms.items():
            e = [0] * nvars
            for i, k in enumerate(exps):
                if k:
                    e[mapping[i]] += k
            e = tuple(e)
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(nvars, out)

    def extend(self, nvars):
        """The same polynomial viewed in a ring with more trailing variables."""
        return self.embed(nvars, list(range(self.nvars)))

    def substitute(self, values, term_limit=None):
        """Compose with polynomials: ``x_i`` becomes ``values[i]``.

        ``values`` are polynomials sharing one variable count (or rationals,
        if all are rational, in which case a rational is returned through
        :meth:`eval`).
        """
        if len(values) != self.nvars:
            raise PreconditionError("need one value per variable")
        polys = [v for v in values if isinstance(v, Polynomial)]
        if not polys:
            return self.eval(values)
        n = polys[0].nvars
        vals = [v if isinstance(v, Polynomial) else Polynomial.constant(n, v)
                for v in values]
        cache = {}
        result = Polynomial.zero(n)
        for exps, c in self.terms.items():
            term = Polynomial.constant(n, c)
            for i, e in enumerate(exps):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = vals[i] ** e
                    term = term * cache[key]
            result = result + term
            if term_limit is not None and result.num_terms() > term_limit:
                raise ResourceLimitError(
                    f"term_limit exceeded: {result.num_terms()} > {term_limit}")
        return result

    # formatting

    def var_name(self, pos):
        return f"x{pos + self.first_index}"

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r}, nvars={self.nvars})"


def format_polynomial(p, var=None):
    """Render in the shared text grammar (``3/2*x1^2*x2 - x3 + 1``)."""
    if p.is_zero():
        return "0"

    def name(pos):
        return var if var is not None else p.var_name(pos)

    pieces = []
    for exps, c in p.terms.items():
        factors = []
        for pos, e in enumerate(exps):
            if e == 1:
                factors.append(name(pos))
            elif e:
                factors.append(f"{name(pos)}^{e}")
        mag = abs(c)
        if not factors:
            body = format_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = format_rational(mag) + "*" + "*".join(factors)
        pieces.append(("-" if c < 0 else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(.))")


def _tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot tokenize {text[pos:]!r}")
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1))))
        elif m.group(2) is not None:
            tokens.append(("var", int(m.group(2))))
        else:
            ch = m.group(3)
            if ch not in "+-*/^":
                raise ParseError(f"unexpected character {ch!r} in polynomial")
            tokens.append(("op", ch))
        pos = m.end()
    return tokens


def parse_polynomial(text, nvars=None):
    """Parse the polynomial text grammar.

    ``nvars`` defaults to the largest variable index that occurs.  ``x0`` is
    reserved for homogenization output and rejected here.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial")
    terms = []
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None)

    sign = 1
    if peek() == ("op", "-"):
        sign, i = -1, i + 1
    elif peek() == ("op", "+"):
        i += 1
    while True:
        coeff = Fraction(sign)
        exps = {}
        expect_factor = True
        first = True
        while expect_factor:
            kind, val = peek()
            if kind == "int" and first:
                i += 1
                num = val
                if peek() == ("op", "/"):
                    i += 1
                    kind2, den = peek()
                    if kind2 != "int" or den == 0:
                        raise ParseError("bad rational coefficient")
                    i += 1
                    coeff *= Fraction(num, den)
                else:
                    coeff *= num
            elif kind == "var":
                if val == 0:
                    raise ParseError("x0 is reserved for homogenization output")
                i += 1
                power = 1
                if peek() == ("op", "^"):
                    i += 1
                    kind2, power = peek()
                    if kind2 != "int":
                        raise ParseError("exponent must be an integer")
                    i += 1
                exps[val] = exps.get(val, 0) + power
            else:
                raise ParseError(f"expected a factor near token {i}")
            first = False
            if peek() == ("op", "*"):
                i += 1
            else:
                expect_factor = False
        terms.append((coeff, exps))
        kind, val = peek()
        if kind is None:
            break
        if kind == "op" and val in "+-":
            sign = 1 if val == "+" else -1
            i += 1
            if peek()[0] is None:
                raise ParseError("dangling operator")
        else:
            raise ParseError(f"unexpected token {val!r}")
    top = max((v for _, e in terms for v in e), default=0)
    if nvars is None:
        nvars = top
    elif top > nvars:
        raise ParseError(f"variable x{top} exceeds declared dimension {nvars}")
    out = {}
    for coeff, e in terms:
        key = tuple(e.get(j + 1, 0) for j in range(nvars))
        out[key] = out.get(key, 0) + coeff
    return Polynomial(nvars, out)


def binomial(n, k):
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if k < 0 or n < 0 or k > n:
        return 0
    return comb(n, k)
