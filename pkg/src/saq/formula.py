"""Quantifier-free formulas over polynomial sign atoms.

A formula is a tree of :class:`Atom`, :class:`And`, :class:`Or` and
:class:`Not` nodes sharing one ambient dimension.  Relations are the
strings ``"="``, ``">"``, ``"<"``, ``">="`` and ``"<="`` (all against zero).

Atoms may carry an additive representation of their polynomial in
``Atom.rep``; it does not take part in equality and is only consulted when
measuring additive formats.
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Tuple

from .arith import Polynomial, as_rational, format_polynomial, parse_polynomial
from .errors import ParseError, PreconditionError, ResourceLimitError
from .limits import limit

RELATIONS = ("=", ">", "<", ">=", "<=")
WEAK = frozenset({"=", ">=", "<="})

_NEGATED = {">": "<=", "<": ">=", ">=": "<", "<=": ">"}


def holds(sign, rel):
    if rel == "=":
        return sign == 0
    if rel == ">":
        return sign > 0
    if rel == "<":
        return sign < 0
    if rel == ">=":
        return sign >= 0
    if rel == "<=":
        return sign <= 0
    raise PreconditionError(f"unknown relation {rel!r}")


def _sign(q):
    return (q > 0) - (q < 0)


@dataclass(frozen=True)
class Atom:
    poly: Polynomial
    rel: str
    rep: Optional[object] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise PreconditionError(f"unknown relation {self.rel!r}")

    @property
    def dim(self):
        return self.poly.nvars

    def __str__(self):
        return f"[{format_polynomial(self.poly)} {self.rel} 0]"


@dataclass(frozen=True)
class And:
    args: Tuple
    dim: int

    def __str__(self):
        if not self.args:
            return "true"
        return " & ".join(_wrap(a, And) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: Tuple
    dim: int

    def __str__(self):
        if not self.args:
            return "false"
        return " | ".join(_wrap(a, Or) for a in self.args)


@dataclass(frozen=True)
class Not:
    arg: object

    @property
    def dim(self):
        return self.arg.dim

    def __str__(self):
        return "!" + _wrap(self.arg, Not)


def _wrap(node, parent):
    text = str(node)
    if isinstance(node, Atom) or isinstance(node, Not):
        return text
    if isinstance(node, And) and parent is Or:
        return text
    return f"({text})"


def _check_dims(args):
    dims = {a.dim for a in args}
    if len(dims) > 1:
        raise PreconditionError(f"mixed ambient dimensions {sorted(dims)}")
    return dims.pop() if dims else None


def conj(*args, dim=None):
    """Flattened conjunction."""
    flat = []
    for a in args:
        if isinstance(a, And):
            flat.extend(a.args)
        else:
            flat.append(a)
    d = _check_dims(flat)
    if d is None:
        if dim is None:
            raise PreconditionError("empty conjunction needs an explicit dimension")
        d = dim
    elif dim is not None and dim != d:
        raise PreconditionError(f"dimension {d} does not match requested {dim}")
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat), d)


def disj(*args, dim=None):
    """Flattened disjunction."""
    flat = []
    for a in args:
        if isinstance(a, Or):
            flat.extend(a.args)
        else:
            flat.append(a)
    d = _check_dims(flat)
    if d is None:
        if dim is None:
            raise PreconditionError("empty disjunction needs an explicit dimension")
        d = dim
    elif dim is not None and dim != d:
        raise PreconditionError(f"dimension {d} does not match requested {dim}")
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat), d)


def atoms(f):
    """All atoms in left-to-right order (with repetitions)."""
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Not):
        return atoms(f.arg)
    out = []
    for a in f.args:
        out.extend(atoms(a))
    return out


def polynomials(f):
    """Distinct atom polynomials in order of first appearance."""
    seen = {}
    for a in atoms(f):
        seen.setdefault(a.poly, None)
    return list(seen)


def map_atoms(f, fn):
    """Rebuild ``f`` with every atom replaced by ``fn(atom)``."""
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, Not):
        return Not(map_atoms(f.arg, fn))
    args = [map_atoms(a, fn) for a in f.args]
    if isinstance(f, And):
        return conj(*args, dim=None if args else f.dim)
    return disj(*args, dim=None if args else f.dim)


def eval_formula(f, point):
    """Truth value of ``f`` at a rational point, by exact sign evaluation."""
    point = [as_rational(v) for v in point]
    if len(point) != f.dim:
        raise PreconditionError(
            f"point has dimension {len(point)}, formula has {f.dim}")
    cache = {}

    def go(node):
        if isinstance(node, Atom):
            if node.poly not in cache:
                cache[node.poly] = _sign(node.poly.eval(point))
            return holds(cache[node.poly], node.rel)
        if isinstance(node, Not):
            return not go(node.arg)
        if isinstance(node, And):
            return all(go(a) for a in node.args)
        return any(go(a) for a in node.args)

    return go(f)


def eval_with_signs(f, signs):
    """Truth value of ``f`` given a map polynomial -> sign."""
    if isinstance(f, Atom):
        return holds(signs[f.poly], f.rel)
    if isinstance(f, Not):
        return not eval_with_signs(f.arg, signs)
    if isinstance(f, And):
        return all(eval_with_signs(a, signs) for a in f.args)
    return any(eval_with_signs(a, signs) for a in f.args)


def push_negations(f, negate=False):
    """Negation normal form with ``NOT`` absorbed into relations."""
    if isinstance(f, Atom):
        if not negate:
            return f
        if f.rel == "=":
            return disj(Atom(f.poly, ">", f.rep), Atom(f.poly, "<", f.rep))
        return Atom(f.poly, _NEGATED[f.rel], f.rep)
    if isinstance(f, Not):
        return push_negations(f.arg, not negate)
    args = [push_negations(a, negate) for a in f.args]
    is_and = isinstance(f, And) != negate
    if not args:
        return (And if is_and else Or)((), f.dim)
    return conj(*args) if is_and else disj(*args)


def to_dnf(f, clause_limit=None):
    """Disjunction of conjunctions of atoms, semantically equal to ``f``."""
    if clause_limit is None:
        clause_limit = limit("clause_limit")
    dim = f.dim

    def clauses(node):
        # list of clauses, each a tuple of atoms
        if isinstance(node, Atom):
            return [(node,)]
        if isinstance(node, Or):
            out = []
            for a in node.args:
                out.extend(clauses(a))
                if len(out) > clause_limit:
                    raise ResourceLimitError(
                        f"clause_limit exceeded: more than {clause_limit} clauses")
            return out
        out = [()]
        for a in node.args:
            sub = clauses(a)
            if len(out) * len(sub) > clause_limit:
                raise ResourceLimitError(
                    f"clause_limit exceeded: {len(out) * len(sub)} > {clause_limit}")
            out = [c + s for c in out for s in sub]
        return out

    cl = clauses(push_negations(f))
    if len(cl) > clause_limit:
        raise ResourceLimitError(f"clause_limit exceeded: {len(cl)} > {clause_limit}")
    terms = [conj(*c) if c else And((), dim) for c in cl]
    if not terms:
        return Or((), dim)
    if len(terms) == 1:
        return terms[0]
    return Or(tuple(terms), dim)


def is_p_closed(f):
    """No negations, and every relation is one of ``=``, ``>=``, ``<=``."""
    if isinstance(f, Atom):
        return f.rel in WEAK
    if isinstance(f, Not):
        return False
    return all(is_p_closed(a) for a in f.args)


@dataclass(frozen=True)
class DenseFormat:
    s: int
    d: int
    k: int


@dataclass(frozen=True)
class AdditiveFormat:
    a: int
    k: int


def dense_format(f):
    polys = polynomials(f)
    return DenseFormat(len(polys), max((p.total_degree() for p in polys), default=0),
                       f.dim)


def additive_format(f, reps=None):
    """Total additive complexity over the distinct atom polynomials.

    Representations come from ``reps`` (polynomial -> rep), then from the
    atoms themselves; polynomials without one fall back to
    ``monomials - 1``.
    """
    from .slp import fallback_length

    best = {}
    for a in atoms(f):
        cands = []
        if reps and a.poly in reps:
            cands.append(reps[a.poly].length)
        if a.rep is not None:
            cands.append(a.rep.length)
        cands.append(fallback_length(a.poly))
        cur = best.get(a.poly)
        best[a.poly] = min(cands) if cur is None else min(cur, *cands)
    return AdditiveFormat(sum(best.values()), f.dim)


class SignCondition:
    """An assignment of signs in {-1, 0, +1} to an ordered polynomial family."""

    def __init__(self, pairs):
        pairs = list(pairs.items()) if isinstance(pairs, dict) else list(pairs)
        seen = set()
        for p, s in pairs:
            if s not in (-1, 0, 1):
                raise PreconditionError(f"sign must be -1, 0 or 1, got {s!r}")
            if p in seen:
                raise PreconditionError("duplicate polynomial in sign condition")
            seen.add(p)
        dims = {p.nvars for p, _ in pairs}
        if len(dims) > 1:
            raise PreconditionError("sign condition mixes variable counts")
        self.pairs = tuple(pairs)

    @property
    def dim(self):
        return self.pairs[0][0].nvars if self.pairs else 0

    def family(self):
        return [p for p, _ in self.pairs]

    def __getitem__(self, poly):
        for p, s in self.pairs:
            if p == poly:
                return s
        raise KeyError(poly)

    def __eq__(self, other):
        return isinstance(other, SignCondition) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def label(self):
        return ",".join("+" if s > 0 else "-" if s < 0 else "0" for _, s in self.pairs)

    def __repr__(self):
        return f"SignCondition({self.label()})"


def all_sign_conditions(family):
    for signs in product((-1, 0, 1), repeat=len(family)):
        yield SignCondition(zip(family, signs))


def sign_condition_formula(sigma):
    rel = {1: ">", -1: "<", 0: "="}
    return conj(*(Atom(p, rel[s]) for p, s in sigma.pairs), dim=sigma.dim)


def _ball(k, radius_sq, rel):
    ball = sum((Polynomial.var(k, i + 1) ** 2 for i in range(k)),
               Polynomial.zero(k))
    return Atom(ball - radius_sq, rel)


def relaxed_sign_condition(sigma, delta, dim=None):
    """Closed and bounded relaxation of ``sigma`` at a positive ``delta``."""
    delta = as_rational(delta)
    if delta <= 0:
        raise PreconditionError("delta must be positive")
    k = sigma.dim if sigma.pairs else dim
    if k is None:
        raise PreconditionError("empty sign condition needs a dimension")
    parts = [_ball(k, 1 / delta, "<=")]
    for p, s in sigma.pairs:
        if s == 0:
            parts.append(Atom(p, "="))
        elif s < 0:
            parts.append(Atom(p + delta, "<="))
        else:
            parts.append(Atom(p - delta, ">="))
    return conj(*parts)


def nonstrict_to_strict(sigma, eps, delta, omega, dim=None):
    """Strict-inequality thickening of ``sigma``; the variety atom is left out."""
    eps, delta, omega = (as_rational(v) for v in (eps, delta, omega))
    if eps <= 0 or delta <= 0 or omega <= 0:
        raise PreconditionError("eps, delta and omega must be positive")
    k = sigma.dim if sigma.pairs else dim
    if k is None:
        raise PreconditionError("empty sign condition needs a dimension")
    parts = []
    for p, s in sigma.pairs:
        if s == 0:
            parts.append(Atom(p + delta, ">"))
            parts.append(Atom(p - delta, "<"))
        elif s > 0:
            parts.append(Atom(p - eps, ">"))
        else:
            parts.append(Atom(p + eps, "<"))
    parts.append(_ball(k, omega * omega, "<"))
    return conj(*parts)


# text grammar: atom `[ poly REL ]`, connectives & | !, parentheses

class _FormulaParser:
    def __init__(self, text, dim):
        self.text = text
        self.pos = 0
        self.dim = dim

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        node = self.parse_or()
        if self.peek():
            raise ParseError(f"trailing input at {self.pos}: {self.text[self.pos:]!r}")
        return node

    def parse_or(self):
        args = [self.parse_and()]
        while self.peek() == "|":
            self.pos += 1
            args.append(self.parse_and())
        return args[0] if len(args) == 1 else ("or", args)

    def parse_and(self):
        args = [self.parse_not()]
        while self.peek() == "&":
            self.pos += 1
            args.append(self.parse_not())
        return args[0] if len(args) == 1 else ("and", args)

    def parse_not(self):
        if self.peek() == "!":
            self.pos += 1
            return ("not", self.parse_not())
        return self.parse_primary()

    def parse_primary(self):
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.parse_or()
            if self.peek() != ")":
                raise ParseError("missing ')'")
            self.pos += 1
            return node
        if ch == "[":
            end = self.text.find("]", self.pos)
            if end < 0:
                raise ParseError("missing ']'")
            body = self.text[self.pos + 1:end]
            self.pos = end + 1
            # a nonzero right-hand side is moved to the left
            m = re.fullmatch(r"([^<>=]*)(>=|<=|=|>|<)([^<>=]*)", body, re.S)
            if not m or not m.group(3).strip():
                raise ParseError(f"bad atom [{body}]")
            return ("atom", m.group(1), m.group(2), m.group(3))
        raise ParseError(f"unexpected {ch!r} at {self.pos}")


def parse_formula(text, dim=None):
    """Parse the formula grammar; ``dim`` defaults to the largest variable index."""
    tree = _FormulaParser(text, dim).parse()
    raw = []

    def collect(node):
        if node[0] == "atom":
            raw.append(parse_polynomial(node[1]))
            raw.append(parse_polynomial(node[3]))
        elif node[0] == "not":
            collect(node[1])
        else:
            for a in node[1]:
                collect(a)

    collect(tree)
    top = max(p.nvars for p in raw)
    if dim is None:
        dim = top
    elif top > dim:
        raise ParseError(f"variable x{top} exceeds dimension {dim}")

    def build(node):
        if node[0] == "atom":
            return Atom(parse_polynomial(node[1], dim) - parse_polynomial(node[3], dim), node[2])
        if node[0] == "not":
            return Not(build(node[1]))
        args = [build(a) for a in node[1]]
        return conj(*args) if node[0] == "and" else disj(*args)

    return build(tree)


def format_formula(f):
    return str(f)


def sign_of(q):
    return _sign(Fraction(q))
