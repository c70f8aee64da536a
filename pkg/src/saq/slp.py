"""Additive-complexity straight-line programs.

A representation of length ``a`` over ``k`` variables is a list of steps

    Q_j = u_j * X^alpha_j * prod_{i<j} Q_i^gamma_ji
        + v_j * X^beta_j  * prod_{i<j} Q_i^delta_ji

followed by a final product ``c * X^zeta * prod_j Q_j^eta_j``.  Step
exponents are always non-negative.  The final exponents may be negative
only in normal-form representations, where all division happens in the
last line; such a representation denotes a quotient ``P / Q``.

Minimal additive complexity is never computed here.  Representations are
supplied by the caller; the only automatic bound is :func:`fallback_length`
(one addition per extra monomial).
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .arith import Polynomial, as_rational, format_rational, parse_rational
from .errors import ParseError, PreconditionError, ResourceLimitError
from .formula import Atom, atoms, conj, map_atoms, polynomials
from .limits import limit


@dataclass(frozen=True)
class AdditiveStep:
    u: Fraction
    alpha: Tuple[int, ...]
    gamma: Tuple[int, ...]
    v: Fraction
    beta: Tuple[int, ...]
    delta: Tuple[int, ...]


@dataclass(frozen=True)
class AdditiveRepresentation:
    k: int
    steps: Tuple[AdditiveStep, ...]
    c: Fraction
    zeta: Tuple[int, ...]
    eta: Tuple[int, ...]

    @property
    def length(self):
        return len(self.steps)

    @property
    def is_division_free(self):
        return all(e >= 0 for e in self.zeta) and all(e >= 0 for e in self.eta)


def make_rep(k, steps, c, zeta, eta):
    """Build a representation from plain Python data (lists, ints, strings)."""
    built = []
    for st in steps:
        u, alpha, gamma, v, beta, delta = st
        built.append(AdditiveStep(as_rational(u), tuple(alpha), tuple(gamma),
                                  as_rational(v), tuple(beta), tuple(delta)))
    return AdditiveRepresentation(k, tuple(built), as_rational(c), tuple(zeta), tuple(eta))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    step: Optional[int] = None
    field: Optional[str] = None
    message: str = "ok"

    def __bool__(self):
        return self.ok


def validate(rep, division_free=True):
    """Check shape and sign invariants; report the first offending field.

    Steps are numbered from 1.  Problems in the final line carry
    ``step=None``.
    """
    k = rep.k
    for j, st in enumerate(rep.steps, start=1):
        for name in ("alpha", "beta"):
            vec = getattr(st, name)
            if len(vec) != k:
                return ValidationReport(False, j, name, f"{name} has length {len(vec)}, expected {k}")
            if any(e < 0 for e in vec):
                return ValidationReport(False, j, name, f"negative entry in {name}")
        for name in ("gamma", "delta"):
            vec = getattr(st, name)
            if len(vec) != j - 1:
                return ValidationReport(False, j, name,
                                        f"{name} has length {len(vec)}, expected {j - 1}")
            if any(e < 0 for e in vec):
                return ValidationReport(False, j, name, f"negative entry in {name}")
    if len(rep.zeta) != k:
        return ValidationReport(False, None, "zeta", f"zeta has length {len(rep.zeta)}, expected {k}")
    if len(rep.eta) != rep.length:
        return ValidationReport(False, None, "eta",
                                f"eta has length {len(rep.eta)}, expected {rep.length}")
    if division_free:
        if any(e < 0 for e in rep.zeta):
            return ValidationReport(False, None, "zeta", "negative entry in zeta (division)")
        if any(e < 0 for e in rep.eta):
            return ValidationReport(False, None, "eta", "negative entry in eta (division)")
    return ValidationReport(True)


def _require_valid(rep, division_free):
    report = validate(rep, division_free)
    if not report:
        raise PreconditionError(f"invalid representation: {report.message}"
                                + (f" at step {report.step}" if report.step else ""))


def _mono(k, exps):
    return Polynomial.monomial(exps) if k else Polynomial.constant(0, 1)


def _check_terms(p, term_limit):
    if p.num_terms() > term_limit:
        raise ResourceLimitError(f"term_limit exceeded: {p.num_terms()} > {term_limit}")
    return p


def expand_steps(rep, term_limit=None):
    """Polynomials ``Q_1 .. Q_a`` computed by the steps."""
    if term_limit is None:
        term_limit = limit("term_limit")
    k = rep.k
    qs = []
    for st in rep.steps:
        left = _mono(k, st.alpha).scale(st.u)
        right = _mono(k, st.beta).scale(st.v)
        for i, (g, d) in enumerate(zip(st.gamma, st.delta)):
            if g:
                left = _check_terms(left * qs[i] ** g, term_limit)
            if d:
                right = _check_terms(right * qs[i] ** d, term_limit)
        qs.append(_check_terms(left + right, term_limit))
    return qs


def expand(rep, term_limit=None):
    """Expand to a polynomial, or to a pair ``(P, Q)`` for normal-form reps."""
    if term_limit is None:
        term_limit = limit("term_limit")
    _require_valid(rep, division_free=False)
    qs = expand_steps(rep, term_limit)
    k = rep.k
    num = Polynomial.constant(k, rep.c)
    den = Polynomial.constant(k, 1)
    num = num * _mono(k, [max(z, 0) for z in rep.zeta])
    den = den * _mono(k, [max(-z, 0) for z in rep.zeta])
    for q, e in zip(qs, rep.eta):
        if e > 0:
            num = _check_terms(num * q ** e, term_limit)
        elif e < 0:
            den = _check_terms(den * q ** (-e), term_limit)
    if rep.is_division_free:
        return num
    return num, den


def evaluate_rep(rep, point):
    """Value of the program at a rational point, run step by step."""
    point = [as_rational(x) for x in point]
    if len(point) != rep.k:
        raise PreconditionError(f"point has dimension {len(point)}, rep has {rep.k}")

    def mono(exps):
        out = Fraction(1)
        for x, e in zip(point, exps):
            if e:
                out *= x ** e
        return out

    vals = []
    for st in rep.steps:
        left = st.u * mono(st.alpha)
        right = st.v * mono(st.beta)
        for i, (g, d) in enumerate(zip(st.gamma, st.delta)):
            left *= vals[i] ** g
            right *= vals[i] ** d
        vals.append(left + right)
    try:
        out = rep.c * mono(rep.zeta)
        for q, e in zip(vals, rep.eta):
            out *= q ** e
    except ZeroDivisionError:
        raise PreconditionError("representation has a vanishing denominator at this point") from None
    return out


def step_values(rep, point):
    """The values ``Q_1(x) .. Q_a(x)`` at a rational point."""
    point = [as_rational(x) for x in point]
    vals = []
    for st in rep.steps:
        left = st.u
        right = st.v
        for x, a, b in zip(point, st.alpha, st.beta):
            left *= x ** a
            right *= x ** b
        for i, (g, d) in enumerate(zip(st.gamma, st.delta)):
            left *= vals[i] ** g
            right *= vals[i] ** d
        vals.append(left + right)
    return vals


def _closure(rep, roots):
    needed = set()
    stack = list(roots)
    while stack:
        j = stack.pop()
        if j in needed:
            continue
        needed.add(j)
        st = rep.steps[j]
        stack.extend(i for i, (g, d) in enumerate(zip(st.gamma, st.delta)) if g or d)
    return sorted(needed)


def _restrict(rep, keep, c, zeta, eta_full):
    """Sub-program on the step indices ``keep`` (0-based, sorted)."""
    index = {old: new for new, old in enumerate(keep)}
    steps = []
    for new, old in enumerate(keep):
        st = rep.steps[old]
        gamma = [0] * new
        delta = [0] * new
        for i, (g, d) in enumerate(zip(st.gamma, st.delta)):
            if g or d:
                gamma[index[i]] = g
                delta[index[i]] = d
        steps.append(AdditiveStep(st.u, st.alpha, tuple(gamma), st.v, st.beta, tuple(delta)))
    eta = tuple(eta_full[old] for old in keep)
    return AdditiveRepresentation(rep.k, tuple(steps), c, tuple(zeta), eta)


def split_quotient(rep):
    """Split a normal-form representation into numerator and denominator programs.

    Each output keeps only the steps its final line depends on.  The
    lengths add up to at most ``rep.length`` plus :func:`shared_steps`.
    """
    report = validate(rep, division_free=False)
    if not report:
        raise PreconditionError(f"input not in normal form: {report.message}")
    if rep.is_division_free:
        one = AdditiveRepresentation(rep.k, (), Fraction(1), (0,) * rep.k, ())
        return rep, one
    pos = [j for j, e in enumerate(rep.eta) if e > 0]
    neg = [j for j, e in enumerate(rep.eta) if e < 0]
    num_keep = _closure(rep, pos)
    den_keep = _closure(rep, neg)
    num = _restrict(rep, num_keep, rep.c, [max(z, 0) for z in rep.zeta],
                    [max(e, 0) for e in rep.eta])
    den = _restrict(rep, den_keep, Fraction(1), [max(-z, 0) for z in rep.zeta],
                    [max(-e, 0) for e in rep.eta])
    return num, den


def shared_steps(rep):
    """Number of steps needed by both the numerator and the denominator."""
    pos = [j for j, e in enumerate(rep.eta) if e > 0]
    neg = [j for j, e in enumerate(rep.eta) if e < 0]
    return len(set(_closure(rep, pos)) & set(_closure(rep, neg)))


def prune(rep):
    """Drop steps the final line does not depend on."""
    keep = _closure(rep, [j for j, e in enumerate(rep.eta) if e])
    return _restrict(rep, keep, rep.c, rep.zeta, rep.eta)


def embed_rep(rep, k, mapping):
    """Rename variables: old position ``i`` goes to position ``mapping[i]`` of ``k``."""
    def move(vec):
        out = [0] * k
        for i, e in enumerate(vec):
            out[mapping[i]] += e
        return tuple(out)

    steps = tuple(AdditiveStep(st.u, move(st.alpha), st.gamma, st.v, move(st.beta), st.delta)
                  for st in rep.steps)
    return AdditiveRepresentation(k, steps, rep.c, move(rep.zeta), rep.eta)


def fallback_length(poly):
    """Division-free upper bound: one addition per monomial beyond the first."""
    return max(poly.num_terms() - 1, 0)


# building programs

@dataclass(frozen=True)
class Product:
    """A coefficient times a monomial times powers of earlier steps."""
    coef: Fraction
    alpha: Tuple[int, ...]
    qexp: Tuple[Tuple[int, int], ...] = ()

    def __mul__(self, other):
        q = dict(self.qexp)
        for i, e in other.qexp:
            q[i] = q.get(i, 0) + e
        return Product(self.coef * other.coef,
                       tuple(a + b for a, b in zip(self.alpha, other.alpha)),
                       tuple(sorted(q.items())))

    def __pow__(self, e):
        return Product(self.coef ** e, tuple(a * e for a in self.alpha),
                       tuple((i, x * e) for i, x in self.qexp))


class SLPBuilder:
    """Incrementally assemble a division-free representation."""

    def __init__(self, k):
        self.k = k
        self.steps = []

    def const(self, c):
        return Product(as_rational(c), (0,) * self.k)

    def monomial(self, exps, coef=1):
        return Product(as_rational(coef), tuple(exps))

    def var(self, index, coef=1):
        exps = [0] * self.k
        exps[index] = 1
        return Product(as_rational(coef), tuple(exps))

    def _vec(self, prod, j):
        vec = [0] * j
        for i, e in prod.qexp:
            vec[i] = e
        return tuple(vec)

    def add(self, left, right):
        """Append ``left + right`` as a new step; return it as a product."""
        j = len(self.steps)
        self.steps.append(AdditiveStep(left.coef, left.alpha, self._vec(left, j),
                                       right.coef, right.alpha, self._vec(right, j)))
        return Product(Fraction(1), (0,) * self.k, ((j, 1),))

    def sum(self, prods):
        prods = [p for p in prods if p.coef]
        if not prods:
            return self.const(0)
        acc = prods[0]
        for p in prods[1:]:
            acc = self.add(acc, p)
        return acc

    def include(self, rep):
        """Copy a division-free representation in; return its value."""
        if rep.k != self.k:
            raise PreconditionError("representation variable count mismatch")
        if not rep.is_division_free:
            raise PreconditionError("only division-free representations can be included")
        off = len(self.steps)
        for st in rep.steps:
            j = len(self.steps)
            gamma = (0,) * off + st.gamma
            delta = (0,) * off + st.delta
            assert len(gamma) == j
            self.steps.append(AdditiveStep(st.u, st.alpha, gamma, st.v, st.beta, delta))
        return Product(rep.c, rep.zeta,
                       tuple((off + i, e) for i, e in enumerate(rep.eta) if e))

    def polynomial(self, poly):
        """Monomial-sum program for ``poly`` (``fallback_length`` additions)."""
        return self.sum([Product(c, e) for e, c in poly.terms.items()])

    def build(self, value):
        eta = [0] * len(self.steps)
        for i, e in value.qexp:
            eta[i] = e
        return AdditiveRepresentation(self.k, tuple(self.steps), value.coef,
                                      value.alpha, tuple(eta))


def monomial_sum_rep(poly):
    b = SLPBuilder(poly.nvars)
    return b.build(b.polynomial(poly))


def additive_format_of(polys, reps=None):
    """Pair ``(a, k)``: summed representation lengths over the list.

    Polynomials without a supplied representation count ``monomials - 1``.
    """
    polys = list(polys)
    k = polys[0].nvars if polys else 0
    a = 0
    for p in polys:
        rep = reps.get(p) if reps else None
        a += rep.length if rep is not None else fallback_length(p)
    return a, k


# fewnomial reduction

@dataclass(frozen=True)
class FewnomialSystem:
    k: int
    ambient: int
    trinomials: Tuple[Polynomial, ...]
    rewritten: object
    blocks: Tuple[Tuple[Polynomial, AdditiveRepresentation, int], ...]

    def lift(self, point):
        return lift_point(point, [rep for _, rep, _ in self.blocks])

    def project(self, point):
        return project_point(point, self.k)


def _y_monomial(n, k, offset, alpha, qvec):
    exps = list(alpha) + [0] * (n - k)
    for i, e in enumerate(qvec):
        exps[k + offset + i] += e
    return tuple(exps)


def fewnomial_reduce(formula, reps, term_limit=None):
    """Rewrite a formula over SLP-defined polynomials as a trinomial system.

    Each distinct atom polynomial (in order of first appearance) gets one
    new variable per step of its representation.  The result is the
    conjunction of the trinomial equations with the rewritten formula.
    """
    k = formula.dim
    polys = polynomials(formula)
    for a in atoms(formula):
        if a.rel not in ("=", ">", "<"):
            raise PreconditionError(f"relation {a.rel}0 not allowed in fewnomial reduction")
    blocks = []
    offset = 0
    for p in polys:
        rep = reps.get(p) if reps else None
        if rep is None:
            raise PreconditionError(f"missing representation for {p}")
        _require_valid(rep, division_free=True)
        if rep.k != k:
            raise PreconditionError("representation variable count mismatch")
        if expand(rep, term_limit) != p:
            raise PreconditionError(f"representation does not expand to {p}")
        blocks.append((p, rep, offset))
        offset += rep.length
    n = k + offset
    trinomials = []
    replacement = {}
    for p, rep, off in blocks:
        for j, st in enumerate(rep.steps):
            y = [0] * n
            y[k + off + j] = 1
            terms = {tuple(y): Fraction(1)}
            for coef, alpha, qvec in ((st.u, st.alpha, st.gamma), (st.v, st.beta, st.delta)):
                m = _y_monomial(n, k, off, alpha, qvec)
                terms[m] = terms.get(m, 0) - coef
            trinomials.append(Polynomial(n, terms))
        replacement[p] = Polynomial(n, {_y_monomial(n, k, off, rep.zeta, rep.eta): rep.c})
    body = map_atoms(formula, lambda a: Atom(replacement[a.poly], a.rel))
    eqs = [Atom(t, "=") for t in trinomials]
    rewritten = conj(*eqs, body) if eqs else body
    return FewnomialSystem(k, n, tuple(trinomials), rewritten, tuple(blocks))


def lift_point(point, reps):
    """Append the step values of each representation, in order."""
    point = [as_rational(x) for x in point]
    out = list(point)
    for rep in reps:
        if rep.k != len(point):
            raise PreconditionError("point dimension does not match representation")
        out.extend(step_values(rep, point))
    return out


def project_point(point, k):
    if len(point) < k:
        raise PreconditionError(f"point of dimension {len(point)} cannot project to {k}")
    return list(point[:k])


# line format

def parse_slp(text):
    """Parse the ``VARS`` / ``STEP`` / ``FINAL`` line format."""
    k = None
    steps = []
    final = None

    def ints(field):
        field = field.strip()
        if not field:
            return ()
        try:
            return tuple(int(x) for x in field.split(","))
        except ValueError:
            raise ParseError(f"bad exponent list {field!r}") from None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "VARS":
            try:
                k = int(rest)
            except ValueError:
                raise ParseError(f"line {lineno}: bad VARS") from None
        elif head == "STEP":
            parts = rest.split(";")
            if len(parts) != 6:
                raise ParseError(f"line {lineno}: STEP needs 6 fields")
            steps.append((parse_rational(parts[0]), ints(parts[1]), ints(parts[2]),
                          parse_rational(parts[3]), ints(parts[4]), ints(parts[5])))
        elif head == "FINAL":
            parts = rest.split(";")
            if len(parts) != 3:
                raise ParseError(f"line {lineno}: FINAL needs 3 fields")
            final = (parse_rational(parts[0]), ints(parts[1]), ints(parts[2]))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}")
    if k is None or final is None:
        raise ParseError("SLP file needs VARS and FINAL lines")
    c, zeta, eta = final
    if k == 0:
        zeta = ()
    return make_rep(k, steps, c, zeta, eta)


def format_slp(rep):
    def vec(v):
        return ",".join(str(x) for x in v)

    lines = [f"VARS {rep.k}"]
    for st in rep.steps:
        lines.append("STEP " + " ; ".join([format_rational(st.u), vec(st.alpha), vec(st.gamma),
                                           format_rational(st.v), vec(st.beta), vec(st.delta)]))
    lines.append("FINAL " + " ; ".join([format_rational(rep.c), vec(rep.zeta), vec(rep.eta)]))
    return "\n".join(lines) + "\n"
