"""Explicit formula constructions: joins, slack transforms, tubes.

Join-family formulas live in ``N = (p+1)(k+1) + C(p+1, 2)`` variables laid
out as blocks ``X^0 .. X^p`` (``k`` each), then ``T_0 .. T_p``, then
``A_ij`` for ``i < j`` in lexicographic order.  Slack variables produced by
:func:`dagger` follow the original variables; a tube parameter ``U`` (or
``t``) is always the last variable.

Atoms built here carry an additive representation in ``Atom.rep`` whenever
one shorter than the monomial-count fallback is known.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Tuple

from .arith import Polynomial, as_rational, binomial
from .errors import PreconditionError
from .formula import Atom, And, Not, Or, atoms, conj, disj, is_p_closed, map_atoms, polynomials
from .slp import SLPBuilder, embed_rep, expand, monomial_sum_rep


# layout

def join_dimension(p, k):
    return (p + 1) * (k + 1) + binomial(p + 1, 2)


def _pairs(p):
    return list(combinations(range(p + 1), 2))


class JoinLayout:
    """Variable positions (0-based) for a join over ``k``-dimensional blocks."""

    def __init__(self, p, k):
        if p < 0:
            raise PreconditionError("p must be non-negative")
        if k < 0:
            raise PreconditionError("k must be non-negative")
        self.p = p
        self.k = k
        self.n = join_dimension(p, k)
        self._pair_index = {ij: n for n, ij in enumerate(_pairs(p))}

    def x(self, i, l):
        return i * self.k + l

    def block(self, i):
        return [self.x(i, l) for l in range(self.k)]

    def t(self, i):
        return (self.p + 1) * self.k + i

    def a(self, i, j):
        return (self.p + 1) * (self.k + 1) + self._pair_index[(i, j)]

    def var(self, pos):
        exps = [0] * self.n
        exps[pos] = 1
        return Polynomial.monomial(exps)

    def const(self, c):
        return Polynomial.constant(self.n, c)


def _embed_atom(atom, n, mapping):
    rep = embed_rep(atom.rep, n, mapping) if atom.rep is not None else None
    return Atom(atom.poly.embed(n, mapping), atom.rel, rep)


def embed_formula(f, n, mapping):
    """Move a formula to ``n`` variables, old position ``i`` -> ``mapping[i]``."""
    return map_atoms(f, lambda a: _embed_atom(a, n, mapping))


def extend_formula(f, n):
    return embed_formula(f, n, list(range(f.dim)))


def _sum_squares(lay, positions):
    out = Polynomial.zero(lay.n)
    for pos in positions:
        out = out + lay.var(pos) ** 2
    return out


# join components

def omega_R(p, k, R):
    """Closed balls of radius ``R`` on every block and the unit ball on ``T``."""
    R = as_rational(R)
    if R <= 0:
        raise PreconditionError("R must be positive")
    lay = JoinLayout(p, k)
    parts = [Atom(_sum_squares(lay, lay.block(i)) - R * R, "<=") for i in range(p + 1)]
    parts.append(Atom(_sum_squares(lay, [lay.t(i) for i in range(p + 1)]) - 1, "<="))
    return conj(*parts)


def _theta1_parts(p, k):
    lay = JoinLayout(p, k)
    tsum = Polynomial.zero(lay.n)
    for i in range(p + 1):
        tsum = tsum + lay.var(lay.t(i))
    asq = _sum_squares(lay, [lay.a(i, j) for i, j in _pairs(p)])
    return lay, Atom(tsum - 1, "="), asq


def theta1(p, k):
    """``sum T_i = 1`` and ``sum A_ij^2 = 0`` (the latter omitted when p = 0)."""
    lay, tatom, asq = _theta1_parts(p, k)
    if asq.is_zero():
        return tatom
    return conj(tatom, Atom(asq, "="))


def theta1_eps(p, k, eps):
    """As :func:`theta1` with the ``A`` constraint relaxed to ``sum A_ij^2 <= eps``.

    The sum runs over all pairs ``0 <= i < j <= p``.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    lay, tatom, asq = _theta1_parts(p, k)
    if asq.is_zero():
        return tatom
    return conj(tatom, Atom(asq - eps, "<="))


def theta2(phi, p):
    """``AND_i (T_i = 0 OR phi(X^i))``."""
    k = phi.dim
    lay = JoinLayout(p, k)
    parts = []
    for i in range(p + 1):
        moved = embed_formula(phi, lay.n, lay.block(i))
        parts.append(disj(Atom(lay.var(lay.t(i)), "="), moved))
    return conj(*parts)


@dataclass(frozen=True)
class PolyMap:
    """A polynomial map given by its components over a common source space."""
    components: Tuple[Polynomial, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise PreconditionError("a polynomial map needs at least one component")
        if len({c.nvars for c in comps}) != 1:
            raise PreconditionError("components must share a variable count")

    @property
    def source_dim(self):
        return self.components[0].nvars

    @property
    def target_dim(self):
        return len(self.components)

    @classmethod
    def projection(cls, source_dim, indices):
        """Coordinate projection onto the given 0-based positions."""
        return cls(tuple(Polynomial.var(source_dim, i + 1) for i in indices))

    @classmethod
    def identity(cls, k):
        return cls.projection(k, range(k))

    def __call__(self, point):
        return [c.eval(point) for c in self.components]


def _fiber_atom(lay, f, i, j):
    """``|f(X^i) - f(X^j)|^2 - A_ij`` together with an explicit program."""
    b = SLPBuilder(lay.n)
    squares = []
    poly = Polynomial.zero(lay.n)
    for comp in f.components:
        diff = comp.embed(lay.n, lay.block(i)) - comp.embed(lay.n, lay.block(j))
        poly = poly + diff * diff
        squares.append(b.polynomial(diff) ** 2)
    a_pos = lay.a(i, j)
    poly = poly - lay.var(a_pos)
    total = b.sum(squares + [b.var(a_pos, -1)])
    return Atom(poly, "=", b.build(total))


def theta3(f, p):
    """``T_i = 0 OR T_j = 0 OR |f(X^i) - f(X^j)|^2 = A_ij`` for all pairs."""
    lay = JoinLayout(p, f.source_dim)
    parts = []
    for i, j in _pairs(p):
        parts.append(disj(Atom(lay.var(lay.t(i)), "="), Atom(lay.var(lay.t(j)), "="),
                          _fiber_atom(lay, f, i, j)))
    return conj(*parts, dim=lay.n)


def upsilon(p, k):
    """:func:`theta3` for the identity map, i.e. ``|X^i - X^j|^2 = A_ij``."""
    return theta3(PolyMap.identity(k), p)


def _join(*parts):
    return conj(*parts)


def _check_map(phi, f):
    if f.source_dim != phi.dim:
        raise PreconditionError(f"map source dimension {f.source_dim} != formula dimension {phi.dim}")


def join(phi, p, R):
    k = phi.dim
    return _join(omega_R(p, k, R), theta1(p, k), theta2(phi, p))


def fibered_join(phi, f, p, R):
    _check_map(phi, f)
    k = phi.dim
    return _join(omega_R(p, k, R), theta1(p, k), theta2(phi, p), theta3(f, p))


def thickened_fibered_join(phi, f, p, R, eps):
    _check_map(phi, f)
    k = phi.dim
    return _join(omega_R(p, k, R), theta1_eps(p, k, eps), theta2(phi, p), theta3(f, p))


def thickened_diagonal(phi, p, R, eps):
    """The thickened diagonal: the thickened fibered join with ``f`` replaced by ``Upsilon``."""
    k = phi.dim
    return _join(omega_R(p, k, R), theta1_eps(p, k, eps), theta2(phi, p), upsilon(p, k))


# slack transforms

def phi_R(phi, R):
    """``phi`` intersected with the closed ball of radius ``R``."""
    R = as_rational(R)
    k = phi.dim
    ball = Polynomial.zero(k)
    for i in range(k):
        ball = ball + Polynomial.var(k, i + 1) ** 2
    return conj(phi, Atom(ball - R * R, "<="))


def _rep_for(atom):
    return atom.rep if atom.rep is not None else monomial_sum_rep(atom.poly)


def dagger(phi, literal=False):
    """Replace weak inequalities by equations with squared slack variables.

    One slack ``V_i`` is appended per distinct atom polynomial, in order of
    first appearance.  By default ``F <= 0`` becomes ``-F - V^2 = 0`` and
    ``F >= 0`` becomes ``F - V^2 = 0``, so that projecting away the slacks
    recovers ``phi``.  ``literal=True`` swaps the two rules.
    """
    if not is_p_closed(phi):
        raise PreconditionError("dagger needs a formula without negations or strict inequalities")
    k = phi.dim
    family = polynomials(phi)
    s = len(family)
    n = k + s
    index = {poly: i for i, poly in enumerate(family)}
    minus = "<=" if literal else ">="

    def rewrite(atom):
        moved = _embed_atom(Atom(atom.poly, atom.rel, _rep_for(atom)), n, list(range(k)))
        if atom.rel == "=":
            return Atom(moved.poly, "=", moved.rep)
        v = k + index[atom.poly]
        sign = 1 if atom.rel == minus else -1
        b = SLPBuilder(n)
        val = b.include(moved.rep)
        val = b.add(val * b.const(sign), b.var(v) ** 2 * b.const(-1))
        vpoly = Polynomial.var(n, v + 1)
        return Atom(moved.poly.scale(sign) - vpoly * vpoly, "=", b.build(val))

    return map_atoms(phi, rewrite)


def dagger_RRprime(phi, R, Rprime, literal=False):
    """``dagger(phi)`` with sphere equations tying ``X`` to ``U_1`` and ``V`` to ``U_2``.

    Ambient layout: ``X`` (k), ``V`` (one per polynomial), ``U_1``, ``U_2``.
    """
    R = as_rational(R)
    Rprime = as_rational(Rprime)
    if R <= 0 or Rprime <= 0:
        raise PreconditionError("radii must be positive")
    k = phi.dim
    body = dagger(phi, literal)
    s = body.dim - k
    n = k + s + 2
    body = extend_formula(body, n)
    u1 = Polynomial.var(n, k + s + 1)
    u2 = Polynomial.var(n, k + s + 2)
    xs = Polynomial.zero(n)
    for i in range(k):
        xs = xs + Polynomial.var(n, i + 1) ** 2
    vs = Polynomial.zero(n)
    for i in range(s):
        vs = vs + Polynomial.var(n, k + i + 1) ** 2
    return conj(body, Atom(u1 * u1 + xs - R * R, "="), Atom(u2 * u2 + vs - Rprime * Rprime, "="))


def dagger_lift(phi, point, literal=False):
    """Slack values witnessing ``point`` in the dagger formula, or ``None``.

    Returns ``None`` when some required square root is irrational or the
    point violates ``phi``.  For each polynomial the slack is
    ``sqrt(|F(x)|)``, which is the only candidate up to sign.
    """
    from .formula import eval_formula
    family = polynomials(phi)
    slacks = []
    for poly in family:
        r = _rational_sqrt(abs(poly.eval(point)))
        if r is None:
            return None
        slacks.append(r)
    lifted = [as_rational(x) for x in point] + slacks
    return lifted if eval_formula(dagger(phi, literal), lifted) else None


def _rational_sqrt(q):
    from math import isqrt
    q = Fraction(q)
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# tubes

def tube_exponent(Q):
    return 2 * Q.total_degree() + 1


def deformation_tube(P, Q, R):
    """``[P^2 - t(Q^2 - t^N) <= 0] & [|x|^2 - R^2 <= 0] & [t > 0]`` with ``t`` last."""
    if Q.is_zero():
        raise PreconditionError("Q must be nonzero")
    if P.nvars != Q.nvars:
        raise PreconditionError("P and Q must share a variable count")
    R = as_rational(R)
    if R <= 0:
        raise PreconditionError("R must be positive")
    k = P.nvars
    n = k + 1
    N = tube_exponent(Q)
    Pn, Qn = P.extend(n), Q.extend(n)
    t = Polynomial.var(n, n)
    main = Pn * Pn - t * (Qn * Qn - t ** N)
    ball = Polynomial.constant(n, -R * R)
    for i in range(k):
        ball = ball + Polynomial.var(n, i + 1) ** 2
    return conj(Atom(main, "<="), Atom(ball, "<="), Atom(t, ">"))


def fix_last(f, value):
    """Substitute a rational for the last variable, dropping it."""
    n = f.dim
    value = as_rational(value)
    vals = [Polynomial.var(n - 1, i + 1) for i in range(n - 1)] + [value]
    if n == 1:
        def sub(a):
            return Atom(Polynomial.constant(0, a.poly.eval([value])), a.rel)
    else:
        def sub(a):
            return Atom(a.poly.substitute(vals), a.rel)
    return map_atoms(f, sub)


def tube_at(P, Q, R, t):
    return fix_last(deformation_tube(P, Q, R), t)


def _is_equality_only(f):
    if isinstance(f, Atom):
        return f.rel == "="
    if isinstance(f, Not):
        return False
    return all(_is_equality_only(a) for a in f.args)


def level1_bar(phi, pairs=None, radii=None, blocks=None, reps=None):
    """Replace each ``F_i = 0`` by ``barP_i^2 - U(barQ^2 - U^N) <= 0``.

    ``pairs`` maps each atom polynomial ``F`` to ``(P, Q)`` with ``F Q = P``;
    missing entries default to ``(F, 1)``.  ``radii`` (one per block of
    ``blocks``, a list of block sizes) adds closed-ball atoms.  The result
    has one more variable, ``U``, and ends with ``U > 0``.
    """
    if not _is_equality_only(phi):
        raise PreconditionError("level1_bar needs a negation-free formula with only equalities")
    k = phi.dim
    n = k + 1
    family = polynomials(phi)
    pairs = dict(pairs or {})
    reps = dict(reps or {})
    atom_reps = {a.poly: a.rep for a in atoms(phi) if a.rep is not None}
    ps, qs = [], []
    for F in family:
        P, Q = pairs.get(F, (F, Polynomial.constant(k, 1)))
        if F * Q != P:
            raise PreconditionError(f"F*Q != P for F = {F}")
        ps.append(P)
        qs.append(Q)

    def rep_of(poly):
        if poly in reps:
            return reps[poly]
        if poly in atom_reps:
            return atom_reps[poly]
        return monomial_sum_rep(poly)

    qbar = Polynomial.constant(k, 1)
    for Q in qs:
        qbar = qbar * Q
    N = tube_exponent(qbar)
    u = Polynomial.var(n, n)
    ext = list(range(k))
    replaced = {}
    for i, F in enumerate(family):
        pbar = ps[i]
        for j, Q in enumerate(qs):
            if j != i:
                pbar = pbar * Q
        b = SLPBuilder(n)
        pval = b.include(embed_rep(rep_of(ps[i]), n, ext))
        qvals = [b.include(embed_rep(rep_of(Q), n, ext)) for Q in qs]
        for j, qv in enumerate(qvals):
            if j != i:
                pval = pval * qv
        qval = b.const(1)
        for qv in qvals:
            qval = qval * qv
        inner = b.add(qval ** 2, b.var(k) ** N * b.const(-1))
        outer = b.add(pval ** 2, b.var(k) * inner * b.const(-1))
        pe, qe = pbar.extend(n), qbar.extend(n)
        poly = pe * pe - u * (qe * qe - u ** N)
        replaced[F] = Atom(poly, "<=", b.build(outer))
    body = map_atoms(phi, lambda a: replaced[a.poly])
    parts = []
    if radii is not None:
        blocks = list(blocks) if blocks is not None else [k]
        if sum(blocks) != k or len(blocks) != len(radii):
            raise PreconditionError("blocks must partition the variables, one radius each")
        start = 0
        for size, r in zip(blocks, radii):
            r = as_rational(r)
            ball = Polynomial.constant(n, -r * r)
            for pos in range(start, start + size):
                ball = ball + Polynomial.var(n, pos + 1) ** 2
            parts.append(Atom(ball, "<="))
            start += size
    return conj(*parts, body, Atom(u, ">"))


def star_formula(phi, p, R, Rprime, literal=False):
    """``Omega ∧ bar(Theta1 ∧ Theta2^{phi†_{R,R'}} ∧ Theta3^{pi}) ∧ U > 0``.

    Blocks have the ambient dimension ``K`` of ``dagger_RRprime(phi)``;
    ``pi`` projects a block onto its first ``phi.dim`` coordinates.  Every
    point of that formula lies on the sphere of radius ``sqrt(R^2 + R'^2)``,
    which is the radius used for the block balls.
    """
    k = phi.dim
    R, Rprime = as_rational(R), as_rational(Rprime)
    dag = dagger_RRprime(phi, R, Rprime, literal)
    K = dag.dim
    pi = PolyMap.projection(K, range(k))
    inner = _join(theta1(p, K), theta2(dag, p), theta3(pi, p))
    bar = level1_bar(inner)
    lay = JoinLayout(p, K)
    n = lay.n + 1
    balls = []
    rad2 = R * R + Rprime * Rprime
    for i in range(p + 1):
        ball = Polynomial.constant(n, -rad2)
        for pos in lay.block(i):
            ball = ball + Polynomial.var(n, pos + 1) ** 2
        balls.append(Atom(ball, "<="))
    tball = Polynomial.constant(n, -1)
    for i in range(p + 1):
        tball = tball + Polynomial.var(n, lay.t(i) + 1) ** 2
    balls.append(Atom(tball, "<="))
    return conj(*balls, bar)


# genericity helpers

def def_poly(Q, H, zeta):
    """``(1 - zeta) Q - zeta H`` for ``0 < zeta < 1``."""
    zeta = as_rational(zeta)
    if not 0 < zeta < 1:
        raise PreconditionError("zeta must lie strictly between 0 and 1")
    return Q.scale(1 - zeta) - H.scale(zeta)


def cr_system(H, p, homogenized=False):
    """``[H, dH/dX_1, ..., dH/dX_p]``."""
    if not 0 <= p <= H.nvars:
        raise PreconditionError(f"p must lie in 0..{H.nvars}")
    out = [H] + [H.partial_derivative(i) for i in range(1, p + 1)]
    if homogenized:
        out = [q.homogenize() for q in out]
    return out


def g_poly(k, omega):
    """``sum X_i^2 - omega^2``."""
    omega = as_rational(omega)
    out = Polynomial.constant(k, -omega * omega)
    for i in range(k):
        out = out + Polynomial.var(k, i + 1) ** 2
    return out


def default_generic_h(k, d, seed=0):
    """``(sum X_i^2)^(d/2) + sum c_i X_i^d`` with small positive random ``c_i``.

    Genericity is not checked.
    """
    if d <= 0 or d % 2:
        raise PreconditionError("d must be a positive even integer")
    rng = random.Random(seed)
    sq = Polynomial.zero(k)
    for i in range(k):
        sq = sq + Polynomial.var(k, i + 1) ** 2
    out = sq ** (d // 2)
    for i in range(k):
        out = out + (Polynomial.var(k, i + 1) ** d).scale(Fraction(rng.randint(1, 9), 1000))
    return out


# parameters

@dataclass(frozen=True)
class Stabilization:
    value: Fraction
    result: object
    halvings: int
    stable: bool


class ParamEnv:
    """Ordered named positive rationals standing in for infinitesimals.

    Later names are understood to be much smaller than earlier ones.
    """

    def __init__(self, items=()):
        self._items = []
        for name, value in items:
            self.set(name, value)

    def set(self, name, value):
        value = as_rational(value)
        if value <= 0:
            raise PreconditionError(f"parameter {name} must be positive")
        for n, (key, _) in enumerate(self._items):
            if key == name:
                self._items[n] = (name, value)
                return self
        self._items.append((name, value))
        return self

    def __getitem__(self, name):
        for key, value in self._items:
            if key == name:
                return value
        raise KeyError(name)

    def __contains__(self, name):
        return any(key == name for key, _ in self._items)

    def names(self):
        return [key for key, _ in self._items]

    def items(self):
        return list(self._items)

    def respects_order(self, names=None):
        """True if values strictly decrease along ``names`` (default: all)."""
        names = names or self.names()
        vals = [self[n] for n in names]
        return all(a > b for a, b in zip(vals, vals[1:]))

    def halve_until_stable(self, name, predicate, max_halvings=60, window=4):
        """Halve ``name`` until ``predicate`` gives one answer ``window`` times running.

        Stands in for "for all sufficiently small values".  The env keeps the
        first value of the stable run.  Gives up after ``max_halvings``
        with ``stable=False``.
        """
        value = self[name]
        run_start, run_result, run_len = value, predicate(value), 1
        for n in range(1, max_halvings + 1):
            value = value / 2
            cur = predicate(value)
            if cur == run_result:
                run_len += 1
            else:
                run_start, run_result, run_len = value, cur, 1
            if run_len >= window:
                self.set(name, run_start)
                return Stabilization(run_start, run_result, n, True)
        self.set(name, value)
        return Stabilization(value, run_result, max_halvings, False)


def check_rep(atom):
    """True if the atom's attached representation expands to its polynomial."""
    return atom.rep is None or expand(atom.rep) == atom.poly
