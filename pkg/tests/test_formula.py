import random
from fractions import Fraction

import pytest
from hypothesis import given

from _strategies import RELS, rand_formula, rand_point, rand_poly, seeds
from saq.arith import Polynomial, parse_polynomial
from saq.errors import ParseError, PreconditionError, ResourceLimitError
from saq.formula import (And, Atom, Not, Or, SignCondition, additive_format, all_sign_conditions,
                         atoms, conj, dense_format, disj, eval_formula, is_p_closed,
                         nonstrict_to_strict, parse_formula, relaxed_sign_condition,
                         sign_condition_formula, sign_of, to_dnf)

F = parse_formula


def P(text, n=None):
    return parse_polynomial(text, n)


def is_dnf(f):
    def is_lit(g):
        return isinstance(g, Atom)

    def is_clause(g):
        return is_lit(g) or (isinstance(g, And) and all(is_lit(a) for a in g.args))

    return is_clause(f) or (isinstance(f, Or) and all(is_clause(a) for a in f.args))


def test_dense_format_counts_distinct_polynomials():
    d = dense_format(F("[x1=0] & [x1>0]"))
    assert (d.s, d.d, d.k) == (1, 1, 1)


def test_monomial_formula_has_zero_additive_complexity():
    assert additive_format(F("[x1^2*x2=0] & [x3>0]")).a == 0
    assert additive_format(F("[x1^2+x2^2-1=0]")).a == 2


def test_eval_examples():
    assert eval_formula(F("[x1^2+x2^2-1<=0]"), [Fraction(3, 5), Fraction(4, 5)])
    assert not eval_formula(Not(F("[x1>0]")), [1])
    with pytest.raises(PreconditionError):
        eval_formula(F("[x1>0]"), [1, 2])


def test_dnf_examples():
    a = F("[x1>0]")
    assert to_dnf(a) == a
    d = to_dnf(F("!([x1>0] & [x2=0])", 2))
    assert str(d) == "[x1 <= 0] | [x2 > 0] | [x2 < 0]"
    for x in ([0, 0], [1, 0], [1, 1], [-1, 2]):
        assert eval_formula(d, x) == (not (x[0] > 0 and x[1] == 0))


def test_dnf_clause_limit():
    parts = [disj(Atom(P(f"x1-{i}"), "="), Atom(P(f"x1+{i}"), "=")) for i in range(1, 9)]
    with pytest.raises(ResourceLimitError):
        to_dnf(conj(*parts), clause_limit=100)


def test_is_p_closed_examples():
    assert is_p_closed(F("[x1>=0] & [x2=0]"))
    assert not is_p_closed(F("[x1>0]"))
    assert not is_p_closed(F("![x1<=0]"))


def test_sign_condition_formula_examples():
    x, q = P("x1"), P("x1^2-1")
    sigma = SignCondition({x: 1, q: -1})
    assert str(sign_condition_formula(sigma)) == "[x1 > 0] & [x1^2 - 1 < 0]"
    assert str(sign_condition_formula(SignCondition({q: 0}))) == "[x1^2 - 1 = 0]"
    conds = [str(sign_condition_formula(s)) for s in all_sign_conditions([x, q])]
    assert len(conds) == len(set(conds)) == 9


def test_relaxed_sign_condition():
    p = P("x1+x2")
    f = relaxed_sign_condition(SignCondition({p: 1}), Fraction(1, 100))
    assert str(f) == "[x1^2 + x2^2 - 100 <= 0] & [x1 + x2 - 1/100 >= 0]"
    g = relaxed_sign_condition(SignCondition({p: 0}), Fraction(1, 2))
    assert {a.rel for a in atoms(g)} == {"<=", "="}
    with pytest.raises(PreconditionError):
        relaxed_sign_condition(SignCondition({p: 0}), 0)


def test_nonstrict_to_strict():
    p = P("x1")
    d, e, o = Fraction(1, 10), Fraction(1, 10), Fraction(5)
    f = nonstrict_to_strict(SignCondition({p: 0}), e, d, o)
    assert str(f) == "[x1 + 1/10 > 0] & [x1 - 1/10 < 0] & [x1^2 - 25 < 0]"
    g = nonstrict_to_strict(SignCondition({p: 1}), e, d, o)
    assert str(g) == "[x1 - 1/10 > 0] & [x1^2 - 25 < 0]"
    with pytest.raises(PreconditionError):
        nonstrict_to_strict(SignCondition({p: 1}), 0, d, o)


def test_parser_grammar_and_precedence():
    f = F("[x1>0] | [x2<0] & ![x1=0]")
    assert isinstance(f, Or)
    assert f.dim == 2
    assert str(F("[x1 >= 1]")) == "[x1 - 1 >= 0]"
    assert F("[x1 = 0]", 3).dim == 3
    for bad in ["[x1>0", "[x1]", "[x1>0] &", "([x1>0]", "[x1 ! 0]"]:
        with pytest.raises(ParseError):
            F(bad)
    with pytest.raises(ParseError):
        F("[x3=0]", 2)


def test_constant_atoms_fold():
    f = conj(Atom(Polynomial.constant(1, 1), ">"), Atom(P("x1"), "="))
    assert eval_formula(f, [0]) and not eval_formula(f, [1])


@given(seeds())
def test_dnf_preserves_semantics(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 3)
    polys = [rand_poly(rng, k, 2, 3) for _ in range(4)]
    f = rand_formula(rng, polys, depth=4)
    d = to_dnf(f)
    assert is_dnf(d)
    assert dense_format(d).s <= dense_format(f).s
    for _ in range(25):
        x = rand_point(rng, k, 2, 2)
        assert eval_formula(d, x) == eval_formula(f, x)


@given(seeds())
def test_dnf_keeps_p_closed(seed):
    rng = random.Random(seed)
    polys = [rand_poly(rng, 2, 2, 3) for _ in range(3)]
    f = rand_formula(rng, polys, depth=3, rels=("=", ">=", "<="))
    f = f.arg if isinstance(f, Not) else f
    if is_p_closed(f):
        assert is_p_closed(to_dnf(f))


@given(seeds())
def test_sign_condition_realization(seed):
    rng = random.Random(seed)
    fam = [rand_poly(rng, 2, 2, 3) for _ in range(2)]
    fam = list(dict.fromkeys(p for p in fam if not p.is_zero())) or [P("x1", 2)]
    x = rand_point(rng, 2, 1, 1)
    for sigma in all_sign_conditions(fam):
        truth = all(sign_of(p.eval(x)) == s for p, s in sigma.pairs)
        assert eval_formula(sign_condition_formula(sigma), x) == truth


@given(seeds())
def test_relaxation_implies_strict_sign(seed):
    rng = random.Random(seed)
    p = rand_poly(rng, 2, 2, 3)
    if p.is_constant():
        return
    delta = Fraction(1, 100)
    for s in (1, -1):
        sigma = SignCondition({p: s})
        relaxed = relaxed_sign_condition(sigma, delta)
        for _ in range(20):
            x = rand_point(rng, 2, 3, 3)
            if eval_formula(relaxed, x):
                assert eval_formula(sign_condition_formula(sigma), x)


def test_nonstrict_output_implies_weak_sign():
    rng = random.Random(5)
    p = P("x1^2-x2")
    for s in (-1, 0, 1):
        f = nonstrict_to_strict(SignCondition({p: s}), Fraction(1, 10), Fraction(1, 10), 3)
        for _ in range(200):
            x = rand_point(rng, 2, 3, 4)
            if eval_formula(f, x):
                v = p.eval(x)
                assert (s == 0 and abs(v) < Fraction(1, 10)) or s * v > 0


def test_every_relation_is_supported():
    for rel in RELS:
        assert eval_formula(Atom(P("x1"), rel), [0]) == (rel in ("=", ">=", "<="))
