from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from _strategies import points, polynomials
from saq.arith import Polynomial, format_polynomial, format_rational, parse_polynomial, parse_rational
from saq.errors import ParseError, PreconditionError

X1, X2 = sympy.symbols("x1 x2")


def P(text, n=None):
    return parse_polynomial(text, n)


def to_sympy(p):
    syms = sympy.symbols(" ".join(f"x{i + p.first_index}" for i in range(p.nvars)) + " _pad")[:p.nvars]
    expr = sympy.Integer(0)
    for exps, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, e in zip(syms, exps):
            term *= s ** e
        expr += term
    return sympy.expand(expr)


def test_add_inverse():
    assert (P("x1") + P("-x1")).is_zero()


def test_difference_of_squares():
    assert P("x1+1") * P("x1-1") == P("x1^2-1")


def test_cube():
    assert P("x1+1") ** 3 == P("x1^3+3*x1^2+3*x1+1")


def test_variable_count_mismatch():
    with pytest.raises(PreconditionError):
        P("x1", 1) + P("x2", 2)


@pytest.mark.parametrize("text,point,value", [
    ("x1^2+x2^2", ["3/5", "4/5"], 1),
    ("x1*x2-1", ["2", "1/2"], 0),
])
def test_eval_examples(text, point, value):
    assert P(text).eval([parse_rational(x) for x in point]) == value


def test_eval_zero_and_dimension():
    assert Polynomial.zero(3).eval([1, 2, 3]) == 0
    with pytest.raises(PreconditionError):
        P("x1+x2").eval([1])


def test_partial_derivatives():
    assert P("x1^2*x2").partial_derivative(1) == P("2*x1*x2")
    assert P("x2^3").partial_derivative(1).is_zero()
    assert P("x1^2+x2^2-1").partial_derivative(2) == P("2*x2", 2)
    with pytest.raises(PreconditionError):
        P("x1").partial_derivative(2)


def test_degree_and_homogenize():
    assert P("x1^2*x2+x2").total_degree() == 3
    h = P("x1^2+x2-1").homogenize()
    assert h.is_homogeneous() and h.first_index == 0
    assert to_sympy(h) == sympy.expand(sympy.Symbol("x1") ** 2 + sympy.Symbol("x2") * sympy.Symbol("x0")
                                       - sympy.Symbol("x0") ** 2)
    with pytest.raises(PreconditionError):
        Polynomial.zero(2).homogenize()


def test_homogenize_homogeneous_input_has_no_x0():
    h = P("x1^2+x1*x2").homogenize()
    assert all(e[0] == 0 for e in h.terms)
    assert h.dehomogenize() == P("x1^2+x1*x2")


def test_grlex_order_in_printing():
    assert format_polynomial(P("1 + x2 + x1^2 + x1*x2")) == "x1^2 + x1*x2 + x2 + 1"


def test_parse_errors():
    for bad in ["", "x", "x1^", "3/0*x1", "x1 ++ x2", "y1"]:
        with pytest.raises(ParseError):
            parse_polynomial(bad)


def test_rational_format():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert format_rational(Fraction(5)) == "5"
    assert parse_rational("-6/8") == Fraction(-3, 4)


@given(polynomials(), polynomials(), polynomials())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p


@given(polynomials(), polynomials(), points())
def test_eval_is_homomorphism(p, q, x):
    assert (p * q).eval(x) == p.eval(x) * q.eval(x)
    assert (p + q).eval(x) == p.eval(x) + q.eval(x)


@given(polynomials(), polynomials())
def test_leibniz(p, q):
    for i in (1, 2):
        lhs = (p * q).partial_derivative(i)
        rhs = p.partial_derivative(i) * q + p * q.partial_derivative(i)
        assert lhs == rhs


@given(polynomials())
def test_homogenize_properties(p):
    if p.is_zero():
        return
    h = p.homogenize()
    d = p.total_degree()
    assert all(sum(e) == d for e in h.terms)
    assert h.dehomogenize() == p


@given(polynomials(), polynomials())
def test_product_against_sympy(p, q):
    assert to_sympy(p * q) == sympy.expand(to_sympy(p) * to_sympy(q))
    assert to_sympy(p.partial_derivative(1)) == sympy.diff(to_sympy(p), X1)


@given(polynomials())
def test_format_parse_round_trip(p):
    assert parse_polynomial(format_polynomial(p), 2) == p


@given(polynomials(), points())
def test_substitute_matches_eval(p, x):
    consts = [Polynomial.constant(1, v) for v in x]
    assert p.substitute(consts).constant_value() == p.eval(x)
