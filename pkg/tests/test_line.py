import random
from fractions import Fraction
from itertools import combinations, product

import pytest
import sympy
from hypothesis import given

from _strategies import rand_formula, rand_interval_set, rand_poly, rand_upoly_family, seeds
from saq.arith import parse_polynomial
from saq.bounds import bpr8_bound, main_bound_uniform
from saq.errors import PreconditionError, ResourceLimitError
from saq.formula import Atom, conj, eval_formula, parse_formula
from saq.line import (AlgebraicPoint, IntervalSet, basic_boolean_algebra,
                      cdd_line, common_refinement, compare, is_adapted, is_cdd, is_partition,
                      isolate_roots, realize_univariate, sign_condition_census, sign_at_point,
                      sturm_count)
from saq.line.intervals import _as_upoly, _roots_of_family, sign_vectors, union
from saq.line.sampling import grid_sample, hausdorff_grid, tube_limit_experiment, zero_set_sample
from saq.line.upoly import from_polynomial

F = parse_formula
X = sympy.Symbol("x")


def U(text):
    return from_polynomial(parse_polynomial(text, 1))


def half_open():
    return realize_univariate(F("[x1>=0] & [x1<1]"))


def test_isolate_examples():
    r = isolate_roots(U("x1^2-2"))
    assert len(r) == 2 and not r[0].is_rational
    assert r[0].hi < 0 < r[1].lo
    assert all(p.lo ** 2 < 2 < p.hi ** 2 for p in r[1:])
    assert isolate_roots(U("x1^2+1")) == []
    roots = isolate_roots(U("x1^3-3*x1+2"))
    assert [p.exact for p in roots] == [-2, 1]
    with pytest.raises(PreconditionError):
        isolate_roots(())


def test_sturm_count_counts_half_open():
    p = U("x1^2-1")
    assert sturm_count(p, -1, 1) == 1
    assert sturm_count(p, -2, 2) == 2


@given(seeds())
def test_roots_against_sympy(seed):
    rng = random.Random(seed)
    p = rand_poly(rng, 1, 6, 5)
    if p.is_zero():
        return
    ours = isolate_roots(from_polynomial(p))
    expr = sum(sympy.Rational(c.numerator, c.denominator) * X ** e[0] for e, c in p.terms.items())
    theirs = sorted(set(sympy.Poly(expr, X).real_roots())) if p.total_degree() else []
    assert len(ours) == len(theirs)
    for a, b in zip(ours, theirs):
        if a.is_rational:
            assert sympy.Rational(a.exact.numerator, a.exact.denominator) == b
        else:
            assert a.lo < b < a.hi


def test_algebraic_order_and_signs():
    s2 = isolate_roots(U("x1^2-2"))[1]
    other = isolate_roots(U("x1^4-4"))[-1]
    assert compare(s2, other) == 0 and s2 == other
    assert AlgebraicPoint.rational(Fraction(7, 5)) < s2 < AlgebraicPoint.rational(Fraction(3, 2))
    assert sign_at_point(U("x1^2-2"), s2) == 0
    assert sign_at_point(U("x1-1"), s2) == 1
    assert sign_at_point(U("x1^3-2*x1"), s2) == 0


def test_realize_examples():
    s = half_open()
    assert str(s) == "{[pt 0], (0,1)}"
    assert realize_univariate(F("[x1^2+1<=0]")).is_empty()
    two = realize_univariate(F("[x1^2-2=0]"))
    assert len(two.cells()) == 2 and all(c[0] == "pt" for c in two.cells())
    assert realize_univariate(F("[x1^2+1>0]")) == IntervalSet.real_line()
    with pytest.raises(PreconditionError):
        realize_univariate(F("[x1=0] & [x2=0]"))


@given(seeds())
def test_realize_agrees_with_eval(seed):
    rng = random.Random(seed)
    polys = [p for p in (rand_poly(rng, 1, 3, 3) for _ in range(3)) if not p.is_zero()]
    if not polys:
        return
    f = rand_formula(rng, polys, depth=3)
    s = realize_univariate(f)
    for cell_set in (s, s.complement()):
        for x in cell_set.sample_points():
            if x is not None:
                assert eval_formula(f, [x]) == (cell_set is s)
    for _ in range(20):
        x = Fraction(rng.randint(-40, 40), rng.randint(1, 8))
        assert s.contains(x) == eval_formula(f, [x])


def test_endpoints_and_refinement_example():
    s = half_open()
    assert [p.exact for p in s.endpoints()] == [0, 1]
    ref = common_refinement([s])
    assert str(ref) == "{(-inf,0), [pt 0], (0,1), [pt 1], (1,inf)}"
    assert len(ref) == 5


def test_boolean_algebra_example():
    b = basic_boolean_algebra([half_open()])
    assert {tuple(sorted(k)): str(v) for k, v in b.atoms} == {
        (): "{(-inf,0), [pt 1], (1,inf)}", (1,): "{[pt 0], (0,1)}"}
    assert [str(c) for c in b.components] == ["{(-inf,0)}", "{[pt 0], (0,1)}", "{[pt 1], (1,inf)}"]


def test_cdd_line_example():
    s = half_open()
    cdd = cdd_line([s])
    assert is_adapted(cdd, [s]) and len(cdd) == 5 and is_cdd(cdd)
    comps = list(basic_boolean_algebra([s]).components)
    assert is_adapted(comps, [s]) and not is_cdd(comps)
    with pytest.raises(PreconditionError):
        is_adapted([s], [s])


@given(seeds())
def test_cdd_cell_count_identity(seed):
    rng = random.Random(seed)
    sets = [rand_interval_set(rng) for _ in range(rng.randint(1, 4))]
    cdd = cdd_line(sets)
    total = sum(len(s.endpoints()) for s in sets)
    assert len(cdd) <= 2 * total + 1
    assert is_adapted(cdd, sets)


@given(seeds())
def test_endpoints_of_union_inside_union_of_endpoints(seed):
    rng = random.Random(seed)
    sets = [rand_interval_set(rng) for _ in range(rng.randint(1, 4))]
    mine = union(sets).endpoints()
    allp = [p for s in sets for p in s.endpoints()]
    assert all(any(compare(p, q) == 0 for q in allp) for p in mine)


def test_endpoints_are_closure_minus_interior():
    rng = random.Random(11)
    for _ in range(100):
        s = rand_interval_set(rng)
        diff = s.closure() - s.interior()
        assert all(c[0] == "pt" for c in diff.cells())
        assert [c[1].exact for c in diff.cells()] == [p.exact for p in s.endpoints()]


def _check_boolean_algebra(sets):
    b = basic_boolean_algebra(sets)
    pieces = [s for _, s in b.atoms]
    assert all(not s.is_empty() for s in pieces)
    assert is_partition(pieces) and is_adapted(pieces, sets)
    assert is_partition(list(b.components)) and is_adapted(list(b.components), sets)
    for i, j in combinations(range(len(pieces)), 2):
        merged = pieces[i] | pieces[j]
        rest = [p for k, p in enumerate(pieces) if k not in (i, j)]
        assert not is_adapted(rest + [merged], sets)


def test_boolean_algebra_exhaustive_small():
    pts = [Fraction(0), Fraction(1)]
    shapes = [IntervalSet(pts, bits) for bits in product((False, True), repeat=5)]
    shapes = list(dict.fromkeys(shapes))
    for n in (1, 2):
        for sets in product(shapes, repeat=n):
            _check_boolean_algebra(list(sets))
    rng = random.Random(3)
    for _ in range(150):
        _check_boolean_algebra([rand_interval_set(rng, 3) for _ in range(3)])


def test_census_examples():
    c = sign_condition_census([parse_polynomial("x1"), parse_polynomial("x1^2-1", 1)])
    assert c.total == 7 and len(c.rows) == 7 and all(b == 1 for _, b in c.rows)
    assert c.to_rows()[0] == {"sigma": "+,+", "b0": 1}
    assert sign_condition_census([parse_polynomial("x1")]).rows == (("+", 1), ("-", 1), ("0", 1))
    with pytest.raises(PreconditionError):
        sign_condition_census([])
    with pytest.raises(PreconditionError):
        sign_condition_census([parse_polynomial("0", 1)])


def test_census_components_merge_separated_cells():
    c = sign_condition_census([parse_polynomial("x1^2-1", 1)])
    assert dict(c.rows) == {"+": 2, "-": 1, "0": 2}
    assert c.total == c.cells == 5


def test_census_within_bounds():
    rng = random.Random(17)
    for _ in range(40):
        s, d = rng.randint(1, 5), rng.randint(1, 6)
        c = sign_condition_census(rand_upoly_family(rng, s, d))
        assert c.total <= bpr8_bound(s, d, 1, 1)
        assert c.total <= main_bound_uniform(s, d, 1, 1, 1)


@given(seeds())
def test_census_total_is_refinement_cells(seed):
    rng = random.Random(seed)
    fam = rand_upoly_family(rng, rng.randint(1, 3), 4)
    c = sign_condition_census(fam)
    zero_sets = [realize_univariate(_zero_formula(p)) for p in fam]
    pts = sorted({q for z in zero_sets for q in z.endpoints()})
    assert c.cells == 2 * len(pts) + 1
    assert c.total <= c.cells


def _zero_formula(p):
    return conj(Atom(p, "="))


def test_planted_common_factor():
    rng = random.Random(23)
    checked = 0
    for _ in range(60):
        g = rand_poly(rng, 1, 3, 3)
        a, b = rand_poly(rng, 1, 2, 3), rand_poly(rng, 1, 2, 3)
        if g.total_degree() < 1 or a.is_zero() or b.is_zero():
            continue
        p, q = g * a, g * b
        pts = _roots_of_family([_as_upoly(p), _as_upoly(q)])
        vecs = sign_vectors([p, q])
        for r in isolate_roots(from_polynomial(g)):
            i = next(i for i, x in enumerate(pts) if compare(x, r) == 0)
            assert vecs[2 * i + 1] == (0, 0)
            checked += 1
    assert checked > 10


def test_cdd_growth_is_linear():
    rng = random.Random(5)
    pool = [realize_univariate(_zero_formula(p)) for p in rand_upoly_family(rng, 12, 3)]
    counts = [len(cdd_line(pool[:n])) for n in range(1, 13)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))
    assert all(c <= 1 + 2 * 3 * n for n, c in enumerate(counts, 1))


# grid sampling

def test_grid_circle():
    pts = grid_sample(F("[x1^2+x2^2-1=0]"), [(-2, 2), (-2, 2)], 1)
    assert sorted(pts) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_grid_errors():
    with pytest.raises(ResourceLimitError):
        grid_sample(F("[x1^2+x2^2-1=0]"), [(-100, 100), (-100, 100)], Fraction(1, 100))
    with pytest.raises(PreconditionError):
        grid_sample(F("[x1=0]"), [(0, 1)], 0)
    with pytest.raises(PreconditionError):
        grid_sample(F("[x1=0]", 4), [(0, 1)] * 4, 1)


def test_grid_matches_pointwise_eval():
    rng = random.Random(2)
    f = rand_formula(rng, [rand_poly(rng, 2, 3, 4) for _ in range(3)], depth=3)
    box = [(-1, 1), (Fraction(-1, 2), 1)]
    step = Fraction(1, 4)
    got = set(grid_sample(f, box, step))
    for i in range(9):
        for j in range(7):
            x = [Fraction(-1) + step * i, Fraction(-1, 2) + step * j]
            assert (tuple(x) in got) == eval_formula(f, x)


def test_zero_set_sample_on_circle():
    pts = zero_set_sample(parse_polynomial("x1^2+x2^2-1"), [(-2, 2), (-2, 2)], Fraction(1, 2))
    assert (Fraction(1, 2), Fraction(0)) not in pts
    for x, y in pts:
        assert abs(x * x + y * y - 1) < Fraction(1, 2 ** 17)
    assert (Fraction(0), Fraction(1)) in pts


def test_hausdorff():
    A = [(0, 0), (1, 0), (0, 2)]
    assert hausdorff_grid(A, A) == 0
    assert hausdorff_grid(A, [(0, 0)]) == 4
    assert hausdorff_grid([(Fraction(1, 3),)], [(0,), (1,)]) == Fraction(4, 9)
    assert hausdorff_grid([], []) == 0
    with pytest.raises(PreconditionError):
        hausdorff_grid(A, [])


def test_hausdorff_against_brute_force():
    rng = random.Random(9)
    for _ in range(20):
        A = [tuple(Fraction(rng.randint(-50, 50), 7) for _ in range(2)) for _ in range(30)]
        B = [tuple(Fraction(rng.randint(-50, 50), 7) for _ in range(2)) for _ in range(25)]
        d = lambda a, b: sum((x - y) ** 2 for x, y in zip(a, b))
        want = max(max(min(d(a, b) for b in B) for a in A), max(min(d(a, b) for a in A) for b in B))
        assert hausdorff_grid(A, B) == want


def test_tube_limit_monotone_coarse():
    P = parse_polynomial("x1^4+x1^2*x2^2-x1^2")
    Q = parse_polynomial("x1", 2)
    Fz = parse_polynomial("x1^3+x1*x2^2-x1")
    recs, mono = tube_limit_experiment(P, Q, Fz, 2, [Fraction(1, 10), Fraction(1, 100)], Fraction(1, 20))
    assert mono and all(r["tube_points"] > 0 for r in recs)
