"""Exact semi-algebraic subsets of the line.

An :class:`IntervalSet` stores sorted distinct breakpoints
``b_0 < ... < b_{n-1}`` (algebraic points) and one membership bit per cell
of the induced partition: ``(-inf, b_0), {b_0}, (b_0, b_1), ..., (b_{n-1}, inf)``,
so ``2n + 1`` bits.  The canonical form drops every breakpoint whose left
cell, point cell and right cell agree; after that the breakpoints are
exactly the endpoints (closure minus interior) of the set.
"""

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import FrozenSet, Tuple

from ..arith import Polynomial, as_rational, format_rational
from ..errors import PreconditionError
from ..formula import Atom, atoms, eval_with_signs, polynomials
from .algebraic import (AlgebraicPoint, compare, format_point, isolate_roots,
                        rational_between, sign_at_point)
from .upoly import from_polynomial, mul, primitive, sign_at, trim


def _as_point(x):
    if isinstance(x, AlgebraicPoint):
        return x
    return AlgebraicPoint.rational(as_rational(x))


def merge_points(lists):
    """Sorted distinct union of sorted point lists, plus each list's positions in it."""
    tagged = []
    for li, pts in enumerate(lists):
        for pi, p in enumerate(pts):
            tagged.append((p, li, pi))
    tagged.sort(key=cmp_to_key(lambda x, y: compare(x[0], y[0])))
    merged = []
    where = [[None] * len(pts) for pts in lists]
    for p, li, pi in tagged:
        if not merged or compare(merged[-1], p) != 0:
            merged.append(p)
        where[li][pi] = len(merged) - 1
    return merged, where


def _bits_on(bits, own, total):
    """Re-express cell bits over a finer breakpoint list.

    ``own`` lists the positions of the set's breakpoints in the finer list
    of ``total`` breakpoints.
    """
    out = []
    own_set = {m: t for t, m in enumerate(own)}
    for c in range(2 * total + 1):
        if c % 2:
            j = (c - 1) // 2
            if j in own_set:
                out.append(bits[2 * own_set[j] + 1])
            else:
                out.append(bits[2 * bisect_left(own, j)])
        else:
            j = c // 2
            out.append(bits[2 * bisect_left(own, j)])
    return out


class IntervalSet:
    """A finite union of points and open intervals, in canonical form."""

    __slots__ = ("points", "bits")

    def __init__(self, points=(), bits=(False,), canonical=False):
        points = [_as_point(p) for p in points]
        bits = tuple(bool(b) for b in bits)
        if len(bits) != 2 * len(points) + 1:
            raise PreconditionError("need 2n+1 cell bits for n breakpoints")
        for a, b in zip(points, points[1:]):
            if compare(a, b) >= 0:
                raise PreconditionError("breakpoints must be strictly increasing")
        if not canonical:
            points, bits = _canonical(points, bits)
        self.points = tuple(points)
        self.bits = tuple(bits)

    # constructors

    @classmethod
    def empty(cls):
        return cls((), (False,))

    @classmethod
    def real_line(cls):
        return cls((), (True,))

    @classmethod
    def point(cls, x):
        return cls([x], (False, True, False))

    @classmethod
    def interval(cls, left, right, left_closed=False, right_closed=False):
        """Interval between two endpoints; ``None`` means infinite."""
        pts, bits = [], []
        if left is not None:
            pts.append(left)
            bits += [False, left_closed]
        bits.append(True)
        if right is not None:
            pts.append(right)
            bits += [right_closed, False]
        return cls(pts, bits)

    # queries

    def is_empty(self):
        return not any(self.bits)

    def cell_count(self):
        return len(self.bits)

    def contains(self, x):
        x = as_rational(x)
        for i, p in enumerate(self.points):
            c = _compare_point_rational(p, x)
            if c == 0:
                return self.bits[2 * i + 1]
            if c > 0:
                return self.bits[2 * i]
        return self.bits[-1]

    def __contains__(self, x):
        return self.contains(x)

    def endpoints(self):
        """Closure minus interior; equal to the canonical breakpoints."""
        return list(self.points)

    def closure(self):
        bits = list(self.bits)
        for i in range(len(self.points)):
            bits[2 * i + 1] = self.bits[2 * i] or self.bits[2 * i + 1] or self.bits[2 * i + 2]
        return IntervalSet(self.points, bits)

    def interior(self):
        bits = list(self.bits)
        for i in range(len(self.points)):
            bits[2 * i + 1] = self.bits[2 * i] and self.bits[2 * i + 1] and self.bits[2 * i + 2]
        return IntervalSet(self.points, bits)

    def cells(self):
        """Included cells as ``("pt", p)`` or ``("open", left, right)`` (``None`` = infinite)."""
        out = []
        pts = self.points
        for c, bit in enumerate(self.bits):
            if not bit:
                continue
            if c % 2:
                out.append(("pt", pts[(c - 1) // 2]))
            else:
                j = c // 2
                out.append(("open", pts[j - 1] if j else None, pts[j] if j < len(pts) else None))
        return out

    def sample_points(self):
        """One rational in every included cell (``None`` for irrational points)."""
        out = []
        for cell in self.cells():
            if cell[0] == "pt":
                out.append(cell[1].exact)
            else:
                out.append(rational_between(cell[1], cell[2]))
        return out

    def components(self):
        """Connected components, left to right."""
        comps = []
        run = None
        for c, bit in enumerate(self.bits):
            if bit:
                if run is None:
                    run = [c, c]
                else:
                    run[1] = c
            elif run is not None:
                comps.append(run)
                run = None
        if run is not None:
            comps.append(run)
        out = []
        for lo, hi in comps:
            out.append(IntervalSet(self.points, [lo <= c <= hi for c in range(len(self.bits))]))
        return out

    def is_single_cell(self):
        """A single point or a single open interval."""
        return sum(self.bits) == 1

    # boolean operations

    def _combine(self, others, fn):
        return combine([self, *others], fn)

    def __or__(self, other):
        return self._combine([other], any)

    def __and__(self, other):
        return self._combine([other], all)

    def __sub__(self, other):
        return combine([self, other], lambda v: v[0] and not v[1])

    def complement(self):
        return IntervalSet(self.points, [not b for b in self.bits])

    def issubset(self, other):
        return (self - other).is_empty()

    def isdisjoint(self, other):
        return (self & other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, IntervalSet):
            return NotImplemented
        if self.bits != other.bits or len(self.points) != len(other.points):
            return False
        return all(compare(a, b) == 0 for a, b in zip(self.points, other.points))

    def __hash__(self):
        return hash(self.bits)

    def __str__(self):
        return format_cells(self.cells())

    def __repr__(self):
        return f"IntervalSet({self})"


def _compare_point_rational(p, x):
    return compare(p, AlgebraicPoint.rational(x))


def _canonical(points, bits):
    keep_pts = []
    keep_bits = [bits[0]]
    for i, p in enumerate(points):
        left, mid, right = bits[2 * i], bits[2 * i + 1], bits[2 * i + 2]
        if left == mid == right:
            continue
        keep_pts.append(p)
        keep_bits += [mid, right]
    return keep_pts, keep_bits


def combine(sets, fn):
    """Cellwise boolean combination: ``fn`` maps the membership vector to a bit."""
    merged, where = merge_points([s.points for s in sets])
    vectors = [_bits_on(s.bits, w, len(merged)) for s, w in zip(sets, where)]
    bits = [fn([v[c] for v in vectors]) for c in range(2 * len(merged) + 1)]
    return IntervalSet(merged, bits)


def union(sets):
    return combine(list(sets), any) if sets else IntervalSet.empty()


def _endpoint_text(p, side):
    if p is None:
        return "-inf" if side == "left" else "inf"
    if p.exact is not None:
        return format_rational(p.exact)
    return format_point(p)


def format_cells(cells):
    parts = []
    for cell in cells:
        if cell[0] == "pt":
            parts.append(f"[{format_point(cell[1])}]")
        else:
            parts.append(f"({_endpoint_text(cell[1], 'left')},{_endpoint_text(cell[2], 'right')})")
    return "{" + ", ".join(parts) + "}"


class LinePartition:
    """The partition of the line cut out by sorted distinct points."""

    def __init__(self, points):
        self.points = tuple(_as_point(p) for p in points)

    def __len__(self):
        return 2 * len(self.points) + 1

    def cells(self):
        n = len(self)
        return [IntervalSet(self.points, [c == i for c in range(n)]) for i in range(n)]

    def cell_descriptions(self):
        out = []
        pts = self.points
        for c in range(len(self)):
            if c % 2:
                out.append(("pt", pts[(c - 1) // 2]))
            else:
                j = c // 2
                out.append(("open", pts[j - 1] if j else None, pts[j] if j < len(pts) else None))
        return out

    def __str__(self):
        return format_cells(self.cell_descriptions())

    def __eq__(self, other):
        if not isinstance(other, LinePartition):
            return NotImplemented
        return len(self.points) == len(other.points) and all(
            compare(a, b) == 0 for a, b in zip(self.points, other.points))


def endpoints(s):
    return s.endpoints()


def common_refinement(sets):
    """Points: every endpoint of every set; cells: the complementary open intervals."""
    merged, _ = merge_points([s.endpoints() for s in sets])
    return LinePartition(merged)


@dataclass(frozen=True)
class BooleanAlgebra:
    atoms: Tuple[Tuple[FrozenSet[int], IntervalSet], ...]
    components: Tuple[IntervalSet, ...]

    def atom(self, labels):
        for key, s in self.atoms:
            if key == frozenset(labels):
                return s
        return IntervalSet.empty()


def basic_boolean_algebra(sets):
    """Nonempty sets ``{x : x in S_i iff i in I}`` (labels from 1) and their components."""
    sets = list(sets)
    merged, where = merge_points([s.points for s in sets])
    n = len(merged)
    vectors = [_bits_on(s.bits, w, n) for s, w in zip(sets, where)]
    keys = [frozenset(i + 1 for i, v in enumerate(vectors) if v[c]) for c in range(2 * n + 1)]
    order = []
    for key in keys:
        if key not in order:
            order.append(key)
    atoms_out = tuple((key, IntervalSet(merged, [k == key for k in keys])) for key in order)
    comps = []
    start = 0
    for c in range(1, 2 * n + 2):
        if c == 2 * n + 1 or keys[c] != keys[start]:
            comps.append(IntervalSet(merged, [start <= x < c for x in range(2 * n + 1)]))
            start = c
    return BooleanAlgebra(atoms_out, tuple(comps))


def is_partition(sets):
    sets = list(sets)
    if union(sets) != IntervalSet.real_line():
        return False
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if not sets[i].isdisjoint(sets[j]):
                return False
    return True


def is_adapted(partition, targets):
    """Every cell lies inside or outside every target."""
    if isinstance(partition, LinePartition):
        partition = partition.cells()
    partition = list(partition)
    if not is_partition(partition):
        raise PreconditionError("cells do not form a partition of the line")
    for cell in partition:
        for t in targets:
            if not (cell.issubset(t) or cell.isdisjoint(t)):
                return False
    return True


def is_cdd(partition):
    """Every cell is a single point or a single open interval."""
    if isinstance(partition, LinePartition):
        return True
    return all(cell.is_single_cell() for cell in partition)


def cdd_line(targets):
    return common_refinement(targets)


# univariate realization

def _as_upoly(p):
    if isinstance(p, Polynomial):
        if p.nvars == 0:
            return trim((p.constant_value(),))
        return from_polynomial(p)
    return trim(p)


def _cell_signs(family, points):
    """Sign vectors of the family on every cell of the partition by ``points``."""
    rows = []
    n = len(points)
    for c in range(2 * n + 1):
        if c % 2:
            a = points[(c - 1) // 2]
            rows.append(tuple(sign_at_point(q, a) for q in family))
        else:
            j = c // 2
            x = rational_between(points[j - 1] if j else None, points[j] if j < n else None)
            rows.append(tuple(sign_at(q, x) for q in family))
    return rows


def _roots_of_family(family):
    prod = (1,)
    for q in family:
        if len(q) > 1:
            prod = mul(prod, primitive(q))
    if len(prod) <= 1:
        return []
    return isolate_roots(prod)


def realize_univariate(f):
    """Exact realization of a formula in one variable."""
    if f.dim != 1:
        raise PreconditionError(f"expected a formula in one variable, got {f.dim}")
    family = polynomials(f)
    ups = [_as_upoly(p) for p in family]
    points = _roots_of_family(ups)
    rows = _cell_signs(ups, points)
    bits = [eval_with_signs(f, dict(zip(family, row))) for row in rows]
    return IntervalSet(points, bits)


@dataclass(frozen=True)
class Census:
    rows: Tuple[Tuple[str, int], ...]
    total: int
    cells: int

    def to_rows(self):
        return [{"sigma": label, "b0": b0} for label, b0 in self.rows]


def _label(row):
    return ",".join({1: "+", -1: "-", 0: "0"}[s] for s in row)


def sign_condition_census(family):
    """Number of connected components of every realizable sign condition.

    Each cell of the partition by all roots is a component of its sign
    condition, since neighbouring cells always differ in sign.
    """
    ups = [_as_upoly(p) for p in family]
    if not ups:
        raise PreconditionError("family must be nonempty")
    if any(not q for q in ups):
        raise PreconditionError("zero polynomial in family")
    points = _roots_of_family(ups)
    rows = _cell_signs(ups, points)
    counts = {}
    for row in rows:
        counts[row] = counts.get(row, 0) + 1
    ordered = tuple(sorted((_label(r), n) for r, n in counts.items()))
    return Census(ordered, sum(counts.values()), len(rows))


def sign_vectors(family):
    """Per-cell sign vectors (left to right) of the family."""
    ups = [_as_upoly(p) for p in family]
    return _cell_signs(ups, _roots_of_family(ups))
