"""Exact evaluation of explicit Betti-number and format bounds.

Every function returns a Python ``int`` (or a small record of ints).
Asymptotic constants that the formulas leave unspecified are never
invented; they are carried as text annotations in :class:`BoundReport`.
"""

import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import prod

from .arith import binomial
from .errors import PreconditionError, ResourceLimitError
from .limits import limit


@dataclass(frozen=True)
class BoundReport:
    formula: str
    value: int
    params: dict = field(default_factory=dict)
    annotations: tuple = ()

    def to_dict(self):
        return {
            "formula": self.formula,
            "value": str(self.value),
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "annotations": list(self.annotations),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _jsonable(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return str(v)


def degree_sequence(degs):
    """Sorted tuple of positive degrees."""
    degs = tuple(sorted(int(d) for d in degs))
    if any(d < 1 for d in degs):
        raise PreconditionError("degrees must be positive")
    return degs


# Euler characteristic of complete intersections

def _check_chi(k, degs):
    if k < 0:
        raise PreconditionError("k must be non-negative")
    if len(degs) > k:
        raise PreconditionError(f"m = {len(degs)} exceeds k = {k}")


def chi(k, degs):
    """Euler characteristic of a smooth complete intersection of the given degrees.

    Computed by the recurrence in ``(k, m)``, memoized on the sorted degrees.
    """
    degs = degree_sequence(degs)
    _check_chi(k, degs)
    return _chi_sorted(k, degs)


@lru_cache(maxsize=None)
def _chi_sorted(k, degs):
    m = len(degs)
    if m == 0:
        return k + 1
    if m == k:
        return prod(degs)
    d = degs[-1]
    return d * _chi_sorted(k - 1, degs[:-1]) - (d - 1) * _chi_sorted(k - 1, degs)


def chi_unsorted(k, degs):
    """The same recurrence, peeling degrees in the given order (no sorting, no memo)."""
    degs = tuple(int(d) for d in degs)
    if any(d < 1 for d in degs):
        raise PreconditionError("degrees must be positive")
    _check_chi(k, degs)

    def go(k, degs):
        m = len(degs)
        if m == 0:
            return k + 1
        if m == k:
            return prod(degs)
        d = degs[-1]
        return d * go(k - 1, degs[:-1]) - (d - 1) * go(k - 1, degs)

    return go(k, degs)


def chi_abs_bound(k, degs):
    """``C(k+1, m+1) d_1 ... d_{m-1} d_m^{k-m+1}`` (``k + 1`` when ``m = 0``)."""
    degs = degree_sequence(degs)
    _check_chi(k, degs)
    m = len(degs)
    if m == 0:
        return k + 1
    return binomial(k + 1, m + 1) * prod(degs[:-1]) * degs[-1] ** (k - m + 1)


def beta_bound(k, degs):
    degs = degree_sequence(degs)
    return chi_abs_bound(k, degs) + 2 * (k - len(degs) + 1)


# main bounds

def _check_main(d0, k, kprime):
    if not 0 <= kprime <= k:
        raise PreconditionError("need 0 <= kprime <= k")
    if d0 < 1:
        raise PreconditionError("d0 must be positive")


def F(d, d0, k, kprime, j):
    """``C(k+1, k-k'+j+1) (2d0)^(k-k') d^j max(2d0, d)^(k'-j) + 2(k-j+1)``."""
    _check_main(d0, k, kprime)
    if d < 1:
        raise PreconditionError("d must be positive")
    if not 0 <= j <= kprime:
        raise PreconditionError("need 0 <= j <= kprime")
    return (binomial(k + 1, k - kprime + j + 1) * (2 * d0) ** (k - kprime) * d ** j
            * max(2 * d0, d) ** (kprime - j) + 2 * (k - j + 1))


def main_bound_uniform(s, d, d0, k, kprime):
    """``sum_{j<=k'} 4^j C(s+1, j) F(d, d0, k, k', j)``."""
    if s < 0:
        raise PreconditionError("s must be non-negative")
    return sum(4 ** j * binomial(s + 1, j) * F(d, d0, k, kprime, j)
               for j in range(kprime + 1))


def _list_term(degs, d0, k, kprime, top):
    size = len(degs)
    return 4 ** size * (binomial(k + 1, k - kprime + size + 1) * (2 * d0) ** (k - kprime)
                        * prod(degs) * top ** (kprime - size) + 2 * (k - size + 1))


def main_bound_list(dP, d0, k, kprime):
    """Sum over subsets ``I`` of the family with ``|I| <= k'``.

    Each term uses ``d_I = prod_{P in I} d_P`` and
    ``max(2 d0, max_{P in I} d_P)``; for ``I`` empty the maximum is ``2 d0``.
    """
    _check_main(d0, k, kprime)
    dP = [int(d) for d in dP]
    if any(d < 1 for d in dP):
        raise PreconditionError("degrees must be positive")
    cap = limit("subset_cap")
    if len(dP) > cap:
        raise ResourceLimitError(f"subset_cap exceeded: family of {len(dP)} > {cap}")
    total = 0
    for size in range(min(kprime, len(dP)) + 1):
        for sub in combinations(dP, size):
            top = max([2 * d0, *sub])
            total += _list_term(sub, d0, k, kprime, top)
    return total


def main_bound_list_uniform_conventions(s, d, d0, k, kprime):
    """The list form with uniform degrees, re-counted the uniform way.

    Subsets of size ``j`` are counted ``C(s+1, j)`` times and the maximum
    is ``max(2 d0, d)`` even for the empty subset.  Agrees with
    :func:`main_bound_uniform` identically.
    """
    _check_main(d0, k, kprime)
    return sum(binomial(s + 1, j) * _list_term([d] * j, d0, k, kprime, max(2 * d0, d))
               for j in range(kprime + 1))


def bound_consistency(s, d, d0, k, kprime):
    """Compare the two statements of the main bound at uniform degree ``d``.

    ``agree`` is true when the list form over ``s`` polynomials of degree
    ``d`` equals the uniform form.  Otherwise ``flagged`` names the
    documented divergence, provided re-counting the list form with the
    uniform conventions (``C(s+1, j)`` multiplicities, ``max(2 d0, d)``
    for the empty subset) reproduces the uniform value.
    """
    uniform = main_bound_uniform(s, d, d0, k, kprime)
    listed = main_bound_list([d] * s, d0, k, kprime)
    recount = main_bound_list_uniform_conventions(s, d, d0, k, kprime)
    agree = listed == uniform
    reasons = []
    if not agree and recount == uniform:
        if kprime >= 1:
            reasons.append("binomial-convention: C(s+1,j) multiplicity vs C(s,j) subsets")
        if max(2 * d0, d) != 2 * d0:
            reasons.append("empty-subset maximum: max(2d0,d) vs 2d0")
    return {
        "params": {"s": s, "d": d, "d0": d0, "k": k, "kprime": kprime},
        "uniform": uniform,
        "list": listed,
        "list_uniform_conventions": recount,
        "agree": agree,
        "flagged": bool(reasons),
        "reasons": reasons,
        "ok": agree or bool(reasons),
    }


def bpr8_bound(s, d, k, kprime):
    """``sum_{1<=j<=k'} C(s, j) 4^j d (2d-1)^(k-1)``."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    if d < 1 or s < 0 or kprime < 0:
        raise PreconditionError("need d >= 1, s >= 0, kprime >= 0")
    return sum(binomial(s, j) * 4 ** j * d * (2 * d - 1) ** (k - 1)
               for j in range(1, kprime + 1))


def geometric_permutations_bound(n, d, kt):
    """Main factor ``(kt C(2^(kt+1)-2, kt) C(n, kt+1))^(kt(d-kt))``; the rest is ``O(1)^(d^2)``."""
    if not 1 <= kt < d:
        raise PreconditionError("need 1 <= kt < d")
    if n < kt + 1:
        raise PreconditionError("need n >= kt + 1")
    base = kt * binomial(2 ** (kt + 1) - 2, kt) * binomial(n, kt + 1)
    value = base ** (kt * (d - kt))
    return BoundReport("geometric_permutations", value, {"n": n, "d": d, "kt": kt},
                       (f"·O(1)^{d * d}",))


def tight_example_count(s, d, d0, k):
    """``d0 * sum_{i<k} C(sd, i)``."""
    if min(s, d, d0, k) < 1:
        raise PreconditionError("parameters must be positive")
    return d0 * sum(binomial(s * d, i) for i in range(k))


# formats

@dataclass(frozen=True)
class JoinFormat:
    M: int
    Mprime: int
    N: int
    degree: int


def join_format(p, k, a, s, d):
    """Format bounds for the thickened diagonal: ``(M, N)`` additive, ``(M', d+1, N)`` dense."""
    if min(p, k, a, s, d) < 0:
        raise PreconditionError("parameters must be non-negative")
    c = binomial(p + 1, 2)
    M = (p + 1) * (k + a + 2) + 2 * k * c
    Mp = (p + 1) * (s + 2) + 3 * c + 3
    N = (p + 1) * (k + 1) + c
    return JoinFormat(M, Mp, N, d + 1)


@dataclass(frozen=True)
class StarFormat:
    M: int
    N: int
    Mprime: int
    check: bool


def star_format(p, k, a):
    """``M``, ``N``, ``M' = (p+1)(2k+a+3) + (N+M)(M+2)`` and whether ``M' <= 5M^2``."""
    if min(p, k, a) < 0:
        raise PreconditionError("parameters must be non-negative")
    c = binomial(p + 1, 2)
    M = (p + 1) * (6 * k + 6 * a + 1) + 2 * c * (4 * k + 2 * a + 3)
    N = (p + 1) * (2 * k + a + 3) + c
    Mp = (p + 1) * (2 * k + a + 3) + (N + M) * (M + 2)
    return StarFormat(M, N, Mp, Mp <= 5 * M * M)


def main_weak_dimension(k):
    """Ambient dimension of the join at ``p = k + 1``."""
    return (k + 2) * (k + 1) + binomial(k + 2, 2)


def homotopy_exponents(k, a):
    """The three exponent expressions, evaluated with every hidden constant set to 1."""
    if k < 0 or a < 0:
        raise PreconditionError("k and a must be non-negative")
    note = "O(1) constant unspecified; evaluated with constant 1"
    params = {"k": k, "a": a}
    return [
        BoundReport("homotopy_additive_exponent", (k + a) ** 8, params,
                    ("2^{O((k+a)^8)}", note)),
        BoundReport("homotopy_weak_exponent", (k * (k * k + a)) ** 8, params,
                    ("2^{O(k(k^2+a))^8}", note)),
        BoundReport("homotopy_general_exponent", k + a, params,
                    ("2^{(k+a)^{O(1)}}", note)),
    ]


def report(name, value, **params):
    return BoundReport(name, value, params)
