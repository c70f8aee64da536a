"""Exact computation on the real line and grid sampling in low dimension."""

from .algebraic import AlgebraicPoint, compare, isolate_roots, sign_at_point
from .intervals import (IntervalSet, LinePartition, basic_boolean_algebra, cdd_line,
                        common_refinement, endpoints, is_adapted, is_cdd, is_partition,
                        realize_univariate, sign_condition_census)
from .upoly import sturm_count

__all__ = [
    "AlgebraicPoint", "compare", "isolate_roots", "sign_at_point", "IntervalSet",
    "LinePartition", "basic_boolean_algebra", "cdd_line", "common_refinement",
    "endpoints", "is_adapted", "is_cdd", "is_partition", "realize_univariate",
    "sign_condition_census", "sturm_count",
]
