"""Shared numeric tolerances.

EPS_GEOM drives geometric predicates and vertex deduplication; EPS_CHECK is
the looser tolerance used when comparing quantities across independently
computed routes (containments, Hausdorff ratios, theorem margins). Both are
absolute at unit scale and get multiplied by a local coordinate scale where
it matters.
"""

EPS_GEOM = 1e-9
EPS_CHECK = 1e-7

# Last-ulp guard for comparisons that should be "exact up to roundoff":
# far below EPS_GEOM so it never masks a real geometric disagreement.
EPS_TIGHT = 1e-13
