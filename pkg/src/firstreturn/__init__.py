"""Exact-arithmetic toolkit for recovering functions from dense sequences.

Modules:
  space          exact points, metrics, basic opens, good bases
  path           good-basis path and first-return route extraction
  dense_builder  staged dense-sequence construction for closed families
  recover        recovery diagnostics and G-delta witnesses
  rank           separation rank on finite clopen algebras
  ebc1           equi-Baire-class-one gauge and oscillation checks
  gallery        explicit families, prime encoding, ultrametric demo
  cli            deterministic experiment runner
"""

from .space import (  # noqa: F401
    CANTOR,
    BAIRE,
    UNIT,
    Z,
    Dist,
    UnitPoint,
    WordPoint,
    ZPoint,
    baire_point,
    cantor_point,
    dist,
    eq,
    format_point,
    good_basis,
    member,
    parse_point,
)
from .path import DenseSequence, path_trace, route_trace  # noqa: F401
