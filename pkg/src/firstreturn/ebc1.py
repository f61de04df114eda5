"""Equi-Baire-class-one machinery: the delta gauge built from an ordered
closed cover and the oscillation check it controls.

Given an ordered cover (G_0, ..., G_{M-1}) by closed pieces on which every
function of the family has small image diameter, the gauge at x is the
exact distance from x to the union of the pieces preceding the first one
containing x (an infinity sentinel when that union is empty: the gauge
must be strictly positive, and the sentinel wins every min comparison).
Whenever two points are closer than both their gauge values, neither can
lie in the other's earlier union, so their first-cover indices agree and
both sit in the same piece; the family's oscillation between them is then
below epsilon.  The check asserts exactly that implication, pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .dense_builder import ClosedSet
from .recover import DISCRETE, FunctionOracle
from .space import Dist, PointCode, dist


class CoverViolation(ValueError):
    pass


@dataclass
class ClosedCover:
    """Ordered list of exact closed pieces; order matters for the gauge."""

    eps: Fraction
    pieces: List[ClosedSet]
    space: str

    def uncovered(self, probes: Sequence[PointCode]) -> List[PointCode]:
        return [p for p in probes if not any(g.member(p) for g in self.pieces)]


@dataclass
class DeltaResult:
    x: PointCode
    index: int  # m^eps(x): least cover index containing x
    delta: Dist  # distance to the union of earlier pieces; infinite if none


def delta_from_cover(cover: ClosedCover, x: PointCode) -> DeltaResult:
    m = next((i for i, g in enumerate(cover.pieces) if g.member(x)), None)
    if m is None:
        raise CoverViolation(f"cover violation at {x}")
    if m == 0:
        return DeltaResult(x, 0, Dist.infinity())
    delta = min(cover.pieces[r].dist(x) for r in range(m))
    return DeltaResult(x, m, delta)


def y_distance(f: FunctionOracle, v1, v2) -> Fraction:
    if f.y_kind == DISCRETE:
        return Fraction(0) if v1 == v2 else Fraction(1)
    return abs(Fraction(v1) - Fraction(v2))


def ebc1_check(family: Sequence[FunctionOracle], cover: ClosedCover,
               pairs: Sequence[Tuple[PointCode, PointCode]]) -> dict:
    """Pairwise oscillation check under the gauge constraint.

    For each pair with d(x, x') < min(delta(x), delta(x')): asserts the
    first-cover indices agree, that neither point meets the other's earlier
    union, and that every family member moves by less than eps.  Pairs not
    meeting the constraint are skipped (counted).
    """
    eps = cover.eps
    violations: List[dict] = []
    constrained = 0
    for x, xp in pairs:
        dx, dxp = delta_from_cover(cover, x), delta_from_cover(cover, xp)
        d = dist(x, xp)
        bound = dx.delta if dx.delta < dxp.delta else dxp.delta
        if not d < bound:
            continue
        constrained += 1
        problems = []
        if dx.index != dxp.index:
            problems.append(f"indices differ: {dx.index} vs {dxp.index}")
        if any(cover.pieces[r].member(xp) for r in range(dx.index)):
            problems.append("x' meets an earlier piece of x")
        if any(cover.pieces[r].member(x) for r in range(dxp.index)):
            problems.append("x meets an earlier piece of x'")
        for f in family:
            osc = y_distance(f, f(x), f(xp))
            if not osc < eps:
                problems.append(f"{f.fid}: oscillation {osc} >= {eps}")
        if problems:
            violations.append({"x": str(x), "x'": str(xp), "problems": problems})
    return {
        "eps": str(eps),
        "pairs": len(pairs),
        "constrained": constrained,
        "violations": violations,
        "ok": not violations,
    }


def cover_from_function(f: FunctionOracle, eps: Fraction,
                        space: str) -> ClosedCover:
    """Cover by the declared closed preimage pieces, one group per range
    value (a point cover of the range by eps/2 balls); each piece has image
    diameter zero, hence below eps by construction."""
    if f.decomposition is None:
        raise CoverViolation(f"missing decomposition for {f.fid}")
    pieces: List[ClosedSet] = []
    for value in sorted(f.decomposition, key=str):
        pieces.extend(f.decomposition[value])
    return ClosedCover(Fraction(eps), pieces, space)


def piece_image_diameter(f: FunctionOracle, piece: ClosedSet,
                         probes: Sequence[PointCode]) -> Optional[Fraction]:
    """Probe-grid estimate of diam(f[piece]); None if no probe lands in it."""
    values = [f(p) for p in probes if piece.member(p)]
    if not values:
        return None
    worst = Fraction(0)
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            worst = max(worst, y_distance(f, values[i], values[j]))
    return worst
