"""Staged construction of a dense sequence adapted to finitely many closed sets.

Given closed sets F_0..F_{I-1} and a globally fixed dense enumeration (q_i),
the builder orders a subset of (q_i) in stages D_0, D_1, ...  Stage i seeds
G_0 = {q_i} and then, for each sigma in the lexicographically ordered
subsets of {0..I-1}, augments G with

    A^F(G) = union over x in G\\F and basic opens W <= m_budget with
             x in W and W meeting F, of the first enumerated q inside W /\\ F

where F is the intersection of the sigma-selected closed sets.  Within a
stage, points whose own sigma-class is lexicographically largest are put
first.  The stage-priority ordering is what later makes paths extracted
from the flattened sequence stay inside each F_i at almost every step.

All truncations (index bounds, scan budgets, per-stage caps) are recorded
in the build log; nothing is silently dropped.  Closed sets are exact:
finite unions of cylinders and singletons on word spaces, finite unions of
closed rational intervals on the unit interval.  Both membership and
"does this basic open meet F" are decided exactly, as is distance to F.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .path import DenseSequence, PathTrace, path_trace
from .space import (
    CANTOR,
    UNIT,
    BasicOpen,
    Cylinder,
    CylinderGoodBasis,
    Dist,
    GoodBasis,
    PointCode,
    RationalInterval,
    UnitGoodBasis,
    UnitPoint,
    WordPoint,
    dist,
)


def _words_comparable(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


@dataclass(frozen=True)
class ClosedSet:
    """Exact closed set: union of cylinders/singletons (word spaces) or of
    closed rational intervals (unit).  Degenerate intervals are points.

    The pruned-tree oracle of a word-space closed set is exact at every
    depth: hits(w) holds iff N_w meets the set.
    """

    space: str
    cylinders: Tuple[Tuple[int, ...], ...] = ()
    singletons: Tuple[WordPoint, ...] = ()
    intervals: Tuple[Tuple[Fraction, Fraction], ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cylinders",
                           tuple(sorted(tuple(w) for w in self.cylinders)))
        object.__setattr__(self, "singletons",
                           tuple(sorted(self.singletons, key=str)))
        ivs = []
        for lo, hi in self.intervals:
            lo, hi = Fraction(lo), Fraction(hi)
            if lo > hi:
                raise ValueError("empty interval piece")
            ivs.append((lo, hi))
        object.__setattr__(self, "intervals", tuple(sorted(ivs)))

    # -- membership / tree oracle ------------------------------------------

    def member(self, p: PointCode) -> bool:
        if isinstance(p, UnitPoint):
            return any(lo <= p.value <= hi for lo, hi in self.intervals)
        return any(p.starts_with(w) for w in self.cylinders) or any(
            p == s for s in self.singletons
        )

    def hits(self, word: Tuple[int, ...]) -> bool:
        """Exact tree oracle: does N_word meet the set?"""
        word = tuple(word)
        return any(_words_comparable(word, w) for w in self.cylinders) or any(
            s.starts_with(word) for s in self.singletons
        )

    def meets(self, W: BasicOpen) -> bool:
        """Exact: is W /\\ F nonempty?"""
        if isinstance(W, Cylinder):
            return self.hits(W.word)
        if isinstance(W, RationalInterval):
            # closed [a,b] meets open (lo,hi) iff b > lo and a < hi
            return any(hi > W.lo and lo < W.hi for lo, hi in self.intervals)
        raise ValueError(f"unsupported basic open {W!r}")

    def is_empty(self) -> bool:
        return not (self.cylinders or self.singletons or self.intervals)

    def dist(self, p: PointCode) -> Dist:
        """Exact distance from a point to the set (infinite if empty)."""
        if self.is_empty():
            return Dist.infinity()
        best: Optional[Dist] = None
        if isinstance(p, UnitPoint):
            for lo, hi in self.intervals:
                gap = max(Fraction(0), lo - p.value, p.value - hi)
                d = Dist.rational(gap)
                best = d if best is None or d < best else best
            return best
        for w in self.cylinders:
            if p.starts_with(w):
                return Dist.zero()
            i = next(i for i, s in enumerate(w) if p.at(i) != s)
            d = Dist.pow2(i)
            best = d if best is None or d < best else best
        for s in self.singletons:
            d = dist(p, s)
            best = d if best is None or d < best else best
        return best

    # -- algebra -------------------------------------------------------------

    def intersect(self, other: "ClosedSet") -> "ClosedSet":
        if self.space != other.space:
            raise ValueError("space mismatch")
        cyl, sing, ivs = [], [], []
        for a in self.cylinders:
            for b in other.cylinders:
                if _words_comparable(a, b):
                    cyl.append(a if len(a) >= len(b) else b)
        for s in self.singletons:
            if other.member(s):
                sing.append(s)
        for s in other.singletons:
            if self.member(s) and s not in sing:
                sing.append(s)
        for lo, hi in self.intervals:
            for lo2, hi2 in other.intervals:
                a, b = max(lo, lo2), min(hi, hi2)
                if a <= b:
                    ivs.append((a, b))
        name = f"{self.name}&{other.name}" if self.name or other.name else ""
        return ClosedSet(self.space, tuple(set(cyl)), tuple(sing), tuple(ivs), name)

    def tree_consistency_violations(self, depth: int, alphabet: int = 2) -> List[str]:
        """Pruned-tree check to a depth: a word hits iff some child hits."""
        problems = []

        def rec(word):
            if len(word) >= depth:
                return
            h = self.hits(word)
            child = any(self.hits(word + (a,)) for a in range(alphabet))
            if h != child:
                problems.append(f"inconsistent at {word}")
            for a in range(alphabet):
                rec(word + (a,))

        rec(())
        return problems

    def __str__(self):
        return self.name or f"ClosedSet({self.space})"


def whole_space(space: str) -> ClosedSet:
    if space == UNIT:
        return ClosedSet(UNIT, intervals=((Fraction(0), Fraction(1)),), name="X")
    return ClosedSet(space, cylinders=((),), name="X")


# ---------------------------------------------------------------------------
# The A^F(G) augmentation
# ---------------------------------------------------------------------------


def _covering_opens(x: PointCode, basis: GoodBasis, m_budget: int):
    """Basic opens W_m containing x with m <= m_budget, ascending m."""
    if isinstance(basis, CylinderGoodBasis):
        length = 0
        while True:
            word = x.prefix(length)
            m = basis.index_of_word(word)
            if m > m_budget:
                return
            yield m, Cylinder(basis.space, word)
            length += 1
    elif isinstance(basis, UnitGoodBasis):
        r = 0
        while basis.scale_block(r).start <= m_budget:
            for k, iv in basis.blocks_containing(r, x.value):
                m = basis.index_of(r, k)
                if m <= m_budget:
                    yield m, iv
            r += 1
    else:  # pragma: no cover
        raise ValueError("unsupported basis")


def a_f_of_g(F: ClosedSet, G: Sequence[PointCode], basis: GoodBasis,
             q_enum: Sequence[PointCode], m_budget: int,
             pick_cache: Optional[dict] = None):
    """One augmentation step.

    For each x in G\\F and each basic open W_m (m <= m_budget) with x in W_m
    and W_m meeting F, picks the first q_i lying in W_m /\\ F.  Returns
    (picks, truncations) where picks are (point, via_m, min_index) in
    deterministic first-found order and truncations record min-index scans
    that exhausted the enumeration.
    """
    cache = pick_cache if pick_cache is not None else {}
    picks: List[Tuple[PointCode, int, int]] = []
    seen = set()
    truncations: List[str] = []
    for x in G:
        if F.member(x):
            continue
        for m, W in _covering_opens(x, basis, m_budget):
            if not F.meets(W):
                continue
            key = (W, F)
            if key in cache:
                found = cache[key]
            else:
                found = None
                for i, q in enumerate(q_enum):
                    if W.member(q) and F.member(q):
                        found = i
                        break
                cache[key] = found
            if found is None:
                truncations.append(f"minidx scan exhausted for W={W} F={F}")
                continue
            pt = q_enum[found]
            if pt not in seen:
                seen.add(pt)
                picks.append((pt, m, found))
    return picks, truncations


# ---------------------------------------------------------------------------
# The staged build
# ---------------------------------------------------------------------------


@dataclass
class StagedDense:
    """Builder output: per-stage blocks plus the flattened dense sequence."""

    space: str
    blocks: List[List[PointCode]]
    sigma_tags: Dict[PointCode, Tuple[int, ...]]
    stage_of: Dict[PointCode, int]
    dense: DenseSequence
    log: List[str] = field(default_factory=list)
    truncations: List[str] = field(default_factory=list)

    def position(self, pt: PointCode) -> Optional[int]:
        return self.dense.first_index_of(pt)


def _sigma_of(x: PointCode, families: Sequence[ClosedSet], width: int) -> Tuple[int, ...]:
    return tuple(1 if families[k].member(x) else 0 for k in range(width))


def _subsets_lex(width: int):
    """All bit strings of the given width in ascending lexicographic order."""
    if width == 0:
        return [()]
    out = []
    for v in range(2 ** width):
        bits = tuple((v >> (width - 1 - j)) & 1 for j in range(width))
        out.append(bits)
    return out


def build_dense(families: Sequence[ClosedSet], q_enum: Sequence[PointCode],
                basis: GoodBasis, *, stages: Optional[int] = None,
                m_budget: int = 30, g_cap: int = 64,
                max_families: int = 8) -> StagedDense:
    """Run the staged construction over a caller-fixed enumeration (q_i).

    The family list is finite (I <= max_families); stage i works with the
    effective sigma width min(i, I) since absent sets act as the whole
    space.  The enumeration is never reordered globally: stages only select
    and order picks, and every q_i enters the sequence at its own stage at
    the latest.
    """
    I = len(families)
    if I > max_families:
        raise ValueError(f"too many closed sets ({I} > {max_families})")
    space = families[0].space if families else q_enum[0].space
    stages = len(q_enum) if stages is None else min(stages, len(q_enum))

    full = whole_space(space)
    inter_cache: Dict[Tuple[int, ...], ClosedSet] = {(): full}

    def f_sigma(bits: Tuple[int, ...]) -> ClosedSet:
        key = tuple(j for j, b in enumerate(bits) if b)
        if key not in inter_cache:
            acc = full
            for j in key:
                acc = acc.intersect(families[j])
            inter_cache[key] = acc
        return inter_cache[key]

    blocks: List[List[PointCode]] = []
    sigma_tags: Dict[PointCode, Tuple[int, ...]] = {}
    stage_of: Dict[PointCode, int] = {}
    flat: List[PointCode] = []
    placed = set()
    log: List[str] = []
    truncations: List[str] = []
    pick_cache: dict = {}

    for i in range(stages):
        seed = q_enum[i]
        width = min(i, I)
        G: List[PointCode] = [seed]
        g_members = {seed}
        log.append(f"stage={i} seed={seed}")
        for bits in _subsets_lex(width):
            F = f_sigma(bits)
            picks, trunc = a_f_of_g(F, list(G), basis, q_enum, m_budget, pick_cache)
            truncations.extend(f"stage={i} {t}" for t in trunc)
            for pt, via_m, min_i in picks:
                if pt in g_members:
                    continue
                if len(G) >= g_cap:
                    truncations.append(f"stage={i} g_cap reached; pick dropped")
                    log.append(f"stage={i} sigma={''.join(map(str, bits))} "
                               f"drop={pt} via m={via_m} minidx={min_i}")
                    continue
                G.append(pt)
                g_members.add(pt)
                log.append(f"stage={i} sigma={''.join(map(str, bits))} "
                           f"pick={pt} via m={via_m} minidx={min_i}")
        fresh = [pt for pt in G if pt not in placed]
        order_width = min(i, I)
        keyed = [(_sigma_of(pt, families, order_width), n, pt)
                 for n, pt in enumerate(fresh)]
        # sigma_{2^i} (lex largest) first, first-appearance order inside a class
        keyed.sort(key=lambda t: (tuple(-b for b in t[0]), t[1]))
        block = [pt for _, _, pt in keyed]
        for pt in block:
            placed.add(pt)
            sigma_tags[pt] = _sigma_of(pt, families, order_width)
            stage_of[pt] = i
        blocks.append(block)
        flat.extend(block)

    dense = DenseSequence(space, flat, tag="staged-builder")
    return StagedDense(space, blocks, sigma_tags, stage_of, dense, log, truncations)


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def approximates_check(dense: DenseSequence, F: ClosedSet,
                       xs: Sequence[PointCode], N: int, basis: GoodBasis,
                       window: int = 32) -> dict:
    """Count path terms outside F for x in F\\D.

    Verdict per point is "finitely many so far" iff the tail window
    [N-window, N] (within the computed steps) is free of violations.
    """
    per_point = []
    for x in xs:
        if not F.member(x):
            raise ValueError(f"{x} is not in F")
        if dense.contains(x):
            raise ValueError(f"{x} is in D")
        trace = path_trace(x, dense, basis, N)
        violations = [(s.step, str(s.point)) for s in trace.steps
                      if not F.member(s.point)]
        tail_start = max(0, len(trace.steps) - window)
        tail_bad = [v for v in violations if v[0] >= tail_start]
        per_point.append({
            "x": str(x),
            "computed_steps": len(trace.steps),
            "terminated": trace.terminated,
            "violations": violations,
            "tail_window_start": tail_start,
            "verdict": "finitely many so far" if not tail_bad else "violations in tail",
        })
    clean = sum(1 for r in per_point if r["verdict"] == "finitely many so far")
    return {"set": str(F), "points": per_point,
            "clean": clean, "total": len(per_point)}


def closed_family_from_function(oracle, budget: int = 16) -> List[ClosedSet]:
    """Flatten a function's declared closed preimage decomposition.

    Every gallery function carries, per value y of its (discrete or finite
    rational) range, a list of closed pieces whose union is f^{-1}({y}).
    The flattening is truncated to the budget with an explicit marker.
    """
    if getattr(oracle, "decomposition", None) is None:
        raise ValueError(f"unknown function spec: {getattr(oracle, 'fid', oracle)!r} "
                         "has no declared decomposition")
    pieces: List[ClosedSet] = []
    for value in sorted(oracle.decomposition, key=str):
        pieces.extend(oracle.decomposition[value])
    if len(pieces) > budget:
        return pieces[:budget]
    return pieces
