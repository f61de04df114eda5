"""Exact representations of the four supported spaces.

Points are finite symbolic objects denoting infinite ones:

* Cantor / Baire points are eventually periodic words ``head . cycle^inf``,
  canonicalized (minimal head, primitive cycle) so that equality of the
  denoted sequences is equality of the stored tuples.
* Unit points are rationals in [0, 1].
* Z points are strictly increasing, divergent sequences of nonnegative
  rationals given by a finite prefix and an affine tail q_n = a*n + b.

Distances are returned exactly: either a rational or a symbolic power
2^(-e) with rational exponent e (the Z metric produces irrational values,
so exponents are compared instead of the powers themselves).

Basic opens are cylinders N_s (Cantor/Baire), open rational intervals
clamped to [0, 1] (unit), and metric balls of radius 2^(-r) (Z).  A good
basis is a fixed total enumeration of basic opens: all cylinders ordered
by length then lexicographically, or interval blocks of shrinking scale.
The unit interval basis has no canonical order in the literature; the one
fixed here is documented on :class:`UnitGoodBasis` and traces depend on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple, Union

CANTOR = "cantor"
BAIRE = "baire"
UNIT = "unit"
Z = "z"

SPACES = (CANTOR, BAIRE, UNIT, Z)


class SpaceMismatch(ValueError):
    """Raised when two values from different spaces are combined."""


def _require_same_space(a, b):
    if a.space != b.space:
        raise SpaceMismatch(f"space mismatch: {a.space} vs {b.space}")


# ---------------------------------------------------------------------------
# Exact distances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Dist:
    """Exact nonnegative distance: 0, a rational, 2^(-e), or +infinity.

    The +infinity sentinel exists for the delta gauge (distance to an empty
    union); it compares greater than everything else.
    """

    kind: str  # "zero" | "rat" | "pow2" | "inf"
    value: Optional[Fraction] = None  # rational value, or exponent e for pow2

    @staticmethod
    def zero() -> "Dist":
        return Dist("zero")

    @staticmethod
    def rational(q) -> "Dist":
        q = Fraction(q)
        if q < 0:
            raise ValueError("distances are nonnegative")
        return Dist("zero") if q == 0 else Dist("rat", q)

    @staticmethod
    def pow2(e) -> "Dist":
        """The value 2^(-e), e rational."""
        return Dist("pow2", Fraction(e))

    @staticmethod
    def infinity() -> "Dist":
        return Dist("inf")

    def is_zero(self) -> bool:
        return self.kind == "zero"

    def is_infinite(self) -> bool:
        return self.kind == "inf"

    def as_fraction(self) -> Fraction:
        """Exact rational value; fails for irrational powers and infinity."""
        if self.kind == "zero":
            return Fraction(0)
        if self.kind == "rat":
            return self.value
        if self.kind == "pow2" and self.value.denominator == 1:
            e = self.value.numerator
            return Fraction(1, 2 ** e) if e >= 0 else Fraction(2 ** (-e))
        raise ValueError(f"not an exact rational: {self}")

    def _cmp(self, other: "Dist") -> int:
        a, b = self, other
        if a.kind == b.kind:
            if a.kind in ("zero", "inf"):
                return 0
            if a.kind == "rat":
                return (a.value > b.value) - (a.value < b.value)
            # pow2: 2^(-e) < 2^(-e') iff e > e'
            return (b.value > a.value) - (b.value < a.value)
        order = {"zero": 0, "rat": 1, "pow2": 1, "inf": 2}
        if order[a.kind] != order[b.kind]:
            return order[a.kind] - order[b.kind]
        # rational vs power of two, both positive
        if a.kind == "pow2":
            return -b._cmp(a)
        # a rational r vs 2^(-e): compare r^den vs 2^(-num) exactly
        r, e = a.value, b.value
        num, den = e.numerator, e.denominator
        lhs = r ** den
        rhs = Fraction(1, 2 ** num) if num >= 0 else Fraction(2 ** (-num))
        return (lhs > rhs) - (lhs < rhs)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __float__(self):
        if self.kind == "zero":
            return 0.0
        if self.kind == "rat":
            return float(self.value)
        if self.kind == "pow2":
            return 2.0 ** (-float(self.value))
        return float("inf")

    def __str__(self):
        if self.kind == "zero":
            return "0"
        if self.kind == "rat":
            return str(self.value)
        if self.kind == "pow2":
            return f"2^(-{self.value})"
        return "inf"


# ---------------------------------------------------------------------------
# Points
# ---------------------------------------------------------------------------


def _primitive_cycle(cycle: Tuple[int, ...]) -> Tuple[int, ...]:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


def _canonical_word(head, cycle):
    cycle = _primitive_cycle(tuple(cycle))
    head = list(head)
    while head and head[-1] == cycle[-1]:
        head.pop()
        cycle = (cycle[-1],) + cycle[:-1]
    return tuple(head), cycle


@dataclass(frozen=True)
class WordPoint:
    """Eventually periodic point of Cantor space (bits) or Baire space (naturals)."""

    space: str
    head: Tuple[int, ...]
    cycle: Tuple[int, ...]

    def __post_init__(self):
        if self.space not in (CANTOR, BAIRE):
            raise ValueError(f"not a word space: {self.space}")
        if not self.cycle:
            raise ValueError("cycle must be nonempty")
        alphabet_ok = all(
            s >= 0 and (self.space != CANTOR or s <= 1)
            for s in tuple(self.head) + tuple(self.cycle)
        )
        if not alphabet_ok:
            raise ValueError("symbol out of alphabet")
        head, cycle = _canonical_word(self.head, self.cycle)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "cycle", cycle)

    def at(self, i: int) -> int:
        if i < len(self.head):
            return self.head[i]
        return self.cycle[(i - len(self.head)) % len(self.cycle)]

    def prefix(self, n: int) -> Tuple[int, ...]:
        return tuple(self.at(i) for i in range(n))

    def starts_with(self, word: Sequence[int]) -> bool:
        return all(self.at(i) == w for i, w in enumerate(word))

    def first_difference(self, other: "WordPoint") -> Optional[int]:
        """Index of the first disagreement, or None if the points are equal."""
        _require_same_space(self, other)
        if self == other:
            return None
        bound = len(self.head) + len(other.head) + _lcm(len(self.cycle), len(other.cycle))
        for i in range(bound + 1):
            if self.at(i) != other.at(i):
                return i
        return None  # pragma: no cover - canonical equality caught above

    def common_prefix_len(self, other: "WordPoint") -> int:
        d = self.first_difference(other)
        if d is None:
            raise ValueError("points are equal; no finite common prefix")
        return d

    def __str__(self):
        return format_point(self)


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


def cantor_point(head: str, cycle: str) -> WordPoint:
    """Cantor point from bit strings, e.g. cantor_point("10", "0") = 10 0^inf."""
    return WordPoint(CANTOR, tuple(int(c) for c in head), tuple(int(c) for c in cycle))


def baire_point(head: Iterable[int], cycle: Iterable[int]) -> WordPoint:
    return WordPoint(BAIRE, tuple(head), tuple(cycle))


@dataclass(frozen=True)
class UnitPoint:
    value: Fraction

    space = UNIT

    def __post_init__(self):
        v = Fraction(self.value)
        if not 0 <= v <= 1:
            raise ValueError("unit point outside [0,1]")
        object.__setattr__(self, "value", v)

    def __str__(self):
        return format_point(self)


@dataclass(frozen=True)
class ZPoint:
    """Strictly increasing divergent sequence of nonnegative rationals.

    Entries: q_n = prefix[n] for n < len(prefix), else a*n + b.  The affine
    tail (a > 0) forces strict increase and divergence.  The prefix is
    trimmed so that entries already matching the tail rule are not stored,
    making equality of denoted sequences equality of fields.
    """

    prefix: Tuple[Fraction, ...]
    a: Fraction
    b: Fraction

    space = Z

    def __post_init__(self):
        prefix = tuple(Fraction(q) for q in self.prefix)
        a, b = Fraction(self.a), Fraction(self.b)
        if a <= 0:
            raise ValueError("tail slope must be positive")
        first = prefix[0] if prefix else b
        if first < 0:
            raise ValueError("entries must be nonnegative")
        for i in range(1, len(prefix)):
            if prefix[i - 1] >= prefix[i]:
                raise ValueError("prefix must be strictly increasing")
        if prefix and prefix[-1] >= a * len(prefix) + b:
            raise ValueError("prefix must stay below the affine tail")
        while prefix and prefix[-1] == a * (len(prefix) - 1) + b:
            prefix = prefix[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def entry(self, n: int) -> Fraction:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.a * n + self.b

    def first_difference(self, other: "ZPoint") -> Optional[int]:
        _require_same_space(self, other)
        if self == other:
            return None
        # Beyond both prefixes the sequences are affine; two distinct affine
        # rules agree at most once, so the first difference shows up within
        # two steps of the longer prefix.
        bound = max(len(self.prefix), len(other.prefix)) + 1
        for n in range(bound + 1):
            if self.entry(n) != other.entry(n):
                return n
        return None  # pragma: no cover

    def __str__(self):
        return format_point(self)


PointCode = Union[WordPoint, UnitPoint, ZPoint]


def eq(p: PointCode, q: PointCode) -> bool:
    """Equality of the denoted infinite objects (decided on canonical forms)."""
    _require_same_space(p, q)
    return p == q


def dist(p: PointCode, q: PointCode) -> Dist:
    """Exact distance in the point's space.

    Cantor/Baire: 2^(-n) at the first disagreement index n; unit: |p - q|;
    Z: 2^(-min(q_n0, q'_n0)) at the first disagreement index n0.
    """
    _require_same_space(p, q)
    if isinstance(p, UnitPoint):
        return Dist.rational(abs(p.value - q.value))
    if isinstance(p, WordPoint):
        d = p.first_difference(q)
        return Dist.zero() if d is None else Dist.pow2(d)
    if isinstance(p, ZPoint):
        n0 = p.first_difference(q)
        if n0 is None:
            return Dist.zero()
        return Dist.pow2(min(p.entry(n0), q.entry(n0)))
    raise TypeError(f"unknown point type {type(p)!r}")


# ---------------------------------------------------------------------------
# Basic opens
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cylinder:
    """N_s = all points extending the finite word s."""

    space: str
    word: Tuple[int, ...]

    def member(self, p: PointCode) -> bool:
        _require_same_space(self, p)
        return p.starts_with(self.word)

    def __str__(self):
        sep = "" if self.space == CANTOR else ","
        return f"N({sep.join(str(s) for s in self.word)})"


@dataclass(frozen=True)
class RationalInterval:
    """Open/half-open rational interval, implicitly intersected with [0,1]."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = True
    hi_open: bool = True

    space = UNIT

    def member(self, p: PointCode) -> bool:
        _require_same_space(self, p)
        v = p.value
        lo_ok = v > self.lo if self.lo_open else v >= self.lo
        hi_ok = v < self.hi if self.hi_open else v <= self.hi
        return lo_ok and hi_ok

    def length(self) -> Fraction:
        return self.hi - self.lo

    def __str__(self):
        lo = "(" if self.lo_open else "["
        hi = ")" if self.hi_open else "]"
        return f"{lo}{self.lo},{self.hi}{hi}"


@dataclass(frozen=True)
class ZBall:
    """Open ball of radius 2^(-radius_exp) around a Z point."""

    center: ZPoint
    radius_exp: Fraction

    space = Z

    def member(self, p: PointCode) -> bool:
        _require_same_space(self, p)
        return dist(p, self.center) < Dist.pow2(self.radius_exp)

    def __str__(self):
        return f"B({self.center}, 2^(-{self.radius_exp}))"


BasicOpen = Union[Cylinder, RationalInterval, ZBall]


def member(p: PointCode, W: BasicOpen) -> bool:
    """Exact membership of a point in a basic open."""
    return W.member(p)


# ---------------------------------------------------------------------------
# Good bases
# ---------------------------------------------------------------------------


class NoGoodBasis(ValueError):
    pass


class CylinderGoodBasis:
    """All cylinders, ordered by word length then lexicographically.

    Cantor: index 0 is the empty word; the length-l block starts at 2^l - 1.
    Baire: the alphabet is truncated to symbols < alphabet_bound (the full
    countable basis cannot be totally ordered by length otherwise); this is
    a documented approximation, and every point fed to the basis is expected
    to use symbols below the bound.
    """

    def __init__(self, space: str, alphabet_bound: Optional[int] = None):
        if space == CANTOR:
            self.base = 2
        elif space == BAIRE:
            self.base = alphabet_bound if alphabet_bound else 8
        else:
            raise ValueError("cylinder basis needs a word space")
        self.space = space

    def _block_start(self, length: int) -> int:
        b = self.base
        return (b ** length - 1) // (b - 1) if b > 1 else length

    def index_of_word(self, word: Sequence[int]) -> int:
        value = 0
        for s in word:
            if s >= self.base:
                raise ValueError(f"symbol {s} outside alphabet bound {self.base}")
            value = value * self.base + s
        return self._block_start(len(word)) + value

    def at(self, m: int) -> Cylinder:
        length = 0
        while self._block_start(length + 1) <= m:
            length += 1
        value = m - self._block_start(length)
        word = []
        for _ in range(length):
            word.append(value % self.base)
            value //= self.base
        return Cylinder(self.space, tuple(reversed(word)))

    def scale_block(self, r: int) -> range:
        """Index range of the cylinders of length r (diameter <= 2^(-r))."""
        return range(self._block_start(r), self._block_start(r + 1))


class UnitGoodBasis:
    """Open rational intervals in shrinking blocks.

    Block r (r = 0, 1, ...) lists the intervals (k*h, k*h + 2h) with
    h = 2^(-r-1), for k = -1 .. 2^(r+1) - 1, clamped to [0,1].  Each block
    covers [0,1] with intervals of length 2^(-r) stepped by half a length,
    so any two points closer than 2^(-r-1) share a block-r interval.
    """

    space = UNIT

    def block_size(self, r: int) -> int:
        return 2 ** (r + 1) + 1

    def _block_start(self, r: int) -> int:
        # sum of block sizes below r: sum(2^(j+1) + 1) = 2^(r+1) - 2 + r
        return 2 ** (r + 1) - 2 + r

    def interval(self, r: int, k: int) -> RationalInterval:
        h = Fraction(1, 2 ** (r + 1))
        return RationalInterval(k * h, k * h + 2 * h)

    def index_of(self, r: int, k: int) -> int:
        return self._block_start(r) + (k + 1)

    def at(self, m: int) -> RationalInterval:
        r = 0
        while self._block_start(r + 1) <= m:
            r += 1
        k = m - self._block_start(r) - 1
        return self.interval(r, k)

    def blocks_containing(self, r: int, v: Fraction):
        """The one or two block-r intervals containing v, as (k, interval)."""
        from math import floor

        h = Fraction(1, 2 ** (r + 1))
        # k*h < v < k*h + 2h  <=>  v/h - 2 < k < v/h
        top = floor(v / h)
        point = UnitPoint(v)
        out = []
        for k in (top - 2, top - 1, top):
            if -1 <= k <= 2 ** (r + 1) - 1:
                iv = self.interval(r, k)
                if iv.member(point):
                    out.append((k, iv))
        return out

    def scale_block(self, r: int) -> range:
        return range(self._block_start(r), self._block_start(r + 1))


GoodBasis = Union[CylinderGoodBasis, UnitGoodBasis]


def good_basis(space: str, alphabet_bound: Optional[int] = None) -> GoodBasis:
    """The fixed good-basis enumeration for a space (none is provided for Z)."""
    if space in (CANTOR, BAIRE):
        return CylinderGoodBasis(space, alphabet_bound)
    if space == UNIT:
        return UnitGoodBasis()
    raise NoGoodBasis("no good basis provided for Z")


# ---------------------------------------------------------------------------
# Textual point syntax
# ---------------------------------------------------------------------------


def format_point(p: PointCode) -> str:
    """Canonical textual form; parse_point(format_point(p)) == p."""
    if isinstance(p, WordPoint):
        if p.space == CANTOR:
            return f"cantor:{''.join(map(str, p.head))}|{''.join(map(str, p.cycle))}"
        head = ",".join(map(str, p.head))
        cycle = ",".join(map(str, p.cycle))
        return f"baire:{head}|{cycle}"
    if isinstance(p, UnitPoint):
        return f"unit:{p.value}"
    if isinstance(p, ZPoint):
        prefix = ",".join(str(q) for q in p.prefix)
        return f"z:[{prefix}];a={p.a};b={p.b}"
    raise TypeError(f"unknown point type {type(p)!r}")


def parse_point(text: str) -> PointCode:
    """Parse the CLI point syntax, e.g. cantor:10|0, unit:1/3, baire:0,2|1,
    z:[1/2,7/4];a=1;b=1/2."""
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == CANTOR:
        head, _, cycle = rest.partition("|")
        if not cycle:
            raise ValueError(f"bad cantor point {text!r} (need head|cycle)")
        return cantor_point(head.strip(), cycle.strip())
    if kind == BAIRE:
        head, _, cycle = rest.partition("|")
        hd = tuple(int(t) for t in head.split(",") if t.strip() != "")
        cy = tuple(int(t) for t in cycle.split(",") if t.strip() != "")
        if not cy:
            raise ValueError(f"bad baire point {text!r} (need head|cycle)")
        return baire_point(hd, cy)
    if kind == UNIT:
        return UnitPoint(Fraction(rest.strip()))
    if kind == Z:
        parts = rest.split(";")
        if len(parts) != 3 or not parts[0].startswith("[") or not parts[0].endswith("]"):
            raise ValueError(f"bad z point {text!r}")
        body = parts[0][1:-1].strip()
        prefix = tuple(Fraction(t) for t in body.split(",")) if body else ()
        kv = {}
        for part in parts[1:]:
            key, _, val = part.partition("=")
            kv[key.strip()] = Fraction(val.strip())
        return ZPoint(prefix, kv["a"], kv["b"])
    raise ValueError(f"unknown space prefix in {text!r}")
