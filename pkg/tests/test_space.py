from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from firstreturn.space import (
    BAIRE,
    CANTOR,
    UNIT,
    Cylinder,
    Dist,
    NoGoodBasis,
    RationalInterval,
    SpaceMismatch,
    UnitPoint,
    WordPoint,
    ZBall,
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


# ---------------------------------------------------------------------------
# equality via canonical forms
# ---------------------------------------------------------------------------


def test_eq_eventually_zero_representations():
    assert eq(cantor_point("", "0"), cantor_point("0", "00"))


def test_eq_unit_identity():
    assert eq(UnitPoint(F(1, 3)), UnitPoint(F(1, 3)))


def test_eq_z_prefix_absorbed_into_tail():
    a = ZPoint((F(1, 2),), 1, F(1, 2))
    b = ZPoint((), 1, F(1, 2))
    assert eq(a, b)
    # same ten initial terms
    assert [a.entry(n) for n in range(10)] == [b.entry(n) for n in range(10)]


def test_eq_space_mismatch():
    with pytest.raises(SpaceMismatch):
        eq(cantor_point("", "0"), baire_point((), (0,)))


def test_canonical_head_is_minimal():
    p = cantor_point("0110", "10")  # 0,1,1,0,1,0,... = 01 (10)^inf
    q = cantor_point("011", "01")
    assert p == q
    assert p.head == (0, 1) and p.cycle == (1, 0)


@given(
    head=st.lists(st.integers(0, 1), max_size=5),
    cycle=st.lists(st.integers(0, 1), min_size=1, max_size=4),
    shift=st.integers(0, 6),
)
def test_canonical_form_invariant_under_unrolling(head, cycle, shift):
    # pushing k cycle symbols into the head denotes the same sequence
    head, cycle = tuple(head), tuple(cycle)
    p = WordPoint(CANTOR, head, cycle)
    unrolled_head = head + tuple(cycle[i % len(cycle)] for i in range(shift))
    rotated = tuple(cycle[(i + shift) % len(cycle)] for i in range(len(cycle)))
    q = WordPoint(CANTOR, unrolled_head, rotated)
    assert p == q
    assert [p.at(i) for i in range(12)] == [q.at(i) for i in range(12)]


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def test_dist_z_first_difference_value():
    q = ZPoint((), 1, F(1, 2))  # n + 1/2
    qp = ZPoint((F(1, 2), F(7, 4)), 1, F(1, 2))
    assert dist(q, qp) == Dist.pow2(F(3, 2))


def test_dist_cantor_equal_and_first_disagreement():
    assert dist(cantor_point("", "0"), cantor_point("", "0")).is_zero()
    assert dist(cantor_point("1", "0"), cantor_point("", "1")) == Dist.pow2(1)


def test_dist_unit_absolute_difference():
    assert dist(UnitPoint(F(1, 4)), UnitPoint(F(2, 3))) == Dist.rational(F(5, 12))


def test_dist_comparisons_exact():
    assert Dist.pow2(F(3, 2)) < Dist.pow2(1)
    assert Dist.rational(F(1, 3)) < Dist.pow2(F(3, 2))  # 1/3 < 2^-1.5 ~ 0.3535
    assert Dist.pow2(F(3, 2)) < Dist.rational(F(3, 8))
    assert Dist.zero() < Dist.rational(F(1, 10 ** 9)) < Dist.infinity()


_ZPOINTS = [
    ZPoint((), 1, F(1, 2)),
    ZPoint((), 1, F(1, 4)),
    ZPoint((F(1, 2), F(7, 4)), 1, F(1, 2)),
    ZPoint((F(1, 8),), 1, F(3, 4)),
    ZPoint((), 2, F(1, 3)),
    ZPoint((F(0), F(3, 4)), 1, F(1, 2)),
    ZPoint((F(1, 3), F(2, 3)), F(1, 2), F(5, 6)),
]


@pytest.mark.parametrize("i", range(len(_ZPOINTS)))
@pytest.mark.parametrize("j", range(len(_ZPOINTS)))
def test_z_metric_identity_and_symmetry(i, j):
    x, y = _ZPOINTS[i], _ZPOINTS[j]
    d = dist(x, y)
    assert d == dist(y, x)
    assert d.is_zero() == eq(x, y)


def test_z_ultrametric_inequality_exhaustive_sample():
    for x in _ZPOINTS:
        for y in _ZPOINTS:
            for z in _ZPOINTS:
                dxz = dist(x, z)
                m = max(dist(x, y), dist(y, z))
                assert dxz <= m


@st.composite
def cantor_points(draw):
    head = tuple(draw(st.lists(st.integers(0, 1), max_size=4)))
    cycle = tuple(draw(st.lists(st.integers(0, 1), min_size=1, max_size=3)))
    return WordPoint(CANTOR, head, cycle)


@given(x=cantor_points(), y=cantor_points(), z=cantor_points())
@settings(max_examples=150)
def test_cantor_ultrametric(x, y, z):
    assert dist(x, z) <= max(dist(x, y), dist(y, z))
    assert dist(x, y) == dist(y, x)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def test_member_examples():
    assert not member(cantor_point("", "0"), Cylinder(CANTOR, (0, 1)))
    assert member(UnitPoint(F(1, 2)), RationalInterval(F(1, 4), F(3, 4)))
    q = ZPoint((), 1, F(1, 2))
    qp = ZPoint((F(1, 2), F(7, 4)), 1, F(1, 2))
    assert member(q, ZBall(qp, F(1)))  # 2^-3/2 < 2^-1
    assert not member(q, ZBall(qp, F(2)))


# ---------------------------------------------------------------------------
# good bases
# ---------------------------------------------------------------------------


def test_cantor_enumeration_first_indices(cantor_basis):
    assert cantor_basis.at(0).word == ()
    assert cantor_basis.at(1).word == (0,)
    assert cantor_basis.at(2).word == (1,)
    assert cantor_basis.at(3).word == (0, 0)
    for m in range(40):
        assert cantor_basis.index_of_word(cantor_basis.at(m).word) == m


def test_cylinder_nesting_gives_good_basis_property(cantor_basis):
    # U = N(1), x = 1^inf: all cylinders containing x from the length-1
    # block on are subsets of U
    x = cantor_point("", "1")
    U = Cylinder(CANTOR, (1,))
    m0 = cantor_basis.scale_block(1).start
    for m in range(m0, m0 + 126):
        W = cantor_basis.at(m)
        if member(x, W):
            assert len(W.word) >= 1 and x.starts_with(W.word[:1])
            assert W.word[0] == 1  # hence N_w subset of N_1


def test_unit_block_one_covers_each_point(unit_basis):
    for v in (F(0), F(1, 3), F(1, 2), F(99, 100), F(1)):
        hits = unit_basis.blocks_containing(1, v)
        assert hits, v
        for _, iv in hits:
            assert iv.length() == F(1, 2)
            assert member(UnitPoint(v), iv)


def test_unit_index_round_trip(unit_basis):
    for m in range(60):
        iv = unit_basis.at(m)
        # recover (r, k) from the interval and check the index
        r = 0
        while iv.length() != F(1, 2 ** r):
            r += 1
        k = iv.lo / F(1, 2 ** (r + 1))
        assert unit_basis.index_of(r, int(k)) == m


def test_good_basis_finite_horizon_check(cantor_basis, unit_basis):
    # For each space, a sample open U, a sample x in U: find m0 and verify
    # the Def-1 property over [m0, m0 + H].
    H = 200
    x = cantor_point("10", "1")
    m0 = cantor_basis.scale_block(2).start
    for m in range(m0, m0 + H):
        W = cantor_basis.at(m)
        if member(x, W):
            assert W.word[:2] == (1, 0)  # inside U = N(10)
    xv = UnitPoint(F(1, 3))
    # U = (1/4, 1/2); intervals of length <= 1/16 containing x sit inside U
    m0 = unit_basis.scale_block(4).start
    for m in range(m0, m0 + H):
        iv = unit_basis.at(m)
        if member(xv, iv):
            assert iv.lo > F(1, 4) and iv.hi < F(1, 2)


def test_no_good_basis_for_z():
    with pytest.raises(NoGoodBasis):
        good_basis("z")


def test_baire_alphabet_bound_documented():
    b = good_basis(BAIRE, alphabet_bound=3)
    assert b.at(1).word == (0,)
    assert b.at(3).word == (2,)
    with pytest.raises(ValueError):
        b.index_of_word((5,))


# ---------------------------------------------------------------------------
# point syntax
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("text", [
    "cantor:10|0", "cantor:|110", "unit:1/3", "unit:0",
    "z:[1/2,7/4];a=1;b=1/2", "z:[];a=2;b=1/3", "baire:0,2|1", "baire:|3",
])
def test_parse_format_round_trip(text):
    p = parse_point(text)
    assert parse_point(format_point(p)) == p


def test_parse_rejects_garbage():
    for bad in ("cantor:10", "unit:x", "z:[1];a=1", "nowhere:1"):
        with pytest.raises(ValueError):
            parse_point(bad)


def test_zpoint_invariants_enforced():
    with pytest.raises(ValueError):
        ZPoint((F(2), F(1)), 1, F(1, 2))  # not increasing
    with pytest.raises(ValueError):
        ZPoint((F(5),), 1, F(1, 2))  # prefix above tail
    with pytest.raises(ValueError):
        ZPoint((), -1, F(1, 2))  # nonpositive slope
