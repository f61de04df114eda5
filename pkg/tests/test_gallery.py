from fractions import Fraction as F

import pytest

from firstreturn.gallery import (
    E24_member,
    E27_member,
    I16,
    I25,
    PsiBudgetExceeded,
    Thm13Report,
    density_report,
    e24_section_size,
    in_G,
    in_S,
    is_P_f,
    is_P_inf,
    pf_decomposition,
    phi_encode,
    prop12_distance,
    prop12_expected,
    prop12_point,
    psi27,
    thm13_demo,
    thm13_dense,
    thm13_target,
    x_seq_point,
    z_F_member,
)
from firstreturn.space import WordPoint, ZPoint, cantor_point, dist, eq

CP = cantor_point


# ---------------------------------------------------------------------------
# word predicates
# ---------------------------------------------------------------------------


def test_S_membership():
    assert in_S(()) and in_S((1,)) and in_S((0, 1)) and in_S((1, 1))
    assert not in_S((0,)) and not in_S((1, 0))


def test_P_inf_and_P_f_on_cycles():
    assert is_P_inf(CP("", "1")) and is_P_inf(CP("0", "01"))
    assert is_P_f(CP("", "0")) and is_P_f(CP("1011", "0"))


def test_G_requires_adjacent_ones_cofinally():
    assert in_G(CP("", "1"))
    assert in_G(CP("", "110"))
    assert in_G(CP("0", "11"))
    assert in_G(CP("", "101101"))  # wraps: ...01 10...
    assert not in_G(CP("", "10"))
    assert not in_G(CP("11", "0"))  # only finitely many pairs
    assert not in_G(CP("", "100"))


def test_pf_decomposition_gives_the_S_word():
    assert pf_decomposition(CP("", "0")) == ()
    assert pf_decomposition(CP("1011", "0")) == (1, 0, 1, 1)
    with pytest.raises(ValueError):
        pf_decomposition(CP("", "1"))


# ---------------------------------------------------------------------------
# prime encoding and psi
# ---------------------------------------------------------------------------


def test_phi_values():
    assert phi_encode(()) == 0
    assert phi_encode((1,)) == 4
    assert phi_encode((0, 1)) == 18
    assert phi_encode((1, 1)) == 36
    assert phi_encode((0, 0, 1)) == 2 * 3 * 25


def test_psi_first_entries(psi_table):
    assert [psi_table.psi(n) for n in range(4)] == [(), (1,), (0, 1), (1, 1)]


def test_psi_inverse_round_trip(psi_table):
    for n in range(0, psi_table.size, 97):
        assert psi_table.psi_inv(psi_table.psi(n)) == n
    with pytest.raises(PsiBudgetExceeded):
        psi_table.psi(psi_table.size)
    with pytest.raises(ValueError):
        psi_table.psi_inv((1, 0))  # not in S


def test_psi_monotone_under_strict_extension(psi_table):
    assert psi_table.psi_inv((1,)) < psi_table.psi_inv((1, 1))
    for n in range(0, psi_table.size, 131):
        t = psi_table.psi(n)
        for cut in range(len(t)):
            s = t[:cut]
            if in_S(s):
                assert psi_table.psi_inv(s) < n


def test_x_seq_examples():
    assert x_seq_point(0) == CP("", "1")
    assert x_seq_point(1) == CP("", "0")
    assert x_seq_point(2) == CP("", "1")  # duplicate of x_0
    assert x_seq_point(3) == CP("1", "0")
    assert x_seq_point(4) == CP("01", "1")


# ---------------------------------------------------------------------------
# the function families
# ---------------------------------------------------------------------------


def test_I16_values():
    assert I16(CP("", "1"))(CP("", "01")) == 0  # beta has infinitely many 1s
    assert I16(CP("", "1"))(CP("1", "0")) == 1
    assert I16(CP("", "0"))(CP("1", "0")) == 0
    assert I16(CP("", "0"))(CP("", "0")) == 1  # the zero point always maps to 1


def test_I16_injective_on_split_pairs():
    # alpha and alpha' splitting at n with alpha(n) = 0: the witness point
    # alpha|n.10^inf separates the two functions
    pairs = [(CP("0", "01"), CP("1", "01")), (CP("10", "0"), CP("11", "0")),
             (CP("010", "1"), CP("011", "1"))]
    for a, ap in pairs:
        n = a.common_prefix_len(ap)
        lo, hi = (a, ap) if a.at(n) == 0 else (ap, a)
        beta = WordPoint("cantor", lo.prefix(n) + (1,), (0,))
        assert I16(lo)(beta) == 0
        assert I16(hi)(beta) == 1


def test_I25_values():
    assert I25(CP("", "10"))(CP("", "01")) == 1  # beta in P_inf
    assert I25(CP("110", "0"))(CP("1", "0")) == 0  # alpha extends 11
    assert I25(CP("100", "0"))(CP("1", "0")) == 1
    assert I25(CP("", "1"))(CP("", "1")) == 1


def test_E24_membership():
    a, b0 = CP("0", "01"), CP("", "01")
    assert E24_member(b0, a)  # beta in P_inf
    assert E24_member(CP("1", "0"), CP("", "0"))  # alpha outside N(1)
    assert E24_member(CP("1", "0"), CP("10", "1"))  # alpha in N(10)
    assert not E24_member(CP("1", "0"), CP("11", "0"))  # alpha in N(11)


def test_E24_sections_grow_exactly_on_G():
    inside = CP("", "110")  # in G
    outside = CP("", "10")  # infinitely many 1s but no adjacent pair
    assert in_G(inside) and not in_G(outside)
    assert e24_section_size(inside, 64) > e24_section_size(inside, 32)
    assert e24_section_size(outside, 64) == e24_section_size(outside, 32)


def test_E27_membership(psi_table):
    zero = CP("", "0")
    assert E27_member(CP("01", "10"), zero)  # alpha = 0^inf
    assert psi27(1) == CP("1", "0")
    assert not E27_member(psi27(1), CP("01", "1"))  # p = 1 branch excluded
    assert E27_member(CP("11", "0"), CP("01", "1"))
    assert E27_member(psi27(1), CP("001", "1"))  # p = 2: different psi point


# ---------------------------------------------------------------------------
# the ultrametric space Z
# ---------------------------------------------------------------------------


def test_z_F_membership_cases():
    assert z_F_member(ZPoint((), 1, F(1, 2)))
    assert not z_F_member(ZPoint((F(3, 2),), 1, F(1)))  # q_0 >= 1
    assert not z_F_member(ZPoint((), 2, F(0)))  # slope 2 escapes
    assert not z_F_member(ZPoint((), 1, F(0)))  # boundary b = 0
    assert z_F_member(thm13_target())


def test_prop12_distances_exact_and_decreasing():
    prev = None
    for n in range(21):
        d = prop12_distance(n)
        assert d == prop12_expected(n)
        if prev is not None:
            assert d < prev
        assert Dist_half_lt(d)
        prev = d


def Dist_half_lt(d):
    from firstreturn.space import Dist

    return Dist.pow2(1) < d  # 2^-1 < d, infimum not attained


def test_thm13_dense_is_probed_dense():
    dense = thm13_dense()
    target = thm13_target()
    rep = density_report(dense, [target], scales=(1, 2, 3))
    assert all(r["index"] is not None for r in rep)


def test_thm13_demo_small_horizon_still_flips():
    rep = thm13_demo(horizon=150, after_step=20)
    assert isinstance(rep, Thm13Report)
    assert rep.found and rep.flips_after >= 5
    assert any(c.get("skipped") == "x in D" for c in rep.candidates)
    assert rep.positive_control["verdict"].startswith("converged")


def test_thm13_ladder_membership_alternates():
    dense = thm13_dense(ladder=10, approach_depth=10)
    flags = [z_F_member(dense[k]) for k in range(10)]
    assert flags == [True, False] * 5
