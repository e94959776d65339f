import cmath
import math

import numpy as np
import pytest

from modular_orbifold.families import (
    FAMILIES,
    CalibrationError,
    FamilyError,
    build_a1_level_k,
    build_family,
    build_orbifold_u1,
    build_spin_m_level2,
    build_su_m_level1,
    build_u1,
    check_fusion_relations,
    sector_names,
    spin_level2_table,
    twist_calibration,
)
from modular_orbifold.mtc_core import conjugation, global_dimension, twist_vector, verify, verlinde_fusion
from fractions import Fraction


def test_u1_entries():
    md = build_u1(6)
    assert abs(md.entry("2", "3")) == pytest.approx(1 / math.sqrt(6))
    assert md.entry("2", "3") == pytest.approx(1 / math.sqrt(6))


def test_u1_2_equals_a1_1():
    a, b = build_u1(2), build_a1_level_k(1)
    assert np.abs(a.S - b.S).max() < 1e-12
    assert np.abs(a.twists - b.twists).max() < 1e-12
    assert abs(a.phaseC - b.phaseC) < 1e-12


@pytest.mark.parametrize("n", [0, 3, -2])
def test_u1_bad(n):
    with pytest.raises(FamilyError):
        build_u1(n)


def test_su_level1():
    md = build_su_m_level1(3)
    assert len(md) == 6 and global_dimension(md) == pytest.approx(6)
    assert np.allclose(md.S[0], 1 / math.sqrt(6))
    assert conjugation(md) == tuple((6 - k) % 6 for k in range(6))
    assert verify(md).passed


def test_su_level1_matches_u1_fusion_and_dims():
    su, u = build_su_m_level1(4), build_u1(8)
    assert np.array_equal(verlinde_fusion(su).N, verlinde_fusion(u).N)
    assert np.allclose(su.dims, u.dims)


def test_spin_l3_entries():
    md = build_spin_m_level2(3)
    assert md.entry("1_hat", "sigma_1_hat") == pytest.approx(1 / (2 * math.sqrt(2)))
    assert md.entry("sigma_1_hat", "sigma_1_hat") == pytest.approx((1 + 1j) / 4)
    assert global_dimension(md) == pytest.approx(24)


@pytest.mark.parametrize("l", range(3, 9))
def test_spin_and_orbifold_share_s(l):
    s, o = build_spin_m_level2(l), build_orbifold_u1(l)
    assert np.array_equal(s.S, o.S)
    assert len(s) == len(o) == l + 7
    assert s.labels == tuple(sector_names(l, hat=True)) and o.labels == tuple(sector_names(l))


@pytest.mark.parametrize("l", range(3, 9))
def test_orbifold_dims_and_twists(l):
    md = build_orbifold_u1(l)
    assert np.allclose(md.dims, [1, 1, 1, 1] + [2] * (l - 1) + [math.sqrt(l)] * 4)
    assert md.twists[md.index("tau_1")] == pytest.approx(-md.twists[md.index("sigma_1")])
    assert md.twists[md.index("sigma_1")] == pytest.approx(cmath.exp(1j * math.pi / 8))


def test_cosine_variant_recorded():
    notes = [str(n) for n in build_spin_m_level2(5).report]
    assert any("4cos(pi k k'/l)" in n and "2l" in n for n in notes)


def test_cosine_2l_not_unitary():
    for l in range(3, 7):
        S = spin_level2_table(l, 2) / math.sqrt(8 * l)
        assert np.abs(S @ S.conj().T - np.eye(l + 7)).max() > 0.1


def test_conventional_b_sign_breaks_fusion_facts():
    for l in (3, 4):
        S = spin_level2_table(l, 1, +1) / math.sqrt(8 * l)
        from modular_orbifold.mtc_core import ModularData

        md = ModularData("x", tuple(sector_names(l)), 0, S, np.ones(l + 7), 1)
        assert check_fusion_relations(md, l)


def test_orbifold_l2_variant():
    md = build_orbifold_u1(2)
    assert len(md) == 9 and verify(md).passed


def test_a1_level2_ising():
    md = build_a1_level_k(2)
    assert np.allclose(md.dims, [1, math.sqrt(2), 1])
    assert global_dimension(md) == pytest.approx(4)
    ring = verlinde_fusion(md)
    assert ring.product("spin_1/2", "spin_1/2") == {"spin_0": 1, "spin_1": 1}


def test_calibration_u1_6():
    md = build_u1(6)
    cands = [twist_vector([Fraction(k * k, 12) for k in range(6)]), twist_vector([Fraction(k * k, 24) for k in range(6)])]
    idx, rep = twist_calibration(md.S, cands)
    assert idx == 0 and len(rep.results) == 2 and not rep.results[1].passed


def test_calibration_single():
    md = build_a1_level_k(3)
    idx, _ = twist_calibration(md.S, [md.twists])
    assert idx == 0


def test_calibration_no_winner():
    with pytest.raises(CalibrationError) as exc:
        twist_calibration(build_u1(6).S, [np.ones(6)])
    assert len(exc.value.report.results) == 1


def test_calibration_multiple_winners():
    md = build_u1(4)
    with pytest.raises(CalibrationError):
        twist_calibration(md.S, [md.twists, md.twists])


def test_dispatcher():
    assert set(FAMILIES) == {"u1", "su_level1", "spin_level2", "orbifold_u1", "a1"}
    assert len(build_family("orbifold_u1", 3)) == 10
    with pytest.raises(FamilyError):
        build_family("nope", 3)
    with pytest.raises(FamilyError):
        build_family("spin_level2", 2)
