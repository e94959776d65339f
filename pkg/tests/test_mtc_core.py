import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from modular_orbifold.families import build_a1_level_k, build_orbifold_u1, build_spin_m_level2, build_u1
from modular_orbifold.mtc_core import (
    FusionRing,
    ModularData,
    ModularDataError,
    NotModularError,
    assemble_modular,
    associativity_defect,
    central_charge_mod8,
    conjugation,
    frobenius_perron_dims,
    global_dimension,
    permute,
    sigma_tilde,
    tensor_product,
    trivial_theory,
    verify,
    verlinde_fusion,
    y_from_fusion,
)


def z_ring(n: int) -> FusionRing:
    N = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            N[i, j, (i + j) % n] = 1
    return FusionRing(tuple(str(k) for k in range(n)), 0, tuple((-k) % n for k in range(n)), N)


def trivial_ring() -> FusionRing:
    return FusionRing(("1",), 0, (0,), np.ones((1, 1, 1), dtype=np.int64))


# --- y_from_fusion ---------------------------------------------------------


def test_y_trivial_ring():
    assert np.allclose(y_from_fusion(trivial_ring(), [1.0], [1.0]), [[1.0]])


def test_y_vacuum_column_is_dims():
    md = build_orbifold_u1(4)
    ring = verlinde_fusion(md)
    Y = y_from_fusion(ring, md.dims, md.twists)
    assert np.allclose(Y[:, 0], md.dims)
    assert np.allclose(Y[0, :], md.dims)


def test_y_u1_2_hand_value():
    Y = y_from_fusion(z_ring(2), [1, 1], [1, 1j])
    assert Y[1, 1] == pytest.approx(-1)


def test_y_length_mismatch():
    with pytest.raises(ModularDataError):
        y_from_fusion(z_ring(2), [1, 1, 1], [1, 1j])


# --- sigma_tilde / assemble_modular ----------------------------------------


def test_sigma_tilde_examples():
    assert sigma_tilde([1.0], [1.0]) == 1
    st = sigma_tilde([1, 1], [1, 1j])
    assert st == pytest.approx(1 - 1j)
    assert abs(st) ** 2 == pytest.approx(2)
    assert sigma_tilde([1, 2, 3], [1, 1, 1]) == pytest.approx(14)


def test_assemble_u1_2():
    md = assemble_modular(z_ring(2), [1, 1], [1, 1j])
    assert md.phaseC == pytest.approx(cmath.exp(-1j * math.pi / 12))
    assert np.allclose(md.S, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert verify(md).passed


def test_assemble_trivial():
    md = assemble_modular(trivial_ring(), [1.0], [1.0])
    assert np.allclose(md.S, [[1]]) and md.phaseC == 1


def test_assemble_orbifold_phase():
    assert build_orbifold_u1(3).phaseC == pytest.approx(cmath.exp(-1j * math.pi / 12))


def test_assemble_degenerate():
    with pytest.raises(ModularDataError):
        assemble_modular(z_ring(2), [1, 1], [1, -1])


@pytest.mark.parametrize("builder,param", [(build_u1, 6), (build_orbifold_u1, 5), (build_spin_m_level2, 4), (build_a1_level_k, 3)])
def test_assemble_round_trip(builder, param):
    md = builder(param)
    ring = verlinde_fusion(md)
    again = assemble_modular(ring, md.dims, md.twists)
    assert np.abs(again.S - md.S).max() < 1e-9
    assert abs(again.phaseC - md.phaseC) < 1e-9
    assert verlinde_fusion(again) == ring


# --- Verlinde formula and conjugation --------------------------------------


def test_verlinde_u1_6_is_z6():
    ring = verlinde_fusion(build_u1(6))
    assert np.array_equal(ring.N, z_ring(6).N)


def test_conjugation_u1_6():
    assert conjugation(build_u1(6)) == tuple((6 - k) % 6 for k in range(6))


def test_spin_4_self_conjugate():
    md = build_spin_m_level2(4)
    assert np.abs(md.S.imag).max() < 1e-12
    assert conjugation(md) == tuple(range(len(md)))


def test_spin_even_j_sigma():
    ring = verlinde_fusion(build_spin_m_level2(4))
    assert ring.product("j_hat", "sigma_1_hat") == {"tau_1_hat": 1}
    assert ring.product("j_hat", "sigma_2_hat") == {"tau_2_hat": 1}


def test_spin_odd_phi_l_powers():
    ring = verlinde_fusion(build_spin_m_level2(3))
    assert ring.product("phi_l1_hat", "phi_l1_hat") == {"j_hat": 1}
    assert ring.product("j_hat", "j_hat") == {"1_hat": 1}  # so (phi_l1)^4 = 1


def test_verlinde_non_integral_reports_index():
    S = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    S = S.astype(complex)
    S[1, 1] *= cmath.exp(0.3j)
    with pytest.raises(NotModularError) as exc:
        verlinde_fusion(ModularData("bad", ("a", "b"), 0, S, [1, 1], 1))
    assert len(exc.value.index) == 3


def test_conjugation_not_permutation():
    S = np.array([[1, 1], [1, 1]]) / math.sqrt(2)
    with pytest.raises(ModularDataError):
        conjugation(ModularData("bad", ("a", "b"), 0, S, [1, 1], 1))


def test_fp_dims_match():
    for md in (build_orbifold_u1(5), build_a1_level_k(4), build_spin_m_level2(6)):
        assert np.allclose(frobenius_perron_dims(verlinde_fusion(md)), md.dims, atol=1e-6)


# --- verify ----------------------------------------------------------------


def test_verify_spin_4_all_pass():
    rep = verify(build_spin_m_level2(4))
    assert rep.passed, rep.table()
    names = {c.name for c in rep.checks}
    for required in ("S unitary", "S symmetric", "T unitary", "TSTST = S", "S^2 = C permutation",
                     "TC = CT", "Y symmetries", "|sigma~|^2 = sum d^2", "Verlinde integrality",
                     "fusion associativity", "dims positive"):
        assert required in names


def test_verify_identity_twists_fail():
    md = build_u1(6).with_twists(np.ones(6))
    rep = verify(md)
    assert not rep.passed
    assert not rep["TSTST = S"].passed


def test_verify_trivial():
    assert verify(trivial_theory()).passed


def test_verify_report_serializable():
    d = verify(build_u1(4)).to_dict()
    assert d["passed"] and len(d["checks"]) >= 11


# --- tensor products, global dimension, central charge ---------------------


def test_tensor_product_global_dimension():
    a, b = build_a1_level_k(2), build_orbifold_u1(3)
    t = tensor_product(a, b)
    assert global_dimension(t) == pytest.approx(global_dimension(a) * global_dimension(b))
    assert verify(t).passed


def test_su2_1_squared():
    a = build_a1_level_k(1)
    assert global_dimension(tensor_product(a, a)) == pytest.approx(4)


def test_tensor_with_trivial():
    a = build_u1(4)
    t = tensor_product(a, trivial_theory())
    assert np.allclose(t.S, a.S) and np.allclose(t.twists, a.twists) and t.phaseC == a.phaseC


def test_global_dimension_examples():
    assert global_dimension(build_u1(8)) == pytest.approx(8, abs=1e-9)
    assert global_dimension(build_orbifold_u1(4)) == pytest.approx(32, abs=1e-9)
    assert global_dimension(trivial_theory()) == 1


def test_central_charge_examples():
    assert central_charge_mod8(build_u1(6)) == 1
    assert central_charge_mod8(build_spin_m_level2(5)) == Fraction(9 % 8)
    assert central_charge_mod8(trivial_theory()) == 0
    assert central_charge_mod8(build_a1_level_k(2)) == Fraction(3, 2)


def test_permute_preserves_verify():
    md = build_orbifold_u1(3)
    order = [0, 2, 1] + list(range(3, len(md)))
    p = permute(md, order)
    assert p.labels[1] == md.labels[2] and verify(p).passed


def test_modular_data_validation():
    with pytest.raises(ModularDataError):
        ModularData("x", ("a", "b"), 0, np.eye(3), [1, 1], 1)
    with pytest.raises(ModularDataError):
        ModularData("x", ("a", "a"), 0, np.eye(2), [1, 1], 1)


def test_fusion_ring_axioms():
    assert z_ring(5).axiom_violations() == []
    N = z_ring(3).N.copy()
    N[1, 2] = [0, 1, 0]
    bad = FusionRing(("0", "1", "2"), 0, (0, 2, 1), N)
    assert bad.axiom_violations()
    assert associativity_defect(z_ring(4).N) == 0
