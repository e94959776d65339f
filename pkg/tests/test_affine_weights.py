from fractions import Fraction

import pytest

from modular_orbifold.affine_weights import (
    AffineWeight,
    CosetLabel,
    WeightError,
    apply_word,
    automorphism_group,
    conformal_weight,
    diagram_automorphism,
    enumerate_coset_labels,
    enumerate_weights,
    orbifold_coset_labels,
    orbit_of,
    orbits,
    simple_current_action,
    spin_level2_weights,
    su_level1_conformal_weight,
)


def W(l, **terms):
    return AffineWeight.from_terms(l, {int(k[1:]): v for k, v in terms.items()})


def test_level_one_l4():
    ws = enumerate_weights(4, 1)
    assert {w.coeffs for w in ws} == {W(4, L0=1).coeffs, W(4, L1=1).coeffs, W(4, L3=1).coeffs, W(4, L4=1).coeffs}


def test_level_two_l3_count():
    assert len(enumerate_weights(3, 2)) == 10


@pytest.mark.parametrize("l", range(3, 9))
def test_level_two_count(l):
    ws = enumerate_weights(l, 2)
    assert len(ws) == l + 7
    assert ws == sorted(ws, key=lambda w: w.coeffs)
    assert all(w.level == 2 for w in ws)


def test_enumerate_errors():
    with pytest.raises(WeightError):
        enumerate_weights(2, 1)


def test_as_on_lambda0():
    for l in (4, 5):
        assert diagram_automorphism("s", W(l, L0=1)) == AffineWeight.from_terms(l, {l: 1})


def test_av_even():
    assert diagram_automorphism("v", W(4, L1=2)) == W(4, L0=2)


def test_av_odd_rejected():
    with pytest.raises(WeightError):
        diagram_automorphism("v", W(5, L0=1))


def test_as_order_four_odd():
    l = 5
    seq = [W(l, L0=1)]
    for _ in range(4):
        seq.append(diagram_automorphism("s", seq[-1]))
    assert [w.coeffs for w in seq] == [
        W(l, L0=1).coeffs,
        AffineWeight.from_terms(l, {l: 1}).coeffs,
        W(l, L1=1).coeffs,
        AffineWeight.from_terms(l, {l - 1: 1}).coeffs,
        W(l, L0=1).coeffs,
    ]


@pytest.mark.parametrize("l", range(3, 9))
def test_group_structure(l):
    g = automorphism_group(l)
    assert g.structure == ("Z2xZ2" if l % 2 == 0 else "Z4")
    assert len(g) == 4
    ws = enumerate_weights(l, 2)
    images = {e: tuple(g.act(e, w) for w in ws) for e in g.elements}
    assert len(set(images.values())) == 4  # faithful
    for e in g.elements:
        assert sorted(images[e]) == ws  # permutes the weights
    if l % 2 == 0:
        for e in g.elements:
            assert all(apply_word(e + e, w) == w for w in ws)
    else:
        assert any(apply_word("ss", w) != w for w in ws)
        assert all(apply_word("ssss", w) == w for w in ws)


def test_group_errors():
    with pytest.raises(WeightError):
        automorphism_group(2)


def test_conformal_weights():
    l = 6
    assert conformal_weight(W(l, L0=2), 2) == 0
    assert conformal_weight(W(l, L1=1), 1) == Fraction(1, 2)
    assert conformal_weight(AffineWeight.from_terms(l, {l: 1}), 1) == Fraction(l, 8)
    assert conformal_weight(AffineWeight.from_terms(l, {l - 1: 1}), 1) == Fraction(l, 8)


def test_conformal_weight_level_mismatch():
    with pytest.raises(WeightError):
        conformal_weight(W(4, L0=1), 2)


def test_su_weights():
    assert su_level1_conformal_weight(1, 6) == Fraction(5, 12)
    assert su_level1_conformal_weight(0, 6) == 0


@pytest.mark.parametrize("l", range(3, 9))
def test_coset_orbits(l):
    labels = enumerate_coset_labels(l)
    g = automorphism_group(l)
    orbs = orbits(labels, g)
    assert len(labels) == 4 * (l + 7)
    assert len(orbs) == l + 7
    assert all(len(o) == 4 for o in orbs)
    for o in orbs:
        assert o.representative == min(o.members, key=CosetLabel.key)


def test_orbits_not_closed():
    labels = enumerate_coset_labels(3)[:1]
    with pytest.raises(WeightError):
        orbits(labels, automorphism_group(3))


@pytest.mark.parametrize("l", range(3, 9))
def test_named_sectors(l):
    named = spin_level2_weights(l)
    assert set(named.values()) == set(enumerate_weights(l, 2))
    cos = orbifold_coset_labels(l)
    assert len({orbit_of(c, automorphism_group(l)).representative for c in cos.values()}) == l + 7
    for k in range(1, l):
        assert cos[f"phi_{k}"].conformal_weight() % 1 == Fraction(k * k, 4 * l) % 1
    assert cos["sigma_1"].conformal_weight() % 1 == Fraction(1, 16)
    assert cos["tau_2"].conformal_weight() % 1 == Fraction(9, 16)


def test_selection_rule_enforced():
    with pytest.raises(WeightError):
        CosetLabel(W(4, L0=1), W(4, L0=1), W(4, L1=1, L0=1))


@pytest.mark.parametrize("l", [3, 4])
def test_simple_current_action(l):
    facts = simple_current_action(l)
    assert len(facts) == 3 * (l + 7)
    assert ("j", "1", "j") in facts
