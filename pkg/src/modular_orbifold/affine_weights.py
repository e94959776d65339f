"""Integrable weights of affine D_l, its diagram automorphisms, and coset labels.

A weight is stored by its Dynkin labels ``(lam_0, ..., lam_l)``.  The level is
``lam_0 + lam_1 + 2(lam_2 + ... + lam_{l-2}) + lam_{l-1} + lam_l``.

Finite parts are written in the orthonormal basis ``e_1..e_l`` of R^l:

    w_i     = e_1 + ... + e_i                     (1 <= i <= l-2)
    w_{l-1} = (e_1 + ... + e_{l-1} - e_l) / 2
    w_l     = (e_1 + ... + e_{l-1} + e_l) / 2

with ``rho = (l-1, l-2, ..., 0)`` and dual Coxeter number ``2l - 2``.  The root
lattice of D_l is the set of integer vectors with even coordinate sum.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

HALF = Fraction(1, 2)


class WeightError(ValueError):
    pass


def comarks(l: int) -> tuple[int, ...]:
    return (1, 1) + (2,) * (l - 3) + (1, 1)


@dataclass(frozen=True, order=True)
class AffineWeight:
    l: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.l < 3:
            raise WeightError(f"D_l needs l >= 3, got {self.l}")
        if len(self.coeffs) != self.l + 1:
            raise WeightError(f"expected {self.l + 1} Dynkin labels, got {len(self.coeffs)}")
        if any(c < 0 for c in self.coeffs):
            raise WeightError("Dynkin labels must be nonnegative")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def from_terms(cls, l: int, terms: dict[int, int]) -> "AffineWeight":
        """``from_terms(l, {0: 1, l-1: 1})`` is ``Lambda_0 + Lambda_{l-1}``."""
        c = [0] * (l + 1)
        for i, m in terms.items():
            c[i] += m
        return cls(l, tuple(c))

    @property
    def level(self) -> int:
        return sum(m * c for m, c in zip(comarks(self.l), self.coeffs))

    def finite_part(self) -> tuple[Fraction, ...]:
        l = self.l
        v = [Fraction(0)] * l
        for i in range(1, l - 1):
            for a in range(i):
                v[a] += self.coeffs[i]
        for a in range(l - 1):
            v[a] += HALF * (self.coeffs[l - 1] + self.coeffs[l])
        v[l - 1] += HALF * (self.coeffs[l] - self.coeffs[l - 1])
        return tuple(v)

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                parts.append(f"{c if c > 1 else ''}Λ_{i}")
        return "+".join(parts) or "0"


def enumerate_weights(l: int, k: int) -> list[AffineWeight]:
    """All level-``k`` integrable weights of affine D_l, lexicographic in Dynkin labels."""
    if l < 3:
        raise WeightError(f"D_l needs l >= 3, got {l}")
    if k < 0:
        raise WeightError("level must be nonnegative")
    marks = comarks(l)
    out = []
    for c in itertools.product(*(range(k // m + 1) for m in marks)):
        if sum(m * x for m, x in zip(marks, c)) == k:
            out.append(AffineWeight(l, c))
    return sorted(out, key=lambda w: w.coeffs)


# ---------------------------------------------------------------------------
# Diagram automorphisms
# ---------------------------------------------------------------------------


def diagram_automorphism(gen: str, w: AffineWeight) -> AffineWeight:
    """Apply ``A_s`` or ``A_v``.

    l even:  A_s reverses the labels; A_v swaps 0<->1 and (l-1)<->l.
    l odd:   A_s sends lam_0 -> node l, lam_1 -> node l-1, lam_i -> node l-i
             for 2 <= i <= l-2, lam_{l-1} -> node 0, lam_l -> node 1.
    """
    l, c = w.l, w.coeffs
    new = [0] * (l + 1)
    if gen == "s":
        if l % 2 == 0:
            new = list(reversed(c))
        else:
            new[l], new[l - 1], new[0], new[1] = c[0], c[1], c[l - 1], c[l]
            for i in range(2, l - 1):
                new[l - i] = c[i]
    elif gen == "v":
        if l % 2:
            raise WeightError("A_v exists only for even l")
        new = list(c)
        new[0], new[1], new[l - 1], new[l] = c[1], c[0], c[l], c[l - 1]
    else:
        raise WeightError(f"unknown generator {gen!r}")
    return AffineWeight(l, tuple(new))


def apply_word(word: str, w: AffineWeight) -> AffineWeight:
    """Apply a word of generators right to left, e.g. ``"sv"`` is ``A_s A_v``."""
    for g in reversed(word):
        w = diagram_automorphism(g, w)
    return w


@dataclass(frozen=True)
class AutomorphismGroup:
    l: int
    generators: tuple[str, ...]
    structure: str

    @property
    def elements(self) -> tuple[str, ...]:
        """Each element as a word in the generators; ``""`` is the identity."""
        if self.structure == "Z2xZ2":
            return ("", "s", "v", "sv")
        return ("", "s", "ss", "sss")

    def __len__(self) -> int:
        return 4

    def act(self, element: str, w: AffineWeight) -> AffineWeight:
        return apply_word(element, w)


def automorphism_group(l: int) -> AutomorphismGroup:
    if l < 3:
        raise WeightError(f"D_l needs l >= 3, got {l}")
    if l % 2 == 0:
        return AutomorphismGroup(l, ("s", "v"), "Z2xZ2")
    return AutomorphismGroup(l, ("s",), "Z4")


# ---------------------------------------------------------------------------
# Conformal weights and lattices
# ---------------------------------------------------------------------------


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def conformal_weight(w: AffineWeight, k: int | None = None) -> Fraction:
    """``h = (lam, lam + 2 rho) / (2 (k + 2l - 2))`` for D_l at level ``k``."""
    k = w.level if k is None else k
    if w.level != k:
        raise WeightError(f"{w} has level {w.level}, not {k}")
    lam = w.finite_part()
    two_rho = [Fraction(2 * (w.l - 1 - a)) for a in range(w.l)]
    return _dot(lam, [x + y for x, y in zip(lam, two_rho)]) / (2 * (k + 2 * w.l - 2))


def su_level1_conformal_weight(j: int, M: int) -> Fraction:
    """Weight of the fundamental ``Lambda~_j`` of SU(M) at level 1: ``j(M-j)/2M``."""
    j %= M
    norm = Fraction(j * (M - j), M)  # (w_j, w_j)
    return (norm + j * (M - j)) / (2 * (1 + M))


def a1_conformal_weight(a: int, k: int) -> Fraction:
    """SU(2) level ``k``, Dynkin label ``a``: ``a(a+2) / 4(k+2)``."""
    if not 0 <= a <= k:
        raise WeightError(f"label {a} not integrable at level {k}")
    return Fraction(a * (a + 2), 4 * (k + 2))


def in_root_lattice(v: Iterable[Fraction]) -> bool:
    """D_l root lattice: integer coordinates with even sum."""
    v = list(v)
    return all(Fraction(x).denominator == 1 for x in v) and sum(v) % 2 == 0


# ---------------------------------------------------------------------------
# Coset labels (level 1 x level 1 / level 2) and their orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CosetLabel:
    dot: AffineWeight
    ddot: AffineWeight
    lam: AffineWeight

    def __post_init__(self):
        if (self.dot.level, self.ddot.level, self.lam.level) != (1, 1, 2):
            raise WeightError("coset labels need levels (1, 1; 2)")
        if not self.selection_rule():
            raise WeightError(f"{self} violates the root-lattice selection rule")

    def selection_rule(self) -> bool:
        a, b, c = self.dot.finite_part(), self.ddot.finite_part(), self.lam.finite_part()
        return in_root_lattice(x + y - z for x, y, z in zip(a, b, c))

    def conformal_weight(self) -> Fraction:
        return conformal_weight(self.dot, 1) + conformal_weight(self.ddot, 1) - conformal_weight(self.lam, 2)

    def act(self, group: AutomorphismGroup, element: str) -> "CosetLabel":
        return CosetLabel(group.act(element, self.dot), group.act(element, self.ddot), group.act(element, self.lam))

    def key(self) -> tuple:
        return (self.dot.coeffs, self.ddot.coeffs, self.lam.coeffs)

    def __str__(self) -> str:
        return f"[{self.dot}, {self.ddot}; {self.lam}]"


def enumerate_coset_labels(l: int) -> list[CosetLabel]:
    """Every (level 1, level 1; level 2) triple obeying the selection rule."""
    one, two = enumerate_weights(l, 1), enumerate_weights(l, 2)
    out = []
    for a, b, c in itertools.product(one, one, two):
        fa, fb, fc = a.finite_part(), b.finite_part(), c.finite_part()
        if in_root_lattice(x + y - z for x, y, z in zip(fa, fb, fc)):
            out.append(CosetLabel(a, b, c))
    return out


@dataclass(frozen=True)
class Orbit:
    representative: CosetLabel
    members: frozenset

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, label: CosetLabel) -> bool:
        return label in self.members


def orbit_of(label: CosetLabel, group: AutomorphismGroup) -> Orbit:
    members = frozenset(label.act(group, g) for g in group.elements)
    return Orbit(min(members, key=CosetLabel.key), members)


def orbits(labels: Sequence[CosetLabel], group: AutomorphismGroup) -> list[Orbit]:
    """Partition ``labels`` into orbits of the diagonal action, sorted by representative."""
    pool = set(labels)
    out, seen = [], set()
    for lab in sorted(pool, key=CosetLabel.key):
        if lab in seen:
            continue
        orb = orbit_of(lab, group)
        if not orb.members <= pool:
            raise WeightError(f"input is not closed under the action (orbit of {lab})")
        seen |= orb.members
        out.append(orb)
    return out


# ---------------------------------------------------------------------------
# Named sectors of Spin(2l) level 2 and of the diagonal coset
# ---------------------------------------------------------------------------


def spin_level2_weights(l: int) -> dict[str, AffineWeight]:
    """Level-2 weights named as in the Spin(2l)_2 sector list, canonical order.

    ``phi_k`` is the weight with finite part ``e_1 + ... + e_k``:
    ``Lambda_0+Lambda_1`` for k = 1, ``Lambda_{l-1}+Lambda_l`` for k = l-1 and
    ``Lambda_k`` otherwise.
    """
    W = lambda **t: AffineWeight.from_terms(l, {int(k[1:]): v for k, v in t.items()})  # noqa: E731
    out = {
        "1": W(L0=2),
        "j": W(L1=2),
        "phi_l1": AffineWeight.from_terms(l, {l - 1: 2}),
        "phi_l2": AffineWeight.from_terms(l, {l: 2}),
    }
    for k in range(1, l):
        if k == 1:
            out["phi_1"] = AffineWeight.from_terms(l, {0: 1, 1: 1})
        elif k == l - 1:
            out[f"phi_{k}"] = AffineWeight.from_terms(l, {l - 1: 1, l: 1})
        else:
            out[f"phi_{k}"] = AffineWeight.from_terms(l, {k: 1})
    out["sigma_1"] = AffineWeight.from_terms(l, {0: 1, l - 1: 1})
    out["sigma_2"] = AffineWeight.from_terms(l, {0: 1, l: 1})
    out["tau_1"] = AffineWeight.from_terms(l, {1: 1, l: 1})
    out["tau_2"] = AffineWeight.from_terms(l, {1: 1, l - 1: 1})
    return out


def orbifold_coset_labels(l: int) -> dict[str, CosetLabel]:
    """Representative coset triples for the Z2-orbifold sectors, canonical order.

    The second level-1 entry depends on parity: ``phi_k`` pairs with
    ``Lambda_0`` for even k and ``Lambda_1`` for odd k; ``phi_l1``/``phi_l2``
    pair with ``Lambda_0`` for even l and ``Lambda_1`` for odd l.
    """
    one = lambda i: AffineWeight.from_terms(l, {i: 1})  # noqa: E731
    lvl2 = spin_level2_weights(l)
    out = {
        "1": CosetLabel(one(0), one(0), lvl2["1"]),
        "j": CosetLabel(one(0), one(0), lvl2["j"]),
    }
    par = one(0) if l % 2 == 0 else one(1)
    out["phi_l1"] = CosetLabel(one(0), par, lvl2["phi_l1"])
    out["phi_l2"] = CosetLabel(one(0), par, lvl2["phi_l2"])
    for k in range(1, l):
        out[f"phi_{k}"] = CosetLabel(one(0), one(k % 2), lvl2[f"phi_{k}"])
    out["sigma_1"] = CosetLabel(one(0), one(l - 1), lvl2["sigma_1"])
    out["sigma_2"] = CosetLabel(one(0), one(l), lvl2["sigma_2"])
    out["tau_1"] = CosetLabel(one(0), one(l - 1), lvl2["tau_1"])
    out["tau_2"] = CosetLabel(one(0), one(l), lvl2["tau_2"])
    return out


def simple_current_action(l: int) -> list[tuple[str, str, str]]:
    """Fusion facts ``J x X = A(X)`` on the Spin(2l)_2 sectors.

    Every group element ``A`` gives a simple current ``J = A(2 Lambda_0)``
    whose product with a sector is the image of that sector under ``A``.
    Returned as ``(J, X, A(X))`` name triples, identity excluded.
    """
    group = automorphism_group(l)
    named = spin_level2_weights(l)
    by_weight = {w: name for name, w in named.items()}
    if len(by_weight) != len(named) or set(by_weight) != set(enumerate_weights(l, 2)):
        raise WeightError("named sectors do not exhaust the level-2 weights")
    facts = []
    for g in group.elements[1:]:
        J = by_weight[group.act(g, named["1"])]
        for name, w in named.items():
            facts.append((J, name, by_weight[group.act(g, w)]))
    return facts
