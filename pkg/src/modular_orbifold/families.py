"""Closed-form modular data for the lattice, WZW and orbifold families.

Canonical label orders:

* ``u1(n)``: ``"0" .. "n-1"``.
* ``su_level1(l)``: ``"Lambda~_0" .. "Lambda~_{2l-1}"``.
* ``spin_level2(l)``: ``1_hat, j_hat, phi_l1_hat, phi_l2_hat, phi_1_hat .. phi_{l-1}_hat,
  sigma_1_hat, sigma_2_hat, tau_1_hat, tau_2_hat``.
* ``orbifold_u1(l)``: the same names without the ``_hat`` suffix.
* ``a1(k)``: ``"spin_0", "spin_1/2", .. "spin_{k/2}"``.

Where two published formulas compete (the cosine in the ``phi_k``-``phi_k'``
block, the sign of the ``b`` entries, and the twists), every variant is
evaluated and the losers are recorded in ``ModularData.report``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import affine_weights as aw
from .mtc_core import (
    REL_TOL,
    ModularData,
    ModularDataError,
    NotModularError,
    principal_phase,
    sigma_tilde,
    twist_vector,
    verlinde_fusion,
)


class FamilyError(ValueError):
    """Invalid family name or parameter."""


class CalibrationError(ModularDataError):
    def __init__(self, msg: str, report: "CalibrationReport"):
        super().__init__(f"{msg}\n{report.table()}")
        self.report = report


@dataclass(frozen=True)
class Note:
    """One arbitrated choice: what was kept, what was rejected and why."""

    topic: str
    chosen: str
    rejected: tuple[str, ...]
    detail: str

    def __str__(self) -> str:
        rej = "; ".join(self.rejected) if self.rejected else "none"
        return f"{self.topic}: chose {self.chosen} (rejected: {rej}) -- {self.detail}"


# ---------------------------------------------------------------------------
# Twist calibration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CandidateResult:
    name: str
    tstst_deviation: float
    conjugation_deviation: float
    passed: bool


@dataclass(frozen=True)
class CalibrationReport:
    results: tuple[CandidateResult, ...]
    tolerance: float

    @property
    def winners(self) -> list[int]:
        return [i for i, r in enumerate(self.results) if r.passed]

    def table(self) -> str:
        lines = [f"{'candidate':<28} {'TSTST-S':>12} {'T vs C':>12}  result"]
        for r in self.results:
            lines.append(
                f"{r.name:<28} {r.tstst_deviation:12.3e} {r.conjugation_deviation:12.3e}  "
                f"{'pass' if r.passed else 'fail'}"
            )
        return "\n".join(lines)


def _normalization_phase(dims: np.ndarray, twists: np.ndarray) -> complex:
    st = sigma_tilde(dims, twists)
    if abs(st) < REL_TOL:
        raise ModularDataError("sigma~ vanishes for these twists")
    return cmath.exp(1j * principal_phase(st) / 3)


def twist_calibration(
    S,
    candidates: Sequence,
    tol: float = REL_TOL,
    names: Sequence[str] | None = None,
    vacuum: int = 0,
) -> tuple[int, CalibrationReport]:
    """Pick the unique candidate twist vector compatible with ``S``.

    Each candidate is tested for ``TSTST = S`` with ``T = C diag(w)`` (``C``
    from the principal cube root of ``sigma~/|sigma~|``) and for
    ``w_i = w_ibar`` where ``ibar`` is read off ``S^2``.
    """
    S = np.asarray(S, dtype=complex)
    if not candidates:
        raise ValueError("no twist candidates")
    names = list(names) if names is not None else [f"candidate {i}" for i in range(len(candidates))]
    n = S.shape[0]
    dims = (S[:, vacuum] / S[vacuum, vacuum]).real
    cj = np.array([int(np.argmax(np.abs(row))) for row in S @ S])
    results = []
    for name, cand in zip(names, candidates):
        w = np.asarray(cand, dtype=complex)
        if w.shape != (n,) or abs(w[vacuum] - 1) > tol or np.max(np.abs(np.abs(w) - 1)) > tol:
            raise ValueError(f"{name}: twists must be {n} unit-modulus numbers with vacuum twist 1")
        try:
            T = _normalization_phase(dims, w) * np.diag(w)
            dev = float(np.abs(T @ S @ T @ S @ T - S).max())
        except ModularDataError:
            dev = math.inf
        cdev = float(np.abs(w - w[cj]).max())
        results.append(CandidateResult(name, dev, cdev, dev <= tol and cdev <= tol))
    report = CalibrationReport(tuple(results), tol)
    win = report.winners
    if len(win) != 1:
        raise CalibrationError(f"twist calibration found {len(win)} compatible candidates, need exactly 1", report)
    return win[0], report


def _calibrated(name, labels, S, candidates: dict[str, np.ndarray], notes: list[Note], topic: str) -> ModularData:
    merged: dict[str, np.ndarray] = {}
    for key, vec in candidates.items():
        same = next((k for k, v in merged.items() if np.abs(v - vec).max() <= REL_TOL), None)
        if same is None:
            merged[key] = vec
        else:  # formulas that coincide for this parameter are one candidate
            merged[f"{same} = {key}"] = merged.pop(same)
    candidates = merged
    idx, rep = twist_calibration(S, list(candidates.values()), names=list(candidates))
    keys = list(candidates)
    losers = tuple(
        f"{r.name} (TSTST deviation {r.tstst_deviation:.2e})" for i, r in enumerate(rep.results) if i != idx
    )
    notes.append(Note(topic, keys[idx], losers, "arbiter: TSTST = S and T commuting with charge conjugation"))
    w = candidates[keys[idx]]
    dims = (S[:, 0] / S[0, 0]).real
    return ModularData(name, tuple(labels), 0, S, w, _normalization_phase(dims, w), tuple(notes))


# ---------------------------------------------------------------------------
# Lattice theory and SU(M) level 1
# ---------------------------------------------------------------------------


def _fourier(n: int, sign: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / n) / math.sqrt(n)


def build_u1(n: int) -> ModularData:
    """Lattice theory with ``n = 2l`` sectors ``k = 0..n-1``, central charge 1.

    ``S_kk' = exp(-2 pi i k k'/n)/sqrt(n)``; the twists ``exp(2 pi i k^2/(2n))``
    are selected by calibration against the alternative ``k^2/(4n)``.  The
    opposite sign of the exponent belongs to ``build_su_m_level1``.
    """
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise FamilyError(f"u1 needs an even integer n >= 2, got {n!r}")
    n = int(n)
    S = _fourier(n, -1)
    cands = {
        "h = k^2/(2n)": twist_vector([Fraction(k * k, 2 * n) for k in range(n)]),
        "h = k^2/(4n)": twist_vector([Fraction(k * k, 4 * n) for k in range(n)]),
    }
    notes = [
        Note(
            "S exponent sign",
            "exp(-2 pi i k k'/n)",
            ("exp(+2 pi i k k'/n): compatible only with central charge -1 (or n-1 with SU(n) level-1 twists)",),
            "central charge 1 lattice twists need the conjugate Fourier kernel",
        )
    ]
    return _calibrated(f"u1({n})", [str(k) for k in range(n)], S, cands, notes, "twists")


def build_su_m_level1(l: int) -> ModularData:
    """SU(M) level 1 with ``M = 2l``: ``S_kk' = exp(2 pi i k k'/M)/sqrt(M)``, ``h_k = k(M-k)/(2M)``."""
    if not isinstance(l, (int, np.integer)) or l < 1:
        raise FamilyError(f"su_level1 needs an integer l >= 1, got {l!r}")
    M = 2 * int(l)
    S = _fourier(M, +1)
    cands = {
        "SU(M) weight k(M-k)/(2M)": twist_vector([aw.su_level1_conformal_weight(k, M) for k in range(M)]),
        "lattice k^2/(2M)": twist_vector([Fraction(k * k, 2 * M) for k in range(M)]),
    }
    return _calibrated(f"su_level1({l})", [f"Lambda~_{k}" for k in range(M)], S, cands, [], "twists")


# ---------------------------------------------------------------------------
# Spin(2l) level 2 and the Z2-orbifold of the lattice theory
# ---------------------------------------------------------------------------


def sector_names(l: int, hat: bool = False) -> list[str]:
    base = ["1", "j", "phi_l1", "phi_l2"] + [f"phi_{k}" for k in range(1, l)]
    base += ["sigma_1", "sigma_2", "tau_1", "tau_2"]
    return [f"{b}_hat" for b in base] if hat else base


def spin_level2_table(l: int, cos_divisor: int = 1, b_sign: int = -1) -> np.ndarray:
    """``sqrt(8l) S`` for the Spin(2l)_2 / orbifold family, canonical order.

    ``a_ij = sqrt(l/2)(1 + (2 delta_ij - 1) exp(-pi i l/2))`` and
    ``b_ij = b_sign (-1)^(l + delta_ij) sqrt(l) exp(pi i l/2)``; the
    ``phi_k``-``phi_k'`` block is ``4 cos(pi k k'/(cos_divisor l))``.
    ``b_sign = +1`` is the conventional formula; ``-1`` is the labelling
    for which ``phi_l1`` fixes ``sigma_1`` (see ``fusion_relations``).
    """
    n = l + 7
    r = math.sqrt(l)
    em = cmath.exp(-1j * math.pi * l / 2)
    ep = cmath.exp(1j * math.pi * l / 2)

    def a(i, j):
        return math.sqrt(l / 2) * (1 + (2 * (i == j) - 1) * em)

    def b(i, j):
        return b_sign * (-1) ** (l + (i == j)) * r * ep

    P, F = [2, 3], list(range(4, l + 3))
    Sg, Tu = [l + 3, l + 4], [l + 5, l + 6]
    X = np.zeros((n, n), dtype=complex)
    X[0] = [1, 1, 1, 1] + [2] * (l - 1) + [r] * 4
    X[1] = [1, 1, 1, 1] + [2] * (l - 1) + [-r] * 4
    sgn_l = (-1) ** l
    for i, row in enumerate(P, start=1):
        X[row, :4] = [1, 1, sgn_l, sgn_l]
        X[row, F] = [2 * (-1) ** k for k in range(1, l)]
        X[row, Sg] = [b(i, 1), b(i, 2)]
        X[row, Tu] = [b(i, 1), b(i, 2)]
    for k, row in enumerate(F, start=1):
        X[row, :4] = [2, 2, 2 * (-1) ** k, 2 * (-1) ** k]
        X[row, F] = [4 * math.cos(math.pi * k * kp / (cos_divisor * l)) for kp in range(1, l)]
    for i, row in enumerate(Sg, start=1):
        X[row, :2] = [r, -r]
        X[row, P] = [b(1, i), b(2, i)]
        X[row, Sg] = [a(i, 1), a(i, 2)]
        X[row, Tu] = [-a(i, 1), -a(i, 2)]
    for i, row in enumerate(Tu, start=1):
        X[row, :2] = [r, -r]
        X[row, P] = [b(1, i), b(2, i)]
        X[row, Sg] = [-a(i, 1), -a(i, 2)]
        X[row, Tu] = [a(i, 1), a(i, 2)]
    return X


def fusion_relations(l: int) -> list[tuple[str, str, str]]:
    """Simple-current fusion facts ``a x b = c`` for the ``l+7`` sectors (unhatted names)."""
    if l % 2:
        return [
            ("phi_l1", "phi_l1", "j"),
            ("phi_l1", "j", "phi_l2"),
            ("phi_l1", "phi_l2", "1"),
            ("phi_l1", "sigma_1", "tau_2"),
        ]
    return [
        ("phi_l1", "phi_l1", "1"),
        ("phi_l2", "phi_l2", "1"),
        ("j", "j", "1"),
        ("phi_l1", "sigma_1", "sigma_1"),
        ("phi_l2", "sigma_2", "sigma_2"),
        ("j", "sigma_1", "tau_1"),
        ("j", "sigma_2", "tau_2"),
    ]


def check_fusion_relations(md: ModularData, l: int, suffix: str = "") -> list[str]:
    """Return the relations from ``fusion_relations`` that the Verlinde fusion of ``md`` violates."""
    try:
        ring = verlinde_fusion(md)
    except (NotModularError, ModularDataError) as exc:
        return [f"no integral fusion ring: {exc}"]
    bad = []
    for x, y, z in fusion_relations(l):
        x, y, z = (f"{t}{suffix}" for t in (x, y, z))
        prod = ring.product(x, y)
        if prod != {z: 1}:
            bad.append(f"{x} x {y} = {prod}, expected {z}")
    return bad


def _table_with_arbitration(l: int, notes: list[Note], tol: float = REL_TOL) -> np.ndarray:
    n = l + 7
    unit = {}
    for div in (1, 2):
        S = spin_level2_table(l, div) / math.sqrt(8 * l)
        unit[div] = float(np.abs(S @ S.conj().T - np.eye(n)).max())
    ok = [d for d in (1, 2) if unit[d] <= tol]
    if len(ok) != 1:
        raise ModularDataError(f"cosine-variant arbitration failed for l={l}: unitarity deviations {unit}")
    div = ok[0]
    other = 3 - div
    notes.append(
        Note(
            "phi_k-phi_k' entry",
            f"4cos(pi k k'/{'l' if div == 1 else '2l'})",
            (f"4cos(pi k k'/{'l' if other == 1 else '2l'}) (unitarity deviation {unit[other]:.2e})",),
            "arbiter: unitarity of S",
        )
    )
    return div


def _spin_family(l: int, suffix: str, name: str, candidates: Callable[[], dict[str, np.ndarray]]) -> ModularData:
    notes: list[Note] = []
    div = _table_with_arbitration(l, notes)
    labels = sector_names(l) if not suffix else sector_names(l, hat=True)
    outcome = {}
    for sign in (-1, +1):
        S = spin_level2_table(l, div, sign) / math.sqrt(8 * l)
        probe = ModularData(name, tuple(labels), 0, S, np.ones(len(labels)), 1.0)
        outcome[sign] = (S, check_fusion_relations(probe, l, suffix))
    good = [s for s in (-1, +1) if not outcome[s][1]]
    if len(good) != 1:
        raise ModularDataError(f"b-sign arbitration failed for l={l}: {outcome[-1][1]} / {outcome[+1][1]}")
    sign = good[0]
    rejected = outcome[-sign][1]
    notes.append(
        Note(
            "sign of b_ij",
            "b_ij = -(-1)^(l+delta) sqrt(l) exp(pi i l/2)" if sign < 0 else "b_ij with the conventional sign",
            (
                ("b_ij with the conventional sign" if sign < 0 else "negated b_ij")
                + f" (violates {len(rejected)} simple-current fusion facts, e.g. {rejected[0]})",
            ),
            "arbiter: simple-current fusion facts; the sign flip equals swapping phi_l1 and phi_l2",
        )
    )
    return _calibrated(name, labels, outcome[sign][0], candidates(), notes, "twists")


def _spin_twists(l: int, hs: dict[str, Fraction]) -> np.ndarray:
    return twist_vector([hs[s] for s in sector_names(l)])


def build_spin_m_level2(l: int) -> ModularData:
    """Spin(2l) level 2, ``l+7`` sectors, central charge ``2l-1``."""
    if not isinstance(l, (int, np.integer)) or l < 3:
        raise FamilyError(f"spin_level2 needs an integer l >= 3, got {l!r}")
    l = int(l)

    def candidates():
        weights = aw.spin_level2_weights(l)
        affine = {s: aw.conformal_weight(w, 2) for s, w in weights.items()}
        naive = {"1": Fraction(0), "j": Fraction(1), "phi_l1": Fraction(l, 4), "phi_l2": Fraction(l, 4)}
        naive.update({f"phi_{k}": Fraction(k * (l - k), 8 * l) for k in range(1, l)})
        sig = Fraction(2 * l - 1, 16)
        naive.update({"sigma_1": sig, "sigma_2": sig, "tau_1": sig + Fraction(1, 2), "tau_2": sig + Fraction(1, 2)})
        return {
            "affine conformal weights": _spin_twists(l, affine),
            "phi_k: h = k(l-k)/(8l)": _spin_twists(l, naive),
        }

    md = _spin_family(l, "_hat", f"spin_level2({l})", candidates)
    c = (2 * l - 1) % 24
    naive_C = cmath.exp(-1j * math.pi * c / 12)
    note = Note(
        "normalization phase C",
        "principal cube root exp(i arg(sigma~)/3)",
        (f"exp(-pi i (2l-1)/12) = {naive_C:.6f}",),
        f"the two differ by a cube root of unity (ratio {md.phaseC / naive_C:.6f}); only C^3 is invariant",
    )
    return ModularData(md.name, md.labels, md.vacuum, md.S, md.twists, md.phaseC, md.report + (note,))


def build_orbifold_u1(l: int) -> ModularData:
    """Z2-orbifold of the lattice theory ``u1(2l)``: ``l+7`` sectors, central charge 1."""
    if not isinstance(l, (int, np.integer)) or l < 2:
        raise FamilyError(f"orbifold_u1 needs an integer l >= 2, got {l!r}")
    l = int(l)

    def candidates():
        base = {"1": Fraction(0), "j": Fraction(1), "phi_l1": Fraction(l, 4), "phi_l2": Fraction(l, 4)}
        base.update({"sigma_1": Fraction(1, 16), "sigma_2": Fraction(1, 16)})
        base.update({"tau_1": Fraction(9, 16), "tau_2": Fraction(9, 16)})
        naive = dict(base)
        naive.update({f"phi_{k}": Fraction(k * k, 8 * l) for k in range(1, l)})
        if l >= 3:
            coset = {s: lab.conformal_weight() for s, lab in aw.orbifold_coset_labels(l).items()}
            label = "coset conformal weights"
        else:
            coset = dict(base)
            coset.update({f"phi_{k}": Fraction(k * k, 4 * l) for k in range(1, l)})
            label = "phi_k: h = k^2/(4l)"
        return {label: _spin_twists(l, coset), "phi_k: h = k^2/(8l)": _spin_twists(l, naive)}

    return _spin_family(l, "", f"orbifold_u1({l})", candidates)


# ---------------------------------------------------------------------------
# SU(2) level k
# ---------------------------------------------------------------------------


def a1_label(a: int) -> str:
    return f"spin_{a // 2}" if a % 2 == 0 else f"spin_{a}/2"


def build_a1_level_k(k: int) -> ModularData:
    """SU(2) level ``k``: ``S_ab = sqrt(2/(k+2)) sin(pi (a+1)(b+1)/(k+2))``."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise FamilyError(f"a1 needs an integer level k >= 1, got {k!r}")
    k = int(k)
    a = np.arange(k + 1)
    S = math.sqrt(2 / (k + 2)) * np.sin(np.pi * np.outer(a + 1, a + 1) / (k + 2))
    cands = {"a(a+2)/(4(k+2))": twist_vector([aw.a1_conformal_weight(int(x), k) for x in a])}
    return _calibrated(f"a1({k})", [a1_label(int(x)) for x in a], S.astype(complex), cands, [], "twists")


# ---------------------------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    name: str
    builder: Callable[[int], ModularData]
    parameter: str
    description: str


FAMILIES: dict[str, FamilySpec] = {
    "u1": FamilySpec("u1", build_u1, "n (even, >= 2)", "lattice theory with n sectors"),
    "su_level1": FamilySpec("su_level1", build_su_m_level1, "l (>= 1)", "SU(2l) at level 1"),
    "spin_level2": FamilySpec("spin_level2", build_spin_m_level2, "l (>= 3)", "Spin(2l) at level 2"),
    "orbifold_u1": FamilySpec("orbifold_u1", build_orbifold_u1, "l (>= 2)", "Z2-orbifold of u1(2l)"),
    "a1": FamilySpec("a1", build_a1_level_k, "k (>= 1)", "SU(2) at level k"),
}


def build_family(family: str, param: int) -> ModularData:
    try:
        spec = FAMILIES[family]
    except KeyError:
        raise FamilyError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    return spec.builder(param)
