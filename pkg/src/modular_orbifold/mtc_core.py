"""Modular data, fusion rings, and the genus-0 relations between them.

Conventions
-----------
* ``S`` is stored as a dense complex matrix in a fixed label order, vacuum at
  ``vacuum`` (always 0 for the built families).
* ``T`` is never stored; it is ``phaseC * diag(twists)``.
* The Y-matrix is built from fusion data as
  ``Y_ij = sum_k N_ij^k  w_i w_j / w_k  d_k`` and ``S = Y / |sigma~|`` with
  ``sigma~ = sum_i d_i^2 / w_i``.  With this convention the rank-one lattice
  theory with twists ``exp(2 pi i k^2 / 2n)`` has ``S_kk' ~ exp(-2 pi i kk'/n)``.
* Fusion coefficients come from ``N_ij^k = sum_m S_im S_jm conj(S_km) / S_0m``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

REL_TOL = 1e-9
INT_TOL = 1e-6


class ModularDataError(ValueError):
    """Inconsistent or degenerate modular data."""


class NotModularError(ModularDataError):
    """A Verlinde coefficient is not a nonnegative integer."""

    def __init__(self, msg: str, index: tuple[int, int, int], value: complex):
        super().__init__(msg)
        self.index = index
        self.value = value


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# Fusion rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FusionRing:
    labels: tuple[str, ...]
    vacuum: int
    conj: tuple[int, ...]
    N: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        N = np.asarray(self.N)
        if N.shape != (n, n, n):
            raise ModularDataError(f"fusion tensor has shape {N.shape}, expected {(n, n, n)}")
        if not np.issubdtype(N.dtype, np.integer):
            raise ModularDataError("fusion coefficients must be stored as integers")
        if len(self.conj) != n:
            raise ModularDataError("conjugation has the wrong length")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "conj", tuple(int(c) for c in self.conj))
        object.__setattr__(self, "N", _frozen(N.astype(np.int64)))

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FusionRing):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.vacuum == other.vacuum
            and self.conj == other.conj
            and np.array_equal(self.N, other.N)
        )

    def index(self, name: str) -> int:
        return self.labels.index(name)

    def fusion_matrix(self, i: int) -> np.ndarray:
        """``(N_i)_{jk} = N_ij^k``."""
        return self.N[i]

    def product(self, i: int | str, j: int | str) -> dict[str, int]:
        if isinstance(i, str):
            i = self.index(i)
        if isinstance(j, str):
            j = self.index(j)
        return {self.labels[k]: int(c) for k, c in enumerate(self.N[i, j]) if c}

    def is_simple_current(self, i: int) -> bool:
        return int(self.N[i, self.conj[i], self.vacuum]) == 1 and int(self.N[i, self.conj[i]].sum()) == 1

    def axiom_violations(self) -> list[str]:
        """Names of the ring axioms that fail (empty list when all hold)."""
        n, v, N, cj = len(self), self.vacuum, self.N, np.array(self.conj)
        eye = np.eye(n, dtype=np.int64)
        bad = []
        if (N < 0).any():
            bad.append("nonnegativity")
        if not np.array_equal(N[v], eye):
            bad.append("unit")
        if not np.array_equal(N, N.transpose(1, 0, 2)):
            bad.append("commutativity")
        if not np.array_equal(cj[cj], np.arange(n)) or cj[v] != v:
            bad.append("conjugation involution")
        if not np.array_equal(N[:, :, v], eye[:, cj]):
            bad.append("conjugation pairing")
        if not np.array_equal(N, N[np.ix_(cj, cj, cj)]):
            bad.append("conjugation symmetry")
        if associativity_defect(N) != 0:
            bad.append("associativity")
        return bad


def associativity_defect(N: np.ndarray) -> int:
    """Max |sum_m N_ij^m N_mk^l - sum_m N_jk^m N_im^l| over all i, j, k, l."""
    N = np.asarray(N, dtype=np.int64)
    left = np.einsum("ijm,mkl->ijkl", N, N)
    right = np.einsum("jkm,iml->ijkl", N, N)
    return int(np.abs(left - right).max()) if N.size else 0


def frobenius_perron_dims(ring: FusionRing) -> np.ndarray:
    """Largest eigenvalue of each fusion matrix ``N_i``."""
    out = np.empty(len(ring))
    for i in range(len(ring)):
        ev = np.linalg.eigvals(ring.fusion_matrix(i).astype(float))
        out[i] = float(np.max(np.abs(ev)))
    return out


# ---------------------------------------------------------------------------
# Modular data
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModularData:
    """Genus-0 modular data of a rational theory.

    ``report`` carries construction notes (e.g. which of two competing
    formulas was selected); it is not part of equality or serialization.
    """

    name: str
    labels: tuple[str, ...]
    vacuum: int
    S: np.ndarray
    twists: np.ndarray
    phaseC: complex
    report: tuple = field(default=(), compare=False)

    def __post_init__(self):
        S = np.asarray(self.S, dtype=complex)
        tw = np.asarray(self.twists, dtype=complex).reshape(-1)
        n = len(self.labels)
        if S.shape != (n, n):
            raise ModularDataError(f"S has shape {S.shape}, expected {(n, n)}")
        if tw.shape != (n,):
            raise ModularDataError(f"{tw.shape[0]} twists for {n} labels")
        if len(set(self.labels)) != n:
            raise ModularDataError("label names must be unique")
        if not 0 <= self.vacuum < n:
            raise ModularDataError("vacuum index out of range")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "S", _frozen(S))
        object.__setattr__(self, "twists", _frozen(tw))
        object.__setattr__(self, "phaseC", complex(self.phaseC))
        object.__setattr__(self, "report", tuple(self.report))

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModularData):
            return NotImplemented
        return (
            self.name == other.name
            and self.labels == other.labels
            and self.vacuum == other.vacuum
            and np.array_equal(self.S, other.S)
            and np.array_equal(self.twists, other.twists)
            and self.phaseC == other.phaseC
        )

    def index(self, name: str) -> int:
        return self.labels.index(name)

    @property
    def T(self) -> np.ndarray:
        return self.phaseC * np.diag(self.twists)

    @cached_property
    def dims(self) -> np.ndarray:
        v = self.vacuum
        return (self.S[:, v] / self.S[v, v]).real

    def entry(self, a: str, b: str) -> complex:
        return complex(self.S[self.index(a), self.index(b)])

    def with_twists(self, twists, name: str | None = None) -> "ModularData":
        return ModularData(name or self.name, self.labels, self.vacuum, self.S, twists, self.phaseC, self.report)

    def relabel(self, labels: Sequence[str], name: str | None = None) -> "ModularData":
        return ModularData(name or self.name, tuple(labels), self.vacuum, self.S, self.twists, self.phaseC, self.report)


def trivial_theory() -> ModularData:
    return ModularData("trivial", ("1",), 0, np.ones((1, 1)), np.ones(1), 1.0)


# ---------------------------------------------------------------------------
# Genus-0 construction from fusion data
# ---------------------------------------------------------------------------


def _check_lengths(ring: FusionRing, *vectors) -> None:
    for v in vectors:
        if len(v) != len(ring):
            raise ModularDataError(f"vector of length {len(v)} for a ring with {len(ring)} labels")


def y_from_fusion(ring: FusionRing, dims, twists) -> np.ndarray:
    """Y-matrix ``Y_ij = sum_k N_ij^k w_i w_j / w_k d_k``."""
    dims = np.asarray(dims, dtype=float)
    w = np.asarray(twists, dtype=complex)
    _check_lengths(ring, dims, w)
    return np.einsum("ijk,i,j,k->ij", ring.N.astype(complex), w, w, dims / w)


def sigma_tilde(dims, twists) -> complex:
    dims = np.asarray(dims, dtype=float)
    w = np.asarray(twists, dtype=complex)
    if dims.shape != w.shape:
        raise ModularDataError("dims and twists have different lengths")
    return complex(np.sum(dims**2 / w))


def assemble_modular(ring: FusionRing, dims, twists, name: str = "assembled") -> ModularData:
    """``S = Y/|sigma~|`` and ``C = exp(i x / 3)`` with ``x = arg sigma~`` in (-pi, pi]."""
    Y = y_from_fusion(ring, dims, twists)
    st = sigma_tilde(dims, twists)
    if abs(st) < REL_TOL:
        raise ModularDataError("sigma~ vanishes; Y is degenerate")
    x = cmath.phase(st)
    if x <= -math.pi:
        x += 2 * math.pi
    return ModularData(name, ring.labels, ring.vacuum, Y / abs(st), twists, cmath.exp(1j * x / 3))


def principal_phase(z: complex) -> float:
    """Argument of ``z`` in (-pi, pi]."""
    x = cmath.phase(z)
    return x + 2 * math.pi if x <= -math.pi else x


# ---------------------------------------------------------------------------
# Verlinde formula and charge conjugation
# ---------------------------------------------------------------------------


def verlinde_coefficients(S: np.ndarray, vacuum: int = 0) -> np.ndarray:
    """Raw complex ``N_ij^k`` from the Verlinde sum (no rounding)."""
    S = np.asarray(S, dtype=complex)
    s0 = S[vacuum]
    if np.min(np.abs(s0)) < REL_TOL:
        raise ModularDataError("vacuum row of S has a vanishing entry")
    return np.einsum("im,jm,km,m->ijk", S, S, S.conj(), 1.0 / s0)


def _integer_defect(raw: np.ndarray) -> tuple[float, tuple[int, ...]]:
    rounded = np.clip(np.rint(raw.real), 0, None)
    dev = np.abs(raw - rounded)
    if dev.size == 0:
        return 0.0, ()
    idx = np.unravel_index(int(np.argmax(dev)), dev.shape)
    return float(dev[idx]), tuple(int(i) for i in idx)


def conjugation(md: ModularData, tol: float = REL_TOL) -> tuple[int, ...]:
    """Involutive permutation ``i -> ibar`` read off from ``S^2``."""
    S2 = md.S @ md.S
    n = len(md)
    perm = tuple(int(np.argmax(np.abs(S2[i]))) for i in range(n))
    P = np.zeros((n, n))
    P[np.arange(n), perm] = 1.0
    dev = float(np.abs(S2 - P).max()) if n else 0.0
    if dev > tol:
        raise ModularDataError(f"S^2 is not a permutation matrix (deviation {dev:.3e})")
    p = np.array(perm)
    if not np.array_equal(p[p], np.arange(n)) or perm[md.vacuum] != md.vacuum:
        raise ModularDataError("S^2 is not an involution fixing the vacuum")
    return perm


def verlinde_fusion(md: ModularData, int_tol: float = INT_TOL, tol: float = REL_TOL) -> FusionRing:
    raw = verlinde_coefficients(md.S, md.vacuum)
    dev, idx = _integer_defect(raw)
    if dev > int_tol:
        raise NotModularError(
            f"N{idx} = {raw[idx]:.6g} is not a nonnegative integer (deviation {dev:.3e})",
            idx,
            complex(raw[idx]),
        )
    N = np.clip(np.rint(raw.real), 0, None).astype(np.int64)
    return FusionRing(md.labels, md.vacuum, conjugation(md, tol), N)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    deviation: float
    tolerance: float
    note: str = ""


@dataclass(frozen=True)
class VerificationReport:
    subject: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_relation_deviation(self) -> float:
        return max((c.deviation for c in self.checks if c.name in RELATION_CHECKS), default=0.0)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def table(self) -> str:
        w = max(len(c.name) for c in self.checks)
        lines = [f"verification of {self.subject}"]
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            extra = f"  ({c.note})" if c.note else ""
            lines.append(f"  {c.name:<{w}}  {flag}  dev={c.deviation:.3e}  tol={c.tolerance:.0e}{extra}")
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "deviation": c.deviation if math.isfinite(c.deviation) else None, "tolerance": c.tolerance, "note": c.note}
                for c in self.checks
            ],
        }


RELATION_CHECKS = frozenset(
    {
        "S unitary",
        "S symmetric",
        "T unitary",
        "TSTST = S",
        "S^2 = C permutation",
        "TC = CT",
        "Y symmetries",
        "|sigma~|^2 = sum d^2",
        "C^3 = sigma~/|sigma~|",
        "Y from fusion = |sigma~| S",
    }
)


def _maxabs(a) -> float:
    a = np.asarray(a)
    return float(np.abs(a).max()) if a.size else 0.0


def verify(md: ModularData, tol: float = REL_TOL, int_tol: float = INT_TOL) -> VerificationReport:
    """Run every genus-0 relation on ``md``; failures are report entries."""
    n = len(md)
    S, T, I = md.S, md.T, np.eye(len(md))
    checks: list[Check] = []

    def add(name, dev, tolerance=tol, note=""):
        checks.append(Check(name, bool(dev <= tolerance), float(dev), tolerance, note))

    add("S unitary", _maxabs(S @ S.conj().T - I))
    add("S symmetric", _maxabs(S - S.T))
    add("T unitary", _maxabs(T @ T.conj().T - I))
    add("TSTST = S", _maxabs(T @ S @ T @ S @ T - S))

    S2 = S @ S
    perm = [int(np.argmax(np.abs(S2[i]))) for i in range(n)]
    P = np.zeros((n, n))
    P[np.arange(n), perm] = 1.0
    p = np.array(perm)
    involutive = np.array_equal(p[p], np.arange(n)) and perm[md.vacuum] == md.vacuum
    add("S^2 = C permutation", _maxabs(S2 - P) if involutive else max(1.0, _maxabs(S2 - P)))
    add("TC = CT", _maxabs(T @ P - P @ T))

    d = md.dims
    st = sigma_tilde(d, md.twists)
    Y = abs(st) * S
    cj = p if involutive else np.arange(n)
    add(
        "Y symmetries",
        max(_maxabs(Y - Y.T), _maxabs(Y - Y[:, cj].conj()), _maxabs(Y - Y[np.ix_(cj, cj)])),
    )
    add("|sigma~|^2 = sum d^2", abs(abs(st) ** 2 - float(np.sum(d**2))))
    add("C^3 = sigma~/|sigma~|", abs(md.phaseC**3 - st / abs(st)) if abs(st) > 0 else 1.0)
    dim_dev = max(0.0, -float(np.min(d))) + _maxabs((S[:, md.vacuum] / S[md.vacuum, md.vacuum]).imag)
    add("dims positive", dim_dev if np.min(d) > tol else max(dim_dev, 1.0))

    try:
        raw = verlinde_coefficients(S, md.vacuum)
        int_dev, _ = _integer_defect(raw)
    except ModularDataError:
        raw, int_dev = None, float("inf")
    add("Verlinde integrality", int_dev, int_tol)

    if raw is not None and int_dev <= int_tol and involutive:
        N = np.clip(np.rint(raw.real), 0, None).astype(np.int64)
        ring = FusionRing(md.labels, md.vacuum, tuple(perm), N)
        axioms = [v for v in ring.axiom_violations() if v != "associativity"]
        add("fusion ring axioms", float(len(axioms)), 0.0, ", ".join(axioms))
        add("fusion associativity", float(associativity_defect(N)), 0.0)
        add("Y from fusion = |sigma~| S", _maxabs(y_from_fusion(ring, d, md.twists) - Y))
    else:
        add("fusion ring axioms", float("inf"), 0.0, "no integral fusion ring")
        add("fusion associativity", float("inf"), 0.0, "no integral fusion ring")
        add("Y from fusion = |sigma~| S", float("inf"), tol, "no integral fusion ring")
    return VerificationReport(md.name, tuple(checks))


# ---------------------------------------------------------------------------
# Derived quantities and products
# ---------------------------------------------------------------------------


def global_dimension(md: ModularData) -> float:
    """``sum_i d_i^2``."""
    return float(np.sum(md.dims**2))


def central_charge_mod8(md: ModularData, max_denominator: int = 48, tol: float = 1e-6) -> Fraction:
    """``c`` in [0, 8) with ``exp(-2 pi i c / 8) = sigma~/|sigma~|``."""
    st = sigma_tilde(md.dims, md.twists)
    c = (-8.0 * cmath.phase(st) / (2 * math.pi)) % 8.0
    frac = Fraction(c).limit_denominator(max_denominator)
    if abs(float(frac) - c) > tol:
        raise ModularDataError(f"central charge {c:.12f} is not a rational with denominator <= {max_denominator}")
    return frac % 8


def tensor_product(a: ModularData, b: ModularData, name: str | None = None) -> ModularData:
    na, nb = len(a), len(b)
    labels = tuple(f"({x},{y})" for x in a.labels for y in b.labels)
    vac = a.vacuum * nb + b.vacuum
    return ModularData(
        name or f"{a.name}*{b.name}",
        labels,
        vac,
        np.kron(a.S, b.S),
        np.kron(a.twists, b.twists),
        a.phaseC * b.phaseC,
    )


def permute(md: ModularData, order: Sequence[int], name: str | None = None) -> ModularData:
    """Reorder labels so that new label ``i`` is old label ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(len(md))):
        raise ValueError("order is not a permutation")
    return ModularData(
        name or md.name,
        tuple(md.labels[i] for i in order),
        order.index(md.vacuum),
        md.S[np.ix_(order, order)],
        md.twists[order],
        md.phaseC,
        md.report,
    )


def twist_vector(weights: Sequence[Fraction | float]) -> np.ndarray:
    """``exp(2 pi i h)`` with ``h`` reduced mod 1 first (exact for Fractions)."""
    out = []
    for h in weights:
        r = h % 1
        out.append(cmath.exp(2j * math.pi * float(r)))
    return np.array(out, dtype=complex)
