"""Branching tables between a parent theory and its orbifold, and index arithmetic.

``b[i, lam]`` is the multiplicity of child sector ``lam`` in the restriction of
parent sector ``i``.  Child sectors that never occur (all-zero columns) are the
twisted sectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import families
from .mtc_core import REL_TOL, ModularData, global_dimension


class BranchingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BranchingTable:
    parent: str
    child: str
    group_order: int
    b: np.ndarray
    parent_labels: tuple[str, ...] = field(default=())
    child_labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        b = np.array(self.b, dtype=np.int64)
        if b.ndim != 2:
            raise BranchingError("b must be a matrix")
        if np.any(b < 0):
            raise BranchingError("branching multiplicities must be nonnegative")
        if b.size and np.any(b.sum(axis=1) == 0):
            raise BranchingError("every parent sector must restrict to something")
        if int(self.group_order) < 1:
            raise BranchingError("group order must be positive")
        for labels, n, what in ((self.parent_labels, b.shape[0], "parent"), (self.child_labels, b.shape[1], "child")):
            if labels and len(labels) != n:
                raise BranchingError(f"{len(labels)} {what} labels for {n} {what} sectors")
        b.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "group_order", int(self.group_order))
        object.__setattr__(self, "parent_labels", tuple(self.parent_labels))
        object.__setattr__(self, "child_labels", tuple(self.child_labels))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BranchingTable):
            return NotImplemented
        return (
            (self.parent, self.child, self.group_order, self.parent_labels, self.child_labels)
            == (other.parent, other.child, other.group_order, other.parent_labels, other.child_labels)
            and np.array_equal(self.b, other.b)
        )

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.b.shape)

    def untwisted_mask(self) -> np.ndarray:
        return self.b.sum(axis=0) > 0

    def check_labels(self, parent: ModularData, child: ModularData) -> None:
        if self.b.shape != (len(parent), len(child)):
            raise BranchingError(f"table shape {self.b.shape} does not match theories ({len(parent)}, {len(child)})")
        if self.parent_labels and self.parent_labels != parent.labels:
            raise BranchingError("parent labels of the table differ from the parent theory")
        if self.child_labels and self.child_labels != child.labels:
            raise BranchingError("child labels of the table differ from the child theory")


def identity_branching(md: ModularData) -> BranchingTable:
    n = len(md)
    return BranchingTable(md.name, md.name, 1, np.eye(n, dtype=np.int64), md.labels, md.labels)


def _su_to_spin_matrix(l: int) -> np.ndarray:
    names = families.sector_names(l)
    col = {s: i for i, s in enumerate(names)}
    b = np.zeros((2 * l, l + 7), dtype=np.int64)
    for k in range(2 * l):
        if k == 0:
            targets = ["1", "j"]
        elif k == l:
            targets = ["phi_l1", "phi_l2"]
        else:
            targets = [f"phi_{min(k, 2 * l - k)}"]
        for t in targets:
            b[k, col[t]] = 1
    return b


def branching_su_to_spin(l: int) -> BranchingTable:
    """Restriction of SU(2l) level 1 to Spin(2l) level 2 (``|G| = 2``).

    ``Lambda~_0 -> 1 + j``, ``Lambda~_l -> phi_l1 + phi_l2`` and
    ``Lambda~_k, Lambda~_{2l-k} -> phi_k`` for ``0 < k < l``.
    """
    if l < 3:
        raise BranchingError(f"need l >= 3, got {l}")
    return BranchingTable(
        f"su_level1({l})",
        f"spin_level2({l})",
        2,
        _su_to_spin_matrix(l),
        tuple(f"Lambda~_{k}" for k in range(2 * l)),
        tuple(families.sector_names(l, hat=True)),
    )


def branching_u1_to_orbifold(l: int) -> BranchingTable:
    """Restriction of ``u1(2l)`` to its Z2-orbifold; same pattern as ``branching_su_to_spin``."""
    if l < 2:
        raise BranchingError(f"need l >= 2, got {l}")
    return BranchingTable(
        f"u1({2 * l})",
        f"orbifold_u1({l})",
        2,
        _su_to_spin_matrix(l),
        tuple(str(k) for k in range(2 * l)),
        tuple(families.sector_names(l)),
    )


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntertwiningReport:
    deviation: float
    worst: tuple[str, str]
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def verify_intertwining(
    parent: ModularData, child: ModularData, b: BranchingTable, tol: float = REL_TOL
) -> IntertwiningReport:
    """``sum_lam b[i,lam] S_child[lam,nu] = sum_k S_parent[i,k] b[k,nu]`` for every ``i`` and every ``nu``."""
    b.check_labels(parent, child)
    B = b.b.astype(float)
    diff = np.abs(B @ child.S - parent.S @ B)
    if diff.size == 0:
        return IntertwiningReport(0.0, ("", ""), tol)
    i, nu = np.unravel_index(int(np.argmax(diff)), diff.shape)
    return IntertwiningReport(float(diff[i, nu]), (parent.labels[i], child.labels[nu]), tol)


def dim_w(b: BranchingTable) -> int:
    """``sum_{i,lam} b[i,lam]^2``."""
    return int(np.sum(b.b.astype(np.int64) ** 2))


def vacuum_row_defect(child: ModularData, b: BranchingTable) -> float:
    """How far the vacuum row is from ``b[1,lam] = d_lam`` and ``sum b[1,lam] d_lam = |G|``."""
    row = b.b[0].astype(float)
    d = child.dims
    occ = row > 0
    return max(float(np.max(np.abs(row[occ] - d[occ]), initial=0.0)), abs(float(row @ d) - b.group_order))


@dataclass(frozen=True)
class SectorClassification:
    labels: tuple[str, ...]
    twisted: tuple[bool, ...]
    untwisted_dim_sum: float
    mu: float

    @property
    def twisted_labels(self) -> tuple[str, ...]:
        return tuple(s for s, t in zip(self.labels, self.twisted) if t)

    @property
    def untwisted_labels(self) -> tuple[str, ...]:
        return tuple(s for s, t in zip(self.labels, self.twisted) if not t)


def classify_sectors(child: ModularData, b: BranchingTable) -> SectorClassification:
    """Flag child sectors as twisted (never in a restriction) or untwisted.

    For ``|G| > 1`` the twisted set must be nonempty and the untwisted sectors
    must satisfy ``sum d^2 < mu`` strictly; otherwise ``BranchingError``.
    """
    if b.b.shape[1] != len(child):
        raise BranchingError("table columns do not match the child theory")
    twisted = tuple(bool(t) for t in ~b.untwisted_mask())
    d2 = child.dims**2
    unt = float(np.sum(d2[~np.array(twisted)]))
    mu = global_dimension(child)
    out = SectorClassification(child.labels, twisted, unt, mu)
    if b.group_order > 1:
        if not any(twisted):
            raise BranchingError("no twisted sectors although the group is nontrivial")
        if not unt < mu - REL_TOL * mu:
            raise BranchingError(f"untwisted sum d^2 = {unt} is not below mu = {mu}")
    return out


def mu_orbifold(mu_parent: float, group_order: int) -> float:
    """``mu(A^G) = |G|^2 mu(A)``."""
    if mu_parent <= 0 or group_order <= 0:
        raise ValueError("mu and group order must be positive")
    return float(group_order) ** 2 * float(mu_parent)


def mu_product_identity(mu_sub: float, index: float, mu_parent: float, tol: float = REL_TOL) -> bool:
    """``mu_sub = index^2 mu_parent`` within relative tolerance."""
    target = index**2 * mu_parent
    return abs(mu_sub - target) <= tol * max(1.0, abs(target))


def c_phase_check(parent: ModularData, child: ModularData, tol: float = REL_TOL) -> bool:
    """``C_child^3 = C_parent^3``."""
    return abs(child.phaseC**3 - parent.phaseC**3) <= tol
