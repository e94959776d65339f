"""Reconstruct an orbifold S-matrix from parent data, branching rules and twists.

The unknown is the full child matrix ``X``.  Linear constraints:

* intertwining ``B X = S_parent B`` (twisted columns of ``B`` are zero);
* symmetry ``X = X^T``;
* vacuum row ``X[1, lam] = b[0, lam] X[1, 1]`` for sectors in the vacuum restriction;
* simple-current relations ``X[Jx, y] = (w_J w_y / w_{Jy}) X[x, y]`` for every
  fusion fact ``J x = Jx``.

The remaining freedom is a handful of parameters, each entry depending on at
most one of them.  Vacuum-row parameters are real positive and follow from
unitarity; the magnitudes of the others follow from row norms; their phases are
searched on the grid ``exp(pi i q/(4l))``, ``q = 0..8l-1``, and every candidate is
filtered by ``TSTST = S`` and full verification.

Twists of the twisted sectors are an input: the linear and unitarity
constraints alone do not fix them.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import affine_weights as aw
from . import families
from .branching import BranchingTable, branching_su_to_spin, branching_u1_to_orbifold, verify_intertwining
from .mtc_core import (
    INT_TOL,
    REL_TOL,
    ModularData,
    VerificationReport,
    Check,
    principal_phase,
    twist_vector,
    verify,
)


class SolverError(ValueError):
    """The constraint system is inconsistent or not determined enough to search."""


# ---------------------------------------------------------------------------
# Problem description
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolverProblem:
    name: str
    parent: ModularData
    branching: BranchingTable
    child_labels: tuple[str, ...]
    twisted_twists: dict[str, complex]
    fusion_facts: tuple[tuple[str, str, str], ...]
    vacuum: int = 0
    grid_order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "child_labels", tuple(self.child_labels))
        object.__setattr__(self, "fusion_facts", tuple(tuple(f) for f in self.fusion_facts))
        object.__setattr__(self, "twisted_twists", {k: complex(v) for k, v in dict(self.twisted_twists).items()})
        b = self.branching.b
        if b.shape != (len(self.parent), len(self.child_labels)):
            raise SolverError(f"branching shape {b.shape} does not match parent/child sizes")
        if self.branching.child_labels and self.branching.child_labels != self.child_labels:
            raise SolverError("branching child labels differ from the problem's child labels")
        twisted = [s for s, m in zip(self.child_labels, self.branching.untwisted_mask()) if not m]
        if set(twisted) != set(self.twisted_twists):
            raise SolverError(f"twists given for {sorted(self.twisted_twists)} but twisted sectors are {twisted}")
        names = set(self.child_labels)
        for f in self.fusion_facts:
            if not set(f) <= names:
                raise SolverError(f"fusion fact {f} names unknown sectors")
        for s, w in self.twisted_twists.items():
            if abs(abs(w) - 1) > 1e-9:
                raise SolverError(f"twist of {s} is not of unit modulus")

    @property
    def group_order(self) -> int:
        return self.branching.group_order

    @property
    def twisted_labels(self) -> tuple[str, ...]:
        return tuple(s for s in self.child_labels if s in self.twisted_twists)

    @property
    def grid(self) -> int:
        """Number of phases in the search grid (``8l`` for the families here)."""
        if self.grid_order:
            return int(self.grid_order)
        return max(8, int(round(self.group_order**2 * float(np.sum(self.parent.dims**2)))))

    def child_twists(self) -> np.ndarray:
        """Untwisted twists are inherited from any parent sector restricting to them."""
        b = self.branching.b
        out = []
        for lam, name in enumerate(self.child_labels):
            if name in self.twisted_twists:
                out.append(self.twisted_twists[name])
                continue
            rows = np.nonzero(b[:, lam])[0]
            vals = self.parent.twists[rows]
            if np.max(np.abs(vals - vals[0])) > 1e-9:
                raise SolverError(f"parent sectors restricting to {name} have different twists")
            out.append(vals[0])
        return np.array(out, dtype=complex)

    def child_phase(self) -> complex:
        """Principal cube root of ``C_parent^3``."""
        return cmath.exp(1j * principal_phase(self.parent.phaseC**3) / 3)


def _facts(l: int, suffix: str) -> tuple[tuple[str, str, str], ...]:
    return tuple((j + suffix, x + suffix, y + suffix) for j, x, y in aw.simple_current_action(l))


def spin_problem(l: int) -> SolverProblem:
    """Spin(2l)_2 inside SU(2l)_1; twisted twists from affine conformal weights."""
    w = aw.spin_level2_weights(l)
    tw = {f"{s}_hat": twist_vector([aw.conformal_weight(w[s], 2)])[0] for s in ("sigma_1", "sigma_2", "tau_1", "tau_2")}
    return SolverProblem(
        f"spin_level2({l})",
        families.build_su_m_level1(l),
        branching_su_to_spin(l),
        tuple(families.sector_names(l, hat=True)),
        tw,
        _facts(l, "_hat"),
        grid_order=8 * l,
    )


def orbifold_u1_problem(l: int) -> SolverProblem:
    """Z2-orbifold of u1(2l); twisted twists from coset conformal weights."""
    labs = aw.orbifold_coset_labels(l)
    tw = {s: twist_vector([labs[s].conformal_weight()])[0] for s in ("sigma_1", "sigma_2", "tau_1", "tau_2")}
    return SolverProblem(
        f"orbifold_u1({l})",
        families.build_u1(2 * l),
        branching_u1_to_orbifold(l),
        tuple(families.sector_names(l)),
        tw,
        _facts(l, ""),
        grid_order=8 * l,
    )


# ---------------------------------------------------------------------------
# Linear stage
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PartialS:
    """Affine parametrization ``X = base + sum_p param_p * basis[p]``.

    ``known`` marks entries independent of all parameters.  ``pivots[p]`` is
    the entry whose value is parameter ``p`` itself.
    """

    labels: tuple[str, ...]
    base: np.ndarray
    basis: np.ndarray  # shape (r, n, n)
    pivots: tuple[tuple[int, int], ...]
    residual: float
    log: tuple[str, ...]
    equations: tuple = field(default=(), repr=False)

    @property
    def known(self) -> np.ndarray:
        if len(self.basis) == 0:
            return np.ones(self.base.shape, dtype=bool)
        return np.all(np.abs(self.basis) < 1e-12, axis=0)

    @property
    def n_params(self) -> int:
        return len(self.basis)

    def undetermined(self, rows=None, cols=None) -> list[tuple[str, str]]:
        n = len(self.labels)
        rows = range(n) if rows is None else rows
        cols = range(n) if cols is None else cols
        k = self.known
        return [(self.labels[i], self.labels[j]) for i in rows for j in cols if not k[i, j]]

    def evaluate(self, params) -> np.ndarray:
        return self.base + np.tensordot(np.asarray(params, dtype=complex), self.basis, axes=1)


def _equations(problem: SolverProblem, stage: str) -> tuple[list[tuple[dict, complex, str]], list[str]]:
    """Linear equations ``sum coeff * X[i,j] = rhs``, tagged by origin.

    ``stage = "untwisted"`` keeps only equations among untwisted entries.
    """
    n = len(problem.child_labels)
    idx = {s: i for i, s in enumerate(problem.child_labels)}
    B = problem.branching.b.astype(float)
    SB = problem.parent.S @ B
    unt = problem.branching.untwisted_mask()
    w = problem.child_twists()
    only_unt = stage == "untwisted"
    eqs: list[tuple[dict, complex, str]] = []
    log: list[str] = []

    def keep(entries):
        return not only_unt or all(unt[i] and unt[j] for i, j in entries)

    count = 0
    for i in range(B.shape[0]):
        for nu in range(n):
            coeffs = {(lam, nu): B[i, lam] for lam in range(n) if B[i, lam]}
            if not coeffs and unt[nu]:
                continue
            if keep(coeffs) and (not only_unt or unt[nu]):
                eqs.append((coeffs, complex(SB[i, nu]), "intertwining"))
                count += 1
    log.append(f"intertwining: {count} equations")

    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if keep([(i, j)]):
                eqs.append(({(i, j): 1.0, (j, i): -1.0}, 0j, "symmetry"))
                count += 1
    log.append(f"symmetry: {count} equations")

    v = problem.vacuum
    count = 0
    for lam in range(n):
        m = problem.branching.b[0, lam]
        if m and lam != v:
            eqs.append(({(v, lam): 1.0, (v, v): -float(m)}, 0j, "vacuum row"))
            count += 1
    log.append(f"vacuum row: {count} equations")

    count = 0
    for J, x, Jx in problem.fusion_facts:
        a, c, cj = idx[J], idx[x], idx[Jx]
        for y in range(n):
            Jy = _image(problem, J, y, idx)
            if Jy is None:
                continue
            if keep([(cj, y), (c, y)]):
                phase = w[a] * w[y] / w[Jy]
                coeffs = {(cj, y): 1.0 + 0j}
                coeffs[(c, y)] = coeffs.get((c, y), 0j) - phase
                if abs(coeffs[(c, y)]) < 1e-12 and len(coeffs) == 1:
                    continue
                eqs.append((coeffs, 0j, "simple current"))
                count += 1
    log.append(f"simple-current relations: {count} equations")
    return eqs, log


def _image(problem: SolverProblem, J: str, y: int, idx: dict) -> int | None:
    name = problem.child_labels[y]
    for j, x, jx in problem.fusion_facts:
        if j == J and x == name:
            return idx[jx]
    return None


def _solve_linear(problem: SolverProblem, stage: str, tol: float) -> PartialS:
    n = len(problem.child_labels)
    eqs, log = _equations(problem, stage)
    A = np.zeros((len(eqs), n * n), dtype=complex)
    r = np.zeros(len(eqs), dtype=complex)
    for row, (coeffs, rhs, _) in enumerate(eqs):
        for (i, j), c in coeffs.items():
            A[row, i * n + j] += c
        r[row] = rhs
    if stage == "untwisted":
        # entries outside the untwisted block are not constrained at this stage
        unt = problem.branching.untwisted_mask()
        cols = [i * n + j for i in range(n) for j in range(n) if unt[i] and unt[j]]
    else:
        cols = list(range(n * n))
    As = A[:, cols]
    x, *_ = np.linalg.lstsq(As, r, rcond=None)
    residual = float(np.abs(As @ x - r).max()) if len(r) else 0.0
    if residual > tol:
        raise SolverError(f"linear constraints are inconsistent (residual {residual:.3e})")
    _, sv, vh = np.linalg.svd(As)
    rank = int(np.sum(sv > 1e-9 * max(1.0, sv[0] if len(sv) else 1.0)))
    K = vh[rank:].conj().T  # (len(cols), r)

    # Greedy pivots in row-major order: each parameter is the value of one entry.
    pivots: list[int] = []
    for u in range(K.shape[0]):
        if len(pivots) == K.shape[1]:
            break
        if np.linalg.matrix_rank(K[pivots + [u]], tol=1e-9) > len(pivots):
            pivots.append(u)
    if K.shape[1]:
        M = K @ np.linalg.inv(K[pivots])
        M[np.abs(M) < 1e-12] = 0
        x = x - M @ x[pivots]
        x[np.abs(x) < 1e-15] = 0
    else:
        M = np.zeros((len(cols), 0), dtype=complex)

    base = np.zeros(n * n, dtype=complex)
    base[cols] = x
    basis = np.zeros((M.shape[1], n * n), dtype=complex)
    basis[:, cols] = M.T
    piv = tuple(divmod(cols[p], n) for p in pivots)
    log.append(f"{stage} stage: rank {rank} over {len(cols)} entries, {len(piv)} free parameters")
    return PartialS(
        tuple(problem.child_labels),
        base.reshape(n, n),
        basis.reshape(len(piv), n, n),
        piv,
        residual,
        tuple(log),
        tuple(eqs),
    )


def derive_untwisted_block(problem: SolverProblem, tol: float = REL_TOL) -> PartialS:
    """Solve for the untwisted x untwisted block; fail if any entry stays free."""
    part = _solve_linear(problem, "untwisted", tol)
    unt = np.nonzero(problem.branching.untwisted_mask())[0]
    free = part.undetermined(unt, unt)
    if free:
        raise SolverError(f"untwisted block underdetermined at {free}")
    return part


def twisted_structure_constraints(problem: SolverProblem, partial: PartialS, tol: float = REL_TOL) -> PartialS:
    """Add the twisted-column constraints to the untwisted block solution."""
    full = _solve_linear(problem, "full", tol)
    unt = np.nonzero(problem.branching.untwisted_mask())[0]
    block = np.ix_(unt, unt)
    if full.undetermined(unt, unt) or np.abs(full.base[block] - partial.base[block]).max(initial=0.0) > tol:
        raise SolverError("twisted-sector constraints contradict the untwisted block")
    return PartialS(
        full.labels, full.base, full.basis, full.pivots, full.residual, partial.log + full.log[-1:], full.equations
    )


# ---------------------------------------------------------------------------
# Nonlinear stage
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SolverSolution:
    md: ModularData
    log: tuple[str, ...]
    residuals: dict

    def flat_key(self) -> tuple:
        return _flat_key(self.md.S)


def _flat_key(S: np.ndarray) -> tuple:
    v = np.round(S.reshape(-1), 9)
    return tuple(itertools.chain.from_iterable((float(z.real), float(z.imag)) for z in v))


def validate_candidate(
    md: ModularData, tol: float = REL_TOL, int_tol: float = INT_TOL
) -> tuple[bool, VerificationReport]:
    """Full verification plus a strictly positive real vacuum row."""
    rep = verify(md, tol, int_tol)
    row = md.S[md.vacuum]
    dev = max(float(np.abs(row.imag).max()), max(0.0, -float(row.real.min())))
    ok = dev <= tol and float(row.real.min()) > tol
    rep = VerificationReport(rep.subject, rep.checks + (Check("vacuum row positive", ok, dev, tol),))
    return rep.passed, rep


def _quadratic_system(partial: PartialS, values: np.ndarray, params: list[int], known: dict[int, complex], rows):
    """Equations linear in ``|t_p|^2`` from inner products ``<X_i, X_j> = delta_ij``.

    Pairs whose expansion has cross terms between distinct unknown parameters,
    or terms linear in an unknown, are skipped.
    """
    n = len(partial.labels)
    owner = np.full((n, n), -1)
    coef = np.zeros((n, n), dtype=complex)
    for p in range(partial.n_params):
        nz = np.abs(partial.basis[p]) > 0
        owner[nz] = p
        coef[nz] = partial.basis[p][nz]
    eqs, rhs = [], []
    for i, j in rows:
        row = np.zeros(len(params), dtype=complex)
        const = 0j
        ok = True
        for k in range(n):
            pi_, pj = owner[i, k], owner[j, k]
            xi = values[i, k] if pi_ < 0 else (coef[i, k] * known[pi_] if pi_ in known else None)
            xj = values[j, k] if pj < 0 else (coef[j, k] * known[pj] if pj in known else None)
            if xi is not None and xj is not None:
                const += xi * np.conj(xj)
            elif xi is None and xj is None and pi_ == pj and pi_ in params:
                row[params.index(pi_)] += coef[i, k] * np.conj(coef[j, k])
            else:
                ok = False
                break
        if ok and np.any(row != 0):
            eqs.append(row)
            rhs.append((1.0 if i == j else 0.0) - const)
    return np.array(eqs, dtype=complex).reshape(len(eqs), len(params)), np.array(rhs, dtype=complex)


def _solve_squares(A, r, params, what: str, tol: float) -> dict[int, float]:
    if len(params) == 0:
        return {}
    if A.shape[0] == 0:
        raise SolverError(f"no {what} equations available")
    Ar = np.vstack([A.real, A.imag])
    rr = np.concatenate([r.real, r.imag])
    s, *_ = np.linalg.lstsq(Ar, rr, rcond=None)
    if np.linalg.matrix_rank(Ar, tol=1e-9) < len(params):
        raise SolverError(f"{what} are not determined by unitarity")
    res = float(np.abs(Ar @ s - rr).max())
    if res > 1e-7:
        raise SolverError(f"unitarity is inconsistent for the {what} (residual {res:.3e})")
    if np.any(s < -1e-9):
        raise SolverError(f"unitarity forces negative squared {what}")
    return {p: max(0.0, float(v)) for p, v in zip(params, s)}


def solve_twisted_block(
    problem: SolverProblem,
    partial: PartialS,
    tol: float = REL_TOL,
    int_tol: float = INT_TOL,
) -> list[SolverSolution]:
    """All completions passing ``validate_candidate``, one per twisted-label orbit.

    Returns an empty list when no completion exists (e.g. wrong twisted twists).
    """
    n = len(partial.labels)
    vac = problem.vacuum
    values = partial.base
    log = list(partial.log)
    twists = problem.child_twists()
    C = problem.child_phase()
    T = C * twists

    all_rows = [(i, j) for i in range(n) for j in range(i, n)]
    try:
        vac_params = [p for p, (i, _) in enumerate(partial.pivots) if i == vac]
        A, r = _quadratic_system(partial, values, vac_params, {}, all_rows)
        # keep only equations that involve vacuum parameters alone
        s = _solve_squares(A, r, vac_params, "vacuum-row parameters", tol)
        known = {p: math.sqrt(v) for p, v in s.items()}
        log.append(f"vacuum-row parameters: {[round(known[p], 12) for p in vac_params]}")
        rest = [p for p in range(partial.n_params) if p not in known]
        A, r = _quadratic_system(partial, values, rest, known, all_rows)
        mags = {p: math.sqrt(v) for p, v in _solve_squares(A, r, rest, "parameter magnitudes", tol).items()}
    except SolverError as exc:
        log.append(f"no completion: {exc}")
        return []
    log.append(f"parameter magnitudes: {[round(mags[p], 12) for p in rest]}")

    search = [p for p in rest if mags[p] > 1e-9]
    grid = problem.grid
    phases = np.exp(1j * np.pi * np.arange(grid) / (grid / 2))
    log.append(f"phase search: {len(search)} parameters on a {grid}-point grid")

    found: list[SolverSolution] = []
    twisted_idx = [partial.labels.index(s) for s in problem.twisted_labels]
    for combo in itertools.product(range(grid), repeat=len(search)):
        t = np.zeros(partial.n_params, dtype=complex)
        for p, v in known.items():
            t[p] = v
        for p, q in zip(search, combo):
            t[p] = mags[p] * phases[q]
        X = partial.evaluate(t)
        TX = T[:, None] * X
        if np.abs(TX @ TX @ (T[:, None] * np.eye(n)) - X).max() > tol:
            continue
        md = ModularData(problem.name, partial.labels, vac, X, twists, C)
        ok, rep = validate_candidate(md, tol, int_tol)
        if not ok:
            continue
        inter = verify_intertwining(problem.parent, md, problem.branching, tol)
        if not inter.passed:
            continue
        found.append(
            SolverSolution(
                md,
                tuple(log + [f"phases q = {list(combo)}"]),
                {"relations": rep.max_relation_deviation, "intertwining": inter.deviation},
            )
        )
    return _dedupe(found, twisted_idx, n)


def _dedupe(found: list[SolverSolution], twisted_idx: list[int], n: int) -> list[SolverSolution]:
    found = sorted(found, key=SolverSolution.flat_key)
    kept: list[SolverSolution] = []
    perms = []
    for p in itertools.permutations(twisted_idx):
        order = list(range(n))
        for src, dst in zip(twisted_idx, p):
            order[src] = dst
        perms.append(order)
    for sol in found:
        S = sol.md.S
        if any(np.abs(S[np.ix_(o, o)] - k.md.S).max() < 1e-7 for k in kept for o in perms):
            continue
        kept.append(sol)
    return kept


def solve(problem: SolverProblem, tol: float = REL_TOL, int_tol: float = INT_TOL) -> list[SolverSolution]:
    """Run all three stages; ``SolverError`` from the linear stages becomes an empty result."""
    try:
        part = derive_untwisted_block(problem, tol)
        part = twisted_structure_constraints(problem, part, tol)
    except SolverError:
        return []
    return solve_twisted_block(problem, part, tol, int_tol)


def match_up_to_twisted_permutation(
    a: ModularData, b: ModularData, twisted: list[str], tol: float = REL_TOL
) -> tuple[float, list[int]]:
    """Smallest entrywise deviation of ``a.S`` from ``b.S`` over permutations of ``twisted``."""
    idx = [a.labels.index(s) for s in twisted]
    best = (math.inf, list(range(len(a))))
    for p in itertools.permutations(idx):
        order = list(range(len(a)))
        for src, dst in zip(idx, p):
            order[src] = dst
        dev = float(np.abs(a.S[np.ix_(order, order)] - b.S).max())
        if dev < best[0]:
            best = (dev, order)
    return best
