"""Subspace concentration checks for cone-volume measures of polytopes.

Why only spans of normals are enumerated: the measure is atomic on the set A
of facet normals, so for any subspace L, mu(L) = mu(span(A & L)) and
dim span(A & L) <= dim L.  The inequality mu(L) <= dim(L)/n * mu(S^{n-1})
therefore holds for every L as soon as it holds for every span of a subset
of A, and equality for L forces equality for span(A & L).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .config import INCIDENCE_TOL, PROJECTION_DEDUP_TOL, SUBSET_CAP, SUBSPACE_TOL
from .errors import CombinatorialLimit, NotCentered
from .geometry import Polytope, center_at_centroid, section_vertices
from .linalg import Subspace, numeric_rank
from .measure import ConeVolumeMeasure, borderline_atoms, cone_volume_measure, measure_of_subspace

log = logging.getLogger(__name__)

STRICT = "strict"
EQUALITY = "equality"
VIOLATION = "violation"


def _members(normals, L, tol):
    return tuple(int(i) for i in np.nonzero(L.residual(normals) <= tol)[0])


def enumerate_normal_spans(mu: ConeVolumeMeasure, tol: float = SUBSPACE_TOL,
                           cap: int = SUBSET_CAP) -> list:
    """Every distinct proper subspace spanned by a subset of the atom normals.

    Spans are grown one normal at a time from single normals, so each output
    is closed: ``members`` lists every atom inside it.

    Raises:
        CombinatorialLimit: more than ``cap`` span extensions were needed.
    """
    A = mu.normals
    m, n = A.shape
    found = {}
    level = []
    for i in range(m):
        L = Subspace.span(A[[i]])
        mem = _members(A, L, tol)
        if mem not in found:
            found[mem] = Subspace(L.basis, mem)
            level.append(found[mem])
    steps = m
    for _ in range(2, n):
        nxt = []
        for L in level:
            inside = set(L.members)
            for j in range(m):
                if j in inside:
                    continue
                steps += 1
                if steps > cap:
                    raise CombinatorialLimit(f"span enumeration exceeded {cap} steps")
                # candidate = span(L, a_j); refit from all members for accuracy
                cand = Subspace.span(np.vstack([L.basis.T, A[j]]))
                mem = _members(A, cand, tol)
                if mem in found:
                    continue
                S = Subspace.span(A[list(mem)], members=mem)
                if S.dim != L.dim + 1:
                    continue
                found[mem] = S
                nxt.append(S)
        level = nxt
    spans = sorted(found.values(), key=lambda S: (S.dim, S.members))
    # members already identify a closed span; this guards against tolerance noise
    out = []
    for S in spans:
        if all(T.dim != S.dim or S.distance(T) > PROJECTION_DEDUP_TOL for T in out):
            out.append(S)
    return out


def complementary_witness(mu: ConeVolumeMeasure, L: Subspace, tol: float = SUBSPACE_TOL):
    """Subspace L' complementary to L holding every normal outside L, or None."""
    n = mu.dim
    outside = ~mu.mask(L, tol)
    if not np.any(outside):
        return None
    Lbar = Subspace.span(mu.normals[outside])
    if L.dim + Lbar.dim != n:
        return None
    if numeric_rank(np.hstack([L.basis, Lbar.basis])) != n:
        return None
    if not Lbar.contains(mu.normals[outside], tol):
        return None
    return Subspace(Lbar.basis, tuple(int(i) for i in np.nonzero(outside)[0]))


@dataclass
class SccRow:
    subspace: Subspace
    mass: float
    bound: float
    status: str
    witness: Subspace | None = None
    borderline: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.subspace.dim

    @property
    def ratio(self) -> float:
        return self.mass / self.bound

    @property
    def consistent(self) -> bool:
        # equality holds exactly when the normals split
        return (self.status == EQUALITY) == (self.witness is not None)

    def to_dict(self):
        return {
            "dim": self.k,
            "members": list(self.subspace.members),
            "basis": self.subspace.basis.T.tolist(),
            "mass": self.mass,
            "bound": self.bound,
            "ratio": self.ratio,
            "status": self.status,
            "witness_members": None if self.witness is None else list(self.witness.members),
            "borderline_atoms": self.borderline,
        }


@dataclass
class SccReport:
    dim: int
    total: float
    rows: list
    tol: float

    @property
    def violations(self):
        return [r for r in self.rows if r.status == VIOLATION]

    @property
    def equalities(self):
        return [r for r in self.rows if r.status == EQUALITY]

    @property
    def inconsistencies(self):
        return [r for r in self.rows if r.status != VIOLATION and not r.consistent]

    @property
    def worst_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)

    @property
    def passed(self) -> bool:
        return not self.violations and not self.inconsistencies

    def to_dict(self):
        return {
            "dim": self.dim,
            "total": self.total,
            "tol": self.tol,
            "passed": self.passed,
            "worst_ratio": self.worst_ratio,
            "violations": len(self.violations),
            "equalities": len(self.equalities),
            "equalities_without_witness": sum(
                1 for r in self.equalities if r.witness is None),
            "rows": [r.to_dict() for r in self.rows],
        }


def ensure_centered(P: Polytope, tol: float, auto_center: bool) -> Polytope:
    c = P.centroid
    if np.linalg.norm(c) <= tol * P.scale:
        return P
    if auto_center:
        return center_at_centroid(P)
    raise NotCentered(f"centroid {c.tolist()} is not at the origin (|c| = {np.linalg.norm(c):.3g})")


def check_scc_measure(mu: ConeVolumeMeasure, tol: float = 1e-9,
                      subspace_tol: float = SUBSPACE_TOL, cap: int = SUBSET_CAP) -> SccReport:
    """Check mu(L) <= dim(L)/n * mu(S^{n-1}) over all spans of atom normals.

    Equality rows must come with a complementary witness; an equality
    without one is a failure of the equality characterization, reported
    through ``inconsistencies`` rather than as a violation.
    """
    n = mu.dim
    tol_abs = tol * mu.total
    rows = []
    for L in enumerate_normal_spans(mu, subspace_tol, cap):
        mass = measure_of_subspace(mu, L, subspace_tol)
        bound = L.dim / n * mu.total
        if mass > bound + tol_abs:
            status = VIOLATION
        elif abs(mass - bound) <= tol_abs:
            status = EQUALITY
        else:
            status = STRICT
        row = SccRow(L, mass, bound, status, complementary_witness(mu, L, subspace_tol),
                     borderline_atoms(mu, L, subspace_tol))
        if row.borderline:
            log.warning("atoms %s are borderline members of a %d-dim span", row.borderline, L.dim)
        rows.append(row)
    return SccReport(n, mu.total, rows, tol)


def check_scc(P: Polytope, tol: float = 1e-9, auto_center: bool = False,
              subspace_tol: float = SUBSPACE_TOL, cap: int = SUBSET_CAP) -> SccReport:
    """Subspace concentration check for the cone-volume measure of P.

    Raises:
        NotCentered: the centroid is off the origin and auto_center is False.
    """
    P = ensure_centered(P, tol, auto_center)
    return check_scc_measure(cone_volume_measure(P), tol, subspace_tol, cap)


@dataclass
class DirectSumSplit:
    """P = (P & L_perp) + (P & Lbar_perp) for complementary L, Lbar."""

    L: Subspace
    Lbar: Subspace
    section_L_perp: np.ndarray
    section_Lbar_perp: np.ndarray


def _section_through_origin(P, S: Subspace):
    Y = section_vertices(P, np.zeros(P.dim), S.basis)
    return Y @ S.basis.T


def detect_direct_sum_split(P: Polytope, L: Subspace, tol: float = INCIDENCE_TOL,
                            subspace_tol: float = SUBSPACE_TOL):
    """Decompose P as a Minkowski sum of sections if its normals split along L.

    Needs the origin in the interior of P. Returns a DirectSumSplit, or None
    when no complementary subspace carries the remaining normals or the
    reconstructed sum does not reproduce P.
    """
    mu = ConeVolumeMeasure(P.dim, P.normals, np.ones(len(P.facets)))
    Lbar = complementary_witness(mu, L, subspace_tol)
    if Lbar is None:
        return None
    Q2 = _section_through_origin(P, L.complement())
    Q1 = _section_through_origin(P, Lbar.complement())
    if len(Q1) == 0 or len(Q2) == 0:
        return None
    sums = (Q1[:, None, :] + Q2[None, :, :]).reshape(-1, P.dim)
    atol = max(tol, 1e-9) * P.scale * 10
    if not np.all(P.contains(sums, atol)):
        return None
    d = np.linalg.norm(P.vertices[:, None, :] - sums[None, :, :], axis=-1)
    if np.any(d.min(axis=1) > atol):
        return None
    return DirectSumSplit(L, Lbar, Q2, Q1)


def normals_form_parallelotope(normals, n: int, tol: float = 1e-9) -> bool:
    """True iff the normals are n antipodal pairs with independent representatives."""
    A = np.asarray(normals, dtype=float)
    if len(A) != 2 * n:
        return False
    unpaired = list(range(len(A)))
    reps = []
    while unpaired:
        i = unpaired.pop(0)
        partner = next((j for j in unpaired if np.linalg.norm(A[i] + A[j]) <= tol), None)
        if partner is None:
            return False
        unpaired.remove(partner)
        reps.append(A[i])
    return numeric_rank(np.array(reps)) == n


def is_parallelotope(P: Polytope, tol: float = 1e-9) -> bool:
    return normals_form_parallelotope(P.normals, P.dim, tol)
