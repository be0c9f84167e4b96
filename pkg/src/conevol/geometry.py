"""Polytopes in V- and H-representation, volumes, facet data and centroids.

Both conversions are brute force over n-subsets: facets of a point set are
the hyperplanes through n affinely independent points that support every
point, vertices of a halfspace system are the feasible solutions of every
n x n subsystem.  Desk-scale inputs (tens of points, n <= 6) keep this cheap
and it has no special cases for degenerate (non-simple) polytopes.

Volumes are computed by a recursive cone decomposition over the face
lattice: a d-face is split into pyramids over its (d-1)-faces with apex at
the face's vertex average, down to polygons (shoelace) and segments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .config import INCIDENCE_TOL, SUBSET_CAP
from .errors import (
    CombinatorialLimit,
    DegenerateInput,
    Infeasible,
    OriginNotInterior,
    TooFewPoints,
    Unbounded,
)
from .linalg import affine_rank, numeric_rank

MIN_DIM = 2
MAX_DIM = 6
_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class Facet:
    normal: np.ndarray
    offset: float
    vertex_ids: tuple
    measure: float


@dataclass(frozen=True, eq=False)
class Polytope:
    """Full-dimensional bounded convex polytope carrying both descriptions.

    ``vertices`` are the extreme points only, sorted lexicographically.
    Facets are sorted by outer unit normal; ``offset`` is the signed distance
    of the facet hyperplane from the origin.
    """

    dim: int
    vertices: np.ndarray
    facets: tuple
    tol: float = INCIDENCE_TOL

    @cached_property
    def normals(self) -> np.ndarray:
        return np.array([f.normal for f in self.facets])

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.array([f.offset for f in self.facets])

    @cached_property
    def scale(self) -> float:
        return max(1.0, float(np.max(np.abs(self.vertices))))

    @cached_property
    def atol(self) -> float:
        return self.tol * self.scale

    @cached_property
    def _lattice(self) -> "_FaceLattice":
        return _FaceLattice(self.vertices, [f.vertex_ids for f in self.facets], self.atol)

    @cached_property
    def _volume_centroid(self):
        return self._lattice.measure(frozenset(range(len(self.vertices))))

    @property
    def volume(self) -> float:
        return self._volume_centroid[0]

    @property
    def centroid(self) -> np.ndarray:
        return self._volume_centroid[1]

    @cached_property
    def diameter(self) -> float:
        V = self.vertices
        d = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=-1)
        return float(d.max())

    def contains(self, x, tol: float | None = None) -> np.ndarray:
        tol = self.atol if tol is None else tol
        x = np.atleast_2d(x)
        return np.all(x @ self.normals.T <= self.offsets + tol, axis=1)

    def __repr__(self):
        return f"Polytope(dim={self.dim}, vertices={len(self.vertices)}, facets={len(self.facets)})"


class _FaceLattice:
    """Recursive (volume, centroid) of faces given by vertex-index sets."""

    def __init__(self, points, facet_sets, atol):
        self.points = np.asarray(points, dtype=float)
        self.facet_sets = [frozenset(s) for s in facet_sets]
        self.atol = atol
        self._memo = {}
        self._rank = {}

    def rank(self, face) -> int:
        r = self._rank.get(face)
        if r is None:
            r = affine_rank(self.points[sorted(face)], self.atol)
            self._rank[face] = r
        return r

    def subfaces(self, face, d):
        seen = set()
        for F in self.facet_sets:
            S = face & F
            if len(S) < d or S == face or S in seen:
                continue
            seen.add(S)
            if self.rank(S) == d - 1:
                yield S

    def measure(self, face, d=None, apex=None):
        """d-volume and centroid of the face spanned by ``face`` vertices."""
        if d is None:
            d = self.rank(face)
        key = face
        if apex is None and key in self._memo:
            return self._memo[key]
        pts = self.points[sorted(face)]
        if d == 0:
            out = (1.0, pts[0].copy())
        elif d == 1:
            out = _segment_measure(pts)
        elif d == 2:
            out = _polygon_measure(pts)
        else:
            c = pts.mean(axis=0) if apex is None else np.asarray(apex, dtype=float)
            vol = 0.0
            moment = np.zeros_like(c)
            for S in self.subfaces(face, d):
                vS, cS = self.measure(S, d - 1)
                h = _distance_to_affine_hull(c, self.points[sorted(S)])
                cone = vS * h / d
                vol += cone
                moment += cone * (c + d / (d + 1.0) * (cS - c))
            out = (vol, moment / vol if vol > 0 else c)
        if apex is None:
            self._memo[key] = out
        return out


def _segment_measure(pts):
    if len(pts) == 2:
        a, b = pts
    else:
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        i, j = np.unravel_index(np.argmax(d), d.shape)
        a, b = pts[i], pts[j]
    return float(np.linalg.norm(b - a)), 0.5 * (a + b)


def _polygon_measure(pts):
    """Area and centroid of a convex polygon embedded in R^n."""
    c = pts.mean(axis=0)
    Y = pts - c
    if pts.shape[1] == 2:
        xy = Y
    else:
        _, _, vt = np.linalg.svd(Y, full_matrices=False)
        xy = Y @ vt[:2].T
    order = np.argsort(np.arctan2(xy[:, 1], xy[:, 0]))
    xy = xy[order]
    P = pts[order]
    x, y = xy[:, 0], xy[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area2 = cross.sum()
    if area2 == 0.0:
        return 0.0, c
    # triangle fan from the vertex average; each triangle's centroid in R^n
    tri_cent = (c + P + np.roll(P, -1, axis=0)) / 3.0
    cent = (cross[:, None] * tri_cent).sum(axis=0) / area2
    return float(abs(area2) / 2.0), cent


def _distance_to_affine_hull(c, pts):
    base = pts[0]
    D = pts[1:] - base
    if len(D) == 0:
        return float(np.linalg.norm(c - base))
    _, s, vt = np.linalg.svd(D, full_matrices=False)
    r = int(np.sum(s > 1e-12 * max(1.0, s[0])))
    Q = vt[:r]
    w = c - base
    return float(np.linalg.norm(w - (w @ Q.T) @ Q))


def _check_dim(n):
    if not MIN_DIM <= n <= MAX_DIM:
        raise DegenerateInput(f"dimension {n} outside supported range [{MIN_DIM}, {MAX_DIM}]")


@lru_cache(maxsize=256)
def _combinations_cached(N, k):
    total = math.comb(N, k)
    flat = np.fromiter(
        (i for c in combinations(range(N), k) for i in c), dtype=np.intp, count=total * k
    )
    out = flat.reshape(total, k)
    out.setflags(write=False)
    return out


def _combinations_array(N, k, cap):
    total = math.comb(N, k)
    if total > cap:
        raise CombinatorialLimit(f"C({N},{k}) = {total} subsets exceeds cap {cap}")
    if total == 0:
        return np.zeros((0, k), dtype=np.intp)
    if total <= 200_000:
        return _combinations_cached(N, k)
    return _combinations_cached.__wrapped__(N, k)


def _dedupe_points(X, atol):
    """Drop points within ``atol`` of an earlier point, keeping input order."""
    X = np.asarray(X, dtype=float)
    if len(X) <= 1:
        return X
    close = np.linalg.norm(X[:, None, :] - X[None, :, :], axis=-1) <= atol
    dup = np.triu(close, 1).any(axis=0)
    return X[~dup]


def _canonical_order(X):
    keys = np.round(X, 9)
    return np.lexsort(keys.T[::-1])


def _assemble(vertices, normals, offsets, tol, incidence=None) -> Polytope:
    """Sort both descriptions canonically and compute facet measures."""
    V = np.asarray(vertices, dtype=float)
    A = np.asarray(normals, dtype=float)
    b = np.asarray(offsets, dtype=float)
    n = V.shape[1]
    vorder = _canonical_order(V)
    V = V[vorder]
    forder = _canonical_order(A)
    A, b = A[forder], b[forder]
    atol = tol * max(1.0, float(np.max(np.abs(V))))
    if incidence is None:
        slack = np.abs(V @ A.T - b)
        sets = [tuple(np.nonzero(slack[:, i] <= atol)[0]) for i in range(len(A))]
    else:
        inv = np.empty(len(vorder), dtype=np.intp)
        inv[vorder] = np.arange(len(vorder))
        sets = [tuple(sorted(inv[list(incidence[i])])) for i in forder]
    lattice = _FaceLattice(V, sets, atol)
    facets = []
    for a, off, ids in zip(A, b, sets):
        meas, _ = lattice.measure(frozenset(ids), n - 1)
        a = a + 0.0  # no negative zeros in output
        a.setflags(write=False)
        facets.append(Facet(a, float(off), tuple(int(i) for i in ids), float(meas)))
    V.setflags(write=False)
    P = Polytope(n, V, tuple(facets), tol)
    # share the sub-face memo with the polytope's own lattice
    P.__dict__["_lattice"] = lattice
    return P


def supporting_hyperplanes(X, atol, cap=SUBSET_CAP):
    """All facet hyperplanes of conv(X) by n-subset search.

    Returns (normals, offsets, incidence) with outer normals oriented away
    from the point average.
    """
    X = np.asarray(X, dtype=float)
    N, n = X.shape
    combos = _combinations_array(N, n, cap)
    found = {}
    for start in range(0, len(combos), _CHUNK):
        c = combos[start:start + _CHUNK]
        P0 = X[c[:, 0]]
        D = X[c[:, 1:]] - P0[:, None, :]
        _, s, vt = np.linalg.svd(D)
        ok = s[:, -1] > atol
        normal = vt[:, -1, :]
        off = np.einsum("ij,ij->i", normal, P0)
        S = X @ normal.T - off
        supp = ok & ((S <= atol).all(axis=0) | (S >= -atol).all(axis=0))
        for j in np.nonzero(supp)[0]:
            key = frozenset(np.nonzero(np.abs(S[:, j]) <= atol)[0].tolist())
            found.setdefault(key, None)
    inner = X.mean(axis=0)
    normals, offsets, incidence = [], [], []
    for key in sorted(found, key=sorted):
        pts = X[sorted(key)]
        m = pts.mean(axis=0)
        _, _, vt = np.linalg.svd(pts - m)
        a = vt[-1]
        if a @ inner > a @ m:
            a = -a
        normals.append(a)
        offsets.append(float(a @ m))
        incidence.append(tuple(sorted(key)))
    return np.array(normals), np.array(offsets), incidence


def build_from_vertices(points, tol: float = INCIDENCE_TOL, cap: int = SUBSET_CAP) -> Polytope:
    """Convex hull of a point set, with facets found by brute force.

    Raises:
        TooFewPoints: fewer than n + 1 distinct points.
        DegenerateInput: the points lie in a proper affine subspace.
    """
    X = np.atleast_2d(np.asarray(points, dtype=float))
    n = X.shape[1]
    _check_dim(n)
    atol = tol * max(1.0, float(np.max(np.abs(X))))
    X = _dedupe_points(X, atol)
    if len(X) < n + 1:
        raise TooFewPoints(f"need at least {n + 1} distinct points in R^{n}, got {len(X)}")
    if affine_rank(X, atol) < n:
        raise DegenerateInput("points do not span R^%d affinely" % n)
    A, b, inc = supporting_hyperplanes(X, atol, cap)
    # a point is extreme iff the normals of the facets through it span R^n
    through = [[] for _ in range(len(X))]
    for i, ids in enumerate(inc):
        for v in ids:
            through[v].append(i)
    extreme = [v for v in range(len(X)) if through[v] and numeric_rank(A[through[v]]) == n]
    return _assemble(X[extreme], A, b, tol)


def enumerate_vertices(A, b, atol, cap=SUBSET_CAP):
    """Vertices of {x : A x <= b} by solving every n x n subsystem.

    Rows need not be normalized. Returns an (N, n) array, possibly empty.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = A.shape
    norms = np.linalg.norm(A, axis=1)
    zero = norms <= 1e-14
    if np.any(b[zero] < -atol):
        return np.zeros((0, n))
    A, b = A[~zero] / norms[~zero, None], b[~zero] / norms[~zero]
    if len(A) < n:
        return np.zeros((0, n))
    combos = _combinations_array(len(A), n, cap)
    out = []
    for start in range(0, len(combos), _CHUNK):
        c = combos[start:start + _CHUNK]
        M = A[c]
        s = np.linalg.svd(M, compute_uv=False)
        ok = s[:, -1] > 1e-10
        if not np.any(ok):
            continue
        x = np.linalg.solve(M[ok], b[c[ok]][..., None])[..., 0]
        feas = np.all(x @ A.T <= b + atol, axis=1)
        out.append(x[feas])
    if not out:
        return np.zeros((0, n))
    X = np.concatenate(out)
    if len(X) == 0:
        return X
    return _dedupe_points(X, 10 * atol)


def _certify_bounded(A):
    m, n = A.shape
    if numeric_rank(A) < n:
        raise Unbounded("facet normals do not span R^%d" % n)
    # max t  s.t.  sum l_i a_i = 0, sum l_i = 1, l_i >= t
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((n + 1, m + 1))
    A_eq[:n, :m] = A.T
    A_eq[n, :m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(m), A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, None)] * m + [(None, 1.0)], method="highs")
    if res.status != 0 or -res.fun <= 1e-12:
        raise Unbounded("halfspace system has a nontrivial recession cone")


def chebyshev_center(A, b):
    """Center and radius of the largest ball inside {A x <= b} (unit rows)."""
    m, n = A.shape
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([A, np.ones((m, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=b, bounds=[(None, None)] * (n + 1), method="highs")
    if res.status != 0:
        raise Infeasible("could not certify an interior point: " + res.message)
    return res.x[:n], float(res.x[-1])


def build_from_halfspaces(normals, offsets, tol: float = INCIDENCE_TOL,
                          cap: int = SUBSET_CAP) -> Polytope:
    """Polytope {x : <a_i, x> <= b_i}; redundant halfspaces are dropped.

    Raises:
        Unbounded: the recession cone is nontrivial.
        Infeasible: the system has no solution.
        DegenerateInput: the solution set has empty interior.
    """
    A = np.atleast_2d(np.asarray(normals, dtype=float))
    b = np.asarray(offsets, dtype=float).reshape(-1)
    if len(A) != len(b):
        raise ValueError("normals and offsets differ in length")
    n = A.shape[1]
    _check_dim(n)
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise DegenerateInput("zero normal vector")
    A, b = A / norms[:, None], b / norms
    if len(A) < n + 1:
        raise Unbounded(f"{len(A)} halfspaces cannot bound a region of R^{n}")
    _certify_bounded(A)
    _, radius = chebyshev_center(A, b)
    atol = tol * max(1.0, float(np.max(np.abs(b))))
    if radius < -atol:
        raise Infeasible("halfspace system is infeasible")
    if radius <= atol:
        raise DegenerateInput("halfspace system has empty interior")
    V = enumerate_vertices(A, b, atol, cap)
    atol = tol * max(1.0, float(np.max(np.abs(V))))
    slack = np.abs(V @ A.T - b)
    keep, seen = [], set()
    for i in range(len(A)):
        ids = frozenset(np.nonzero(slack[:, i] <= atol)[0].tolist())
        if len(ids) < n or ids in seen:
            continue
        if affine_rank(V[sorted(ids)], atol) == n - 1:
            seen.add(ids)
            keep.append(i)
    return _assemble(V, A[keep], b[keep], tol)


def volume(P: Polytope, apex=None) -> float:
    """n-volume as a sum of pyramids over the facets.

    The apex defaults to the vertex average; any interior point gives the
    same value up to rounding.
    """
    if apex is None:
        return P.volume
    return P._lattice.measure(frozenset(range(len(P.vertices))), P.dim, apex=apex)[0]


def centroid(P: Polytope) -> np.ndarray:
    return P.centroid.copy()


def facet_data(P: Polytope):
    """List of (outer unit normal, offset, (n-1)-volume) per facet."""
    return [(f.normal, f.offset, f.measure) for f in P.facets]


def translate(P: Polytope, t) -> Polytope:
    t = np.asarray(t, dtype=float)
    V = P.vertices + t
    V.setflags(write=False)
    facets = tuple(
        Facet(f.normal, float(f.offset + f.normal @ t), f.vertex_ids, f.measure) for f in P.facets
    )
    return Polytope(P.dim, V, facets, P.tol)


def center_at_centroid(P: Polytope) -> Polytope:
    """Translated copy with the centroid at the origin."""
    Q = translate(P, -P.centroid)
    # one refinement step absorbs the rounding of the first centroid
    residual = Q.centroid
    if np.linalg.norm(residual) > 0:
        Q = translate(Q, -residual)
    if np.any(Q.offsets <= Q.atol):
        raise OriginNotInterior("centroid is not interior; polytope is degenerate")
    return Q


def linear_image(P: Polytope, T) -> Polytope:
    """Image under an invertible linear map (normals go by inverse transpose)."""
    T = np.asarray(T, dtype=float)
    V = P.vertices @ T.T
    N = P.normals @ np.linalg.inv(T)
    r = np.linalg.norm(N, axis=1)
    return _assemble(V, N / r[:, None], P.offsets / r, P.tol,
                     incidence=[f.vertex_ids for f in P.facets])


def require_origin_interior(P: Polytope):
    bad = [i for i, f in enumerate(P.facets) if f.offset <= P.atol]
    if bad:
        raise OriginNotInterior(
            f"origin is not strictly interior: offsets of facets {bad} are <= {P.atol:g}"
        )


def section_vertices(P: Polytope, point, basis, cap: int = SUBSET_CAP) -> np.ndarray:
    """Vertices of P & (point + column span of ``basis``), in basis coordinates."""
    basis = np.asarray(basis, dtype=float)
    A = P.normals @ basis
    b = P.offsets - P.normals @ np.asarray(point, dtype=float)
    return enumerate_vertices(A, b, P.atol, cap)


def section_volume(P: Polytope, point, basis, cap: int = SUBSET_CAP) -> float:
    """d-volume of P & (point + span(basis)) for an orthonormal d-column basis.

    Sections of dimension below d have volume 0.
    """
    return SectionFamily(P, basis, cap).volume(point)


class SectionFamily:
    """Sections of P by the translates point + span(basis) of one flat.

    The restricted constraint normals do not depend on the translate, so
    the inverses of all d x d subsystems (and, for d = 3, an in-plane basis
    per constraint) are prepared once and each section costs a batched
    matrix-vector product plus the volume sum.
    """

    def __init__(self, P: Polytope, basis, cap: int = SUBSET_CAP):
        self.P = P
        self.basis = np.asarray(basis, dtype=float)
        self.d = d = self.basis.shape[1]
        A = P.normals @ self.basis
        norms = np.linalg.norm(A, axis=1)
        self.live = norms > 1e-14
        self.norms = norms[self.live]
        self.A = A[self.live] / self.norms[:, None]
        if d >= 2 and len(self.A) >= d:
            combos = _combinations_array(len(self.A), d, cap)
            M = self.A[combos]
            sv = np.linalg.svd(M, compute_uv=False)
            ok = sv[:, -1] > 1e-10
            self.combos = combos[ok]
            self.inverses = np.linalg.inv(M[ok])
        else:
            self.combos = np.zeros((0, d), dtype=np.intp)
            self.inverses = np.zeros((0, d, d))
        if d == 3:
            a = self.A
            e1 = np.cross(a, np.eye(3)[np.argmin(np.abs(a), axis=1)])
            e1 /= np.linalg.norm(e1, axis=1)[:, None]
            self.plane = np.stack([e1, np.cross(a, e1)], axis=1)

    def offsets(self, point):
        b = self.P.offsets - self.P.normals @ np.asarray(point, dtype=float)
        if np.any(b[~self.live] < -self.P.atol):
            return None
        return b[self.live] / self.norms

    def vertices(self, point) -> np.ndarray:
        """Section vertices in basis coordinates (empty if the section is)."""
        b = self.offsets(point)
        if b is None or len(self.combos) == 0:
            return np.zeros((0, self.d))
        X = np.einsum("cij,cj->ci", self.inverses, b[self.combos])
        X = X[np.all(X @ self.A.T <= b + self.P.atol, axis=1)]
        return _dedupe_points(X, 10 * self.P.atol)

    def volume(self, point) -> float:
        d = self.d
        atol = self.P.atol
        if d == 1:
            b = self.offsets(point)
            if b is None:
                return 0.0
            a = self.A[:, 0]
            hi = np.min(b[a > 0] / a[a > 0])
            lo = np.max(b[a < 0] / a[a < 0])
            return float(max(hi - lo, 0.0))
        b = self.offsets(point)
        if b is None:
            return 0.0
        Y = self.vertices(point)
        if len(Y) < d + 1 or affine_rank(Y, atol) < d:
            return 0.0
        if d == 2:
            return _polygon_measure(Y)[0]
        incident = np.abs(Y @ self.A.T - b) <= atol
        if d == 3:
            return _volume3(Y, b, incident, self.A, self.plane)
        sets = {frozenset(np.nonzero(incident[:, i])[0].tolist()) for i in range(len(self.A))}
        lattice = _FaceLattice(Y, [s for s in sets if len(s) >= d], atol)
        return lattice.measure(frozenset(range(len(Y))), d)[0]


def _volume3(Y, b, incident, A, plane):
    """Volume of a 3-polytope from vertices and unit-normal halfspaces.

    Three or more vertices on a supporting plane always form a facet in
    R^3 (vertices of a convex body are never collinear), so no rank test
    is needed. All facet polygons are ordered by angle in one lexsort and
    summed as cone volumes from the vertex average.
    """
    cols = np.nonzero(incident.sum(axis=0) >= 3)[0]
    if len(Y) < 63:
        keys = (np.int64(1) << np.arange(len(Y), dtype=np.int64)) @ incident[:, cols]
    else:
        keys = [incident[:, j].tobytes() for j in cols]
    _, first = np.unique(keys, return_index=True)
    F = cols[np.sort(first)]
    fi, vi = np.nonzero(incident[:, F].T)
    P2 = plane[F[fi]]
    zx = np.einsum("ij,ij->i", Y[vi], P2[:, 0])
    zy = np.einsum("ij,ij->i", Y[vi], P2[:, 1])
    count = np.bincount(fi)
    zx -= (np.bincount(fi, zx) / count)[fi]
    zy -= (np.bincount(fi, zy) / count)[fi]
    order = np.lexsort((np.arctan2(zy, zx), fi))
    fi, zx, zy = fi[order], zx[order], zy[order]
    start = np.concatenate(([0], np.cumsum(count)[:-1]))
    nxt = np.arange(len(fi)) + 1
    nxt[np.cumsum(count) - 1] = start
    area = 0.5 * np.bincount(fi, zx * zy[nxt] - zx[nxt] * zy)
    c = Y.mean(axis=0)
    return math.fsum(area * (b[F] - A[F] @ c) / 3.0)
