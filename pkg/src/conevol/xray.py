"""Slice-volume functions (X-rays) of polytopes.

For a k-dimensional subspace L, f_L(x) is the (n-k)-volume of the section
P & (x + L_perp), x in P|L.  For k = 1 and L = span(u), f is a polynomial of
degree <= n-1 between consecutive projections <v, u> of the vertices; it is
recovered here by interpolation on each cell and validated on held-out
points, after which integrals and moments are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.legendre import leggauss

from .config import SUBSPACE_TOL
from .errors import InterpolationMismatch, ToleranceFailure
from .geometry import Polytope, SectionFamily, section_vertices
from .linalg import Subspace, orthogonal_complement

BREAKPOINT_TOL = 1e-9
HELD_OUT_TOL = 1e-8


def _as_subspace(L, n):
    if isinstance(L, Subspace):
        return L
    return Subspace.span(np.atleast_2d(L))


class _Xray:
    """f_L with the complement basis computed once."""

    def __init__(self, P: Polytope, L: Subspace):
        self.P = P
        self.L = L
        self.perp = orthogonal_complement(L.basis)
        self.family = SectionFamily(P, self.perp)

    def __call__(self, x) -> float:
        point = self.L.basis @ np.atleast_1d(np.asarray(x, dtype=float))
        return self.family.volume(point)


def xray_value(P: Polytope, L, x) -> float:
    """(n-k)-volume of P & (x + L_perp); ``x`` is given in L's basis coordinates.

    Empty or lower-dimensional sections give 0.
    """
    L = _as_subspace(L, P.dim)
    return _Xray(P, L)(x)


@dataclass
class PiecewisePolynomial:
    """k = 1 X-ray along ``direction`` as one polynomial per cell.

    ``cells[i]`` lives on [breakpoints[i], breakpoints[i+1]] and is stored
    with that interval as its domain, which keeps short cells well
    conditioned.
    """

    direction: np.ndarray
    breakpoints: np.ndarray
    cells: list
    residuals: list = field(default_factory=list)
    max_value: float = 0.0

    @property
    def degree(self) -> int:
        return max(p.degree() for p in self.cells)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1,
                      0, len(self.cells) - 1)
        out = np.zeros_like(t)
        inside = (t >= self.breakpoints[0]) & (t <= self.breakpoints[-1])
        for i, p in enumerate(self.cells):
            sel = inside & (idx == i)
            out[sel] = p(t[sel])
        return out if out.ndim else float(out)

    def _cell_integrals(self, weight):
        total = []
        for p, a, b in zip(self.cells, self.breakpoints[:-1], self.breakpoints[1:]):
            q = weight(p).integ()
            total.append(q(b) - q(a))
        return math.fsum(total)

    def integral(self) -> float:
        return self._cell_integrals(lambda p: p)

    def first_moment(self) -> float:
        return self._cell_integrals(lambda p: p * _identity(p))

    def gradient_moment(self) -> float:
        return self._cell_integrals(lambda p: p.deriv() * _identity(p))

    def endpoint_values(self):
        return float(self.cells[0](self.breakpoints[0])), float(self.cells[-1](self.breakpoints[-1]))

    def continuity_defect(self) -> float:
        """Largest jump between adjacent cells, relative to max f."""
        jumps = [abs(p(t) - q(t)) for p, q, t in
                 zip(self.cells[:-1], self.cells[1:], self.breakpoints[1:-1])]
        return max(jumps, default=0.0) / max(self.max_value, 1e-300)

    def to_dict(self):
        return {
            "direction": self.direction.tolist(),
            "breakpoints": self.breakpoints.tolist(),
            # ascending powers of t
            "coefficients": [p.convert(domain=[-1, 1], window=[-1, 1]).coef.tolist()
                             for p in self.cells],
        }

    @classmethod
    def from_dict(cls, data):
        bp = np.asarray(data["breakpoints"], dtype=float)
        cells = [Polynomial(c).convert(domain=[a, b]) for c, a, b in
                 zip(data["coefficients"], bp[:-1], bp[1:])]
        pp = cls(np.asarray(data["direction"], dtype=float), bp, cells)
        pp.max_value = max(float(np.max(np.abs(p(np.linspace(a, b, 5))))) for p, a, b in
                           zip(cells, bp[:-1], bp[1:]))
        return pp


def _identity(p):
    return Polynomial.identity(domain=p.domain, window=p.window)


def breakpoints(P: Polytope, u, tol: float = BREAKPOINT_TOL) -> np.ndarray:
    proj = np.sort(P.vertices @ np.asarray(u, dtype=float))
    atol = tol * P.scale
    keep = [proj[0]]
    for t in proj[1:]:
        if t - keep[-1] > atol:
            keep.append(t)
    return np.array(keep)


def _chebyshev_nodes(a, b, n):
    j = np.arange(n)
    return 0.5 * (a + b) + 0.5 * (b - a) * np.cos((2 * j + 1) * np.pi / (2 * n))


def xray_piecewise(P: Polytope, u, validate: bool = True,
                   held_out_tol: float = HELD_OUT_TOL) -> PiecewisePolynomial:
    """Interpolate the k = 1 X-ray along ``u`` cell by cell.

    Each cell gets a degree n-1 interpolant through n Chebyshev nodes and is
    compared with the true section volume at 2n further interior points.

    Raises:
        InterpolationMismatch: a held-out residual exceeds held_out_tol * max f.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    n = P.dim
    f = _Xray(P, Subspace(u[:, None]))
    bp = breakpoints(P, u)
    cells, checks = [], []
    fmax = 0.0
    for a, b in zip(bp[:-1], bp[1:]):
        t = _chebyshev_nodes(a, b, n)
        y = np.array([f(s) for s in t])
        p = Polynomial.fit(t, y, deg=n - 1, domain=[a, b])
        th = a + (b - a) * np.arange(1, 2 * n + 1) / (2 * n + 1)
        yh = np.array([f(s) for s in th])
        fmax = max(fmax, float(y.max()), float(yh.max()))
        cells.append(p)
        checks.append(float(np.max(np.abs(p(th) - yh))))
    residuals = [r / fmax for r in checks]
    pp = PiecewisePolynomial(u, bp, cells, residuals, fmax)
    if validate and max(residuals) > held_out_tol:
        worst = int(np.argmax(residuals))
        raise InterpolationMismatch(
            f"cell {worst} [{bp[worst]:.6g}, {bp[worst + 1]:.6g}] held-out residual "
            f"{residuals[worst]:.3g} exceeds {held_out_tol:g} of max f"
        )
    return pp


def first_moment(pp: PiecewisePolynomial) -> float:
    """Integral of t f(t) dt."""
    return pp.first_moment()


def gradient_moment(pp: PiecewisePolynomial) -> float:
    """Integral of t f'(t) dt over the open cells."""
    return pp.gradient_moment()


@dataclass
class DivergenceIdentityRecord:
    direction: np.ndarray
    lhs: float
    k_volume: float
    gradient_moment: float
    members: tuple
    tol: float

    @property
    def rhs(self) -> float:
        return self.k_volume + self.gradient_moment

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol * self.k_volume

    def to_dict(self):
        return {
            "direction": self.direction.tolist(),
            "lhs": self.lhs,
            "kV": self.k_volume,
            "gradient_moment": self.gradient_moment,
            "rhs": self.rhs,
            "residual": self.residual,
            "members": list(self.members),
            "passed": self.passed,
        }


def divergence_identity(P: Polytope, u, tol: float = 1e-8, pp: PiecewisePolynomial | None = None,
                        subspace_tol: float = SUBSPACE_TOL, strict: bool = True):
    """Both sides of  sum_{a_i in span(u)} V_{n-1}(F_i) b_i = V(P) + int t f'(t) dt.

    Raises:
        ToleranceFailure: |lhs - rhs| > tol * V(P) and ``strict`` is set.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if pp is None:
        pp = xray_piecewise(P, u)
    L = Subspace(u[:, None])
    inside = L.residual(P.normals) <= subspace_tol
    lhs = math.fsum(f.measure * f.offset for f, ok in zip(P.facets, inside) if ok)
    rec = DivergenceIdentityRecord(u, lhs, P.volume, pp.gradient_moment(),
                                   tuple(int(i) for i in np.nonzero(inside)[0]), tol)
    if strict and not rec.passed:
        raise ToleranceFailure(
            f"divergence identity off by {rec.residual:.3g} (lhs {rec.lhs!r}, rhs {rec.rhs!r})",
            rec.lhs, rec.rhs)
    return rec


def _projected_vertices(P, L):
    return P.vertices @ L.basis


def interior_samples(P: Polytope, L: Subspace, count: int, seed=0) -> np.ndarray:
    """Random convex combinations of the projected vertices (L coordinates)."""
    W = _projected_vertices(P, L)
    rng = np.random.default_rng(seed)
    lam = rng.dirichlet(np.ones(len(W)), size=count)
    return lam @ W


@dataclass
class LogConcavityReport:
    samples: int
    root_violations: list
    log_violations: list
    worst_root_deficit: float
    worst_log_deficit: float

    @property
    def violations(self) -> int:
        return len(self.root_violations) + len(self.log_violations)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self):
        return {
            "samples": self.samples,
            "violations": self.violations,
            "worst_root_deficit": self.worst_root_deficit,
            "worst_log_deficit": self.worst_log_deficit,
        }


def check_log_concavity(P: Polytope, L, samples: int = 100, seed=0,
                        tol: float = 1e-8, lambdas=None) -> LogConcavityReport:
    """Sample the (n-k)-th root concavity of f_L and its log-concave consequence."""
    L = _as_subspace(L, P.dim)
    k = L.dim
    e = 1.0 / (P.dim - k)
    f = _Xray(P, L)
    rng = np.random.default_rng(seed)
    W = _projected_vertices(P, L)
    X = rng.dirichlet(np.ones(len(W)), size=samples) @ W
    Y = rng.dirichlet(np.ones(len(W)), size=samples) @ W
    lam = rng.uniform(0.0, 1.0, size=samples) if lambdas is None else np.asarray(lambdas)
    root_bad, log_bad = [], []
    worst_root = worst_log = -math.inf
    for i, (x, y, t) in enumerate(zip(X, Y, lam)):
        fx, fy = f(x), f(y)
        fz = f((1 - t) * x + t * y)
        root_def = (1 - t) * fx**e + t * fy**e - fz**e
        log_def = fx ** (1 - t) * fy**t - fz
        worst_root = max(worst_root, root_def)
        worst_log = max(worst_log, log_def)
        if root_def > tol:
            root_bad.append(i)
        if log_def > tol:
            log_bad.append(i)
    return LogConcavityReport(samples, root_bad, log_bad, worst_root, worst_log)


def is_constant_section(P: Polytope, L, tol: float = 1e-8, samples: int = 50, seed=0) -> bool:
    """Whether f_L is constant on P|L, judged by max/min <= 1 + tol.

    Samples 50 seeded interior points of P|L; for k = 1 every interpolation
    node of every cell is included too, which decides constancy exactly
    because each cell is a polynomial of degree n-1 through n nodes.
    """
    L = _as_subspace(L, P.dim)
    f = _Xray(P, L)
    values = [f(x) for x in interior_samples(P, L, samples, seed)]
    if L.dim == 1:
        u = L.basis[:, 0]
        bp = breakpoints(P, u)
        for a, b in zip(bp[:-1], bp[1:]):
            values.extend(f(t) for t in _chebyshev_nodes(a, b, P.dim))
    lo, hi = min(values), max(values)
    return lo > 0 and hi / lo <= 1.0 + tol


def integrate_xray(P: Polytope, L, nodes: int | None = None) -> float:
    """Integral of f_L over P|L by nested Gauss-Legendre quadrature.

    Coordinates of L are integrated one at a time. At each level the
    remaining integrand is the one-dimensional X-ray of the current slice,
    a polynomial between the slice's vertex projections, so splitting at
    those projections makes every level exact up to rounding.
    """
    L = _as_subspace(L, P.dim)
    k = L.dim
    n = P.dim
    q = nodes or n
    gx, gw = leggauss(q)
    f = _Xray(P, L)
    B = L.basis

    def level(j, prefix):
        w = B[:, j]
        point = B[:, :j] @ np.asarray(prefix) if j else np.zeros(n)
        perp = orthogonal_complement(B[:, :j]) if j else np.eye(n)
        Y = section_vertices(P, point, perp) @ perp.T + point
        if len(Y) == 0:
            return 0.0
        bp = np.unique(np.round(Y @ w, 12))
        total = []
        for a, b in zip(bp[:-1], bp[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            for x, wt in zip(gx, gw):
                s = mid + half * x
                if j == k - 1:
                    val = f(np.append(prefix, s))
                else:
                    val = level(j + 1, np.append(prefix, s))
                total.append(wt * half * val)
        return math.fsum(total)

    return level(0, np.zeros(0))
