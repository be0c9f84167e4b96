"""The U-functional, its k-th analogues sigma_k, and the sharp lower bound.

sigma_k(P)^k sums the products of cone volumes over ordered k-tuples of
linearly independent facet normals.  Ordered counting is what makes the
parallelotope the equality case: each of its 2n cones has volume V/(2n), and
there are n! 2^n ordered independent n-tuples, so

    U^n = n! 2^n (V / 2n)^n = n!/n^n V^n,

which is exactly the bound U >= (n!)^(1/n) / n * V.  Unordered counting would
miss the n! factor.  Sums run over unordered subsets times k!.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .config import INDEPENDENCE_TOL, SUBSET_CAP
from .errors import DegenerateNormals, InvalidK
from .geometry import Polytope, _combinations_array
from .linalg import numeric_rank
from .measure import ConeVolumeMeasure, cone_volume_measure
from .scc import ensure_centered, normals_form_parallelotope

log = logging.getLogger(__name__)

_CHUNK = 8192


def _independent_terms(mu: ConeVolumeMeasure, k: int, rtol: float, cap: int):
    """Products of weights over independent unordered k-subsets, plus a count
    of subsets whose conditioning sits within a decade of the threshold."""
    m, n = mu.normals.shape
    combos = _combinations_array(m, k, cap)
    logw = np.log(mu.weights)
    terms = []
    near = 0
    for start in range(0, len(combos), _CHUNK):
        c = combos[start:start + _CHUNK]
        s = np.linalg.svd(mu.normals[c], compute_uv=False)
        rel = s[:, -1] / s[:, 0]
        indep = rel > rtol
        near += int(np.sum((rel > rtol / 10) & (rel <= rtol * 10)))
        if n >= 5:
            # many small factors: multiply in log space
            vals = np.exp(logw[c[indep]].sum(axis=1))
        else:
            vals = np.prod(mu.weights[c[indep]], axis=1)
        terms.extend(vals.tolist())
    return terms, near


def sigma_k_power(mu: ConeVolumeMeasure, k: int, rtol: float = INDEPENDENCE_TOL,
                  cap: int = SUBSET_CAP) -> float:
    """sigma_k^k = k! * sum over independent k-subsets of weight products."""
    if not 1 <= k <= mu.dim:
        raise InvalidK(f"k must lie in [1, {mu.dim}], got {k}")
    terms, near = _independent_terms(mu, k, rtol, cap)
    if near:
        log.warning("%d %d-subsets of normals are near the independence threshold", near, k)
    return math.factorial(k) * math.fsum(terms)


def sigma_k(mu: ConeVolumeMeasure, k: int, rtol: float = INDEPENDENCE_TOL,
            cap: int = SUBSET_CAP) -> float:
    return sigma_k_power(mu, k, rtol, cap) ** (1.0 / k)


def sigma_k_power_ordered(mu: ConeVolumeMeasure, k: int, rtol: float = INDEPENDENCE_TOL) -> float:
    """Reference sum over all m^k ordered tuples; only for small m and k.

    Independence is decided through the Gram determinant, not singular
    values. Normals are unit vectors, so the determinant lies in [0, 1] and
    rounding noise on dependent tuples sits far below ``rtol``.
    """
    A = mu.normals
    w = mu.weights
    terms = []
    for idx in product(range(len(w)), repeat=k):
        M = A[list(idx)]
        if np.linalg.det(M @ M.T) > rtol:
            terms.append(math.prod(w[list(idx)]))
    return math.fsum(terms)


def u_functional(mu: ConeVolumeMeasure, rtol: float = INDEPENDENCE_TOL,
                 cap: int = SUBSET_CAP) -> float:
    """U = sigma_n.

    Raises:
        DegenerateNormals: the normals do not span R^n.
    """
    if numeric_rank(mu.normals) < mu.dim:
        raise DegenerateNormals("facet normals do not span R^%d" % mu.dim)
    return sigma_k(mu, mu.dim, rtol, cap)


def u_lower_bound_factor(n: int) -> float:
    return math.factorial(n) ** (1.0 / n) / n


@dataclass
class RecursionMargin:
    k: int
    lhs: float
    rhs: float
    scale: float

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    def ok(self, tol: float) -> bool:
        return self.margin >= -tol * self.scale

    def to_dict(self):
        return {"k": self.k, "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin,
                "relative_margin": self.margin / self.scale}


def _margins(mu, volume, powers):
    n = mu.dim
    out = []
    for k in range(1, n):
        rhs = (n - k) / n * volume * powers[k]
        out.append(RecursionMargin(k, powers[k + 1], rhs, volume ** (k + 1)))
    return out


def check_recursion(P: Polytope, tol: float = 1e-9, auto_center: bool = False,
                    cap: int = SUBSET_CAP) -> list:
    """Margins sigma_{k+1}^{k+1} - (n-k)/n V sigma_k^k for k = 1..n-1.

    Raises:
        NotCentered: the centroid is off the origin and auto_center is False.
    """
    P = ensure_centered(P, tol, auto_center)
    mu = cone_volume_measure(P)
    powers = {k: sigma_k_power(mu, k, cap=cap) for k in range(1, P.dim + 1)}
    return _margins(mu, P.volume, powers)


@dataclass
class UReport:
    dim: int
    volume: float
    u: float
    bound: float
    sigmas: dict
    margins: list
    parallelotope: bool
    tol: float
    recursion_tol: float = 1e-9
    notes: list = field(default_factory=list)

    @property
    def ratio(self) -> float:
        return self.u / self.bound

    @property
    def equality(self) -> bool:
        return abs(self.ratio - 1.0) <= self.tol

    @property
    def lower_ok(self) -> bool:
        return self.u >= self.bound - self.tol * self.volume

    @property
    def upper_ok(self) -> bool:
        return self.u <= self.volume * (1.0 + self.tol)

    @property
    def recursion_ok(self) -> bool:
        return all(m.ok(self.recursion_tol) for m in self.margins)

    @property
    def consistent(self) -> bool:
        return self.equality == self.parallelotope

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok and self.recursion_ok and self.consistent

    def to_dict(self):
        return {
            "dim": self.dim,
            "volume": self.volume,
            "U": self.u,
            "lower_bound": self.bound,
            "ratio": self.ratio,
            "sigma": {str(k): v for k, v in self.sigmas.items()},
            "recursion": [m.to_dict() for m in self.margins],
            "equality": self.equality,
            "parallelotope": self.parallelotope,
            "lower_ok": self.lower_ok,
            "upper_ok": self.upper_ok,
            "recursion_ok": self.recursion_ok,
            "consistent": self.consistent,
            "passed": self.passed,
            "tol": self.tol,
        }


def u_report(mu: ConeVolumeMeasure, volume: float | None = None, tol: float = 1e-9,
             recursion_tol: float = 1e-9, cap: int = SUBSET_CAP) -> UReport:
    """U, sigma_k and recursion margins of a cone-volume measure.

    ``volume`` defaults to the total mass, which is V(P) for a polytope's
    measure. The parallelotope flag is read off the normals.
    """
    n = mu.dim
    if numeric_rank(mu.normals) < n:
        raise DegenerateNormals("facet normals do not span R^%d" % n)
    V = mu.total if volume is None else volume
    powers = {k: sigma_k_power(mu, k, cap=cap) for k in range(1, n + 1)}
    return UReport(
        dim=n,
        volume=V,
        u=powers[n] ** (1.0 / n),
        bound=u_lower_bound_factor(n) * V,
        sigmas={k: p ** (1.0 / k) for k, p in powers.items()},
        margins=_margins(mu, V, powers),
        parallelotope=normals_form_parallelotope(mu.normals, n),
        tol=tol,
        recursion_tol=recursion_tol,
    )


def check_u_inequality(P: Polytope, tol: float = 1e-9, auto_center: bool = False,
                       recursion_tol: float = 1e-9, cap: int = SUBSET_CAP) -> UReport:
    """Evaluate U(P) against (n!)^(1/n)/n V(P) and V(P).

    The equality flag is cross-checked against parallelotope detection.

    Raises:
        NotCentered: the centroid is off the origin and auto_center is False.
    """
    P = ensure_centered(P, tol, auto_center)
    return u_report(cone_volume_measure(P), P.volume, tol, recursion_tol, cap)
