"""The discrete cone-volume measure of a polytope.

For a polytope with the origin in its interior, the facet cone
conv{0, F_i} has volume V_{n-1}(F_i) * b_i / n, and the measure puts that
mass on the facet's outer unit normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SUBSPACE_TOL
from .geometry import Polytope, require_origin_interior
from .linalg import Subspace


@dataclass(frozen=True, eq=False)
class ConeVolumeMeasure:
    dim: int
    normals: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        N = np.atleast_2d(np.asarray(self.normals, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(N) != len(w):
            raise ValueError("normals and weights differ in length")
        if np.any(w <= 0):
            raise ValueError("cone volumes must be positive")
        N.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "normals", N)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total", math.fsum(w))

    def __len__(self):
        return len(self.weights)

    @property
    def atoms(self):
        return list(zip(self.normals, self.weights))

    def mask(self, L: Subspace, tol: float = SUBSPACE_TOL) -> np.ndarray:
        return L.residual(self.normals) <= tol

    def to_dict(self):
        return {
            "dim": self.dim,
            "atoms": [{"normal": a.tolist(), "weight": float(w)} for a, w in self.atoms],
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, data):
        atoms = data["atoms"]
        return cls(int(data["dim"]), [a["normal"] for a in atoms], [a["weight"] for a in atoms])


def _merge_equal_normals(normals, weights, tol):
    out_n, out_w = [], []
    for a, w in zip(normals, weights):
        for j, b in enumerate(out_n):
            if np.linalg.norm(a - b) <= tol:
                out_w[j] += w
                break
        else:
            out_n.append(a)
            out_w.append(w)
    return np.array(out_n), np.array(out_w)


def cone_volume_measure(P: Polytope) -> ConeVolumeMeasure:
    """Atoms (a_i, V(C_i)) with V(C_i) = V_{n-1}(F_i) b_i / n.

    Raises:
        OriginNotInterior: some facet offset is <= the incidence tolerance.
    """
    require_origin_interior(P)
    n = P.dim
    weights = np.array([f.measure * f.offset / n for f in P.facets])
    normals, weights = _merge_equal_normals(P.normals, weights, 1e-9)
    return ConeVolumeMeasure(n, normals, weights)


def measure_of_subspace(mu: ConeVolumeMeasure, L: Subspace, tol: float = SUBSPACE_TOL) -> float:
    """Total weight of the atoms whose normals lie in ``L``."""
    return math.fsum(mu.weights[mu.mask(L, tol)])


def borderline_atoms(mu: ConeVolumeMeasure, L: Subspace, tol: float = SUBSPACE_TOL):
    """Indices of atoms whose residual from ``L`` sits in [tol, 10 tol]."""
    r = L.residual(mu.normals)
    return [int(i) for i in np.nonzero((r >= tol) & (r <= 10 * tol))[0]]
