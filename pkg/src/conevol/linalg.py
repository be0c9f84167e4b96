"""Small linear-algebra helpers: rank decisions and linear subspaces."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import INDEPENDENCE_TOL, SUBSPACE_TOL


def numeric_rank(M, rtol: float = INDEPENDENCE_TOL, atol: float = 0.0) -> int:
    """Rank of ``M`` counting singular values above ``max(atol, rtol * s_max)``."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > max(atol, rtol * s[0])))


def affine_rank(points, atol: float) -> int:
    """Dimension of the affine hull of ``points`` (rows)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) <= 1:
        return 0
    return numeric_rank(points[1:] - points[0], rtol=0.0, atol=atol)


def orthonormal_span(vectors, rtol: float = INDEPENDENCE_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the span of the given row vectors."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    n = V.shape[1]
    if V.shape[0] == 0:
        return np.zeros((n, 0))
    _, s, vt = np.linalg.svd(V, full_matrices=False)
    if s[0] == 0.0:
        return np.zeros((n, 0))
    r = int(np.sum(s > rtol * s[0]))
    return vt[:r].T.copy()


def orthogonal_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the complement of the column span of ``basis``."""
    n, k = basis.shape
    if k == 0:
        return np.eye(n)
    u, _, _ = np.linalg.svd(basis, full_matrices=True)
    return u[:, k:].copy()


@dataclass(frozen=True, eq=False)
class Subspace:
    """A linear subspace of R^n stored by an orthonormal basis (columns)."""

    basis: np.ndarray
    members: tuple = field(default=(), compare=False)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array with basis vectors as columns")
        object.__setattr__(self, "basis", b)
        b.setflags(write=False)

    @classmethod
    def span(cls, vectors, rtol: float = INDEPENDENCE_TOL, members=()) -> "Subspace":
        return cls(orthonormal_span(vectors, rtol), tuple(members))

    @classmethod
    def coordinate(cls, n: int, axes) -> "Subspace":
        return cls(np.eye(n)[:, list(axes)])

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projection(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def complement(self) -> "Subspace":
        return Subspace(orthogonal_complement(self.basis))

    def residual(self, v) -> np.ndarray:
        """Distance of each row of ``v`` from the subspace."""
        v = np.atleast_2d(np.asarray(v, dtype=float))
        return np.linalg.norm(v - (v @ self.basis) @ self.basis.T, axis=1)

    def contains(self, v, tol: float = SUBSPACE_TOL) -> bool:
        return bool(np.all(self.residual(v) <= tol))

    def coords(self, x) -> np.ndarray:
        """Coordinates of ``x`` with respect to the basis."""
        return np.asarray(x, dtype=float) @ self.basis

    def embed(self, y) -> np.ndarray:
        return np.asarray(y, dtype=float) @ self.basis.T

    def distance(self, other: "Subspace") -> float:
        return float(np.linalg.norm(self.projection - other.projection))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"
