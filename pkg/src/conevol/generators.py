"""Seeded polytope generators.

A generator spec is written as ``kind[:name][:key=value]...`` and products
join terms with ``*``::

    named:cube:dim=4
    sphere:dim=3:size=8:seed=2:symmetric=1
    halfspaces:dim=4:size=9:seed=5
    parallelotope:dim=3:seed=7
    named:triangle*named:segment
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, DegenerateSample, GeometryError
from .geometry import (
    MAX_DIM,
    Polytope,
    build_from_halfspaces,
    build_from_vertices,
    center_at_centroid,
    linear_image,
)

KINDS = ("sphere", "halfspaces", "parallelotope", "product", "named")
NAMED = ("cube", "cross-polytope", "simplex", "prism", "triangle", "segment")
MAX_DRAWS = 100


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    dim: int = 3
    size: int = 0
    seed: int = 0
    symmetric: bool = False
    name: str = ""
    factors: tuple = field(default=())
    center: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "named" and self.name not in NAMED:
            raise ValueError(f"unknown named polytope {self.name!r}; expected one of {NAMED}")
        if self.kind == "product":
            object.__setattr__(self, "dim", sum(f.dim for f in self.factors))

    @classmethod
    def parse(cls, text: str) -> "GeneratorSpec":
        terms = [t.strip() for t in text.split("*")]
        if len(terms) > 1:
            return cls("product", factors=tuple(cls.parse(t) for t in terms))
        parts = terms[0].split(":")
        kind, rest = parts[0], parts[1:]
        kw = {}
        if kind == "named":
            if not rest:
                raise ValueError("named generator needs a name, e.g. named:cube")
            kw["name"] = rest.pop(0)
            kw["dim"] = {"triangle": 2, "segment": 1}.get(kw["name"], 3)
        for item in rest:
            key, sep, value = item.partition("=")
            if not sep:
                raise ValueError(f"expected key=value in generator spec, got {item!r}")
            if key in ("dim", "size", "seed"):
                kw[key] = int(value)
            elif key in ("symmetric", "center"):
                kw[key] = value.lower() in ("1", "true", "yes")
            else:
                raise ValueError(f"unknown generator option {key!r}")
        return cls(kind, **kw)

    def __str__(self):
        if self.kind == "product":
            return "*".join(str(f) for f in self.factors)
        head = f"named:{self.name}" if self.kind == "named" else self.kind
        opts = [f"dim={self.dim}"]
        if self.kind in ("sphere", "halfspaces"):
            opts.append(f"size={self.size or _default_size(self)}")
        if self.kind != "named":
            opts.append(f"seed={self.seed}")
        if self.symmetric:
            opts.append("symmetric=1")
        return ":".join([head] + opts)


def _default_size(spec):
    return spec.dim + 3 if spec.kind == "sphere" else 2 * spec.dim + 2


def _cube_h(n):
    return np.vstack([np.eye(n), -np.eye(n)]), np.ones(2 * n)


def _regular_simplex(n):
    """Vertices of a regular simplex with circumradius 1 and one vertex at e_1."""
    E = np.eye(n + 1) - 1.0 / (n + 1)
    basis = np.linalg.svd(E)[2][:n]
    V = E @ basis.T
    V /= np.linalg.norm(V[0])
    # Householder reflection taking the first vertex onto e_1
    w = V[0] - np.eye(n)[0]
    if np.linalg.norm(w) > 1e-15:
        w /= np.linalg.norm(w)
        V = V - 2.0 * np.outer(V @ w, w)
    V[np.abs(V) < 1e-15] = 0.0
    return V


def _factor_h(spec: GeneratorSpec):
    """(normals, offsets) of a factor, which may be one-dimensional."""
    if spec.kind == "named" and spec.name == "segment":
        return np.array([[1.0], [-1.0]]), np.ones(2)
    P = generate(spec)
    return P.normals, P.offsets


def _product_h(factors):
    blocks = [_factor_h(f) for f in factors]
    n = sum(A.shape[1] for A, _ in blocks)
    rows, offs, col = [], [], 0
    for A, b in blocks:
        pad = np.zeros((len(A), n))
        pad[:, col:col + A.shape[1]] = A
        rows.append(pad)
        offs.append(b)
        col += A.shape[1]
    return np.vstack(rows), np.concatenate(offs)


def _named(spec: GeneratorSpec) -> Polytope:
    n = spec.dim
    if spec.name == "cube":
        return build_from_halfspaces(*_cube_h(n))
    if spec.name == "cross-polytope":
        return build_from_vertices(np.vstack([np.eye(n), -np.eye(n)]))
    if spec.name in ("simplex", "triangle"):
        return build_from_vertices(_regular_simplex(2 if spec.name == "triangle" else n))
    if spec.name == "prism":
        base = GeneratorSpec("named", dim=n - 1, name="simplex" if n > 3 else "triangle")
        seg = GeneratorSpec("named", dim=1, name="segment")
        return build_from_halfspaces(*_product_h((base, seg)))
    raise DegenerateInput(f"{spec.name} is not a full-dimensional polytope on its own")


def _random_unit(rng, count, n):
    X = rng.normal(size=(count, n))
    return X / np.linalg.norm(X, axis=1)[:, None]


def _draw(spec: GeneratorSpec, rng) -> Polytope:
    n = spec.dim
    size = spec.size or _default_size(spec)
    if spec.kind == "sphere":
        X = _random_unit(rng, size, n)
        if spec.symmetric:
            X = np.vstack([X, -X])
        return build_from_vertices(X)
    if spec.kind == "halfspaces":
        A = _random_unit(rng, size, n)
        b = rng.uniform(0.5, 1.5, size=size)
        if spec.symmetric:
            A, b = np.vstack([A, -A]), np.concatenate([b, b])
        return build_from_halfspaces(A, b)
    if spec.kind == "parallelotope":
        T = rng.normal(size=(n, n))
        if np.linalg.cond(T) > 1e3:
            raise DegenerateInput("ill-conditioned basis")
        T /= abs(np.linalg.det(T)) ** (1.0 / n)
        return linear_image(build_from_halfspaces(*_cube_h(n)), T)
    raise ValueError(spec.kind)


def generate(spec: GeneratorSpec | str) -> Polytope:
    """Build the polytope described by ``spec``; the seed fixes the output.

    Raises:
        DegenerateSample: 100 consecutive random draws were degenerate.
    """
    if isinstance(spec, str):
        spec = GeneratorSpec.parse(spec)
    if not 2 <= spec.dim <= MAX_DIM:
        raise DegenerateInput(f"generated dimension {spec.dim} outside [2, {MAX_DIM}]")
    if spec.kind == "named":
        P = _named(spec)
    elif spec.kind == "product":
        P = build_from_halfspaces(*_product_h(spec.factors))
    else:
        rng = np.random.default_rng(spec.seed)
        for _ in range(MAX_DRAWS):
            try:
                P = _draw(spec, rng)
                break
            except GeometryError:
                continue
        else:
            raise DegenerateSample(f"{spec}: no full-dimensional bounded sample in {MAX_DRAWS} draws")
    return center_at_centroid(P) if spec.center else P


def suite_specs(count: int, seed: int = 0, dims=(2, 3, 4), max_facets: int = 12) -> list:
    """A deterministic mix of random generators cycling through ``dims``.

    Draws whose facet count exceeds ``max_facets`` are replaced by the next
    seed, so the returned specs are already filtered.
    """
    rng = np.random.default_rng(seed)
    dims = list(dims)
    out = []
    i = 0
    while len(out) < count:
        n = dims[i % len(dims)]
        choice = (i // len(dims)) % 5
        s = int(rng.integers(0, 2**31 - 1))
        i += 1
        if choice == 0:
            spec = GeneratorSpec("sphere", dim=n, size=n + 2 + s % 3, seed=s)
        elif choice == 1:
            spec = GeneratorSpec("halfspaces", dim=n, size=n + 3 + s % (10 - n), seed=s)
        elif choice == 2:
            spec = GeneratorSpec("sphere", dim=n, size=n, seed=s, symmetric=True)
        elif choice == 3:
            spec = GeneratorSpec("parallelotope", dim=n, seed=s)
        else:
            spec = random_product_spec(n, s)
        try:
            P = generate(spec)
        except GeometryError:
            continue
        if len(P.facets) <= max_facets:
            out.append(spec)
    return out


def random_product_spec(n: int, seed: int) -> GeneratorSpec:
    """Product of two irreducible random factors with dimensions adding to n."""
    rng = np.random.default_rng(seed)
    if n == 2:
        dims = (1, 1)
    else:
        d1 = int(rng.integers(1, n))
        dims = (d1, n - d1)
    factors = []
    for d in dims:
        if d == 1:
            factors.append(GeneratorSpec("named", dim=1, name="segment"))
        else:
            # d + 1 points on the sphere: a simplex, which never splits further
            factors.append(GeneratorSpec("sphere", dim=d, size=d + 1,
                                         seed=int(rng.integers(0, 2**31 - 1))))
    return GeneratorSpec("product", factors=tuple(factors))


def perturbed(P: Polytope, seed: int = 0, scale: float = 0.05) -> Polytope:
    """Move one vertex in a random direction, re-hull and re-center."""
    rng = np.random.default_rng(seed)
    V = np.array(P.vertices)
    i = int(rng.integers(len(V)))
    V[i] = V[i] * (1.0 + scale) + scale * _random_unit(rng, 1, P.dim)[0]
    return center_at_centroid(build_from_vertices(V))

