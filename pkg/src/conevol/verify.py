"""One-shot pipeline running every check on a polytope."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import GeometryError
from .geometry import Polytope, center_at_centroid
from .linalg import Subspace
from .measure import cone_volume_measure
from .scc import SccReport, check_scc, ensure_centered
from .ufunctional import UReport, check_u_inequality
from .xray import check_log_concavity, divergence_identity, xray_piecewise

RANDOM_DIRECTIONS = 20
LOG_CONCAVITY_SAMPLES = 100


@contextmanager
def _phase(name, timings):
    start = time.perf_counter()
    try:
        yield
    except GeometryError as exc:
        exc.phase = name
        exc.args = (f"[{name}] {exc.args[0] if exc.args else ''}",) + exc.args[1:]
        raise
    finally:
        timings[name] = time.perf_counter() - start


@dataclass
class DirectionCheck:
    direction: np.ndarray
    source: str
    held_out_residual: float
    integral_residual: float
    first_moment: float
    gradient_moment: float
    divergence: object
    tol: Tolerances
    volume: float
    diameter: float

    @property
    def checks(self):
        t, V = self.tol, self.volume
        return {
            "interpolation": self.held_out_residual <= 1e-8,
            "integral": self.integral_residual <= t.first_moment,
            "first_moment": abs(self.first_moment) <= t.first_moment * V * self.diameter,
            "gradient_moment": self.gradient_moment <= t.gradient * V,
            "divergence": self.divergence.passed,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self):
        return {
            "direction": self.direction.tolist(),
            "source": self.source,
            "held_out_residual": self.held_out_residual,
            "integral_residual": self.integral_residual,
            "first_moment": self.first_moment,
            "gradient_moment": self.gradient_moment,
            "divergence": self.divergence.to_dict(),
            "checks": self.checks,
            "passed": self.passed,
        }


@dataclass
class VerificationReport:
    input: str
    dim: int
    volume: float
    tolerances: Tolerances
    centering_residual: float
    cone_volume_residual: float
    scc: SccReport
    u: UReport
    directions: list
    log_concavity_violations: int
    log_concavity_samples: int
    timing: dict = field(default_factory=dict)
    timestamp: str = ""

    @property
    def first_moment_residuals(self):
        return [abs(d.first_moment) for d in self.directions]

    @property
    def checks(self):
        t = self.tolerances
        return {
            "centering": self.centering_residual <= t.centering,
            "cone_volume_total": self.cone_volume_residual <= t.volume,
            "scc": self.scc.passed,
            "u_inequality": self.u.lower_ok and self.u.upper_ok and self.u.consistent,
            "recursion": self.u.recursion_ok,
            "directions": all(d.passed for d in self.directions),
            "log_concavity": self.log_concavity_violations == 0,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, volatile: bool = True):
        """JSON-ready dict; ``volatile=False`` drops timing and timestamp."""
        out = {
            "input": self.input,
            "dim": self.dim,
            "volume": self.volume,
            "tolerances": self.tolerances.as_dict(),
            "centering_residual": self.centering_residual,
            "cone_volume_residual": self.cone_volume_residual,
            "scc": self.scc.to_dict(),
            "u": self.u.to_dict(),
            "directions": [d.to_dict() for d in self.directions],
            "first_moment_residuals": self.first_moment_residuals,
            "log_concavity": {"samples": self.log_concavity_samples,
                              "violations": self.log_concavity_violations},
            "checks": self.checks,
            "passed": self.passed,
        }
        if volatile:
            out["timing"] = self.timing
            out["timestamp"] = self.timestamp
        return out


def _unit_directions(n, count, seed):
    X = np.random.default_rng(seed).normal(size=(count, n))
    return X / np.linalg.norm(X, axis=1)[:, None]


def check_direction(P: Polytope, u, source: str, tol: Tolerances) -> DirectionCheck:
    pp = xray_piecewise(P, u, validate=False)
    V = P.volume
    rec = divergence_identity(P, u, tol=tol.divergence, pp=pp, subspace_tol=tol.subspace,
                              strict=False)
    return DirectionCheck(
        direction=pp.direction,
        source=source,
        held_out_residual=max(pp.residuals),
        integral_residual=abs(pp.integral() - V) / V,
        first_moment=pp.first_moment(),
        gradient_moment=pp.gradient_moment(),
        divergence=rec,
        tol=tol,
        volume=V,
        diameter=P.diameter,
    )


def run_verify(P: Polytope, tolerances: Tolerances = DEFAULT_TOLERANCES, seed: int = 0,
               auto_center: bool = True, descriptor: str = "",
               random_directions: int = RANDOM_DIRECTIONS) -> VerificationReport:
    """Center P and run every check, collecting results and per-phase timings.

    Raises:
        NotCentered: P is off-center and ``auto_center`` is False.
        GeometryError: any sub-check error, its message prefixed by the phase.
    """
    t = tolerances
    timings = {}
    with _phase("centering", timings):
        P = center_at_centroid(P) if auto_center else ensure_centered(P, t.centering, False)
        centering = float(np.linalg.norm(P.centroid)) / P.scale
    with _phase("cone_volume", timings):
        mu = cone_volume_measure(P)
        V = P.volume
        cv_residual = abs(mu.total - V) / V
    with _phase("scc", timings):
        scc = check_scc(P, tol=t.scc, subspace_tol=t.subspace, cap=t.cap)
    with _phase("ufunctional", timings):
        u = check_u_inequality(P, tol=t.ufunctional, recursion_tol=t.recursion, cap=t.cap)
    with _phase("directions", timings):
        dirs = [check_direction(P, a, f"facet {i}", t) for i, a in enumerate(mu.normals)]
        dirs += [check_direction(P, v, f"random {i}", t)
                 for i, v in enumerate(_unit_directions(P.dim, random_directions, seed))]
    with _phase("log_concavity", timings):
        subspaces = [Subspace.span(_unit_directions(P.dim, 1, seed + 1))]
        if P.dim >= 3:
            subspaces.append(Subspace.span(_unit_directions(P.dim, 2, seed + 2)))
        reports = [check_log_concavity(P, L, LOG_CONCAVITY_SAMPLES, seed, t.log_concavity)
                   for L in subspaces]
    return VerificationReport(
        input=descriptor,
        dim=P.dim,
        volume=V,
        tolerances=t,
        centering_residual=centering,
        cone_volume_residual=cv_residual,
        scc=scc,
        u=u,
        directions=dirs,
        log_concavity_violations=sum(r.violations for r in reports),
        log_concavity_samples=sum(r.samples for r in reports),
        timing={k: round(v, 6) for k, v in timings.items()},
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
    )

