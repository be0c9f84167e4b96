"""Central tolerance defaults. Every report echoes the values it ran with."""

from dataclasses import asdict, dataclass, replace

# incidence / rank decisions, scaled by the coordinate magnitude of the input
INCIDENCE_TOL = 1e-9
# membership of a normal in a subspace (projection residual)
SUBSPACE_TOL = 1e-9
# smallest singular value relative to the largest for linear independence
INDEPENDENCE_TOL = 1e-9
# dedup of subspaces by Frobenius distance of projection matrices
PROJECTION_DEDUP_TOL = 1e-8
# default cap on enumerated subsets
SUBSET_CAP = 10**6


@dataclass(frozen=True)
class Tolerances:
    incidence: float = INCIDENCE_TOL
    subspace: float = SUBSPACE_TOL
    scc: float = 1e-9
    ufunctional: float = 1e-9
    recursion: float = 1e-9
    divergence: float = 1e-8
    gradient: float = 1e-10
    first_moment: float = 1e-9
    centering: float = 1e-10
    volume: float = 1e-12
    constant_section: float = 1e-8
    log_concavity: float = 1e-8
    cap: int = SUBSET_CAP

    def as_dict(self):
        return asdict(self)

    def with_overrides(self, **kwargs):
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOLERANCES = Tolerances()
