"""Numerical tolerances used across the library."""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    on_manifold: float = 1e-9
    roundtrip: float = 1e-7
    identity: float = 1e-10
    # eigenvalues of SPD charts below this are a chart error, never clamped
    spd_min_eig: float = 1e-12
    # hyperboloid: -<x,y>_L in [1 - acosh_clamp, 1) is clamped to 1
    acosh_clamp: float = 1e-12

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


DEFAULT = Tolerances()
