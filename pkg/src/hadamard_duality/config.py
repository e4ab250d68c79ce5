"""Solver settings shared by the conjugate solvers and the set projections."""
from dataclasses import asdict, dataclass, fields, replace
import zlib

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SolverConfig:
    """Budgets and tolerances for the global-sup solvers.

    ``radius`` is the trust radius for random initial points, ``escape_radius``
    the radius beyond which an ascent is examined for divergence, ``v_max``
    the level the divergence certificate's samples must exceed.
    """

    restarts: int = 6
    max_iterations: int = 300
    step_tol: float = 1e-12
    value_tol: float = 1e-8
    radius: float = 4.0
    v_max: float = 0.1
    escape_radius: float = 10.0
    seed: int = 0
    # outer pattern-search moves for the biconjugate
    biconjugate_budget: int = 60

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "seed":
                if not isinstance(v, (int, np.integer)) or v < 0:
                    raise ConfigError("seed must be a nonnegative integer")
            elif not v > 0:
                raise ConfigError(f"{f.name} must be positive, got {v!r}")
        if self.restarts < 4:
            raise ConfigError("restarts must be at least 4")

    def rng(self, label):
        """Independent generator for a named subsystem."""
        return np.random.default_rng([int(self.seed), zlib.crc32(label.encode())])

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown solver settings: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


DEFAULT_SOLVER = SolverConfig()
