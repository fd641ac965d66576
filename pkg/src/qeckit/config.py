"""Tolerance and optimizer configuration objects."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances threaded explicitly through the library.

    rank: relative cutoff deciding when a vector adds a new direction
        during orthonormalization (relative to the largest norm in a batch).
    check: residual threshold for hermiticity, unitarity and completeness
        checks.
    norm: threshold for state normalization and code orthonormality.
    entropy_floor: eigenvalues below this contribute zero entropy
        (the 0*log(0) = 0 convention).
    """

    rank: float = 1e-10
    check: float = 1e-9
    norm: float = 1e-9
    entropy_floor: float = 1e-14


DEFAULT_TOL = ToleranceConfig()


@dataclass(frozen=True)
class FidelityConfig:
    """Settings for the worst-case fidelity optimizers.

    Two-dimensional codes are minimized on a ``grid_theta`` x ``grid_phi``
    sphere grid followed by coordinate-descent refinement down to
    ``refine_tol`` step size; higher-dimensional codes use ``restarts``
    seeded projected-gradient descents.
    """

    grid_theta: int = 64
    grid_phi: int = 128
    restarts: int = 32
    seed: int = 0
    refine_tol: float = 1e-8

    def to_json(self) -> dict:
        return {
            "grid_theta": self.grid_theta,
            "grid_phi": self.grid_phi,
            "restarts": self.restarts,
            "seed": self.seed,
            "refine_tol": self.refine_tol,
        }

    @classmethod
    def from_json(cls, data: dict) -> "FidelityConfig":
        return cls(
            grid_theta=int(data.get("grid_theta", 64)),
            grid_phi=int(data.get("grid_phi", 128)),
            restarts=int(data.get("restarts", 32)),
            seed=int(data.get("seed", 0)),
            refine_tol=float(data.get("refine_tol", 1e-8)),
        )


DEFAULT_FIDELITY = FidelityConfig()
