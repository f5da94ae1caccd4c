"""Augmented Euclidean space: points, phase points, angular momentum, residuals.

The configuration space is an n-dimensional Euclidean vector space split into
an (n-1)-dimensional "spatial" hyperplane plus a scalar "normal" axis.  All
components are cartesian, so upper/lower spatial indices are collapsed
numerically (the metric components are the identity).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_DIM",
    "MEMBERSHIP_TOL",
    "Dim",
    "ConfigPoint",
    "PhasePoint",
    "AngularMomentum",
    "angular_momentum",
    "sigma_residual",
    "q_residual",
]

# Physical 3-space plus the normal axis.
DEFAULT_DIM = 4

# Default absolute tolerance for "lies on the submanifold" assertions.
MEMBERSHIP_TOL = 1e-9


def _freeze(vec) -> np.ndarray:
    arr = np.array(vec, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Dim:
    """Dimension of the augmented space; the spatial hyperplane has one less."""

    n_bar: int

    def __post_init__(self):
        if self.n_bar < 3:
            raise ValueError(f"augmented dimension must be >= 3, got {self.n_bar}")

    @property
    def spatial(self) -> int:
        return self.n_bar - 1


@dataclass(frozen=True)
class ConfigPoint:
    """A point of the augmented space: spatial vector plus normal coordinate."""

    spatial: np.ndarray
    normal: float

    def __post_init__(self):
        object.__setattr__(self, "spatial", _freeze(self.spatial))
        object.__setattr__(self, "normal", float(self.normal))
        if self.spatial.size < 2:
            raise ValueError("spatial part must have dimension >= 2")
        if not np.isfinite(self.normal):
            raise ValueError("normal coordinate must be finite")

    @property
    def dim(self) -> int:
        return self.spatial.size + 1

    @property
    def spatial_norm(self) -> float:
        return float(np.linalg.norm(self.spatial))

    @property
    def unit_spatial(self) -> np.ndarray:
        r = self.spatial_norm
        if r == 0.0:
            raise ZeroDivisionError("unit vector of a zero spatial part")
        return self.spatial / r

    def in_positive_domain(self, eps: float = 1e-12) -> bool:
        """Whether the point lies in the region where the projective map is defined."""
        return self.spatial_norm > eps and self.normal > eps


@dataclass(frozen=True)
class PhasePoint:
    """Cotangent-bundle point: base configuration plus covector components.

    Used for both the original and the transformed system; no submanifold
    constraint is implied unless checked through the residual functions.
    """

    base: ConfigPoint
    momentum_spatial: np.ndarray
    momentum_normal: float

    def __post_init__(self):
        object.__setattr__(self, "momentum_spatial", _freeze(self.momentum_spatial))
        object.__setattr__(self, "momentum_normal", float(self.momentum_normal))
        if self.momentum_spatial.size != self.base.spatial.size:
            raise ValueError("momentum and base spatial dimensions differ")

    @classmethod
    def from_components(cls, spatial, normal, momentum_spatial, momentum_normal) -> "PhasePoint":
        return cls(ConfigPoint(spatial, normal), momentum_spatial, momentum_normal)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def spatial(self) -> np.ndarray:
        return self.base.spatial

    @property
    def normal(self) -> float:
        return self.base.normal


@dataclass(frozen=True)
class AngularMomentum:
    """Antisymmetric angular-momentum matrix with its squared norm."""

    matrix: np.ndarray
    squared_norm: float
    specific: float  # magnitude per unit mass

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=float)
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(max(self.squared_norm, 0.0)))


def angular_momentum(r: np.ndarray, p: np.ndarray, m: float = 1.0) -> AngularMomentum:
    """Angular-momentum matrix r^i p^j - p^i r^j, its squared norm, and norm/m."""
    r = np.asarray(r, dtype=float)
    p = np.asarray(p, dtype=float)
    if r.shape != p.shape or r.ndim != 1:
        raise ValueError(f"mismatched spatial dimensions: {r.shape} vs {p.shape}")
    mat = np.outer(r, p) - np.outer(p, r)
    ell_sq = float(np.dot(r, r) * np.dot(p, p) - np.dot(r, p) ** 2)
    ell = float(np.sqrt(max(ell_sq, 0.0)))
    return AngularMomentum(mat, ell_sq, ell / m)


def sigma_residual(point: PhasePoint, b: float = 1.0) -> tuple[float, float]:
    """Residual pair (normal - b, normal momentum); both vanish on the hyperplane bundle."""
    return (point.normal - b, point.momentum_normal)


def q_residual(point: PhasePoint, b: float = 1.0) -> tuple[float, float]:
    """Residual pair (|r| - b, rhat.p); both vanish on the cylinder bundle."""
    r = point.base.spatial_norm
    if r == 0.0:
        raise ZeroDivisionError("q_residual needs a nonzero spatial part")
    return (r - b, float(np.dot(point.spatial, point.momentum_spatial)) / r)
