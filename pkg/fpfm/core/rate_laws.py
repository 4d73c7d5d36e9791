"""
Velocity-dependent fracture energy rate laws

A rate law is the strictly increasing function alpha* with alpha*(0) = 0 in

    G_c*(V) = G_c + alpha*(V)

and its generalized inverse beta*(s) = 0 for s < 0, (alpha*)^-1(s) otherwise.
Three kinds are supported: linear (alpha*V), power (k*V^p) and tabulated
(piecewise-linear through monotone samples).
"""

import math
from typing import Annotated, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import bisect

from fpfm.core.errors import DomainError, RateLawRangeError


class _RateLawBase(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def alpha(self, v: float) -> float:
        raise NotImplementedError

    def beta(self, s: float) -> float:
        raise NotImplementedError

    def _check_velocity(self, v: float):
        if not v >= 0.0:
            raise DomainError(f"rate law evaluated at negative velocity {v}")

    def is_monotone(self, samples: np.ndarray) -> bool:
        """Sample-based check of alpha*(0) = 0 and strict increase"""
        values = np.array([self.alpha(float(v)) for v in np.sort(samples)])
        return self.alpha(0.0) == 0.0 and bool(np.all(np.diff(values) > 0.0))


class LinearRateLaw(_RateLawBase):
    kind: Literal["linear"] = "linear"
    alpha_coefficient: float = Field(gt=0.0, alias="alpha")

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    def alpha(self, v: float) -> float:
        self._check_velocity(v)
        return self.alpha_coefficient * v

    def beta(self, s: float) -> float:
        if s < 0.0:
            return 0.0
        return s / self.alpha_coefficient


class PowerRateLaw(_RateLawBase):
    kind: Literal["power"] = "power"
    k: float = Field(gt=0.0)
    p: float = Field(gt=0.0)

    def alpha(self, v: float) -> float:
        self._check_velocity(v)
        return self.k * v ** self.p

    def beta(self, s: float) -> float:
        if s < 0.0:
            return 0.0
        return (s / self.k) ** (1.0 / self.p)


class TabulatedRateLaw(_RateLawBase):
    """Piecewise-linear alpha* through (velocity, value) samples starting at (0, 0)"""

    kind: Literal["tabulated"] = "tabulated"
    samples: List[Tuple[float, float]] = Field(min_length=2)
    rtol: float = Field(default=1e-12, gt=0.0)

    @field_validator("samples")
    @classmethod
    def _strictly_increasing(cls, samples):
        v = np.array([s[0] for s in samples], dtype=float)
        a = np.array([s[1] for s in samples], dtype=float)
        if v[0] != 0.0 or a[0] != 0.0:
            raise ValueError("tabulated rate law must start at (0, 0)")
        if np.any(np.diff(v) <= 0.0) or np.any(np.diff(a) <= 0.0):
            raise ValueError("tabulated rate law must be strictly increasing in both columns")
        return samples

    @property
    def velocities(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples], dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples], dtype=float)

    def alpha(self, v: float) -> float:
        self._check_velocity(v)
        velocities = self.velocities
        if v > velocities[-1]:
            raise RateLawRangeError(f"velocity {v} beyond table maximum {velocities[-1]}")
        return float(np.interp(v, velocities, self.values))

    def beta(self, s: float) -> float:
        if s <= 0.0:
            return 0.0
        values = self.values
        if s > values[-1]:
            raise RateLawRangeError(f"value {s} beyond table maximum {values[-1]}")
        velocities = self.velocities
        if s == values[-1]:
            return float(velocities[-1])
        return bisect(
            lambda v: np.interp(v, velocities, values) - s,
            0.0, float(velocities[-1]), xtol=1e-300, rtol=self.rtol, maxiter=2000,
        )


RateLaw = Annotated[Union[LinearRateLaw, PowerRateLaw, TabulatedRateLaw], Field(discriminator="kind")]


def alpha_star(law: RateLaw, v: float) -> float:
    """alpha*(v) >= 0; negative v is a domain error"""
    if not math.isfinite(v):
        raise DomainError(f"velocity must be finite, got {v}")
    return law.alpha(v)


def beta_star(law: RateLaw, s: float) -> float:
    """0 for s < 0, otherwise the unique V >= 0 with alpha*(V) = s"""
    if not math.isfinite(s):
        raise DomainError(f"argument must be finite, got {s}")
    return law.beta(s)
