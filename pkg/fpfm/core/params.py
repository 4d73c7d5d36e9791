"""
Domain parameters and scenario configuration

All models are frozen pydantic models that reject unknown keys, so a typo in
a scenario document fails at load time instead of silently using a default.
"""

import json
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from fpfm.core.errors import ConfigError
from fpfm.core.rate_laws import RateLaw


class _Frozen(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# ---------------------------------------------------------------------------
# Material
# ---------------------------------------------------------------------------

class PlaneMode(str, Enum):
    PLANE_STRAIN = "plane_strain"
    PLANE_STRESS = "plane_stress"


class MaterialParams(_Frozen):
    lame_lambda: float
    lame_mu: float = Field(gt=0.0)
    plane_mode: PlaneMode = PlaneMode.PLANE_STRAIN
    g_c: float = Field(gt=0.0)
    epsilon: float = Field(gt=0.0)
    rate_law: RateLaw
    friction_alpha_u: float = Field(default=0.0, ge=0.0)
    residual_stiffness: float = Field(default=1e-6, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _positive_definite(self):
        if self.lame_lambda + self.lame_mu <= 0.0:
            raise ValueError("lame_lambda + lame_mu must be positive")
        return self

    @classmethod
    def from_young(cls, young: float, poisson: float, **kwargs) -> "MaterialParams":
        """Build from Young's modulus and Poisson ratio (3D Lame constants)"""
        lame_lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson))
        lame_mu = young / (2.0 * (1.0 + poisson))
        return cls(lame_lambda=lame_lambda, lame_mu=lame_mu, **kwargs)

    @property
    def young(self) -> float:
        lam, mu = self.lame_lambda, self.lame_mu
        return mu * (3.0 * lam + 2.0 * mu) / (lam + mu)

    @property
    def poisson(self) -> float:
        return self.lame_lambda / (2.0 * (self.lame_lambda + self.lame_mu))

    @property
    def effective_lambda(self) -> float:
        """lambda~ of the 2D model: lambda in plane strain, 2*lambda*mu/(lambda+2mu) in plane stress"""
        if self.plane_mode == PlaneMode.PLANE_STRESS:
            return 2.0 * self.lame_lambda * self.lame_mu / (self.lame_lambda + 2.0 * self.lame_mu)
        return self.lame_lambda

    def constitutive_matrix(self) -> np.ndarray:
        """Voigt matrix D with engineering shear strain, so sigma:e = eps^T D eps"""
        lam, mu = self.effective_lambda, self.lame_mu
        return np.array([
            [lam + 2.0 * mu, lam, 0.0],
            [lam, lam + 2.0 * mu, 0.0],
            [0.0, 0.0, mu],
        ])

    def degradation(self, z):
        """(1 - eta)(1 - z)^2 + eta

        The residual stiffness eta interpolates rather than adds, so g(0) = 1
        exactly and g(1) = eta. Broken material keeps eta times the intact
        stiffness.
        """
        eta = self.residual_stiffness
        return (1.0 - eta) * (1.0 - z) ** 2 + eta


# ---------------------------------------------------------------------------
# Mesh
# ---------------------------------------------------------------------------

class BoundaryTag(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN_LOADED = "neumann_loaded"
    NEUMANN_FREE = "neumann_free"


class BoundaryTagging(_Frozen):
    """One tag per side of the rectangle"""

    left: BoundaryTag = BoundaryTag.NEUMANN_FREE
    right: BoundaryTag = BoundaryTag.NEUMANN_FREE
    bottom: BoundaryTag = BoundaryTag.NEUMANN_FREE
    top: BoundaryTag = BoundaryTag.NEUMANN_FREE

    @classmethod
    def uniform(cls, tag: BoundaryTag) -> "BoundaryTagging":
        return cls(left=tag, right=tag, bottom=tag, top=tag)


class MeshSpec(_Frozen):
    width: float = Field(gt=0.0)
    height: float = Field(gt=0.0)
    h: float = Field(gt=0.0)
    origin: Tuple[float, float] = (0.0, 0.0)
    tags: BoundaryTagging = BoundaryTagging()


# ---------------------------------------------------------------------------
# Time programs and loads
# ---------------------------------------------------------------------------

class ConstantProgram(_Frozen):
    kind: Literal["constant"] = "constant"
    value: float = 1.0

    def value_at(self, t: float) -> float:
        return self.value

    def rate_at(self, t: float) -> float:
        return 0.0

    def breakpoints(self) -> List[float]:
        return []


class LinearProgram(_Frozen):
    kind: Literal["linear"] = "linear"
    offset: float = 0.0
    rate: float

    def value_at(self, t: float) -> float:
        return self.offset + self.rate * t

    def rate_at(self, t: float) -> float:
        return self.rate

    def breakpoints(self) -> List[float]:
        return []


class RampHoldProgram(_Frozen):
    """Linear ramp from 0 to `value` over [t_start, t_start + t_ramp], then hold"""

    kind: Literal["ramp_hold"] = "ramp_hold"
    value: float = 1.0
    t_ramp: float = Field(gt=0.0)
    t_start: float = 0.0

    def value_at(self, t: float) -> float:
        return self.value * min(max((t - self.t_start) / self.t_ramp, 0.0), 1.0)

    def rate_at(self, t: float) -> float:
        if self.t_start < t < self.t_start + self.t_ramp:
            return self.value / self.t_ramp
        return 0.0

    def breakpoints(self) -> List[float]:
        return [self.t_start, self.t_start + self.t_ramp]


TimeProgram = Annotated[Union[ConstantProgram, LinearProgram, RampHoldProgram], Field(discriminator="kind")]


class DirichletLoad(_Frozen):
    """g(x, t) = s(t) * (A x + c) on every Dirichlet node"""

    gradient: Tuple[Tuple[float, float], Tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))
    offset: Tuple[float, float] = (0.0, 0.0)
    program: TimeProgram = ConstantProgram()

    def _shape(self, points: np.ndarray) -> np.ndarray:
        return points @ np.asarray(self.gradient).T + np.asarray(self.offset)

    def values(self, points: np.ndarray, t: float) -> np.ndarray:
        return self.program.value_at(t) * self._shape(points)

    def rates(self, points: np.ndarray, t: float) -> np.ndarray:
        return self.program.rate_at(t) * self._shape(points)


class UniformLoad(_Frozen):
    """Spatially uniform vector s(t) * v (body force or traction)"""

    vector: Tuple[float, float] = (0.0, 0.0)
    program: TimeProgram = ConstantProgram()

    def value(self, t: float) -> np.ndarray:
        return self.program.value_at(t) * np.asarray(self.vector)

    def rate(self, t: float) -> np.ndarray:
        return self.program.rate_at(t) * np.asarray(self.vector)


class LoadSpec(_Frozen):
    dirichlet: DirichletLoad = DirichletLoad()
    body_force: UniformLoad = UniformLoad()
    traction: UniformLoad = UniformLoad()


class TimeGrid(_Frozen):
    t0: float = 0.0
    t1: float
    dt: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.t1 <= self.t0:
            raise ValueError("t1 must be greater than t0")
        return self

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.t1 - self.t0) / self.dt)))

    def time(self, step: int) -> float:
        return self.t0 + step * self.dt


# ---------------------------------------------------------------------------
# Initial damage
# ---------------------------------------------------------------------------

class NoDamage(_Frozen):
    kind: Literal["none"] = "none"

    def evaluate(self, points: np.ndarray, epsilon: float) -> np.ndarray:
        return np.zeros(len(points))


class UniformDamage(_Frozen):
    kind: Literal["uniform"] = "uniform"
    value: float = Field(ge=0.0, le=1.0)

    def evaluate(self, points: np.ndarray, epsilon: float) -> np.ndarray:
        return np.full(len(points), self.value)


class SeedCrack(_Frozen):
    """Thin band exp(-dist/epsilon) around the segment start-end"""

    kind: Literal["seed_crack"] = "seed_crack"
    start: Tuple[float, float]
    end: Tuple[float, float]

    def evaluate(self, points: np.ndarray, epsilon: float) -> np.ndarray:
        a, b = np.asarray(self.start), np.asarray(self.end)
        ab = b - a
        length2 = float(ab @ ab)
        if length2 == 0.0:
            proj = np.zeros(len(points))
        else:
            proj = np.clip((points - a) @ ab / length2, 0.0, 1.0)
        closest = a + proj[:, None] * ab
        dist = np.linalg.norm(points - closest, axis=1)
        return np.clip(np.exp(-dist / epsilon), 0.0, 1.0)


class DamageBump(_Frozen):
    """peak * (1 - (r/radius)^2)+ centred at `center`"""

    kind: Literal["bump"] = "bump"
    center: Tuple[float, float]
    radius: float = Field(gt=0.0)
    peak: float = Field(ge=0.0, le=1.0)

    def evaluate(self, points: np.ndarray, epsilon: float) -> np.ndarray:
        r2 = np.sum((points - np.asarray(self.center)) ** 2, axis=1) / self.radius ** 2
        return self.peak * np.maximum(1.0 - r2, 0.0)


InitialDamage = Annotated[
    Union[NoDamage, UniformDamage, SeedCrack, DamageBump], Field(discriminator="kind")
]


# ---------------------------------------------------------------------------
# Output controls and the full scenario
# ---------------------------------------------------------------------------

class OutputSpec(_Frozen):
    vtk_every: int = Field(default=0, ge=0)  # 0 disables snapshots
    ledger_csv: bool = True
    strip_diagnostics: bool = False
    tip_threshold: float = Field(default=0.5, gt=0.0, lt=1.0)
    end_margin: Optional[float] = Field(default=None, ge=0.0)  # default 2H
    steady_rel_tol: float = Field(default=0.05, gt=0.0)
    steady_stride: int = Field(default=1, ge=1)  # tip increments taken over this many steps
    steady_min_samples: int = Field(default=5, ge=2)
    identity_tolerance: float = Field(default=0.05, gt=0.0)
    identity_abs_floor: float = Field(default=1e-10, ge=0.0)
    stop_at_margin: bool = True


class ScenarioConfig(_Frozen):
    name: str = "fpfm"
    mesh: MeshSpec
    material: MaterialParams
    loads: LoadSpec = LoadSpec()
    time: TimeGrid
    initial_damage: InitialDamage = NoDamage()
    output: OutputSpec = OutputSpec()

    @property
    def half_height(self) -> float:
        return 0.5 * self.mesh.height

    @property
    def end_margin(self) -> float:
        if self.output.end_margin is not None:
            return self.output.end_margin
        return 2.0 * self.half_height


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read and validate a scenario document"""
    try:
        text = Path(path).read_text(encoding="utf-8")
        return ScenarioConfig.model_validate(json.loads(text))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"invalid scenario config {path}: {e}") from e
