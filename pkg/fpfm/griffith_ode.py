"""
Velocity-dependent Griffith model for a single crack tip

    L'(t) = beta*(G(L(t), t) - G_c),  L(t0) = l0

where G = -dE/dl is the energy release rate of an energy profile E(l, t) and
beta* the generalized inverse of the rate law. The right-hand side is
Lipschitz in l whenever G is, so a fixed-step RK4 is used.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from fpfm.core.algebra import complementarity_triple, positive_part
from fpfm.core.errors import DomainError, PreconditionError
from fpfm.core.rate_laws import RateLaw, alpha_star, beta_star
from fpfm.output import write_csv

logger = logging.getLogger("fpfm.griffith_ode")

GAUSS_ORDER = 8

STATUS_COMPLETE = "complete"
STATUS_LEFT_DOMAIN = "left_domain"


@dataclass(frozen=True)
class EnergyProfile:
    """Energy release rate G(l, t) on a box, with an optional dE/dt(l, t)"""

    release_rate: Callable[[float, float], float]
    l_range: Tuple[float, float]
    t_range: Tuple[float, float]
    time_derivative: Optional[Callable[[float, float], float]] = None
    breakpoints: Tuple[float, ...] = ()  # kinks of G in l, used to split the quadrature
    l_ref: Optional[float] = None        # E(l_ref, t) = 0
    lipschitz: bool = True

    def G(self, l: float, t: float) -> float:
        return float(self.release_rate(l, t))

    def contains(self, l: float) -> bool:
        return self.l_range[0] <= l <= self.l_range[1]

    @property
    def reference_length(self) -> float:
        return self.l_range[0] if self.l_ref is None else self.l_ref

    def energy(self, l: float, t: float) -> float:
        """E(l, t) = -int_{l_ref}^{l} G(s, t) ds by composite Gauss-Legendre"""
        a, b = self.reference_length, l
        sign = 1.0
        if b < a:
            a, b, sign = b, a, -1.0
        cuts = [a] + [p for p in sorted(self.breakpoints) if a < p < b] + [b]
        nodes, weights = np.polynomial.legendre.leggauss(GAUSS_ORDER)
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            half = 0.5 * (hi - lo)
            s = lo + half * (nodes + 1.0)
            total += half * sum(w * self.G(float(si), t) for si, w in zip(s, weights))
        return -sign * total

    def energy_rate(self, l: float, t: float) -> float:
        """dE/dt(l, t), identified with the power input Fdot"""
        if self.time_derivative is None:
            raise PreconditionError("energy profile has no time derivative")
        return float(self.time_derivative(l, t))

    def check_nonnegative(self, n: int = 21, tol: float = 1e-12) -> bool:
        """Spot-check G >= 0 on an n x n grid of the box"""
        for l in np.linspace(*self.l_range, n):
            for t in np.linspace(*self.t_range, n):
                if self.G(float(l), float(t)) < -tol:
                    logger.warning(f"G({l:.3g}, {t:.3g}) is negative")
                    return False
        return True


def figure3_profile(l: float, t: float) -> float:
    """G(l, t) = t (2 - ||l - 1| - 1|)"""
    return t * (2.0 - abs(abs(l - 1.0) - 1.0))


def figure3_energy_profile(l_max: float = 4.0, t_max: float = 10.0) -> EnergyProfile:
    """Profile whose quasi-static crack length jumps from 1 to 3 at t = 1 when G_c = 1

    G is linear in t, so E(l, t) = t E(l, 1) and dE/dt(l, t) = E(l, 1).
    """

    def time_derivative(l: float, t: float) -> float:
        return profile.energy(l, 1.0)

    profile = EnergyProfile(
        release_rate=figure3_profile,
        l_range=(0.0, l_max),
        t_range=(0.0, t_max),
        time_derivative=time_derivative,
        breakpoints=(0.0, 1.0, 2.0),
    )
    return profile


@dataclass
class CrackTrajectory:
    t: np.ndarray
    length: np.ndarray
    velocity: np.ndarray
    release_rate: np.ndarray
    g_c: float
    law: RateLaw
    l0: float
    status: str = STATUS_COMPLETE
    residual: Optional[np.ndarray] = field(default=None, repr=False)

    COLUMNS = ("t", "L", "V", "G", "residual")

    def __len__(self):
        return len(self.t)

    @property
    def complete(self) -> bool:
        return self.status == STATUS_COMPLETE

    def check_invariants(self, tol: float = 1e-12) -> bool:
        """L nondecreasing, V >= 0 and V = beta*(G - G_c) at every sample"""
        if np.any(np.diff(self.length) < -tol) or np.any(self.velocity < -tol):
            return False
        expected = np.array([beta_star(self.law, g - self.g_c) for g in self.release_rate])
        return bool(np.all(np.abs(expected - self.velocity) <= tol * np.maximum(1.0, np.abs(expected))))

    def length_at(self, times) -> np.ndarray:
        return np.interp(times, self.t, self.length)

    def to_csv(self, path: Union[str, Path]) -> Path:
        residual = self.residual if self.residual is not None else np.full(len(self.t), np.nan)
        rows = zip(self.t, self.length, self.velocity, self.release_rate, residual)
        return write_csv(path, self.COLUMNS, rows)


def integrate_crack_length(
    profile: EnergyProfile,
    g_c: float,
    law: RateLaw,
    l0: float,
    t_span: Tuple[float, float],
    dt: float,
) -> CrackTrajectory:
    """Fixed-step RK4 for L' = beta*(G(L, t) - G_c)

    Stops with status left_domain, returning the samples so far, if a stage
    would evaluate G outside the profile's l range.
    """
    if dt <= 0.0:
        raise DomainError(f"time step must be positive, got {dt}")
    if not profile.contains(l0):
        raise DomainError(f"initial length {l0} outside the profile domain {profile.l_range}")
    t0, t1 = t_span
    n_steps = max(1, int(round((t1 - t0) / dt)))

    def rhs(t: float, l: float) -> float:
        if not profile.contains(l):
            raise _LeftDomain()
        return beta_star(law, profile.G(l, t) - g_c)

    times, lengths = [t0], [l0]
    status = STATUS_COMPLETE
    l = l0
    for n in range(n_steps):
        t = t0 + n * dt
        try:
            k1 = rhs(t, l)
            k2 = rhs(t + 0.5 * dt, l + 0.5 * dt * k1)
            k3 = rhs(t + 0.5 * dt, l + 0.5 * dt * k2)
            k4 = rhs(t + dt, l + dt * k3)
            l_next = l + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            if not profile.contains(l_next):
                raise _LeftDomain()
        except _LeftDomain:
            status = STATUS_LEFT_DOMAIN
            logger.warning(f"Crack left the profile domain after t={t:.6g}")
            break
        l = l_next
        times.append(t0 + (n + 1) * dt)
        lengths.append(l)

    t_arr = np.array(times)
    l_arr = np.array(lengths)
    g_arr = np.array([profile.G(li, ti) for li, ti in zip(l_arr, t_arr)])
    v_arr = np.array([beta_star(law, g - g_c) for g in g_arr])
    return CrackTrajectory(t=t_arr, length=l_arr, velocity=v_arr, release_rate=g_arr, g_c=g_c, law=law, l0=l0, status=status)


class _LeftDomain(Exception):
    pass


def kkt_check(V: float, G: float, g_c: float, law: RateLaw, tol: float = 1e-10) -> bool:
    """Griffith triple V >= 0, G <= G_c*(V), V (G_c*(V) - G) = 0

    The equivalent closed form alpha*(V) = (G - G_c)+ is evaluated alongside;
    a disagreement between the two is logged.
    """
    if not all(np.isfinite([V, G, g_c])):
        raise DomainError("kkt_check needs finite inputs")
    alpha = alpha_star(law, max(V, 0.0))
    triple = complementarity_triple(V, g_c + alpha - G, tol)
    closed = V >= -tol and abs(alpha - positive_part(G - g_c)) <= tol
    if triple != closed:
        logger.warning(f"KKT forms disagree at V={V}, G={G}, G_c={g_c}: triple={triple}, closed={closed}")
    return triple


def dissipation_residuals(traj: CrackTrajectory, profile: EnergyProfile) -> np.ndarray:
    """|dE*_tot/dt + alpha*(V) V - dE/dt| per step, left-point, with E*_tot = E(L, t) + G_c L"""
    if profile.time_derivative is None:
        raise PreconditionError("dissipation check needs an energy profile with dE/dt")
    t, L, V = traj.t, traj.length, traj.velocity
    e_tot = np.array([profile.energy(li, ti) for li, ti in zip(L, t)]) + traj.g_c * L
    dissipation = np.array([alpha_star(traj.law, v) * v for v in V])
    power = np.array([profile.energy_rate(li, ti) for li, ti in zip(L, t)])
    return np.abs(np.diff(e_tot) / np.diff(t) + dissipation[:-1] - power[:-1])


def ode_dissipation_check(traj: CrackTrajectory, profile: EnergyProfile) -> float:
    residuals = dissipation_residuals(traj, profile)
    traj.residual = np.append(residuals, np.nan)
    return float(residuals.max()) if residuals.size else 0.0


def jump_fraction(
    traj: CrackTrajectory,
    t_lo: float,
    t_hi: float,
    t_start: Optional[float] = None,
    t_end: Optional[float] = None,
) -> float:
    """Share of the growth over [t_start, t_end] that happens within [t_lo, t_hi]"""
    t_start = traj.t[0] if t_start is None else t_start
    t_end = traj.t[-1] if t_end is None else t_end
    l_start, l_lo, l_hi, l_end = traj.length_at([t_start, t_lo, t_hi, t_end])
    total = l_end - l_start
    if total <= 0.0:
        return 0.0
    return float((l_hi - l_lo) / total)


def trajectory_table(trajectories: Sequence[Tuple[float, CrackTrajectory]]):
    """Rows of (t, L_1, L_2, ...) for trajectories sharing one time grid"""
    base = trajectories[0][1].t
    columns = [traj.length_at(base) for _, traj in trajectories]
    return base, np.column_stack(columns) if columns else np.zeros((len(base), 0))
