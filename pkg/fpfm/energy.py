"""
Energy bookkeeping for coupled runs

EnergyLedger keeps one entry per time step and the discrete residual of the
energy dissipation identity

    d/dt E_tot(t, z(t)) = -D + Fdot

between consecutive entries. StripDiagnostics tracks the traveling-wave
quantities of a strip run (regularized crack length, damaged elastic energy,
tip position, beta) and reduces them over a steady window to the effective
fracture energy G_c^eps = -E_eps'/V.
"""

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from fpfm.core.errors import DomainError, MeshError, SteadyWindowError
from fpfm.core.params import MaterialParams
from fpfm.core.rate_laws import alpha_star
from fpfm.elasticity import FieldLike, as_array, damaged_energy_integral
from fpfm.mesh import Region, TriMesh, node_subset
from fpfm.output import write_csv
from fpfm.phasefield import surface_energy

logger = logging.getLogger("fpfm.energy")


# ---------------------------------------------------------------------------
# Ledger
# ---------------------------------------------------------------------------

@dataclass
class LedgerEntry:
    step: int
    t: float
    e_el: float
    e_s: float
    f_dot: float
    dissipation: float  # over the interval ending at t; 0 for the first entry
    e_tot: float = field(init=False)
    residual: float = float("nan")

    def __post_init__(self):
        self.e_tot = self.e_el + self.e_s


def dissipation_residual(previous: LedgerEntry, current: LedgerEntry) -> float:
    """(E_tot(t_n+1) - E_tot(t_n))/dt + D - midpoint Fdot"""
    dt = current.t - previous.t
    if dt <= 0.0:
        raise DomainError("ledger entries must be in increasing time order")
    return (current.e_tot - previous.e_tot) / dt + current.dissipation - 0.5 * (current.f_dot + previous.f_dot)


def identity_scale(previous: LedgerEntry, current: LedgerEntry) -> float:
    """max(|Fdot|, D, |dE_tot/dt|) used to make the residual relative"""
    dt = current.t - previous.t
    f_dot = 0.5 * (current.f_dot + previous.f_dot)
    return max(abs(f_dot), current.dissipation, abs((current.e_tot - previous.e_tot) / dt))


class EnergyLedger:
    COLUMNS = ("step", "t", "E_el", "E_s", "E_tot", "Fdot", "D", "residual")

    def __init__(self, tolerance: float = 0.05, abs_floor: float = 1e-10):
        self.tolerance = tolerance
        self.abs_floor = abs_floor
        self.entries: List[LedgerEntry] = []
        self.violations: List[int] = []

    def __len__(self):
        return len(self.entries)

    def append(self, entry: LedgerEntry) -> LedgerEntry:
        if self.entries:
            previous = self.entries[-1]
            entry.residual = dissipation_residual(previous, entry)
            bound = self.tolerance * identity_scale(previous, entry) + self.abs_floor
            if abs(entry.residual) > bound:
                self.violations.append(entry.step)
                logger.debug(f"Step {entry.step}: |r|={abs(entry.residual):.3e} above {bound:.3e}")
        self.entries.append(entry)
        return entry

    @property
    def residuals(self) -> np.ndarray:
        return np.array([e.residual for e in self.entries[1:]])

    @property
    def max_abs_residual(self) -> float:
        r = self.residuals
        return float(np.max(np.abs(r))) if r.size else 0.0

    def integrated_residual(self) -> float:
        """Sum of |r| dt over the run"""
        if len(self.entries) < 2:
            return 0.0
        dts = np.diff([e.t for e in self.entries])
        return float(np.sum(np.abs(self.residuals) * dts))

    @property
    def passed(self) -> bool:
        return not self.violations

    def rows(self):
        for e in self.entries:
            yield (e.step, e.t, e.e_el, e.e_s, e.e_tot, e.f_dot, e.dissipation, e.residual)

    def to_csv(self, path: Union[str, Path]) -> Path:
        return write_csv(path, self.COLUMNS, self.rows())


# ---------------------------------------------------------------------------
# Traveling-wave quantities
# ---------------------------------------------------------------------------

def regularized_crack_increment(mesh: TriMesh, z_now: FieldLike, z_ref: FieldLike, mat: MaterialParams) -> float:
    """L_eps: growth of the A-T surface energy per unit G_c"""
    return (surface_energy(mesh, z_now, mat) - surface_energy(mesh, z_ref, mat)) / mat.g_c


def beta_integral(mesh: TriMesh, z: FieldLike) -> float:
    """int |dz/dx1|^2 dx, element-exact for P1"""
    dz_dx = np.einsum("ei,ei->e", as_array(z)[mesh.triangles], mesh.shape_gradients[:, :, 0])
    return float(np.sum(mesh.areas * dz_dx ** 2))


def locate_crack_tip(mesh: TriMesh, z: FieldLike, threshold: float = 0.5, y: float = 0.0) -> float:
    """Largest x on the line y = const with z >= threshold, interpolated to the next node

    NaN when no node on the line reaches the threshold.
    """
    nodes = node_subset(mesh, Region(y=y))
    if nodes.size == 0:
        raise MeshError(f"no mesh nodes on the centerline y={y}")
    order = np.argsort(mesh.nodes[nodes, 0])
    nodes = nodes[order]
    x = mesh.nodes[nodes, 0]
    values = as_array(z)[nodes]

    above = np.flatnonzero(values >= threshold)
    if above.size == 0:
        return float("nan")
    k = above[-1]
    if k == len(nodes) - 1:
        return float(x[k])
    fraction = (values[k] - threshold) / (values[k] - values[k + 1])
    return float(x[k] + fraction * (x[k + 1] - x[k]))


@dataclass(frozen=True)
class VelocityEstimate:
    velocity: float
    intercept: float
    start: int  # first sample of the steady window
    stop: int   # one past the last sample

    @property
    def window(self) -> slice:
        return slice(self.start, self.stop)


def steady_window(values: np.ndarray, rel_tol: float = 0.05, stride: int = 1) -> Tuple[int, int]:
    """Longest tail of `values` whose increments stay within rel_tol of their mean

    Returns (start, stop) sample indices. Increments are taken over `stride`
    samples, which smooths the lattice effect of tip positions on a mesh.
    """
    n = len(values)
    if n < stride + 1:
        raise SteadyWindowError(f"need at least {stride + 1} samples, got {n}")
    increments = values[stride:] - values[:-stride]
    start = len(increments) - 1
    while start > 0:
        window = increments[start - 1:]
        mean = window.mean()
        if np.any(np.abs(window - mean) > rel_tol * abs(mean)):
            break
        start -= 1
    return start, n


def estimate_crack_velocity(
    times: Sequence[float],
    tips: Sequence[float],
    rel_tol: float = 0.05,
    min_samples: int = 2,
    stride: int = 1,
) -> VelocityEstimate:
    """Least-squares slope of x_tip(t) over the detected steady window"""
    times = np.asarray(times, dtype=float)
    tips = np.asarray(tips, dtype=float)
    keep = np.isfinite(tips)
    if not np.all(keep):
        # Only the trailing run of located tips is usable
        last_missing = np.flatnonzero(~keep)[-1]
        times, tips = times[last_missing + 1:], tips[last_missing + 1:]
    if len(tips) < max(min_samples, 2):
        raise SteadyWindowError(f"only {len(tips)} tip samples available")

    start, stop = steady_window(tips, rel_tol, stride)
    if stop - start < max(min_samples, 2):
        raise SteadyWindowError(f"steady window has {stop - start} samples, need {min_samples}")
    slope, intercept = np.polyfit(times[start:stop], tips[start:stop], 1)
    return VelocityEstimate(float(slope), float(intercept), start, stop)


def energy_rate(times: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope dE/dt"""
    slope, _ = np.polyfit(np.asarray(times, dtype=float), np.asarray(values, dtype=float), 1)
    return float(slope)


def effective_fracture_energy(energy_rate_value: float, velocity: float) -> float:
    """G_c^eps = -(dE_eps/dt)/V"""
    if not velocity > 0.0:
        raise DomainError(f"effective fracture energy needs V > 0, got {velocity}")
    return -energy_rate_value / velocity


def traveling_wave_residual(
    energy_rate_value: float, length_rate: float, velocity: float, beta: float, mat: MaterialParams
) -> float:
    """Relative residual of dE_eps/dt + G_c dL_eps/dt + alpha*(V) beta V = 0

    For the linear law the last term is alpha beta V^2, the dissipation of a
    profile translating at speed V.
    """
    if not velocity > 0.0:
        raise DomainError(f"traveling-wave identity needs V > 0, got {velocity}")
    dissipation = alpha_star(mat.rate_law, velocity) * beta * velocity
    terms = (energy_rate_value, mat.g_c * length_rate, dissipation)
    scale = max(abs(v) for v in terms)
    if scale == 0.0:
        return 0.0
    return sum(terms) / scale


@dataclass
class StripSample:
    t: float
    l_eps: float
    e_eps: float
    x_tip: float
    beta: float


@dataclass
class StripSummary:
    velocity: float = float("nan")
    g_c_eps: float = float("nan")
    beta_mean: float = float("nan")
    beta_spread: float = float("nan")   # max |beta - mean|/mean over the window
    length_rate_ratio: float = float("nan")  # L_eps'/V
    ediv_residual: float = float("nan")  # see traveling_wave_residual
    energy_rate: float = float("nan")
    length_rate: float = float("nan")
    window_start: Optional[float] = None
    window_end: Optional[float] = None
    n_samples: int = 0
    flagged: bool = True
    reason: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


class StripDiagnostics:
    """Per-step traveling-wave quantities of a strip run"""

    COLUMNS = ("t", "L_eps", "E_eps", "x_tip", "V", "beta", "Gc_eps")

    def __init__(
        self,
        mesh: TriMesh,
        mat: MaterialParams,
        z_ref: FieldLike,
        threshold: float = 0.5,
        margin: float = 0.0,
        rel_tol: float = 0.05,
        stride: int = 1,
        min_samples: int = 5,
        centerline: float = 0.0,
    ):
        self.mesh = mesh
        self.mat = mat
        self.z_ref = as_array(z_ref).copy()
        self.threshold = threshold
        self.margin = margin
        self.rel_tol = rel_tol
        self.stride = stride
        self.min_samples = min_samples
        self.centerline = centerline
        self.x_min = float(mesh.nodes[:, 0].min())
        self.x_max = float(mesh.nodes[:, 0].max())
        self._surface_ref = surface_energy(mesh, self.z_ref, mat)
        self.samples: List[StripSample] = []

    def record(self, t: float, z: FieldLike, w: np.ndarray) -> StripSample:
        sample = StripSample(
            t=t,
            l_eps=(surface_energy(self.mesh, z, self.mat) - self._surface_ref) / self.mat.g_c,
            e_eps=damaged_energy_integral(self.mesh, w, z, self.mat),
            x_tip=locate_crack_tip(self.mesh, z, self.threshold, self.centerline),
            beta=beta_integral(self.mesh, z),
        )
        self.samples.append(sample)
        return sample

    @property
    def tip(self) -> float:
        return self.samples[-1].x_tip if self.samples else float("nan")

    def tip_reached_margin(self) -> bool:
        return np.isfinite(self.tip) and self.tip >= self.x_max - self.margin

    def rows(self):
        previous = None
        for s in self.samples:
            velocity = g_c_eps = float("nan")
            if previous is not None:
                dt = s.t - previous.t
                velocity = (s.x_tip - previous.x_tip) / dt
                if velocity > 0.0:
                    g_c_eps = -(s.e_eps - previous.e_eps) / dt / velocity
            yield (s.t, s.l_eps, s.e_eps, s.x_tip, velocity, s.beta, g_c_eps)
            previous = s

    def to_csv(self, path: Union[str, Path]) -> Path:
        return write_csv(path, self.COLUMNS, self.rows())

    def summarize(self) -> StripSummary:
        """Reduce the steady window to V, G_c^eps and beta; flags instead of raising"""
        inside = [
            s for s in self.samples
            if np.isfinite(s.x_tip) and self.x_min + self.margin <= s.x_tip <= self.x_max - self.margin
        ]
        if len(inside) < self.min_samples:
            return StripSummary(n_samples=len(inside), reason="too few tip samples away from the strip ends")

        t = np.array([s.t for s in inside])
        tips = np.array([s.x_tip for s in inside])
        try:
            estimate = estimate_crack_velocity(t, tips, self.rel_tol, self.min_samples, self.stride)
        except SteadyWindowError as e:
            logger.warning(f"No steady window: {e}")
            return StripSummary(n_samples=len(inside), reason=str(e))

        window = inside[estimate.window]
        t_w = t[estimate.window]
        summary = StripSummary(
            velocity=estimate.velocity,
            energy_rate=energy_rate(t_w, [s.e_eps for s in window]),
            length_rate=energy_rate(t_w, [s.l_eps for s in window]),
            window_start=float(t_w[0]),
            window_end=float(t_w[-1]),
            n_samples=len(window),
        )
        betas = np.array([s.beta for s in window])
        summary.beta_mean = float(betas.mean())
        if summary.beta_mean > 0.0:
            summary.beta_spread = float(np.abs(betas - summary.beta_mean).max() / summary.beta_mean)

        if not estimate.velocity > 0.0:
            summary.reason = "crack is not advancing in the steady window"
            logger.warning(summary.reason)
            return summary
        summary.g_c_eps = effective_fracture_energy(summary.energy_rate, estimate.velocity)
        summary.length_rate_ratio = summary.length_rate / estimate.velocity
        summary.ediv_residual = traveling_wave_residual(
            summary.energy_rate, summary.length_rate, estimate.velocity, summary.beta_mean, self.mat
        )
        summary.flagged = False
        return summary
