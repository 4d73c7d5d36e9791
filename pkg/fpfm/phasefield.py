"""
Irreversible gradient flow of the phase field z

    alpha*(dz/dt) = (eps div(G_c grad z) - (G_c/eps) z + (1 - z) w)+

discretized with P1 elements and a lumped mass. Diffusion, the mass term and
the -w z part of the driving force are taken implicitly, so one linear
solve gives an unconstrained candidate; irreversibility is the nodewise
projection z_new = max(candidate, z_old), followed by the upper clamp z <= 1.
Nodes on loaded Neumann edges are pinned at z = 0.
"""

import logging
from typing import Set, Tuple

import numpy as np
from scipy.sparse import csr_matrix, diags

from fpfm.core.errors import DomainError, SolverError
from fpfm.core.params import BoundaryTag, MaterialParams
from fpfm.core.rate_laws import LinearRateLaw, PowerRateLaw, TabulatedRateLaw
from fpfm.elasticity import FieldLike, NodalField, as_array
from fpfm.mesh import TriMesh
from fpfm.sparse import assemble_matrix, assemble_vector, solve_spd

logger = logging.getLogger("fpfm.phasefield")

_stability_warned: Set[Tuple[float, float]] = set()


def scalar_stiffness(mesh: TriMesh) -> csr_matrix:
    """K_z with (K_z)_ij = int grad phi_i . grad phi_j"""
    grads = mesh.shape_gradients
    Ke = mesh.areas[:, None, None] * np.einsum("eik,ejk->eij", grads, grads)
    return assemble_matrix(Ke, mesh.triangles, mesh.n_nodes)


def pinned_nodes(mesh: TriMesh) -> np.ndarray:
    """z = 0 on loaded Neumann edges"""
    return mesh.nodes_with_tag(BoundaryTag.NEUMANN_LOADED)


def surface_energy(mesh: TriMesh, z: FieldLike, mat: MaterialParams) -> float:
    """1/2 int G_c (eps |grad z|^2 + z^2/eps) dx, mass term lumped"""
    z = as_array(z)
    gradient_term = float(z @ (scalar_stiffness(mesh) @ z))
    mass_term = float(np.sum(mesh.lumped_mass * z ** 2))
    return 0.5 * mat.g_c * (mat.epsilon * gradient_term + mass_term / mat.epsilon)


def _elastic_coupling(mesh: TriMesh, w: np.ndarray, mat: MaterialParams):
    """Source r0 and matrix W with -d/dz (1/2 int g(zbar) w) = r0 - W z"""
    weights = (1.0 - mat.residual_stiffness) * np.asarray(w) * mesh.areas
    r0 = assemble_vector(np.repeat(weights[:, None] / 3.0, 3, axis=1), mesh.triangles, mesh.n_nodes)
    W = assemble_matrix(
        np.broadcast_to(weights[:, None, None] / 9.0, (mesh.n_triangles, 3, 3)).copy(),
        mesh.triangles,
        mesh.n_nodes,
    )
    return r0, W


def driving_force(mesh: TriMesh, z: FieldLike, w: np.ndarray, mat: MaterialParams) -> NodalField:
    """-dE_tot/dz per unit nodal area, before the positive part

    The elastic part is (1 - eta)(1 - z) w with eta the residual stiffness,
    so z = 0 and a uniform w = c give (1 - eta) c away from pinned nodes.
    """
    z = as_array(z)
    r0, W = _elastic_coupling(mesh, w, mat)
    K = scalar_stiffness(mesh)
    m = mesh.lumped_mass
    gradient = mat.g_c * mat.epsilon * (K @ z) + (mat.g_c / mat.epsilon) * m * z - (r0 - W @ z)
    force = -gradient / m
    force[pinned_nodes(mesh)] = 0.0
    return NodalField(mesh, force)


def reference_alpha(mat: MaterialParams) -> float:
    """Slope used by the stability guideline: alpha, k, or the first table segment"""
    law = mat.rate_law
    if isinstance(law, LinearRateLaw):
        return law.alpha_coefficient
    if isinstance(law, PowerRateLaw):
        return law.k
    velocities, values = law.velocities, law.values
    return float(values[1] / velocities[1])


def stable_time_step(w: np.ndarray, mat: MaterialParams) -> float:
    """Guideline dt <= alpha*eps/(2 max w) for the explicitly lagged elastic term"""
    w_max = float(np.max(w)) if len(w) else 0.0
    if w_max <= 0.0:
        return np.inf
    return reference_alpha(mat) * mat.epsilon / (2.0 * w_max)


def _secant_alpha(mat: MaterialParams, v: np.ndarray, v_floor: float) -> np.ndarray:
    """alpha*(v)/v nodewise, with v clamped below at v_floor"""
    law = mat.rate_law
    v = np.maximum(v, v_floor)
    if isinstance(law, PowerRateLaw):
        return law.k * v ** (law.p - 1.0)
    if isinstance(law, TabulatedRateLaw):
        if np.any(v > law.velocities[-1]):
            raise SolverError("phase-field rate left the tabulated rate law range")
        return np.interp(v, law.velocities, law.values) / v
    return np.full_like(v, law.alpha_coefficient)


def step_phase_field(
    mesh: TriMesh,
    z_old: FieldLike,
    w: np.ndarray,
    dt: float,
    mat: MaterialParams,
    tol: float = 1e-8,
    max_iterations: int = 100,
) -> NodalField:
    """One semi-implicit irreversible step of the phase field"""
    if dt <= 0.0:
        raise DomainError(f"time step must be positive, got {dt}")
    z_old = as_array(z_old)

    dt_stable = stable_time_step(w, mat)
    key = (dt, reference_alpha(mat))
    if dt > dt_stable and key not in _stability_warned:
        _stability_warned.add(key)
        logger.warning(f"dt={dt:.3e} exceeds the stability guideline {dt_stable:.3e}")

    m = mesh.lumped_mass
    r0, W = _elastic_coupling(mesh, w, mat)
    base = mat.g_c * mat.epsilon * scalar_stiffness(mesh) + diags((mat.g_c / mat.epsilon) * m) + W

    pinned = pinned_nodes(mesh)
    free = np.setdiff1d(np.arange(mesh.n_nodes), pinned)
    base_ff = base[free][:, free]

    def solve_with(rate_coefficient: np.ndarray) -> np.ndarray:
        relax = rate_coefficient * m / dt
        rhs = (relax * z_old + r0)[free]
        candidate = np.zeros(mesh.n_nodes)
        candidate[free] = solve_spd(base_ff + diags(relax[free]), rhs)
        z_new = np.minimum(np.maximum(candidate, z_old), 1.0)
        z_new[pinned] = 0.0
        return z_new

    v_floor = tol / dt
    if isinstance(mat.rate_law, LinearRateLaw):
        return NodalField(mesh, solve_with(_secant_alpha(mat, np.zeros_like(z_old), v_floor)))

    # Secant fixed point: freeze alpha*(v)/v, solve, update v; damped if the update grows
    z_iter = z_old.copy()
    previous_change = np.inf
    theta = 1.0
    for iteration in range(1, max_iterations + 1):
        coefficient = _secant_alpha(mat, (z_iter - z_old) / dt, v_floor)
        z_next = solve_with(coefficient)
        change = float(np.max(np.abs(z_next - z_iter)))
        if change <= tol:
            return NodalField(mesh, z_next)
        if change > previous_change:
            theta = max(0.5 * theta, 1.0 / 64.0)
        previous_change = change
        z_iter = z_iter + theta * (z_next - z_iter)
    raise SolverError("phase-field fixed point did not converge", residual=change, iterations=max_iterations)


def dissipation_rate(mesh: TriMesh, z_new: FieldLike, z_old: FieldLike, dt: float, mat: MaterialParams) -> float:
    """Sum of m_i alpha*(v_i) v_i with v = (z_new - z_old)/dt; alpha int |dz/dt|^2 for the linear law"""
    v = (as_array(z_new) - as_array(z_old)) / dt
    v = np.maximum(v, 0.0)
    law = mat.rate_law
    if isinstance(law, LinearRateLaw):
        rate = law.alpha_coefficient * v
    elif isinstance(law, PowerRateLaw):
        rate = law.k * v ** law.p
    else:
        rate = np.array([law.alpha(float(vi)) for vi in v])
    return float(np.sum(mesh.lumped_mass * rate * v))
