"""
Damaged linear elasticity with P1 triangles

Solves -div((1-z)^2 sigma[u]) = f with u = g on the Dirichlet boundary and
sigma[u] nu = q on loaded Neumann edges. The element stiffness is scaled by
the degradation (1-eta)(1-zbar)^2 + eta of the element-average damage zbar,
eta being the residual stiffness floor.

Strains are element-constant, so the energy density w = sigma[u]:e[u], the
elastic energy and the body/traction work are all integrated exactly.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

import numpy as np
from scipy.sparse import csr_matrix, diags

from fpfm.core.errors import ConfigError, DomainError
from fpfm.core.params import BoundaryTag, LoadSpec, MaterialParams
from fpfm.mesh import TriMesh
from fpfm.sparse import assemble_matrix, assemble_vector, solve_spd

logger = logging.getLogger("fpfm.elasticity")


@dataclass(frozen=True, eq=False)
class NodalField:
    """Scalar (z, w) or 2-vector (u) values at mesh nodes"""

    mesh: TriMesh
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape[0] != self.mesh.n_nodes or values.ndim not in (1, 2):
            raise ValueError(f"field shape {values.shape} does not match {self.mesh.n_nodes} nodes")
        if values.ndim == 2 and values.shape[1] != 2:
            raise ValueError("vector fields must have 2 components")
        object.__setattr__(self, "values", values)

    @property
    def components(self) -> int:
        return 1 if self.values.ndim == 1 else 2

    @classmethod
    def zeros(cls, mesh: TriMesh, components: int = 1) -> "NodalField":
        shape = (mesh.n_nodes,) if components == 1 else (mesh.n_nodes, 2)
        return cls(mesh, np.zeros(shape))

    def is_damage(self) -> bool:
        return self.components == 1 and bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))


FieldLike = Union[NodalField, np.ndarray]


def as_array(field: FieldLike) -> np.ndarray:
    return field.values if isinstance(field, NodalField) else np.asarray(field, dtype=float)


# ---------------------------------------------------------------------------
# Loads
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LoadState:
    """Boundary data and body force at one time, with their time derivatives"""

    t: float
    dirichlet_nodes: np.ndarray   # (nD,)
    g: np.ndarray                 # (nD, 2)
    dg_dt: np.ndarray             # (nD, 2)
    f: np.ndarray                 # (2,) uniform body force
    df_dt: np.ndarray
    loaded_edges: np.ndarray      # indices into mesh.boundary_edges
    q: np.ndarray                 # (2,) uniform traction
    dq_dt: np.ndarray

    @classmethod
    def unloaded(cls, mesh: TriMesh, t: float = 0.0) -> "LoadState":
        nodes = mesh.nodes_with_tag(BoundaryTag.DIRICHLET)
        zero2 = np.zeros(2)
        return cls(
            t=t, dirichlet_nodes=nodes, g=np.zeros((len(nodes), 2)), dg_dt=np.zeros((len(nodes), 2)),
            f=zero2, df_dt=zero2, loaded_edges=mesh.edges_with_tag(BoundaryTag.NEUMANN_LOADED),
            q=zero2, dq_dt=zero2,
        )


class LoadProgram:
    """Turns a LoadSpec into LoadState snapshots on a given mesh"""

    def __init__(self, mesh: TriMesh, spec: LoadSpec):
        self.mesh = mesh
        self.spec = spec
        self.dirichlet_nodes = mesh.nodes_with_tag(BoundaryTag.DIRICHLET)
        self.loaded_edges = mesh.edges_with_tag(BoundaryTag.NEUMANN_LOADED)

    def state(self, t: float) -> LoadState:
        points = self.mesh.nodes[self.dirichlet_nodes]
        spec = self.spec
        return LoadState(
            t=t,
            dirichlet_nodes=self.dirichlet_nodes,
            g=spec.dirichlet.values(points, t),
            dg_dt=spec.dirichlet.rates(points, t),
            f=spec.body_force.value(t),
            df_dt=spec.body_force.rate(t),
            loaded_edges=self.loaded_edges,
            q=spec.traction.value(t),
            dq_dt=spec.traction.rate(t),
        )

    def verify_derivatives(self, times: Iterable[float], tol: float = 1e-6):
        """Central-difference cross-check of every analytic load rate"""
        programs = {
            "dirichlet": self.spec.dirichlet.program,
            "body_force": self.spec.body_force.program,
            "traction": self.spec.traction.program,
        }
        for name, program in programs.items():
            kinks = np.array(program.breakpoints())
            for t in times:
                step = 1e-6 * max(1.0, abs(t))
                if kinks.size and np.min(np.abs(kinks - t)) <= 2.0 * step:
                    continue
                fd = (program.value_at(t + step) - program.value_at(t - step)) / (2.0 * step)
                rate = program.rate_at(t)
                if abs(fd - rate) > tol * max(1.0, abs(rate)):
                    raise ConfigError(
                        f"{name} program rate {rate} disagrees with finite difference {fd} at t={t}"
                    )


# ---------------------------------------------------------------------------
# Element operators
# ---------------------------------------------------------------------------

def strain_operators(mesh: TriMesh) -> np.ndarray:
    """(M, 3, 6) maps element displacement dofs to (e11, e22, 2 e12)"""
    grads = mesh.shape_gradients
    B = np.zeros((mesh.n_triangles, 3, 6))
    B[:, 0, 0::2] = grads[:, :, 0]
    B[:, 1, 1::2] = grads[:, :, 1]
    B[:, 2, 0::2] = grads[:, :, 1]
    B[:, 2, 1::2] = grads[:, :, 0]
    return B


def element_dofs(mesh: TriMesh) -> np.ndarray:
    t = mesh.triangles
    return np.stack([2 * t[:, 0], 2 * t[:, 0] + 1, 2 * t[:, 1], 2 * t[:, 1] + 1, 2 * t[:, 2], 2 * t[:, 2] + 1], axis=1)


def element_stiffness(mesh: TriMesh, mat: MaterialParams) -> np.ndarray:
    """Undamaged (M, 6, 6) element matrices area * B^T D B"""
    B = strain_operators(mesh)
    D = mat.constitutive_matrix()
    return mesh.areas[:, None, None] * np.einsum("eki,kl,elj->eij", B, D, B)


def element_damage(mesh: TriMesh, z: FieldLike) -> np.ndarray:
    """Element-average damage zbar"""
    return as_array(z)[mesh.triangles].mean(axis=1)


def load_vector(mesh: TriMesh, f: np.ndarray, q: np.ndarray, loaded_edges: np.ndarray) -> np.ndarray:
    """Consistent load vector of a uniform body force and a uniform edge traction"""
    F = np.zeros(2 * mesh.n_nodes)
    F[0::2] += mesh.lumped_mass * f[0]
    F[1::2] += mesh.lumped_mass * f[1]
    if len(loaded_edges):
        edges = mesh.boundary_edges[loaded_edges]
        half = 0.5 * mesh.edge_lengths[loaded_edges]
        dofs = np.stack([2 * edges[:, 0], 2 * edges[:, 0] + 1, 2 * edges[:, 1], 2 * edges[:, 1] + 1], axis=1)
        values = half[:, None] * np.array([q[0], q[1], q[0], q[1]])
        F += assemble_vector(values, dofs, 2 * mesh.n_nodes)
    return F


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Unconstrained stiffness/load plus the Dirichlet partition"""

    stiffness: csr_matrix
    load: np.ndarray
    fixed_dofs: np.ndarray
    fixed_values: np.ndarray

    @cached_property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(len(self.load), dtype=bool)
        mask[self.fixed_dofs] = False
        return np.flatnonzero(mask)

    def reduced(self):
        """(K_ff, F_f - K_fd g): Dirichlet rows and columns eliminated symmetrically"""
        K = self.stiffness
        free, fixed = self.free_dofs, self.fixed_dofs
        K_ff = K[free][:, free]
        rhs = self.load[free] - K[free][:, fixed] @ self.fixed_values
        return K_ff, rhs

    def expand(self, free_values: np.ndarray) -> np.ndarray:
        u = np.zeros(len(self.load))
        u[self.free_dofs] = free_values
        u[self.fixed_dofs] = self.fixed_values
        return u


def _fixed_dofs(loads: LoadState):
    nodes = loads.dirichlet_nodes
    dofs = np.stack([2 * nodes, 2 * nodes + 1], axis=1).ravel()
    return dofs, loads.g.ravel()


def assemble_damaged_system(mesh: TriMesh, z: FieldLike, mat: MaterialParams, loads: LoadState) -> AssembledSystem:
    """P1 stiffness scaled per element by the degradation of zbar, with body force and traction"""
    scale = mat.degradation(element_damage(mesh, z))
    Ke = element_stiffness(mesh, mat) * scale[:, None, None]
    K = assemble_matrix(Ke, element_dofs(mesh), 2 * mesh.n_nodes)
    F = load_vector(mesh, loads.f, loads.q, loads.loaded_edges)
    fixed, values = _fixed_dofs(loads)
    return AssembledSystem(stiffness=K, load=F, fixed_dofs=fixed, fixed_values=values)


def _as_vector_field(mesh: TriMesh, u: np.ndarray) -> NodalField:
    return NodalField(mesh, u.reshape(-1, 2))


def solve_displacement(
    mesh: TriMesh, z: FieldLike, mat: MaterialParams, loads: LoadState, tol: float = 1e-10
) -> NodalField:
    """Minimizer u(t, z) of the damaged elastic energy over u = g(t) on the Dirichlet boundary"""
    system = assemble_damaged_system(mesh, z, mat, loads)
    K_ff, rhs = system.reduced()
    u_free = solve_spd(K_ff, rhs, tol=tol)
    return _as_vector_field(mesh, system.expand(u_free))


def relaxed_displacement_step(
    u_prev: FieldLike,
    dt: float,
    mesh: TriMesh,
    z: FieldLike,
    mat: MaterialParams,
    loads: LoadState,
    tol: float = 1e-10,
) -> NodalField:
    """Backward Euler step of alpha_u du/dt - div((1-z)^2 sigma[u]) = f"""
    alpha_u = mat.friction_alpha_u
    if alpha_u <= 0.0:
        raise DomainError("relaxed step needs friction_alpha_u > 0")
    if dt <= 0.0:
        raise DomainError(f"time step must be positive, got {dt}")

    system = assemble_damaged_system(mesh, z, mat, loads)
    free = system.free_dofs
    mass = np.repeat(mesh.lumped_mass, 2)[free] * (alpha_u / dt)
    K_ff, rhs = system.reduced()
    rhs = rhs + mass * as_array(u_prev).ravel()[free]
    u_free = solve_spd(K_ff + diags(mass), rhs, tol=tol)
    return _as_vector_field(mesh, system.expand(u_free))


# ---------------------------------------------------------------------------
# Energies
# ---------------------------------------------------------------------------

def element_strains(mesh: TriMesh, u: FieldLike) -> np.ndarray:
    """(M, 3) Voigt strains (e11, e22, 2 e12)"""
    u_flat = as_array(u).reshape(-1)
    return np.einsum("eij,ej->ei", strain_operators(mesh), u_flat[element_dofs(mesh)])


def energy_density(mesh: TriMesh, u: FieldLike, mat: MaterialParams) -> np.ndarray:
    """Element-constant w = sigma[u]:e[u] of the undamaged material"""
    eps = element_strains(mesh, u)
    w = np.einsum("ei,ij,ej->e", eps, mat.constitutive_matrix(), eps)
    return np.maximum(w, 0.0)


def damaged_energy_integral(mesh: TriMesh, w: np.ndarray, z: FieldLike, mat: MaterialParams) -> float:
    """1/2 int (1-z)^2 w dx with the element-average degradation"""
    return 0.5 * float(np.sum(mat.degradation(element_damage(mesh, z)) * w * mesh.areas))


def external_work(mesh: TriMesh, u: FieldLike, f: np.ndarray, q: np.ndarray, loaded_edges: np.ndarray) -> float:
    return float(load_vector(mesh, f, q, loaded_edges) @ as_array(u).ravel())


def elastic_energy(mesh: TriMesh, u: FieldLike, z: FieldLike, mat: MaterialParams, loads: LoadState) -> float:
    """1/2 int (1-z)^2 sigma:e dx - int f.u dx - int q.u ds"""
    w = energy_density(mesh, u, mat)
    return damaged_energy_integral(mesh, w, z, mat) - external_work(mesh, u, loads.f, loads.q, loads.loaded_edges)


def reactions(mesh: TriMesh, u: FieldLike, z: FieldLike, mat: MaterialParams, loads: LoadState) -> np.ndarray:
    """(nD, 2) Dirichlet reactions: residual K(z) u - F at the constrained dofs"""
    system = assemble_damaged_system(mesh, z, mat, loads)
    residual = system.stiffness @ as_array(u).ravel() - system.load
    return residual[system.fixed_dofs].reshape(-1, 2)


def power_input(mesh: TriMesh, u: FieldLike, z: FieldLike, mat: MaterialParams, loads: LoadState) -> float:
    """Rate of energy injection: reactions . dg/dt - int df/dt . u - int dq/dt . u"""
    boundary = float(np.sum(reactions(mesh, u, z, mat, loads) * loads.dg_dt))
    return boundary - external_work(mesh, u, loads.df_dt, loads.dq_dt, loads.loaded_edges)


def minimal_elastic_energy(mesh: TriMesh, z: FieldLike, mat: MaterialParams, loads: LoadState) -> float:
    """E*_el(t, z) = E_el(t, u(t, z), z)"""
    u = solve_displacement(mesh, z, mat, loads)
    return elastic_energy(mesh, u, z, mat, loads)
