"""Coupled quasi-static thermoelasticity on linear finite elements.

Implicit Euler in time; each increment solves one monolithic linear system
for displacement and temperature variation together (``solve_coupled``) or,
given temperatures from elsewhere, the mechanical system alone
(``solve_mechanical``). Temperature is tracked as the variation Θ from the
reference temperature, so the initial state is Θ = 0, u = 0.

Weak-form blocks, with γ = α(3λ+2μ) the stress-temperature modulus:

    [ K_uu          -γ C^T          ] [u]   [f_u]
    [ (γT_o/Δt) C   (ρc/Δt) M + K_k ] [Θ] = [f_q + (ρc/Δt) M Θ_n + (γT_o/Δt) C u_n]

where C[i,(j,a)] = ∫ N_i ∂N_j/∂x_a dΩ carries both the thermoelastic
coupling and its transpose, M is the consistent capacity matrix and K_k the
conductivity matrix.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import (
    Mesh,
    boundary_nodes,
    default_rule,
    element_gradients,
    element_measures,
    facet_geometry,
    find_elements,
    quadrature_points,
    shape_values,
)

__all__ = [
    "MaterialProperties",
    "TimeGrid",
    "BoundaryConditionSet",
    "SolutionHistory",
    "CollocationSet",
    "SingularSystemError",
    "default_material",
    "solve_coupled",
    "solve_mechanical",
    "extract_collocation",
    "interpolation_matrix",
    "quadrature_stresses",
    "error_metrics",
    "aggregated_error",
    "export_field_csv",
    "export_quadrature_csv",
]


class SingularSystemError(RuntimeError):
    """Linear system could not be factorized or produced non-finite values."""


@dataclass(frozen=True)
class MaterialProperties:
    """Isotropic linear thermoelastic constants.

    lam, mu : Pa          Lame parameters
    rho : kg/m^3          density
    alpha : 1/degC        linear thermal expansion
    c_eps : J/(kg degC)   specific heat at constant strain
    k : W/(m degC)        conductivity
    T_o : K               reference temperature the model is linearized about
    """

    lam: float
    mu: float
    rho: float
    alpha: float
    c_eps: float
    k: float
    T_o: float

    def __post_init__(self):
        for name in ("lam", "mu", "rho", "alpha", "c_eps", "k", "T_o"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"material property {name} must be strictly positive")

    @property
    def gamma(self):
        """Stress-temperature modulus α(3λ+2μ), Pa/degC."""
        return self.alpha * (3.0 * self.lam + 2.0 * self.mu)

    @property
    def heat_capacity(self):
        """Volumetric heat capacity ρ c_eps."""
        return self.rho * self.c_eps


def default_material():
    """Aluminum-like constants used across the bundled configurations."""
    return MaterialProperties(
        lam=40e9, mu=27e9, rho=2700.0, alpha=2.31e-5, c_eps=910.0, k=237.0, T_o=293.0
    )


@dataclass(frozen=True)
class TimeGrid:
    """Geometric sequence of time instants from t_first to t_final.

    ``times[i+1]/times[i]`` is constant; step sizes are measured against the
    previous instant with t = 0 before the first increment.
    """

    t_first: float
    t_final: float
    n_increments: int

    def __post_init__(self):
        if not 0.0 < self.t_first <= self.t_final:
            raise ValueError("need 0 < t_first <= t_final")
        if self.n_increments < 1:
            raise ValueError("need at least one increment")
        if self.n_increments == 1 and self.t_first != self.t_final:
            raise ValueError("a single increment requires t_first == t_final")

    @property
    def times(self):
        n = self.n_increments
        if n == 1:
            return np.array([self.t_final])
        ts = self.t_first * (self.t_final / self.t_first) ** (np.arange(n) / (n - 1))
        ts[0], ts[-1] = self.t_first, self.t_final
        return ts

    @property
    def dts(self):
        ts = self.times
        return np.diff(ts, prepend=0.0)


@dataclass
class BoundaryConditionSet:
    """Per-tag boundary data.

    temperature : tag -> prescribed Θ (degC variation)
    displacement : tag -> tuple of per-component values, None = free component
    flux : tag -> prescribed outward normal heat flux (W/m^2)
    traction : tag -> tuple of per-component traction (Pa)
    """

    temperature: dict = field(default_factory=dict)
    displacement: dict = field(default_factory=dict)
    flux: dict = field(default_factory=dict)
    traction: dict = field(default_factory=dict)

    def __post_init__(self):
        both_t = set(self.temperature) & set(self.flux)
        if both_t:
            raise ValueError(f"tags carry both prescribed temperature and flux: {sorted(both_t)}")
        for tag in set(self.displacement) & set(self.traction):
            for c, (dv, tv) in enumerate(zip(self.displacement[tag], self.traction[tag])):
                if dv is not None and tv is not None and tv != 0.0:
                    raise ValueError(
                        f"tag '{tag}' component {c} carries both displacement and traction"
                    )


@dataclass
class SolutionHistory:
    """Nodal fields and quadrature-point strain rates per increment."""

    mesh: Mesh
    times: np.ndarray
    theta: np.ndarray  # (n_inc, n_nodes)
    displacement: np.ndarray  # (n_inc, n_nodes, dim)
    tr_eps_dot: np.ndarray  # (n_inc, n_elem, n_qp)
    qp_coords: np.ndarray  # (n_elem, n_qp, dim)
    qp_weights: np.ndarray  # (n_elem, n_qp)
    step_seconds: np.ndarray  # (n_inc,)
    n_system_dofs: int

    @property
    def n_increments(self):
        return len(self.times)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def _scatter(values, rows, cols, shape):
    # values (E,a,b); rows (E,a); cols (E,b)
    a, b = values.shape[1], values.shape[2]
    r = np.repeat(rows[:, :, None], b, axis=2)
    c = np.repeat(cols[:, None, :], a, axis=1)
    return sp.coo_matrix((values.ravel(), (r.ravel(), c.ravel())), shape=shape).tocsr()


def _elastic_matrix(material, dim):
    lam, mu = material.lam, material.mu
    if dim == 1:
        return np.array([[lam + 2.0 * mu]])
    # plane strain, Voigt order (eps_xx, eps_yy, gamma_xy)
    return np.array(
        [
            [lam + 2.0 * mu, lam, 0.0],
            [lam, lam + 2.0 * mu, 0.0],
            [0.0, 0.0, mu],
        ]
    )


def _b_matrices(mesh, grads):
    """Strain-displacement matrices per element, (E, n_stress, dim*n_local)."""
    E, a, dim = grads.shape
    if dim == 1:
        return grads.transpose(0, 2, 1)  # (E,1,a)
    B = np.zeros((E, 3, 2 * a))
    B[:, 0, 0::2] = grads[:, :, 0]
    B[:, 1, 1::2] = grads[:, :, 1]
    B[:, 2, 0::2] = grads[:, :, 1]
    B[:, 2, 1::2] = grads[:, :, 0]
    return B


def assemble_blocks(mesh, material, rule=None):
    """Global sparse blocks K_uu, C, M, K_cond for the monolithic system."""
    rule = rule or default_rule(mesh.dim)
    dim = mesh.dim
    n = mesh.n_nodes
    elems = mesh.elements
    grads = element_gradients(mesh)
    meas = element_measures(mesh)
    N = shape_values(dim, rule.points)  # (Q, a)
    _, qw = quadrature_points(mesh, rule)  # (E, Q)

    D = _elastic_matrix(material, dim)
    B = _b_matrices(mesh, grads)
    Kuu_e = np.einsum("eia,ij,ejb,e->eab", B, D, B, meas)

    M_e = np.einsum("eq,qa,qb->eab", qw, N, N)
    Kk_e = material.k * np.einsum("ead,ebd,e->eab", grads, grads, meas)
    # C_e[a,(b,d)] = (sum_q w N_a) * dN_b/dx_d
    intN = np.einsum("eq,qa->ea", qw, N)
    C_e = np.einsum("ea,ebd->eabd", intN, grads).reshape(len(elems), elems.shape[1], -1)

    tdofs = elems
    udofs = (elems[:, :, None] * dim + np.arange(dim)[None, None, :]).reshape(len(elems), -1)

    K_uu = _scatter(Kuu_e, udofs, udofs, (dim * n, dim * n))
    M = _scatter(M_e, tdofs, tdofs, (n, n))
    K_cond = _scatter(Kk_e, tdofs, tdofs, (n, n))
    C = _scatter(C_e, tdofs, udofs, (n, dim * n))
    return K_uu, C, M, K_cond


def _boundary_loads(mesh, bcs):
    dim = mesh.dim
    f_u = np.zeros(dim * mesh.n_nodes)
    f_q = np.zeros(mesh.n_nodes)
    for tag, tbar in bcs.traction.items():
        geo = facet_geometry(mesh, tag)
        for frow, measure in zip(mesh.facets[tag], geo["measure"]):
            for node in np.atleast_1d(frow):
                for c, val in enumerate(tbar):
                    if val:
                        f_u[node * dim + c] += val * measure / len(np.atleast_1d(frow))
    for tag, qbar in bcs.flux.items():
        if qbar == 0.0:
            continue
        geo = facet_geometry(mesh, tag)
        for frow, measure in zip(mesh.facets[tag], geo["measure"]):
            nodes = np.atleast_1d(frow)
            for node in nodes:
                f_q[node] -= qbar * measure / len(nodes)
    return f_u, f_q


def _dirichlet(mesh, bcs):
    """Constrained dof indices and values for each field."""
    dim = mesh.dim
    u_idx, u_val = [], []
    for tag, comps in bcs.displacement.items():
        nodes = boundary_nodes(mesh, tag)
        for c, val in enumerate(comps):
            if val is None:
                continue
            u_idx.append(nodes * dim + c)
            u_val.append(np.full(len(nodes), float(val)))
    t_idx, t_val = [], []
    for tag, val in bcs.temperature.items():
        nodes = boundary_nodes(mesh, tag)
        t_idx.append(nodes)
        t_val.append(np.full(len(nodes), float(val)))

    def dedupe(idx, val):
        if not idx:
            return np.zeros(0, dtype=np.int64), np.zeros(0)
        idx = np.concatenate(idx)
        val = np.concatenate(val)
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        uniq, first = np.unique(idx, return_index=True)
        out = val[first]
        # reject contradictory prescriptions of the same dof
        for i, v in zip(idx, val):
            j = np.searchsorted(uniq, i)
            if out[j] != v:
                raise ValueError(f"dof {i} is prescribed two different values ({out[j]} and {v})")
        return uniq, out

    return dedupe(u_idx, u_val), dedupe(t_idx, t_val)


def _constrain(A, b, idx, vals):
    """Move prescribed dofs to the right-hand side and pin them."""
    if len(idx) == 0:
        return A.tocsc(), b
    n = A.shape[0]
    x = np.zeros(n)
    x[idx] = vals
    b = b - A @ x
    keep = np.ones(n)
    keep[idx] = 0.0
    Dk = sp.diags(keep)
    pin = np.zeros(n)
    pin[idx] = 1.0
    A = Dk @ A @ Dk + sp.diags(pin)
    b = b * keep
    b[idx] = vals
    return A.tocsc(), b


def _factor_solve(A, b):
    try:
        lu = splu(A)
    except RuntimeError as exc:
        raise SingularSystemError(
            "linear system is singular; check that displacement constraints "
            f"remove all rigid-body modes ({exc})"
        ) from exc
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("linear solve produced non-finite values")
    return x


def _trace_strain(mesh, grads, u):
    """tr(ε) per element for nodal displacements u (n_nodes, dim)."""
    ue = u[mesh.elements]  # (E, a, dim)
    return np.einsum("ead,ead->e", grads, ue)


def solve_coupled(mesh, material, bcs, time_grid, rule=None):
    """March the monolithic displacement-temperature system through the grid.

    One sparse factorization per increment (the step size changes along the
    geometric grid, so the matrix does too).
    """
    rule = rule or default_rule(mesh.dim)
    dim, n = mesh.dim, mesh.n_nodes
    K_uu, C, M, K_cond = assemble_blocks(mesh, material, rule)
    f_u, f_q = _boundary_loads(mesh, bcs)
    (u_idx, u_val), (t_idx, t_val) = _dirichlet(mesh, bcs)
    grads = element_gradients(mesh)
    qp_coords, qp_weights = quadrature_points(mesh, rule)
    gam, rc, T_o = material.gamma, material.heat_capacity, material.T_o

    times = time_grid.times
    dts = time_grid.dts
    n_inc = time_grid.n_increments
    theta = np.zeros((n_inc, n))
    disp = np.zeros((n_inc, n, dim))
    tr_rate = np.zeros((n_inc, mesh.n_elements, rule.n_points))
    secs = np.zeros(n_inc)

    all_idx = np.concatenate([u_idx, dim * n + t_idx])
    all_val = np.concatenate([u_val, t_val])

    u_prev = np.zeros(dim * n)
    th_prev = np.zeros(n)
    tr_prev = np.zeros(mesh.n_elements)
    for step in range(n_inc):
        t0 = time.perf_counter()
        dt = dts[step]
        A = sp.bmat(
            [
                [K_uu, -gam * C.T],
                [(gam * T_o / dt) * C, (rc / dt) * M + K_cond],
            ],
            format="csr",
        )
        b = np.concatenate([f_u, f_q + (rc / dt) * (M @ th_prev) + (gam * T_o / dt) * (C @ u_prev)])
        A_c, b_c = _constrain(A, b, all_idx, all_val)
        x = _factor_solve(A_c, b_c)
        x[all_idx] = all_val
        u_prev, th_prev = x[: dim * n], x[dim * n :]
        disp[step] = u_prev.reshape(n, dim)
        theta[step] = th_prev
        tr_now = _trace_strain(mesh, grads, disp[step])
        tr_rate[step] = ((tr_now - tr_prev) / dt)[:, None]
        tr_prev = tr_now
        secs[step] = time.perf_counter() - t0

    return SolutionHistory(
        mesh=mesh,
        times=times.copy(),
        theta=theta,
        displacement=disp,
        tr_eps_dot=tr_rate,
        qp_coords=qp_coords,
        qp_weights=qp_weights,
        step_seconds=secs,
        n_system_dofs=(dim + 1) * n,
    )


def solve_mechanical(mesh, material, bcs, nodal_theta_per_step, time_grid, rule=None):
    """Displacement-only marches with temperature supplied as data.

    ``nodal_theta_per_step`` has one row per increment. The system per step
    is dim*n_nodes, smaller than the coupled one by exactly n_nodes.
    """
    rule = rule or default_rule(mesh.dim)
    dim, n = mesh.dim, mesh.n_nodes
    nodal_theta_per_step = np.asarray(nodal_theta_per_step, dtype=float)
    if nodal_theta_per_step.shape != (time_grid.n_increments, n):
        raise ValueError("need one nodal temperature vector per increment")
    K_uu, C, _, _ = assemble_blocks(mesh, material, rule)
    f_u, _ = _boundary_loads(mesh, bcs)
    (u_idx, u_val), _ = _dirichlet(mesh, bcs)
    grads = element_gradients(mesh)
    qp_coords, qp_weights = quadrature_points(mesh, rule)
    gam = material.gamma

    times = time_grid.times
    dts = time_grid.dts
    n_inc = time_grid.n_increments
    disp = np.zeros((n_inc, n, dim))
    tr_rate = np.zeros((n_inc, mesh.n_elements, rule.n_points))
    secs = np.zeros(n_inc)

    tr_prev = np.zeros(mesh.n_elements)
    for step in range(n_inc):
        t0 = time.perf_counter()
        b = f_u + gam * (C.T @ nodal_theta_per_step[step])
        A_c, b_c = _constrain(K_uu, b, u_idx, u_val)
        x = _factor_solve(A_c, b_c)
        x[u_idx] = u_val
        disp[step] = x.reshape(n, dim)
        tr_now = _trace_strain(mesh, grads, disp[step])
        tr_rate[step] = ((tr_now - tr_prev) / dts[step])[:, None]
        tr_prev = tr_now
        secs[step] = time.perf_counter() - t0

    return SolutionHistory(
        mesh=mesh,
        times=times.copy(),
        theta=nodal_theta_per_step.copy(),
        displacement=disp,
        tr_eps_dot=tr_rate,
        qp_coords=qp_coords,
        qp_weights=qp_weights,
        step_seconds=secs,
        n_system_dofs=dim * n,
    )


# ---------------------------------------------------------------------------
# collocation extraction and interpolation
# ---------------------------------------------------------------------------


def interpolation_matrix(mesh, points, elem_ids=None):
    """Sparse (n_points, n_nodes) matrix of linear shape-function weights."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if elem_ids is None:
        elem_ids = find_elements(mesh, points)
    grads = element_gradients(mesh)
    elems = mesh.elements
    if mesh.dim == 1:
        x0 = mesh.nodes[elems[elem_ids, 0], 0]
        h = mesh.nodes[elems[elem_ids, 1], 0] - x0
        xi = (points[:, 0] - x0) / h
        w = np.column_stack([1.0 - xi, xi])
    else:
        p0 = mesh.nodes[elems[elem_ids, 0]]
        d = points - p0
        l1 = np.einsum("pd,pd->p", grads[elem_ids, 1], d)
        l2 = np.einsum("pd,pd->p", grads[elem_ids, 2], d)
        w = np.column_stack([1.0 - l1 - l2, l1, l2])
    rows = np.repeat(np.arange(len(points)), elems.shape[1])
    cols = elems[elem_ids].ravel()
    return sp.coo_matrix((w.ravel(), (rows, cols)), shape=(len(points), mesh.n_nodes)).tocsr()


def _chain_facets(mesh, tag):
    """Order a facet group into a polyline; returns (node sequence, closed?)."""
    facet = mesh.facets[tag]
    if mesh.dim == 1:
        return [int(facet[0, 0])], False
    adj = {}
    for a, b in facet:
        adj.setdefault(int(a), []).append(int(b))
        adj.setdefault(int(b), []).append(int(a))
    ends = sorted(n for n, nb in adj.items() if len(nb) == 1)
    closed = not ends
    start = min(adj) if closed else ends[0]
    seq = [start]
    prev = None
    cur = start
    while True:
        nxt = [n for n in adj[cur] if n != prev]
        if not nxt:
            break
        prev, cur = cur, nxt[0]
        if closed and cur == start:
            break
        seq.append(cur)
        if len(seq) > len(adj) + 1:
            raise ValueError(f"facet group '{tag}' does not form a simple chain")
    return seq, closed


def boundary_sample_points(mesh, tag, n_points):
    """``n_points`` equispaced-by-arclength samples along a tagged boundary.

    Open chains include both endpoints; closed loops distribute points with
    uniform spacing starting at the lowest node id.
    """
    if mesh.dim == 1:
        return mesh.nodes[mesh.facets[tag][:, 0]].astype(float)
    seq, closed = _chain_facets(mesh, tag)
    pts = mesh.nodes[np.array(seq)]
    if closed:
        pts = np.vstack([pts, pts[:1]])
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]
    if closed:
        s = total * np.arange(n_points) / n_points
    else:
        s = total * np.arange(n_points) / (n_points - 1) if n_points > 1 else np.array([0.0])
    out = np.empty((len(s), 2))
    for i, si in enumerate(s):
        j = min(np.searchsorted(arc, si, side="right") - 1, len(seg) - 1)
        f = 0.0 if seg[j] == 0.0 else (si - arc[j]) / seg[j]
        out[i] = pts[j] + f * (pts[j + 1] - pts[j])
    return out


def _facet_normal_at(mesh, tag, points):
    """Outward normal of the nearest facet for each sample point."""
    geo = facet_geometry(mesh, tag)
    mids = geo["midpoint"]
    out = np.empty((len(points), mesh.dim))
    for i, p in enumerate(points):
        j = int(np.argmin(np.linalg.norm(mids - p, axis=1)))
        out[i] = geo["normal"][j]
    return out


@dataclass
class CollocationSet:
    """Training samples: one strain-rate/temperature sequence per point.

    Interior points are the quadrature points of the producing solve; flux
    points sample Neumann boundaries equidistantly. Series arrays are
    (n_points, n_increments).
    """

    dim: int
    times: np.ndarray
    points: np.ndarray
    elem_ids: np.ndarray
    qp_ids: np.ndarray
    tr_eps_dot: np.ndarray
    t_fe: np.ndarray
    flux_points: np.ndarray  # (F, dim); F may be 0
    flux_normals: np.ndarray
    flux_values: np.ndarray
    flux_elem_ids: np.ndarray
    flux_tr_eps_dot: np.ndarray

    @property
    def n_points(self):
        return len(self.points)

    @property
    def n_increments(self):
        return len(self.times)


def extract_collocation(history, mesh, time_grid, bcs=None, rule=None, n_flux_points=50):
    """Flatten a solve history into per-point training sequences.

    Temperature is interpolated with the shape functions; the strain-rate
    input is piecewise constant per element, so any sample point inside an
    element inherits that element's series. ``rule`` defaults to the rule of
    the producing solve (identical quadrature points); passing a different
    rule resamples at its points. Flux sample points are generated for every
    tag in ``bcs.flux``.
    """
    n_inc = history.n_increments
    if rule is None:
        coords = history.qp_coords
        E, Q = coords.shape[:2]
        tr = history.tr_eps_dot.reshape(n_inc, E * Q).T
    else:
        coords, _ = quadrature_points(mesh, rule)
        E, Q = coords.shape[:2]
        # strain rate is element-constant for linear elements
        tr = np.repeat(history.tr_eps_dot[:, :, 0], Q, axis=1).T
    points = coords.reshape(E * Q, mesh.dim)
    elem_ids = np.repeat(np.arange(E), Q)
    qp_ids = np.tile(np.arange(Q), E)
    W = interpolation_matrix(mesh, points, elem_ids=elem_ids)
    t_fe = (history.theta @ W.T).T  # (P, n_inc)

    flux_pts = np.zeros((0, mesh.dim))
    flux_nrm = np.zeros((0, mesh.dim))
    flux_val = np.zeros(0)
    flux_eid = np.zeros(0, dtype=np.int64)
    flux_tr = np.zeros((0, n_inc))
    if bcs is not None and bcs.flux:
        pts_list, nrm_list, val_list = [], [], []
        for tag, qbar in sorted(bcs.flux.items()):
            p = boundary_sample_points(mesh, tag, n_flux_points)
            pts_list.append(p)
            nrm_list.append(_facet_normal_at(mesh, tag, p))
            val_list.append(np.full(len(p), float(qbar)))
        flux_pts = np.vstack(pts_list)
        flux_nrm = np.vstack(nrm_list)
        flux_val = np.concatenate(val_list)
        flux_eid = find_elements(mesh, flux_pts)
        flux_tr = history.tr_eps_dot[:, flux_eid, 0].T

    return CollocationSet(
        dim=mesh.dim,
        times=history.times.copy(),
        points=points,
        elem_ids=elem_ids,
        qp_ids=qp_ids,
        tr_eps_dot=tr,
        t_fe=t_fe,
        flux_points=flux_pts,
        flux_normals=flux_nrm,
        flux_values=flux_val,
        flux_elem_ids=flux_eid,
        flux_tr_eps_dot=flux_tr,
    )


def quadrature_stresses(mesh, material, u_nodal, theta_nodal, rule=None):
    """Stress at quadrature points, Voigt components (1-D: one component).

    σ = D ε(u) − γ Θ I with Θ interpolated at each point.
    """
    rule = rule or default_rule(mesh.dim)
    grads = element_gradients(mesh)
    B = _b_matrices(mesh, grads)
    D = _elastic_matrix(material, mesh.dim)
    dim = mesh.dim
    ue = np.asarray(u_nodal).reshape(mesh.n_nodes, dim)[mesh.elements].reshape(
        mesh.n_elements, -1
    )
    sig_mech = np.einsum("ij,ejk,ek->ei", D, B, ue)  # (E, n_stress)
    N = shape_values(dim, rule.points)
    th_qp = np.einsum("qa,ea->eq", N, np.asarray(theta_nodal)[mesh.elements])
    out = np.repeat(sig_mech[:, None, :], rule.n_points, axis=1).copy()
    th_term = material.gamma * th_qp
    if dim == 1:
        out[:, :, 0] -= th_term
    else:
        out[:, :, 0] -= th_term
        out[:, :, 1] -= th_term
    return out


# ---------------------------------------------------------------------------
# error metrics and CSV export
# ---------------------------------------------------------------------------


def error_metrics(field_a, field_b):
    """Pointwise and aggregated differences between two field histories.

    Returns a dict with "er_abs" (|a-b|), "er_rel" (percent, NaN where the
    reference is zero), "excluded" (mask of those zero-reference points) and
    "er_aggreg" (mean over increments of the node-averaged squared error).
    """
    a = np.asarray(field_a, dtype=float)
    b = np.asarray(field_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("fields must have matching shapes")
    er_abs = np.abs(a - b)
    excluded = b == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        er_rel = np.where(excluded, np.nan, er_abs / np.abs(b) * 100.0)
    return {
        "er_abs": er_abs,
        "er_rel": er_rel,
        "excluded": excluded,
        "er_aggreg": aggregated_error(a, b),
    }


def aggregated_error(field_a, field_b):
    """Mean over increments of squared per-increment node-normalized errors.

    Per increment i: e_i = (1/N_nodes) * sum_nodes (a-b)^2; the aggregate is
    (1/N_inc) * sum_i e_i^2. One-dimensional inputs count as one increment.
    """
    a = np.atleast_2d(np.asarray(field_a, dtype=float))
    b = np.atleast_2d(np.asarray(field_b, dtype=float))
    diff2 = (a - b) ** 2
    per_inc = diff2.reshape(diff2.shape[0], -1).sum(axis=1) / diff2[0].size
    return float((per_inc**2).sum() / len(per_inc))


def _fmt(x):
    return repr(float(x))


def export_field_csv(path, mesh, times, values, header="value"):
    """Write one nodal field history: step,time,node_id,x,[y,]value."""
    values = np.asarray(values)
    cols = ["step", "time", "node_id", "x"] + (["y"] if mesh.dim == 2 else []) + [header]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for s, t in enumerate(times):
            for i in range(mesh.n_nodes):
                xy = ",".join(_fmt(c) for c in mesh.nodes[i])
                fh.write(f"{s},{_fmt(t)},{i},{xy},{_fmt(values[s, i])}\n")


def export_quadrature_csv(path, mesh, history):
    """Write strain-rate history: step,time,elem_id,qp_id,x,[y,]tr_eps_dot."""
    cols = ["step", "time", "elem_id", "qp_id", "x"] + (["y"] if mesh.dim == 2 else [])
    cols += ["tr_eps_dot"]
    E, Q = history.qp_coords.shape[:2]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for s, t in enumerate(history.times):
            for e in range(E):
                for q in range(Q):
                    xy = ",".join(_fmt(c) for c in history.qp_coords[e, q])
                    fh.write(f"{s},{_fmt(t)},{e},{q},{xy},{_fmt(history.tr_eps_dot[s, e, q])}\n")
