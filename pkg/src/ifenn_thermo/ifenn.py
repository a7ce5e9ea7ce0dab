"""Training and deployment of the temperature networks inside FE solves.

Pipeline: a coupled FEM solve provides collocation data; a network is
trained against the energy-balance objective (or pure data for the
ablation); the trained model then supplies nodal temperatures so that each
subsequent increment only solves the mechanical system, which is smaller by
exactly the temperature DOF count.

Strain-rate inputs at deployment come from either a replay source (the
stored training history, interpolated in space, the default) or a lagged
source (rates fed back from the mechanical steps already computed, with the
current step holding the previous step's rate).
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import TaylorValue
from .fem import (
    BoundaryConditionSet,
    CollocationSet,
    MaterialProperties,
    SolutionHistory,
    TimeGrid,
    _boundary_loads,
    _constrain,
    _dirichlet,
    _factor_solve,
    assemble_blocks,
    interpolation_matrix,
)
from .loss import LossBreakdown, LossConfig, loss_terms
from .mesh import Mesh, default_rule, element_gradients, find_elements, quadrature_points
from .network import (
    MlpConfig,
    NormalizationRecord,
    RffConfig,
    TcnConfig,
    build_mlp_layout,
    build_sequence_batch,
    build_tcn_layout,
    dirichlet_lift,
    fit_normalization,
    init_params,
    load_model_file,
    make_dropout_masks,
    mlp_apply,
    rff_matrix,
    save_model_file,
    sequence_taylor_inputs,
    tcn_apply,
)
from .optim import LbfgsConfig, minimize

__all__ = [
    "TrainedModel",
    "ReplayStrainRate",
    "train_pitcn",
    "train_pinn_sequence",
    "predict_nodal_theta",
    "run_ifenn",
    "config_hash",
]


def config_hash(obj):
    """Stable sha256 of a JSON-serializable configuration object."""
    blob = json.dumps(obj, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def _directions_for(dim):
    dirs = ("t", "x") if dim == 1 else ("t", "x", "y")
    pairs = (("x", "x"),) if dim == 1 else (("x", "x"), ("y", "y"))
    return dirs, pairs


def _squeeze_last(v):
    # (P, T, 1) -> (P, T) for arrays and tape variables alike
    return v[:, :, 0]


@dataclass
class TrainedModel:
    """A trained temperature network plus everything needed to re-run it."""

    kind: str  # pi_tcn | data_driven_tcn | mlp_pinn_sequence
    material: MaterialProperties
    lift: object
    norm: NormalizationRecord
    params: np.ndarray  # flat, or (n_steps, n) for the per-step family
    rff_h: np.ndarray
    feature_names: tuple
    dim: int
    seeds: dict
    tcn_config: TcnConfig = None
    mlp_config: MlpConfig = None
    rff_config: RffConfig = None
    final_loss: LossBreakdown = None
    train_times: np.ndarray = None  # increments the model was trained on
    meta: dict = field(default_factory=dict)
    train_masks: dict = None  # frozen dropout masks, training only; never persisted

    def layout(self):
        n_feat = len(self.feature_names)
        if self.kind in ("pi_tcn", "data_driven_tcn"):
            return build_tcn_layout(self.tcn_config, n_feat, self.rff_config)
        return build_mlp_layout(self.mlp_config, n_feat, self.rff_config)

    # -- forward passes ----------------------------------------------------

    def _tcn_forward(self, params, points, times, rates, taylor=False, pairs=None):
        batch = build_sequence_batch(points, times, rates, norm=self.norm, dim=self.dim)
        if taylor:
            dirs, default_pairs = _directions_for(self.dim)
            x = sequence_taylor_inputs(batch, dirs, default_pairs if pairs is None else pairs)
        else:
            x = batch.features
        lay = self.layout()
        raw = tcn_apply(params, lay, self.tcn_config, self.rff_h, x,
                        dropout_masks=self.train_masks)
        return dirichlet_lift(raw, self.lift, batch.points)

    def _pinn_features(self, points, rates_step):
        P = len(points)
        feats = np.empty((P, 1, self.dim + 1))
        for d in range(self.dim):
            feats[:, 0, d] = points[:, d]
        feats[:, 0, -1] = rates_step / self.norm.eps_scale
        return feats

    def _pinn_forward(self, params_step, points, rates_step, taylor=False):
        feats = self._pinn_features(points, rates_step)
        if taylor:
            P = len(points)
            shape = feats.shape
            d1 = {}
            names = ("x",) if self.dim == 1 else ("x", "y")
            for i, nm in enumerate(names):
                c = np.zeros(shape)
                c[:, 0, i] = 1.0
                d1[nm] = c
            pairs = ((("x", "x"),) if self.dim == 1 else (("x", "x"), ("y", "y")))
            x = TaylorValue(feats, d1, {p: np.zeros(shape) for p in pairs})
        else:
            x = feats
        lay = self.layout()
        raw = mlp_apply(params_step, lay, self.mlp_config, self.rff_h, x)
        return dirichlet_lift(raw, self.lift, np.atleast_2d(points))

    def predict_theta(self, points, times, rates, chunk=4096):
        """Temperature variation (n_points, n_steps) at arbitrary points.

        ``rates`` is the (n_points, n_steps) strain-rate-trace input series.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        times = np.asarray(times, dtype=float)
        out = np.empty((len(points), len(times)))
        val = lambda v: v.val if isinstance(v, TaylorValue) else v
        for lo in range(0, len(points), chunk):
            sl = slice(lo, min(lo + chunk, len(points)))
            if self.kind in ("pi_tcn", "data_driven_tcn"):
                out[sl] = val(self._tcn_forward(self.params, points[sl], times, rates[sl]))[:, :, 0]
            else:
                for s in range(len(times)):
                    o = val(self._pinn_forward(self.params[s], points[sl], rates[sl][:, s]))
                    out[sl, s] = o[:, 0, 0]
        return out

    # -- loss plumbing -------------------------------------------------------

    def loss_ingredients(self, colloc, config, params=None):
        """Model outputs needed by the objective, on any parameter backing."""
        p = self.params if params is None else params
        if self.kind in ("pi_tcn", "data_driven_tcn"):
            return _tcn_ingredients(self, p, colloc, config)
        return _pinn_sequence_ingredients(self, p, colloc, config)

    def loss_value(self, colloc, config, params=None):
        ing = self.loss_ingredients(colloc, config, params=params)
        terms = loss_terms(ing, colloc, config, self.material)
        t = terms["total"]
        return float(t.data) if hasattr(t, "data") else float(t)

    # -- persistence ---------------------------------------------------------

    def save(self, path):
        mat = self.material
        meta = dict(self.meta)
        meta["material"] = {
            "lam": mat.lam, "mu": mat.mu, "rho": mat.rho, "alpha": mat.alpha,
            "c_eps": mat.c_eps, "k": mat.k, "T_o": mat.T_o,
        }
        meta["dim"] = self.dim
        if self.final_loss is not None:
            meta["final_loss"] = {
                "l2_e": self.final_loss.l2_e, "l2_t": self.final_loss.l2_t,
                "l2_q": self.final_loss.l2_q, "total": self.final_loss.total,
            }
        if self.train_times is not None:
            meta["train_times"] = list(map(float, self.train_times))
        save_model_file(
            path,
            kind=self.kind,
            params=self.params,
            rff_h=self.rff_h,
            norm=self.norm,
            lift=self.lift,
            feature_names=self.feature_names,
            seeds=self.seeds,
            tcn_config=self.tcn_config,
            mlp_config=self.mlp_config,
            rff_config=self.rff_config,
            meta=meta,
        )

    @classmethod
    def load(cls, path):
        doc = load_model_file(path)
        meta = doc.get("meta", {})
        mat = MaterialProperties(**meta["material"])
        fl = meta.get("final_loss")
        return cls(
            kind=doc["kind"],
            material=mat,
            lift=doc["lift"],
            norm=doc["normalization"],
            params=doc["params"],
            rff_h=doc["rff_matrix"],
            feature_names=tuple(doc["feature_names"]),
            dim=int(meta["dim"]),
            seeds=doc.get("seeds", {}),
            tcn_config=doc.get("tcn_config"),
            mlp_config=doc.get("mlp_config"),
            rff_config=doc.get("rff_config"),
            final_loss=LossBreakdown(**fl) if fl else None,
            train_times=np.array(meta["train_times"]) if "train_times" in meta else None,
            meta={k: v for k, v in meta.items()
                  if k not in ("material", "dim", "final_loss", "train_times")},
        )


def _tcn_ingredients(model, p, colloc, config):
    dim = colloc.dim
    mat = model.material
    need_phys = config.physics
    lifted = model._tcn_forward(p, colloc.points, colloc.times, colloc.tr_eps_dot,
                                taylor=need_phys)
    ing = {"t_pred": _squeeze_last(lifted.val if isinstance(lifted, TaylorValue) else lifted)}
    if need_phys:
        lap = lifted.d2[("x", "x")]
        if dim == 2:
            lap = lap + lifted.d2[("y", "y")]
        ing["dT_dt"] = _squeeze_last(lifted.d1["t"])
        ing["flux_div"] = _squeeze_last(lap) * (-mat.k)
    if config.flux and len(colloc.flux_points):
        fl = model._tcn_forward(p, colloc.flux_points, colloc.times, colloc.flux_tr_eps_dot,
                                taylor=True, pairs=())
        qn = fl.d1["x"] * colloc.flux_normals[:, 0][:, None, None]
        if dim == 2:
            qn = qn + fl.d1["y"] * colloc.flux_normals[:, 1][:, None, None]
        ing["flux_qn"] = _squeeze_last(qn) * (-mat.k)
    return ing


def _pinn_sequence_ingredients(model, params, colloc, config):
    """Whole-sequence ingredients from per-step parameter vectors (reporting)."""
    mat = model.material
    dts = np.diff(colloc.times, prepend=0.0)
    P, T = colloc.tr_eps_dot.shape
    t_pred = np.empty((P, T))
    dT = np.empty((P, T))
    lap = np.empty((P, T))
    prev = np.zeros(P)
    for s in range(T):
        tv = model._pinn_forward(params[s], colloc.points, colloc.tr_eps_dot[:, s],
                                 taylor=config.physics)
        t_pred[:, s] = tv.val[:, 0, 0]
        if config.physics:
            l = tv.d2[("x", "x")]
            if colloc.dim == 2:
                l = l + tv.d2[("y", "y")]
            lap[:, s] = l[:, 0, 0]
        dT[:, s] = (t_pred[:, s] - prev) / dts[s]
        prev = t_pred[:, s]
    ing = {"t_pred": t_pred}
    if config.physics:
        ing["dT_dt"] = dT
        ing["flux_div"] = -mat.k * lap
    if config.flux and len(colloc.flux_points):
        raise NotImplementedError("flux reporting for the per-step family is assembled per step")
    return ing


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


class _TraceWriter:
    def __init__(self, path):
        self.fh = open(path, "w") if path else None
        if self.fh:
            self.fh.write("iter,L2_E,L2_T,L2_q,total,grad_norm\n")

    def row(self, it, bd, gnorm):
        if self.fh:
            self.fh.write(f"{it},{bd.l2_e!r},{bd.l2_t!r},{bd.l2_q!r},{bd.total!r},{gnorm!r}\n")
            self.fh.flush()

    def close(self):
        if self.fh:
            self.fh.close()


def _atomic_save(model, path):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    os.close(fd)
    try:
        model.save(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


class _Objective:
    """Full-batch loss closure with per-evaluation breakdown capture."""

    def __init__(self, model, colloc, config):
        self.model = model
        self.colloc = colloc
        self.config = config
        self._recent = []

    def _terms(self, p):
        ing = self.model.loss_ingredients(self.colloc, self.config, params=p)
        return loss_terms(ing, self.colloc, self.config, self.model.material)

    def value_and_grad(self, x):
        def fn(p_var):
            terms = self._terms(p_var)
            sc = lambda v: float(v.data) if hasattr(v, "data") else float(v)
            self._recent.append(
                (sc(terms["total"]),
                 LossBreakdown(sc(terms["l2_e"]), sc(terms["l2_t"]), sc(terms["l2_q"]),
                               sc(terms["total"]))))
            if len(self._recent) > 8:
                self._recent.pop(0)
            return terms["total"]

        return ad.value_and_grad(fn, x)

    def breakdown_at(self, x, f):
        for fv, bd in reversed(self._recent):
            if fv == f:
                return bd
        terms = self._terms(np.asarray(x))
        sc = lambda v: float(v.data) if hasattr(v, "data") else float(v)
        return LossBreakdown(sc(terms["l2_e"]), sc(terms["l2_t"]), sc(terms["l2_q"]),
                             sc(terms["total"]))


def train_pitcn(colloc, *, material, lift, tcn_config=None, rff_config=None,
                loss_config=None, opt_config=None, seed=0, trace_path=None,
                checkpoint_path=None, meta=None):
    """Train one sequence model over all increments.

    The physics term drives a "pi_tcn" model; disabling it (data-only
    config) yields the "data_driven_tcn" ablation on identical machinery.
    FE temperatures enter only through the data term; the physics and flux
    terms never see them.
    """
    tcn_config = tcn_config or TcnConfig()
    rff_config = rff_config or RffConfig()
    loss_config = loss_config or LossConfig()
    opt_config = opt_config or LbfgsConfig()
    kind = "pi_tcn" if loss_config.physics else "data_driven_tcn"
    norm = fit_normalization(colloc.times, colloc.tr_eps_dot)
    n_feat = 2 + colloc.dim
    layout = build_tcn_layout(tcn_config, n_feat, rff_config)
    rff_h = rff_matrix(rff_config, tcn_config.n_filters)
    p0 = init_params(layout, seed)
    feature_names = ("t", "x", "eps_rate") if colloc.dim == 1 else ("t", "x", "y", "eps_rate")
    model = TrainedModel(
        kind=kind, material=material, lift=lift, norm=norm, params=p0.values,
        rff_h=rff_h, feature_names=feature_names, dim=colloc.dim,
        seeds={"init": seed, "rff": rff_config.seed},
        tcn_config=tcn_config, rff_config=rff_config,
        train_times=np.asarray(colloc.times, dtype=float), meta=dict(meta or {}),
    )
    if tcn_config.dropout > 0.0:
        # fixed masks keep the objective deterministic for LBFGS
        model.train_masks = make_dropout_masks(
            tcn_config, colloc.n_points, colloc.n_increments, seed + 1)
        model.meta["dropout_masks_seed"] = seed + 1
    obj = _Objective(model, colloc, loss_config)
    tracer = _TraceWriter(trace_path)
    state = {"since_save": 20}

    def cb(it, x, f, g):
        bd = obj.breakdown_at(x, f)
        tracer.row(it, bd, float(np.max(np.abs(g))))
        state["since_save"] += 1
        # descent is monotone, so the latest iterate is also the best one
        if checkpoint_path and state["since_save"] >= 20:
            model.params = x.copy()
            _atomic_save(model, checkpoint_path)
            state["since_save"] = 0

    t0 = time.perf_counter()
    result = minimize(obj.value_and_grad, p0.values, opt_config, callback=cb)
    seconds = time.perf_counter() - t0
    tracer.close()
    model.train_masks = None
    model.params = result.x
    bd = obj.breakdown_at(result.x, result.f)
    model.final_loss = bd
    model.meta.update(
        {
            "optimizer_status": result.status,
            "n_iterations": result.n_iterations,
            "n_evaluations": result.n_evaluations,
        }
    )
    model.meta.setdefault("training_seconds", seconds)
    if checkpoint_path:
        _atomic_save(model, checkpoint_path)
    return model


def train_pinn_sequence(colloc, *, material, lift, mlp_config=None, rff_config=None,
                        loss_config=None, opt_config=None, seed=0, trace_path=None,
                        meta=None):
    """One MLP per increment, each warm-started from the previous optimum.

    The time derivative uses the same backward difference as the FE scheme,
    with the previous step's converged network values as data. A failed step
    is recorded and the next step continues from the last successful
    parameters.
    """
    mlp_config = mlp_config or MlpConfig()
    rff_config = rff_config or RffConfig()
    loss_config = loss_config or LossConfig()
    opt_config = opt_config or LbfgsConfig()
    norm = fit_normalization(colloc.times, colloc.tr_eps_dot)
    n_feat = colloc.dim + 1  # coords + strain rate; no time input
    layout = build_mlp_layout(mlp_config, n_feat, rff_config)
    rff_h = rff_matrix(rff_config, n_feat) if mlp_config.use_rff else None
    feature_names = ("x", "eps_rate") if colloc.dim == 1 else ("x", "y", "eps_rate")
    T = colloc.n_increments
    P = colloc.n_points
    params = np.zeros((T, layout.n_params))
    model = TrainedModel(
        kind="mlp_pinn_sequence", material=material, lift=lift, norm=norm, params=params,
        rff_h=rff_h, feature_names=feature_names, dim=colloc.dim,
        seeds={"init": seed, "rff": rff_config.seed},
        mlp_config=mlp_config, rff_config=rff_config,
        train_times=np.asarray(colloc.times, dtype=float), meta=dict(meta or {}),
    )
    dts = np.diff(colloc.times, prepend=0.0)
    mat = material
    prev_values = np.zeros(P)
    p_cur = init_params(layout, seed).values
    tracer = _TraceWriter(trace_path)
    statuses = []
    for s in range(T):
        rates = colloc.tr_eps_dot[:, s]
        t_fe_s = colloc.t_fe[:, s]
        dt = dts[s]
        prev = prev_values.copy()

        def fg(x, s=s, rates=rates, t_fe_s=t_fe_s, dt=dt, prev=prev):
            def fn(p_var):
                tv = model._pinn_forward(p_var, colloc.points, rates,
                                         taylor=loss_config.physics)
                t_pred = tv.val[:, 0, 0] if isinstance(tv, TaylorValue) else tv[:, 0, 0]
                total = 0.0
                if loss_config.physics:
                    lap = tv.d2[("x", "x")]
                    if colloc.dim == 2:
                        lap = lap + tv.d2[("y", "y")]
                    r = (mat.heat_capacity * (t_pred - prev) / dt
                         + (mat.gamma * mat.T_o) * rates
                         - mat.k * lap[:, 0, 0])
                    total = total + ad.amean(r * r)
                if loss_config.data:
                    d = t_pred - t_fe_s
                    total = total + loss_config.lambda_t * ad.amean(d * d)
                return total

            return ad.value_and_grad(fn, x)

        res = minimize(fg, p_cur, opt_config)
        statuses.append(res.status)
        if np.isfinite(res.f):
            p_cur = res.x
        params[s] = p_cur
        out = model._pinn_forward(p_cur, colloc.points, rates)
        prev_values = out.val[:, 0, 0] if isinstance(out, TaylorValue) else out[:, 0, 0]
        if tracer.fh:
            tracer.row(s, LossBreakdown(np.nan, np.nan, np.nan, res.f), res.grad_norm)
    tracer.close()
    model.params = params
    model.meta["per_step_status"] = statuses
    return model


# ---------------------------------------------------------------------------
# deployment
# ---------------------------------------------------------------------------


@dataclass
class ReplayStrainRate:
    """Strain-rate lookup from a stored training history.

    Rates are piecewise constant per training element; each query point gets
    the series of the element containing it (lowest element id on shared
    boundaries).
    """

    mesh: Mesh
    element_rates: np.ndarray  # (n_inc, n_elements)

    @classmethod
    def from_history(cls, history, mesh):
        return cls(mesh=mesh, element_rates=history.tr_eps_dot[:, :, 0].copy())

    def rates_at(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lo = self.mesh.nodes.min(axis=0)
        hi = self.mesh.nodes.max(axis=0)
        outside = np.any((points < lo - 1e-12) | (points > hi + 1e-12), axis=1)
        if np.any(outside):
            warnings.warn(
                f"{int(outside.sum())} query points lie outside the training domain "
                "bounding box; rates are extrapolated from the nearest elements"
            )
            points = np.clip(points, lo, hi)
        eids = find_elements(self.mesh, points)
        return self.element_rates[:, eids].T  # (P, n_inc)


def predict_nodal_theta(model, mesh, time_grid, strain_rate_source):
    """Temperature variation at every node for every increment.

    ``strain_rate_source`` must expose ``rates_at(points) -> (P, n_inc)``
    (a ReplayStrainRate does). Boundary values are exact through the lift.
    """
    rates = strain_rate_source.rates_at(mesh.nodes)
    return model.predict_theta(mesh.nodes, time_grid.times, rates).T  # (n_inc, n_nodes)


class _MechStepper:
    """Re-assembled mechanical solve per call, shared by both deployment modes."""

    def __init__(self, mesh, material, bcs, rule):
        self.mesh = mesh
        self.K_uu, self.C, _, _ = assemble_blocks(mesh, material, rule)
        self.f_u, _ = _boundary_loads(mesh, bcs)
        (self.u_idx, self.u_val), _ = _dirichlet(mesh, bcs)
        self.gamma = material.gamma
        self.grads = element_gradients(mesh)

    def step(self, theta_nodal):
        t0 = time.perf_counter()
        b = self.f_u + self.gamma * (self.C.T @ theta_nodal)
        A_c, b_c = _constrain(self.K_uu, b, self.u_idx, self.u_val)
        x = _factor_solve(A_c, b_c)
        x[self.u_idx] = self.u_val
        return x.reshape(self.mesh.n_nodes, self.mesh.dim), time.perf_counter() - t0


def run_ifenn(mesh, material, bcs, time_grid, model, strain_rate_source="replay",
              replay=None, rule=None):
    """Displacement-only marching with network temperatures (the integrated solve).

    Returns (SolutionHistory, info). ``step_seconds`` covers mechanical
    assembly+solve only; network inference time is reported separately in
    ``info`` so FE-vs-FE step costs stay comparable.
    """
    rule = rule or default_rule(mesh.dim)
    if strain_rate_source not in ("replay", "lagged"):
        raise ValueError("strain_rate_source must be 'replay' or 'lagged'")
    dim, n = mesh.dim, mesh.n_nodes
    times = time_grid.times
    dts = time_grid.dts
    n_inc = time_grid.n_increments
    stepper = _MechStepper(mesh, material, bcs, rule)
    qp_coords, qp_weights = quadrature_points(mesh, rule)
    disp = np.zeros((n_inc, n, dim))
    tr_rate = np.zeros((n_inc, mesh.n_elements, rule.n_points))
    secs = np.zeros(n_inc)
    infer_seconds = 0.0

    if strain_rate_source == "replay":
        if replay is None:
            raise ValueError("replay mode needs a ReplayStrainRate source")
        t0 = time.perf_counter()
        theta = predict_nodal_theta(model, mesh, time_grid, replay)
        infer_seconds = time.perf_counter() - t0
        tr_prev = np.zeros(mesh.n_elements)
        for s in range(n_inc):
            disp[s], secs[s] = stepper.step(theta[s])
            tr_now = np.einsum("ead,ead->e", stepper.grads, disp[s][mesh.elements])
            tr_rate[s] = ((tr_now - tr_prev) / dts[s])[:, None]
            tr_prev = tr_now
    else:
        theta = np.zeros((n_inc, n))
        node_rates = np.zeros((n, n_inc))
        elem_of_node = None
        tr_prev = np.zeros(mesh.n_elements)
        for s in range(n_inc):
            if s > 0:
                node_rates[:, s] = node_rates[:, s - 1]  # hold previous rate
            t0 = time.perf_counter()
            theta_all = model.predict_theta(mesh.nodes, times, node_rates)
            infer_seconds += time.perf_counter() - t0
            theta[s] = theta_all[:, s]
            disp[s], secs[s] = stepper.step(theta[s])
            tr_now = np.einsum("ead,ead->e", stepper.grads, disp[s][mesh.elements])
            tr_rate[s] = ((tr_now - tr_prev) / dts[s])[:, None]
            tr_prev = tr_now
            if elem_of_node is None:
                elem_of_node = find_elements(mesh, mesh.nodes)
            node_rates[:, s] = tr_rate[s, elem_of_node, 0]

    history = SolutionHistory(
        mesh=mesh,
        times=times.copy(),
        theta=theta,
        displacement=disp,
        tr_eps_dot=tr_rate,
        qp_coords=qp_coords,
        qp_weights=qp_weights,
        step_seconds=secs,
        n_system_dofs=dim * n,
    )
    info = {
        "strain_rate_source": strain_rate_source,
        "inference_seconds": infer_seconds,
        "mech_seconds_total": float(secs.sum()),
        "n_system_dofs": dim * n,
    }
    return history, info
