"""Network architectures for temperature prediction.

Two families share the machinery here:

* a temporal convolutional network (TCN) of residual blocks with dilated
  causal convolutions, weight normalization and a random-Fourier-feature
  (RFF) head, evaluated on whole step sequences at once;
* a plain tanh multilayer perceptron with RFF input preprocessing, trained
  one increment at a time.

Both produce a raw output that is wrapped by a Dirichlet lift T = A + B*T~
so prescribed-temperature boundaries are satisfied exactly, independent of
the parameters. All forward passes accept numpy arrays, tape variables and
TaylorValues interchangeably.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import TaylorValue, taylor_concat, taylor_linear

__all__ = [
    "RffConfig",
    "TcnConfig",
    "MlpConfig",
    "ParamLayout",
    "ParamVector",
    "SequenceBatch",
    "NormalizationRecord",
    "dilated_causal_conv",
    "receptive_field",
    "rff_map",
    "rff_matrix",
    "dirichlet_lift",
    "IntervalLift",
    "PlateBlendLift",
    "RadialLift",
    "lift_from_dict",
    "build_tcn_layout",
    "build_mlp_layout",
    "init_params",
    "tcn_residual_block",
    "tcn_apply",
    "mlp_apply",
    "build_sequence_batch",
    "sequence_taylor_inputs",
    "save_model_file",
    "load_model_file",
]

MODEL_FILE_VERSION = 1


@dataclass(frozen=True)
class RffConfig:
    """Random Fourier feature layer: 2*n_frequencies sinusoids of frozen
    Gaussian frequencies (std sigma), drawn once from the recorded seed."""

    n_frequencies: int = 64
    sigma: float = 0.07
    seed: int = 0

    def __post_init__(self):
        if self.n_frequencies < 1:
            raise ValueError("need at least one frequency")
        if not self.sigma > 0.0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class TcnConfig:
    """Residual TCN: one block per dilation entry, repeated n_stacks times.

    Each block runs two weight-normalized dilated causal convolutions
    (kernel ``kernel_size``, both at that block's dilation) with tanh and
    dropout, plus a skip connection (1x1 convolution when the channel count
    changes).
    """

    n_filters: int = 16
    kernel_size: int = 11
    dilations: tuple = (1, 2, 4, 8)
    n_stacks: int = 1
    dropout: float = 0.0

    def __post_init__(self):
        if self.n_filters < 1 or self.kernel_size < 1 or self.n_stacks < 1:
            raise ValueError("filters, kernel size and stacks must be positive")
        if any(d < 1 for d in self.dilations):
            raise ValueError("dilations must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")


@dataclass(frozen=True)
class MlpConfig:
    """Tanh MLP; ``widths`` are the hidden layer widths."""

    widths: tuple = (50, 50, 50, 50, 50)
    use_rff: bool = True

    def __post_init__(self):
        if not self.widths or any(w < 1 for w in self.widths):
            raise ValueError("hidden widths must be positive")


def receptive_field(config):
    """Steps of history that can influence one output step.

    r = 1 + 2*(kernel_size - 1) * n_stacks * sum(dilations); the factor 2 is
    the two convolutions per residual block.
    """
    return 1 + 2 * (config.kernel_size - 1) * config.n_stacks * int(sum(config.dilations))


def dilated_causal_conv(seq, filt, dilation=1):
    """Convenience wrapper around the tape primitive for plain sequences.

    1-D inputs are treated as a single-channel batch of one; the filter's
    first tap multiplies the current element.
    """
    seq = np.asarray(seq, dtype=float)
    filt = np.asarray(filt, dtype=float)
    if seq.ndim == 1 and filt.ndim == 1:
        out = ad.causal_conv(seq[None, :, None], filt[None, None, :], dilation)
        return out[0, :, 0]
    return ad.causal_conv(seq, filt, dilation)


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------


class ParamLayout:
    """Stable name -> (offset, shape) map over one flat parameter vector."""

    def __init__(self):
        self._entries = []  # (name, shape, start, stop, kind, meta)
        self._index = {}
        self.n_params = 0

    def add(self, name, shape, kind="weight", **meta):
        if name in self._index:
            raise ValueError(f"duplicate parameter name '{name}'")
        size = int(np.prod(shape))
        if size < 1:
            raise ValueError(f"parameter '{name}' has zero size")
        entry = (name, tuple(shape), self.n_params, self.n_params + size, kind, meta)
        self._index[name] = entry
        self._entries.append(entry)
        self.n_params += size

    def names(self):
        return [e[0] for e in self._entries]

    def shape(self, name):
        return self._index[name][1]

    def slice(self, backing, name):
        """View of one named parameter from a flat array or tape variable."""
        _, shape, start, stop, _, _ = self._index[name]
        return backing[start:stop].reshape(shape)

    def pack(self, arrays):
        flat = np.zeros(self.n_params)
        for name, shape, start, stop, _, _ in self._entries:
            flat[start:stop] = np.asarray(arrays[name], dtype=float).reshape(-1)
        return flat

    def unpack(self, flat):
        return {name: self.slice(np.asarray(flat, dtype=float), name) for name in self.names()}

    def entries(self):
        return list(self._entries)


@dataclass
class ParamVector:
    """Flat trainable values plus the layout that interprets them."""

    values: np.ndarray
    layout: ParamLayout

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.values.size != self.layout.n_params:
            raise ValueError("value count does not match layout")

    def get(self, name):
        return self.layout.slice(self.values, name)

    def copy(self):
        return ParamVector(self.values.copy(), self.layout)


def _tcn_channel_plan(cfg, in_features):
    chans = [in_features]
    for _ in range(cfg.n_stacks):
        for _ in cfg.dilations:
            chans.append(cfg.n_filters)
    return chans


def build_tcn_layout(cfg, in_features, rff_cfg):
    """Parameter layout of the TCN + RFF + linear-head pipeline.

    The dilated convolutions are stored weight-normalized: direction tensor
    ``v`` per layer plus one magnitude ``g`` per output filter. Skip 1x1
    convolutions and the dense head are plain weights.
    """
    lay = ParamLayout()
    k = cfg.kernel_size
    ci = in_features
    block = 0
    for _ in range(cfg.n_stacks):
        for _d in cfg.dilations:
            co = cfg.n_filters
            for j in (1, 2):
                cin = ci if j == 1 else co
                lay.add(f"block{block}.conv{j}.v", (co, cin, k), kind="wn_v", fan_in=cin * k, fan_out=co * k)
                lay.add(f"block{block}.conv{j}.g", (co,), kind="wn_g", ref=f"block{block}.conv{j}.v")
                lay.add(f"block{block}.conv{j}.b", (co,), kind="bias")
            if ci != co:
                lay.add(f"block{block}.skip.w", (co, ci, 1), kind="weight", fan_in=ci, fan_out=co)
                lay.add(f"block{block}.skip.b", (co,), kind="bias")
            ci = co
            block += 1
    m = rff_cfg.n_frequencies
    lay.add("head.w", (2 * m, 1), kind="weight", fan_in=2 * m, fan_out=1)
    lay.add("head.b", (1,), kind="bias")
    return lay


def build_mlp_layout(cfg, in_features, rff_cfg=None):
    lay = ParamLayout()
    width_in = 2 * rff_cfg.n_frequencies if (cfg.use_rff and rff_cfg) else in_features
    prev = width_in
    for i, w in enumerate(cfg.widths):
        lay.add(f"layer{i}.w", (prev, w), kind="weight", fan_in=prev, fan_out=w)
        lay.add(f"layer{i}.b", (w,), kind="bias")
        prev = w
    lay.add("out.w", (prev, 1), kind="weight", fan_in=prev, fan_out=1)
    lay.add("out.b", (1,), kind="bias")
    return lay


def init_params(layout, seed):
    """Deterministic glorot-uniform initialization.

    Weight-norm direction tensors are normalized per output filter after
    drawing, with the magnitude set to the pre-normalization filter norm so
    the effective weight is unchanged. Biases start at zero.
    """
    rng = np.random.default_rng(seed)
    arrays = {}
    for name, shape, _s, _e, kind, meta in layout.entries():
        if kind == "bias":
            arrays[name] = np.zeros(shape)
        elif kind == "wn_g":
            continue  # filled from its direction tensor below
        else:
            bound = np.sqrt(6.0 / (meta["fan_in"] + meta["fan_out"]))
            arrays[name] = rng.uniform(-bound, bound, size=shape)
    for name, shape, _s, _e, kind, meta in layout.entries():
        if kind != "wn_g":
            continue
        v = arrays[meta["ref"]]
        norms = np.sqrt((v**2).sum(axis=tuple(range(1, v.ndim))))
        arrays[meta["ref"]] = v / norms.reshape((-1,) + (1,) * (v.ndim - 1))
        arrays[name] = norms
    return ParamVector(layout.pack(arrays), layout)


def _wn_weight(v, g):
    """Effective weight g * v / (||v||_filter + 1e-12); axis 0 indexes filters."""
    nd = len(v.shape)
    sq = ad.asum(v * v, axis=tuple(range(1, nd)), keepdims=True)
    norm = ad.sqrt(sq) + 1e-12
    gq = g.reshape((-1,) + (1,) * (nd - 1))
    return v * (gq / norm)


# ---------------------------------------------------------------------------
# forward passes
# ---------------------------------------------------------------------------


def _as_tv(x):
    return x if isinstance(x, TaylorValue) else TaylorValue(x)


def tcn_residual_block(x, p, layout, block, dilation, cfg, dropout_masks=None):
    """One residual block on a (points, steps, channels) TaylorValue.

    Main path: [weight-normed dilated conv -> tanh -> dropout] twice; skip is
    the identity, or a 1x1 convolution when channel counts differ.
    """
    x = _as_tv(x)
    h = x
    for j in (1, 2):
        v = layout.slice(p, f"block{block}.conv{j}.v")
        g = layout.slice(p, f"block{block}.conv{j}.g")
        b = layout.slice(p, f"block{block}.conv{j}.b")
        w = _wn_weight(v, g)
        h = taylor_linear(h, lambda s, w=w: ad.causal_conv(s, w, dilation), bias=b)
        h = np.tanh(h)
        if dropout_masks is not None:
            h = h * dropout_masks[(block, j)]
    skip_name = f"block{block}.skip.w"
    if skip_name in layout.names():
        sw = layout.slice(p, skip_name)
        sb = layout.slice(p, f"block{block}.skip.b")
        s = taylor_linear(x, lambda z: ad.causal_conv(z, sw, 1), bias=sb)
    else:
        s = x
    return h + s


def _rff_taylor(x, h_matrix):
    """RFF on a TaylorValue: [cos(2π x hᵀ), sin(2π x hᵀ)]."""
    proj = taylor_linear(x, lambda s: ad.matmul(s, (2.0 * np.pi) * h_matrix.T))
    return taylor_concat([np.cos(proj), np.sin(proj)], axis=-1)


def rff_matrix(rff_cfg, in_features):
    """Frozen frequency matrix h of shape (n_frequencies, in_features)."""
    rng = np.random.default_rng(rff_cfg.seed)
    return rng.normal(0.0, rff_cfg.sigma, size=(rff_cfg.n_frequencies, in_features))


def rff_map(x, h_matrix):
    """Plain-array Fourier features with unit amplitudes, width 2m."""
    if isinstance(x, TaylorValue):
        return _rff_taylor(x, h_matrix)
    proj = ad.matmul(x, (2.0 * np.pi) * h_matrix.T)
    return ad.concat([np.cos(proj), np.sin(proj)], axis=-1)


def tcn_apply(p, layout, cfg, rff_h, x, dropout_masks=None):
    """Full TCN pipeline: residual blocks -> RFF -> linear head.

    ``x`` is (points, steps, features) as array, Var or TaylorValue; output
    has a single trailing channel.
    """
    h = _as_tv(x)
    block = 0
    for _ in range(cfg.n_stacks):
        for d in cfg.dilations:
            h = tcn_residual_block(h, p, layout, block, d, cfg, dropout_masks)
            block += 1
    h = rff_map(h, rff_h)
    w = layout.slice(p, "head.w")
    b = layout.slice(p, "head.b")
    return taylor_linear(h, lambda s: ad.matmul(s, w), bias=b)


def mlp_apply(p, layout, cfg, rff_h, x):
    """RFF (optional) -> tanh layers -> linear output on (..., features)."""
    h = _as_tv(x)
    if cfg.use_rff:
        if rff_h is None:
            raise ValueError("config requests RFF preprocessing but no frequency matrix given")
        h = rff_map(h, rff_h)
    for i in range(len(cfg.widths)):
        w = layout.slice(p, f"layer{i}.w")
        b = layout.slice(p, f"layer{i}.b")
        h = taylor_linear(h, lambda s, w=w: ad.matmul(s, w), bias=b)
        h = np.tanh(h)
    w = layout.slice(p, "out.w")
    b = layout.slice(p, "out.b")
    return taylor_linear(h, lambda s: ad.matmul(s, w), bias=b)


def make_dropout_masks(cfg, n_points, n_steps, seed):
    """Fixed inverted-dropout masks, one per convolution, frozen for a run."""
    if cfg.dropout <= 0.0:
        return None
    rng = np.random.default_rng(seed)
    masks = {}
    n_blocks = cfg.n_stacks * len(cfg.dilations)
    for b in range(n_blocks):
        for j in (1, 2):
            keep = rng.random((n_points, n_steps, cfg.n_filters)) >= cfg.dropout
            masks[(b, j)] = keep / (1.0 - cfg.dropout)
    return masks


# ---------------------------------------------------------------------------
# Dirichlet lifting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalLift:
    """1-D lift on [0, length]: A matches the end temperatures, B = x(L-x)/L."""

    theta_left: float
    theta_right: float
    length: float = 1.0

    kind = "interval"

    def values(self, pts):
        x = np.asarray(pts)[:, 0]
        A = self.theta_left + (self.theta_right - self.theta_left) * x / self.length
        B = x * (self.length - x) / self.length
        return A, B

    def taylor(self, pts):
        x = np.asarray(pts)[:, 0]
        n = len(x)
        sh = (n, 1, 1)
        A, B = self.values(pts)
        dA = np.full(sh, (self.theta_right - self.theta_left) / self.length)
        A_tv = TaylorValue(A.reshape(sh), d1={"x": dA}, d2={("x", "x"): np.zeros(sh)})
        dB = ((self.length - 2.0 * x) / self.length).reshape(sh)
        B_tv = TaylorValue(
            B.reshape(sh), d1={"x": dB}, d2={("x", "x"): np.full(sh, -2.0 / self.length)}
        )
        return A_tv, B_tv

    def to_dict(self):
        return {
            "kind": self.kind,
            "theta_left": self.theta_left,
            "theta_right": self.theta_right,
            "length": self.length,
        }


@dataclass(frozen=True)
class PlateBlendLift:
    """2-D lift linear in y: A blends bottom/top temperatures, B = y(H-y)/H."""

    theta_bottom: float
    theta_top: float
    height: float = 1.0

    kind = "plate_blend"

    def values(self, pts):
        y = np.asarray(pts)[:, 1]
        A = self.theta_bottom + (self.theta_top - self.theta_bottom) * y / self.height
        B = y * (self.height - y) / self.height
        return A, B

    def taylor(self, pts):
        y = np.asarray(pts)[:, 1]
        n = len(y)
        sh = (n, 1, 1)
        A, B = self.values(pts)
        zero = np.zeros(sh)
        dA = np.full(sh, (self.theta_top - self.theta_bottom) / self.height)
        A_tv = TaylorValue(
            A.reshape(sh),
            d1={"x": zero, "y": dA},
            d2={("x", "x"): zero, ("y", "y"): zero},
        )
        dB = ((self.height - 2.0 * y) / self.height).reshape(sh)
        B_tv = TaylorValue(
            B.reshape(sh),
            d1={"x": zero, "y": dB},
            d2={("x", "x"): zero, ("y", "y"): np.full(sh, -2.0 / self.height)},
        )
        return A_tv, B_tv

    def to_dict(self):
        return {
            "kind": self.kind,
            "theta_bottom": self.theta_bottom,
            "theta_top": self.theta_top,
            "height": self.height,
        }


@dataclass(frozen=True)
class RadialLift:
    """Lift for a prescribed temperature on a circular arc of given radius
    centered at the origin: A is constant, B = sqrt(x²+y²) - R."""

    theta_edge: float
    radius: float

    kind = "radial"

    def values(self, pts):
        pts = np.asarray(pts)
        r = np.sqrt(pts[:, 0] ** 2 + pts[:, 1] ** 2)
        return np.full(len(pts), self.theta_edge), r - self.radius

    def taylor(self, pts):
        pts = np.asarray(pts)
        x, y = pts[:, 0], pts[:, 1]
        r = np.sqrt(x**2 + y**2)
        n = len(x)
        sh = (n, 1, 1)
        zero = np.zeros(sh)
        A_tv = TaylorValue(
            np.full(sh, self.theta_edge),
            d1={"x": zero, "y": zero},
            d2={("x", "x"): zero, ("y", "y"): zero},
        )
        B_tv = TaylorValue(
            (r - self.radius).reshape(sh),
            d1={"x": (x / r).reshape(sh), "y": (y / r).reshape(sh)},
            d2={
                ("x", "x"): (y**2 / r**3).reshape(sh),
                ("y", "y"): (x**2 / r**3).reshape(sh),
            },
        )
        return A_tv, B_tv

    def to_dict(self):
        return {"kind": self.kind, "theta_edge": self.theta_edge, "radius": self.radius}


_LIFTS = {"interval": IntervalLift, "plate_blend": PlateBlendLift, "radial": RadialLift}


def lift_from_dict(d):
    d = dict(d)
    kind = d.pop("kind")
    if kind not in _LIFTS:
        raise ValueError(f"unknown lift kind '{kind}'; known: {sorted(_LIFTS)}")
    return _LIFTS[kind](**d)


def dirichlet_lift(raw, lift, pts):
    """T = A + B * T~ with A, B evaluated at the points of ``raw``.

    ``raw`` may be a plain (points, steps, 1) array or a TaylorValue; the
    lift coefficients carry their own spatial derivatives so the composite
    keeps exact input derivatives.
    """
    if isinstance(raw, TaylorValue):
        A_tv, B_tv = lift.taylor(pts)
        return A_tv + B_tv * raw
    A, B = lift.values(pts)
    extra = raw.ndim - 1
    shape = (-1,) + (1,) * extra
    return A.reshape(shape) + B.reshape(shape) * raw


# ---------------------------------------------------------------------------
# sequence batches and input seeding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalizationRecord:
    """Input scaling frozen at training time.

    Time enters as log10(t) min-max scaled to [0, 1]; coordinates pass raw;
    the strain-rate channel is divided by its max absolute training value.
    """

    t_log_min: float
    t_log_max: float
    eps_scale: float

    def t_feature(self, times):
        span = self.t_log_max - self.t_log_min
        if span == 0.0:
            span = 1.0
        return (np.log10(np.asarray(times, dtype=float)) - self.t_log_min) / span

    def dt_feature_dt(self, times):
        # d/dt of the scaled log time: 1 / (t ln10 (hi - lo))
        span = self.t_log_max - self.t_log_min
        if span == 0.0:
            span = 1.0
        return 1.0 / (np.asarray(times, dtype=float) * np.log(10.0) * span)

    def to_dict(self):
        return {
            "t_log_min": self.t_log_min,
            "t_log_max": self.t_log_max,
            "eps_scale": self.eps_scale,
        }


@dataclass
class SequenceBatch:
    """(points, steps, features) input tensor plus its provenance.

    Feature order: scaled time, x, [y,] scaled strain-rate trace. The time
    channel is identical across points and the coordinate channels constant
    along steps.
    """

    features: np.ndarray
    feature_names: tuple
    points: np.ndarray
    times: np.ndarray
    norm: NormalizationRecord

    @property
    def n_points(self):
        return self.features.shape[0]

    @property
    def n_steps(self):
        return self.features.shape[1]


def fit_normalization(times, tr_eps_dot):
    tl = np.log10(np.asarray(times, dtype=float))
    scale = float(np.max(np.abs(tr_eps_dot))) if np.size(tr_eps_dot) else 0.0
    if scale == 0.0:
        scale = 1.0
    return NormalizationRecord(float(tl.min()), float(tl.max()), scale)


def build_sequence_batch(points, times, tr_eps_dot, norm=None, dim=None):
    """Assemble the network input tensor from per-point series.

    points (P, dim); times (T,); tr_eps_dot (P, T). ``norm`` defaults to
    statistics fit on this data.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    times = np.asarray(times, dtype=float)
    tr = np.asarray(tr_eps_dot, dtype=float)
    dim = dim if dim is not None else points.shape[1]
    if norm is None:
        norm = fit_normalization(times, tr)
    P, T = len(points), len(times)
    names = ("t", "x", "y", "eps_rate") if dim == 2 else ("t", "x", "eps_rate")
    F = len(names)
    feats = np.empty((P, T, F))
    feats[:, :, 0] = norm.t_feature(times)[None, :]
    for d in range(dim):
        feats[:, :, 1 + d] = points[:, d][:, None]
    feats[:, :, -1] = tr / norm.eps_scale
    return SequenceBatch(feats, names, points.copy(), times.copy(), norm)


def sequence_taylor_inputs(batch, directions=("t", "x"), second=(("x", "x"),)):
    """Seed a SequenceBatch as a TaylorValue with the chain factors baked in.

    Returns a TaylorValue of the full feature tensor whose coefficients are
    constant arrays (no tape), so everything up to the first parameterized
    layer stays tape-free.
    """
    feats = batch.features
    P, T, F = feats.shape
    names = batch.feature_names
    pairs = [tuple(sorted(p)) for p in second]
    d1 = {}
    for dname in directions:
        c = np.zeros((P, T, F))
        if dname == "t":
            c[:, :, 0] = batch.norm.dt_feature_dt(batch.times)[None, :]
        else:
            c[:, :, names.index(dname)] = 1.0
        d1[dname] = c
    d2 = {p: np.zeros((P, T, F)) for p in pairs}
    return TaylorValue(feats.copy(), d1, d2)


# ---------------------------------------------------------------------------
# model file
# ---------------------------------------------------------------------------


def _enc(a):
    a = np.ascontiguousarray(np.asarray(a, dtype=np.float64))
    return {"shape": list(a.shape), "data": base64.b64encode(a.tobytes()).decode("ascii")}


def _dec(d):
    a = np.frombuffer(base64.b64decode(d["data"]), dtype=np.float64)
    return a.reshape(d["shape"]).copy()


def save_model_file(path, *, kind, params, rff_h, norm, lift, feature_names, seeds,
                    tcn_config=None, mlp_config=None, rff_config=None, meta=None):
    """Write a self-describing JSON model container (exact float64 arrays)."""
    doc = {
        "version": MODEL_FILE_VERSION,
        "kind": kind,
        "feature_names": list(feature_names),
        "seeds": dict(seeds),
        "normalization": norm.to_dict(),
        "lift": lift.to_dict(),
        "rff_matrix": _enc(rff_h) if rff_h is not None else None,
        "params": _enc(params),
        "meta": dict(meta or {}),
    }
    if tcn_config is not None:
        doc["tcn_config"] = {
            "n_filters": tcn_config.n_filters,
            "kernel_size": tcn_config.kernel_size,
            "dilations": list(tcn_config.dilations),
            "n_stacks": tcn_config.n_stacks,
            "dropout": tcn_config.dropout,
        }
    if mlp_config is not None:
        doc["mlp_config"] = {"widths": list(mlp_config.widths), "use_rff": mlp_config.use_rff}
    if rff_config is not None:
        doc["rff_config"] = {
            "n_frequencies": rff_config.n_frequencies,
            "sigma": rff_config.sigma,
            "seed": rff_config.seed,
        }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model_file(path):
    """Read a model container; returns a plain dict with arrays decoded."""
    with open(path) as fh:
        doc = json.load(fh)
    if "version" not in doc:
        raise ValueError("not a model file: missing version field")
    if doc["version"] != MODEL_FILE_VERSION:
        raise ValueError(f"unsupported model file version {doc['version']}")
    out = dict(doc)
    out["params"] = _dec(doc["params"])
    out["rff_matrix"] = _dec(doc["rff_matrix"]) if doc["rff_matrix"] is not None else None
    out["normalization"] = NormalizationRecord(**doc["normalization"])
    out["lift"] = lift_from_dict(doc["lift"])
    if "tcn_config" in doc:
        c = doc["tcn_config"]
        out["tcn_config"] = TcnConfig(
            n_filters=c["n_filters"],
            kernel_size=c["kernel_size"],
            dilations=tuple(c["dilations"]),
            n_stacks=c["n_stacks"],
            dropout=c["dropout"],
        )
    if "mlp_config" in doc:
        out["mlp_config"] = MlpConfig(
            widths=tuple(doc["mlp_config"]["widths"]), use_rff=doc["mlp_config"]["use_rff"]
        )
    if "rff_config" in doc:
        out["rff_config"] = RffConfig(**doc["rff_config"])
    return out
