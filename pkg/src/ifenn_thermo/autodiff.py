"""Differentiation engine for the physics-informed networks.

Two cooperating pieces:

* ``Var`` -- a reverse-mode tape over numpy arrays. Produces exact gradients
  of a scalar loss with respect to every entry of a flat parameter vector.
* ``TaylorValue`` -- truncated Taylor coefficients propagated forward through
  the same operations. Carries the value plus first derivatives along named
  input directions (time, spatial coordinates) and second derivatives for
  selected direction pairs, which is what a heat-equation residual needs.

The two compose: Taylor coefficients may themselves be tape variables, so a
loss assembled from network input-derivatives stays differentiable with
respect to the parameters.

Supported primitives: +, -, *, /, integer/real powers with constant exponent,
tanh, cos, sin, sqrt, sum/mean reductions, matrix products against a 2-D
weight, dilated causal convolution, concatenation, reshape and basic slicing.
Anything else raises ``NotImplementedError`` naming the offending primitive.

Everything is float64; gradient checks against central finite differences at
1e-5 relative tolerance rely on that.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tape",
    "Var",
    "TaylorValue",
    "grad",
    "value_and_grad",
    "eval_with_input_derivs",
    "causal_conv",
    "matmul",
    "concat",
    "tanh",
    "cos",
    "sin",
    "sqrt",
    "asum",
    "amean",
    "taylor_linear",
    "taylor_concat",
]

# Transposed-gather matmul in the convolution is only worth its transient
# buffer below this element count; above it we fall back to per-tap products.
_CONV_GATHER_LIMIT = 40_000_000


def _data(x):
    if isinstance(x, Var):
        return x.data
    if isinstance(x, TaylorValue):
        raise TypeError(
            "TaylorValue passed where an array or Var is expected; "
            "use taylor_linear/taylor_concat for linear maps"
        )
    return np.asarray(x, dtype=np.float64)


def _any_taylor(*xs):
    return any(isinstance(x, TaylorValue) for x in xs)


def _tape_of(*xs):
    tape = None
    for x in xs:
        if isinstance(x, Var):
            if tape is None:
                tape = x.tape
            elif tape is not x.tape:
                raise ValueError("cannot combine variables from different tapes")
    return tape


def _unbroadcast(g, shape):
    """Reduce an adjoint back to the shape of the operand that broadcast."""
    if g.shape == tuple(shape):
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


class Tape:
    """Records operations on its variables in creation order."""

    def __init__(self):
        self._nodes = []

    def leaf(self, data):
        return Var(np.array(data, dtype=np.float64), self)

    def backward(self, out):
        """Accumulate ``v.grad`` for every variable ``out`` depends on.

        ``out`` must hold a single scalar.
        """
        if not isinstance(out, Var) or out.tape is not self:
            raise ValueError("output is not a variable of this tape")
        if _data(out).size != 1:
            raise ValueError("backward pass requires a scalar output")
        for v in self._nodes:
            v.grad = None
        out.grad = np.ones_like(out.data)
        for v in reversed(self._nodes[: out._idx + 1]):
            if v.grad is None or v._vjp is None:
                continue
            for parent, adj in zip(v._parents, v._vjp(v.grad)):
                if adj is None:
                    continue
                parent.grad = adj if parent.grad is None else parent.grad + adj


class Var:
    """Array value recorded on a tape."""

    __slots__ = ("data", "tape", "grad", "_parents", "_vjp", "_idx")

    def __init__(self, data, tape, parents=(), vjp=None):
        self.data = np.asarray(data, dtype=np.float64)
        self.tape = tape
        self.grad = None
        self._parents = parents
        self._vjp = vjp
        self._idx = len(tape._nodes)
        tape._nodes.append(self)

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self):
        return self.data.item()

    def __repr__(self):
        return f"Var(shape={self.data.shape})"

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, p):
        return power(self, p)

    def __matmul__(self, other):
        return matmul(self, other)

    def __getitem__(self, key):
        out = self.data[key]

        def adj(g, key=key):
            buf = np.zeros_like(self.data)
            buf[key] = g
            return buf

        return _node(out, self.tape, [(self, adj)])

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = self.data.reshape(shape)
        return _node(out, self.tape, [(self, lambda g: g.reshape(self.data.shape))])

    def sum(self, axis=None, keepdims=False):
        return asum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        return amean(self, axis=axis, keepdims=keepdims)

    def __array_ufunc__(self, ufunc, method, *args, **kwargs):
        if method == "__call__" and not kwargs and ufunc in _UFUNC_DISPATCH:
            return _UFUNC_DISPATCH[ufunc](*args)
        name = getattr(ufunc, "__name__", str(ufunc))
        raise NotImplementedError(f"unsupported primitive on tape variables: {name}")


def _node(data, tape, pairs):
    parents = tuple(p for p, _ in pairs)
    fns = tuple(f for _, f in pairs)

    def vjp(g):
        return tuple(f(g) for f in fns)

    return Var(data, tape, parents, vjp)


def add(a, b):
    if _any_taylor(a, b):
        return _taylor_add(_as_taylor(a), _as_taylor(b), 1.0)
    tape = _tape_of(a, b)
    av, bv = _data(a), _data(b)
    out = av + bv
    if tape is None:
        return out
    pairs = []
    if isinstance(a, Var):
        pairs.append((a, lambda g: _unbroadcast(g, av.shape)))
    if isinstance(b, Var):
        pairs.append((b, lambda g: _unbroadcast(g, bv.shape)))
    return _node(out, tape, pairs)


def sub(a, b):
    if _any_taylor(a, b):
        return _taylor_add(_as_taylor(a), _as_taylor(b), -1.0)
    tape = _tape_of(a, b)
    av, bv = _data(a), _data(b)
    out = av - bv
    if tape is None:
        return out
    pairs = []
    if isinstance(a, Var):
        pairs.append((a, lambda g: _unbroadcast(g, av.shape)))
    if isinstance(b, Var):
        pairs.append((b, lambda g: _unbroadcast(-g, bv.shape)))
    return _node(out, tape, pairs)


def neg(a):
    if isinstance(a, TaylorValue):
        return -a
    if not isinstance(a, Var):
        return -_data(a)
    return _node(-a.data, a.tape, [(a, lambda g: -g)])


def mul(a, b):
    if _any_taylor(a, b):
        return _taylor_mul(_as_taylor(a), _as_taylor(b))
    tape = _tape_of(a, b)
    av, bv = _data(a), _data(b)
    out = av * bv
    if tape is None:
        return out
    pairs = []
    if isinstance(a, Var):
        pairs.append((a, lambda g: _unbroadcast(g * bv, av.shape)))
    if isinstance(b, Var):
        pairs.append((b, lambda g: _unbroadcast(g * av, bv.shape)))
    return _node(out, tape, pairs)


def div(a, b):
    if _any_taylor(a, b):
        return _as_taylor(a) / b
    tape = _tape_of(a, b)
    av, bv = _data(a), _data(b)
    out = av / bv
    if tape is None:
        return out
    pairs = []
    if isinstance(a, Var):
        pairs.append((a, lambda g: _unbroadcast(g / bv, av.shape)))
    if isinstance(b, Var):
        pairs.append((b, lambda g: _unbroadcast(-g * av / (bv * bv), bv.shape)))
    return _node(out, tape, pairs)


def power(a, p):
    """Elementwise power with a constant real exponent."""
    if isinstance(p, (Var, TaylorValue)):
        raise NotImplementedError("unsupported primitive: power with non-constant exponent")
    p = float(p)
    if isinstance(a, TaylorValue):
        return _taylor_power(a, p)
    if not isinstance(a, Var):
        return _data(a) ** p
    out = a.data**p
    return _node(out, a.tape, [(a, lambda g: g * p * a.data ** (p - 1.0))])


def tanh(a):
    if isinstance(a, TaylorValue):
        return _taylor_chain(a, np.tanh, lambda y, u: 1.0 - y * y, lambda y, u: -2.0 * y * (1.0 - y * y))
    if not isinstance(a, Var):
        return np.tanh(_data(a))
    out = np.tanh(a.data)
    return _node(out, a.tape, [(a, lambda g: g * (1.0 - out * out))])


def cos(a):
    if isinstance(a, TaylorValue):
        return _taylor_chain(a, np.cos, lambda y, u: -np.sin(u), lambda y, u: -y)
    if not isinstance(a, Var):
        return np.cos(_data(a))
    out = np.cos(a.data)
    return _node(out, a.tape, [(a, lambda g: -g * np.sin(a.data))])


def sin(a):
    if isinstance(a, TaylorValue):
        return _taylor_chain(a, np.sin, lambda y, u: np.cos(u), lambda y, u: -y)
    if not isinstance(a, Var):
        return np.sin(_data(a))
    out = np.sin(a.data)
    return _node(out, a.tape, [(a, lambda g: g * np.cos(a.data))])


def sqrt(a):
    if isinstance(a, TaylorValue):
        return _taylor_power(a, 0.5)
    if not isinstance(a, Var):
        return np.sqrt(_data(a))
    out = np.sqrt(a.data)
    return _node(out, a.tape, [(a, lambda g: g * 0.5 / out)])


def asum(a, axis=None, keepdims=False):
    """Sum reduction over an axis (or all axes)."""
    if not isinstance(a, Var):
        return _data(a).sum(axis=axis, keepdims=keepdims)
    out = a.data.sum(axis=axis, keepdims=keepdims)
    shape = a.data.shape

    def adj(g):
        if axis is None:
            return np.broadcast_to(g, shape).copy()
        axes = axis if isinstance(axis, tuple) else (axis,)
        gk = g if keepdims else np.expand_dims(g, [ax % len(shape) for ax in axes])
        return np.broadcast_to(gk, shape).copy()

    return _node(out, a.tape, [(a, adj)])


def amean(a, axis=None, keepdims=False):
    av = _data(a)
    if axis is None:
        count = av.size
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = 1
        for ax in axes:
            count *= av.shape[ax]
    return asum(a, axis=axis, keepdims=keepdims) / float(count)


def matmul(a, w):
    """Matrix product of ``a`` (..., m) against a 2-D weight ``w`` (m, n)."""
    tape = _tape_of(a, w)
    av, wv = _data(a), _data(w)
    if wv.ndim != 2:
        raise NotImplementedError("unsupported primitive: matmul with non-2D right operand")
    out = av @ wv
    if tape is None:
        return out
    m, n = wv.shape
    pairs = []
    if isinstance(a, Var):
        pairs.append((a, lambda g: g @ wv.T))
    if isinstance(w, Var):
        pairs.append((w, lambda g: av.reshape(-1, m).T @ g.reshape(-1, n)))
    return _node(out, tape, pairs)


def concat(parts, axis=0):
    tape = _tape_of(*parts)
    datas = [_data(p) for p in parts]
    out = np.concatenate(datas, axis=axis)
    if tape is None:
        return out
    pairs = []
    offset = 0
    for p, d in zip(parts, datas):
        n = d.shape[axis]
        if isinstance(p, Var):
            sl = [slice(None)] * out.ndim
            sl[axis] = slice(offset, offset + n)

            def adj(g, sl=tuple(sl)):
                return g[sl]

            pairs.append((p, adj))
        offset += n
    return _node(out, tape, pairs)


def _conv_shapes(xv, wv, dilation):
    if xv.ndim != 3 or wv.ndim != 3:
        raise ValueError("causal_conv expects input (batch, steps, ch_in) and weight (ch_out, ch_in, width)")
    if xv.shape[2] != wv.shape[1]:
        raise ValueError(f"channel mismatch: input has {xv.shape[2]}, weight expects {wv.shape[1]}")
    if dilation < 1:
        raise ValueError("dilation must be >= 1")
    return xv.shape, wv.shape


def _conv_value(xv, wv, d):
    (B, T, Ci), (Co, _, k) = _conv_shapes(xv, wv, d)
    if B * T * k * Ci <= _CONV_GATHER_LIMIT:
        pad = d * (k - 1)
        xp = np.zeros((B, T + pad, Ci))
        xp[:, pad:, :] = xv
        s0, s1, s2 = xp.strides
        base = xp[:, pad:, :]
        gathered = np.lib.stride_tricks.as_strided(
            base, shape=(B, T, k, Ci), strides=(s0, s1, -d * s1, s2)
        )
        out = gathered.reshape(B * T, k * Ci) @ wv.transpose(2, 1, 0).reshape(k * Ci, Co)
        return out.reshape(B, T, Co)
    out = np.zeros((B, T, Co))
    for i in range(k):
        wi = wv[:, :, i].T
        if d * i == 0:
            out += xv @ wi
        else:
            out[:, d * i :, :] += xv[:, : T - d * i, :] @ wi
    return out


def _conv_grad_x(g, wv, d, T):
    # dX[b,s,c] = sum_{i,o} g[b, s + d*i, o] w[o,c,i]
    B, _, Co = g.shape
    Ci, k = wv.shape[1], wv.shape[2]
    dx = np.zeros((B, T, Ci))
    for i in range(k):
        wi = wv[:, :, i]
        if d * i == 0:
            dx += g @ wi
        else:
            dx[:, : T - d * i, :] += g[:, d * i :, :] @ wi
    return dx


def _conv_grad_w(g, xv, d, wshape):
    Co, Ci, k = wshape
    B, T, _ = xv.shape
    dw = np.zeros(wshape)
    for i in range(k):
        if d * i >= T:
            continue
        if d * i == 0:
            gs, xs = g, xv
        else:
            gs, xs = g[:, d * i :, :], xv[:, : T - d * i, :]
        dw[:, :, i] = gs.reshape(-1, Co).T @ xs.reshape(-1, Ci)
    return dw


def causal_conv(x, w, dilation=1):
    """Dilated causal convolution along the step axis.

    out[b, t, o] = sum_{i, c} w[o, c, i] * x[b, t - dilation*i, c]

    with x treated as zero before the first step, so each output depends on
    the current and earlier steps only. Tap 0 multiplies the current step.
    """
    tape = _tape_of(x, w)
    xv, wv = _data(x), _data(w)
    (B, T, Ci), wshape = _conv_shapes(xv, wv, dilation)
    out = _conv_value(xv, wv, dilation)
    if tape is None:
        return out
    pairs = []
    if isinstance(x, Var):
        pairs.append((x, lambda g: _conv_grad_x(g, wv, dilation, T)))
    if isinstance(w, Var):
        pairs.append((w, lambda g: _conv_grad_w(g, xv, dilation, wshape)))
    return _node(out, tape, pairs)


_UFUNC_DISPATCH = {
    np.add: add,
    np.subtract: sub,
    np.multiply: mul,
    np.true_divide: div,
    np.negative: neg,
    np.positive: lambda a: a,
    np.tanh: tanh,
    np.cos: cos,
    np.sin: sin,
    np.sqrt: sqrt,
    np.power: power,
    np.square: lambda a: power(a, 2.0),
}


def value_and_grad(fn, x0):
    """Evaluate ``fn`` on a fresh tape leaf holding ``x0`` and differentiate.

    Parameters
    ----------
    fn : callable
        Maps a single Var (same shape as ``x0``) to a scalar Var.
    x0 : ndarray
        Point at which to evaluate.

    Returns
    -------
    (float, ndarray)
        Loss value and gradient with the shape of ``x0``.
    """
    tape = Tape()
    leaf = tape.leaf(np.asarray(x0, dtype=np.float64))
    out = fn(leaf)
    if not isinstance(out, Var):
        raise TypeError("objective did not produce a tape variable; it ignores the parameters")
    tape.backward(out)
    g = leaf.grad if leaf.grad is not None else np.zeros_like(leaf.data)
    return float(_data(out)), g


def grad(fn, x0):
    return value_and_grad(fn, x0)[1]


# ---------------------------------------------------------------------------
# Forward truncated-Taylor propagation
# ---------------------------------------------------------------------------


def _pair(a, b):
    return (a, b) if a <= b else (b, a)


class TaylorValue:
    """Value plus first/second derivative coefficients along named directions.

    ``d1`` maps a direction name to the first derivative of this quantity
    along it; ``d2`` maps an ordered name pair to the second derivative.
    Coefficients are true derivatives (not factorial-scaled Taylor terms) and
    may be numpy arrays or tape variables. Directions absent from a dict are
    implicitly zero. The set of tracked second-order pairs is fixed by the
    seeds: operations propagate the union of their operands' pairs.
    """

    __slots__ = ("val", "d1", "d2")

    def __init__(self, val, d1=None, d2=None):
        self.val = val
        self.d1 = dict(d1 or {})
        self.d2 = {_pair(*k): v for k, v in (d2 or {}).items()}

    @property
    def shape(self):
        return _data(self.val).shape

    def __repr__(self):
        return f"TaylorValue(shape={self.shape}, d1={sorted(self.d1)}, d2={sorted(self.d2)})"

    def __add__(self, other):
        return _taylor_add(self, _as_taylor(other), 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return _taylor_add(self, _as_taylor(other), -1.0)

    def __rsub__(self, other):
        return _taylor_add(_as_taylor(other), self, -1.0)

    def __mul__(self, other):
        return _taylor_mul(self, _as_taylor(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _as_taylor(other)
        if not o.d1 and not o.d2:
            return _taylor_scale(self, o.val, invert=True)
        return _taylor_mul(self, _taylor_power(o, -1.0))

    def __rtruediv__(self, other):
        return _as_taylor(other) / self

    def __neg__(self):
        return TaylorValue(
            -self.val, {k: -v for k, v in self.d1.items()}, {k: -v for k, v in self.d2.items()}
        )

    def __pow__(self, p):
        return _taylor_power(self, p)

    def __array_ufunc__(self, ufunc, method, *args, **kwargs):
        if method == "__call__" and not kwargs and ufunc in _UFUNC_DISPATCH:
            return _UFUNC_DISPATCH[ufunc](*args)
        name = getattr(ufunc, "__name__", str(ufunc))
        raise NotImplementedError(f"unsupported primitive on Taylor values: {name}")


def _as_taylor(x):
    if isinstance(x, TaylorValue):
        return x
    return TaylorValue(x)


def _taylor_add(u, v, sign):
    val = u.val + sign * v.val if sign > 0 else u.val - v.val
    d1 = dict(u.d1)
    for k, c in v.d1.items():
        d1[k] = d1[k] + sign * c if k in d1 else sign * c
    d2 = dict(u.d2)
    for k, c in v.d2.items():
        d2[k] = d2[k] + sign * c if k in d2 else sign * c
    return TaylorValue(val, d1, d2)


def _taylor_mul(u, v):
    val = u.val * v.val
    d1 = {}
    for k in set(u.d1) | set(v.d1):
        term = None
        if k in u.d1:
            term = u.d1[k] * v.val
        if k in v.d1:
            t2 = u.val * v.d1[k]
            term = t2 if term is None else term + t2
        d1[k] = term
    d2 = {}
    for k in set(u.d2) | set(v.d2):
        a, b = k
        term = None
        if k in u.d2:
            term = u.d2[k] * v.val
        if k in v.d2:
            t = u.val * v.d2[k]
            term = t if term is None else term + t
        if a in u.d1 and b in v.d1:
            t = u.d1[a] * v.d1[b]
            term = t if term is None else term + t
        if b in u.d1 and a in v.d1:
            t = u.d1[b] * v.d1[a]
            term = t if term is None else term + t
        if term is not None:
            d2[k] = term
    return TaylorValue(val, d1, d2)


def _taylor_scale(u, c, invert=False):
    # multiply (or divide) every coefficient by a constant
    if invert:
        return TaylorValue(
            u.val / c, {k: v / c for k, v in u.d1.items()}, {k: v / c for k, v in u.d2.items()}
        )
    return TaylorValue(
        u.val * c, {k: v * c for k, v in u.d1.items()}, {k: v * c for k, v in u.d2.items()}
    )


def _taylor_chain(u, f, fprime, fsecond):
    """Unary chain rule: y = f(u); needs f'(u) and f''(u) as callables of (y, u.val)."""
    y = f(u.val)
    fp = fprime(y, u.val)
    d1 = {k: fp * c for k, c in u.d1.items()}
    d2 = {}
    if u.d2:
        fs = fsecond(y, u.val)
        for k in u.d2:
            a, b = k
            term = fp * u.d2[k]
            if a in u.d1 and b in u.d1:
                term = term + fs * (u.d1[a] * u.d1[b])
            d2[k] = term
    return TaylorValue(y, d1, d2)


def _taylor_power(u, p):
    if isinstance(p, (Var, TaylorValue)):
        raise NotImplementedError("unsupported primitive: power with non-constant exponent")
    p = float(p)
    y = power(u.val, p)
    fp = power(u.val, p - 1.0) * p
    d1 = {k: fp * c for k, c in u.d1.items()}
    d2 = {}
    if u.d2:
        fs = power(u.val, p - 2.0) * (p * (p - 1.0))
        for k in u.d2:
            a, b = k
            term = fp * u.d2[k]
            if a in u.d1 and b in u.d1:
                term = term + fs * (u.d1[a] * u.d1[b])
            d2[k] = term
    return TaylorValue(y, d1, d2)


def taylor_linear(tv, fn, bias=None, batch_axis=0):
    """Apply a linear map to a TaylorValue by stacking coefficients on the batch axis.

    ``fn`` must be homogeneous (a matmul or convolution closure over the
    parameters, with no constant offset): value and every derivative
    coefficient then transform identically, so one call covers them all and
    the parameter-side tape gets a single node per layer. An affine ``bias``
    has zero derivative along every direction, so it is added to the value
    piece only.
    """
    keys1 = sorted(tv.d1)
    keys2 = sorted(tv.d2)
    parts = [tv.val] + [tv.d1[k] for k in keys1] + [tv.d2[k] for k in keys2]
    if len(parts) == 1:
        out = fn(tv.val)
        return TaylorValue(out if bias is None else out + bias)
    stacked = concat(parts, axis=batch_axis)
    out = fn(stacked)
    B = _data(tv.val).shape[batch_axis]
    pieces = []
    for i in range(len(parts)):
        sl = [slice(None)] * _data(out).ndim
        sl[batch_axis] = slice(i * B, (i + 1) * B)
        pieces.append(out[tuple(sl)])
    val = pieces[0] if bias is None else pieces[0] + bias
    d1 = {k: pieces[1 + i] for i, k in enumerate(keys1)}
    d2 = {k: pieces[1 + len(keys1) + i] for i, k in enumerate(keys2)}
    return TaylorValue(val, d1, d2)


def taylor_concat(tvs, axis=-1):
    """Concatenate TaylorValues along a feature axis, zero-filling absent coefficients."""
    tvs = [_as_taylor(t) for t in tvs]
    vals = [_data(t.val) if not isinstance(t.val, Var) else t.val for t in tvs]
    keys1 = sorted(set().union(*[t.d1 for t in tvs]))
    keys2 = sorted(set().union(*[t.d2 for t in tvs]))

    def gather(getter):
        parts = []
        for t in tvs:
            c = getter(t)
            parts.append(c if c is not None else np.zeros(_data(t.val).shape))
        return concat(parts, axis=axis)

    val = concat(vals, axis=axis)
    d1 = {k: gather(lambda t, k=k: t.d1.get(k)) for k in keys1}
    d2 = {k: gather(lambda t, k=k: t.d2.get(k)) for k in keys2}
    return TaylorValue(val, d1, d2)


def eval_with_input_derivs(fn, inputs, directions, second=None):
    """Evaluate ``fn`` with seeded input derivatives.

    Parameters
    ----------
    fn : callable
        Receives a dict name -> TaylorValue, returns a TaylorValue (or plain
        value if it uses no seeded input).
    inputs : dict
        name -> scalar or ndarray input values.
    directions : sequence of str
        Input names to differentiate against; each named input is seeded with
        unit first derivative along its own direction.
    second : sequence of (str, str), optional
        Direction pairs to track at second order. Defaults to the pure pairs
        (a, a) for every seeded direction.

    Returns
    -------
    dict with keys "value", ("d", name) and ("dd", a, b).
    """
    directions = list(directions)
    if second is None:
        second = [(a, a) for a in directions]
    pairs = [_pair(*p) for p in second]
    seeded = {}
    for name, value in inputs.items():
        v = np.asarray(value, dtype=np.float64)
        d1 = {}
        if name in directions:
            d1[name] = np.ones_like(v)
        d2 = {p: np.zeros_like(v) for p in pairs}
        seeded[name] = TaylorValue(v, d1, d2)
    out = _as_taylor(fn(seeded))
    result = {"value": out.val}
    for a in directions:
        result[("d", a)] = out.d1.get(a, np.zeros(_data(out.val).shape))
    for p in pairs:
        result[("dd",) + p] = out.d2.get(p, np.zeros(_data(out.val).shape))
    return result
