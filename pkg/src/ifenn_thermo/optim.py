"""LBFGS with strong Wolfe line search.

Deterministic full-batch minimizer: two-loop recursion over a bounded
history of curvature pairs, gamma-scaled initial Hessian, and a
bracket-and-zoom line search enforcing both Wolfe conditions on every
accepted iterate. A failed line search first retries once with the memory
cleared (plain steepest descent); if that also fails the run stops with the
failure recorded rather than accepting a non-Wolfe step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["LbfgsConfig", "MinimizeResult", "minimize", "strong_wolfe_search"]


@dataclass(frozen=True)
class LbfgsConfig:
    history: int = 50
    max_iterations: int = 500
    grad_tol: float = 1e-8  # on the max-norm of the gradient
    c1: float = 1e-4
    c2: float = 0.9
    max_line_search: int = 25
    seed: int = 0  # recorded for provenance; the algorithm itself is deterministic

    def __post_init__(self):
        if self.history < 1:
            raise ValueError("history must be >= 1")
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.max_line_search < 2:
            raise ValueError("line search needs at least two evaluations")


@dataclass
class MinimizeResult:
    x: np.ndarray
    f: float
    grad_norm: float
    n_iterations: int
    n_evaluations: int
    status: str
    trace: list = field(default_factory=list)  # rows (iteration, f, ||g||_inf)


def strong_wolfe_search(fg, x, direction, f0, g0, config):
    """Find a step length satisfying both strong Wolfe conditions.

    ``fg`` maps a point to (f, gradient). Returns a dict with keys
    alpha, f, g, n_evals, ok. A non-descent direction raises ValueError.
    Non-finite trial values are treated as overly long steps and bracketed
    away rather than propagated.
    """
    d = direction
    der0 = float(g0 @ d)
    if der0 >= 0.0:
        raise ValueError("line search requires a descent direction (g.d < 0)")
    c1, c2 = config.c1, config.c2
    budget = config.max_line_search
    evals = 0

    def phi(alpha):
        nonlocal evals
        f, g = fg(x + alpha * d)
        evals += 1
        return f, g, (float(g @ d) if np.all(np.isfinite(g)) else np.nan)

    def zoom(lo, f_lo, d_lo, hi, f_hi):
        nonlocal evals
        g_best = None
        while evals < budget:
            # quadratic interpolation from the low end, bisection fallback
            dl = hi - lo
            a = np.nan
            if dl != 0.0 and np.isfinite(f_hi):
                curv = (f_hi - f_lo - d_lo * dl) / (dl * dl)
                if np.isfinite(curv) and curv > 0.0:
                    a = lo - d_lo / (2.0 * curv)
            lo_, hi_ = min(lo, hi), max(lo, hi)
            width = hi_ - lo_
            if not np.isfinite(a) or a <= lo_ + 0.1 * width or a >= hi_ - 0.1 * width:
                a = 0.5 * (lo_ + hi_)
            f, g, der = phi(a)
            if not np.isfinite(f) or f > f0 + c1 * a * der0 or f >= f_lo:
                hi, f_hi = a, f
            else:
                if abs(der) <= -c2 * der0:
                    return {"alpha": a, "f": f, "g": g, "n_evals": evals, "ok": True}
                if der * (hi - lo) >= 0.0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, d_lo = a, f, der
                g_best = g
            if abs(hi - lo) < 1e-16 * max(1.0, abs(lo)):
                break
        if g_best is not None and f_lo < f0 + c1 * lo * der0:
            # sufficient decrease holds but curvature could not be certified
            return {"alpha": lo, "f": f_lo, "g": g_best, "n_evals": evals, "ok": False}
        return {"alpha": 0.0, "f": f0, "g": g0, "n_evals": evals, "ok": False}

    alpha_prev, f_prev, der_prev = 0.0, f0, der0
    alpha = 1.0
    first = True
    while evals < budget:
        f, g, der = phi(alpha)
        if not np.isfinite(f) or f > f0 + c1 * alpha * der0 or (not first and f >= f_prev):
            return zoom(alpha_prev, f_prev, der_prev, alpha, f)
        if abs(der) <= -c2 * der0:
            return {"alpha": alpha, "f": f, "g": g, "n_evals": evals, "ok": True}
        if der >= 0.0:
            return zoom(alpha, f, der, alpha_prev, f_prev)
        alpha_prev, f_prev, der_prev = alpha, f, der
        alpha *= 2.0
        first = False
    return {"alpha": 0.0, "f": f0, "g": g0, "n_evals": evals, "ok": False}


def _two_loop(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return q


def minimize(objective_and_gradient, x0, config=None, callback=None):
    """LBFGS loop; returns the best Wolfe-accepted iterate.

    ``objective_and_gradient`` maps x -> (f, g) and must be deterministic.
    ``callback(iteration, x, f, g)`` fires after every accepted iterate
    (including iteration 0 at the start).
    """
    config = config or LbfgsConfig()
    x = np.asarray(x0, dtype=np.float64).copy()
    f, g = objective_and_gradient(x)
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        raise ValueError("objective is not finite at the starting point")
    n_evals = 1
    trace = [(0, float(f), float(np.max(np.abs(g))))]
    if callback is not None:
        callback(0, x, f, g)
    pairs = []
    status = "max_iterations"
    it = 0
    retried = False
    while it < config.max_iterations:
        gnorm = float(np.max(np.abs(g)))
        if gnorm < config.grad_tol:
            status = "converged"
            break
        d = -_two_loop(g, pairs)
        if not pairs:
            d = d / max(1.0, float(np.sum(np.abs(g))))  # temper the raw-gradient first step
        if float(g @ d) >= 0.0:
            pairs.clear()
            d = -g / max(1.0, float(np.sum(np.abs(g))))
        res = strong_wolfe_search(objective_and_gradient, x, d, f, g, config)
        n_evals += res["n_evals"]
        if not res["ok"] or res["alpha"] == 0.0:
            if res["ok"] is False and res["alpha"] > 0.0 and res["f"] < f:
                # decrease without certified curvature: take it but drop the pair
                x = x + res["alpha"] * d
                f, g = res["f"], res["g"]
                pairs.clear()
                it += 1
                trace.append((it, float(f), float(np.max(np.abs(g)))))
                if callback is not None:
                    callback(it, x, f, g)
                continue
            if pairs and not retried:
                pairs.clear()
                retried = True
                continue
            status = "line_search_failure"
            break
        retried = False
        alpha = res["alpha"]
        x_new = x + alpha * d
        g_new = res["g"]
        s = x_new - x
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-10 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            pairs.append((s, y, 1.0 / sy))
            if len(pairs) > config.history:
                pairs.pop(0)
        x, f, g = x_new, res["f"], g_new
        it += 1
        trace.append((it, float(f), float(np.max(np.abs(g)))))
        if callback is not None:
            callback(it, x, f, g)
    else:
        status = "max_iterations"
    return MinimizeResult(
        x=x,
        f=float(f),
        grad_norm=float(np.max(np.abs(g))),
        n_iterations=it,
        n_evaluations=n_evals,
        status=status,
        trace=trace,
    )
