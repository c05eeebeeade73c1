"""Damped least squares (Levenberg-Marquardt) with named, bounded parameters.

Bounds are enforced by a change of variables: a sine map for two-sided
bounds, a hyperbolic map for one-sided ones. Each parameter is divided by its
starting magnitude first so the internal variables are O(1). The Jacobian is
taken by central differences in the internal variables; standard errors come
from the linearised covariance evaluated in the original parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["SINGULAR_CONDITION", "GRADIENT_FLOOR", "FitResult", "FitError", "least_squares_fit"]

# Finite-difference Jacobians carry ~1e-10 relative noise, so exactly
# dependent columns show up with a condition number of order 1e8-1e10.
SINGULAR_CONDITION = 1e8

# With a noisy residual the cost stops resolving descent once the scaled
# gradient is ~sqrt(eps * |f| / |r|); 1e-6 sits above that for the fits here.
GRADIENT_FLOOR = 1e-6


class FitError(ValueError):
    pass


@dataclass
class FitResult:
    params: dict
    stderr: dict
    residual_norm: float
    iterations: int
    converged: bool
    gradient_norm: float
    message: str
    cost_history: list = field(default_factory=list)
    nfev: int = 0
    singular: bool = False
    condition_number: float = float("nan")
    covariance: np.ndarray | None = None
    residuals: np.ndarray | None = None
    flags: dict = field(default_factory=dict)

    def __getitem__(self, name):
        return self.params[name]

    def to_dict(self) -> dict:
        return {
            "params": {k: float(v) for k, v in self.params.items()},
            "stderr": {k: float(v) for k, v in self.stderr.items()},
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "gradient_norm": self.gradient_norm,
            "message": self.message,
            "nfev": self.nfev,
            "singular": self.singular,
            "condition_number": self.condition_number,
            "flags": dict(self.flags),
        }


class _Transform:
    """Map between unconstrained u and bounded x, per component."""

    def __init__(self, lo, hi, scale):
        self.lo, self.hi, self.scale = lo, hi, scale

    def to_x(self, u):
        x = np.empty_like(u)
        for i, (a, b, s) in enumerate(zip(self.lo, self.hi, self.scale)):
            v = u[i]
            if np.isfinite(a) and np.isfinite(b):
                x[i] = a + (b - a) * 0.5 * (math.sin(v) + 1.0)
            elif np.isfinite(a):
                x[i] = a + s * (math.sqrt(v * v + 1.0) - 1.0)
            elif np.isfinite(b):
                x[i] = b - s * (math.sqrt(v * v + 1.0) - 1.0)
            else:
                x[i] = s * v
        return x

    def to_u(self, x):
        u = np.empty_like(x)
        for i, (a, b, s) in enumerate(zip(self.lo, self.hi, self.scale)):
            v = x[i]
            if np.isfinite(a) and np.isfinite(b):
                u[i] = math.asin(min(1.0, max(-1.0, 2.0 * (v - a) / (b - a) - 1.0)))
            elif np.isfinite(a):
                u[i] = math.sqrt((1.0 + (v - a) / s) ** 2 - 1.0)
            elif np.isfinite(b):
                u[i] = math.sqrt((1.0 + (b - v) / s) ** 2 - 1.0)
            else:
                u[i] = v / s
        return u


def _jacobian(fun, z, f0, rel_step):
    n = z.size
    cols = []
    nfev = 0
    for i in range(n):
        h = rel_step * max(1.0, abs(z[i]))
        zp, zm = z.copy(), z.copy()
        zp[i] += h
        zm[i] -= h
        cols.append((fun(zp) - fun(zm)) / (2.0 * h))
        nfev += 2
    return np.column_stack(cols) if cols else np.zeros((f0.size, 0)), nfev


def least_squares_fit(residual, x0, bounds=None, names=None, fixed=(), max_iter=500,
                      xtol=1e-10, gtol=1e-10, gtol_floor=GRADIENT_FLOOR, rel_step=None,
                      lambda0=1e-3) -> FitResult:
    """Minimise 0.5*||residual(params)||^2.

    ``residual`` takes a dict of named parameters and returns a 1D array.
    ``x0`` is a dict (or sequence with ``names``); ``bounds`` maps names to
    (lo, hi) with +-inf for open sides; names in ``fixed`` are held at x0.

    Iteration stops when the relative step falls below ``xtol`` or the
    scaled gradient max_i |J_i . r| / (|J_i| |r_0|) falls below ``gtol``,
    with r_0 the residual at the starting point. ``converged`` requires the
    scaled gradient at the returned point to be below ``gtol``, or below
    ``gtol_floor`` when iteration ended on the step criterion or because no
    downhill step exists (round-off in the cost).
    """
    if not isinstance(x0, dict):
        if names is None:
            raise FitError("names are required when x0 is a sequence")
        x0 = dict(zip(names, x0))
    names = list(x0)
    bounds = bounds or {}
    unknown = (set(bounds) | set(fixed)) - set(names)
    if unknown:
        raise FitError(f"unknown parameter names {sorted(unknown)}")
    free = [k for k in names if k not in fixed]
    if not free:
        raise FitError("no free parameters")
    x_free = np.array([float(x0[k]) for k in free])
    if not np.all(np.isfinite(x_free)):
        raise FitError("initial guess must be finite")
    lo = np.array([float(bounds.get(k, (-np.inf, np.inf))[0]) for k in free])
    hi = np.array([float(bounds.get(k, (-np.inf, np.inf))[1]) for k in free])
    if np.any(x_free < lo) or np.any(x_free > hi):
        raise FitError("initial guess outside bounds")
    scale = np.where(x_free != 0, np.abs(x_free), 1.0)
    tr = _Transform(lo, hi, scale)
    if rel_step is None:
        rel_step = np.finfo(float).eps ** (1.0 / 3.0)

    def full(xf):
        p = {k: float(x0[k]) for k in names}
        p.update(zip(free, (float(v) for v in xf)))
        return p

    nfev = 0

    def fun_u(u):
        nonlocal nfev
        nfev += 1
        r = np.asarray(residual(full(tr.to_x(u))), dtype=float).ravel()
        return r

    u = tr.to_u(x_free)
    r = fun_u(u)
    if r.size <= len(free):
        raise FitError(f"need more residuals ({r.size}) than free parameters ({len(free)})")
    if not np.all(np.isfinite(r)):
        raise FitError("residual is not finite at the initial guess")
    cost = 0.5 * float(r @ r)
    history = [cost]
    lam = lambda0
    converged = False
    message = "maximum iterations reached"
    it = 0

    r0_norm = math.sqrt(float(r @ r))

    def scaled_grad(J, r):
        rn = r0_norm
        if rn == 0.0:
            return 0.0
        cn = np.linalg.norm(J, axis=0)
        g = J.T @ r
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.where(cn > 0, np.abs(g) / (cn * rn), 0.0)
        return float(c.max())

    J, _ = _jacobian(fun_u, u, r, rel_step)
    for it in range(1, max_iter + 1):
        gnorm = scaled_grad(J, r)
        if cost == 0.0 or gnorm <= gtol:
            converged = True
            message = "gradient below tolerance"
            break
        A = J.T @ J
        g = J.T @ r
        D = np.diag(A).copy()
        D[D == 0] = 1.0
        accepted = False
        while lam < 1e20:
            try:
                step = np.linalg.solve(A + lam * np.diag(D), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            u_new = u + step
            r_new = fun_u(u_new)
            cost_new = 0.5 * float(r_new @ r_new) if np.all(np.isfinite(r_new)) else np.inf
            if cost_new < cost:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            message = "no downhill step (damping exhausted)"
            break
        small_step = np.linalg.norm(step * np.sqrt(D)) <= xtol * (np.linalg.norm(u * np.sqrt(D)) + xtol)
        u, r, cost = u_new, r_new, cost_new
        history.append(cost)
        lam = max(lam / 10.0, 1e-15)
        J, _ = _jacobian(fun_u, u, r, rel_step)
        if small_step:
            message = "relative step below tolerance"
            break

    x_best = tr.to_x(u)
    params = full(x_best)
    gnorm = scaled_grad(J, r)
    if gnorm <= gtol:
        converged = True
    elif message != "maximum iterations reached":
        # stopped on the step criterion or at the round-off floor of the cost
        converged = gnorm <= gtol_floor
        if not converged:
            message += f"; gradient {gnorm:.2g} above {gtol_floor:.2g}"

    # covariance in the original parameters
    def fun_x(xf):
        return np.asarray(residual(full(xf)), dtype=float).ravel()

    step_x = rel_step * np.maximum(np.abs(x_best), scale)
    cols = []
    for i in range(x_best.size):
        xp, xm = x_best.copy(), x_best.copy()
        xp[i] += step_x[i]
        xm[i] -= step_x[i]
        # stay inside the domain for one-sided differences at a bound
        if xm[i] < lo[i]:
            xm[i] = x_best[i]
        if xp[i] > hi[i]:
            xp[i] = x_best[i]
        cols.append((fun_x(xp) - fun_x(xm)) / (xp[i] - xm[i]))
        nfev += 2
    Jx = np.column_stack(cols)
    # condition number of the column-normalised Jacobian, independent of units
    cn = np.linalg.norm(Jx, axis=0)
    cs = np.where(cn > 0, cn, 1.0)
    Js = Jx / cs
    sv = np.linalg.svd(Js, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 and np.all(cn > 0) else float("inf")
    singular = not np.isfinite(cond) or cond > SINGULAR_CONDITION
    dof = r.size - len(free)
    s2 = 2.0 * cost / dof
    # invert in normalised columns so parameters of very different units
    # do not fall below the pseudo-inverse cutoff
    cov = np.linalg.pinv(Js.T @ Js) / np.outer(cs, cs) * s2
    err = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    if singular:
        err = np.full_like(err, np.inf)
    stderr = {k: 0.0 for k in names}
    stderr.update(zip(free, (float(e) for e in err)))
    if singular:
        message += "; singular Jacobian at the solution"
    return FitResult(
        params=params,
        stderr=stderr,
        residual_norm=math.sqrt(2.0 * cost),
        iterations=it,
        converged=converged,
        gradient_norm=gnorm,
        message=message,
        cost_history=history,
        nfev=nfev,
        singular=singular,
        condition_number=cond,
        covariance=cov,
        residuals=r,
    )
