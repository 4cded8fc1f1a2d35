"""Direct numerical integration of competitive Kolmogorov systems.

Positive components are integrated in logarithmic coordinates
``u_i = ln x_i`` (so ``u_i' = f_i(x)``), which keeps every coordinate face
invariant and every density positive by construction.  Components that start
at zero stay exactly zero.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.integrate import RK45
from scipy.stats import qmc

from .model import SystemSpec, check, per_capita

__all__ = [
    "IntegrationError",
    "IntegratorOptions",
    "Trajectory",
    "integrate",
    "restrict_to_face",
    "embed",
    "LiapunovIntegral",
    "average_liapunov_integral",
    "PermanenceReport",
    "empirical_permanence",
    "CarryingSimplexSample",
    "sample_carrying_simplex",
    "unordered_violations",
]

log = logging.getLogger(__name__)

# Function evaluations per attempted Dormand-Prince step (FSAL pair).
_EVALS_PER_ATTEMPT = 6


class IntegrationError(RuntimeError):
    """Step-size underflow or step budget exhausted."""


@dataclass(frozen=True)
class IntegratorOptions:
    """Tolerances and limits for :func:`integrate`.

    ``stride`` selects fixed-interval output; by default every accepted step
    is recorded.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    t_max: float = 100.0
    max_steps: int = 2_000_000
    min_log_density: float = -30.0
    stride: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.stride is not None and not self.stride > 0:
            raise ValueError("stride must be positive")


@dataclass(eq=False)
class Trajectory:
    """Integrated orbit.

    ``log_states`` holds ``ln x`` (``-inf`` for pinned components) and is the
    accurate record when densities underflow double precision.
    """

    times: np.ndarray
    log_states: np.ndarray
    flags: dict = field(default_factory=dict)
    extra: Optional[np.ndarray] = None

    @property
    def states(self):
        with np.errstate(under="ignore"):
            return np.exp(self.log_states)

    @property
    def final(self):
        return self.states[-1]

    def to_csv(self, path_or_buf=None):
        """CSV with header ``t,x1,...,xn``; returns the text when no path."""
        n = self.log_states.shape[1]
        lines = [",".join(["t"] + [f"x{i + 1}" for i in range(n)])]
        for t, x in zip(self.times, self.states):
            lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in x]))
        text = "\n".join(lines) + "\n"
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)
        return None


def _options(opts, overrides):
    opts = IntegratorOptions() if opts is None else opts
    return replace(opts, **overrides) if overrides else opts


def _solve(rhs, y0, opts):
    """Drive scipy's Dormand-Prince pair; returns (times, ys, flags)."""
    solver = RK45(rhs, 0.0, y0, opts.t_max, rtol=opts.rel_tol, atol=opts.abs_tol)
    grid = None
    if opts.stride is not None:
        grid = np.arange(0.0, opts.t_max, opts.stride)[1:]
        grid = np.append(grid, opts.t_max)
    times, ys = [0.0], [np.array(y0, dtype=float)]
    gi = 0
    accepted = rejected = 0
    while solver.status == "running":
        before = solver.nfev
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationError(f"step size underflow at t={solver.t:.6g}: {msg}")
        accepted += 1
        rejected += max((solver.nfev - before) // _EVALS_PER_ATTEMPT - 1, 0)
        if accepted > opts.max_steps:
            raise IntegrationError(f"more than {opts.max_steps} steps before t_max")
        if grid is None:
            times.append(solver.t)
            ys.append(solver.y.copy())
        else:
            hi = np.searchsorted(grid, solver.t, side="right")
            if hi > gi:
                dense = solver.dense_output()
                pts = grid[gi:hi]
                vals = dense(pts).T.reshape(len(pts), -1)
                vals[pts == solver.t] = solver.y
                times.extend(pts.tolist())
                ys.extend(vals)
                gi = hi
    flags = {"accepted_steps": accepted, "rejected_steps": rejected}
    return np.array(times), np.array(ys), flags


def _log_rhs(spec, live, weights=None):
    n = spec.n
    x = np.zeros(n)
    k = int(live.sum())

    def rhs(t, y):
        x[live] = np.exp(y[:k])
        f = per_capita(spec, x)
        if weights is None:
            return f[live]
        return np.append(f[live], weights @ f)

    return rhs


def _integrate(spec, x0, opts, weights=None):
    check(spec)
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != spec.n:
        raise ValueError(f"x0 has length {x0.shape[0]}, expected {spec.n}")
    if np.any(x0 < 0) or not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite and componentwise nonnegative")
    live = x0 > 0
    k = int(live.sum())
    if k == 0:
        # The origin is an equilibrium; only the integral can move.
        rate = 0.0 if weights is None else None
        if weights is not None:
            rate = float(weights @ per_capita(spec, x0))
        times = np.array([0.0, opts.t_max])
        logs = np.full((2, spec.n), -np.inf)
        extra = None if weights is None else rate * times
        flags = {"accepted_steps": 1, "rejected_steps": 0}
        return times, logs, flags, extra
    y0 = np.log(x0[live])
    if weights is not None:
        y0 = np.append(y0, 0.0)
    times, ys, flags = _solve(_log_rhs(spec, live, weights), y0, opts)
    logs = np.full((ys.shape[0], spec.n), -np.inf)
    logs[:, live] = ys[:, :k]
    extra = ys[:, k] if weights is not None else None
    return times, logs, flags, extra


def _finish_flags(flags, logs, opts):
    finite = logs[np.isfinite(logs)]
    min_log = float(finite.min()) if finite.size else -math.inf
    flags["min_log_density"] = min_log
    flags["min_component"] = float(np.exp(min_log)) if finite.size else 0.0
    low = np.isfinite(logs) & (logs < opts.min_log_density)
    flags["near_extinction"] = [int(i) for i in np.flatnonzero(low.any(axis=0))]
    return flags


def integrate(spec, x0, opts=None, **overrides):
    """Integrate ``spec`` from ``x0`` over ``[0, opts.t_max]``.

    Keyword overrides are applied to ``opts`` (e.g. ``t_max=50``).

    Raises
    ------
    IntegrationError
        On step-size underflow or when ``max_steps`` is exceeded.
    """
    opts = _options(opts, overrides)
    times, logs, flags, _ = _integrate(spec, x0, opts)
    return Trajectory(times, logs, _finish_flags(flags, logs, opts))


def restrict_to_face(spec, support):
    """Subsystem on the face spanned by ``support`` (0-based indices)."""
    idx = np.asarray(sorted(int(i) for i in support))
    if idx.size == 0:
        raise ValueError("support must be nonempty")
    return SystemSpec(spec.B[np.ix_(idx, idx)], spec.c[idx], spec.family)


def embed(traj, support, n):
    """Lift a face trajectory back into ``n`` dimensions (zeros elsewhere)."""
    idx = np.asarray(sorted(int(i) for i in support))
    logs = np.full((traj.log_states.shape[0], n), -np.inf)
    logs[:, idx] = traj.log_states
    return Trajectory(traj.times.copy(), logs, dict(traj.flags))


@dataclass(eq=False)
class LiapunovIntegral:
    """``integral(t) = int_0^t g(x(s)) ds`` along one orbit, with running extrema."""

    times: np.ndarray
    values: np.ndarray
    running_sup: np.ndarray
    running_inf: np.ndarray
    trajectory: Trajectory

    def slope(self, t0, t1):
        """Average of ``g`` over ``[t0, t1]`` from the sampled integral."""
        v0, v1 = np.interp([t0, t1], self.times, self.values)
        return float((v1 - v0) / (t1 - t0))


def average_liapunov_integral(spec, nu, x0, opts=None, **overrides):
    """Integral of ``g(x) = sum_i nu_i f_i(x)`` along the orbit from ``x0``.

    The integral is carried as an extra state of the ODE, so it is as accurate
    as the trajectory itself.
    """
    opts = _options(opts, overrides)
    nu = np.asarray(nu, dtype=float).reshape(-1)
    if nu.shape[0] != spec.n or np.any(nu <= 0):
        raise ValueError("nu must be a positive vector of length n")
    times, logs, flags, extra = _integrate(spec, x0, opts, weights=nu)
    traj = Trajectory(times, logs, _finish_flags(flags, logs, opts), extra)
    return LiapunovIntegral(
        times,
        extra,
        np.maximum.accumulate(extra),
        np.minimum.accumulate(extra),
        traj,
    )


@dataclass
class PermanenceReport:
    """Empirical bounds on long-run densities from sampled interior orbits.

    ``delta_hat`` / ``D_hat`` are the smallest / largest component seen after
    the transient; ``minima`` holds each orbit's smallest post-transient
    component (``nan`` for failed samples).
    """

    delta_hat: float
    D_hat: float
    minima: np.ndarray
    min_log: np.ndarray
    starts: np.ndarray
    failures: dict = field(default_factory=dict)

    def summary(self):
        return {
            "delta_hat": float(self.delta_hat),
            "D_hat": float(self.D_hat),
            "min_log_density": float(np.nanmin(self.min_log)) if self.min_log.size else None,
            "samples": int(self.starts.shape[0]),
            "failures": {str(k): v for k, v in self.failures.items()},
        }


def _sample_run(args):
    spec, x0, opts, discard = args
    try:
        traj = integrate(spec, x0, opts)
    except IntegrationError as exc:
        return None, str(exc)
    keep = traj.times >= discard * opts.t_max
    logs = traj.log_states[keep]
    return (float(logs.min()), float(logs.max())), None


def interior_starts(spec, n_samples, seed=42):
    """Low-discrepancy starts in ``[0.01, 2 max_i c_i/b_ii]^n``."""
    hi = 2.0 * float(np.max(spec.c / np.diag(spec.B)))
    sampler = qmc.Halton(d=spec.n, scramble=True, seed=seed)
    return qmc.scale(sampler.random(n_samples), np.full(spec.n, 0.01), np.full(spec.n, hi))


def empirical_permanence(
    spec, n_samples=20, opts=None, seed=42, discard=0.5, jobs=1, **overrides
):
    """Integrate ``n_samples`` interior orbits and bound them after a transient.

    The first ``discard`` fraction of ``[0, t_max]`` is ignored.  Integrator
    failures are recorded per sample in ``failures`` and do not abort the run.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    check(spec)
    opts = _options(opts, overrides)
    starts = interior_starts(spec, n_samples, seed)
    tasks = [(spec, x0, opts, discard) for x0 in starts]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sample_run, tasks))
    else:
        results = [_sample_run(t) for t in tasks]
    lo = np.full(n_samples, np.nan)
    hi = np.full(n_samples, np.nan)
    failures = {}
    for k, (res, err) in enumerate(results):
        if err is not None:
            failures[k] = err
            log.info("sample %d failed: %s", k, err)
            continue
        lo[k], hi[k] = res
    with np.errstate(under="ignore"):
        minima = np.exp(lo)
        delta = float(np.exp(np.nanmin(lo))) if np.isfinite(lo).any() else math.nan
        D = float(np.exp(np.nanmax(hi))) if np.isfinite(hi).any() else math.nan
    return PermanenceReport(delta, D, minima, lo, starts, failures)


@dataclass(eq=False)
class CarryingSimplexSample:
    """Settled points approximating the carrying simplex.

    ``outer[k]`` / ``inner[k]`` come from the ray through ``directions[k]``
    started far from and close to the origin; ``unsettled`` flags rays whose
    two endpoints are further apart than ``settle_tol``.
    """

    directions: np.ndarray
    outer: np.ndarray
    inner: np.ndarray
    unsettled: np.ndarray

    @property
    def points(self):
        return np.vstack([self.outer, self.inner])

    def to_csv(self):
        n = self.outer.shape[1]
        lines = [",".join(f"x{i + 1}" for i in range(n))]
        for p in self.points:
            lines.append(",".join(repr(float(v)) for v in p))
        return "\n".join(lines) + "\n"


def simplex_directions(n, n_rays, seed=42):
    """Quasi-random directions on the open unit simplex."""
    if n == 1:
        return np.ones((n_rays, 1))
    u = qmc.Halton(d=n, scramble=True, seed=seed).random(n_rays)
    w = -np.log1p(-u)  # exponential spacings give uniform simplex points
    return w / w.sum(axis=1, keepdims=True)


def sample_carrying_simplex(
    spec, n_rays=50, t_settle=30.0, opts=None, seed=42, eps=1e-3, settle_tol=1e-4
):
    """Approximate the carrying simplex by flowing points along rays.

    Each direction ``d`` is started at ``R d`` with ``R = 2 max(c_i/b_ii) + 1``
    (outside the simplex) and at ``eps d`` (inside, pushed out by the
    repelling origin), then integrated for ``t_settle``.

    ``t_settle`` should let the rays reach the surface without letting them
    collapse onto an interior attractor; once collapsed, round-off along the
    stable directions can make nearby points comparable.
    """
    if n_rays < 1:
        raise ValueError("n_rays must be at least 1")
    check(spec)
    opts = _options(opts, {"t_max": t_settle})
    R = 2.0 * float(np.max(spec.c / np.diag(spec.B))) + 1.0
    dirs = simplex_directions(spec.n, n_rays, seed)
    outer = np.array([integrate(spec, R * d, opts).final for d in dirs])
    inner = np.array([integrate(spec, eps * d, opts).final for d in dirs])
    gap = np.linalg.norm(outer - inner, axis=1)
    return CarryingSimplexSample(dirs, outer, inner, gap > settle_tol)


def unordered_violations(points, tol=1e-6):
    """Count pairs ``p != q`` with ``p >= q`` componentwise (up to ``tol``).

    Points closer than ``tol`` in every component count as the same point.
    """
    P = np.asarray(points, dtype=float)
    diff = P[:, None, :] - P[None, :, :]
    geq = np.all(diff >= -tol, axis=2)
    distinct = np.any(diff > tol, axis=2)
    return int(np.count_nonzero(geq & distinct))
