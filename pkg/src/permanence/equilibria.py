"""Boundary equilibria of systems with linear nullclines.

Because the nullcline of species ``i`` is the hyperplane ``(Bx)_i = c_i``,
there is at most one equilibrium with a given support ``K`` and it solves
``B[K, K] x_K = c_K``.  Enumerating supports therefore finds every nontrivial
equilibrium without any root finding.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .model import check, growth_rate, jacobian, per_capita

__all__ = [
    "Equilibrium",
    "DegenerateSolve",
    "DegenerateSystem",
    "TOL_POS",
    "COND_MAX",
    "axial_equilibria",
    "equilibrium_on_support",
    "boundary_equilibria",
    "all_equilibria",
    "characteristic_matrix",
    "equilibria_to_json",
]

TOL_POS = 1e-9
COND_MAX = 1e12


@dataclass(frozen=True, eq=False)
class Equilibrium:
    """Equilibrium with support ``support`` (0-based, sorted).

    ``external_eigs`` maps each absent species ``j`` to ``f_j(x)``, the
    invasion rate of ``j`` at this equilibrium.  ``internal_spectrum`` holds
    the eigenvalues of the Jacobian restricted to the support block.
    """

    support: tuple
    x: np.ndarray = field(repr=False)
    external_eigs: dict = field(default_factory=dict)
    internal_spectrum: np.ndarray = field(default=None, repr=False)

    @property
    def is_axial(self):
        return len(self.support) == 1

    def row(self, n=None):
        """Per-capita rates at the equilibrium; zero on the support."""
        n = self.x.shape[0] if n is None else n
        out = np.zeros(n)
        for j, v in self.external_eigs.items():
            out[j] = v
        return out

    def to_dict(self):
        return {
            "support": list(self.support),
            "x": self.x.tolist(),
            "external_eigs": {str(j): float(v) for j, v in self.external_eigs.items()},
        }


@dataclass(frozen=True)
class DegenerateSolve:
    """A support whose linear solve cannot decide existence."""

    support: tuple
    reason: str


class DegenerateSystem(ValueError):
    """Raised when any support solve is degenerate."""

    def __init__(self, solves):
        self.solves = list(solves)
        parts = [f"support {list(s.support)}: {s.reason}" for s in self.solves]
        super().__init__("degenerate equilibrium solve (" + "; ".join(parts) + ")")


def _make_equilibrium(spec, support, x):
    f = per_capita(spec, x)
    absent = [j for j in range(spec.n) if j not in support]
    J = jacobian(spec, x)
    idx = np.asarray(support)
    spectrum = np.linalg.eigvals(J[np.ix_(idx, idx)])
    return Equilibrium(
        support=tuple(support),
        x=x,
        external_eigs={j: float(f[j]) for j in absent},
        internal_spectrum=spectrum,
    )


def equilibrium_on_support(spec, support):
    """Solve for the equilibrium whose support is exactly ``support``.

    Returns
    -------
    Equilibrium, None or DegenerateSolve
        ``None`` when the solution has a clearly negative component (no
        equilibrium with this support), ``DegenerateSolve`` when the block is
        numerically singular or a component sits within ``TOL_POS`` of zero.
    """
    support = tuple(sorted(int(i) for i in support))
    if not support:
        raise ValueError("support must be nonempty")
    idx = np.asarray(support)
    block = spec.B[np.ix_(idx, idx)]
    cond = np.linalg.cond(block)
    if not np.isfinite(cond) or cond > COND_MAX:
        return DegenerateSolve(support, f"singular block (condition {cond:.3g})")
    xk = np.linalg.solve(block, spec.c[idx])
    band = TOL_POS * max(np.abs(xk).max(), 1.0)
    if np.any(xk <= -band):
        return None
    if np.any(xk < band):
        return DegenerateSolve(support, "component within tolerance of zero")
    x = np.zeros(spec.n)
    x[idx] = xk
    return _make_equilibrium(spec, support, x)


def axial_equilibria(spec):
    """The ``n`` single-species equilibria ``(c_i / b_ii) e_i``."""
    check(spec)
    out = []
    for i in range(spec.n):
        x = np.zeros(spec.n)
        x[i] = spec.c[i] / spec.B[i, i]
        out.append(_make_equilibrium(spec, (i,), x))
    return out


def _supports(n, proper=True):
    top = n - 1 if proper else n
    for size in range(1, top + 1):
        yield from itertools.combinations(range(n), size)


def _enumerate(spec, proper):
    check(spec)
    found, degenerate = [], []
    for support in _supports(spec.n, proper):
        if len(support) == 1:
            i = support[0]
            x = np.zeros(spec.n)
            x[i] = spec.c[i] / spec.B[i, i]
            found.append(_make_equilibrium(spec, support, x))
            continue
        res = equilibrium_on_support(spec, support)
        if isinstance(res, DegenerateSolve):
            degenerate.append(res)
        elif res is not None:
            found.append(res)
    if degenerate:
        raise DegenerateSystem(degenerate)
    return found


def boundary_equilibria(spec):
    """Every equilibrium with a nonempty proper support, axial ones first.

    Raises
    ------
    DegenerateSystem
        If any support solve is degenerate.
    """
    return _enumerate(spec, proper=True)


def all_equilibria(spec):
    """Boundary equilibria plus the interior one, when it exists."""
    return _enumerate(spec, proper=False)


def characteristic_matrix(spec):
    """Matrix of axial invasion rates, ``theta[i, j] = f_j(q_i)``.

    ``theta[i, j] = f(c_j, b_ji c_i / b_ii)``; the diagonal is zero.
    """
    check(spec)
    n = spec.n
    theta = np.zeros((n, n))
    for i in range(n):
        qi = spec.c[i] / spec.B[i, i]
        for j in range(n):
            if j != i:
                theta[i, j] = growth_rate(spec.family, spec.c[j], spec.B[j, i] * qi)
    return theta


def equilibria_to_json(equilibria):
    return json.dumps([e.to_dict() for e in equilibria])
