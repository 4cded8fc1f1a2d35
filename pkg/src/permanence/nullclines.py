"""Nullcline invariants of three-species systems.

For ``x_i' = x_i f(c_i, (Bx)_i)`` the qualitative picture on the carrying
simplex depends only on the signs of

    gamma_ij = b_ii c_j - b_ji c_i                      (i != j)
    beta_ij  = b_ii b_jj - b_ij b_ji                    (i < j)
    c_k beta_ij - b_ki gamma_ji - b_kj gamma_ij         (planar equilibrium in the
                                                         i-j plane exists)

and not on the growth law ``f``.  All indices are 0-based.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .equilibria import (
    DegenerateSolve,
    DegenerateSystem,
    boundary_equilibria,
    characteristic_matrix,
    equilibrium_on_support,
)
from .model import check, sign_with_tol

__all__ = [
    "gamma",
    "beta",
    "planar_quantity",
    "zero_tol",
    "SignConfiguration",
    "sign_configuration",
    "is_class_29",
    "class_29_labelling",
    "CyclePattern",
    "cycle_pattern",
]

FORWARD = "forward"
BACKWARD = "backward"

_SIGN_STR = {-1: "-", 0: "0", 1: "+"}


def zero_tol(spec):
    """Absolute threshold below which a classification quantity counts as 0."""
    return 1e-10 * spec.scale()


def gamma(spec, i, j):
    """``b_ii c_j - b_ji c_i``; positive iff species j invades the i-only state."""
    if i == j:
        raise ValueError("gamma needs distinct indices")
    B, c = spec.B, spec.c
    return float(B[i, i] * c[j] - B[j, i] * c[i])


def beta(spec, i, j):
    """``b_ii b_jj - b_ij b_ji`` (determinant of the i-j block)."""
    if i == j:
        raise ValueError("beta needs distinct indices")
    i, j = min(i, j), max(i, j)
    B = spec.B
    return float(B[i, i] * B[j, j] - B[i, j] * B[j, i])


def planar_quantity(spec, k):
    """``c_k beta_ij - b_ki gamma_ji - b_kj gamma_ij`` for ``{i, j, k}`` = {0,1,2}.

    When the planar equilibrium ``v_k`` exists, ``f_k(v_k)`` has the sign of
    this quantity times the sign of ``beta_ij``.
    """
    if spec.n != 3:
        raise ValueError("planar quantities are defined for n = 3")
    i, j = (m for m in range(3) if m != k)
    B, c = spec.B, spec.c
    return float(
        c[k] * beta(spec, i, j) - B[k, i] * gamma(spec, j, i) - B[k, j] * gamma(spec, i, j)
    )


@dataclass(frozen=True)
class SignConfiguration:
    """Nullcline configuration of a three-species system.

    ``planar_quantities[k]`` is ``None`` when there is no planar equilibrium
    in the plane ``x_k = 0``.
    """

    gamma_signs: dict
    beta_signs: dict
    planar_quantities: dict
    planar_signs: dict
    nullcline_stable: bool

    def to_dict(self):
        return {
            "gamma_signs": {
                f"{i},{j}": _SIGN_STR[s] for (i, j), s in sorted(self.gamma_signs.items())
            },
            "beta_signs": {
                f"{i},{j}": _SIGN_STR[s] for (i, j), s in sorted(self.beta_signs.items())
            },
            "planar_quantities": {
                str(k): (None if v is None else float(v))
                for k, v in sorted(self.planar_quantities.items())
            },
            "planar_signs": {
                str(k): (None if s is None else _SIGN_STR[s])
                for k, s in sorted(self.planar_signs.items())
            },
            "nullcline_stable": self.nullcline_stable,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _require3(spec):
    check(spec)
    if spec.n != 3:
        raise ValueError(f"this operation needs n = 3, got n = {spec.n}")


def sign_configuration(spec):
    """Signs of every gamma, beta and (present) planar quantity.

    Raises
    ------
    DegenerateSystem
        If the existence of a planar equilibrium cannot be decided.
    """
    _require3(spec)
    tol = zero_tol(spec)
    gs = {
        (i, j): sign_with_tol(gamma(spec, i, j), tol)
        for i in range(3)
        for j in range(3)
        if i != j
    }
    bs = {(i, j): sign_with_tol(beta(spec, i, j), tol) for i, j in itertools.combinations(range(3), 2)}
    pq, ps, degenerate = {}, {}, []
    for k in range(3):
        support = tuple(m for m in range(3) if m != k)
        res = equilibrium_on_support(spec, support)
        if isinstance(res, DegenerateSolve):
            degenerate.append(res)
            continue
        if res is None:
            pq[k] = ps[k] = None
        else:
            q = planar_quantity(spec, k)
            pq[k] = q
            ps[k] = sign_with_tol(q, tol)
    if degenerate:
        raise DegenerateSystem(degenerate)
    stable = all(s != 0 for s in gs.values()) and all(
        s != 0 for s in ps.values() if s is not None
    )
    return SignConfiguration(gs, bs, pq, ps, stable)


def _class_29_representative(spec, tol):
    g = lambda i, j: sign_with_tol(gamma(spec, i, j), tol)  # noqa: E731
    if not (
        g(0, 1) > 0 and g(0, 2) > 0 and g(1, 0) > 0
        and g(1, 2) < 0 and g(2, 0) < 0 and g(2, 1) > 0
    ):
        return False
    B, c = spec.B, spec.c
    cond = B[2, 0] * gamma(spec, 1, 0) + B[2, 1] * gamma(spec, 0, 1) - c[2] * beta(spec, 0, 1)
    return sign_with_tol(cond, tol) < 0


def class_29_labelling(spec):
    """Permutation ``p`` such that ``spec.permuted(p)`` meets the class-29
    inequalities in their stated labelling, or ``None``.

    Nullcline-unstable systems (any zero gamma or planar quantity) are never
    in class 29.
    """
    _require3(spec)
    tol = zero_tol(spec)
    for perm in itertools.permutations(range(3)):
        if _class_29_representative(spec.permuted(perm), tol):
            return perm
    return None


def is_class_29(spec):
    """Whether the system lies in class 29 up to relabelling the species."""
    return class_29_labelling(spec) is not None


@dataclass(frozen=True)
class CyclePattern:
    """Heteroclinic cycle between the three axial equilibria.

    ``orientation`` is ``"forward"`` (q1 -> q2 -> q3 -> q1), ``"backward"``
    (q1 -> q3 -> q2 -> q1) or ``None``.
    """

    orientation: Optional[str]
    strict: bool
    note: str = ""

    def __bool__(self):
        return self.orientation is not None


def cycle_pattern(spec):
    """Detect a May-Leonard heteroclinic cycle on the boundary of the simplex."""
    _require3(spec)
    theta = characteristic_matrix(spec)
    tol = zero_tol(spec)
    s = np.vectorize(lambda v: sign_with_tol(v, tol))(theta)
    # Forward: q_i is left towards q_{i+1} and approached from q_{i-1}.
    out_edges = [s[0, 1], s[1, 2], s[2, 0]]
    in_edges = [s[1, 0], s[0, 2], s[2, 1]]
    if all(v > 0 for v in out_edges) and all(v < 0 for v in in_edges):
        orientation = FORWARD
    elif all(v < 0 for v in out_edges) and all(v > 0 for v in in_edges):
        orientation = BACKWARD
    else:
        weak_fwd = all(v >= 0 for v in out_edges) and all(v <= 0 for v in in_edges)
        weak_bwd = all(v <= 0 for v in out_edges) and all(v >= 0 for v in in_edges)
        if weak_fwd or weak_bwd:
            return CyclePattern(None, False, "degenerate: cycle signs hold only weakly")
        return CyclePattern(None, True)
    try:
        eqs = boundary_equilibria(spec)
    except DegenerateSystem as exc:
        return CyclePattern(None, False, f"degenerate: {exc}")
    if len(eqs) != 3:
        return CyclePattern(None, True, "boundary carries non-axial equilibria")
    return CyclePattern(orientation, True)
