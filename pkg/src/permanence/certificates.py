"""Average-Liapunov certificates and the permanence verdict.

With ``V(x) = prod_i x_i**nu_i`` the logarithmic derivative of ``V`` along
orbits is ``g(x) = sum_i nu_i f_i(x)``.  For up to three species every limit
set on the boundary of the carrying simplex is an equilibrium, so a weight
vector ``nu >> 0`` with ``g > 0`` (``g < 0``) at every boundary equilibrium
proves permanence (impermanence).  Finding ``nu`` is a small linear program.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .equilibria import DegenerateSystem, boundary_equilibria, characteristic_matrix
from .lp import OPTIMAL, LPError, linprog_max
from .model import check, sign_with_tol
from .nullclines import (
    beta,
    class_29_labelling,
    cycle_pattern,
    gamma,
    sign_configuration,
    zero_tol,
)

__all__ = [
    "PERMANENCE",
    "IMPERMANENCE",
    "ConstraintSystem",
    "Certificate",
    "Infeasible",
    "Verdict",
    "build_constraints",
    "find_certificate",
    "rho",
    "boundary_attractor",
    "analyze",
]

log = logging.getLogger(__name__)

PERMANENCE = "permanence"
IMPERMANENCE = "impermanence"

PERMANENT = "Permanent"
IMPERMANENT = "Impermanent"
DEGENERATE = "Degenerate"
INCONCLUSIVE = "Inconclusive"

WEIGHT_BOUND = 1e6
T_MIN_REL = 1e-8


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """One row ``(f_1(x), ..., f_n(x))`` per boundary equilibrium ``x``."""

    rows: np.ndarray
    labels: tuple

    @property
    def scale(self):
        return max(float(np.abs(self.rows).max(initial=0.0)), 1e-300)

    def evaluate(self, nu):
        return self.rows @ np.asarray(nu, dtype=float)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Weights ``nu >= 1`` with every row sum ``>= margin`` (or ``<= -margin``)."""

    nu: np.ndarray
    margin: float
    direction: str
    feasible = True

    def verify(self, cs):
        """Recompute the margin directly from the constraint rows."""
        vals = cs.evaluate(self.nu)
        return float(vals.min() if self.direction == PERMANENCE else (-vals).min())


@dataclass(frozen=True)
class Infeasible:
    """No certificate inside the weight box; ``t`` is the best LP value."""

    direction: str
    t: float
    degenerate: bool = False
    box_limited: bool = False
    note: str = ""
    feasible = False


def build_constraints(spec, equilibria=None):
    """Constraint rows over all boundary equilibria (n <= 3).

    Raises
    ------
    DegenerateSystem
        If a support solve is degenerate.
    """
    check(spec)
    if spec.n > 3:
        raise ValueError("boundary limit sets need not be equilibria for n > 3")
    eqs = boundary_equilibria(spec) if equilibria is None else equilibria
    rows = np.array([e.row(spec.n) for e in eqs]).reshape(len(eqs), spec.n)
    return ConstraintSystem(rows, tuple(e.support for e in eqs))


def _max_margin(R, lower):
    """max t s.t. R mu >= t, lower <= mu_i <= 1.  Returns (t, mu)."""
    m, n = R.shape
    shift = float(np.abs(R).sum(axis=1).max()) + 1.0
    # Variables: mu' = mu - lower in [0, 1 - lower], s = t + shift >= 0.
    A = np.zeros((m + n, n + 1))
    b = np.zeros(m + n)
    A[:m, :n] = -R
    A[:m, n] = 1.0
    b[:m] = shift + lower * R.sum(axis=1)
    A[m:, :n] = np.eye(n)
    b[m:] = 1.0 - lower
    cost = np.zeros(n + 1)
    cost[n] = 1.0
    res = linprog_max(cost, A, b)
    if res.status != OPTIMAL:
        raise LPError(f"certificate LP ended with status {res.status}")
    mu = res.x[:n] + lower
    return res.x[n] - shift, mu


def find_certificate(cs, direction=PERMANENCE, upper=WEIGHT_BOUND):
    """Search for weights certifying ``direction`` over ``cs``.

    Solves ``max t`` subject to ``row . nu >= t`` for every row (rows negated
    for impermanence) with weight ratios bounded by ``upper``.  The returned
    weights are rescaled so that ``min(nu) = 1``.

    Returns
    -------
    Certificate or Infeasible
    """
    if direction not in (PERMANENCE, IMPERMANENCE):
        raise ValueError(f"unknown direction {direction!r}")
    if cs.rows.shape[0] == 0:
        raise ValueError("constraint system has no rows")
    R = cs.rows if direction == PERMANENCE else -cs.rows
    t_min = T_MIN_REL * cs.scale
    t, mu = _max_margin(R, 1.0 / upper)
    if t > t_min:
        nu = mu / mu.min()
        margin = float((R @ nu).min())
        return Certificate(nu, margin, direction)
    if t > 0:
        return Infeasible(direction, t, degenerate=True, note="margin below resolution")
    # Would a certificate exist with unbounded weight ratios?
    t_open, _ = _max_margin(R, 0.0)
    if t_open > t_min:
        return Infeasible(
            direction, t, box_limited=True,
            note=f"certificate needs weight ratios beyond {upper:g}",
        )
    return Infeasible(direction, t)


def rho(spec):
    """``theta_12 theta_23 theta_31 + theta_21 theta_13 theta_32`` (n = 3)."""
    check(spec)
    if spec.n != 3:
        raise ValueError("rho is defined for n = 3")
    th = characteristic_matrix(spec)
    return float(th[0, 1] * th[1, 2] * th[2, 0] + th[1, 0] * th[0, 2] * th[2, 1])


def boundary_attractor(spec, equilibria=None):
    """A boundary equilibrium that attracts within the simplex, or ``None``.

    Axial ``q_i`` qualifies when both invasion rates are negative; a planar
    ``v_k`` when it is stable in its plane (``beta_ij > 0``) and
    ``f_k(v_k) < 0``.
    """
    check(spec)
    if spec.n != 3:
        raise ValueError("boundary_attractor is defined for n = 3")
    eqs = boundary_equilibria(spec) if equilibria is None else equilibria
    tol = zero_tol(spec)
    for e in eqs:
        ext = list(e.external_eigs.values())
        if not all(sign_with_tol(v, tol) < 0 for v in ext):
            continue
        if e.is_axial:
            return e
        i, j = e.support
        if sign_with_tol(beta(spec, i, j), tol) > 0:
            return e
    return None


@dataclass
class Verdict:
    """Outcome plus the ordered chain of findings that produced it."""

    outcome: str
    evidence: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    certificate: Optional[Certificate] = None
    rho: Optional[float] = None

    @property
    def nu(self):
        return None if self.certificate is None else self.certificate.nu

    @property
    def margin(self):
        return None if self.certificate is None else self.certificate.margin

    def to_dict(self):
        return {
            "outcome": self.outcome,
            "nu": None if self.nu is None else [float(v) for v in self.nu],
            "margin": self.margin,
            "rho": self.rho,
            "evidence": self.evidence,
            "notes": self.notes,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def _cert_evidence(c):
    return {
        "kind": "certificate",
        "direction": c.direction,
        "nu": [float(v) for v in c.nu],
        "margin": float(c.margin),
    }


def _analyze_two(spec, eqs, v):
    g12, g21 = gamma(spec, 0, 1), gamma(spec, 1, 0)
    v.evidence.append({"kind": "two-species rule", "gamma_12": g12, "gamma_21": g21})
    if g12 > 0 and g21 > 0:
        v.outcome = PERMANENT
        cert = find_certificate(build_constraints(spec, eqs), PERMANENCE)
        if cert.feasible:
            v.certificate = cert
            v.evidence.append(_cert_evidence(cert))
    else:
        winner = 0 if g12 < 0 else 1
        v.outcome = IMPERMANENT
        v.evidence.append(
            {"kind": "boundary attractor", "support": [winner], "x": eqs[winner].x.tolist()}
        )
    return v


def _analyze_three(spec, eqs, v):
    cfg = sign_configuration(spec)
    v.evidence.append({"kind": "sign configuration", **cfg.to_dict()})
    if not cfg.nullcline_stable:
        v.outcome = DEGENERATE
        v.notes.append("system is not nullcline stable")
        return v

    labelling = class_29_labelling(spec)
    if labelling is not None:
        v.evidence.append({"kind": "class 29", "labelling": list(labelling)})
    pattern = cycle_pattern(spec)
    if pattern:
        v.rho = rho(spec)
        v.evidence.append(
            {"kind": "heteroclinic cycle", "orientation": pattern.orientation, "rho": v.rho}
        )

    cs = build_constraints(spec, eqs)
    perm = find_certificate(cs, PERMANENCE)
    imp = find_certificate(cs, IMPERMANENCE)
    if perm.feasible and imp.feasible:
        v.outcome = DEGENERATE
        v.notes.append("both certificate directions feasible")
        return v
    attractor = boundary_attractor(spec, eqs)
    if perm.feasible and attractor is not None:
        v.outcome = DEGENERATE
        v.notes.append("permanence certificate contradicts a boundary attractor")
        return v
    for res in (perm, imp):
        if res.feasible:
            v.evidence.append(_cert_evidence(res))
        else:
            v.evidence.append(
                {"kind": "no certificate", "direction": res.direction, "t": float(res.t)}
            )
            if res.note:
                v.notes.append(f"{res.direction}: {res.note}")
    if attractor is not None:
        v.evidence.append(
            {
                "kind": "boundary attractor",
                "support": list(attractor.support),
                "x": attractor.x.tolist(),
            }
        )

    if perm.feasible:
        v.outcome, v.certificate = PERMANENT, perm
    elif imp.feasible:
        v.outcome, v.certificate = IMPERMANENT, imp
    elif attractor is not None:
        v.outcome = IMPERMANENT
    elif pattern:
        if abs(v.rho) <= 1e-10 * spec.scale():
            v.outcome = INCONCLUSIVE
            v.notes.append("rho is zero within tolerance")
        else:
            v.outcome = PERMANENT if v.rho > 0 else IMPERMANENT
            v.evidence.append({"kind": "rho criterion", "rho": v.rho})
    else:
        v.outcome = INCONCLUSIVE
        v.notes.append("no certificate, attractor or cycle criterion applies")
    return v


def analyze(spec, diagnostics=None):
    """Decide permanence of ``spec``.

    Parameters
    ----------
    spec : SystemSpec
    diagnostics : dict, optional
        For ``n >= 4`` only: keyword arguments for
        :func:`permanence.simulate.empirical_permanence`, whose report is
        attached as evidence.  No analytic verdict is issued for ``n >= 4``.

    Returns
    -------
    Verdict
    """
    check(spec)
    v = Verdict(INCONCLUSIVE)
    n = spec.n
    if n == 1:
        v.outcome = PERMANENT
        v.evidence.append({"kind": "one-species rule"})
        v.notes.append("the axial equilibrium attracts the open half-line")
        return v
    if n >= 4:
        v.notes.append("boundary limit sets need not be equilibria for n >= 4")
        if diagnostics is not None:
            from .simulate import empirical_permanence

            rep = empirical_permanence(spec, **diagnostics)
            v.evidence.append({"kind": "simulation", **rep.summary()})
        return v

    try:
        eqs = boundary_equilibria(spec)
    except DegenerateSystem as exc:
        v.outcome = DEGENERATE
        v.evidence.append(
            {"kind": "degenerate solve", "supports": [list(s.support) for s in exc.solves]}
        )
        v.notes.append(str(exc))
        return v

    tol = zero_tol(spec)
    ties = [
        (list(e.support), j)
        for e in eqs
        for j, val in e.external_eigs.items()
        if sign_with_tol(val, tol) == 0
    ]
    if ties:
        v.outcome = DEGENERATE
        v.evidence.append({"kind": "sign tie", "at": [[s, j] for s, j in ties]})
        v.notes.append("an invasion rate vanishes at a boundary equilibrium")
        return v

    v = _analyze_two(spec, eqs, v) if n == 2 else _analyze_three(spec, eqs, v)
    log.debug("analyze: %s (%d findings)", v.outcome, len(v.evidence))
    return v
