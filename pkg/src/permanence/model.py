"""Competitive Kolmogorov systems with linearly determined nullclines.

A system has the form

    dx_i/dt = x_i * f(c_i, (B x)_i),   i = 1..n

where every b_ij > 0, every c_i > 0 and the per-capita law f(r, y) satisfies

    f(r, r) = 0,   df/dy < 0,   y * f(r, y) -> 0 as y -> 0+.

Four classical laws are built in (Lotka-Volterra, Gompertz, Leslie-Gower,
Ricker); arbitrary laws can be supplied as a :class:`GrowthFamily` with
``tag="custom"``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = [
    "GrowthFamily",
    "SystemSpec",
    "SpecError",
    "DomainError",
    "LOTKA_VOLTERRA",
    "GOMPERTZ",
    "LESLIE_GOWER",
    "RICKER",
    "BUILTIN_FAMILIES",
    "family_from_name",
    "growth_rate",
    "growth_rate_dy",
    "per_capita",
    "vector_field",
    "jacobian",
    "validate",
    "check",
    "may_leonard",
]


class SpecError(ValueError):
    """Invalid system specification; ``errors`` lists every violation."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class DomainError(ValueError):
    """A growth law was evaluated outside its domain."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


def _lv(r, y):
    return r - y


def _lv_dy(r, y):
    return -np.ones_like(np.asarray(y, dtype=float))


def _gompertz(r, y):
    # log1p keeps the sign of r - y exact; the split form survives tiny y.
    with np.errstate(over="ignore"):
        near = np.log1p((r - y) / y)
    return np.where(np.isfinite(near), near, np.log(r) - np.log(y))


def _gompertz_dy(r, y):
    return -1.0 / y


def _lg(r, y):
    # Same as (1 + r)/(1 + y) - 1 without cancellation.
    return (r - y) / (1.0 + y)


def _lg_dy(r, y):
    return -(1.0 + r) / (1.0 + y) ** 2


def _ricker(r, y):
    return np.expm1(r - y)


def _ricker_dy(r, y):
    return -np.exp(r - y)


@dataclass(frozen=True)
class GrowthFamily:
    """Per-capita growth law ``f(r, y)``.

    Parameters
    ----------
    tag : str
        One of ``lotka_volterra``, ``gompertz``, ``leslie_gower``, ``ricker``
        or ``custom``.
    f : callable
        Vectorised evaluator ``f(r, y)``.
    dfdy : callable, optional
        Partial derivative in ``y``.  When missing, a central difference is
        used.
    formula : str
        Human readable formula, used by listings.
    finite_at_zero : bool
        Whether ``f(r, 0)`` is finite, i.e. the law may be evaluated at y = 0.
    """

    tag: str
    f: Callable = field(repr=False)
    dfdy: Optional[Callable] = field(default=None, repr=False)
    formula: str = ""
    finite_at_zero: bool = True

    @property
    def builtin(self):
        return self.tag in _BUILTIN_TAGS

    def __reduce__(self):
        # Built-ins pickle by name so they can cross process boundaries.
        if self.builtin:
            return (family_from_name, (self.tag,))
        return object.__reduce__(self)


LOTKA_VOLTERRA = GrowthFamily("lotka_volterra", _lv, _lv_dy, "f(r,y) = r − y")
GOMPERTZ = GrowthFamily(
    "gompertz", _gompertz, _gompertz_dy, "f(r,y) = ln(r/y)", finite_at_zero=False
)
LESLIE_GOWER = GrowthFamily(
    "leslie_gower", _lg, _lg_dy, "f(r,y) = (1+r)/(1+y) − 1"
)
RICKER = GrowthFamily("ricker", _ricker, _ricker_dy, "f(r,y) = exp(r−y) − 1")

BUILTIN_FAMILIES = (LOTKA_VOLTERRA, GOMPERTZ, LESLIE_GOWER, RICKER)
_BUILTIN_TAGS = {fam.tag: fam for fam in BUILTIN_FAMILIES}
_ALIASES = {
    "lv": "lotka_volterra",
    "lotkavolterra": "lotka_volterra",
    "lotka-volterra": "lotka_volterra",
    "lesliegower": "leslie_gower",
    "leslie-gower": "leslie_gower",
    "lg": "leslie_gower",
}


def family_from_name(name):
    """Look up a built-in family by tag (case-insensitive, common aliases)."""
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    try:
        return _BUILTIN_TAGS[key]
    except KeyError:
        raise SpecError([f"unknown growth family {name!r}"]) from None


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """A competitive system ``x_i' = x_i f(c_i, (Bx)_i)``.

    ``B`` and ``c`` are stored as read-only float arrays.  Construction only
    checks shapes; use :func:`validate` for the full positivity and axiom
    checks.
    """

    B: np.ndarray
    c: np.ndarray
    family: GrowthFamily = LOTKA_VOLTERRA

    def __post_init__(self):
        B = np.array(self.B, dtype=float, copy=True)
        c = np.array(self.c, dtype=float, copy=True).reshape(-1)
        if B.ndim == 0:
            B = B.reshape(1, 1)
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise SpecError([f"B must be a square matrix, got shape {B.shape}"])
        if c.shape[0] != B.shape[0]:
            raise SpecError(
                [f"c has length {c.shape[0]} but B is {B.shape[0]}x{B.shape[0]}"]
            )
        if B.shape[0] < 1:
            raise SpecError(["n must be at least 1"])
        if isinstance(self.family, str):
            object.__setattr__(self, "family", family_from_name(self.family))
        B.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return self.c.shape[0]

    def with_family(self, family):
        return SystemSpec(self.B, self.c, family)

    def permuted(self, perm):
        """Relabel species so that new species ``k`` is old species ``perm[k]``."""
        p = np.asarray(perm)
        return SystemSpec(self.B[np.ix_(p, p)], self.c[p], self.family)

    def scale(self):
        """Magnitude used for relative zero tests: ``1 + |B|_inf * |c|_inf``."""
        return 1.0 + np.abs(self.B).sum(axis=1).max() * np.abs(self.c).max()

    def __eq__(self, other):
        if not isinstance(other, SystemSpec):
            return NotImplemented
        return (
            self.family == other.family
            and np.array_equal(self.B, other.B)
            and np.array_equal(self.c, other.c)
        )

    def __hash__(self):
        return hash((self.family.tag, self.B.tobytes(), self.c.tobytes()))

    # -- serialisation -------------------------------------------------
    def to_dict(self):
        if not self.family.builtin:
            raise SpecError(["custom growth families are not serialisable"])
        return {
            "n": self.n,
            "family": self.family.tag,
            "b": self.B.tolist(),
            "c": self.c.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        errors = []
        if not isinstance(data, dict):
            raise SpecError(["system spec must be a JSON object"])
        for key in ("b", "c"):
            if key not in data:
                errors.append(f"missing key {key!r}")
        if errors:
            raise SpecError(errors)
        try:
            B = np.array(data["b"], dtype=float)
            c = np.array(data["c"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SpecError([f"non-numeric entries: {exc}"]) from None
        spec = cls(B, c, family_from_name(data.get("family", "lotka_volterra")))
        if "n" in data and int(data["n"]) != spec.n:
            raise SpecError([f"n={data['n']} does not match matrix size {spec.n}"])
        return spec

    @classmethod
    def from_json(cls, text):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError([f"malformed JSON: {exc}"]) from None
        return cls.from_dict(data)


def may_leonard(alpha, beta, family=LOTKA_VOLTERRA):
    """Cyclic competition ``B = [[1, a, b], [b, 1, a], [a, b, 1]]`` with ``c = 1``."""
    a, b = alpha, beta
    return SystemSpec([[1, a, b], [b, 1, a], [a, b, 1]], [1, 1, 1], family)


def _check_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise DomainError("non-finite input to growth law")


def growth_rate(family, r, y):
    """Evaluate the per-capita law ``f(r, y)``.

    ``y = 0`` is accepted for laws with a finite limit at zero (all built-ins
    except Gompertz).  Works elementwise on arrays.

    >>> float(growth_rate(LESLIE_GOWER, 3.0, 1.0))
    1.0
    """
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_finite(r, y)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    if np.any(y < 0):
        raise DomainError("y must be nonnegative")
    if not family.finite_at_zero and np.any(y == 0):
        raise DomainError(f"{family.tag}: f(r, y) is undefined at y = 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.asarray(family.f(r, y), dtype=float)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{family.tag}: growth law returned a non-finite value")
    return out if out.ndim else out[()]


def growth_rate_dy(family, r, y):
    """Partial derivative ``df/dy``; central differences for custom laws."""
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    if family.dfdy is not None:
        out = np.asarray(family.dfdy(r, y), dtype=float)
    else:
        h = 1e-6 * np.maximum(np.abs(y), 1e-3)
        lo = np.maximum(y - h, y * 0.5)
        hi = y + h
        out = (np.asarray(family.f(r, hi)) - np.asarray(family.f(r, lo))) / (hi - lo)
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{family.tag}: derivative evaluation failed")
    return out if out.ndim else out[()]


def _as_state(spec, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != spec.n:
        raise ValueError(f"state has length {x.shape[0]}, expected {spec.n}")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("state must be finite and componentwise nonnegative")
    return x


def per_capita(spec, x):
    """Per-capita growth rates ``f(c_i, (Bx)_i)`` for every species."""
    x = _as_state(spec, x)
    y = spec.B @ x
    if not spec.family.finite_at_zero:
        bad = np.flatnonzero(y <= 0)
        if bad.size:
            i = int(bad[0])
            raise DomainError(
                f"{spec.family.tag}: (Bx)_{i + 1} = 0, growth rate undefined", index=i
            )
    return np.asarray(growth_rate(spec.family, spec.c, y), dtype=float).reshape(-1)


def vector_field(spec, x):
    """Right-hand side ``x_i f_i(x)``, exactly zero where ``x_i = 0``."""
    x = _as_state(spec, x)
    out = np.zeros(spec.n)
    live = x > 0
    if not live.any():
        return out
    y = spec.B[live] @ x
    out[live] = x[live] * np.asarray(
        growth_rate(spec.family, spec.c[live], y), dtype=float
    ).reshape(-1)
    return out


def jacobian(spec, x):
    """Jacobian ``J_ij = delta_ij f_i + x_i f_y(c_i, (Bx)_i) b_ij``.

    Rows of species absent from the state reduce to ``f_i e_i``, so the
    off-support diagonal entries are the external eigenvalues.
    """
    x = _as_state(spec, x)
    y = spec.B @ x
    f = per_capita(spec, x)
    dfdy = np.asarray(growth_rate_dy(spec.family, spec.c, y), dtype=float).reshape(-1)
    return np.diag(f) + (x * dfdy)[:, None] * spec.B


# Sampling grids for custom-law axiom checks.  The small-y limit is probed
# only for moderate r: at fixed y = 1e-9 an exponential law such as Ricker
# exceeds the threshold once e^r ~ 1e3 (r ~ 7).
_AXIOM_GRID = np.logspace(-3, 3, 13)
_LIMIT_GRID = np.geomspace(1e-3, 5.0, 9)
_MONOTONE_GRID = np.logspace(-3, 3, 61)


def _check_custom_axioms(family):
    errors = []
    r = _AXIOM_GRID
    try:
        with np.errstate(all="ignore"):
            diag = np.asarray(family.f(r, r), dtype=float)
    except Exception as exc:  # user code
        return [f"{family.tag}: evaluator raised {exc!r}"]
    if not np.all(np.isfinite(diag)):
        errors.append(f"{family.tag}: evaluator returned non-finite values")
    elif np.max(np.abs(diag)) > 1e-12:
        k = int(np.argmax(np.abs(diag)))
        errors.append(
            f"{family.tag}: axiom f(r,r)=0 violated at r={r[k]:.3g} "
            f"(f={diag[k]:.3g})"
        )
    try:
        with np.errstate(all="ignore"):
            if family.dfdy is not None:
                rr, yy = np.meshgrid(r, r, indexing="ij")
                bad = ~(np.asarray(family.dfdy(rr, yy), dtype=float) < 0)
            else:
                rr, yy = np.meshgrid(r, _MONOTONE_GRID, indexing="ij")
                vals = np.asarray(family.f(rr, yy), dtype=float)
                bad = np.zeros(rr.shape, dtype=bool)
                bad[:, :-1] = ~(np.diff(vals, axis=1) < 0)
    except Exception as exc:
        errors.append(f"{family.tag}: derivative evaluation failed ({exc!r})")
    else:
        if bad.any():
            k = np.unravel_index(int(np.argmax(bad)), bad.shape)
            errors.append(
                f"{family.tag}: axiom df/dy<0 violated at "
                f"(r,y)=({rr[k]:.3g},{yy[k]:.3g})"
            )
    rl = _LIMIT_GRID
    try:
        with np.errstate(all="ignore"):
            tail = np.abs(1e-9 * np.asarray(family.f(rl, np.full_like(rl, 1e-9)), dtype=float))
    except Exception as exc:
        errors.append(f"{family.tag}: evaluator raised {exc!r} near y=0")
    else:
        if not np.all(tail < 1e-6):
            errors.append(f"{family.tag}: axiom y*f(r,y)->0 as y->0 violated")
    return errors


def validate(spec):
    """Return a list of every violation in ``spec`` (empty when valid)."""
    errors = []
    B, c = spec.B, spec.c
    for i, j in zip(*np.nonzero(~np.isfinite(B))):
        errors.append(f"b[{i + 1}][{j + 1}] must be finite")
    for i, j in zip(*np.nonzero(np.isfinite(B) & (B <= 0))):
        errors.append(f"b[{i + 1}][{j + 1}] must be strictly positive")
    for i in np.flatnonzero(~np.isfinite(c)):
        errors.append(f"c[{i + 1}] must be finite")
    for i in np.flatnonzero(np.isfinite(c) & (c <= 0)):
        errors.append(f"c[{i + 1}] must be strictly positive")
    if not spec.family.builtin:
        errors.extend(_check_custom_axioms(spec.family))
    return errors


def check(spec):
    """Return ``spec`` unchanged, or raise :class:`SpecError` listing violations."""
    errors = validate(spec)
    if errors:
        raise SpecError(errors)
    return spec


def sign_with_tol(value, tol):
    """-1, 0 or +1 with ``|value| <= tol`` counted as zero."""
    if math.isnan(value):
        raise ValueError("sign of NaN")
    if abs(value) <= tol:
        return 0
    return 1 if value > 0 else -1
