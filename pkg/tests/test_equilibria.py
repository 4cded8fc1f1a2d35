from fractions import Fraction

import numpy as np
import pytest

from permanence import (
    BUILTIN_FAMILIES,
    SystemSpec,
    per_capita,
)
from permanence.equilibria import (
    DegenerateSolve,
    DegenerateSystem,
    all_equilibria,
    axial_equilibria,
    boundary_equilibria,
    characteristic_matrix,
    equilibrium_on_support,
)
from permanence.nullclines import beta, gamma

from .conftest import random_specs


def _exact_solve(B, c):
    """Gauss-Jordan elimination over the rationals."""
    n = len(c)
    M = [[Fraction(B[i][j]) for j in range(n)] + [Fraction(c[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                k = M[r][col] / M[col][col]
                M[r] = [a - k * b for a, b in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def test_symmetric_planar_equilibrium(symmetric):
    v3 = equilibrium_on_support(symmetric, (0, 1))
    np.testing.assert_allclose(v3.x, [2 / 3, 2 / 3, 0], rtol=1e-14)
    assert v3.external_eigs[2] == pytest.approx(1 / 3, rel=1e-13)


def test_symmetric_has_six_boundary_equilibria(symmetric):
    eqs = boundary_equilibria(symmetric)
    assert [e.support for e in eqs] == [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]
    interior = all_equilibria(symmetric)[-1]
    assert interior.support == (0, 1, 2)
    np.testing.assert_allclose(interior.x, [0.5, 0.5, 0.5], rtol=1e-14)


def test_may_leonard_boundary_is_axial_only(ml_perm):
    eqs = boundary_equilibria(ml_perm)
    assert len(eqs) == 3 and all(e.is_axial for e in eqs)
    assert equilibrium_on_support(ml_perm, (0, 1)) is None


def test_matches_exact_rational_solve():
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(200):
        B = rng.integers(1, 9, (3, 3)) / 4
        c = rng.integers(1, 9, 3) / 4
        spec = SystemSpec(B, c)
        for support in [(0, 1), (0, 2), (1, 2), (0, 1, 2)]:
            res = equilibrium_on_support(spec, support)
            idx = list(support)
            sub = [[B[i][j] for j in idx] for i in idx]
            try:
                exact = _exact_solve(sub, [c[i] for i in idx])
            except StopIteration:  # singular block
                assert isinstance(res, DegenerateSolve)
                continue
            if all(v > 0 for v in exact) and min(exact) > 1e-6:
                np.testing.assert_allclose(res.x[idx], [float(v) for v in exact], rtol=1e-12)
                checked += 1
            elif any(v < 0 for v in exact) and min(exact) < -1e-6:
                assert res is None
    assert checked > 50


@pytest.mark.parametrize("family", BUILTIN_FAMILIES, ids=lambda f: f.tag)
def test_support_residuals(family):
    for spec in random_specs(100, seed=11, family=family):
        try:
            eqs = all_equilibria(spec)
        except DegenerateSystem:
            continue
        tol = 1e-10 * (1 + np.abs(spec.c).max())
        for e in eqs:
            f = per_capita(spec, e.x)
            assert np.max(np.abs(f[list(e.support)])) <= tol


def test_axial_count():
    for spec in random_specs(20, seed=5):
        axes = axial_equilibria(spec)
        assert len(axes) == 3
        for i, e in enumerate(axes):
            assert e.support == (i,)
            assert e.x[i] == spec.c[i] / spec.B[i, i]


def test_characteristic_matrix_may_leonard(ml_perm):
    expected = [[0, -0.1, 0.2], [0.2, 0, -0.1], [-0.1, 0.2, 0]]
    np.testing.assert_allclose(characteristic_matrix(ml_perm), expected, atol=1e-14)


def test_characteristic_matrix_signs_follow_gamma():
    for spec in random_specs(50, seed=8):
        for fam in BUILTIN_FAMILIES:
            th = characteristic_matrix(spec.with_family(fam))
            assert np.all(np.diag(th) == 0)
            for i in range(3):
                for j in range(3):
                    if i != j:
                        assert np.sign(th[i, j]) == np.sign(gamma(spec, i, j))


def test_external_signs_family_independent():
    for spec in random_specs(100, seed=21):
        try:
            ref = boundary_equilibria(spec)
        except DegenerateSystem:
            continue
        ref_signs = [(e.support, {j: np.sign(v) for j, v in e.external_eigs.items()}) for e in ref]
        for fam in BUILTIN_FAMILIES[1:]:
            other = boundary_equilibria(spec.with_family(fam))
            got = [(e.support, {j: np.sign(v) for j, v in e.external_eigs.items()}) for e in other]
            assert got == ref_signs


def test_planar_invasion_closed_form():
    found = 0
    for spec in random_specs(200, seed=2):
        v3 = equilibrium_on_support(spec, (0, 1))
        if not hasattr(v3, "x"):
            continue
        B, c = spec.B, spec.c
        b12 = beta(spec, 0, 1)
        closed = (c[2] * b12 - B[2, 0] * gamma(spec, 1, 0) - B[2, 1] * gamma(spec, 0, 1)) / b12
        assert v3.external_eigs[2] == pytest.approx(closed, rel=1e-9, abs=1e-12)
        found += 1
    assert found > 20


def test_singular_block_is_degenerate():
    # Rows (1, 1) and (1, 1): a consistent continuum of planar equilibria.
    spec = SystemSpec([[1, 1, 0.5], [1, 1, 0.5], [0.5, 0.5, 1]], [1, 1, 1])
    assert isinstance(equilibrium_on_support(spec, (0, 1)), DegenerateSolve)
    with pytest.raises(DegenerateSystem):
        boundary_equilibria(spec)


def test_component_in_tolerance_band_is_degenerate():
    # gamma_12 = 0: the planar solve lands exactly on the axis.
    spec = SystemSpec([[1, 0.5], [1, 1]], [1, 1])
    assert isinstance(equilibrium_on_support(spec, (0, 1)), DegenerateSolve)


def test_to_dict_shape(symmetric):
    d = boundary_equilibria(symmetric)[3].to_dict()
    assert d["support"] == [0, 1]
    assert set(d["external_eigs"]) == {"2"}
