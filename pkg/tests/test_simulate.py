import math

import numpy as np
import pytest

from permanence import LOTKA_VOLTERRA, RICKER, SystemSpec
from permanence.simulate import (
    IntegrationError,
    IntegratorOptions,
    average_liapunov_integral,
    embed,
    empirical_permanence,
    integrate,
    interior_starts,
    restrict_to_face,
    sample_carrying_simplex,
    simplex_directions,
    unordered_violations,
)

LOGISTIC = SystemSpec([[1.0]], [1.0])


def test_logistic_closed_form():
    traj = integrate(LOGISTIC, [0.5], t_max=10.0)
    exact = 1 / (1 + math.exp(-10))
    assert traj.times[-1] == 10.0
    assert abs(traj.final[0] - exact) <= 1e-4
    assert traj.final[0] == pytest.approx(exact, abs=1e-7)


def test_tolerance_convergence():
    x1 = integrate(LOGISTIC, [0.05], rel_tol=1e-6, t_max=10).final
    x2 = integrate(LOGISTIC, [0.05], rel_tol=5e-7, t_max=10).final
    assert np.linalg.norm(x1 - x2) < 10 * 1e-6 * np.linalg.norm(x1)


def test_equilibrium_start_is_constant(symmetric):
    traj = integrate(symmetric, [0.5, 0.5, 0.5], t_max=50)
    np.testing.assert_allclose(traj.states, 0.5, rtol=1e-12)


def test_face_exactness(symmetric):
    traj = integrate(symmetric, [0.3, 0.0, 1.2], t_max=40)
    assert np.all(traj.states[:, 1] == 0.0)
    assert np.all(traj.states[:, [0, 2]] > 0)


def test_face_round_trip(symmetric):
    x0 = np.array([0.2, 0.0, 0.9])
    opts = IntegratorOptions(t_max=20, stride=0.5)
    full = integrate(symmetric, x0, opts)
    face = restrict_to_face(symmetric, (0, 2))
    lifted = embed(integrate(face, x0[[0, 2]], opts), (0, 2), 3)
    np.testing.assert_allclose(lifted.states, full.states, atol=1e-7)


def test_single_species_face_is_logistic(symmetric):
    face = restrict_to_face(symmetric, (1,))
    assert face.n == 1 and face.B[0, 0] == 1 and face.c[0] == 1


def test_stride_output_grid():
    traj = integrate(LOGISTIC, [0.5], t_max=3, stride=0.25)
    np.testing.assert_allclose(traj.times, np.arange(0, 3.0001, 0.25))


def test_flags_and_csv(tmp_path):
    traj = integrate(LOGISTIC, [0.5], t_max=2)
    for key in ("accepted_steps", "rejected_steps", "min_log_density", "near_extinction"):
        assert key in traj.flags
    text = traj.to_csv()
    assert text.splitlines()[0] == "t,x1"
    traj.to_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text() == text


def test_bad_inputs(symmetric):
    with pytest.raises(ValueError):
        integrate(symmetric, [1, -1, 1])
    with pytest.raises(ValueError):
        integrate(symmetric, [1, 1])
    with pytest.raises(ValueError):
        IntegratorOptions(rel_tol=0)


def test_step_budget_exhausted(symmetric):
    with pytest.raises(IntegrationError):
        integrate(symmetric, [0.1, 0.2, 0.3], t_max=100, max_steps=3)


def test_deep_extinction_is_not_clipped():
    spec = SystemSpec([[1, 2], [0.5, 1]], [1, 1])
    traj = integrate(spec, [0.5, 0.5], t_max=200, min_log_density=-20)
    assert traj.flags["near_extinction"] == [0]
    assert traj.log_states[-1, 0] < -20


def test_origin_is_fixed():
    traj = integrate(LOGISTIC, [0.0], t_max=5)
    assert np.all(traj.states == 0)


def test_liapunov_integral_at_equilibrium(symmetric):
    li = average_liapunov_integral(symmetric, [1, 1, 1], [1, 0, 0], t_max=10)
    np.testing.assert_allclose(li.values, li.times * 1.0, rtol=1e-9, atol=1e-12)
    assert li.slope(2, 8) == pytest.approx(1.0, rel=1e-9)


def test_liapunov_integral_is_linear_in_nu(symmetric):
    x0 = [0.1, 0.1, 0]
    a = average_liapunov_integral(symmetric, [1, 1, 1], x0, t_max=20, stride=0.5)
    b = average_liapunov_integral(symmetric, [3, 3, 3], x0, t_max=20, stride=0.5)
    np.testing.assert_allclose(b.values, 3 * a.values, rtol=1e-6, atol=1e-9)


def test_liapunov_slope_tends_to_planar_value(symmetric):
    li = average_liapunov_integral(symmetric, [1, 1, 1], [0.1, 0.1, 0], t_max=200)
    assert li.slope(100, 200) == pytest.approx(1 / 3, rel=0.05)
    assert np.all(np.diff(li.running_sup) >= 0)


def test_interior_starts_range_and_determinism(symmetric):
    a = interior_starts(symmetric, 10, seed=42)
    b = interior_starts(symmetric, 10, seed=42)
    np.testing.assert_array_equal(a, b)
    assert np.all((a >= 0.01) & (a <= 2.0))


def test_empirical_one_species():
    rep = empirical_permanence(LOGISTIC, n_samples=5, t_max=60)
    assert rep.delta_hat == pytest.approx(1.0, rel=1e-3)
    assert rep.D_hat == pytest.approx(1.0, rel=1e-3)
    assert rep.summary()["samples"] == 5


def test_empirical_failures_are_recorded(symmetric):
    rep = empirical_permanence(symmetric, n_samples=3, t_max=50, max_steps=2)
    assert set(rep.failures) == {0, 1, 2}
    assert math.isnan(rep.delta_hat)


def test_empirical_invalid_count(symmetric):
    with pytest.raises(ValueError):
        empirical_permanence(symmetric, n_samples=0)


def test_simplex_directions():
    d = simplex_directions(3, 40)
    np.testing.assert_allclose(d.sum(axis=1), 1.0)
    assert np.all(d > 0)


def test_carrying_simplex_one_species():
    spec = SystemSpec([[2.0]], [3.0])
    cloud = sample_carrying_simplex(spec, n_rays=3, t_settle=40)
    np.testing.assert_allclose(cloud.points, 1.5, rtol=1e-6)


def test_carrying_simplex_symmetric(symmetric):
    cloud = sample_carrying_simplex(symmetric, n_rays=50, t_settle=30)
    assert unordered_violations(cloud.points) == 0
    # Still spread over the surface, not yet collapsed onto (1/2, 1/2, 1/2).
    assert np.ptp(cloud.points, axis=0).max() > 0.05
    assert cloud.to_csv().splitlines()[0] == "x1,x2,x3"


def test_carrying_simplex_unordered_for_cycle(ml_perm):
    cloud = sample_carrying_simplex(ml_perm, n_rays=50, t_settle=20)
    assert unordered_violations(cloud.points) == 0


def test_long_settle_flags_converged_rays(symmetric):
    cloud = sample_carrying_simplex(symmetric, n_rays=5, t_settle=120)
    assert not cloud.unsettled.any()
    np.testing.assert_allclose(cloud.points, 0.5, atol=1e-6)


def test_scaled_lv_system_gives_same_cloud(ml_perm):
    scaled = SystemSpec(2 * ml_perm.B, 2 * ml_perm.c, LOTKA_VOLTERRA)
    # f doubles, so time runs twice as fast: settle for half as long.
    a = sample_carrying_simplex(ml_perm, n_rays=10, t_settle=6)
    b = sample_carrying_simplex(scaled, n_rays=10, t_settle=3)
    np.testing.assert_allclose(b.points, a.points, rtol=1e-5, atol=1e-8)


def test_unordered_violations_counts_pairs():
    assert unordered_violations([[1, 0], [0, 1]]) == 0
    assert unordered_violations([[1, 1], [0.5, 0.5]]) == 1
    assert unordered_violations([[1, 1], [1, 1]]) == 0


def test_ricker_integrates(symmetric):
    traj = integrate(symmetric.with_family(RICKER), [0.2, 0.3, 0.4], t_max=80)
    np.testing.assert_allclose(traj.final, 0.5, atol=1e-4)
