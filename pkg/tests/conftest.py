import numpy as np
import pytest

from permanence import LOTKA_VOLTERRA, SystemSpec, may_leonard

SYMMETRIC_B = [[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]]
STRONG_B = [[1, 2, 2], [2, 1, 2], [2, 2, 1]]


@pytest.fixture
def symmetric():
    return SystemSpec(SYMMETRIC_B, [1, 1, 1])


@pytest.fixture
def strong():
    return SystemSpec(STRONG_B, [1, 1, 1])


@pytest.fixture
def ml_perm():
    return may_leonard(0.8, 1.1)


@pytest.fixture
def ml_imperm():
    return may_leonard(0.8, 1.3)


def _random_params(rng, size):
    B = rng.uniform(0.2, 2.0, (size, 3, 3))
    for i in range(3):
        B[:, i, i] = rng.uniform(0.5, 1.5, size)
    c = rng.uniform(0.5, 1.5, (size, 3))
    return B, c


def _gammas(B, c):
    """gamma_ij = b_ii c_j - b_ji c_i, computed directly from the parameters."""
    return {
        (i, j): B[:, i, i] * c[:, j] - B[:, j, i] * c[:, i]
        for i in range(3)
        for j in range(3)
        if i != j
    }


def class29_samples(count, seed=0, margin=1e-3):
    """Rejection-sample parameters meeting the seven class-29 inequalities.

    The inequalities are checked by direct arithmetic here, independently of
    the package.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        B, c = _random_params(rng, 20000)
        g = _gammas(B, c)
        b12 = B[:, 0, 0] * B[:, 1, 1] - B[:, 0, 1] * B[:, 1, 0]
        cond = B[:, 2, 0] * g[1, 0] + B[:, 2, 1] * g[0, 1] - c[:, 2] * b12
        ok = (
            (g[0, 1] > margin) & (g[0, 2] > margin) & (g[1, 0] > margin)
            & (g[1, 2] < -margin) & (g[2, 0] < -margin) & (g[2, 1] > margin)
            & (cond < -margin)
        )
        for k in np.flatnonzero(ok):
            out.append((B[k], c[k]))
            if len(out) == count:
                break
    return out


def cycle_samples(count, seed=0, margin=1e-3):
    """Parameters whose axial invasion signs form a May-Leonard cycle."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        B, c = _random_params(rng, 20000)
        g = _gammas(B, c)
        fwd = [g[0, 1], g[1, 2], g[2, 0]]
        bwd = [g[1, 0], g[0, 2], g[2, 1]]
        ok = np.ones(B.shape[0], dtype=bool)
        sig = np.ones(B.shape[0])
        sig[rng.random(B.shape[0]) < 0.5] = -1
        ok = np.all([sig * v > margin for v in fwd], axis=0) & np.all(
            [sig * v < -margin for v in bwd], axis=0
        )
        for k in np.flatnonzero(ok):
            out.append((B[k], c[k]))
            if len(out) == count:
                break
    return out


def random_specs(count, seed=0, family=LOTKA_VOLTERRA):
    rng = np.random.default_rng(seed)
    B, c = _random_params(rng, count)
    return [SystemSpec(B[k], c[k], family) for k in range(count)]
