"""Cross-check two verdicts by long integrations.

Permanent: the smallest density after a transient stays well above zero.
Impermanent: orbits drift towards the attracting heteroclinic cycle, so
densities reach values far below anything a linear-coordinate integrator
could represent.  Integration in log coordinates keeps them exact.
"""
import math

import numpy as np

from permanence import analyze, may_leonard
from permanence.simulate import empirical_permanence, integrate

for a, b in [(0.8, 1.1), (0.8, 1.3)]:
    spec = may_leonard(a, b)
    verdict = analyze(spec).outcome
    rep = empirical_permanence(spec, n_samples=5, t_max=2000)
    lowest = np.nanmin(rep.min_log) / math.log(10)
    print(f"alpha={a}, beta={b}: {verdict:12s} lowest density ~ 10^{lowest:.1f}")

# A single impermanent orbit: the time spent near each vertex grows.
traj = integrate(may_leonard(0.8, 1.3), [0.3, 0.2, 0.1], t_max=1500, stride=1.0)
leader = np.argmax(traj.log_states, axis=1)
switches = traj.times[1:][np.diff(leader) != 0]
print("\nleader changes at t =", np.round(switches[:12], 1))
print("gaps between changes:", np.round(np.diff(switches[:12]), 1))
