"""A permanent system without a heteroclinic cycle.

Here one planar equilibrium sits on the boundary and the other two faces
carry only axial states.  Permanence follows from weights where the third
species gets a small weight; the certificate LP finds them.
"""
import numpy as np

from permanence import SystemSpec, analyze
from permanence.nullclines import class_29_labelling, gamma, sign_configuration

# Found by rejection sampling; every defining inequality holds strictly.
rng = np.random.default_rng(1)
while True:
    B = rng.uniform(0.2, 2.0, (3, 3))
    B[np.diag_indices(3)] = rng.uniform(0.5, 1.5, 3)
    spec = SystemSpec(B, rng.uniform(0.5, 1.5, 3))
    if class_29_labelling(spec) == (0, 1, 2):
        break

np.set_printoptions(precision=3, suppress=True)
print("B =\n", spec.B)
print("c =", spec.c)
cfg = sign_configuration(spec)
print("gamma signs:", cfg.to_dict()["gamma_signs"])
print("gamma_12 = %.3f, gamma_23 = %.3f" % (gamma(spec, 0, 1), gamma(spec, 1, 2)))

v = analyze(spec)
print("\noutcome:", v.outcome)
print("weights nu =", v.nu, " margin =", round(v.margin, 5))
for item in v.evidence:
    print(" -", item["kind"])
