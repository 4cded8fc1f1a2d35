"""Sample the carrying simplex and check that no two points are ordered.

Points started far out and close to the origin along the same ray flow onto
a surface that attracts everything except the origin.  On that surface no
point dominates another componentwise.
"""
import numpy as np

from permanence import SystemSpec, may_leonard
from permanence.simulate import sample_carrying_simplex, unordered_violations

systems = {
    "symmetric 0.5": SystemSpec([[1, 0.5, 0.5], [0.5, 1, 0.5], [0.5, 0.5, 1]], [1, 1, 1]),
    "May-Leonard (0.8, 1.1)": may_leonard(0.8, 1.1),
}
for name, spec in systems.items():
    cloud = sample_carrying_simplex(spec, n_rays=60, t_settle=25)
    pts = cloud.points
    print(f"{name}: {len(pts)} points, ordered pairs = {unordered_violations(pts)}")
    print("  component ranges:", np.round(pts.min(axis=0), 3), "to", np.round(pts.max(axis=0), 3))

# Write one cloud for plotting elsewhere.
with open("carrying_simplex.csv", "w") as fh:
    fh.write(sample_carrying_simplex(systems["symmetric 0.5"], n_rays=60).to_csv())
print("wrote carrying_simplex.csv")
