"""Where does the May-Leonard family switch from permanent to impermanent?

B = [[1, a, b], [b, 1, a], [a, b, 1]] with a < 1 < b has no planar
equilibria; the three axial states form a heteroclinic cycle.  Whether the
cycle repels (coexistence) or attracts (species take turns almost vanishing)
is decided by rho = (1 - a)^3 + (1 - b)^3.
"""
import numpy as np

from permanence import analyze, may_leonard

alphas = np.linspace(0.5, 0.95, 10)
betas = np.linspace(1.05, 1.5, 10)

print("rows: alpha, columns: beta")
print("P permanent, I impermanent, D degenerate, ? inconclusive")
print("        " + " ".join(f"{b:5.2f}" for b in betas))
for a in alphas:
    marks = []
    for b in betas:
        outcome = analyze(may_leonard(a, b)).outcome
        marks.append({"Permanent": "P", "Impermanent": "I", "Degenerate": "D"}.get(outcome, "?"))
    print(f"{a:6.2f}  " + "     ".join(marks))

# '?' marks alpha + beta = 2, where rho vanishes.  'D' marks alpha * beta = 1:
# every planar block is singular there and no sign decision is made.
# The switch happens on alpha + beta = 2.  Take a point on each side.
for a, b in [(0.8, 1.1), (0.8, 1.3)]:
    v = analyze(may_leonard(a, b))
    print(f"\nalpha={a}, beta={b}: {v.outcome}, rho={v.rho:+.4f}")
    if v.certificate is not None:
        print(f"  weights nu = {np.round(v.nu, 4)}, margin = {v.margin:.4g}")
