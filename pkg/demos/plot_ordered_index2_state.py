"""
An ordered state that is neither a minimizer nor a minimax
==========================================================

The example4 potential has a (1,2) state at (0, 0.5) with two unstable
directions. It sits between consecutive minimizers, yet it cannot be
compared with the minimax states.
"""
import numpy as np

import fkstates as fk

m = fk.example4()
records, ctx, report = fk.analyze(m, 1, 2, density=64)

for r in records:
    print(np.round(r.config.coords, 6), r.label, r.region.value, f"R={r.residue:+.5f}")

###############################################################################
# refine lands exactly on (0, 0.5); the orbit closes after two steps
z = fk.refine(m, fk.config(1, [0.01, 0.49]))
print("refined:", z.config.coords, "index", z.index, "eigenvalues", np.round(z.eigenvalues, 4))
print("periodic:", fk.is_pq_periodic(m, 0.0, 0.5, 1, 2, tol=1e-12))

for y in ctx.minimaximizers:
    print("vs minimax", np.round(y.coords, 6), fk.compare(z.config, y).name)

print("audit passed:", report.passed)

###############################################################################
# contour of the action with the stationary points on top
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    g = np.linspace(-0.25, 1.25, 151)
    X0, X1 = np.meshgrid(g, g, indexing="ij")
    W = np.vectorize(lambda a, b: fk.action_eval(m, fk.config(1, [a, b])))(X0, X1)
    plt.contour(X0, X1, W, 40, linewidths=0.5)
    colors = {"GLOBAL_MIN": "r", "MINIMAX": "b", "INDEX_2": "k"}
    for r in records:
        c = r.config.coords
        plt.plot(c[0], c[1], "o", color=colors.get(r.label, "g"))
    plt.xlabel("x0")
    plt.ylabel("x1")
    plt.savefig("example4_contour.png", dpi=120)
