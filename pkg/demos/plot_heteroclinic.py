"""
Following the unstable manifold of a minimax
============================================

From a minimax state the gradient flow runs downhill in both directions
along the positive eigenvector. Each branch is a monotone chain and ends on
a minimizer.
"""
import numpy as np

import fkstates as fk
from fkstates.flow import is_ordered_chain

m = fk.threeharmonic(1.2)
records, ctx, _ = fk.analyze(m, 1, 2, density=32)

for r in records:
    if r.label != "MINIMAX":
        continue
    lower, upper = fk.trace_unstable(m, r.config)
    print(np.round(r.config.coords, 5), "->",
          np.round(lower.limit.coords, 5), is_ordered_chain(lower),
          np.round(upper.limit.coords, 5), is_ordered_chain(upper))

###############################################################################
# the action along one branch only decreases
W = lower.actions(m)
print("W drop:", W[0] - W[-1], "monotone:", bool(np.all(np.diff(W) <= 1e-15)))
