"""
Unordered (1,2) states of the standard map
==========================================

At large eps the standard map acquires stationary states that are not
comparable with their own translates. They show up away from the diagonal
band of the action landscape.
"""
import numpy as np

import fkstates as fk

m = fk.standard(12)
records, ctx, report = fk.analyze(m, 1, 2, density=64)

for r in records:
    print(np.round(r.config.coords, 6), r.label, "ordered" if r.cyclically_ordered else "unordered",
          r.region.value)

# every unordered state is incomparable with some minimizer
z = [r for r in records if not r.cyclically_ordered][0]
for x in ctx.translates(ctx.minimizers, -1, 2):
    print(np.round(x.coords, 4), fk.compare(z.config, x).name)

print({k: c.passed for k, c in report.checks.items()})
