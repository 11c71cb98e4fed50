"""
Birth of asymmetric (1,2) orbits
================================

Scanning the three-harmonic family in eps, the symmetric orbit through
x = 0 turns from minimizing to minimax and a pair of asymmetric minimizing
orbits appears.
"""
import numpy as np

from fkstates import threeharmonic
from fkstates.twistmap import rimmer_scan

eps = np.round(np.arange(0.7, 1.2001, 0.01), 10)
result = rimmer_scan(threeharmonic, 1, 2, eps)

for t in result.thresholds:
    print(t.kind, "between", t.eps_below, "and", t.eps_above)

counts = result.asymmetric_counts()
g0 = {r.eps: r.index for r in result.records if r.family == "G0#1"}
for e in eps[::5]:
    print(f"eps={e:.2f}  asymmetric={counts[e]}  index of G0 orbit={g0.get(e)}")

try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for fam in sorted({r.family for r in result.records}):
        rs = [r for r in result.records if r.family == fam]
        plt.plot([r.eps for r in rs], [r.residue for r in rs], ".", ms=3, label=fam)
    plt.xlabel("eps")
    plt.ylabel("residue")
    plt.legend()
    plt.savefig("scan_residues.png", dpi=120)
