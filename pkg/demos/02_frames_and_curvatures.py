"""Parallel transport frames and the curvature triple along the soliton.

The helical soliton has constant curvatures, so k should not vary along s
or t; the Clifford surface shows genuinely varying ones.
"""
import numpy as np

from bdr import analyze, load_surface
from _common import data_path

for name in ("helical_soliton", "clifford_breathing"):
    an = analyze(load_surface(data_path(name)))
    k = an.curvature.k
    print(name)
    print("  frame Gram deviation   %.1e" % an.frames.gram_deviation())
    print("  k at (s0, t0)          %s" % np.array2string(k[0, 0], precision=6))
    print("  k range over the grid  %s .. %s" % (
        np.array2string(k.min(axis=(0, 1)), precision=4),
        np.array2string(k.max(axis=(0, 1)), precision=4)))
    print("  Q range                %.6f .. %.6f" % (an.curvature.Q.min(), an.curvature.Q.max()))
    print("  frame at the origin:")
    for label, row in zip(("T", "P1", "P2", "P3"), an.frames[0, 0].matrix):
        print("    %-3s %s" % (label, np.array2string(row, precision=5, suppress_small=True)))
