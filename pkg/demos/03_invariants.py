"""Gaussian curvature, mean curvature, normal curvature and Delta(p).

Prints ranges on each surface and a cross-check of K against the
shape-operator determinant sum, plus the Wintgen inequality gap.
"""
import numpy as np

from bdr import analyze, load_surface
from _common import CORPUS, data_path

for name in CORPUS:
    g = analyze(load_surface(data_path(name))).grid
    ok = ~g.degenerate

    def rng(a):
        return "%+.4e .. %+.4e" % (a[ok].min(), a[ok].max())

    print(name)
    print("  K        %s" % rng(g.K))
    print("  |H|^2    %s" % rng(g.H_norm2))
    print("  K_N      %s" % rng(g.K_N))
    print("  Delta(p) %s" % rng(g.delta_p))
    print("  |K - K_shape|          %.1e" % np.max(np.abs(g.K - g.K_shape)[ok]))
    print("  min Wintgen gap        %.4f" % g.wintgen_gap[ok].min())
