"""Curvature-ellipse classes and surface-level predicates.

First a handful of synthetic points built from (Q, W, A, B, C) alone, then
the class histogram of the Clifford surface.
"""
from bdr import analyze, classify_grid, classify_point, load_surface, surface_predicates, synthetic_report
from bdr.classify import histogram
from _common import data_path

Q, W = 1.0, 0.5
for A, B, C in [(0.1, 0.3, 0.2), (-0.1, 0.0, 0.4), (0.0, 0.0, 0.0), (0.2, 0.0, 0.0), (-0.2, 0.0, 0.0)]:
    pc = classify_point(synthetic_report(Q, W, A, B, C))
    print("A=%+.1f B=%+.1f C=%+.1f  ->  %-32s delta_p=%+.3e rank=%d%s" % (
        A, B, C, pc.label, pc.delta_p, pc.rank_A,
        "" if pc.hypothesis is None else "  (%s)" % pc.hypothesis))

g = analyze(load_surface(data_path("clifford_breathing"))).grid
print("\nclifford_breathing classes")
for label, n in histogram(classify_grid(g)).items():
    print("  %-34s %d" % (label, n))
for name, p in surface_predicates(g).items():
    print("  %-14s %s (worst violation %.3e)" % (name, p.holds, p.worst))
