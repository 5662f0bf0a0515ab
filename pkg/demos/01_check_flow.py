"""Confirm that each bundled surface is unit speed and solves the B-DR flow.

Evaluates psi_t against the ternary cross product of the first three
s-derivatives at every grid node, using the exact symbolic jets.
"""
import numpy as np

from bdr import load_surface
from bdr.linalg4 import norm, ternary_cross
from bdr.surface import grid_jet_entry
from _common import CORPUS, data_path

for name in CORPUS:
    sd = load_surface(data_path(name))
    d1, d2, d3, dt = (grid_jet_entry(sd, w) for w in ("psi_s", "psi_ss", "psi_sss", "psi_t"))
    flow = np.max(norm(dt - ternary_cross(d1, d2, d3)))
    speed = np.max(np.abs(np.sum(d1 * d1, -1) - 1))
    print("%-20s %dx%d grid  B-DR residual %.1e  unit-speed residual %.1e"
          % (name, sd.ns, sd.nt, flow, speed))
