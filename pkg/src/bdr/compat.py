"""Compatibility system of the parallel transport frame along a B-DR flow.

All functions take curvature arrays of shape ``(..., 3)`` holding
``(k1, k2, k3)`` (and their s-derivatives) and return arrays of the same
shape.  The t-connection of the frame is

    T_t   =  a12 P1 + a13 P2 + a14 P3
    P1_t  = -a12 T  + a23 P2 + a24 P3
    P2_t  = -a13 T  - a23 P1 + a34 P3
    P3_t  = -a14 T  - a24 P1 - a34 P2
"""
import numpy as np

from .numerics import cumulative_integral


def tangential_connection(k, k_ss):
    """``(a12, a13, a14)``, i.e. ``k3 k2'' - k2 k3''`` and its cyclic partners."""
    k1, k2, k3 = np.moveaxis(k, -1, 0)
    d1, d2, d3 = np.moveaxis(k_ss, -1, 0)
    return np.stack([k3 * d2 - k2 * d3, k1 * d3 - k3 * d1, k2 * d1 - k1 * d2], axis=-1)


def normal_connection_integrands(k, k_ss):
    """s-derivatives of ``(a23, a24, a34)``."""
    k1, k2, k3 = np.moveaxis(k, -1, 0)
    d1, d2, d3 = np.moveaxis(k_ss, -1, 0)
    i23 = k3 * (k1 * d1 + k2 * d2) - d3 * (k1**2 + k2**2)
    i24 = -k2 * (k1 * d1 + k3 * d3) + d2 * (k1**2 + k3**2)
    i34 = k1 * (k2 * d2 + k3 * d3) - d1 * (k2**2 + k3**2)
    return np.stack([i23, i24, i34], axis=-1)


def normal_connection(k, k_ss, s_grid, s0, constants=(0.0, 0.0, 0.0)):
    """``(a23, a24, a34)`` on an ``(ns, nt, 3)`` grid.

    Each is the running Simpson integral of its integrand along s, zero at
    ``s0``, plus the matching integration constant.
    """
    integrands = normal_connection_integrands(k, k_ss)
    a = cumulative_integral(integrands, s_grid, anchor=s0, axis=0)
    return a + np.asarray(constants, float)


def corollary_kt(k, k_s, k_ss, k_sss, a_normal):
    """t-derivatives of the curvatures forced by the compatibility conditions."""
    k1, k2, k3 = np.moveaxis(k, -1, 0)
    p1, p2, p3 = np.moveaxis(k_s, -1, 0)
    d1, d2, d3 = np.moveaxis(k_ss, -1, 0)
    e1, e2, e3 = np.moveaxis(k_sss, -1, 0)
    a23, a24, a34 = np.moveaxis(a_normal, -1, 0)
    k1t = -p2 * d3 + p3 * d2 + k2 * (a23 - e3) + k3 * (a24 + e2)
    k2t = -p3 * d1 + p1 * d3 + k3 * (a34 - e1) + k1 * (-a23 + e3)
    k3t = p2 * d1 - p1 * d2 + k2 * (-a34 + e1) - k1 * (a24 + e2)
    return np.stack([k1t, k2t, k3t], axis=-1)


def corollary_residuals(k, k_s, k_ss, k_sss, a_normal, k_t):
    """Right-hand sides of the three curvature evolution identities with ``k_t`` supplied.

    They vanish exactly when ``k_t`` is the true t-derivative of a curvature
    field produced by a B-DR flow in this frame gauge.
    """
    return corollary_kt(k, k_s, k_ss, k_sss, a_normal) - k_t
