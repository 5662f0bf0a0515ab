"""Invariants of the soliton surface on every grid cell.

Everything is computed on the whole grid at once (arrays with leading
shape ``(ns, nt)``); :class:`InvariantGrid` then hands out per-cell
:class:`InvariantReport` objects.  Cells where ``Q`` or ``W`` falls below
``DEGENERATE_TOL`` are masked: their entries are NaN and asking for their
report raises :class:`DegeneratePoint`.

Notation: ``v = (P, R, S)`` holds the coefficients of ``psi_t`` in the
normal frame, so ``v = k_s x k``; ``W = |v|`` and the surface metric is
``g11 = 1, g12 = 0, g22 = W^2``.
"""
from dataclasses import dataclass, field

import numpy as np

from . import compat
from .errors import DegeneratePoint
from .linalg4 import inner, rank_2x3
from .numerics import derivative
from .ptframe import curvatures, propagate_t
from .surface import grid_jet_entry

DEGENERATE_TOL = 1e-10


@dataclass(frozen=True)
class TangentData:
    P: float
    R: float
    S: float
    g11: float
    g12: float
    g22: float
    W: float


@dataclass(frozen=True)
class ConnectionData:
    a12: float
    a13: float
    a14: float
    a23: float
    a24: float
    a34: float


@dataclass(frozen=True)
class InvariantReport:
    point: tuple
    Q: float
    tangent: TangentData
    connection: ConnectionData
    A: float
    B: float
    C: float
    c_coeffs: dict
    delta1: float
    delta2: float
    delta3: float
    l11: float
    l12: float
    l22: float
    gamma: np.ndarray
    k_inv: float
    h_inv: float
    shape_N1: np.ndarray
    shape_N2: np.ndarray
    K: float
    H: np.ndarray
    H_norm2: float
    K_N: float
    wintgen_gap: float
    delta_p: float
    cell: tuple = None
    k: np.ndarray = field(default=None, repr=False)

    @property
    def W(self):
        return self.tangent.W

    @property
    def H_norm(self):
        return float(np.sqrt(self.H_norm2))

    @property
    def rank_A(self):
        return rank_2x3(self.A_matrix)

    @property
    def A_matrix(self):
        """Rows ``(h11^k, h12^k, h22^k)`` for k = 1, 2."""
        n1, n2 = self.shape_N1, self.shape_N2
        return np.array([[n1[0, 0], n1[0, 1], n1[1, 1]], [n2[0, 0], n2[0, 1], n2[1, 1]]])


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _to_ambient(coords, P):
    # normal-frame coordinates (..., 3) -> ambient vectors (..., 4)
    return np.einsum("...i,...ik->...k", coords, P)


def delta_matrix(h):
    """The 4x4 matrix whose quarter-determinant is Delta(p).

    ``h`` has trailing shape (2, 3) with rows ``(h11^k, h12^k, h22^k)``.
    """
    h = np.asarray(h, float)
    m = np.zeros(h.shape[:-2] + (4, 4))
    for r, k in ((0, 0), (1, 1)):
        m[..., r, 0] = h[..., k, 0]
        m[..., r, 1] = 2 * h[..., k, 1]
        m[..., r, 2] = h[..., k, 2]
        m[..., r + 2, 1] = h[..., k, 0]
        m[..., r + 2, 2] = 2 * h[..., k, 1]
        m[..., r + 2, 3] = h[..., k, 2]
    return m


@dataclass(frozen=True)
class InvariantGrid:
    """All invariants on the grid.  Every array has leading shape ``(ns, nt)``."""

    s_grid: np.ndarray
    t_grid: np.ndarray
    degenerate: np.ndarray
    k: np.ndarray
    Q: np.ndarray
    v: np.ndarray
    W: np.ndarray
    g_jet: np.ndarray
    psi_t_rebuilt: np.ndarray
    a_tan: np.ndarray
    a_normal: np.ndarray
    v_s: np.ndarray
    v_t: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    c: np.ndarray
    delta: np.ndarray
    l: np.ndarray
    gamma: np.ndarray
    k_inv: np.ndarray
    h_inv: np.ndarray
    h: np.ndarray
    K: np.ndarray
    K_shape: np.ndarray
    N1: np.ndarray
    N2: np.ndarray
    H: np.ndarray
    H_my: np.ndarray
    H_norm2: np.ndarray
    K_N: np.ndarray
    K_N_general: np.ndarray
    wintgen_gap: np.ndarray
    delta_p: np.ndarray
    delta_p_det: np.ndarray
    corollary: np.ndarray

    @property
    def shape(self):
        return self.Q.shape

    @property
    def g22(self):
        return self.W**2

    def check_cell(self, cell):
        i, j = cell
        if self.degenerate[i, j]:
            raise DegeneratePoint(
                "Q = %.3g, W = %.3g at (s, t) = (%g, %g)"
                % (self.Q[i, j], self.W[i, j], self.s_grid[i], self.t_grid[j])
            )

    def report(self, i, j):
        self.check_cell((i, j))
        c = self.c[i, j]
        h = self.h[i, j]
        P, R, S = (float(x) for x in self.v[i, j])
        return InvariantReport(
            point=(float(self.s_grid[i]), float(self.t_grid[j])),
            Q=float(self.Q[i, j]),
            tangent=TangentData(P, R, S, 1.0, 0.0, float(self.W[i, j] ** 2), float(self.W[i, j])),
            connection=ConnectionData(*(float(x) for x in self.a_tan[i, j]),
                                      *(float(x) for x in self.a_normal[i, j])),
            A=float(self.A[i, j]),
            B=float(self.B[i, j]),
            C=float(self.C[i, j]),
            c_coeffs={name: float(x) for name, x in zip(C_NAMES, c)},
            delta1=float(self.delta[i, j, 0]),
            delta2=float(self.delta[i, j, 1]),
            delta3=float(self.delta[i, j, 2]),
            l11=float(self.l[i, j, 0]),
            l12=float(self.l[i, j, 1]),
            l22=float(self.l[i, j, 2]),
            gamma=self.gamma[i, j].copy(),
            k_inv=float(self.k_inv[i, j]),
            h_inv=float(self.h_inv[i, j]),
            shape_N1=np.array([[h[0, 0], h[0, 1]], [h[0, 1], h[0, 2]]]),
            shape_N2=np.array([[h[1, 0], h[1, 1]], [h[1, 1], h[1, 2]]]),
            K=float(self.K[i, j]),
            H=self.H[i, j].copy(),
            H_norm2=float(self.H_norm2[i, j]),
            K_N=float(self.K_N[i, j]),
            wintgen_gap=float(self.wintgen_gap[i, j]),
            delta_p=float(self.delta_p[i, j]),
            cell=(i, j),
            k=self.k[i, j].copy(),
        )

    def reports(self):
        """Non-degenerate reports in row-major cell order."""
        ns, nt = self.shape
        return [self.report(i, j) for i in range(ns) for j in range(nt) if not self.degenerate[i, j]]


C_NAMES = ("c11_1", "c11_2", "c12_1", "c12_2", "c22_1", "c22_2")


def synthetic_scalars(Q, W, A, B, C):
    """Closed-form invariants from the five scalars alone (no surface needed).

    Returns a dict with the same keys as the corresponding :class:`InvariantGrid`
    fields; handy for exercising the algebra and the classifier in isolation.
    """
    Q, W, A, B, C = np.broadcast_arrays(*(np.asarray(x, float) for x in (Q, W, A, B, C)))
    W2 = W**2
    out = {}
    out["c"] = np.stack([Q, 0 * Q, 0 * Q, Q * C / W, A / Q, B / (W * Q)], axis=-1)
    out["delta"] = np.stack([Q**2 * C / W, B / W, -A * C / W], axis=-1)
    out["l"] = np.stack([2 * Q**2 * C / W2, B / W2, -2 * A * C / W2], axis=-1)
    g11, g12, g22 = 1.0, 0.0, W2
    l11, l12, l22 = np.moveaxis(out["l"], -1, 0)
    gamma = np.empty(Q.shape + (2, 2))
    gamma[..., 0, 0] = (g12 * l12 - g22 * l11) / W2
    gamma[..., 0, 1] = (g12 * l11 - g11 * l12) / W2
    gamma[..., 1, 0] = (g12 * l22 - g22 * l12) / W2
    gamma[..., 1, 1] = (g12 * l12 - g11 * l22) / W2
    out["gamma"] = gamma
    out["k_inv"] = gamma[..., 0, 0] * gamma[..., 1, 1] - gamma[..., 0, 1] * gamma[..., 1, 0]
    out["h_inv"] = -np.trace(gamma, axis1=-2, axis2=-1) / 2
    h = np.empty(Q.shape + (2, 3))
    h[..., 0, :] = np.stack([Q, 0 * Q, A / (Q * W2)], axis=-1)
    h[..., 1, :] = np.stack([0 * Q, Q * C / W2, B / (Q * W2 * W)], axis=-1)
    out["h"] = h
    out["K"] = (A * W2 - Q**2 * C**2) / W2**2
    out["K_shape"] = h[..., 0, 0] * h[..., 0, 2] - h[..., 0, 1] ** 2 + h[..., 1, 0] * h[..., 1, 2] - h[..., 1, 1] ** 2
    out["K_N"] = (Q**2 * W2 - A) * C / W2**2
    c = out["c"]
    c11_1, c11_2, c12_1, c12_2, c22_1, c22_2 = np.moveaxis(c, -1, 0)
    out["K_N_general"] = (
        g11 * (c12_1 * c22_2 - c12_2 * c22_1)
        - g12 * (c11_1 * c22_2 - c11_2 * c22_1)
        + g22 * (c11_1 * c12_2 - c11_2 * c12_1)
    ) / W**3
    # |H|^2 from the orthonormal normal components (tr A_N1, tr A_N2) / 2
    H1 = (Q**2 * W2 + A) / (2 * W2 * Q)
    H2 = B / (2 * W2 * W * Q)
    out["H_normal"] = np.stack([H1, H2], axis=-1)
    out["H_norm2"] = H1**2 + H2**2
    out["delta_p"] = -(B**2 + 4 * Q**2 * A * C**2) / (4 * W2**3)
    with np.errstate(divide="ignore", invalid="ignore"):  # LU of singular matrices
        out["delta_p_det"] = np.linalg.det(delta_matrix(h)) / 4
    out["wintgen_gap"] = out["H_norm2"] - out["K"] - np.abs(out["K_N"])
    return out


def synthetic_report(Q, W, A, B, C, a_normal=(0.0, 0.0, 0.0)):
    """Report for prescribed scalars in a canonical frame.

    The frame is ``T = e1``, ``P_i = e_{i+1}`` with ``k = (Q, 0, 0)`` and
    ``(P, R, S) = (0, W, 0)``, so ``N1 = e2`` and ``N2 = e4``.
    """
    sc = synthetic_scalars(Q, W, A, B, C)
    h = sc["h"]
    n1, n2 = np.array([0.0, 1, 0, 0]), np.array([0.0, 0, 0, 1])
    H = sc["H_normal"][0] * n1 + sc["H_normal"][1] * n2
    K = float(sc["K"])
    K_N = float(sc["K_N"])
    return InvariantReport(
        point=(0.0, 0.0),
        Q=float(Q),
        tangent=TangentData(0.0, float(W), 0.0, 1.0, 0.0, float(W) ** 2, float(W)),
        connection=ConnectionData(0.0, 0.0, 0.0, *(float(x) for x in a_normal)),
        A=float(A),
        B=float(B),
        C=float(C),
        c_coeffs={name: float(x) for name, x in zip(C_NAMES, sc["c"])},
        delta1=float(sc["delta"][0]),
        delta2=float(sc["delta"][1]),
        delta3=float(sc["delta"][2]),
        l11=float(sc["l"][0]),
        l12=float(sc["l"][1]),
        l22=float(sc["l"][2]),
        gamma=sc["gamma"],
        k_inv=float(sc["k_inv"]),
        h_inv=float(sc["h_inv"]),
        shape_N1=np.array([[h[0, 0], h[0, 1]], [h[0, 1], h[0, 2]]]),
        shape_N2=np.array([[h[1, 0], h[1, 1]], [h[1, 1], h[1, 2]]]),
        K=K,
        H=H,
        H_norm2=float(H @ H),
        K_N=K_N,
        wintgen_gap=float(H @ H) - K - abs(K_N),
        delta_p=float(sc["delta_p"]),
        k=np.array([float(Q), 0.0, 0.0]),
    )


def invariant_grid(sd, ff, cf):
    """Evaluate every invariant on the grid of ``ff`` / ``cf``."""
    k, Q = cf.k, cf.Q
    hs = cf.s_grid[1] - cf.s_grid[0]
    v = np.cross(cf.k_s, k)
    W = np.sqrt(_dot(v, v))
    degenerate = (Q < DEGENERATE_TOL) | (W < DEGENERATE_TOL)

    psi_s = grid_jet_entry(sd, "psi_s")
    psi_t = grid_jet_entry(sd, "psi_t")
    g_jet = np.stack([inner(psi_s, psi_s), inner(psi_s, psi_t), inner(psi_t, psi_t)], axis=-1)
    psi_t_rebuilt = _to_ambient(v, ff.P)

    a_tan = compat.tangential_connection(k, cf.k_ss)
    a_normal = cf.a_normal
    if cf.derivatives == "jet":
        v_s = a_tan  # d/ds (k_s x k) = k_ss x k
    else:
        v_s = derivative(v, hs, 1, axis=0)
    k_st = derivative(cf.k_t, hs, 1, axis=0)
    v_t = np.cross(k_st, k) + np.cross(cf.k_s, cf.k_t)

    k1, k2, k3 = np.moveaxis(k, -1, 0)
    P, R, S = np.moveaxis(v, -1, 0)
    Pt, Rt, St = np.moveaxis(v_t, -1, 0)
    a23, a24, a34 = np.moveaxis(a_normal, -1, 0)
    A = (
        a23 * (P * k2 - R * k1)
        + a24 * (P * k3 - S * k1)
        + a34 * (R * k3 - S * k2)
        - _dot(v, cf.k_t)
    )
    B = (
        W**2 * (k1 * a34 - k2 * a24 + k3 * a23)
        + S * (k2 * Pt - k1 * Rt)
        + R * (k1 * St - k3 * Pt)
        + P * (k3 * Rt - k2 * St)
    )
    C = _dot(cf.k_s, v_s)

    with np.errstate(divide="ignore", invalid="ignore"):
        Qm = np.where(degenerate, np.nan, Q)
        Wm = np.where(degenerate, np.nan, W)
        sc = synthetic_scalars(Qm, Wm, A, B, C)
        n1 = k / Qm[..., None]
        n2 = np.cross(k, v) / (Qm * Wm)[..., None]
        N1, N2 = _to_ambient(n1, ff.P), _to_ambient(n2, ff.P)
        W2 = Wm**2
        coeff = (np.cross(k, v) * B[..., None] + (W2 * (Qm**2 * W2 + A))[..., None] * k) / (
            2 * Qm**2 * W2**2
        )[..., None]
        H = _to_ambient(coeff, ff.P)
        H_my = sc["H_normal"][..., :1] * N1 + sc["H_normal"][..., 1:] * N2
    return InvariantGrid(
        s_grid=cf.s_grid,
        t_grid=cf.t_grid,
        degenerate=degenerate,
        k=k,
        Q=Q,
        v=v,
        W=W,
        g_jet=g_jet,
        psi_t_rebuilt=psi_t_rebuilt,
        a_tan=a_tan,
        a_normal=a_normal,
        v_s=v_s,
        v_t=v_t,
        A=A,
        B=B,
        C=C,
        c=sc["c"],
        delta=sc["delta"],
        l=sc["l"],
        gamma=sc["gamma"],
        k_inv=sc["k_inv"],
        h_inv=sc["h_inv"],
        h=sc["h"],
        K=sc["K"],
        K_shape=sc["K_shape"],
        N1=N1,
        N2=N2,
        H=H,
        H_my=H_my,
        H_norm2=_dot(H, H),
        K_N=sc["K_N"],
        K_N_general=sc["K_N_general"],
        wintgen_gap=_dot(H, H) - sc["K"] - np.abs(sc["K_N"]),
        delta_p=sc["delta_p"],
        delta_p_det=sc["delta_p_det"],
        corollary=cf.corollary_residuals(),
    )


@dataclass(frozen=True)
class Analysis:
    """Everything computed for one surface: frames, curvatures, invariants."""

    surface: object
    frames: object
    curvature: object
    grid: InvariantGrid


def analyze(sd, gauge=None, derivatives="jet", kt_source="corollary"):
    """Run frames, curvatures and invariants for ``sd``."""
    ff = propagate_t(sd, gauge)
    cf = curvatures(ff, sd, derivatives=derivatives, kt_source=kt_source)
    return Analysis(sd, ff, cf, invariant_grid(sd, ff, cf))


# --------------------------------------------------------------------------
# Per-cell views
# --------------------------------------------------------------------------


def tangent_data(grid, cell):
    """Coefficients of psi_t and the metric at ``cell``."""
    grid.check_cell(cell)
    P, R, S = (float(x) for x in grid.v[cell])
    W = float(grid.W[cell])
    return TangentData(P, R, S, 1.0, 0.0, W * W, W)


def normal_frame(grid, cell):
    """Unit normals ``(N1, N2)`` in ambient coordinates."""
    grid.check_cell(cell)
    return grid.N1[cell].copy(), grid.N2[cell].copy()


def connection(grid, cell):
    grid.check_cell(cell)
    return ConnectionData(*(float(x) for x in grid.a_tan[cell]),
                          *(float(x) for x in grid.a_normal[cell]))


def abc_scalars(grid, cell):
    grid.check_cell(cell)
    return float(grid.A[cell]), float(grid.B[cell]), float(grid.C[cell])


def invariant_report(grid, cell):
    return grid.report(*cell)


def corollary_residuals(grid, cell):
    """The three compatibility residuals (t-differenced k_t) at ``cell``."""
    return tuple(float(x) for x in grid.corollary[cell])
