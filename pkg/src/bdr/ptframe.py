"""Parallel transport frames {T, P1, P2, P3} over the (s, t) grid and their curvatures.

Along each t = const curve the normal vectors obey ``P_i' = -k_i T`` with
``k_i = <T', P_i>``, so ``T' = k1 P1 + k2 P2 + k3 P3``.  The frame is unique
up to a constant rotation of the normal triple; :func:`initial_frame` picks
one and :func:`propagate_t` carries that choice smoothly across t.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import compat
from .errors import DegenerateNormalSpace, DriftExceeded
from .linalg4 import E, inner, norm, symmetric_orthonormalize
from .numerics import derivative
from .surface import grid_jet_entry

SUBSTEPS = 4
DRIFT_LIMIT = 1e-6
NORMAL_TOL = 1e-10
CURVATURE_ZERO = 1e-10


class StandingAssumptionWarning(UserWarning):
    """Fewer than two curvature functions are non-zero anywhere on the grid."""


@dataclass(frozen=True)
class Frame:
    T: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    P3: np.ndarray

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, float)
        return cls(m[0].copy(), m[1].copy(), m[2].copy(), m[3].copy())

    @property
    def matrix(self):
        return np.stack([self.T, self.P1, self.P2, self.P3])

    @property
    def normals(self):
        return np.stack([self.P1, self.P2, self.P3])

    def gram_deviation(self):
        m = self.matrix
        return float(np.max(np.abs(m @ m.T - np.eye(4))))

    def det(self):
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True)
class FrameField:
    """Frames on the grid; ``frames[i, j]`` holds rows T, P1, P2, P3 at (s_i, t_j)."""

    frames: np.ndarray
    s_grid: np.ndarray
    t_grid: np.ndarray

    @property
    def shape(self):
        return self.frames.shape[:2]

    @property
    def T(self):
        return self.frames[..., 0, :]

    @property
    def P(self):
        return self.frames[..., 1:, :]

    def __getitem__(self, cell):
        return Frame.from_matrix(self.frames[cell])

    def gram_deviation(self):
        f = self.frames
        g = np.einsum("...ik,...jk->...ij", f, f)
        return float(np.max(np.abs(g - np.eye(4))))


@dataclass(frozen=True)
class CurvatureField:
    """Curvatures ``k = (k1, k2, k3)`` and derivatives, each an ``(ns, nt, 3)`` array.

    ``k_t`` is the t-derivative used downstream (by default the one forced by
    the compatibility conditions); ``k_t_fd`` is the t-differenced one.
    ``a_normal`` holds the normal connection ``(a23, a24, a34)``.
    """

    k: np.ndarray
    Q: np.ndarray
    k_s: np.ndarray
    k_ss: np.ndarray
    k_sss: np.ndarray
    k_t: np.ndarray
    k_t_fd: np.ndarray
    a_normal: np.ndarray
    s_grid: np.ndarray
    t_grid: np.ndarray
    standing_assumption: bool
    derivatives: str = "jet"
    kt_source: str = "corollary"

    k1 = property(lambda self: self.k[..., 0])
    k2 = property(lambda self: self.k[..., 1])
    k3 = property(lambda self: self.k[..., 2])

    @property
    def k_t_corollary(self):
        return compat.corollary_kt(self.k, self.k_s, self.k_ss, self.k_sss, self.a_normal)

    def corollary_residuals(self):
        """Compatibility residuals with the t-differenced ``k_t`` plugged in."""
        return compat.corollary_residuals(
            self.k, self.k_s, self.k_ss, self.k_sss, self.a_normal, self.k_t_fd
        )


def _check_gauge(gauge):
    R = np.asarray(gauge, float)
    if R.shape != (3, 3) or not np.allclose(R @ R.T, np.eye(3), atol=1e-12):
        raise ValueError("gauge must be a 3x3 rotation matrix")
    if np.linalg.det(R) < 0:
        raise ValueError("gauge must preserve orientation (det +1)")
    return R


def _complete(T, seeds, coords):
    """Orthonormal normals: seeds first, then the best-conditioned basis vectors."""
    basis = [T]
    for v in seeds:
        r = v
        for _ in range(2):
            for q in basis:
                r = r - inner(r, q) * q
        if norm(r) > NORMAL_TOL * max(1.0, float(norm(v))):
            basis.append(r / norm(r))
    if len(basis) == 1:
        raise DegenerateNormalSpace(
            "psi_ss and psi_t both vanish at (s, t) = (%g, %g); nothing orients the normal space"
            % coords
        )
    while len(basis) < 4:
        best = None
        for e in E:
            r = e.copy()
            for _ in range(2):
                for q in basis:
                    r = r - inner(r, q) * q
            if best is None or norm(r) > norm(best):
                best = r
        basis.append(best / norm(best))
    m = np.stack(basis)
    if np.linalg.det(m) < 0:
        m[3] = -m[3]
    return m


def initial_frame(sd, s0=None, t0=None, gauge=None):
    """Frame at ``(s0, t0)``: T = psi_s, normals by Gram-Schmidt of psi_ss, psi_t, e1..e4.

    ``gauge`` is an optional rotation applied to the normal triple
    (``P_i -> sum_j R_ij P_j``), which rotates the curvature vector by the
    same matrix.
    """
    s0 = sd.s_grid[0] if s0 is None else float(s0)
    t0 = sd.t_grid[0] if t0 is None else float(t0)
    j = sd.jet(s0, t0)
    T = j.psi_s / norm(j.psi_s)
    m = _complete(T, [j.psi_ss, j.psi_t], (s0, t0))
    if gauge is not None:
        m[1:] = _check_gauge(gauge) @ m[1:]
    return Frame.from_matrix(m)


def _fine_tangents(sd, s_grid, t_values):
    """T and T' at 2*SUBSTEPS points per grid interval; arrays (nf, nt, 4)."""
    s_grid = np.asarray(s_grid, float)
    n = 2 * SUBSTEPS
    frac = np.arange(n) / n
    sf = np.concatenate([(s_grid[:-1, None] + np.diff(s_grid)[:, None] * frac).ravel(), s_grid[-1:]])
    S, Tt = np.meshgrid(sf, np.asarray(t_values, float), indexing="ij")
    d1 = sd.evaluate("psi_s", S, Tt)
    d2 = sd.evaluate("psi_ss", S, Tt)
    speed = norm(d1)[..., None]
    T = d1 / speed
    Tp = (d2 - inner(d2, T)[..., None] * T) / speed
    return T, Tp


def _transport(sd, s_grid, t_values, init):
    """RK4 transport of ``init`` (nt, 4, 4) along s for every t at once."""
    s_grid = np.asarray(s_grid, float)
    t_values = np.atleast_1d(np.asarray(t_values, float))
    T, Tp = _fine_tangents(sd, s_grid, t_values)
    ns, nt = len(s_grid), len(t_values)
    out = np.empty((ns, nt, 4, 4))
    out[0] = init
    P = np.array(init[:, 1:, :])

    def rhs(P, idx):
        return -np.einsum("tk,tik->ti", Tp[idx], P)[..., None] * T[idx][:, None, :]

    n = 2 * SUBSTEPS
    for i in range(ns - 1):
        h = (s_grid[i + 1] - s_grid[i]) / SUBSTEPS
        for m in range(SUBSTEPS):
            a = i * n + 2 * m
            k1 = rhs(P, a)
            k2 = rhs(P + 0.5 * h * k1, a + 1)
            k3 = rhs(P + 0.5 * h * k2, a + 1)
            k4 = rhs(P + h * k3, a + 2)
            P = P + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        frame = np.concatenate([T[(i + 1) * n][:, None, :], P], axis=1)
        fixed = frame.copy()
        fixed[:, 1:] = symmetric_orthonormalize(P, against=frame[:, 0])
        correction = np.max(np.abs(fixed - frame), axis=(1, 2))
        worst = int(np.argmax(correction))
        if correction[worst] > DRIFT_LIMIT:
            raise DriftExceeded(
                "re-orthonormalization correction %.3g at (s, t) = (%g, %g); refine the s-grid"
                % (correction[worst], s_grid[i + 1], t_values[worst])
            )
        out[i + 1] = fixed
        P = fixed[:, 1:, :]
    return out


def transport_s(sd, t, s_grid, init):
    """Transport ``init`` (a :class:`Frame` at ``s_grid[0]``) along the curve ``t = const``."""
    m = init.matrix if isinstance(init, Frame) else np.asarray(init, float)
    frames = _transport(sd, s_grid, [t], m[None])
    return [Frame.from_matrix(f) for f in frames[:, 0]]


def propagate_t(sd, gauge=None):
    """Frame field over the whole grid.

    The initial frame at the first grid node is carried from one t-column to
    the next by projecting its normals onto the new normal space and
    re-orthonormalizing; each column is then filled by s-transport.
    """
    s_grid, t_grid = sd.s_grid, sd.t_grid
    s_first = s_grid[0]
    inits = np.empty((len(t_grid), 4, 4))
    inits[0] = initial_frame(sd, s_first, t_grid[0], gauge).matrix
    psi_s = sd.evaluate("psi_s", np.full_like(t_grid, s_first), t_grid)
    for j in range(1, len(t_grid)):
        T = psi_s[j] / norm(psi_s[j])
        m = np.concatenate([T[None], symmetric_orthonormalize(inits[j - 1, 1:], against=T)])
        if not np.all(np.isfinite(m)) or np.linalg.det(m) <= 0:
            raise DegenerateNormalSpace(
                "normal frame cannot be continued to (s, t) = (%g, %g)" % (s_first, t_grid[j])
            )
        inits[j] = m
    frames = _transport(sd, s_grid, t_grid, inits)
    return FrameField(frames, s_grid, t_grid)


def _jet_derivatives(ff, sd):
    T, P = ff.T, ff.P
    d2, d3, d4, d5 = (grid_jet_entry(sd, w) for w in ("psi_ss", "psi_sss", "psi_ssss", "psi_sssss"))

    def proj(x):
        return np.einsum("...ik,...k->...i", P, x)

    k = proj(d2)
    # d/ds <X, P_i> = <X_s, P_i> - k_i <X, T>
    a3 = inner(d3, T)[..., None]
    a4 = inner(d4, T)[..., None]
    a3_s = a4 + inner(d3, d2)[..., None]
    k_s = proj(d3)
    k_ss = proj(d4) - k * a3
    k_sss = proj(d5) - k * a4 - k_s * a3 - k * a3_s
    return k, k_s, k_ss, k_sss


def curvatures(ff, sd, derivatives="jet", kt_source="corollary"):
    """Curvature field of ``ff``.

    ``k_i = <psi_ss, P_i>``.  With ``derivatives="jet"`` the s-derivatives of
    k are exact projections of higher jet entries; ``"fd"`` uses 4th-order
    finite differences along s instead.  ``kt_source`` chooses the k_t fed to
    the invariants: ``"corollary"`` (compatibility closed forms) or
    ``"tdiff"`` (4th-order differences across t).
    """
    if derivatives not in ("jet", "fd"):
        raise ValueError("derivatives must be 'jet' or 'fd'")
    if kt_source not in ("corollary", "tdiff"):
        raise ValueError("kt_source must be 'corollary' or 'tdiff'")
    s_grid, t_grid = ff.s_grid, ff.t_grid
    k, k_s, k_ss, k_sss = _jet_derivatives(ff, sd)
    if derivatives == "fd":
        hs = s_grid[1] - s_grid[0]
        k_s, k_ss, k_sss = (derivative(k, hs, m, axis=0) for m in (1, 2, 3))
    Q = norm(k)
    a_normal = compat.normal_connection(k, k_ss, s_grid, sd.s0, sd.constants)
    k_t_fd = derivative(k, t_grid[1] - t_grid[0], 1, axis=1)
    if kt_source == "corollary":
        k_t = compat.corollary_kt(k, k_s, k_ss, k_sss, a_normal)
    else:
        k_t = k_t_fd
    nonzero = np.sum(np.abs(k) > CURVATURE_ZERO, axis=-1)
    standing = bool(np.any(nonzero >= 2))
    if not standing:
        warnings.warn(
            "fewer than two curvature functions are non-zero anywhere on the grid",
            StandingAssumptionWarning,
            stacklevel=2,
        )
    return CurvatureField(
        k, Q, k_s, k_ss, k_sss, k_t, k_t_fd, a_normal, s_grid, t_grid, standing,
        derivatives, kt_source,
    )
