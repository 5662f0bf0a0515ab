"""Curvature-ellipse classification of surface points and surface-level predicates.

Sign tests use bands scaled by each cell's natural magnitude: ``tol * W^6``
for Delta(p), ``tol * W^4`` for K, ``tol * Q^2 W^2`` for A, ``tol * Q^2 W^3``
for B and ``tol * W^2`` for C.
"""
import logging
from dataclasses import dataclass

import numpy as np

from .invariants import InvariantGrid, delta_matrix
from .linalg4 import rank_2x3

log = logging.getLogger(__name__)

TAGS = ("Hyperbolic", "Elliptic", "Parabolic")
SUBTYPES = ("InflectionImaginary", "NonDegenerate", "InflectionReal", "InflectionFlat", "Unresolved")
DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class PointClass:
    tag: str
    subtype: str
    delta_p: float
    K: float
    rank_A: int
    hypothesis: str = None

    @property
    def label(self):
        return self.tag if self.subtype is None else "%s/%s" % (self.tag, self.subtype)


def delta_p(report):
    """Closed form ``-(B^2 + 4 Q^2 A C^2) / (4 W^6)``."""
    Q, W = report.Q, report.W
    return -(report.B**2 + 4 * Q**2 * report.A * report.C**2) / (4 * W**6)


def delta_p_det(report):
    """Quarter determinant of the 4x4 matrix built from the shape-operator entries."""
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.linalg.det(delta_matrix(report.A_matrix)) / 4)


def _bands(Q, W, tol):
    return {
        "delta_p": tol * W**6,
        "K": tol * W**4,
        "A": tol * Q**2 * W**2,
        "B": tol * Q**2 * W**3,
        "C": tol * W**2,
    }


def _ranks(h, tol):
    # rank_2x3 on a stack of (2, 3) matrices
    scale = np.max(np.abs(h), axis=(-2, -1))
    minors = np.stack([h[..., 0, i] * h[..., 1, j] - h[..., 0, j] * h[..., 1, i]
                       for i, j in ((0, 1), (0, 2), (1, 2))], axis=-1)
    two = np.max(np.abs(minors), axis=-1) > tol * scale
    return np.where(two, 2, np.where(scale > tol * (1.0 + scale), 1, 0))


_HYPOTHESES = (None, "A<0 and B^2+4Q^2AC^2=0", "A=B=0!=C")


def _classify(Q, W, A, B, C, K, dp, h, tol):
    """Vectorized case analysis; returns label codes, subtype codes, hypothesis codes, ranks."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    band = _bands(Q, W, tol)
    rank = _ranks(h, tol)
    small = {x: np.abs(v) <= band[x] for x, v in (("A", A), ("B", B), ("C", C))}
    tag = np.select([dp < -band["delta_p"], dp > band["delta_p"]], [0, 1], 2)
    negative_K = (K < -band["K"]) & (rank >= 1)
    subtype = np.select(
        [
            small["A"] & small["B"] & small["C"],
            (K > band["K"]) & small["B"] & small["C"] & (A > band["A"]),
            negative_K & (rank == 2),
            negative_K & (rank == 1),
        ],
        [3, 0, 1, 2],
        4,
    )
    hyp = np.select([A < -band["A"], small["A"] & small["B"] & ~small["C"]], [1, 2], 0)
    hyp = np.where((tag == 2) & (subtype <= 2) & (subtype >= 1), hyp, 0)
    return tag, subtype, hyp, rank


def _point_class(tag, subtype, hyp, dp, K, rank):
    parabolic = tag == 2
    return PointClass(
        TAGS[tag], SUBTYPES[subtype] if parabolic else None, float(dp), float(K), int(rank),
        _HYPOTHESES[hyp],
    )


def classify_point(report, tol=DEFAULT_TOL):
    dp = delta_p(report)
    codes = _classify(report.Q, report.W, report.A, report.B, report.C, report.K, dp,
                      report.A_matrix, tol)
    tag, subtype, hyp, rank = (int(c) for c in codes)
    if hyp:
        log.debug("parabolic point %s: rank %d, hypothesis %s", report.point, rank, _HYPOTHESES[hyp])
    return _point_class(tag, subtype, hyp, dp, report.K, rank)


def classify_grid(grid, tol=DEFAULT_TOL):
    """Object array of :class:`PointClass` (``None`` on degenerate cells)."""
    out = np.empty(grid.shape, dtype=object)
    ok = ~grid.degenerate
    dp = grid.delta_p[ok]
    K = grid.K[ok]
    codes = _classify(grid.Q[ok], grid.W[ok], grid.A[ok], grid.B[ok], grid.C[ok], K, dp,
                      grid.h[ok], tol)
    tag, subtype, hyp, rank = codes
    for n, cell in enumerate(np.argwhere(ok)):
        out[tuple(cell)] = _point_class(tag[n], subtype[n], hyp[n], dp[n], K[n], rank[n])
    return out


def histogram(classes):
    counts = {}
    for c in np.ravel(classes):
        if c is not None:
            counts[c.label] = counts.get(c.label, 0) + 1
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class Predicate:
    holds: bool
    worst: float
    witness: tuple = None


def _arrays(reports):
    if isinstance(reports, InvariantGrid):
        ok = ~reports.degenerate
        cells = [tuple(int(x) for x in c) for c in np.argwhere(ok)]
        pick = lambda a: a[ok]  # noqa: E731
        return cells, {
            "Q": pick(reports.Q), "W": pick(reports.W), "A": pick(reports.A),
            "B": pick(reports.B), "C": pick(reports.C), "K": pick(reports.K),
            "gap": pick(reports.wintgen_gap),
        }
    reports = list(reports)
    cells = [r.cell if r.cell is not None else r.point for r in reports]
    get = lambda f: np.array([f(r) for r in reports], float)  # noqa: E731
    return cells, {
        "Q": get(lambda r: r.Q), "W": get(lambda r: r.W), "A": get(lambda r: r.A),
        "B": get(lambda r: r.B), "C": get(lambda r: r.C), "K": get(lambda r: r.K),
        "gap": get(lambda r: r.wintgen_gap),
    }


def violations(reports):
    """Per-cell violation measure of each surface predicate (0 means it holds exactly)."""
    cells, a = _arrays(reports)
    QW2 = a["Q"] ** 2 * a["W"] ** 2
    return cells, {
        "flat": np.abs(a["K"]),
        "minimal": np.maximum(np.abs(a["B"]), np.abs(QW2 + a["A"])) / QW2,
        "semi_umbilic": np.minimum(np.abs(QW2 - a["A"]) / QW2, np.abs(a["C"]) / a["W"] ** 2),
        "wintgen_ideal": np.abs(a["gap"]),
    }


def surface_predicates(reports, tol=DEFAULT_TOL):
    """Flat, minimal, semi-umbilic and Wintgen-ideal flags over all non-degenerate cells.

    ``reports`` is an :class:`InvariantGrid` or an iterable of reports.  A
    flag holds iff its violation measure is within ``tol`` at every cell;
    otherwise ``witness`` names the worst cell.
    """
    cells, v = violations(reports)
    out = {}
    for name, values in v.items():
        if len(values) == 0:
            out[name] = Predicate(True, 0.0)
            continue
        worst = int(np.argmax(values))
        holds = bool(values[worst] <= tol)
        out[name] = Predicate(holds, float(values[worst]), None if holds else cells[worst])
    return out
