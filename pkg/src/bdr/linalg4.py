"""Small exact linear algebra in E^4.

Vectors are plain ``numpy`` arrays whose last axis has length 4; every
function broadcasts over leading axes so whole grids can be processed at
once.  2x2 and 2x3 matrices are likewise ``(..., 2, 2)`` / ``(..., 2, 3)``
arrays.
"""
import numpy as np

from .errors import DegenerateInput

E = np.eye(4)


def vec4(x, y, z, w):
    """Build a finite 4-vector."""
    v = np.array([x, y, z, w], dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("Vec4 components must be finite, got %r" % (v,))
    return v


def inner(u, v):
    return np.einsum("...i,...i->...", u, v)


def norm(u):
    return np.sqrt(inner(u, u))


def _det3(a, b, c):
    # rows a, b, c of shape (..., 3)
    return (
        a[..., 0] * (b[..., 1] * c[..., 2] - b[..., 2] * c[..., 1])
        - a[..., 1] * (b[..., 0] * c[..., 2] - b[..., 2] * c[..., 0])
        + a[..., 2] * (b[..., 0] * c[..., 1] - b[..., 1] * c[..., 0])
    )


def ternary_cross(u, v, w):
    """Ternary cross product u x v x w in E^4.

    Defined as the cofactor expansion of ``det[[e1, e2, e3, e4], u, v, w]``
    along the first (basis) row, so ``ternary_cross(e1, e2, e3) == -e4``.
    The result is orthogonal to all three arguments and its length is the
    3-volume of the parallelepiped they span.
    """
    u, v, w = np.broadcast_arrays(
        np.asarray(u, float), np.asarray(v, float), np.asarray(w, float)
    )
    out = np.empty(u.shape)
    for i in range(4):
        cols = [j for j in range(4) if j != i]
        out[..., i] = (-1) ** i * _det3(u[..., cols], v[..., cols], w[..., cols])
    return out


def _det(m):
    with np.errstate(divide="ignore", invalid="ignore"):  # singular input: LU hits a zero pivot
        return np.linalg.det(m)


def det4(rows):
    """Determinant of a stack of 4x4 matrices given row-wise."""
    return _det(np.asarray(rows, float))


def gram(vs):
    vs = np.asarray(vs, float)
    return np.einsum("...ik,...jk->...ij", vs, vs)


def parallelepiped_volume(*vs):
    """k-volume spanned by the given vectors (square root of the Gram determinant)."""
    return np.sqrt(np.maximum(_det(gram(np.stack(vs, axis=-2))), 0.0))


def gram_schmidt(vs, tol=1e-10):
    """Orthonormalize ``vs`` in order, preserving the flag they span.

    Uses modified Gram-Schmidt with one re-orthogonalization pass, which
    keeps the output Gram matrix within a few ulps of the identity.  Raises
    :class:`DegenerateInput` when a residual falls below ``tol`` (scaled by
    the input vector's length when that exceeds one).
    """
    out = []
    for v in vs:
        v = np.asarray(v, float)
        r = v.copy()
        for _ in range(2):
            for q in out:
                r = r - inner(r, q) * q
        n = norm(r)
        if n < tol * max(1.0, float(norm(v))):
            raise DegenerateInput(
                "vector %d is (numerically) dependent on its predecessors" % len(out)
            )
        out.append(r / n)
    return out


def symmetric_orthonormalize(vs, against=None):
    """Loewdin orthonormalization of the rows of a ``(..., n, 4)`` stack.

    Rows are first projected off the unit vectors ``against`` (shape
    ``(..., 4)``) when given, then replaced by ``(V V^T)^(-1/2) V``, the
    orthonormal set nearest to them.  Unlike Gram-Schmidt this commutes with
    any rotation mixing the rows.
    """
    v = np.array(vs, float)
    if against is not None:
        a = np.asarray(against, float)[..., None, :]
        v = v - np.sum(v * a, axis=-1)[..., None] * a
    w, U = np.linalg.eigh(np.einsum("...ik,...jk->...ij", v, v))
    with np.errstate(divide="ignore", invalid="ignore"):  # dependent rows give non-finite output
        inv_sqrt = np.einsum("...ij,...j,...kj->...ik", U, 1.0 / np.sqrt(w), U)
    return inv_sqrt @ v


def rank_2x3(m, tol=1e-10):
    """Numeric rank of a 2x3 matrix by the largest-minor criterion.

    Rank 2 iff some 2x2 minor exceeds ``tol * max|m|``; rank >= 1 iff some
    entry exceeds ``tol * (1 + max|m|)``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = np.asarray(m, float)
    if m.shape != (2, 3):
        raise ValueError("expected a 2x3 matrix, got shape %s" % (m.shape,))
    scale = float(np.max(np.abs(m)))
    minors = [
        m[0, i] * m[1, j] - m[0, j] * m[1, i] for i, j in ((0, 1), (0, 2), (1, 2))
    ]
    if max(abs(x) for x in minors) > tol * scale:
        return 2
    if scale > tol * (1.0 + scale):
        return 1
    return 0
