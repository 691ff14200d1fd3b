"""Moore-Penrose and least-squares ([1,3]) generalized inverses over R, C, H."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import (
    EmbeddingError,
    Matrix,
    ShapeError,
    adjoint_embed,
    adjoint_extract,
    identity,
)
from .scalar import ScalarKind

__all__ = [
    "RANK_RTOL",
    "TOL_MP",
    "MPReport",
    "adjoint_embed",
    "adjoint_extract",
    "mp_inverse",
    "verify_mp",
    "mp13_inverse",
    "perturbation",
]

RANK_RTOL = 1e-12
TOL_MP = 1e-9


def _complex_pinv(a: np.ndarray) -> np.ndarray:
    r, c = a.shape
    if a.size == 0:
        return np.zeros((c, r), dtype=a.dtype)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    cutoff = RANK_RTOL * s[0] * max(r, c)
    keep = s > cutoff
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s) @ u.conj().T


def mp_inverse(a: Matrix) -> Matrix:
    """The Moore-Penrose inverse of ``a``.

    Singular values below ``RANK_RTOL * s_max * max(rows, cols)`` count as zero.
    Quaternion matrices are inverted through their complex adjoint and pulled
    back; a pull-back failure means the kernel is broken, not the input.
    """
    if a.kind is ScalarKind.QUATERNION:
        g = _complex_pinv(adjoint_embed(a).data)
        try:
            return adjoint_extract(Matrix(g, ScalarKind.COMPLEX), tol=TOL_MP)
        except EmbeddingError as exc:
            raise RuntimeError(f"quaternion pseudoinverse lost adjoint structure: {exc}") from exc
    return Matrix(_complex_pinv(a.data).astype(a.data.dtype, copy=False), a.kind)


@dataclass(frozen=True)
class MPReport:
    """Frobenius defects of the four Penrose equations.

    ``passed[i]`` holds iff ``residuals[i] <= tol * (1 + |A|_F)``.
    """

    residuals: tuple[float, float, float, float]
    passed: tuple[bool, bool, bool, bool]
    tol: float

    def ok(self, axioms=(1, 2, 3, 4)) -> bool:
        return all(self.passed[i - 1] for i in axioms)


def verify_mp(a: Matrix, g: Matrix, tol: float = TOL_MP) -> MPReport:
    """Check MP.1-MP.4 for candidate inverse ``g`` using native arithmetic."""
    if g.shape != (a.cols, a.rows):
        raise ShapeError(f"candidate inverse must be {(a.cols, a.rows)}, got {g.shape}")
    ag = a @ g
    ga = g @ a
    res = (
        (ag @ a).dist(a),
        (ga @ g).dist(g),
        ag.dagger().dist(ag),
        ga.dagger().dist(ga),
    )
    bound = tol * (1.0 + a.norm())
    return MPReport(res, tuple(r <= bound for r in res), tol)


def perturbation(shape: tuple[int, int], kind: ScalarKind, seed: int | None) -> Matrix:
    """Seeded matrix with components uniform in [-1, 1]; all zeros for ``seed=None``."""
    r, c = shape
    if seed is None:
        comps = np.zeros((r, c, kind.ncomp))
    else:
        comps = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(r, c, kind.ncomp))
    return Matrix._from_comps(comps, kind)


def mp13_inverse(a: Matrix, seed: int | None) -> Matrix:
    """A least-squares ([MP.1, MP.3]) inverse ``A° + (I - A°A) W``.

    ``W`` comes from :func:`perturbation`. For rank-deficient ``a`` a nonzero ``W``
    generally breaks MP.2/MP.4; for full column rank the result is ``A°``.
    """
    g = mp_inverse(a)
    w = perturbation((a.cols, a.rows), a.kind, seed)
    return g + (identity(a.cols, a.kind) - g @ a) @ w
