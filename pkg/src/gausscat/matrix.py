"""Dense matrices over R, C or H with the conjugate-transpose dagger.

Storage per kind:

* real: ``float64`` array of shape ``(rows, cols)``
* complex: ``complex128`` array of shape ``(rows, cols)``
* quaternion: ``float64`` array of shape ``(rows, cols, 4)`` in ``(w, x, y, z)`` order

Quaternion products are computed natively with the Hamilton rule. Spectral
questions about quaternion matrices (positivity, factorization) go through the
complex adjoint embedding ``chi(A1 + A2 j) = [[A1, A2], [-conj(A2), conj(A1)]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .scalar import KindMismatchError, Scalar, ScalarKind, parse_scalar

__all__ = [
    "TOL_HERM",
    "TOL_PSD",
    "TOL_FACT",
    "clamp_positive",
    "ShapeError",
    "NotPositiveError",
    "EmbeddingError",
    "Matrix",
    "PositiveMatrix",
    "identity",
    "zeros",
    "delta",
    "swap_perm",
    "direct_sum",
    "vstack",
    "hstack",
    "block_at",
    "adjoint_embed",
    "adjoint_extract",
    "hermitian_eigh",
    "is_positive",
    "positive_factor",
    "certify",
    "qmul",
    "stack_blocks",
]

TOL_HERM = 1e-9
TOL_PSD = 1e-9
TOL_FACT = 1e-10


class ShapeError(ValueError):
    """Incompatible matrix shapes."""


class NotPositiveError(ValueError):
    """Matrix is not dagger-positive (Hermitian PSD) within tolerance."""


class EmbeddingError(ValueError):
    """A complex matrix lacks the block structure of a quaternion adjoint."""


def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise (broadcasting) Hamilton product of ``(..., 4)`` arrays."""
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def _qmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    P = [[a[..., i] @ b[..., j] for j in range(4)] for i in range(4)]
    return np.stack(
        [
            P[0][0] - P[1][1] - P[2][2] - P[3][3],
            P[0][1] + P[1][0] + P[2][3] - P[3][2],
            P[0][2] - P[1][3] + P[2][0] + P[3][1],
            P[0][3] + P[1][2] - P[2][1] + P[3][0],
        ],
        axis=-1,
    )


_DTYPE = {ScalarKind.REAL: np.float64, ScalarKind.COMPLEX: np.complex128,
          ScalarKind.QUATERNION: np.float64}


class Matrix:
    """Immutable dense matrix tagged with its scalar kind."""

    __slots__ = ("kind", "data")
    __array_ufunc__ = None  # keep numpy from hijacking binary operators

    def __init__(self, data, kind: ScalarKind = ScalarKind.REAL):
        kind = ScalarKind.parse(kind)
        arr = np.array(data, dtype=_DTYPE[kind], copy=True)
        if kind is ScalarKind.QUATERNION:
            if arr.ndim != 3 or arr.shape[2] != 4:
                raise ShapeError(f"quaternion data must have shape (r, c, 4), got {arr.shape}")
        elif arr.ndim != 2:
            raise ShapeError(f"matrix data must be 2-d, got shape {arr.shape}")
        arr.flags.writeable = False
        self.kind = kind
        self.data = arr

    # construction helpers

    @classmethod
    def from_scalars(cls, rows: Sequence[Sequence[Scalar]], kind: ScalarKind,
                     shape: tuple[int, int] | None = None) -> Matrix:
        r = len(rows)
        c = len(rows[0]) if r else (shape[1] if shape else 0)
        if shape is not None and shape != (r, c):
            raise ShapeError(f"expected shape {shape}, literal has {(r, c)}")
        if any(len(row) != c for row in rows):
            raise ShapeError("ragged matrix literal")
        comps = np.zeros((r, c, kind.ncomp))
        for i, row in enumerate(rows):
            for j, q in enumerate(row):
                if q.kind is not kind:
                    raise KindMismatchError(f"{q.kind.value} entry in {kind.value} matrix")
                comps[i, j] = q.comps
        return cls._from_comps(comps, kind)

    @classmethod
    def from_literal(cls, rows, kind: ScalarKind, shape: tuple[int, int] | None = None) -> Matrix:
        """Build from nested lists of scalar literals (numbers or strings)."""
        parsed = [[parse_scalar(v, kind) for v in row] for row in rows]
        return cls.from_scalars(parsed, kind, shape)

    @classmethod
    def _from_comps(cls, comps: np.ndarray, kind: ScalarKind) -> Matrix:
        if kind is ScalarKind.REAL:
            return cls(comps[..., 0], kind)
        if kind is ScalarKind.COMPLEX:
            return cls(comps[..., 0] + 1j * comps[..., 1], kind)
        return cls(comps, kind)

    def components(self) -> np.ndarray:
        """Real components as an array of shape ``(rows, cols, ncomp)``."""
        if self.kind is ScalarKind.REAL:
            return self.data[..., None].copy()
        if self.kind is ScalarKind.COMPLEX:
            return np.stack([self.data.real, self.data.imag], axis=-1)
        return self.data.copy()

    # shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def entry(self, i: int, j: int) -> Scalar:
        return Scalar(self.kind, tuple(self.components()[i, j]))

    def to_scalars(self) -> list[list[Scalar]]:
        comps = self.components()
        return [[Scalar(self.kind, tuple(comps[i, j])) for j in range(self.cols)]
                for i in range(self.rows)]

    def sub(self, rows: slice, cols: slice) -> Matrix:
        return Matrix(self.data[rows, cols], self.kind)

    # algebra

    def _same_kind(self, other: Matrix) -> None:
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.kind is not self.kind:
            raise KindMismatchError(f"{self.kind.value} vs {other.kind.value}")

    def __matmul__(self, other: Matrix) -> Matrix:
        self._same_kind(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        if self.kind is ScalarKind.QUATERNION:
            return Matrix(_qmatmul(self.data, other.data), self.kind)
        return Matrix(self.data @ other.data, self.kind)

    def __add__(self, other: Matrix) -> Matrix:
        self._same_kind(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return Matrix(self.data + other.data, self.kind)

    def __sub__(self, other: Matrix) -> Matrix:
        self._same_kind(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {self.shape} and {other.shape}")
        return Matrix(self.data - other.data, self.kind)

    def __neg__(self) -> Matrix:
        return Matrix(-self.data, self.kind)

    def scale(self, c: Scalar | float) -> Matrix:
        """Left scalar multiplication ``c * A`` (the side matters for quaternions)."""
        if not isinstance(c, Scalar):
            c = parse_scalar(float(c), self.kind)
        if c.kind is not self.kind:
            raise KindMismatchError(f"{c.kind.value} scalar on {self.kind.value} matrix")
        if self.kind is ScalarKind.REAL:
            return Matrix(c.comps[0] * self.data, self.kind)
        if self.kind is ScalarKind.COMPLEX:
            return Matrix(complex(*c.comps) * self.data, self.kind)
        return Matrix(qmul(np.asarray(c.comps), self.data), self.kind)

    def dagger(self) -> Matrix:
        if self.kind is ScalarKind.QUATERNION:
            t = np.swapaxes(self.data, 0, 1).copy()
            t[..., 1:] *= -1.0
            return Matrix(t, self.kind)
        return Matrix(self.data.conj().T, self.kind)

    @property
    def H(self) -> Matrix:
        return self.dagger()

    def norm(self) -> float:
        """Frobenius norm."""
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def max_abs(self) -> float:
        """Largest entry modulus (max-norm); 0 for empty matrices."""
        if self.data.size == 0:
            return 0.0
        return float(np.max(np.sqrt(np.sum(self.components() ** 2, axis=-1))))

    def dist(self, other: Matrix) -> float:
        return (self - other).norm()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.kind is other.kind and self.data.shape == other.data.shape
                and bool(np.array_equal(self.data, other.data)))

    __hash__ = None

    def allclose(self, other: Matrix, tol: float = 1e-12) -> bool:
        return self.shape == other.shape and self.dist(other) <= tol * (1.0 + other.norm())

    def __repr__(self) -> str:
        return f"Matrix({self.kind.value}, {self.rows}x{self.cols})"


# structural constructors

def zeros(r: int, c: int, kind: ScalarKind = ScalarKind.REAL) -> Matrix:
    if r < 0 or c < 0:
        raise ShapeError("sizes must be nonnegative")
    shape = (r, c, 4) if kind is ScalarKind.QUATERNION else (r, c)
    return Matrix(np.zeros(shape), kind)


def identity(n: int, kind: ScalarKind = ScalarKind.REAL) -> Matrix:
    if n < 0:
        raise ShapeError("size must be nonnegative")
    comps = np.zeros((n, n, kind.ncomp))
    comps[..., 0] = np.eye(n)
    return Matrix._from_comps(comps, kind)


def vstack(a: Matrix, b: Matrix) -> Matrix:
    a._same_kind(b)
    if a.cols != b.cols:
        raise ShapeError(f"vstack width mismatch {a.cols} vs {b.cols}")
    return Matrix(np.concatenate([a.data, b.data], axis=0), a.kind)


def hstack(a: Matrix, b: Matrix) -> Matrix:
    a._same_kind(b)
    if a.rows != b.rows:
        raise ShapeError(f"hstack height mismatch {a.rows} vs {b.rows}")
    return Matrix(np.concatenate([a.data, b.data], axis=1), a.kind)


def direct_sum(a: Matrix, b: Matrix) -> Matrix:
    """Block-diagonal ``[[a, 0], [0, b]]``."""
    a._same_kind(b)
    top = hstack(a, zeros(a.rows, b.cols, a.kind))
    bottom = hstack(zeros(b.rows, a.cols, a.kind), b)
    return vstack(top, bottom)


def block_at(a: Matrix, row_split: int, col_split: int) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    """Return ``(top_left, top_right, bottom_left, bottom_right)``."""
    if not (0 <= row_split <= a.rows and 0 <= col_split <= a.cols):
        raise ShapeError(f"split ({row_split}, {col_split}) outside {a.shape}")
    r, c = slice(None, row_split), slice(col_split, None)
    r2, c2 = slice(row_split, None), slice(None, col_split)
    return a.sub(r, c2), a.sub(r, c), a.sub(r2, c2), a.sub(r2, c)


def delta(n: int, kind: ScalarKind = ScalarKind.REAL) -> Matrix:
    """The diagonal ``[I_n; I_n]`` of shape ``2n x n``."""
    i = identity(n, kind)
    return vstack(i, i)


def swap_perm(n: int, m: int, kind: ScalarKind = ScalarKind.REAL) -> Matrix:
    """``[[0, I_m], [I_n, 0]]``: sends ``[a; b]`` (sizes n, m) to ``[b; a]``."""
    top = hstack(zeros(m, n, kind), identity(m, kind))
    bottom = hstack(identity(n, kind), zeros(n, m, kind))
    return vstack(top, bottom)


# quaternion adjoint embedding

def adjoint_embed(a: Matrix) -> Matrix:
    """Complex adjoint ``chi(A)`` of a quaternion matrix, shape ``2r x 2c``."""
    if a.kind is not ScalarKind.QUATERNION:
        raise KindMismatchError(f"expected quaternion matrix, got {a.kind.value}")
    q = a.data
    a1 = q[..., 0] + 1j * q[..., 1]
    a2 = q[..., 2] + 1j * q[..., 3]
    return Matrix(np.block([[a1, a2], [-a2.conj(), a1.conj()]]), ScalarKind.COMPLEX)


def adjoint_extract(b: Matrix, tol: float = 1e-9) -> Matrix:
    """Inverse of :func:`adjoint_embed`.

    The two block copies are averaged; the defect between them must not exceed
    ``tol * (1 + |B|)``.
    """
    if b.kind is not ScalarKind.COMPLEX:
        raise KindMismatchError(f"expected complex matrix, got {b.kind.value}")
    if b.rows % 2 or b.cols % 2:
        raise EmbeddingError(f"odd shape {b.shape} cannot be an adjoint image")
    r, c = b.rows // 2, b.cols // 2
    d = b.data
    p, q, s, t = d[:r, :c], d[:r, c:], d[r:, :c], d[r:, c:]
    defect = np.sqrt(np.sum(np.abs(p - t.conj()) ** 2) + np.sum(np.abs(q + s.conj()) ** 2))
    if defect > tol * (1.0 + b.norm()):
        raise EmbeddingError(f"adjoint block symmetry violated by {defect:.3e}")
    a1 = 0.5 * (p + t.conj())
    a2 = 0.5 * (q - s.conj())
    return Matrix(np.stack([a1.real, a1.imag, a2.real, a2.imag], axis=-1), ScalarKind.QUATERNION)


# positivity

def _complex_form(a: Matrix) -> np.ndarray:
    if a.kind is ScalarKind.QUATERNION:
        return adjoint_embed(a).data
    return a.data


def _check_square(a: Matrix) -> None:
    if a.rows != a.cols:
        raise ShapeError(f"expected a square matrix, got {a.shape}")


def hermitian_eigh(a: Matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of the Hermitian part of ``a`` (or of ``chi(a)`` for H).

    For quaternions the spectrum is that of the 2n x 2n adjoint, where every
    eigenvalue appears twice.
    """
    _check_square(a)
    m = _complex_form(a)
    if m.size == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=m.dtype)
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def _hermitian_defect(a: Matrix) -> float:
    return a.dist(a.dagger())


def is_positive(a: Matrix, tol_herm: float = TOL_HERM, tol_psd: float = TOL_PSD,
                scale: float | None = None) -> bool:
    """True iff ``a`` is Hermitian and positive semidefinite.

    Tolerances are relative to ``scale``, by default ``|a|_F``. Pass the size of
    the operands when ``a`` is a difference that should cancel to ~0.
    """
    _check_square(a)
    scale = a.norm() if scale is None else max(scale, a.norm())
    if scale == 0.0:
        return True
    if _hermitian_defect(a) > tol_herm * scale:
        return False
    w, _ = hermitian_eigh(a)
    return bool(w.min() >= -tol_psd * scale)


def _floor(n: int, scale: float) -> float:
    # eigenvalues this small are rounding noise around an exact zero
    return 64.0 * np.finfo(float).eps * max(n, 1) * scale


def _from_complex_form(m: np.ndarray, kind: ScalarKind) -> Matrix:
    if kind is ScalarKind.REAL:
        return Matrix(m.real, kind)
    if kind is ScalarKind.COMPLEX:
        return Matrix(m, kind)
    return adjoint_extract(Matrix(m, ScalarKind.COMPLEX))


def _spectral_map(a: Matrix, fn, scale: float) -> Matrix:
    w, v = hermitian_eigh(a)
    w = np.where(w <= _floor(a.rows, scale), 0.0, w)
    return _from_complex_form((v * fn(w)) @ v.conj().T, a.kind)


def clamp_positive(a: Matrix, scale: float | None = None) -> Matrix:
    """Project a nearly positive matrix onto the positive cone.

    Negative and rounding-level eigenvalues (relative to ``scale``) become 0.
    """
    if not is_positive(a, scale=scale):
        raise NotPositiveError("matrix is not Hermitian positive semidefinite")
    if a.rows == 0:
        return a
    return _spectral_map(a, lambda w: w, a.norm() if scale is None else max(scale, a.norm()))


def positive_factor(a: Matrix, tol_fact: float = TOL_FACT) -> Matrix:
    """A square ``phi`` with ``phi^dagger phi = a``.

    The principal (Hermitian) square root is returned; eigenvalues in
    ``(-tol_psd, 0)`` and rounding-level positive ones are treated as 0.
    """
    if not is_positive(a):
        raise NotPositiveError("matrix is not Hermitian positive semidefinite")
    if a.rows == 0:
        return a
    phi = _spectral_map(a, np.sqrt, a.norm())
    residual = (phi.dagger() @ phi).dist(a)
    if residual > tol_fact * (1.0 + a.norm()):
        raise NotPositiveError(f"factorization residual {residual:.3e} too large")
    return phi


@dataclass(frozen=True)
class PositiveMatrix:
    """A positive matrix together with a certificate ``phi`` (``phi^dagger phi = base``)."""

    base: Matrix
    certificate: Matrix

    def residual(self) -> float:
        return (self.certificate.dagger() @ self.certificate).dist(self.base)


def certify(a: Matrix) -> PositiveMatrix:
    return PositiveMatrix(a, positive_factor(a))


def stack_blocks(blocks: Iterable[Iterable[Matrix]]) -> Matrix:
    """Assemble a block matrix from rows of blocks."""
    rows = [list(r) for r in blocks]
    out = None
    for row in rows:
        acc = row[0]
        for b in row[1:]:
            acc = hstack(acc, b)
        out = acc if out is None else vstack(out, acc)
    return out
