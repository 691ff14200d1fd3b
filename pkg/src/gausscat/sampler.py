"""Monte Carlo semantics for Gaussian morphisms.

A morphism ``(f, p, x)`` applied to input ``a`` with mean selector ``e`` draws
``y = f a + x e + L eps`` with ``L = phi^dagger`` for the certificate
``phi^dagger phi = p`` and ``eps`` a standard *proper* noise vector:

* real: i.i.d. N(0, 1)
* complex: real and imaginary parts i.i.d. N(0, 1/2)
* quaternion: four real parts i.i.d. N(0, 1/4)

Randomness comes from the counter-based Philox4x64-10 generator keyed by
``seed + (stream << 64)``; sample ``i`` reads counter blocks
``[i * B, (i + 1) * B)`` and turns them into normals by Box-Muller. A sample
therefore depends only on ``(seed, stream, i)``, never on how work is chunked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gauss import ConditionalSplit, GaussMorphism, compose, conditional_mp, split_blocks
from .matrix import Matrix, NotPositiveError, is_positive, qmul
from .scalar import ScalarKind

__all__ = [
    "SampleBatch",
    "MomentEstimate",
    "SemanticsReport",
    "standard_noise",
    "push_forward",
    "sample",
    "estimate_moments",
    "check_composition_semantics",
    "check_conditional_semantics",
    "compare_moments",
    "MEAN_Z",
    "COV_Z",
]

MEAN_Z = 3.0
COV_Z = 5.0
_TWO53 = float(2 ** 53)


def _uniforms(seed: int, stream: int, start: int, n: int, per_sample: int) -> np.ndarray:
    """Uniforms in (0, 1], shape ``(n, 4 * blocks)`` for ``blocks = ceil(per_sample / 4)``."""
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must fit in 64 bits")
    blocks = -(-per_sample // 4)
    bitgen = np.random.Philox(key=seed + (stream << 64), counter=start * blocks)
    raw = bitgen.random_raw(n * blocks * 4).reshape(n, blocks * 4)
    return ((raw >> np.uint64(11)).astype(np.float64) + 1.0) / _TWO53


def _normals(seed: int, stream: int, start: int, n: int, count: int) -> np.ndarray:
    """``(n, count)`` standard normals via Box-Muller on paired uniforms."""
    pairs = -(-count // 2)
    u = _uniforms(seed, stream, start, n, 2 * pairs)
    u1, u2 = u[:, 0:2 * pairs:2], u[:, 1:2 * pairs:2]
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.empty((n, 2 * pairs))
    z[:, 0::2] = r * np.cos(2.0 * np.pi * u2)
    z[:, 1::2] = r * np.sin(2.0 * np.pi * u2)
    return z[:, :count]


def standard_noise(kind: ScalarKind, dim: int, n: int, seed: int, stream: int = 0,
                   start: int = 0) -> Matrix:
    """Standard proper noise as a ``dim x n`` matrix (one column per sample)."""
    z = _normals(seed, stream, start, n, dim * kind.ncomp).reshape(n, dim, kind.ncomp)
    z = z / np.sqrt(kind.ncomp)
    return Matrix._from_comps(np.swapaxes(z, 0, 1), kind)


def _as_column(v, kind: ScalarKind, size: int, what: str) -> Matrix:
    if isinstance(v, Matrix):
        col = v
    else:
        col = Matrix.from_literal([[s] for s in v], kind, shape=(len(v), 1)) if len(v) else \
            Matrix._from_comps(np.zeros((0, 1, kind.ncomp)), kind)
    if col.shape != (size, 1):
        raise ValueError(f"{what} must be a vector of length {size}, got shape {col.shape}")
    return col


def _broadcast(col: Matrix, n: int) -> Matrix:
    return Matrix(np.repeat(col.data, n, axis=1), col.kind)


def push_forward(F: GaussMorphism, inputs: Matrix, e: Matrix, seed: int, stream: int = 0,
                 start: int = 0) -> Matrix:
    """Draw one output per input column: ``f a_i + x e + phi^dagger eps_i``."""
    if not is_positive(F.p):
        raise NotPositiveError("cannot sample: noise covariance is not positive")
    n = inputs.cols
    noise = standard_noise(F.kind, F.cod, n, seed, stream, start)
    mean = F.x @ e
    return F.f @ inputs + _broadcast(mean, n) + F.certificate.dagger() @ noise


@dataclass(frozen=True)
class SampleBatch:
    """``outputs`` is a ``cod x n_samples`` matrix, one sample per column."""

    kind: ScalarKind
    n_samples: int
    outputs: Matrix
    seed: int


def sample(F: GaussMorphism, input, e, n: int, seed: int, stream: int = 0) -> SampleBatch:
    a = _as_column(input, F.kind, F.dom, "input")
    ev = _as_column(e, F.kind, F.x_dim, "e")
    out = push_forward(F, _broadcast(a, n), ev, seed, stream)
    return SampleBatch(F.kind, n, out, seed)


_UNITS = {"i": (0.0, 1.0, 0.0, 0.0), "j": (0.0, 0.0, 1.0, 0.0), "k": (0.0, 0.0, 0.0, 1.0)}


def _eta_involution(q: np.ndarray, eta: str) -> np.ndarray:
    """``q -> -eta q eta`` on ``(..., 4)`` arrays."""
    u = np.asarray(_UNITS[eta])
    return -qmul(qmul(u, q), u)


def _outer_terms(d: np.ndarray, kind: ScalarKind, transpose_only: bool = False,
                 eta: str | None = None) -> np.ndarray:
    """Per-sample products ``d_i conj(d_j)`` with components on the last axis.

    ``d`` is the centred data (``cod x n`` for R/C, ``cod x n x 4`` for H).
    Returns shape ``(cod, cod, n, ncomp)``.
    """
    if kind is ScalarKind.QUATERNION:
        right = d if eta is None else _eta_involution(d, eta)
        right = right * np.array([1.0, -1.0, -1.0, -1.0])
        return qmul(d[:, None], right[None, :])
    right = d if transpose_only else d.conj()
    prod = d[:, None, :] * right[None, :, :]
    if kind is ScalarKind.REAL:
        return prod[..., None]
    return np.stack([prod.real, prod.imag], axis=-1)


@dataclass(frozen=True)
class MomentEstimate:
    """Sample moments with per-component standard errors.

    ``pseudo`` is empty for R, holds the pseudocovariance ``E[d d^T]`` for C
    and the complementary covariances for ``eta = i, j, k`` for H.
    """

    mean: Matrix
    covariance: Matrix
    pseudo: list[Matrix]
    mean_se: np.ndarray
    covariance_se: np.ndarray
    pseudo_se: list[np.ndarray] = field(default_factory=list)


def _second_moment(terms: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    est = terms.sum(axis=2) / (n - 1)
    se = terms.std(axis=2, ddof=1) / np.sqrt(n)
    return est, se


def estimate_moments(batch: SampleBatch, pseudo: bool = True) -> MomentEstimate:
    """Sample mean and covariance; ``pseudo=False`` skips the complementary terms."""
    n = batch.n_samples
    if n < 2:
        raise ValueError("need at least two samples")
    kind = batch.kind
    comps = batch.outputs.components()  # (cod, n, ncomp)
    mean_c = comps.mean(axis=1)
    mean_se = comps.std(axis=1, ddof=1) / np.sqrt(n)
    mean = Matrix._from_comps(mean_c[:, None, :], kind)
    dc = comps - mean_c[:, None, :]
    if kind is ScalarKind.REAL:
        d = dc[..., 0]
    elif kind is ScalarKind.COMPLEX:
        d = dc[..., 0] + 1j * dc[..., 1]
    else:
        d = dc
    cov_c, cov_se = _second_moment(_outer_terms(d, kind), n)
    cov = Matrix._from_comps(cov_c, kind)
    cov = Matrix(0.5 * (cov + cov.dagger()).data, kind)
    pseudo_m, pseudo_se = [], []
    if pseudo and kind is ScalarKind.COMPLEX:
        est, se = _second_moment(_outer_terms(d, kind, transpose_only=True), n)
        pseudo_m.append(Matrix._from_comps(est, kind))
        pseudo_se.append(se)
    elif pseudo and kind is ScalarKind.QUATERNION:
        for eta in "ijk":
            est, se = _second_moment(_outer_terms(d, kind, eta=eta), n)
            pseudo_m.append(Matrix._from_comps(est, kind))
            pseudo_se.append(se)
    return MomentEstimate(mean, cov, pseudo_m, mean_se, cov_se, pseudo_se)


def _zscores(est: np.ndarray, truth: np.ndarray, se: np.ndarray) -> np.ndarray:
    """Per scalar entry: modulus of the error over the combined component SE.

    Arrays carry real components on the last axis; an entry of C or H is one
    scalar, so its components are pooled rather than tested one by one.
    """
    diff = np.sqrt(np.sum((est - truth) ** 2, axis=-1))
    se = np.sqrt(np.sum(se ** 2, axis=-1))
    # entries that are structurally fixed (p = 0, Hermitian diagonals) have a
    # rounding-level SE; compare those exactly instead of dividing by ~1e-19
    scale = 1.0 + float(np.abs(truth).max(initial=0.0))
    exact = se <= 1e-12 * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        z = diff / se
    z[exact] = np.where(diff[exact] <= 1e-9 * scale, 0.0, np.inf)
    return z


@dataclass(frozen=True)
class SemanticsReport:
    mean_z: float
    cov_z: float
    mean_threshold: float = MEAN_Z
    cov_threshold: float = COV_Z

    @property
    def passed(self) -> bool:
        return self.mean_z <= self.mean_threshold and self.cov_z <= self.cov_threshold


def compare_moments(moments: MomentEstimate, mean: Matrix, cov: Matrix) -> SemanticsReport:
    """Worst z-scores of estimated against analytic mean and covariance."""
    mz = _zscores(moments.mean.components()[:, 0, :], mean.components()[:, 0, :], moments.mean_se)
    cz = _zscores(moments.covariance.components(), cov.components(), moments.covariance_se)
    return SemanticsReport(float(mz.max(initial=0.0)), float(cz.max(initial=0.0)))


def _analytic(F: GaussMorphism, a: Matrix, e: Matrix) -> tuple[Matrix, Matrix]:
    return F.f @ a + F.x @ e, F.p


def check_composition_semantics(G: GaussMorphism, F: GaussMorphism, input, e, n: int,
                                seed: int) -> SemanticsReport:
    """Sample ``F`` then push every draw through an independent draw of ``G``;
    compare with the moments of ``compose(G, F)``."""
    a = _as_column(input, F.kind, F.dom, "input")
    ev = _as_column(e, F.kind, F.x_dim, "e")
    mid = push_forward(F, _broadcast(a, n), ev, seed, stream=0)
    out = push_forward(G, mid, ev, seed, stream=1)
    moments = estimate_moments(SampleBatch(F.kind, n, out, seed), pseudo=False)
    mean, cov = _analytic(compose(G, F), a, ev)
    return compare_moments(moments, mean, cov)


def check_conditional_semantics(F: GaussMorphism, split: ConditionalSplit, input, e, n: int,
                                seed: int) -> SemanticsReport:
    """Draw ``b`` from the B-marginal, then ``c`` from the MP conditional at ``(b, a)``;
    the joint moments must match ``F``. Real scalars only."""
    if F.kind is not ScalarKind.REAL:
        raise ValueError("two-stage conditional sampling is only checked over the reals")
    a = _as_column(input, F.kind, F.dom, "input")
    ev = _as_column(e, F.kind, F.x_dim, "e")
    blk = split_blocks(F, split)
    marginal = GaussMorphism(blk.f, blk.alpha, blk.s)
    cond = conditional_mp(F, split)
    b_draws = push_forward(marginal, _broadcast(a, n), ev, seed, stream=0)
    ba = Matrix(np.concatenate([b_draws.data, _broadcast(a, n).data], axis=0), F.kind)
    c_draws = push_forward(cond, ba, ev, seed, stream=1)
    joint = Matrix(np.concatenate([b_draws.data, c_draws.data], axis=0), F.kind)
    moments = estimate_moments(SampleBatch(F.kind, n, joint, seed), pseudo=False)
    mean, cov = _analytic(F, a, ev)
    return compare_moments(moments, mean, cov)
