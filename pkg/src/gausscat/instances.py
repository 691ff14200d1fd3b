"""Seeded random matrices and morphisms for law checks and tests."""

from __future__ import annotations

import numpy as np

from .gauss import GaussMorphism
from .matrix import Matrix, adjoint_extract, hermitian_eigh, zeros
from .scalar import ScalarKind

__all__ = [
    "random_matrix",
    "random_rank_deficient",
    "random_psd",
    "psd_with_spectrum",
    "random_unitary",
    "random_morphism",
]


def random_matrix(rng: np.random.Generator, kind: ScalarKind, r: int, c: int,
                  scale: float = 1.0) -> Matrix:
    """Entries with independent standard-normal real components."""
    comps = scale * rng.standard_normal((r, c, kind.ncomp))
    return Matrix._from_comps(comps, kind)


def random_rank_deficient(rng: np.random.Generator, kind: ScalarKind, r: int, c: int,
                          rank: int) -> Matrix:
    """Product of ``r x rank`` and ``rank x c`` Gaussian factors."""
    if rank == 0:
        return zeros(r, c, kind)
    return random_matrix(rng, kind, r, rank) @ random_matrix(rng, kind, rank, c)


def random_psd(rng: np.random.Generator, kind: ScalarKind, n: int,
               rank: int | None = None) -> Matrix:
    """``phi^dagger phi`` with ``phi`` a Gaussian ``rank x n`` matrix."""
    rank = n if rank is None else rank
    if rank == 0 or n == 0:
        return zeros(n, n, kind)
    phi = random_matrix(rng, kind, rank, n, scale=1.0 / np.sqrt(rank))
    return phi.dagger() @ phi


def random_unitary(rng: np.random.Generator, kind: ScalarKind, n: int) -> Matrix:
    """Polar factor ``G (G^dagger G)^(-1/2)`` of a Gaussian matrix."""
    g = random_matrix(rng, kind, n, n)
    if n == 0:
        return g
    w, v = hermitian_eigh(g.dagger() @ g)
    inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
    if kind is ScalarKind.REAL:
        h = Matrix(inv_sqrt.real, kind)
    elif kind is ScalarKind.COMPLEX:
        h = Matrix(inv_sqrt, kind)
    else:
        h = adjoint_extract(Matrix(inv_sqrt, ScalarKind.COMPLEX))
    return g @ h


def psd_with_spectrum(rng: np.random.Generator, kind: ScalarKind, eigenvalues) -> Matrix:
    """``U diag(eigenvalues) U^dagger`` for a random unitary ``U``."""
    lam = np.asarray(eigenvalues, dtype=float)
    n = lam.size
    u = random_unitary(rng, kind, n)
    comps = np.zeros((n, n, kind.ncomp))
    comps[..., 0] = np.diag(lam)
    d = Matrix._from_comps(comps, kind)
    return u @ d @ u.dagger()


def random_morphism(rng: np.random.Generator, kind: ScalarKind, dom: int, cod: int,
                    x_dim: int = 1, *, noise_rank: int | None = None,
                    deterministic: bool = False) -> GaussMorphism:
    f = random_matrix(rng, kind, cod, dom)
    if deterministic:
        p = zeros(cod, cod, kind)
    else:
        p = random_psd(rng, kind, cod, noise_rank)
    x = random_matrix(rng, kind, cod, x_dim)
    return GaussMorphism(f, p, x)
