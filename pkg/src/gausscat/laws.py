"""Seeded randomized law suite over every scalar kind.

Each law is a function ``(rng, kind, x_dim, max_size) -> residual``; the suite
runs it on ``instances`` fresh instances per kind and keeps the worst residual.
An exception while evaluating a law counts as a failure with infinite residual.
Results are always reported sorted by law name.
"""

from __future__ import annotations

import contextlib
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from . import gauss
from .gauss import (
    ConditionalSplit,
    Gauss,
    compose,
    compose_chain,
    conditional_closed_form,
    conditional_composite,
    conditional_from_generator,
    conditional_mp,
    conditional_mp13,
    conditional_right,
    copy_commutation_residual,
    generator_from_conditional,
    morphism_residual,
    split_blocks,
    tensor,
    tensor_all,
    verify_conditional,
    verify_conditional_right,
)
from .instances import (
    psd_with_spectrum,
    random_matrix,
    random_morphism,
    random_psd,
    random_rank_deficient,
)
from .matrix import TOL_FACT, adjoint_embed, direct_sum, is_positive, positive_factor
from .pinv import mp_inverse, verify_mp
from .scalar import ScalarKind

__all__ = ["LawSuiteConfig", "LawResult", "LAWS", "run_laws", "inject_bug", "MAX_SIZE_LIMIT"]

MAX_SIZE_LIMIT = 32
X_DIMS = (0, 1, 3)

LawFn = Callable[[np.random.Generator, ScalarKind, int, int], float]


@dataclass(frozen=True)
class Law:
    name: str
    fn: LawFn
    tol: float


@dataclass(frozen=True)
class LawSuiteConfig:
    kinds: tuple[ScalarKind, ...] = tuple(ScalarKind)
    max_size: int = 6
    instances: int = 100
    seed: int = 0
    tol: float | None = None  # overrides every law's default tolerance
    only: tuple[str, ...] = ()  # name prefixes; empty means all

    def __post_init__(self) -> None:
        if not 1 <= self.max_size <= MAX_SIZE_LIMIT:
            raise ValueError(f"max_size must be in 1..{MAX_SIZE_LIMIT}, got {self.max_size}")
        if self.instances < 1:
            raise ValueError(f"instances must be at least 1, got {self.instances}")
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class LawResult:
    name: str
    kind: ScalarKind
    worst: float
    tol: float
    instances: int
    error: str | None = field(default=None, compare=False)

    @property
    def passed(self) -> bool:
        return self.error is None and self.worst <= self.tol


def _dim(rng: np.random.Generator, max_size: int, low: int = 0) -> int:
    return int(rng.integers(low, max_size + 1))


def _morph(rng, kind, x_dim, dom, cod):
    # mix full-rank, rank-deficient and zero noise
    mode = rng.integers(0, 4)
    if mode == 0:
        return random_morphism(rng, kind, dom, cod, x_dim, deterministic=True)
    rank = None if mode == 1 else int(rng.integers(0, cod + 1))
    return random_morphism(rng, kind, dom, cod, x_dim, noise_rank=rank)


# -- category structure -----------------------------------------------------

def _unit_left(rng, kind, x_dim, n):
    F = _morph(rng, kind, x_dim, _dim(rng, n), _dim(rng, n))
    return morphism_residual(compose(Gauss(kind, x_dim).identity(F.cod), F), F)


def _unit_right(rng, kind, x_dim, n):
    F = _morph(rng, kind, x_dim, _dim(rng, n), _dim(rng, n))
    return morphism_residual(compose(F, Gauss(kind, x_dim).identity(F.dom)), F)


def _associativity(rng, kind, x_dim, n):
    a, b, c, d = (_dim(rng, n) for _ in range(4))
    F, G, H = (_morph(rng, kind, x_dim, a, b), _morph(rng, kind, x_dim, b, c),
               _morph(rng, kind, x_dim, c, d))
    return morphism_residual(compose(H, compose(G, F)), compose(compose(H, G), F))


def _tensor_functoriality(rng, kind, x_dim, n):
    a, b, c, d, e, f = (_dim(rng, n) for _ in range(6))
    F, G = _morph(rng, kind, x_dim, a, b), _morph(rng, kind, x_dim, b, c)
    H, K = _morph(rng, kind, x_dim, d, e), _morph(rng, kind, x_dim, e, f)
    return morphism_residual(compose(tensor(G, K), tensor(F, H)),
                             tensor(compose(G, F), compose(K, H)))


def _tensor_identity(rng, kind, x_dim, n):
    a, b = _dim(rng, n), _dim(rng, n)
    cat = Gauss(kind, x_dim)
    return morphism_residual(tensor(cat.identity(a), cat.identity(b)), cat.identity(a + b))


def _swap_naturality(rng, kind, x_dim, n):
    a, b, c, d = (_dim(rng, n) for _ in range(4))
    F, G = _morph(rng, kind, x_dim, a, b), _morph(rng, kind, x_dim, c, d)
    cat = Gauss(kind, x_dim)
    lhs = compose(cat.swap(b, d), tensor(F, G))
    rhs = compose(tensor(G, F), cat.swap(a, c))
    return morphism_residual(lhs, rhs)


def _swap_involution(rng, kind, x_dim, n):
    a, b = _dim(rng, n), _dim(rng, n)
    cat = Gauss(kind, x_dim)
    return morphism_residual(compose(cat.swap(b, a), cat.swap(a, b)), cat.identity(a + b))


# -- copy / delete ----------------------------------------------------------
# comonoid laws are checked after a random F so that noise flows through copy

def _copied(rng, kind, x_dim, n):
    F = _morph(rng, kind, x_dim, _dim(rng, n), _dim(rng, n))
    return Gauss(kind, x_dim), F, F.cod


def _coassociativity(rng, kind, x_dim, n):
    cat, F, b = _copied(rng, kind, x_dim, n)
    i, cp = cat.identity(b), cat.copy(b)
    lhs = compose_chain(tensor(cp, i), cp, F)
    rhs = compose_chain(tensor(i, cp), cp, F)
    return morphism_residual(lhs, rhs)


def _counit_left(rng, kind, x_dim, n):
    cat, F, b = _copied(rng, kind, x_dim, n)
    return morphism_residual(compose_chain(tensor(cat.delete(b), cat.identity(b)), cat.copy(b), F), F)


def _counit_right(rng, kind, x_dim, n):
    cat, F, b = _copied(rng, kind, x_dim, n)
    return morphism_residual(compose_chain(tensor(cat.identity(b), cat.delete(b)), cat.copy(b), F), F)


def _cocommutativity(rng, kind, x_dim, n):
    cat, F, b = _copied(rng, kind, x_dim, n)
    cp = compose(cat.copy(b), F)
    return morphism_residual(compose(cat.swap(b, b), cp), cp)


def _copy_coherence(rng, kind, x_dim, n):
    a, b = _dim(rng, n), _dim(rng, n)
    cat = Gauss(kind, x_dim)
    middle = tensor_all(cat.identity(a), cat.swap(a, b), cat.identity(b))
    return morphism_residual(compose(middle, tensor(cat.copy(a), cat.copy(b))), cat.copy(a + b))


def _delete_coherence(rng, kind, x_dim, n):
    a, b = _dim(rng, n), _dim(rng, n)
    cat = Gauss(kind, x_dim)
    return morphism_residual(tensor(cat.delete(a), cat.delete(b)), cat.delete(a + b))


def _unit_coherence(rng, kind, x_dim, n):
    cat = Gauss(kind, x_dim)
    return max(morphism_residual(cat.copy(0), cat.identity(0)),
               morphism_residual(cat.delete(0), cat.identity(0)))


def _delete_naturality(rng, kind, x_dim, n):
    F = _morph(rng, kind, x_dim, _dim(rng, n), _dim(rng, n))
    cat = Gauss(kind, x_dim)
    return morphism_residual(compose(cat.delete(F.cod), F), cat.delete(F.dom))


def _deterministic_iff(rng, kind, x_dim, n):
    """0 when the copy test classifies both a p = 0 and a p != 0 morphism correctly."""
    a, b = _dim(rng, n), _dim(rng, n, low=1)
    det = random_morphism(rng, kind, a, b, x_dim, deterministic=True)
    noisy = random_morphism(rng, kind, a, b, x_dim, noise_rank=int(rng.integers(1, b + 1)))
    res_det = copy_commutation_residual(det)
    ok = res_det <= gauss.TOL_DET and copy_commutation_residual(noisy) > gauss.TOL_DET
    return res_det if ok else np.inf


# -- matrices ---------------------------------------------------------------

def _mat_size(rng, n):
    return _dim(rng, min(n, 8))


def _matrix_associativity(rng, kind, x_dim, n):
    a, b, c, d = (_mat_size(rng, n) for _ in range(4))
    A, B, C = random_matrix(rng, kind, a, b), random_matrix(rng, kind, b, c), random_matrix(rng, kind, c, d)
    lhs = (A @ B) @ C
    return lhs.dist(A @ (B @ C)) / (1.0 + lhs.norm())


def _matrix_distributivity(rng, kind, x_dim, n):
    a, b, c = (_mat_size(rng, n) for _ in range(3))
    A, B, C = random_matrix(rng, kind, a, b), random_matrix(rng, kind, b, c), random_matrix(rng, kind, b, c)
    lhs = A @ (B + C)
    return lhs.dist(A @ B + A @ C) / (1.0 + lhs.norm())


def _dagger_antihom(rng, kind, x_dim, n):
    a, b, c = (_mat_size(rng, n) for _ in range(3))
    A, B = random_matrix(rng, kind, a, b), random_matrix(rng, kind, b, c)
    lhs = (A @ B).dagger()
    return max(lhs.dist(B.dagger() @ A.dagger()) / (1.0 + lhs.norm()),
               A.dagger().dagger().dist(A))


def _bool_residual(ok: bool) -> float:
    return 0.0 if ok else np.inf


def _positive_sum(rng, kind, x_dim, n):
    k = _mat_size(rng, n)
    P = random_psd(rng, kind, k, _dim(rng, k))
    Q = random_psd(rng, kind, k, _dim(rng, k))
    return _bool_residual(is_positive(P + Q))


def _positive_direct_sum(rng, kind, x_dim, n):
    a, b = _mat_size(rng, n), _mat_size(rng, n)
    P, Q = random_psd(rng, kind, a, _dim(rng, a)), random_psd(rng, kind, b, _dim(rng, b))
    return _bool_residual(is_positive(direct_sum(P, Q)))


def _positive_factor_roundtrip(rng, kind, x_dim, n):
    k = _mat_size(rng, n)
    P = random_psd(rng, kind, k, _dim(rng, k))
    phi = positive_factor(P)
    return (phi.dagger() @ phi).dist(P) / (1.0 + P.norm())


def _negative_rejected(rng, kind, x_dim, n):
    k = max(1, _mat_size(rng, n))
    lam = rng.uniform(0.5, 2.0, size=k)
    lam[rng.integers(0, k)] = -1e-3
    return _bool_residual(not is_positive(psd_with_spectrum(rng, kind, lam)))


# -- generalized inverses ---------------------------------------------------

def _rank_deficient(rng, kind, n):
    r, c = _dim(rng, min(n, 8), 1), _dim(rng, min(n, 8), 1)
    return random_rank_deficient(rng, kind, r, c, int(rng.integers(0, min(r, c) + 1)))


def _mp_axioms(rng, kind, x_dim, n):
    A = _rank_deficient(rng, kind, n)
    rep = verify_mp(A, mp_inverse(A))
    return max(rep.residuals) / (1.0 + A.norm())


def _mp_involution(rng, kind, x_dim, n):
    A = _rank_deficient(rng, kind, n)
    return mp_inverse(mp_inverse(A)).dist(A) / (1.0 + A.norm())


def _mp_dagger(rng, kind, x_dim, n):
    A = _rank_deficient(rng, kind, n)
    G = mp_inverse(A)
    return mp_inverse(A.dagger()).dist(G.dagger()) / (1.0 + G.norm())


def _mp_gram(rng, kind, x_dim, n):
    phi = _rank_deficient(rng, kind, n)
    alpha = phi.dagger() @ phi
    pg = mp_inverse(phi)
    return mp_inverse(alpha).dist(pg @ pg.dagger()) / (1.0 + alpha.norm())


def _mp_embedding(rng, kind, x_dim, n):
    if kind is not ScalarKind.QUATERNION:
        return 0.0
    A = _rank_deficient(rng, kind, n)
    G = mp_inverse(A)
    chi = adjoint_embed(G).dist(mp_inverse(adjoint_embed(A)))
    native = verify_mp(A, G)
    return chi if native.ok() else np.inf


# -- conditionals -----------------------------------------------------------

def _cond_instance(rng, kind, x_dim, n):
    m = min(n, 3)
    a, b, c = _dim(rng, m), _dim(rng, m), _dim(rng, m)
    F = _morph(rng, kind, x_dim, a, b + c)
    return F, ConditionalSplit(b, c)


def _conditional_equation(rng, kind, x_dim, n):
    F, split = _cond_instance(rng, kind, x_dim, n)
    return verify_conditional(F, conditional_mp(F, split), split)


def _conditional_two_route(rng, kind, x_dim, n):
    F, split = _cond_instance(rng, kind, x_dim, n)
    G = conditional_mp(F, split)
    return morphism_residual(conditional_composite(F, G, split),
                             conditional_closed_form(F, G, split))


def _conditional_bijection(rng, kind, x_dim, n):
    F, split = _cond_instance(rng, kind, x_dim, n)
    G = conditional_mp13(F, split, int(rng.integers(0, 2 ** 32)))
    m = generator_from_conditional(F, split, G)
    back = conditional_from_generator(F, split, m)
    m2 = generator_from_conditional(F, split, back)
    return max(morphism_residual(back, G), m2.dist(m) / (1.0 + m.norm()))


def _conditional_mp13(rng, kind, x_dim, n):
    F, split = _cond_instance(rng, kind, x_dim, n)
    return verify_conditional(F, conditional_mp13(F, split, int(rng.integers(0, 2 ** 32))), split)


def _conditional_right(rng, kind, x_dim, n):
    F, split = _cond_instance(rng, kind, x_dim, n)
    return verify_conditional_right(F, conditional_right(F, split), split)


def _conditional_marginal(rng, kind, x_dim, n):
    # the B-marginal of the composite is the B-part of F
    F, split = _cond_instance(rng, kind, x_dim, n)
    blk = split_blocks(F, split)
    G = conditional_mp(F, split)
    comp = conditional_composite(F, G, split)
    b = split.b_dim
    return max(comp.f.sub(slice(None, b), slice(None)).dist(blk.f),
               comp.p.sub(slice(None, b), slice(None, b)).dist(blk.alpha),
               comp.x.sub(slice(None, b), slice(None)).dist(blk.s)) / (1.0 + F.norm())


MARKOV_TOL = 1e-10

LAWS: tuple[Law, ...] = tuple(sorted((
    Law("category.associativity", _associativity, MARKOV_TOL),
    Law("category.unit_left", _unit_left, MARKOV_TOL),
    Law("category.unit_right", _unit_right, MARKOV_TOL),
    Law("comonoid.coassociativity", _coassociativity, MARKOV_TOL),
    Law("comonoid.cocommutativity", _cocommutativity, MARKOV_TOL),
    Law("comonoid.counit_left", _counit_left, MARKOV_TOL),
    Law("comonoid.counit_right", _counit_right, MARKOV_TOL),
    Law("conditional.bijection", _conditional_bijection, 1e-9),
    Law("conditional.equation_mp", _conditional_equation, 1e-8),
    Law("conditional.equation_mp13", _conditional_mp13, 1e-8),
    Law("conditional.marginal", _conditional_marginal, 1e-10),
    Law("conditional.right_equation", _conditional_right, 1e-8),
    Law("conditional.two_route", _conditional_two_route, 1e-10),
    Law("copy_del.copy_coherence", _copy_coherence, MARKOV_TOL),
    Law("copy_del.delete_coherence", _delete_coherence, MARKOV_TOL),
    Law("copy_del.delete_naturality", _delete_naturality, MARKOV_TOL),
    Law("copy_del.unit_coherence", _unit_coherence, MARKOV_TOL),
    Law("deterministic.characterization", _deterministic_iff, MARKOV_TOL),
    Law("matrix.associativity", _matrix_associativity, 1e-12),
    Law("matrix.dagger_antihom", _dagger_antihom, 1e-12),
    Law("matrix.distributivity", _matrix_distributivity, 1e-12),
    Law("matrix.negative_rejected", _negative_rejected, 0.0),
    Law("matrix.positive_direct_sum", _positive_direct_sum, 0.0),
    Law("matrix.positive_factor", _positive_factor_roundtrip, TOL_FACT),
    Law("matrix.positive_sum", _positive_sum, 0.0),
    Law("pinv.axioms", _mp_axioms, 1e-9),
    Law("pinv.dagger", _mp_dagger, 1e-8),
    Law("pinv.embedding", _mp_embedding, 1e-8),
    Law("pinv.gram", _mp_gram, 1e-8),
    Law("pinv.involution", _mp_involution, 1e-8),
    Law("tensor.functoriality", _tensor_functoriality, MARKOV_TOL),
    Law("tensor.identity", _tensor_identity, MARKOV_TOL),
    Law("tensor.swap_involution", _swap_involution, MARKOV_TOL),
    Law("tensor.swap_naturality", _swap_naturality, MARKOV_TOL),
), key=lambda law: law.name))


@contextlib.contextmanager
def inject_bug() -> Iterator[None]:
    """Negate the dagger used when composing covariances, for testing the tester."""
    old = gauss._NEGATE_DAGGER
    gauss._NEGATE_DAGGER = True
    try:
        yield
    finally:
        gauss._NEGATE_DAGGER = old


def _rng(seed: int, name: str, kind: ScalarKind, i: int) -> np.random.Generator:
    kind_idx = list(ScalarKind).index(kind)
    return np.random.default_rng([seed, zlib.crc32(name.encode()), kind_idx, i])


def run_law(law: Law, kind: ScalarKind, config: LawSuiteConfig) -> LawResult:
    tol = law.tol if config.tol is None else config.tol
    worst = 0.0
    for i in range(config.instances):
        x_dim = X_DIMS[i % len(X_DIMS)]
        try:
            res = float(law.fn(_rng(config.seed, law.name, kind, i), kind, x_dim, config.max_size))
        except Exception as exc:  # a law that blows up has failed
            return LawResult(law.name, kind, np.inf, tol, i + 1, f"{type(exc).__name__}: {exc}")
        if not res <= worst:
            worst = res if res == res else np.inf
    return LawResult(law.name, kind, worst, tol, config.instances)


def select(config: LawSuiteConfig) -> list[Law]:
    if not config.only:
        return list(LAWS)
    return [law for law in LAWS if law.name.startswith(config.only)]


def run_laws(config: LawSuiteConfig) -> list[LawResult]:
    results = [run_law(law, kind, config) for law in select(config) for kind in config.kinds]
    kind_order = list(ScalarKind)
    return sorted(results, key=lambda r: (r.name, kind_order.index(r.kind)))
