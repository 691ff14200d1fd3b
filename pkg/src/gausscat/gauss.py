"""Gaussian conditional morphisms over a matrix dagger category.

A morphism ``A -> B`` is a triple ``(f, p, x)``: a ``B x A`` matrix ``f``, a
positive ``B x B`` noise covariance ``p`` and a ``B x X`` noise-mean block ``x``.
``X`` (``x_dim``) is fixed per category: 1 gives ordinary Gaussian kernels,
0 gives centred ones and ``k`` gives ``k`` mean vectors sharing one covariance.

Composition ``(g, q, y) . (f, p, x) = (g f, q + g p g^dagger, y + g x)``;
the tensor product is the direct sum in every slot (means stacked).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import NamedTuple

from .matrix import (
    Matrix,
    NotPositiveError,
    ShapeError,
    block_at,
    clamp_positive,
    delta,
    direct_sum,
    hstack,
    identity as mat_identity,
    is_positive,
    positive_factor,
    swap_perm,
    vstack,
    zeros,
)
from .pinv import mp13_inverse, mp_inverse
from .scalar import KindMismatchError, ScalarKind

__all__ = [
    "TOL_COND",
    "TOL_GEN",
    "TOL_DET",
    "GaussMorphism",
    "Gauss",
    "ConditionalSplit",
    "Blocks",
    "GeneratorReport",
    "InvalidGeneratorError",
    "NotAConditionalError",
    "compose",
    "compose_chain",
    "tensor",
    "tensor_all",
    "is_deterministic",
    "copy_commutation_residual",
    "morphism_residual",
    "split_blocks",
    "check_generator",
    "conditional_from_generator",
    "conditional_mp",
    "conditional_mp13",
    "generator_from_conditional",
    "conditional_composite",
    "conditional_closed_form",
    "verify_conditional",
    "conditional_right",
    "right_conditional_composite",
    "verify_conditional_right",
    "generator_right_derived",
]

TOL_COND = 1e-8
TOL_GEN = 1e-9
TOL_DET = 1e-10

# Test-the-tester switch: when set, compose pushes covariance forward with a
# negated dagger. Only the law-suite mutation check flips it.
_NEGATE_DAGGER = False


@dataclass(frozen=True)
class GaussMorphism:
    f: Matrix
    p: Matrix
    x: Matrix
    validate: bool = True

    def __post_init__(self) -> None:
        kind = self.f.kind
        if self.p.kind is not kind or self.x.kind is not kind:
            raise KindMismatchError("f, p and x must share one scalar kind")
        if self.p.shape != (self.cod, self.cod):
            raise ShapeError(f"p must be {self.cod}x{self.cod}, got {self.p.shape}")
        if self.x.rows != self.cod:
            raise ShapeError(f"x must have {self.cod} rows, got {self.x.rows}")
        if self.validate and not is_positive(self.p):
            raise NotPositiveError("noise covariance p is not positive")

    @property
    def kind(self) -> ScalarKind:
        return self.f.kind

    @property
    def dom(self) -> int:
        return self.f.cols

    @property
    def cod(self) -> int:
        return self.f.rows

    @property
    def x_dim(self) -> int:
        return self.x.cols

    @functools.cached_property
    def certificate(self) -> Matrix:
        """A square ``phi`` with ``phi^dagger phi = p``."""
        return positive_factor(self.p)

    def norm(self) -> float:
        return (self.f.norm() ** 2 + self.p.norm() ** 2 + self.x.norm() ** 2) ** 0.5

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GaussMorphism):
            return NotImplemented
        return self.f == other.f and self.p == other.p and self.x == other.x

    __hash__ = None

    def __matmul__(self, other: GaussMorphism) -> GaussMorphism:
        return compose(self, other)

    def __repr__(self) -> str:
        return (f"GaussMorphism({self.kind.value}, {self.dom} -> {self.cod}, "
                f"x_dim={self.x_dim})")


@dataclass(frozen=True)
class Gauss:
    """Structural morphisms of one category instance (scalar kind and ``x_dim``)."""

    kind: ScalarKind = ScalarKind.REAL
    x_dim: int = 1

    def morphism(self, f: Matrix, p: Matrix | None = None, x: Matrix | None = None) -> GaussMorphism:
        p = zeros(f.rows, f.rows, self.kind) if p is None else p
        x = zeros(f.rows, self.x_dim, self.kind) if x is None else x
        if x.cols != self.x_dim:
            raise ShapeError(f"x must have {self.x_dim} columns, got {x.cols}")
        return GaussMorphism(f, p, x)

    def deterministic(self, f: Matrix) -> GaussMorphism:
        return GaussMorphism(f, zeros(f.rows, f.rows, self.kind),
                             zeros(f.rows, self.x_dim, self.kind), validate=False)

    def identity(self, n: int) -> GaussMorphism:
        return self.deterministic(mat_identity(n, self.kind))

    def swap(self, n: int, m: int) -> GaussMorphism:
        """``n (x) m -> m (x) n``."""
        return self.deterministic(swap_perm(n, m, self.kind))

    def copy(self, n: int) -> GaussMorphism:
        return self.deterministic(delta(n, self.kind))

    def delete(self, n: int) -> GaussMorphism:
        return self.deterministic(zeros(0, n, self.kind))

    def of(self, F: GaussMorphism) -> Gauss:
        return Gauss(F.kind, F.x_dim)


def _same_category(F: GaussMorphism, G: GaussMorphism) -> None:
    if F.kind is not G.kind:
        raise KindMismatchError(f"{F.kind.value} vs {G.kind.value} morphisms")
    if F.x_dim != G.x_dim:
        raise ShapeError(f"x_dim mismatch: {F.x_dim} vs {G.x_dim}")


def compose(G: GaussMorphism, F: GaussMorphism) -> GaussMorphism:
    """``G . F`` (apply ``F`` first)."""
    _same_category(F, G)
    if F.cod != G.dom:
        raise ShapeError(f"cannot compose {G.dom}->{G.cod} after {F.dom}->{F.cod}")
    g = G.f
    g_dag = -g.dagger() if _NEGATE_DAGGER else g.dagger()
    return GaussMorphism(g @ F.f, G.p + g @ F.p @ g_dag, G.x + g @ F.x)


def compose_chain(*morphisms: GaussMorphism) -> GaussMorphism:
    """``compose_chain(H, G, F) == H . G . F``."""
    return functools.reduce(compose, morphisms)


def tensor(F: GaussMorphism, G: GaussMorphism) -> GaussMorphism:
    _same_category(F, G)
    return GaussMorphism(direct_sum(F.f, G.f), direct_sum(F.p, G.p), vstack(F.x, G.x),
                         validate=False)


def tensor_all(*morphisms: GaussMorphism) -> GaussMorphism:
    return functools.reduce(tensor, morphisms)


def morphism_residual(F: GaussMorphism, G: GaussMorphism) -> float:
    """Max Frobenius distance over the three slots, relative to ``1 + |G|``."""
    if (F.dom, F.cod, F.x_dim) != (G.dom, G.cod, G.x_dim):
        raise ShapeError(f"type mismatch {F!r} vs {G!r}")
    worst = max(F.f.dist(G.f), F.p.dist(G.p), F.x.dist(G.x))
    return worst / (1.0 + G.norm())


def is_deterministic(F: GaussMorphism, tol: float = TOL_DET) -> bool:
    return F.p.norm() <= tol * (1.0 + F.norm())


def copy_commutation_residual(F: GaussMorphism) -> float:
    """Residual of ``copy . F = (F (x) F) . copy``; zero exactly when ``p = 0``."""
    cat = Gauss(F.kind, F.x_dim)
    lhs = compose(cat.copy(F.cod), F)
    rhs = compose(tensor(F, F), cat.copy(F.dom))
    return morphism_residual(lhs, rhs)


# conditionals

@dataclass(frozen=True)
class ConditionalSplit:
    """Split of a codomain as ``B (x) C``."""

    b_dim: int
    c_dim: int

    def __post_init__(self) -> None:
        if self.b_dim < 0 or self.c_dim < 0:
            raise ValueError("split sizes must be nonnegative")

    @classmethod
    def of(cls, F: GaussMorphism, b_dim: int) -> ConditionalSplit:
        if not 0 <= b_dim <= F.cod:
            raise ValueError(f"b_dim {b_dim} outside 0..{F.cod}")
        return cls(b_dim, F.cod - b_dim)

    def swapped(self) -> ConditionalSplit:
        return ConditionalSplit(self.c_dim, self.b_dim)


class Blocks(NamedTuple):
    f: Matrix
    g: Matrix
    alpha: Matrix
    beta: Matrix
    delta: Matrix
    s: Matrix
    t: Matrix


class InvalidGeneratorError(ValueError):
    """Candidate fails the conditional-generator conditions."""


class NotAConditionalError(ValueError):
    """Morphism is not a conditional of the given morphism."""


def _check_split(F: GaussMorphism, split: ConditionalSplit) -> None:
    if split.b_dim + split.c_dim != F.cod:
        raise ValueError(f"split {split.b_dim}+{split.c_dim} does not match cod {F.cod}")


def split_blocks(F: GaussMorphism, split: ConditionalSplit, tol: float = 1e-9) -> Blocks:
    """Read ``F = ([f; g], [[alpha, beta], [beta^dagger, delta]], [s; t])``."""
    _check_split(F, split)
    b = split.b_dim
    f, _, g, _ = block_at(F.f, b, F.dom)
    alpha, beta, gamma, dlt = block_at(F.p, b, b)
    s, _, t, _ = block_at(F.x, b, F.x_dim)
    defect = gamma.dist(beta.dagger())
    if defect > tol * (1.0 + F.p.norm()):
        raise ValueError(f"covariance off-diagonal blocks are not adjoint ({defect:.3e})")
    return Blocks(f, g, alpha, beta, dlt, s, t)


@dataclass(frozen=True)
class GeneratorReport:
    m: Matrix
    cond1_residual: float
    eta: Matrix
    eta_positive: bool
    tol: float

    @property
    def valid(self) -> bool:
        return self.cond1_residual <= self.tol and self.eta_positive


def check_generator(F: GaussMorphism, split: ConditionalSplit, m: Matrix) -> GeneratorReport:
    """Test ``m alpha = beta^dagger`` and positivity of ``delta - m beta``."""
    blk = split_blocks(F, split)
    if m.shape != (split.c_dim, split.b_dim):
        raise ShapeError(f"generator must be {split.c_dim}x{split.b_dim}, got {m.shape}")
    cond1 = (m @ blk.alpha).dist(blk.beta.dagger())
    mb = m @ blk.beta
    eta = blk.delta - mb
    # eta is a Schur complement and often cancels to ~0; judge it on the
    # scale of the terms it came from and clamp the round-off
    scale = blk.delta.norm() + mb.norm()
    positive = is_positive(eta, scale=scale)
    if positive:
        eta = clamp_positive(eta, scale=scale)
    tol = TOL_GEN * (1.0 + blk.alpha.norm()) * (1.0 + m.norm())
    return GeneratorReport(m, cond1, eta, positive, tol)


def conditional_from_generator(F: GaussMorphism, split: ConditionalSplit, m: Matrix) -> GaussMorphism:
    """``G_m = ([m, g - m f], delta - m beta, t - m s)`` of type ``B (x) A -> C``."""
    report = check_generator(F, split, m)
    if not report.valid:
        raise InvalidGeneratorError(
            f"m alpha - beta^dagger = {report.cond1_residual:.3e} (tol {report.tol:.1e}), "
            f"eta positive: {report.eta_positive}"
        )
    blk = split_blocks(F, split)
    return GaussMorphism(hstack(m, blk.g - m @ blk.f), report.eta, blk.t - m @ blk.s)


def conditional_mp(F: GaussMorphism, split: ConditionalSplit) -> GaussMorphism:
    """The conditional generated by ``m = beta^dagger alpha°``."""
    blk = split_blocks(F, split)
    m = blk.beta.dagger() @ mp_inverse(blk.alpha)
    return conditional_from_generator(F, split, m)


def conditional_mp13(F: GaussMorphism, split: ConditionalSplit, seed: int | None) -> GaussMorphism:
    """Conditional from a least-squares inverse of the covariance certificate.

    With ``p = [phi, psi]^dagger [phi, psi]`` the generator is
    ``psi^dagger (phi^bullet)^dagger`` where ``phi^bullet`` is the seeded
    [1,3]-inverse of ``phi``. ``seed=None`` uses ``phi°`` and reproduces
    :func:`conditional_mp`.
    """
    _check_split(F, split)
    cert = F.certificate
    b = split.b_dim
    phi, psi = cert.sub(slice(None), slice(None, b)), cert.sub(slice(None), slice(b, None))
    phi_bullet = mp13_inverse(phi, seed)
    m = psi.dagger() @ phi_bullet.dagger()
    return conditional_from_generator(F, split, m)


def generator_from_conditional(F: GaussMorphism, split: ConditionalSplit, G: GaussMorphism,
                               tol: float = TOL_COND) -> Matrix:
    """Recover the generator of a conditional ``G`` (its first ``b_dim`` columns)."""
    _check_split(F, split)
    _same_category(F, G)
    if (G.dom, G.cod) != (split.b_dim + F.dom, split.c_dim):
        raise ShapeError(f"conditional must have type {split.b_dim + F.dom}->{split.c_dim}")
    m = G.f.sub(slice(None), slice(None, split.b_dim))
    try:
        rebuilt = conditional_from_generator(F, split, m)
    except InvalidGeneratorError as exc:
        raise NotAConditionalError(str(exc)) from exc
    res = morphism_residual(G, rebuilt)
    if res > tol:
        raise NotAConditionalError(f"round-trip residual {res:.3e} exceeds {tol:.1e}")
    return m


def conditional_composite(F: GaussMorphism, G: GaussMorphism, split: ConditionalSplit) -> GaussMorphism:
    """Left-hand side of the conditional equation, assembled from primitives:

    ``(id_B (x) G) . (copy_B (x) id_A) . (id_B (x) del_C (x) id_A) . (F (x) id_A) . copy_A``
    """
    _check_split(F, split)
    _same_category(F, G)
    cat = Gauss(F.kind, F.x_dim)
    a, b, c = F.dom, split.b_dim, split.c_dim
    if (G.dom, G.cod) != (b + a, c):
        raise ShapeError(f"conditional must have type {b + a}->{c}, got {G.dom}->{G.cod}")
    return compose_chain(
        tensor(cat.identity(b), G),
        tensor(cat.copy(b), cat.identity(a)),
        tensor_all(cat.identity(b), cat.delete(c), cat.identity(a)),
        tensor(F, cat.identity(a)),
        cat.copy(a),
    )


def conditional_closed_form(F: GaussMorphism, G: GaussMorphism, split: ConditionalSplit) -> GaussMorphism:
    """The same composite written out blockwise:
    ``([f; m f + k], [[alpha, alpha m^dagger], [m alpha, eta + m alpha m^dagger]], [s; u + m s])``.
    """
    blk = split_blocks(F, split)
    b = split.b_dim
    m = G.f.sub(slice(None), slice(None, b))
    k = G.f.sub(slice(None), slice(b, None))
    eta, u = G.p, G.x
    am = blk.alpha @ m.dagger()
    p = vstack(hstack(blk.alpha, am), hstack(m @ blk.alpha, eta + m @ am))
    return GaussMorphism(vstack(blk.f, m @ blk.f + k), p, vstack(blk.s, u + m @ blk.s),
                         validate=False)


def verify_conditional(F: GaussMorphism, G: GaussMorphism, split: ConditionalSplit) -> float:
    """Residual of the conditional equation for candidate ``G`` (built from primitives)."""
    return morphism_residual(conditional_composite(F, G, split), F)


def conditional_right(F: GaussMorphism, split: ConditionalSplit) -> GaussMorphism:
    """Right conditional ``A (x) C -> B``: the left conditional of ``swap . F`` after ``swap``."""
    _check_split(F, split)
    cat = Gauss(F.kind, F.x_dim)
    b, c = split.b_dim, split.c_dim
    swapped = compose(cat.swap(b, c), F)
    H = conditional_mp(swapped, split.swapped())
    return compose(H, cat.swap(F.dom, c))


def right_conditional_composite(F: GaussMorphism, G: GaussMorphism, split: ConditionalSplit) -> GaussMorphism:
    """``(G (x) id_C) . (id_A (x) copy_C) . (id_A (x) del_B (x) id_C) . (id_A (x) F) . copy_A``"""
    _check_split(F, split)
    _same_category(F, G)
    cat = Gauss(F.kind, F.x_dim)
    a, b, c = F.dom, split.b_dim, split.c_dim
    if (G.dom, G.cod) != (a + c, b):
        raise ShapeError(f"right conditional must have type {a + c}->{b}, got {G.dom}->{G.cod}")
    return compose_chain(
        tensor(G, cat.identity(c)),
        tensor(cat.identity(a), cat.copy(c)),
        tensor_all(cat.identity(a), cat.delete(b), cat.identity(c)),
        tensor(cat.identity(a), F),
        cat.copy(a),
    )


def verify_conditional_right(F: GaussMorphism, G: GaussMorphism, split: ConditionalSplit) -> float:
    return morphism_residual(right_conditional_composite(F, G, split), F)


def generator_right_derived(F: GaussMorphism, split: ConditionalSplit) -> Matrix:
    """Generator read off a right conditional.

    The right conditional of ``swap . F : A -> C (x) B`` has type ``A (x) B -> C``;
    reordering its inputs to ``B (x) A`` gives a left conditional of ``F`` whose
    first ``b_dim`` columns are a generator.
    """
    _check_split(F, split)
    cat = Gauss(F.kind, F.x_dim)
    swapped = compose(cat.swap(split.b_dim, split.c_dim), F)
    H = conditional_right(swapped, split.swapped())
    G = compose(H, cat.swap(split.b_dim, F.dom))
    return generator_from_conditional(F, split, G)
