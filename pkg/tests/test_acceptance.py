"""Acceptance criteria, one test each, at their stated tolerances.

Each test appends a single ``criterion N: PASS|FAIL ...`` line to ``RESULTS``;
the lines are echoed in the pytest terminal summary (see conftest.py) and when
this file is run directly with ``python3 tests/test_acceptance.py``.

All randomness derives from ``SEED``, fixed before the first run.
"""

from __future__ import annotations

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest
import sympy

from gausscat.gauss import (
    ConditionalSplit,
    Gauss,
    GaussMorphism,
    compose,
    conditional_closed_form,
    conditional_composite,
    conditional_from_generator,
    conditional_mp,
    conditional_mp13,
    copy_commutation_residual,
    generator_from_conditional,
    generator_right_derived,
    is_deterministic,
    morphism_residual,
    split_blocks,
    verify_conditional,
)
from gausscat.instances import (
    psd_with_spectrum,
    random_matrix,
    random_morphism,
    random_rank_deficient,
)
from gausscat.laws import LawSuiteConfig, run_laws
from gausscat.matrix import Matrix, adjoint_embed, adjoint_extract, identity, zeros
from gausscat.modelfile import loads_model
from gausscat.pinv import mp_inverse, verify_mp
from gausscat.sampler import (
    check_composition_semantics,
    check_conditional_semantics,
    compare_moments,
    estimate_moments,
    sample,
)
from gausscat.scalar import ScalarKind

SEED = 20261016
KINDS = list(ScalarKind)
MODELS = Path(__file__).resolve().parent.parent / "models"
RESULTS: list[str] = []


def rng_for(criterion: int, kind: ScalarKind, i: int = 0) -> np.random.Generator:
    return np.random.default_rng([SEED, criterion, KINDS.index(kind), i])


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# 1 -------------------------------------------------------------------------

def test_criterion_1_markov_laws():
    start = time.perf_counter()
    config = LawSuiteConfig(instances=100, max_size=6, seed=SEED, tol=1e-10,
                            only=("category", "comonoid", "copy_del", "tensor"))
    results = run_laws(config)
    elapsed = time.perf_counter() - start
    worst = max(r.worst for r in results)
    failed = [f"{r.name}/{r.kind.value}" for r in results if not r.passed]
    ok = not failed and worst <= 1e-10 and elapsed < 30
    record(1, ok, f"{len(results)} law/kind cells, worst {worst:.2e} <= 1e-10, {elapsed:.1f}s < 30s")
    assert not failed, failed
    assert elapsed < 30


# 2 -------------------------------------------------------------------------

def _mp_case(rng, kind, i):
    r, c = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    if i % 2:
        return random_rank_deficient(rng, kind, r, c, int(rng.integers(0, min(r, c))))
    return random_matrix(rng, kind, r, c)


def test_criterion_2_moore_penrose():
    worst_ax, worst_inv, worst_chi, bad = 0.0, 0.0, 0.0, []
    for kind in KINDS:
        for i in range(200):
            a = _mp_case(rng_for(2, kind, i), kind, i)
            g = mp_inverse(a)
            rep = verify_mp(a, g, tol=1e-9)
            worst_ax = max(worst_ax, max(rep.residuals) / (1 + a.norm()))
            inv = mp_inverse(g).dist(a) / (1 + a.norm())
            worst_inv = max(worst_inv, inv)
            ok = rep.ok() and inv <= 1e-8
            if kind is ScalarKind.QUATERNION:
                chi = adjoint_embed(g).dist(mp_inverse(adjoint_embed(a))) / (1 + a.norm())
                worst_chi = max(worst_chi, chi)
                ok = ok and chi <= 1e-8
            if not ok:
                bad.append((kind.value, i))
    record(2, not bad, f"600 matrices, axioms {worst_ax:.2e} <= 1e-9, involution {worst_inv:.2e}"
                       f" <= 1e-8, chi {worst_chi:.2e} <= 1e-8")
    assert not bad, bad


# 3 / 4 shared instances -----------------------------------------------------

def conditional_suite(kind):
    """100 seeded F: A -> B (x) C with b, c, dom <= 3, a third with singular noise."""
    out = []
    for i in range(100):
        rng = rng_for(3, kind, i)
        a, b, c = (int(rng.integers(0, 4)) for _ in range(3))
        x_dim = (0, 1, 3)[i % 3]
        rank = None if i % 3 else int(rng.integers(0, b + c + 1))
        out.append((random_morphism(rng, kind, a, b + c, x_dim, noise_rank=rank),
                    ConditionalSplit(b, c)))
    return out


def test_criterion_3_conditionals():
    worst_eq, worst_route, bad = 0.0, 0.0, []
    for kind in KINDS:
        for i, (F, split) in enumerate(conditional_suite(kind)):
            G = conditional_mp(F, split)
            eq = verify_conditional(F, G, split)
            route = morphism_residual(conditional_composite(F, G, split),
                                      conditional_closed_form(F, G, split))
            worst_eq, worst_route = max(worst_eq, eq), max(worst_route, route)
            if eq > 1e-8 or route > 1e-10:
                bad.append((kind.value, i, eq, route))
    record(3, not bad, f"300 conditionals, equation {worst_eq:.2e} <= 1e-8, "
                       f"two routes {worst_route:.2e} <= 1e-10")
    assert not bad, bad


def _well_conditioned(rng, kind):
    b, c, a = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(0, 4))
    p = psd_with_spectrum(rng, kind, rng.uniform(0.5, 2.0, size=b + c))
    F = GaussMorphism(random_matrix(rng, kind, b + c, a), p, random_matrix(rng, kind, b + c, 1))
    return F, ConditionalSplit(b, c)


def _direct_inverse(alpha: Matrix) -> Matrix:
    # independent of the SVD route: plain LU inverse (through chi for H)
    if alpha.kind is ScalarKind.QUATERNION:
        inv = np.linalg.inv(adjoint_embed(alpha).data)
        return adjoint_extract(Matrix(inv, ScalarKind.COMPLEX))
    return Matrix(np.linalg.inv(alpha.data), alpha.kind)


def test_criterion_4_generator_bijection():
    worst_rt, worst_uniq, bad = 0.0, 0.0, []
    non_mp_gap = []
    for kind in KINDS:
        for i, (F, split) in enumerate(conditional_suite(kind)):
            G = conditional_mp(F, split)
            m = generator_from_conditional(F, split, G)
            back = conditional_from_generator(F, split, m)
            rt = max(morphism_residual(back, G),
                     generator_from_conditional(F, split, back).dist(m) / (1 + m.norm()))
            worst_rt = max(worst_rt, rt)
            if rt > 1e-9:
                bad.append(("rt", kind.value, i, rt))
        for i in range(20):
            # singular alpha: noise of rank 1 over b >= 2
            rng = rng_for(4, kind, i)
            b, c, a = int(rng.integers(2, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
            F = random_morphism(rng, kind, a, b + c, 1, noise_rank=1)
            split = ConditionalSplit(b, c)
            G = conditional_mp13(F, split, int(rng.integers(0, 2 ** 31)))
            m = generator_from_conditional(F, split, G)
            back = conditional_from_generator(F, split, m)
            rt = max(morphism_residual(back, G),
                     generator_from_conditional(F, split, back).dist(m) / (1 + m.norm()))
            worst_rt = max(worst_rt, rt)
            non_mp_gap.append(morphism_residual(G, conditional_mp(F, split)))
            if rt > 1e-9 or verify_conditional(F, G, split) > 1e-8:
                bad.append(("mp13", kind.value, i, rt))
        for i in range(50):
            rng = rng_for(4, kind, 100 + i)
            F, split = _well_conditioned(rng, kind)
            blk = split_blocks(F, split)
            expect = blk.beta.dagger() @ _direct_inverse(blk.alpha)
            routes = (
                generator_from_conditional(F, split, conditional_mp(F, split)),
                generator_from_conditional(F, split, conditional_mp13(F, split, int(rng.integers(0, 2 ** 31)))),
                generator_right_derived(F, split),
            )
            d = max(m.dist(expect) for m in routes)
            worst_uniq = max(worst_uniq, d)
            if d > 1e-8:
                bad.append(("uniq", kind.value, i, d))
    distinct = sum(g > 1e-6 for g in non_mp_gap)
    record(4, not bad and distinct == len(non_mp_gap),
           f"round trips {worst_rt:.2e} <= 1e-9 ({distinct}/{len(non_mp_gap)} mp13 generators differ"
           f" from MP), uniqueness {worst_uniq:.2e} <= 1e-8")
    assert not bad, bad
    assert distinct == len(non_mp_gap)


# 5 -------------------------------------------------------------------------

def test_criterion_5_deterministic_characterization():
    bad = []
    worst_det, least_noisy = 0.0, np.inf
    for kind in KINDS:
        for i in range(50):
            rng = rng_for(5, kind, i)
            a, b = int(rng.integers(0, 5)), int(rng.integers(1, 5))
            if i % 2 == 0:
                F = random_morphism(rng, kind, a, b, 1, deterministic=True)
            else:
                lam = rng.uniform(0.1, 2.0, size=b)
                lam[0] = 1e-6
                if i % 4 == 1:
                    lam[:] = 1e-6  # all of the noise at the 1e-6 level
                p = psd_with_spectrum(rng, kind, lam)
                F = GaussMorphism(random_matrix(rng, kind, b, a), p, random_matrix(rng, kind, b, 1))
            res = copy_commutation_residual(F)
            p_zero = F.p.norm() == 0.0
            commutes = res <= 1e-10
            if p_zero:
                worst_det = max(worst_det, res)
            else:
                least_noisy = min(least_noisy, res)
            if p_zero != commutes or is_deterministic(F) != p_zero:
                bad.append((kind.value, i, res))
    record(5, not bad, f"150 instances, p = 0 residual {worst_det:.2e} <= 1e-10, "
                       f"smallest noisy residual {least_noisy:.2e} > 1e-10")
    assert not bad, bad


# 6 -------------------------------------------------------------------------

def _sym_random(rng, r, c, lo=-3, hi=4):
    return sympy.Matrix(r, c, lambda i, j: int(rng.integers(lo, hi)))


def _to_real(m: sympy.Matrix) -> Matrix:
    return Matrix(np.array(m.tolist(), dtype=float).reshape(m.shape), ScalarKind.REAL)


def _max_entry_gap(ours: Matrix, exact: sympy.Matrix) -> float:
    if exact.rows * exact.cols == 0:
        return 0.0
    return float(np.abs(ours.data - np.array(exact.tolist(), dtype=float)).max())


def test_criterion_6_real_regression():
    worst = 0.0
    for i in range(40):
        rng = np.random.default_rng([SEED, 6, i])
        n, m, k = (int(rng.integers(1, 4)) for _ in range(3))
        M, s = _sym_random(rng, m, n), _sym_random(rng, m, 1)
        N, t = _sym_random(rng, k, m), _sym_random(rng, k, 1)
        phi, psi = _sym_random(rng, m, m), _sym_random(rng, k, k)
        C, D = phi.T * phi, psi.T * psi
        ours = compose(GaussMorphism(_to_real(N), _to_real(D), _to_real(t)),
                       GaussMorphism(_to_real(M), _to_real(C), _to_real(s)))
        for got, exact in ((ours.f, N * M), (ours.p, N * C * N.T + D), (ours.x, N * s + t)):
            worst = max(worst, _max_entry_gap(got, exact))

        # conditional: blocks of sizes m (B) and k (C); C1 singular every other time
        rank = m if i % 2 else max(m - 1, 0)
        root = _sym_random(rng, m + k, m + k)
        if rank < m:
            root[:, 0] = root[:, 1] if m > 1 else sympy.zeros(m + k, 1)
        cov = root.T * root
        Mb, sb = _sym_random(rng, m + k, n), _sym_random(rng, m + k, 1)
        C1, C2, C3, C4 = cov[:m, :m], cov[:m, m:], cov[m:, :m], cov[m:, m:]
        M1, M2, s1, s2 = Mb[:m, :], Mb[m:, :], sb[:m, :], sb[m:, :]
        C1p = C1.pinv()
        exact = (C3 * C1p).row_join(M2 - C3 * C1p * M1), C4 - C3 * C1p * C2, s2 - C3 * C1p * s1
        F = GaussMorphism(_to_real(Mb), _to_real(cov), _to_real(sb))
        G = conditional_mp(F, ConditionalSplit(m, k))
        for got, ex in zip((G.f, G.p, G.x), exact):
            worst = max(worst, _max_entry_gap(got, ex))
    record(6, worst <= 1e-12, f"40 exact-rational instances, max entry gap {worst:.2e} <= 1e-12")
    assert worst <= 1e-12


# 7 -------------------------------------------------------------------------

N7 = 200_000


def _e(kind):
    return Matrix.from_literal([[1]], kind)


def test_criterion_7_sampler_statistics():
    start = time.perf_counter()
    bad, worst_mean, worst_cov, worst_pseudo = [], 0.0, 0.0, 0.0
    for kind in KINDS:
        # single morphisms
        for i in range(3):
            rng = rng_for(7, kind, i)
            F = random_morphism(rng, kind, 2, 3, 1)
            a = random_matrix(rng, kind, 2, 1)
            mom = estimate_moments(sample(F, a, _e(kind), N7, seed=SEED + i), pseudo=False)
            rep = compare_moments(mom, F.f @ a + F.x @ _e(kind), F.p)
            worst_mean, worst_cov = max(worst_mean, rep.mean_z), max(worst_cov, rep.cov_z)
            if not rep.passed:
                bad.append(("single", kind.value, i, rep))
        # properness on unit noise
        if kind is not ScalarKind.REAL:
            cat = Gauss(kind, 1)
            U = cat.morphism(identity(3, kind), identity(3, kind), zeros(3, 1, kind))
            mom = estimate_moments(sample(U, zeros(3, 1, kind), _e(kind), N7, seed=SEED + 50))
            gap = max(p.max_abs() for p in mom.pseudo) * np.sqrt(N7)
            worst_pseudo = max(worst_pseudo, gap)
            if gap > 5:
                bad.append(("pseudo", kind.value, gap))
        # two-route composition
        for i in range(20):
            rng = rng_for(7, kind, 100 + i)
            a_dim, b_dim, c_dim = (int(rng.integers(1, 4)) for _ in range(3))
            F = random_morphism(rng, kind, a_dim, b_dim, 1)
            G = random_morphism(rng, kind, b_dim, c_dim, 1)
            a = random_matrix(rng, kind, a_dim, 1)
            rep = check_composition_semantics(G, F, a, _e(kind), N7, seed=SEED + 100 + i)
            worst_mean, worst_cov = max(worst_mean, rep.mean_z), max(worst_cov, rep.cov_z)
            if not rep.passed:
                bad.append(("compose", kind.value, i, rep))
    # real two-stage conditional sampling
    for i in range(10):
        rng = rng_for(7, ScalarKind.REAL, 200 + i)
        b, c, a_dim = (int(rng.integers(1, 3)) for _ in range(3))
        F = random_morphism(rng, ScalarKind.REAL, a_dim, b + c, 1)
        a = random_matrix(rng, ScalarKind.REAL, a_dim, 1)
        rep = check_conditional_semantics(F, ConditionalSplit(b, c), a, _e(ScalarKind.REAL), N7,
                                          seed=SEED + 200 + i)
        worst_mean, worst_cov = max(worst_mean, rep.mean_z), max(worst_cov, rep.cov_z)
        if not rep.passed:
            bad.append(("conditional", i, rep))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 120
    record(7, ok, f"worst mean z {worst_mean:.2f} <= 3, worst cov z {worst_cov:.2f} <= 5, "
                  f"pseudo {worst_pseudo:.2f}/sqrt(n) <= 5/sqrt(n), {elapsed:.0f}s < 120s")
    assert not bad, bad
    assert elapsed < 120


# 8 -------------------------------------------------------------------------

def _cli(*args) -> bytes:
    return subprocess.run([sys.executable, "-m", "gausscat", *map(str, args)],
                          capture_output=True, check=True).stdout


def _exact(text: bytes, name: str):
    F = loads_model(text.decode()).morphism(name)
    return F.f.data.tolist(), F.p.data.tolist(), F.x.data.tolist()


def test_criterion_8_cli_contract():
    composed = _exact(_cli("compose", MODELS / "compose_1d.json", "N", "M"), "N.M")
    conditioned = _exact(_cli("condition", MODELS / "condition_1d.json", "F", "1"), "F|1")
    sample_args = ("sample", MODELS / "unit_noise.json", "R", "-n", "1000", "--seed", SEED,
                   "--input", "a")
    same = _cli(*sample_args) == _cli(*sample_args)
    ok = (composed == ([[2.0]], [[3.0]], [[4.0]])
          and conditioned == ([[0.5, -0.5]], [[1.5]], [[-0.5]]) and same)
    record(8, ok, f"compose {composed}, condition {conditioned}, sample byte-identical: {same}")
    assert composed == ([[2.0]], [[3.0]], [[4.0]])
    assert conditioned == ([[0.5, -0.5]], [[1.5]], [[-0.5]])
    assert same


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(RESULTS))
    sys.exit(code)
