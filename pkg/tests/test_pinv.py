import numpy as np
import pytest

from gausscat.instances import random_matrix, random_rank_deficient
from gausscat.matrix import Matrix, ShapeError, adjoint_embed, zeros
from gausscat.pinv import mp13_inverse, mp_inverse, perturbation, verify_mp
from gausscat.scalar import ScalarKind

R, C, H = ScalarKind.REAL, ScalarKind.COMPLEX, ScalarKind.QUATERNION


def test_rank_one_real():
    # rank one: A° = A^T / |A|_F^2, and |A|_F^2 = 25 here
    a = Matrix.from_literal([[1, 2], [2, 4]], R)
    assert mp_inverse(a).dist(Matrix(a.data / 25.0, R)) < 1e-15


def test_complex_row():
    a = Matrix.from_literal([[1, "i"]], C)
    expect = Matrix.from_literal([["0.5"], ["-0.5i"]], C)
    assert mp_inverse(a).dist(expect) < 1e-15


def test_quaternion_column_vector(rng):
    v = random_matrix(rng, H, 4, 1)
    expect = Matrix(v.dagger().data / v.norm() ** 2, H)
    assert mp_inverse(v).dist(expect) < 1e-14


@pytest.mark.parametrize("k", [R, C])
def test_full_column_rank_normal_equations(k, rng):
    a = random_matrix(rng, k, 6, 3)
    d = a.data
    expect = np.linalg.solve(d.conj().T @ d, d.conj().T)
    assert np.abs(mp_inverse(a).data - expect).max() < 1e-12


def test_zero_and_empty(kind):
    assert mp_inverse(zeros(3, 2, kind)) == zeros(2, 3, kind)
    assert mp_inverse(zeros(0, 4, kind)).shape == (4, 0)


def test_axioms_on_rank_deficient(kind):
    rng = np.random.default_rng(3)
    for _ in range(50):
        r, c = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        a = random_rank_deficient(rng, kind, r, c, int(rng.integers(0, min(r, c))))
        g = mp_inverse(a)
        assert verify_mp(a, g).ok()
        assert mp_inverse(g).dist(a) <= 1e-8 * (1 + a.norm())
        assert mp_inverse(a.dagger()).dist(g.dagger()) <= 1e-8 * (1 + g.norm())


def test_gram_identity(kind, rng):
    for _ in range(20):
        phi = random_rank_deficient(rng, kind, 5, 4, 2)
        pg = mp_inverse(phi)
        assert mp_inverse(phi.dagger() @ phi).dist(pg @ pg.dagger()) <= 1e-8


def test_embedding_naturality(rng):
    for _ in range(20):
        a = random_rank_deficient(rng, H, 5, 4, 3)
        assert adjoint_embed(mp_inverse(a)).dist(mp_inverse(adjoint_embed(a))) < 1e-8
        assert verify_mp(a, mp_inverse(a)).ok()


def test_verify_detects_wrong_candidate(kind, rng):
    a = random_matrix(rng, kind, 3, 3)
    rep = verify_mp(a, a.dagger())
    assert not rep.ok()
    with pytest.raises(ShapeError):
        verify_mp(a, zeros(2, 3, kind))


def test_mp13_is_least_squares_not_moore_penrose(kind, rng):
    a = random_rank_deficient(rng, kind, 5, 4, 2)
    g = mp13_inverse(a, seed=11)
    rep = verify_mp(a, g)
    assert rep.ok((1, 3))
    assert not rep.ok((2,))
    assert mp13_inverse(a, seed=12).dist(g) > 1e-3


def test_mp13_seed_none_and_full_column_rank(kind, rng):
    a = random_rank_deficient(rng, kind, 5, 4, 2)
    assert mp13_inverse(a, None) == mp_inverse(a)
    full = random_matrix(rng, kind, 6, 3)
    assert mp13_inverse(full, 5).dist(mp_inverse(full)) < 1e-12


def test_perturbation_range_and_reproducibility(kind):
    w = perturbation((3, 4), kind, 9)
    assert w == perturbation((3, 4), kind, 9)
    assert np.abs(w.components()).max() <= 1.0
