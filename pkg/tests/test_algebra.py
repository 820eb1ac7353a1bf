import numpy as np
import pytest
from hypothesis import given, strategies as st

from proframes import algebra
from proframes.algebra import AlgebraElement, BlockShape
from proframes.errors import NotHermitian, ShapeMismatch, SpectrumOutOfDomain
from proframes.generate import random_element

shapes = st.lists(st.integers(1, 4), min_size=1, max_size=3).map(tuple)
seeds = st.integers(0, 2**32 - 1)


def el(shape, *blocks):
    return AlgebraElement(shape, [np.asarray(b, dtype=complex) for b in blocks])


def test_block_shape_validation():
    assert BlockShape((2, 1)).dim == 5
    with pytest.raises(ShapeMismatch):
        BlockShape(())
    with pytest.raises(ShapeMismatch):
        BlockShape((2, 0))


def test_rejects_wrong_block_sizes_and_nonfinite():
    with pytest.raises(ShapeMismatch):
        AlgebraElement((2,), [np.eye(3)])
    with pytest.raises(ShapeMismatch):
        AlgebraElement((2, 1), [np.eye(2)])
    with pytest.raises(ValueError):
        AlgebraElement((1,), [[[np.nan]]])
    with pytest.raises(ValueError):
        AlgebraElement((1,), [[[np.inf]]])


def test_immutable(rng):
    x = random_element(rng, (2,))
    with pytest.raises(AttributeError):
        x.shape = BlockShape((1,))
    with pytest.raises(ValueError):
        x.blocks[0][0, 0] = 1.0


def test_add_identity_and_scalar(rng):
    x = random_element(rng, (2, 1))
    assert algebra.add(x, AlgebraElement.zeros((2, 1))) == x
    assert algebra.add(el((1,), [[2]]), el((1,), [[3]])) == el((1,), [[5]])


def test_add_commutes(rng):
    x, y = random_element(rng, (2,)), random_element(rng, (2,))
    assert algebra.add(x, y) == algebra.add(y, x)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        algebra.add(AlgebraElement.zeros((2,)), AlgebraElement.zeros((1,)))
    with pytest.raises(ShapeMismatch):
        algebra.mul(AlgebraElement.zeros((2,)), AlgebraElement.zeros((2, 1)))
    with pytest.raises(ShapeMismatch):
        algebra.leq(AlgebraElement.zeros((2,)), AlgebraElement.zeros((1,)))


def test_mul(rng):
    x = random_element(rng, (2, 3))
    assert algebra.mul(x, AlgebraElement.identity((2, 3))) == x
    n = el((2,), [[0, 1], [0, 0]])
    assert algebra.mul(n, n) == AlgebraElement.zeros((2,))
    y = random_element(rng, (2, 3))
    lhs = algebra.adjoint(algebra.mul(x, y))
    rhs = algebra.mul(algebra.adjoint(y), algebra.adjoint(x))
    assert lhs.allclose(rhs, 1e-12)


def test_adjoint(rng):
    assert algebra.adjoint(AlgebraElement.identity((2, 1))) == AlgebraElement.identity((2, 1))
    assert algebra.adjoint(el((1,), [[1j]])) == el((1,), [[-1j]])
    x = random_element(rng, (3,))
    h = 0.5 * (x + x.H)
    assert algebra.adjoint(h) == h


def test_norm_examples(rng):
    assert algebra.norm(AlgebraElement.zeros((2, 1))) == 0.0
    assert algebra.norm(el((2, 1), np.diag([3, 1]), [[2]])) == pytest.approx(3.0, abs=1e-15)
    x = random_element(rng, (3, 2))
    n = algebra.norm(x)
    assert abs(algebra.norm(x.H @ x) - n**2) <= 1e-10 * (1 + n**2)


def test_is_positive_examples(rng):
    x = random_element(rng, (3, 1))
    assert algebra.is_positive(x.H @ x)
    assert not algebra.is_positive(el((1,), [[-1]]))
    # eigenvalues 3 and -1
    assert not algebra.is_positive(el((2,), [[1, 2], [2, 1]]))
    # non-Hermitian with positive eigenvalues is not positive
    assert not algebra.is_positive(el((2,), [[1, 1], [0, 1]]))


def test_leq_examples(rng):
    x = random_element(rng, (2,))
    assert algebra.leq(x, x)
    assert algebra.leq(AlgebraElement.zeros((2,)), x.H @ x)
    assert not algebra.leq(el((1,), [[2]]), el((1,), [[1]]))


def test_herm_calculus_examples(rng):
    ident = AlgebraElement.identity((2, 1))
    inv_sqrt = lambda t: t**-0.5
    assert algebra.herm_calculus(ident, inv_sqrt, require_positive=True).allclose(ident, 1e-15)
    assert algebra.herm_calculus(el((1,), [[4]]), inv_sqrt, require_positive=True).allclose(el((1,), [[0.5]]), 1e-15)

    g = random_element(rng, (3, 2))
    x = g.H @ g + 0.1 * AlgebraElement.identity((3, 2))
    r = algebra.inverse_sqrt(x)
    assert (r @ x @ r).allclose(AlgebraElement.identity((3, 2)), 1e-9)


def test_herm_calculus_errors():
    with pytest.raises(NotHermitian):
        algebra.herm_calculus(el((2,), [[0, 1], [0, 0]]), np.sqrt)
    with pytest.raises(SpectrumOutOfDomain):
        algebra.inverse(el((2,), np.diag([1.0, 0.0])))
    with pytest.raises(SpectrumOutOfDomain):
        algebra.inverse_sqrt(el((1,), [[-2.0]]))


def test_spectrum_bounds(rng):
    assert algebra.spectrum_bounds(AlgebraElement.identity((3,))) == pytest.approx((1.0, 1.0))
    assert algebra.spectrum_bounds(el((2, 1), np.diag([5, 2]), [[3]])) == pytest.approx((2.0, 5.0))
    with pytest.raises(NotHermitian):
        algebra.spectrum_bounds(el((2,), [[0, 1], [0, 0]]))

    x = random_element(rng, (4, 2))
    h = 0.5 * (x + x.H)
    lo, hi = algebra.spectrum_bounds(h)
    for _ in range(100):
        b = int(rng.integers(2))
        n = h.shape[b]
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        q = (v.conj() @ h.blocks[b] @ v).real / (v.conj() @ v).real
        assert lo - 1e-10 <= q <= hi + 1e-10


@given(shapes, seeds)
def test_involution(shape, seed):
    x = random_element(np.random.default_rng(seed), shape)
    assert algebra.adjoint(algebra.adjoint(x)) == x


@given(shapes, seeds)
def test_cstar_identity_and_submultiplicativity(shape, seed):
    rng = np.random.default_rng(seed)
    x, y = random_element(rng, shape), random_element(rng, shape)
    nx, ny = algebra.norm(x), algebra.norm(y)
    assert abs(algebra.norm(x.H @ x) - nx**2) <= 1e-10 * (1 + nx**2)
    assert algebra.norm(x @ y) <= nx * ny + 1e-10 * (1 + nx * ny)


@given(shapes, seeds)
def test_order_transitive(shape, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (random_element(rng, shape) for _ in range(3))
    x = a.H @ a
    y = x + b.H @ b
    z = y + c.H @ c
    tol = algebra.DEFAULT_TOL
    assert algebra.leq(x, y, tol) and algebra.leq(y, z, tol)
    assert algebra.leq(x, z, 3 * tol)


@given(shapes, seeds)
def test_inverse_sqrt_consistency(shape, seed):
    rng = np.random.default_rng(seed)
    g = random_element(rng, shape)
    x = g.H @ g + 0.5 * AlgebraElement.identity(shape)
    r = algebra.inverse_sqrt(x)
    assert (r @ r @ x).allclose(AlgebraElement.identity(shape), 1e-9 * (1 + algebra.norm(x)))
