import numpy as np
import pytest
from hypothesis import given, strategies as st

from proframes import algebra
from proframes.errors import (
    ChainMismatch,
    InvalidCount,
    NotAProjection,
    NotInSpace,
    NotInvertible,
    SpaceMismatch,
)
from proframes.generate import (
    random_chain,
    random_coherent,
    random_module_element,
    random_operator,
    random_positive_operator,
    random_projection,
    random_projective_space,
)
from proframes.hilbert_module import (
    AdjointableOperator,
    ModuleElement,
    ModuleSpace,
    Multiplier,
    act,
    adjoint_op,
    apply,
    compose,
    diagonal_op,
    identity_op,
    inner,
    module_seminorm,
    operator_inverse,
    operator_inverse_sqrt,
    operator_seminorm,
    standard_basis,
    zero_op,
)
from proframes.prosystem import CoherentElement, SeminormChain

SCALAR = SeminormChain.single((1,))


def scalar_vector(space, values):
    return ModuleElement.from_blocks(space, [np.asarray(values, dtype=complex).reshape(-1, 1)])


def coherent_close(a, b, atol):
    return a.allclose(b, atol)


def test_inner_examples(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 3)
    xi = random_module_element(rng, space)
    assert inner(xi, space.zero()) == CoherentElement.zeros(three_level_chain)
    e2 = ModuleSpace(SCALAR, 2)
    assert inner(scalar_vector(e2, [1, 0]), scalar_vector(e2, [0, 1])).top.blocks[0][0, 0] == 0
    assert algebra.is_positive(inner(xi, xi).top)


def test_inner_axioms(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    xi, eta = random_module_element(rng, space), random_module_element(rng, space)
    a = random_coherent(rng, three_level_chain)
    assert inner(xi, eta).H.allclose(inner(eta, xi), 1e-12)
    assert inner(xi, act(eta, a)).allclose(inner(xi, eta) @ a, 1e-10)
    lhs = inner(act(xi, a), act(xi, a))
    assert lhs.allclose(a.H @ inner(xi, xi) @ a, 1e-10)
    # conjugate-linear in the first slot
    assert inner(2j * xi, eta).allclose(-2j * inner(xi, eta), 1e-12)


def test_act_examples(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    xi = random_module_element(rng, space)
    assert act(xi, CoherentElement.identity(three_level_chain)) == xi
    assert act(xi, CoherentElement.zeros(three_level_chain)) == space.zero()
    with pytest.raises(ChainMismatch):
        act(xi, CoherentElement.identity(SCALAR))


def test_module_seminorm(rng, three_level_chain):
    e2 = ModuleSpace(SCALAR, 2)
    assert module_seminorm(scalar_vector(e2, [3, 4]), 1) == pytest.approx(5.0)
    space = ModuleSpace(three_level_chain, 3)
    assert module_seminorm(space.zero(), 2) == 0.0
    for _ in range(20):
        xi, eta = random_module_element(rng, space), random_module_element(rng, space)
        for lv in (1, 2, 3):
            lhs = inner(xi, eta).seminorm(lv)
            assert lhs <= module_seminorm(xi, lv) * module_seminorm(eta, lv) + 1e-10


def test_definiteness(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    xi = random_module_element(rng, space)
    assert any(inner(xi, xi).seminorm(lv) > 0 for lv in (1, 2, 3))
    z = space.zero()
    assert all(inner(z, z).seminorm(lv) == 0 for lv in (1, 2, 3))


def test_levelwise_compatibility(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    xi, eta = random_module_element(rng, space), random_module_element(rng, space)
    for lv in (1, 2, 3):
        sub = space.at_level(lv)
        lhs = inner(xi, eta).project(lv)
        rhs = inner(xi.at_level(lv, sub), eta.at_level(lv, sub)).top
        assert lhs == rhs


def test_standard_basis(three_level_chain, rng):
    (e,) = standard_basis(three_level_chain, 1)
    assert inner(e, e) == CoherentElement.identity(three_level_chain)
    basis = standard_basis(three_level_chain, 4)
    xi = random_module_element(rng, basis[0].space)
    for n, en in enumerate(basis):
        assert inner(en, xi) == xi.coords[n]
        assert en.adjoint_map(xi) == xi.coords[n]
        for m, em in enumerate(basis):
            expected = CoherentElement.identity(three_level_chain) if n == m else CoherentElement.zeros(three_level_chain)
            assert inner(en, em) == expected
    with pytest.raises(InvalidCount):
        standard_basis(three_level_chain, 0)


def test_multiplier_as_morphism(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    h = Multiplier.from_element(random_module_element(rng, space))
    a = random_coherent(rng, three_level_chain)
    assert h(a) == act(h.as_element(), a)


def test_apply_identity_zero_and_linearity(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 3)
    xi = random_module_element(rng, space)
    assert apply(identity_op(space), xi) == xi
    assert apply(zero_op(space, space), xi) == space.zero()
    T = random_operator(rng, space, space)
    a = random_coherent(rng, three_level_chain)
    assert apply(T, act(xi, a)).allclose(act(apply(T, xi), a), 1e-10)


def test_adjoint_relation(three_level_chain, rng):
    d, e = ModuleSpace(three_level_chain, 2), ModuleSpace(three_level_chain, 3)
    T = random_operator(rng, d, e)
    xi, eta = random_module_element(rng, d), random_module_element(rng, e)
    assert inner(apply(T, xi), eta).allclose(inner(xi, apply(adjoint_op(T), eta)), 1e-10)
    assert adjoint_op(adjoint_op(T)) == T
    assert adjoint_op(identity_op(d)) == identity_op(d)


def test_adjoint_of_scalar_operator(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 1)
    a = random_coherent(rng, three_level_chain)
    T = AdjointableOperator(space, space, [[a]])
    assert adjoint_op(T).entry(0, 0) == a.H


def test_compose(three_level_chain, rng):
    d, e, f = (ModuleSpace(three_level_chain, r) for r in (2, 3, 1))
    S, T = random_operator(rng, d, e), random_operator(rng, e, f)
    assert compose(T, identity_op(e)) == T
    xi = random_module_element(rng, d)
    assert apply(compose(T, S), xi).allclose(apply(T, apply(S, xi)), 1e-10)
    assert adjoint_op(compose(T, S)).allclose(compose(adjoint_op(S), adjoint_op(T)), 1e-12)
    with pytest.raises(SpaceMismatch):
        compose(S, T)
    P = random_projection(rng, three_level_chain, 3)
    assert compose(P, P).allclose(P, 1e-10)


def test_operator_seminorm(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    for lv in (1, 2, 3):
        assert operator_seminorm(identity_op(space), lv) == pytest.approx(1.0)
    one = ModuleSpace(three_level_chain, 1)
    a = random_coherent(rng, three_level_chain)
    D = diagonal_op(one, [a])
    for lv in (1, 2, 3):
        assert operator_seminorm(D, lv) == pytest.approx(a.seminorm(lv))
    T = random_operator(rng, space, ModuleSpace(three_level_chain, 3))
    for _ in range(50):
        xi = random_module_element(rng, space)
        for lv in (1, 2, 3):
            assert module_seminorm(apply(T, xi), lv) <= operator_seminorm(T, lv) * module_seminorm(xi, lv) + 1e-9


def test_operator_inverse(three_level_chain, rng):
    space = ModuleSpace(three_level_chain, 2)
    ident = identity_op(space)
    assert operator_inverse(ident).allclose(ident, 1e-14)
    one = ModuleSpace(three_level_chain, 1)
    two = diagonal_op(one, [CoherentElement.scalar(three_level_chain, 2.0)])
    half = diagonal_op(one, [CoherentElement.scalar(three_level_chain, 0.5)])
    assert operator_inverse(two).allclose(half, 1e-14)
    S = random_positive_operator(rng, space)
    assert compose(operator_inverse(S), S).allclose(ident, 1e-9)
    T = random_operator(rng, space, space)
    assert compose(operator_inverse(T), T).allclose(ident, 1e-8)
    with pytest.raises(NotInvertible):
        operator_inverse(zero_op(space, space))


def test_projective_space_membership(three_level_chain, rng):
    space = random_projective_space(rng, three_level_chain, 3)
    xi = random_module_element(rng, space)
    P = space.projection
    ambient = ModuleElement.from_blocks(P.domain, xi.blocks)
    assert apply(P, ambient).allclose(ambient, 1e-10)
    with pytest.raises(NotInSpace):
        ModuleElement.from_blocks(space, [b + 1.0 for b in xi.blocks])
    # module operations keep membership
    a = random_coherent(rng, three_level_chain)
    eta = random_module_element(rng, space)
    for v in (xi + eta, act(xi, a), 3.0 * xi):
        ModuleElement.from_blocks(space, v.blocks)


def test_projective_inverse_is_on_summand(three_level_chain, rng):
    space = random_projective_space(rng, three_level_chain, 2)
    S = random_positive_operator(rng, space)
    Sinv = operator_inverse(S)
    assert compose(Sinv, S).allclose(identity_op(space), 1e-9)
    R = operator_inverse_sqrt(S)
    assert compose(compose(R, S), R).allclose(identity_op(space), 1e-9)


def test_projection_validation(rng):
    ch = SeminormChain.single((2,))
    free = ModuleSpace(ch, 2)
    bad = AdjointableOperator.from_blocks(free, free, [np.diag([1.0, 1.0, 1e-3, 0.0])])
    with pytest.raises(NotAProjection):
        ModuleSpace(ch, 2, bad)
    nonherm = AdjointableOperator.from_blocks(free, free, [np.array([[1, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]])])
    with pytest.raises(NotAProjection):
        ModuleSpace(ch, 2, nonherm)
    zero = AdjointableOperator.from_blocks(free, free, [np.zeros((4, 4))])
    with pytest.raises(NotAProjection):
        ModuleSpace(ch, 2, zero)


def test_classical_case_matches_numpy(rng):
    """Over A = C the module is C^d: inner is the Hermitian product, seminorm the spectral norm."""
    space = ModuleSpace(SCALAR, 4)
    x, y = (rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(2))
    xi, eta = scalar_vector(space, x), scalar_vector(space, y)
    assert inner(xi, eta).top.blocks[0][0, 0] == pytest.approx(np.vdot(x, y))
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    T = AdjointableOperator.from_blocks(space, space, [m])
    assert operator_seminorm(T, 1) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0])


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 4))
def test_inner_product_properties_random(seed, levels, rank):
    rng = np.random.default_rng(seed)
    ch = random_chain(rng, levels, [int(n) for n in rng.integers(1, 4, size=3)])
    space = ModuleSpace(ch, rank)
    xi, eta = random_module_element(rng, space), random_module_element(rng, space)
    assert inner(xi, eta).H.allclose(inner(eta, xi), 1e-12)
    assert algebra.is_positive(inner(xi, xi).top)
    T = random_operator(rng, space, space)
    assert inner(apply(T, xi), eta).allclose(inner(xi, apply(adjoint_op(T), eta)), 1e-9)
