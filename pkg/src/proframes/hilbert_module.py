"""Hilbert modules over a chain algebra, adjointable operators and multipliers.

Layout
------
Every object is stored at the top level of the chain, one numpy array per
top block.  For a top block of size ``m``:

* a vector of a rank-``d`` module is a ``(d*m, m)`` array whose ``j``-th
  ``m x m`` slab is coordinate ``j``;
* an operator from rank ``d`` to rank ``e`` is an ``(e*m, d*m)`` array whose
  ``(i, j)`` slab is the algebra entry ``T[i][j]``.

With this layout the inner product is ``X^H Y``, an operator acts by a plain
matrix product, and the operator seminorm at a level is the spectral norm of
the flattened blocks surviving at that level.  Lower levels are views on a
subset of the top blocks.

Projective modules ``E = P A^d`` carry ``P`` and an orthonormal basis of the
range of each flattened ``P``.  Spectral computations on endomorphisms of
``E`` (positivity, inverses, square roots) are done on the compression to
that range, so the kernel of ``P`` never pollutes them.
"""

from __future__ import annotations

from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from . import algebra
from .algebra import DEFAULT_TOL, hermitian_function, spectral_norm
from .errors import (
    ChainMismatch,
    InvalidCount,
    NotAProjection,
    NotHermitian,
    NotInSpace,
    NotInvertible,
    ShapeMismatch,
    SpaceMismatch,
)
from .prosystem import CoherentElement, SeminormChain

MEMBERSHIP_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


class ModuleSpace:
    """The free module ``A^rank``, or its summand ``P A^rank`` when ``projection`` is given."""

    def __init__(
        self,
        chain: SeminormChain,
        rank: int,
        projection: Optional["AdjointableOperator"] = None,
        tol: float = MEMBERSHIP_TOL,
    ):
        if int(rank) < 1:
            raise InvalidCount(f"module rank must be >= 1, got {rank}")
        self.chain = chain
        self.rank = int(rank)
        self.projection = projection
        if projection is not None:
            _validate_projection(projection, chain, self.rank, tol)

    @property
    def is_free(self) -> bool:
        return self.projection is None

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return self.chain.top_shape.blocks

    @cached_property
    def ambient(self) -> "ModuleSpace":
        return self if self.is_free else ModuleSpace(self.chain, self.rank)

    @cached_property
    def range_bases(self) -> tuple[Optional[np.ndarray], ...]:
        """Orthonormal basis of ``range(P)`` per top block (``None`` for free modules)."""
        if self.is_free:
            return tuple(None for _ in self.block_sizes)
        return tuple(_range_basis(p) for p in self.projection.blocks)

    def rank_at(self, b: int) -> int:
        """Complex dimension of the flattened range at top block ``b``."""
        v = self.range_bases[b]
        return self.rank * self.block_sizes[b] if v is None else v.shape[1]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, ModuleSpace):
            return NotImplemented
        if self.chain != other.chain or self.rank != other.rank:
            return False
        if self.is_free or other.is_free:
            return self.is_free and other.is_free
        return all(np.array_equal(a, b) for a, b in zip(self.projection.blocks, other.projection.blocks))

    __hash__ = None

    def at_level(self, level: int) -> "ModuleSpace":
        """The module ``E_level`` over the single algebra ``A_level``."""
        chain = self.chain.level_algebra(level)
        if self.is_free:
            return ModuleSpace(chain, self.rank)
        free = ModuleSpace(chain, self.rank)
        idx = self.chain.surviving(level)
        proj = AdjointableOperator._from_blocks(free, free, [self.projection.blocks[j] for j in idx])
        return ModuleSpace(chain, self.rank, proj)

    def zero(self) -> "ModuleElement":
        return ModuleElement._from_blocks(
            self, [np.zeros((self.rank * m, m), dtype=complex) for m in self.block_sizes], check=False
        )

    def __repr__(self):
        kind = "free" if self.is_free else "projective"
        return f"ModuleSpace({kind}, rank={self.rank}, blocks={self.block_sizes}, levels={self.chain.num_levels})"


def _range_basis(p: np.ndarray) -> np.ndarray:
    # eigenvalues of a validated projection sit within ~tol of 0 or 1
    w, u = np.linalg.eigh((p + p.conj().T) / 2)
    return u[:, w > 0.5]


def _validate_projection(P: "AdjointableOperator", chain: SeminormChain, rank: int, tol: float):
    if not (P.domain.is_free and P.codomain.is_free):
        raise NotAProjection("a projection must act on a free module")
    if P.domain.chain != chain or P.domain.rank != rank or P.codomain.rank != rank:
        raise NotAProjection(f"projection must act on A^{rank} over the module's chain")
    scale = tol * (1.0 + max(spectral_norm(p) for p in P.blocks))
    herm = max(spectral_norm(p - p.conj().T) for p in P.blocks)
    if herm > scale:
        raise NotAProjection(f"||P - P*|| = {herm:.3g} exceeds {scale:.3g}")
    idem = max(spectral_norm(p @ p - p) for p in P.blocks)
    if idem > scale:
        raise NotAProjection(f"||P^2 - P|| = {idem:.3g} exceeds {scale:.3g}")
    for b, p in enumerate(P.blocks):
        if _range_basis(p).shape[1] == 0:
            raise NotAProjection(f"projection vanishes on top block {b}")


class ModuleElement:
    """A vector of the module, held as one stacked ``(d*m, m)`` array per top block."""

    __slots__ = ("space", "blocks")
    __hash__ = None

    def __init__(self, space: ModuleSpace, coords: Sequence[CoherentElement], tol: float = MEMBERSHIP_TOL):
        coords = list(coords)
        if len(coords) != space.rank:
            raise ShapeMismatch(f"expected {space.rank} coordinates, got {len(coords)}")
        for c in coords:
            if c.chain != space.chain:
                raise ChainMismatch("coordinate lives over a different chain")
        blocks = [
            np.vstack([c.top.blocks[b] for c in coords]) for b in range(len(space.block_sizes))
        ]
        self._init(space, blocks, check=True, tol=tol)

    def _init(self, space, blocks, check, tol=MEMBERSHIP_TOL):
        blocks = tuple(_freeze(x) for x in blocks)
        if check:
            if len(blocks) != len(space.block_sizes):
                raise ShapeMismatch("wrong number of blocks")
            for m, x in zip(space.block_sizes, blocks):
                if x.shape != (space.rank * m, m):
                    raise ShapeMismatch(f"block of shape {x.shape}, expected {(space.rank * m, m)}")
                if not np.all(np.isfinite(x)):
                    raise ValueError("module elements must have finite entries")
            if not space.is_free:
                scale = tol * (1.0 + max(spectral_norm(x) for x in blocks))
                gap = max(spectral_norm(p @ x - x) for p, x in zip(space.projection.blocks, blocks))
                if gap > scale:
                    raise NotInSpace(f"||P(xi) - xi|| = {gap:.3g} exceeds {scale:.3g}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def _from_blocks(cls, space: ModuleSpace, blocks, check: bool = True, tol: float = MEMBERSHIP_TOL):
        obj = cls.__new__(cls)
        obj._init(space, blocks, check, tol)
        return obj

    @classmethod
    def from_blocks(cls, space: ModuleSpace, blocks, tol: float = MEMBERSHIP_TOL):
        """Build from stacked top-block arrays, validating shape and membership."""
        return cls._from_blocks(space, blocks, check=True, tol=tol)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def coords(self) -> list[CoherentElement]:
        out = []
        for j in range(self.space.rank):
            out.append(
                CoherentElement.from_blocks(
                    self.space.chain, [x[j * m:(j + 1) * m] for m, x in zip(self.space.block_sizes, self.blocks)]
                )
            )
        return out

    def _check(self, other: "ModuleElement"):
        if not isinstance(other, ModuleElement):
            raise TypeError(f"expected a module element, got {type(other).__name__}")
        if self.space != other.space:
            raise SpaceMismatch("elements belong to different modules")

    def __add__(self, other):
        self._check(other)
        return type(self)._from_blocks(self.space, [a + b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __sub__(self, other):
        self._check(other)
        return type(self)._from_blocks(self.space, [a - b for a, b in zip(self.blocks, other.blocks)], check=False)

    def __neg__(self):
        return type(self)._from_blocks(self.space, [-a for a in self.blocks], check=False)

    def __mul__(self, c):
        if isinstance(c, CoherentElement):
            return act(self, c)
        return type(self)._from_blocks(self.space, [c * a for a in self.blocks], check=False)

    def __rmul__(self, c):
        if isinstance(c, CoherentElement):
            return NotImplemented
        return self * c

    def __eq__(self, other):
        if not isinstance(other, ModuleElement):
            return NotImplemented
        return self.space == other.space and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))

    def allclose(self, other: "ModuleElement", atol: float = 1e-10) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def max_abs_diff(self, other: "ModuleElement") -> float:
        self._check(other)
        return max(float(np.max(np.abs(a - b))) for a, b in zip(self.blocks, other.blocks))

    def at_level(self, level: int, space: Optional[ModuleSpace] = None):
        """Image under the quotient map onto ``E_level`` (over ``A_level``)."""
        space = space or self.space.at_level(level)
        idx = self.space.chain.surviving(level)
        return type(self)._from_blocks(space, [self.blocks[j] for j in idx], check=False)

    def as_element(self) -> "ModuleElement":
        return ModuleElement._from_blocks(self.space, self.blocks, check=False)

    def __repr__(self):
        return f"{type(self).__name__}(rank={self.space.rank}, norm={module_seminorm(self, self.space.chain.num_levels):.6g})"


class Multiplier(ModuleElement):
    """An element ``h`` of ``M(E)``.

    The algebras here are unital, so ``M(E)`` coincides with ``E``: ``h`` is
    the morphism ``a -> h.a`` and its adjoint is ``xi -> <h, xi>``.
    """

    __slots__ = ()

    @classmethod
    def from_element(cls, xi: ModuleElement) -> "Multiplier":
        """The canonical embedding ``i_E``."""
        return cls._from_blocks(xi.space, xi.blocks, check=False)

    def __call__(self, a: CoherentElement) -> ModuleElement:
        return act(self.as_element(), a)

    def adjoint_map(self, xi: ModuleElement) -> CoherentElement:
        """``h*(xi)``, which is the pairing ``<h, xi>``."""
        return inner(self, xi)


class AdjointableOperator:
    """A matrix over the algebra, acting on coordinate vectors from the left."""

    __slots__ = ("domain", "codomain", "blocks")
    __hash__ = None

    def __init__(
        self,
        domain: ModuleSpace,
        codomain: ModuleSpace,
        matrix: Sequence[Sequence[CoherentElement]],
        tol: float = MEMBERSHIP_TOL,
    ):
        rows = [list(r) for r in matrix]
        if len(rows) != codomain.rank or any(len(r) != domain.rank for r in rows):
            raise ShapeMismatch(f"operator matrix must be {codomain.rank} x {domain.rank}")
        if domain.chain != codomain.chain:
            raise ChainMismatch("domain and codomain live over different chains")
        for r in rows:
            for a in r:
                if a.chain != domain.chain:
                    raise ChainMismatch("matrix entry lives over a different chain")
        blocks = [np.block([[a.top.blocks[b] for a in r] for r in rows]) for b in range(len(domain.block_sizes))]
        self._init(domain, codomain, blocks, check=True, tol=tol)

    def _init(self, domain, codomain, blocks, check, tol=MEMBERSHIP_TOL):
        blocks = tuple(_freeze(x) for x in blocks)
        if check:
            if domain.chain != codomain.chain:
                raise ChainMismatch("domain and codomain live over different chains")
            if len(blocks) != len(domain.block_sizes):
                raise ShapeMismatch("wrong number of blocks")
            for m, x in zip(domain.block_sizes, blocks):
                if x.shape != (codomain.rank * m, domain.rank * m):
                    raise ShapeMismatch(f"block of shape {x.shape}, expected {(codomain.rank * m, domain.rank * m)}")
                if not np.all(np.isfinite(x)):
                    raise ValueError("operators must have finite entries")
            if not (domain.is_free and codomain.is_free):
                scale = tol * (1.0 + max(spectral_norm(x) for x in blocks))
                gap = 0.0
                for b, x in enumerate(blocks):
                    y = x
                    if not codomain.is_free:
                        y = codomain.projection.blocks[b] @ y
                    if not domain.is_free:
                        y = y @ domain.projection.blocks[b]
                    gap = max(gap, spectral_norm(y - x))
                if gap > scale:
                    raise NotInSpace(f"||Q T P - T|| = {gap:.3g} exceeds {scale:.3g}")
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "codomain", codomain)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def _from_blocks(cls, domain, codomain, blocks, check: bool = True, tol: float = MEMBERSHIP_TOL):
        obj = cls.__new__(cls)
        obj._init(domain, codomain, blocks, check, tol)
        return obj

    @classmethod
    def from_blocks(cls, domain, codomain, blocks, tol: float = MEMBERSHIP_TOL):
        return cls._from_blocks(domain, codomain, blocks, check=True, tol=tol)

    def __setattr__(self, name, value):
        raise AttributeError("AdjointableOperator is immutable")

    @property
    def is_endomorphism(self) -> bool:
        return self.domain == self.codomain

    def entry(self, i: int, j: int) -> CoherentElement:
        sizes = self.domain.block_sizes
        return CoherentElement.from_blocks(
            self.domain.chain, [x[i * m:(i + 1) * m, j * m:(j + 1) * m] for m, x in zip(sizes, self.blocks)]
        )

    @property
    def matrix(self) -> list[list[CoherentElement]]:
        return [[self.entry(i, j) for j in range(self.domain.rank)] for i in range(self.codomain.rank)]

    def flattened(self, level: int) -> list[np.ndarray]:
        """The complex matrices realizing the operator on ``E_level``, one per block."""
        return [self.blocks[j] for j in self.domain.chain.surviving(level)]

    def _check_same(self, other: "AdjointableOperator"):
        if not isinstance(other, AdjointableOperator):
            raise TypeError(f"expected AdjointableOperator, got {type(other).__name__}")
        if self.domain != other.domain or self.codomain != other.codomain:
            raise SpaceMismatch("operators act between different modules")

    def __add__(self, other):
        self._check_same(other)
        return AdjointableOperator._from_blocks(
            self.domain, self.codomain, [a + b for a, b in zip(self.blocks, other.blocks)], check=False
        )

    def __sub__(self, other):
        self._check_same(other)
        return AdjointableOperator._from_blocks(
            self.domain, self.codomain, [a - b for a, b in zip(self.blocks, other.blocks)], check=False
        )

    def __neg__(self):
        return AdjointableOperator._from_blocks(self.domain, self.codomain, [-a for a in self.blocks], check=False)

    def __mul__(self, c):
        return AdjointableOperator._from_blocks(self.domain, self.codomain, [c * a for a in self.blocks], check=False)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def __call__(self, xi: ModuleElement) -> ModuleElement:
        return apply(self, xi)

    @property
    def H(self) -> "AdjointableOperator":
        return adjoint_op(self)

    def __eq__(self, other):
        if not isinstance(other, AdjointableOperator):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.codomain == other.codomain
            and all(np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks))
        )

    def allclose(self, other: "AdjointableOperator", atol: float = 1e-10) -> bool:
        self._check_same(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def at_level(self, level: int, domain=None, codomain=None) -> "AdjointableOperator":
        domain = domain or self.domain.at_level(level)
        if codomain is None:
            codomain = domain if self.codomain == self.domain else self.codomain.at_level(level)
        return AdjointableOperator._from_blocks(domain, codomain, self.flattened(level), check=False)

    def __repr__(self):
        return (
            f"AdjointableOperator({self.codomain.rank}x{self.domain.rank}, "
            f"norm={operator_seminorm(self, self.domain.chain.num_levels):.6g})"
        )


# ---------------------------------------------------------------- operations


def _same_space(xi: ModuleElement, eta: ModuleElement):
    if xi.space != eta.space:
        raise SpaceMismatch("elements belong to different modules")


def inner(xi: ModuleElement, eta: ModuleElement) -> CoherentElement:
    """``<xi, eta> = sum_j xi_j^* eta_j``, conjugate-linear in the first slot."""
    _same_space(xi, eta)
    return CoherentElement.from_blocks(xi.space.chain, [x.conj().T @ y for x, y in zip(xi.blocks, eta.blocks)])


def act(xi: ModuleElement, a: CoherentElement) -> ModuleElement:
    """Right module action ``xi . a``."""
    if a.chain != xi.space.chain:
        raise ChainMismatch("scalar lives over a different chain")
    return type(xi)._from_blocks(xi.space, [x @ s for x, s in zip(xi.blocks, a.top.blocks)], check=False)


def module_seminorm(xi: ModuleElement, level: int) -> float:
    return float(np.sqrt(inner(xi, xi).seminorm(level)))


def bounded_module_norm(xi: ModuleElement) -> float:
    chain = xi.space.chain
    return max(module_seminorm(xi, level) for level in range(1, chain.num_levels + 1))


def standard_basis(chain: SeminormChain, n: int) -> list[Multiplier]:
    """The multipliers ``e_1..e_n`` of ``A^n``; ``e_k`` has the unit in slot ``k``."""
    if n < 1:
        raise InvalidCount(f"need at least one basis multiplier, got {n}")
    space = ModuleSpace(chain, n)
    out = []
    for k in range(n):
        blocks = []
        for m in chain.top_shape:
            x = np.zeros((n * m, m), dtype=complex)
            x[k * m:(k + 1) * m] = np.eye(m)
            blocks.append(x)
        out.append(Multiplier._from_blocks(space, blocks, check=False))
    return out


def apply(T: AdjointableOperator, xi: ModuleElement) -> ModuleElement:
    if xi.space != T.domain:
        raise SpaceMismatch("vector is not in the operator's domain")
    return type(xi)._from_blocks(T.codomain, [t @ x for t, x in zip(T.blocks, xi.blocks)], check=False)


def adjoint_op(T: AdjointableOperator) -> AdjointableOperator:
    return AdjointableOperator._from_blocks(T.codomain, T.domain, [t.conj().T for t in T.blocks], check=False)


def compose(T: AdjointableOperator, S: AdjointableOperator) -> AdjointableOperator:
    """``T o S`` (apply ``S`` first)."""
    if S.codomain != T.domain:
        raise SpaceMismatch("S.codomain must equal T.domain")
    return AdjointableOperator._from_blocks(S.domain, T.codomain, [t @ s for t, s in zip(T.blocks, S.blocks)], check=False)


def identity_op(space: ModuleSpace) -> AdjointableOperator:
    """``id_E``; on a projective module this is the projection itself."""
    if not space.is_free:
        return AdjointableOperator._from_blocks(space, space, space.projection.blocks, check=False)
    return AdjointableOperator._from_blocks(
        space, space, [np.eye(space.rank * m, dtype=complex) for m in space.block_sizes], check=False
    )


def zero_op(domain: ModuleSpace, codomain: ModuleSpace) -> AdjointableOperator:
    return AdjointableOperator._from_blocks(
        domain,
        codomain,
        [np.zeros((codomain.rank * m, domain.rank * m), dtype=complex) for m in domain.block_sizes],
        check=False,
    )


def diagonal_op(space: ModuleSpace, entries: Sequence[CoherentElement]) -> AdjointableOperator:
    """The operator ``diag(a_1, ..., a_d)`` on a free module."""
    z = CoherentElement.zeros(space.chain)
    rows = [[entries[i] if i == j else z for j in range(space.rank)] for i in range(space.rank)]
    return AdjointableOperator(space, space, rows)


def rank_one(h: ModuleElement, g: ModuleElement) -> AdjointableOperator:
    """``h o g*``: the operator ``xi -> h . <g, xi>``."""
    return AdjointableOperator._from_blocks(
        g.space, h.space, [x @ y.conj().T for x, y in zip(h.blocks, g.blocks)], check=False
    )


def operator_seminorm(T: AdjointableOperator, level: int) -> float:
    return max(spectral_norm(x) for x in T.flattened(level))


def bounded_operator_norm(T: AdjointableOperator) -> float:
    chain = T.domain.chain
    return max(operator_seminorm(T, level) for level in range(1, chain.num_levels + 1))


def _require_endomorphism(T: AdjointableOperator):
    if not T.is_endomorphism:
        raise SpaceMismatch("operation needs an endomorphism")


def _compressions(T: AdjointableOperator):
    """Yield ``(V, V^H T V)`` per top block; ``V`` is ``None`` on free modules."""
    for v, t in zip(T.domain.range_bases, T.blocks):
        yield v, (t if v is None else v.conj().T @ t @ v)


def _expand(v: Optional[np.ndarray], k: np.ndarray) -> np.ndarray:
    return k if v is None else v @ k @ v.conj().T


def compressed_eigenvalues(T: AdjointableOperator, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Eigenvalues (ascending) of ``T`` restricted to ``E``, per top block."""
    _require_endomorphism(T)
    out = []
    for _, k in _compressions(T):
        scale = tol * (1.0 + spectral_norm(k))
        if spectral_norm(k - k.conj().T) > scale:
            raise NotHermitian("operator is not self-adjoint")
        out.append(np.linalg.eigvalsh((k + k.conj().T) / 2))
    return out


def is_positive_op(T: AdjointableOperator, tol: float = DEFAULT_TOL) -> bool:
    _require_endomorphism(T)
    return all(algebra.matrix_is_positive(k, tol) for _, k in _compressions(T))


def functional_calculus(
    T: AdjointableOperator,
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = DEFAULT_TOL,
    require_positive: bool = False,
) -> AdjointableOperator:
    """``f(T)`` for a self-adjoint endomorphism, computed on ``E`` only."""
    _require_endomorphism(T)
    blocks = [_expand(v, hermitian_function(k, f, tol, require_positive)) for v, k in _compressions(T)]
    return AdjointableOperator._from_blocks(T.domain, T.domain, blocks, check=False)


def operator_inverse_sqrt(T: AdjointableOperator, tol: float = DEFAULT_TOL) -> AdjointableOperator:
    return functional_calculus(T, lambda t: t ** -0.5, tol, require_positive=True)


def operator_sqrt(T: AdjointableOperator, tol: float = DEFAULT_TOL) -> AdjointableOperator:
    return functional_calculus(T, lambda t: np.sqrt(np.clip(t, 0.0, None)), tol)


def operator_inverse(T: AdjointableOperator, tol: float = DEFAULT_TOL) -> AdjointableOperator:
    """Inverse of an invertible endomorphism of ``E``.

    Positive operators go through the eigendecomposition kernel; anything
    else is solved blockwise on the compression to ``E``.
    """
    _require_endomorphism(T)
    scale = tol * (1.0 + bounded_operator_norm(T))
    blocks = []
    for v, k in _compressions(T):
        smin = float(np.linalg.svd(k, compute_uv=False)[-1])
        if smin <= scale:
            raise NotInvertible(f"smallest singular value {smin:.3g} not above {scale:.3g}")
        if algebra.matrix_is_positive(k, tol):
            kinv = hermitian_function(k, lambda t: 1.0 / t, tol, require_positive=True)
        else:
            kinv = np.linalg.solve(k, np.eye(k.shape[0]))
        blocks.append(_expand(v, kinv))
    return AdjointableOperator._from_blocks(T.domain, T.domain, blocks, check=False)
