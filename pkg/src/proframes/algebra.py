"""Finite-dimensional C*-algebras as block-diagonal complex matrices.

Every finite-dimensional C*-algebra is a direct sum
``M_{n_1}(C) + ... + M_{n_k}(C)``; an element is stored as the tuple of its
diagonal blocks.  All spectral work (positivity, inverses, square roots)
goes through :func:`hermitian_function`, so there is exactly one place where
eigenvalue tolerances are decided.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NotHermitian, ShapeMismatch, SpectrumOutOfDomain

DEFAULT_TOL = 1e-10

ScalarFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BlockShape:
    """Sizes ``(n_1, ..., n_k)`` of the matrix summands."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if not blocks:
            raise ShapeMismatch("a block shape needs at least one block")
        if any(n < 1 for n in blocks):
            raise ShapeMismatch(f"block sizes must be positive, got {blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]


def _as_shape(shape) -> BlockShape:
    return shape if isinstance(shape, BlockShape) else BlockShape(tuple(shape))


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


class AlgebraElement:
    """An immutable element of a block-diagonal matrix algebra."""

    __slots__ = ("shape", "blocks")
    __hash__ = None

    def __init__(self, shape, blocks: Iterable):
        shape = _as_shape(shape)
        frozen = tuple(_frozen(b) for b in blocks)
        if len(frozen) != len(shape):
            raise ShapeMismatch(f"expected {len(shape)} blocks, got {len(frozen)}")
        for n, b in zip(shape, frozen):
            if b.shape != (n, n):
                raise ShapeMismatch(f"block of shape {b.shape} where ({n}, {n}) expected")
            if not np.all(np.isfinite(b)):
                raise ValueError("algebra elements must have finite entries")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", frozen)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def zeros(cls, shape) -> "AlgebraElement":
        shape = _as_shape(shape)
        return cls(shape, [np.zeros((n, n)) for n in shape])

    @classmethod
    def identity(cls, shape) -> "AlgebraElement":
        shape = _as_shape(shape)
        return cls(shape, [np.eye(n) for n in shape])

    @classmethod
    def scalar(cls, shape, c: complex) -> "AlgebraElement":
        shape = _as_shape(shape)
        return cls(shape, [c * np.eye(n) for n in shape])

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape.blocks} vs {other.shape.blocks}")

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __matmul__(self, other):
        return mul(self, other)

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return mul(self, c)
        return AlgebraElement(self.shape, [c * a for a in self.blocks])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.shape == other.shape and all(
            np.array_equal(a, b) for a, b in zip(self.blocks, other.blocks)
        )

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-10) -> bool:
        self._check(other)
        return all(np.allclose(a, b, rtol=0, atol=atol) for a, b in zip(self.blocks, other.blocks))

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(b))) for b in self.blocks)

    def __repr__(self):
        return f"AlgebraElement(shape={self.shape.blocks}, norm={norm(self):.6g})"


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.shape, [a + b for a, b in zip(x.blocks, y.blocks)])


def mul(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    x._check(y)
    return AlgebraElement(x.shape, [a @ b for a, b in zip(x.blocks, y.blocks)])


def adjoint(x: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(x.shape, [a.conj().T for a in x.blocks])


def spectral_norm(m: np.ndarray) -> float:
    """Largest singular value of a single matrix (0 for empty matrices)."""
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, ord=2))


def norm(x: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return max(spectral_norm(b) for b in x.blocks)


def _hermitian_eigvals(m: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def matrix_is_positive(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Positivity of one square matrix with the relative slack ``tol*(1+||m||)``."""
    scale = tol * (1.0 + spectral_norm(m))
    if spectral_norm(m - m.conj().T) > scale:
        return False
    if m.size == 0:
        return True
    return bool(_hermitian_eigvals(m)[0] >= -scale)


def is_positive(x: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    scale = tol * (1.0 + norm(x))
    if norm(x - adjoint(x)) > scale:
        return False
    low = min(float(_hermitian_eigvals(b)[0]) for b in x.blocks)
    return low >= -scale


def leq(x: AlgebraElement, y: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    """Operator order ``x <= y``, i.e. ``y - x`` positive."""
    x._check(y)
    return is_positive(y - x, tol)


def hermitian_function(
    m: np.ndarray,
    f: ScalarFunction,
    tol: float = DEFAULT_TOL,
    require_positive: bool = False,
) -> np.ndarray:
    """Apply ``f`` to a Hermitian matrix through its eigendecomposition.

    With ``require_positive`` every eigenvalue must exceed ``tol*(1+||m||)``;
    this is how inverse-type functions (``t**-1``, ``t**-0.5``) are guarded.
    """
    if m.size == 0:
        return m.copy()
    scale = tol * (1.0 + spectral_norm(m))
    if spectral_norm(m - m.conj().T) > scale:
        raise NotHermitian(f"anti-Hermitian part exceeds {scale:.3g}")
    if require_positive:
        low = float(_hermitian_eigvals(m)[0])
        if low <= scale:
            raise SpectrumOutOfDomain(f"eigenvalue {low:.3g} not above {scale:.3g}")
    return _eig_apply(m, f)


def _eig_apply(m: np.ndarray, f: ScalarFunction) -> np.ndarray:
    w, u = np.linalg.eigh((m + m.conj().T) / 2)
    return (u * np.asarray(f(w))) @ u.conj().T


def herm_calculus(
    x: AlgebraElement,
    f: ScalarFunction,
    tol: float = DEFAULT_TOL,
    require_positive: bool = False,
) -> AlgebraElement:
    scale = tol * (1.0 + norm(x))
    if norm(x - adjoint(x)) > scale:
        raise NotHermitian(f"anti-Hermitian part exceeds {scale:.3g}")
    if require_positive:
        low = min(float(_hermitian_eigvals(b)[0]) for b in x.blocks)
        if low <= scale:
            raise SpectrumOutOfDomain(f"eigenvalue {low:.3g} not above {scale:.3g}")
    return AlgebraElement(x.shape, [_eig_apply(b, f) for b in x.blocks])


def inverse_sqrt(x: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    return herm_calculus(x, lambda t: t ** -0.5, tol, require_positive=True)


def inverse(x: AlgebraElement, tol: float = DEFAULT_TOL) -> AlgebraElement:
    """Inverse of a positive invertible element."""
    return herm_calculus(x, lambda t: 1.0 / t, tol, require_positive=True)


def spectrum_bounds(x: AlgebraElement, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    scale = tol * (1.0 + norm(x))
    if norm(x - adjoint(x)) > scale:
        raise NotHermitian(f"anti-Hermitian part exceeds {scale:.3g}")
    eigs = [_hermitian_eigvals(b) for b in x.blocks]
    return min(float(e[0]) for e in eigs), max(float(e[-1]) for e in eigs)


def from_nested(shape: Sequence[int], blocks: Sequence) -> AlgebraElement:
    """Build an element from plain nested lists/arrays of block matrices."""
    return AlgebraElement(BlockShape(tuple(shape)), [np.asarray(b) for b in blocks])
