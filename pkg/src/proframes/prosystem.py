"""Pro-C*-algebras as finite inverse chains of block-diagonal algebras.

A :class:`SeminormChain` lists the quotient algebras ``A_1, ..., A_L``
(level ``L`` finest) together with block-deleting connecting maps.  A
:class:`CoherentElement` stores only its top-level component; the lower
components are obtained by deleting blocks, so coherence holds by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import algebra
from .algebra import AlgebraElement, BlockShape
from .errors import ChainMismatch, LevelOutOfRange, ShapeMismatch


@dataclass(frozen=True)
class SeminormChain:
    """Levels ``1..L`` and, for each ``l < L``, the surviving-block map into level ``l+1``.

    ``connecting[l-1][i]`` is the (0-based) index at level ``l+1`` of block
    ``i`` of level ``l``.  Indices are strictly increasing, so the maps are
    ordered injections.
    """

    levels: tuple[BlockShape, ...]
    connecting: tuple[tuple[int, ...], ...] = ()
    _top_index: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        levels = tuple(s if isinstance(s, BlockShape) else BlockShape(tuple(s)) for s in self.levels)
        connecting = tuple(tuple(int(i) for i in m) for m in self.connecting)
        if not levels:
            raise ShapeMismatch("a chain needs at least one level")
        if len(connecting) != len(levels) - 1:
            raise ShapeMismatch(
                f"{len(levels)} levels need {len(levels) - 1} connecting maps, got {len(connecting)}"
            )
        for k, m in enumerate(connecting):
            lower, upper = levels[k], levels[k + 1]
            if len(m) != len(lower):
                raise ShapeMismatch(f"connecting map {k} has {len(m)} entries for {len(lower)} blocks")
            if any(b <= a for a, b in zip(m, m[1:])):
                raise ShapeMismatch(f"connecting map {k} is not strictly increasing: {m}")
            for i, j in enumerate(m):
                if not 0 <= j < len(upper):
                    raise ShapeMismatch(f"connecting map {k} index {j} out of range")
                if lower[i] != upper[j]:
                    raise ShapeMismatch(
                        f"connecting map {k}: block {i} (size {lower[i]}) sent to block {j} (size {upper[j]})"
                    )
        top = [tuple(range(len(levels[-1])))]
        for m in reversed(connecting):
            above = top[0]
            top.insert(0, tuple(above[j] for j in m))
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "connecting", connecting)
        object.__setattr__(self, "_top_index", tuple(top))

    @classmethod
    def single(cls, shape) -> "SeminormChain":
        """A one-level chain, i.e. an ordinary C*-algebra."""
        return cls((shape if isinstance(shape, BlockShape) else BlockShape(tuple(shape)),))

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def top_shape(self) -> BlockShape:
        return self.levels[-1]

    def check_level(self, level: int) -> int:
        if not 1 <= level <= self.num_levels:
            raise LevelOutOfRange(f"level {level} outside 1..{self.num_levels}")
        return level

    def surviving(self, level: int) -> tuple[int, ...]:
        """Indices of the top-level blocks that survive at ``level``."""
        return self._top_index[self.check_level(level) - 1]

    def restrict(self, level: int) -> "SeminormChain":
        """The chain ``A_1 <- ... <- A_level`` (drops the finer levels)."""
        self.check_level(level)
        return SeminormChain(self.levels[:level], self.connecting[: level - 1])

    def level_algebra(self, level: int) -> "SeminormChain":
        """``A_level`` on its own, as a one-level chain."""
        return SeminormChain.single(self.levels[self.check_level(level) - 1])


class CoherentElement:
    """An element of the inverse limit, stored by its top-level component."""

    __slots__ = ("chain", "top")
    __hash__ = None

    def __init__(self, chain: SeminormChain, top: AlgebraElement):
        if top.shape != chain.top_shape:
            raise ShapeMismatch(f"top element shape {top.shape.blocks} vs chain top {chain.top_shape.blocks}")
        object.__setattr__(self, "chain", chain)
        object.__setattr__(self, "top", top)

    def __setattr__(self, name, value):
        raise AttributeError("CoherentElement is immutable")

    @classmethod
    def zeros(cls, chain: SeminormChain) -> "CoherentElement":
        return cls(chain, AlgebraElement.zeros(chain.top_shape))

    @classmethod
    def identity(cls, chain: SeminormChain) -> "CoherentElement":
        return cls(chain, AlgebraElement.identity(chain.top_shape))

    @classmethod
    def scalar(cls, chain: SeminormChain, c: complex) -> "CoherentElement":
        return cls(chain, AlgebraElement.scalar(chain.top_shape, c))

    @classmethod
    def from_blocks(cls, chain: SeminormChain, blocks: Sequence) -> "CoherentElement":
        return cls(chain, AlgebraElement(chain.top_shape, blocks))

    @classmethod
    def lift(cls, chain: SeminormChain, level: int, element: AlgebraElement) -> "CoherentElement":
        """A preimage of ``element`` under the projection onto ``level``.

        Blocks deleted on the way down are filled with zeros.
        """
        if element.shape != chain.levels[chain.check_level(level) - 1]:
            raise ShapeMismatch(f"element shape {element.shape.blocks} does not match level {level}")
        blocks = [np.zeros((n, n), dtype=complex) for n in chain.top_shape]
        for i, j in enumerate(chain.surviving(level)):
            blocks[j] = element.blocks[i]
        return cls.from_blocks(chain, blocks)

    @property
    def blocks(self):
        return self.top.blocks

    def _check(self, other: "CoherentElement"):
        if not isinstance(other, CoherentElement):
            raise TypeError(f"expected CoherentElement, got {type(other).__name__}")
        if self.chain != other.chain:
            raise ChainMismatch("elements live over different chains")

    def __add__(self, other):
        self._check(other)
        return CoherentElement(self.chain, self.top + other.top)

    def __sub__(self, other):
        self._check(other)
        return CoherentElement(self.chain, self.top - other.top)

    def __neg__(self):
        return CoherentElement(self.chain, -self.top)

    def __matmul__(self, other):
        self._check(other)
        return CoherentElement(self.chain, self.top @ other.top)

    def __mul__(self, c):
        if isinstance(c, CoherentElement):
            return self @ c
        return CoherentElement(self.chain, c * self.top)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CoherentElement):
            return NotImplemented
        return self.chain == other.chain and self.top == other.top

    @property
    def H(self) -> "CoherentElement":
        return CoherentElement(self.chain, algebra.adjoint(self.top))

    def allclose(self, other: "CoherentElement", atol: float = 1e-10) -> bool:
        self._check(other)
        return self.top.allclose(other.top, atol)

    def project(self, level: int) -> AlgebraElement:
        return project(self, level)

    def seminorm(self, level: int) -> float:
        return seminorm(self, level)

    def __repr__(self):
        return f"CoherentElement(levels={self.chain.num_levels}, top={self.top!r})"


def project(x: CoherentElement, level: int) -> AlgebraElement:
    """The canonical map onto ``A_level``: keep the surviving blocks."""
    idx = x.chain.surviving(level)
    if level == x.chain.num_levels:
        return x.top
    return AlgebraElement(x.chain.levels[level - 1], [x.top.blocks[j] for j in idx])


def connect(chain: SeminormChain, element: AlgebraElement, upper: int, lower: int) -> AlgebraElement:
    """Apply the connecting map from level ``upper`` down to level ``lower``."""
    chain.check_level(upper)
    chain.check_level(lower)
    if lower > upper:
        raise LevelOutOfRange(f"cannot map level {upper} up to level {lower}")
    if element.shape != chain.levels[upper - 1]:
        raise ShapeMismatch("element does not live at the stated level")
    blocks = list(element.blocks)
    for k in range(upper - 1, lower - 1, -1):
        blocks = [blocks[j] for j in chain.connecting[k - 1]]
    return AlgebraElement(chain.levels[lower - 1], blocks)


def seminorm(x: CoherentElement, level: int) -> float:
    return algebra.norm(project(x, level))


def bounded_norm(x: CoherentElement) -> float:
    """Supremum of all seminorms; for a finite chain this is the top seminorm."""
    return max(seminorm(x, level) for level in range(1, x.chain.num_levels + 1))
