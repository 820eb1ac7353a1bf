"""Seeded random instances: chains, elements, projections, frames, operators.

All draws use :func:`numpy.random.default_rng` (PCG64), and every helper
takes the generator explicitly so a seed fully determines the output.
Complex entries are standard complex Gaussians, ``(x + iy)/sqrt(2)``.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraElement, BlockShape
from .frames import Frame, optimal_bounds
from .hilbert_module import AdjointableOperator, ModuleElement, ModuleSpace, Multiplier
from .prosystem import CoherentElement, SeminormChain


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(gaussian(rng, (n, n)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_element(rng, shape) -> AlgebraElement:
    shape = shape if isinstance(shape, BlockShape) else BlockShape(tuple(shape))
    return AlgebraElement(shape, [gaussian(rng, (n, n)) for n in shape])


def random_coherent(rng, chain: SeminormChain) -> CoherentElement:
    return CoherentElement(chain, random_element(rng, chain.top_shape))


def random_positive_coherent(rng, chain: SeminormChain, low: float = 0.5, high: float = 2.0) -> CoherentElement:
    blocks = []
    for n in chain.top_shape:
        u = random_unitary(rng, n)
        blocks.append((u * rng.uniform(low, high, n)) @ u.conj().T)
    return CoherentElement.from_blocks(chain, blocks)


def random_chain(rng, num_levels: int, top_blocks: Sequence[int]) -> SeminormChain:
    """A chain whose top level is ``top_blocks``; each step down deletes one random block.

    Once a single block is left it is kept, so lower levels may repeat.
    """
    if num_levels < 1:
        raise ValueError("need at least one level")
    levels = [tuple(int(n) for n in top_blocks)]
    connecting = []
    for _ in range(num_levels - 1):
        upper = levels[0]
        if len(upper) > 1:
            drop = int(rng.integers(len(upper)))
            keep = tuple(i for i in range(len(upper)) if i != drop)
        else:
            keep = (0,)
        levels.insert(0, tuple(upper[i] for i in keep))
        connecting.insert(0, keep)
    return SeminormChain(tuple(BlockShape(s) for s in levels), tuple(connecting))


def random_module_element(rng, space: ModuleSpace) -> ModuleElement:
    blocks = [gaussian(rng, (space.rank * m, m)) for m in space.block_sizes]
    if not space.is_free:
        blocks = [p @ x for p, x in zip(space.projection.blocks, blocks)]
    return ModuleElement._from_blocks(space, blocks, check=False)


def random_projection(rng, chain: SeminormChain, n: int, rank: Optional[Sequence[int]] = None) -> AdjointableOperator:
    """A Hermitian idempotent on ``A^n`` from the eigenvectors of a random Hermitian matrix.

    ``rank`` gives the flattened rank per top block; by default it is drawn
    uniformly from ``1..n*m``.
    """
    free = ModuleSpace(chain, n)
    blocks = []
    for b, m in enumerate(chain.top_shape):
        dim = n * m
        g = gaussian(rng, (dim, dim))
        _, u = np.linalg.eigh(g + g.conj().T)
        r = int(rng.integers(1, dim + 1)) if rank is None else int(rank[b])
        v = u[:, :r]
        p = v @ v.conj().T
        blocks.append((p + p.conj().T) / 2)
    return AdjointableOperator._from_blocks(free, free, blocks, check=False)


def random_projective_space(rng, chain: SeminormChain, n: int) -> ModuleSpace:
    return ModuleSpace(chain, n, random_projection(rng, chain, n))


def random_frame(
    rng,
    space: ModuleSpace,
    count: int,
    min_ratio: float = 1e-2,
    max_tries: int = 100,
) -> Frame:
    """Gaussian multipliers, redrawn until ``C/D >= min_ratio``.

    ``count >= space.rank`` is required so that a full-rank draw exists.
    """
    if count < space.rank:
        raise ValueError(f"count {count} below module rank {space.rank}")
    for _ in range(max_tries):
        hs = [Multiplier.from_element(random_module_element(rng, space)) for _ in range(count)]
        frame = Frame(space, hs)
        b = optimal_bounds(frame)
        if b.lower >= min_ratio * b.upper:
            return frame
    raise RuntimeError("could not draw a well-conditioned frame")


def random_positive_operator(rng, space: ModuleSpace, low: float = 0.5, high: float = 2.0) -> AdjointableOperator:
    """A positive invertible endomorphism of ``space`` with spectrum in ``[low, high]`` on ``E``."""
    blocks = []
    for b, m in enumerate(space.block_sizes):
        v = space.range_bases[b]
        k = space.rank * m if v is None else v.shape[1]
        u = random_unitary(rng, k)
        s = (u * rng.uniform(low, high, k)) @ u.conj().T
        blocks.append(s if v is None else v @ s @ v.conj().T)
    return AdjointableOperator._from_blocks(space, space, blocks, check=False)


def random_operator(rng, domain: ModuleSpace, codomain: ModuleSpace) -> AdjointableOperator:
    blocks = [gaussian(rng, (codomain.rank * m, domain.rank * m)) for m in domain.block_sizes]
    for b in range(len(blocks)):
        if not codomain.is_free:
            blocks[b] = codomain.projection.blocks[b] @ blocks[b]
        if not domain.is_free:
            blocks[b] = blocks[b] @ domain.projection.blocks[b]
    return AdjointableOperator._from_blocks(domain, codomain, blocks, check=False)
