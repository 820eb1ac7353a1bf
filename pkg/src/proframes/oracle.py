"""Brute-force checks that do not share code paths with :mod:`proframes.frames`.

When every block of the chain is ``1 x 1`` each level algebra is ``C^k``
and a frame splits into ``k`` classical Hilbert-space frames.  Their bounds
are squared extreme singular values of the analysis matrix, which gives an
SVD route to compare against the engine's eigenvalue route.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import algebra
from .errors import NotScalarLevels
from .frames import Frame, FrameBounds, frame_sum, optimal_bounds
from .generate import random_module_element
from .hilbert_module import inner

ORACLE_TOL = 1e-9
ORDER_SLACK = 1e-8


@dataclass(frozen=True)
class ClassicalFrame:
    """``N`` vectors in ``C^m``, stored as the rows of an ``N x m`` array."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("need at least one vector of positive dimension")
        if not np.all(np.isfinite(v)):
            raise ValueError("frame vectors must be finite")
        object.__setattr__(self, "vectors", v)

    @property
    def analysis_matrix(self) -> np.ndarray:
        # row n is v_n^*, so (A x)_n = <v_n, x>
        return self.vectors.conj()


def classical_bounds(f: ClassicalFrame) -> tuple[float, float]:
    n, m = f.vectors.shape
    s = np.linalg.svd(f.analysis_matrix, compute_uv=False)
    upper = float(s[0] ** 2)
    lower = float(s[-1] ** 2) if n >= m else 0.0
    return lower, upper


def sampled_order_check(frame: Frame, bounds: FrameBounds, trials: int = 100, seed: int = 0) -> bool:
    """Test ``C<xi,xi> <= sum_n <xi,h_n><h_n,xi> <= D<xi,xi>`` on random ``xi``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(trials):
        xi = random_module_element(rng, frame.space)
        s = frame_sum(frame, xi).top
        q = inner(xi, xi).top
        ok &= algebra.is_positive(s - bounds.lower * q, ORDER_SLACK)
        ok &= algebra.is_positive(bounds.upper * q - s, ORDER_SLACK)
    return bool(ok)


def _classical_split(frame: Frame, b: int) -> ClassicalFrame:
    """The classical frame carried by top block ``b`` (all blocks are 1 x 1)."""
    vecs = np.array([h.blocks[b][:, 0] for h in frame])
    if not frame.space.is_free:
        basis = scipy.linalg.orth(frame.space.projection.blocks[b])
        # row n becomes (W^H h_n)^T: coordinates of h_n in an orthonormal basis W of range(P)
        vecs = vecs @ basis.conj()
    return ClassicalFrame(vecs)


@dataclass(frozen=True)
class CrossValidationReport:
    levels: tuple[dict, ...]
    max_delta: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_delta <= self.tol

    def as_dict(self) -> dict:
        return {"levels": list(self.levels), "max_delta": self.max_delta, "tol": self.tol, "passed": self.passed}


def cross_validate(frame: Frame, tol: float = ORACLE_TOL) -> CrossValidationReport:
    chain = frame.space.chain
    if any(n != 1 for n in chain.top_shape):
        raise NotScalarLevels(f"cross-validation needs 1x1 blocks, got {chain.top_shape.blocks}")
    engine = optimal_bounds(frame)
    per_block = [classical_bounds(_classical_split(frame, b)) for b in range(len(chain.top_shape))]
    rows = []
    worst = 0.0
    for level in range(1, chain.num_levels + 1):
        idx = chain.surviving(level)
        c = min(per_block[j][0] for j in idx)
        d = max(per_block[j][1] for j in idx)
        ce, de = engine.per_level[level - 1]
        delta = max(abs(c - ce), abs(d - de))
        worst = max(worst, delta)
        rows.append({"level": level, "engine": [ce, de], "classical": [c, d], "delta": delta})
    return CrossValidationReport(tuple(rows), worst, tol)
