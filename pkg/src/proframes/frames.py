"""Frames of multipliers: bounds, transform, reconstruction, normalization, duals.

A frame ``{h_n}`` in ``E`` is tested against the inequality

    C <xi, xi>  <=  sum_n <xi, h_n><h_n, xi>  <=  D <xi, xi>

in the order of the algebra.  The middle term is ``<xi, G xi>`` with
``G = theta* theta`` the gram operator, so the best constants are the
extreme eigenvalues of ``G`` restricted to ``E``, level by level.  Since
every level is a set of top blocks, all of this is computed once at the top
and then aggregated per level.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CountMismatch,
    InvalidCount,
    NotAFrame,
    NotAProjection,
    NotInvertible,
    NotPositiveInvertible,
    SpaceMismatch,
    VerificationFailure,
)
from .hilbert_module import (
    AdjointableOperator,
    ModuleElement,
    ModuleSpace,
    Multiplier,
    act,
    adjoint_op,
    apply,
    bounded_module_norm,
    bounded_operator_norm,
    compose,
    compressed_eigenvalues,
    identity_op,
    inner,
    is_positive_op,
    module_seminorm,
    operator_inverse,
    operator_inverse_sqrt,
    operator_seminorm,
    rank_one,
    standard_basis,
)
from .prosystem import CoherentElement

DEFAULT_TOL = 1e-9
# relative gap below which the lower bound counts as zero
NOT_A_FRAME_RTOL = 1e-8


class Frame:
    """An ordered, finite family of multipliers in one module."""

    def __init__(self, space: ModuleSpace, multipliers: Sequence[ModuleElement]):
        hs = []
        for h in multipliers:
            if h.space != space:
                raise SpaceMismatch("every multiplier must live in the frame's module")
            hs.append(h if isinstance(h, Multiplier) else Multiplier.from_element(h))
        if not hs:
            raise InvalidCount("a frame needs at least one multiplier")
        self.space = space
        self.multipliers: tuple[Multiplier, ...] = tuple(hs)

    def __len__(self) -> int:
        return len(self.multipliers)

    def __iter__(self):
        return iter(self.multipliers)

    def __getitem__(self, n: int) -> Multiplier:
        return self.multipliers[n]

    def at_level(self, level: int) -> "Frame":
        """The pushed-forward family in ``E_level``."""
        space = self.space.at_level(level)
        return Frame(space, [h.at_level(level, space) for h in self.multipliers])

    def allclose(self, other: "Frame", atol: float) -> bool:
        if len(self) != len(other) or self.space != other.space:
            return False
        return all(a.allclose(b, atol) for a, b in zip(self, other))

    def __repr__(self):
        return f"Frame(N={len(self)}, space={self.space!r})"


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    per_level: tuple[tuple[float, float], ...]

    @property
    def is_frame(self) -> bool:
        return self.lower > NOT_A_FRAME_RTOL * (1.0 + self.upper)

    def as_dict(self) -> dict:
        return {
            "C": self.lower,
            "D": self.upper,
            "levels": [{"level": i + 1, "C": c, "D": d} for i, (c, d) in enumerate(self.per_level)],
        }


@dataclass(frozen=True)
class FrameOperatorBundle:
    theta: AdjointableOperator
    gram: AdjointableOperator
    inv_gram: AdjointableOperator


def _check_member(frame: Frame, xi: ModuleElement):
    if xi.space != frame.space:
        raise SpaceMismatch("vector is not in the frame's module")


def frame_sum(frame: Frame, xi: ModuleElement) -> CoherentElement:
    """``sum_n <xi, h_n><h_n, xi>``, accumulated in index order."""
    _check_member(frame, xi)
    total = CoherentElement.zeros(frame.space.chain)
    for h in frame:
        c = inner(h, xi)
        total = total + c.H @ c
    return total


def analysis_operator(frame: Frame) -> AdjointableOperator:
    """``theta: E -> A^N``, ``xi -> (<h_n, xi>)_n``; row ``n`` is ``h_n*``."""
    target = ModuleSpace(frame.space.chain, len(frame))
    blocks = [np.vstack([h.blocks[b].conj().T for h in frame]) for b in range(len(frame.space.block_sizes))]
    return AdjointableOperator._from_blocks(frame.space, target, blocks, check=False)


def gram_operator(frame: Frame) -> AdjointableOperator:
    theta = analysis_operator(frame)
    return compose(adjoint_op(theta), theta)


# the usual name in frame theory
frame_operator = gram_operator


def _block_extremes(frame: Frame, tol: float) -> list[tuple[float, float]]:
    eigs = compressed_eigenvalues(gram_operator(frame), tol)
    return [(float(w[0]), float(w[-1])) for w in eigs]


def optimal_bounds(frame: Frame, tol: float = DEFAULT_TOL) -> FrameBounds:
    """Best constants ``C, D`` overall and for every level."""
    extremes = _block_extremes(frame, tol)
    chain = frame.space.chain
    per_level = []
    for level in range(1, chain.num_levels + 1):
        idx = chain.surviving(level)
        per_level.append((min(extremes[j][0] for j in idx), max(extremes[j][1] for j in idx)))
    return FrameBounds(
        lower=min(c for c, _ in per_level),
        upper=max(d for _, d in per_level),
        per_level=tuple(per_level),
    )


def is_normalized(frame: Frame, tol: float = DEFAULT_TOL) -> bool:
    b = optimal_bounds(frame)
    return abs(b.lower - 1.0) <= tol and abs(b.upper - 1.0) <= tol


def require_frame(frame: Frame, tol: float = DEFAULT_TOL) -> FrameBounds:
    b = optimal_bounds(frame)
    if not b.is_frame or b.lower <= tol:
        raise NotAFrame(f"lower frame bound {b.lower:.3g} is numerically zero (D = {b.upper:.3g})")
    return b


def frame_transform(frame: Frame, tol: float = DEFAULT_TOL) -> FrameOperatorBundle:
    """Frame transform ``theta``, its gram ``theta* theta`` and the inverse gram.

    Also checks ``theta* o e_n == h_n`` for every ``n``.
    """
    require_frame(frame, tol)
    theta = analysis_operator(frame)
    theta_star = adjoint_op(theta)
    for n, e in enumerate(standard_basis(frame.space.chain, len(frame))):
        image = apply(theta_star, e)
        gap = max(float(np.max(np.abs(a - b))) for a, b in zip(image.blocks, frame[n].blocks))
        if gap > tol:
            raise VerificationFailure(f"theta* o e_{n + 1} differs from h_{n + 1} by {gap:.3g}")
    gram = compose(theta_star, theta)
    return FrameOperatorBundle(theta=theta, gram=gram, inv_gram=operator_inverse(gram))


def reconstruct(frame: Frame, xi: ModuleElement) -> ModuleElement:
    """``sum_n h_n . <h_n, xi>``; equals ``xi`` exactly when the frame is normalized."""
    _check_member(frame, xi)
    total = frame.space.zero()
    for h in frame:
        total = total + act(h.as_element(), inner(h, xi))
    return total


def mixed_reconstruct(frame: Frame, dual: Frame, xi: ModuleElement) -> ModuleElement:
    """``sum_n h_n . <t_n, xi>`` for a second family ``{t_n}``."""
    _check_member(frame, xi)
    _check_pair(frame, dual)
    total = frame.space.zero()
    for h, t in zip(frame, dual):
        total = total + act(h.as_element(), inner(t, xi))
    return total


def scale_frame(frame: Frame, T: AdjointableOperator) -> Frame:
    """``{T o h_n}`` for an endomorphism ``T`` of the frame's module."""
    if T.domain != frame.space or T.codomain != frame.space:
        raise SpaceMismatch("operator must be an endomorphism of the frame's module")
    return Frame(frame.space, [apply(T, h) for h in frame])


def normalize(frame: Frame, tol: float = DEFAULT_TOL) -> Frame:
    """``{(theta* theta)^(-1/2) o h_n}``, a normalized frame."""
    require_frame(frame, tol)
    return scale_frame(frame, operator_inverse_sqrt(gram_operator(frame)))


def scale_by_operator(frame: Frame, S: AdjointableOperator, tol: float = DEFAULT_TOL) -> Frame:
    """``{S o h_n}`` for a positive invertible ``S``; the result is again a frame."""
    if S.domain != frame.space or S.codomain != frame.space:
        raise SpaceMismatch("operator must be an endomorphism of the frame's module")
    if not is_positive_op(S, tol):
        raise NotPositiveInvertible("operator is not positive")
    try:
        operator_inverse(S, tol)
    except NotInvertible as exc:
        raise NotPositiveInvertible(str(exc)) from exc
    return scale_frame(frame, S)


def canonical_dual(frame: Frame, tol: float = DEFAULT_TOL) -> Frame:
    """``{(theta* theta)^(-1) o h_n}``."""
    require_frame(frame, tol)
    return scale_frame(frame, operator_inverse(gram_operator(frame)))


def synthesis_sum(frame: Frame, dual: Frame) -> AdjointableOperator:
    """``sum_n h_n o t_n*`` as one operator, built term by term."""
    _check_pair(frame, dual)
    total = rank_one(frame[0], dual[0])
    for h, t in zip(frame.multipliers[1:], dual.multipliers[1:]):
        total = total + rank_one(h, t)
    return total


def reconstruction_operator(frame: Frame, tol: float = DEFAULT_TOL) -> AdjointableOperator:
    """The positive invertible ``S`` with ``xi = sum_n h_n . <S o h_n, xi>``.

    The candidate is the inverse gram.  It is cross-checked against
    ``T* T`` with ``T = (theta* theta)^(-1/2)`` (the operator that normalizes
    the frame), against the defining identity, and for positivity.
    """
    require_frame(frame, tol)
    gram = gram_operator(frame)
    S = operator_inverse(gram)
    T = operator_inverse_sqrt(gram)
    alt = compose(adjoint_op(T), T)
    scale = tol * (1.0 + bounded_operator_norm(S))
    if bounded_operator_norm(S - alt) > scale:
        raise VerificationFailure("inverse gram and T*T disagree")
    identity = identity_op(frame.space)
    residual = bounded_operator_norm(synthesis_sum(frame, scale_frame(frame, S)) - identity)
    if residual > tol * (1.0 + bounded_operator_norm(gram) * bounded_operator_norm(S)):
        raise VerificationFailure(f"mixed reconstruction residual {residual:.3g}")
    if not is_positive_op(S, tol):
        raise VerificationFailure("reconstruction operator is not positive")
    return S


def _check_pair(frame1: Frame, frame2: Frame):
    if frame1.space != frame2.space:
        raise SpaceMismatch("frames live in different modules")
    if len(frame1) != len(frame2):
        raise CountMismatch(f"{len(frame1)} vs {len(frame2)} multipliers")


def duality_residuals(frame1: Frame, frame2: Frame) -> list[float]:
    """``||theta_1* theta_2 - id||`` at each level."""
    _check_pair(frame1, frame2)
    cross = compose(adjoint_op(analysis_operator(frame1)), analysis_operator(frame2))
    diff = cross - identity_op(frame1.space)
    return [operator_seminorm(diff, level) for level in range(1, frame1.space.chain.num_levels + 1)]


def duality_check(frame1: Frame, frame2: Frame, tol: float = DEFAULT_TOL) -> bool:
    return all(r <= tol for r in duality_residuals(frame1, frame2))


@dataclass(frozen=True)
class BidualReport:
    multiplier_gap: float
    gram_identity_gap: float
    cross_identity_gap: float
    tol: float

    @property
    def holds(self) -> bool:
        return max(self.multiplier_gap, self.gram_identity_gap, self.cross_identity_gap) <= self.tol


def bidual_report(frame: Frame, tol: float = DEFAULT_TOL) -> BidualReport:
    dual = canonical_dual(frame, tol)
    bidual = canonical_dual(dual, tol)
    gap = max(bounded_module_norm(b - h) for b, h in zip(bidual, frame))

    theta = analysis_operator(frame)
    theta_dual = analysis_operator(dual)
    gram = compose(adjoint_op(theta), theta)
    inv_dual_gram = operator_inverse(compose(adjoint_op(theta_dual), theta_dual))
    cross = compose(adjoint_op(theta_dual), theta)
    return BidualReport(
        multiplier_gap=gap,
        gram_identity_gap=bounded_operator_norm(inv_dual_gram - gram),
        cross_identity_gap=bounded_operator_norm(cross - identity_op(frame.space)),
        tol=tol,
    )


def bidual_check(frame: Frame, tol: float = DEFAULT_TOL) -> bool:
    """Whether the canonical dual of the canonical dual is the frame itself."""
    return bidual_report(frame, tol).holds


def frame_from_projection(P: AdjointableOperator, tol: float = DEFAULT_TOL) -> Frame:
    """``{P o e_n}``, a normalized frame of the summand ``P A^N``."""
    if not P.domain.is_free or P.domain != P.codomain:
        raise NotAProjection("expected an operator on a free module A^N")
    space = ModuleSpace(P.domain.chain, P.domain.rank, P, tol)
    basis = standard_basis(P.domain.chain, P.domain.rank)
    return Frame(space, [Multiplier._from_blocks(space, apply(P, e).blocks, check=False) for e in basis])


def frame_membership_boundedness(frame: Frame) -> list[float]:
    """``||h_n||_inf`` for each multiplier; each is at most ``sqrt(D)``."""
    return [bounded_module_norm(h) for h in frame]


def normalized_by_level(frame: Frame, tol: float = DEFAULT_TOL) -> list[bool]:
    """The normalization verdict for each pushed-forward frame in ``E_level``."""
    return [is_normalized(frame.at_level(level), tol) for level in range(1, frame.space.chain.num_levels + 1)]


def reconstruction_residual(frame: Frame, xi: ModuleElement, level: Optional[int] = None) -> float:
    level = level or frame.space.chain.num_levels
    return module_seminorm(reconstruct(frame, xi) - xi, level)


def standard_frame(chain, n: int) -> Frame:
    """``{e_1..e_n}`` in ``A^n``."""
    basis = standard_basis(chain, n)
    return Frame(basis[0].space, basis)
