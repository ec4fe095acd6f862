"""Probabilistic sampling of sparse projection directions.

Candidate split directions are integer coefficient combinations of the
best-ranked feature dimensions.  Better-ranked dimensions are both more
likely to participate and allowed a wider coefficient range; the sampled
integer vector is then L2-normalized.  A cosine filter keeps the winners
mutually dissimilar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from slm.dft import DftRanking


@dataclass(frozen=True)
class ProjectionVector:
    """Unit-norm projection direction over raw feature dimensions."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.coeffs, dtype=np.float64))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-D vector")
        if not np.isfinite(c).all():
            raise ValueError("coeffs contain NaN or Inf")
        nrm = float(np.linalg.norm(c))
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"coeffs must have unit L2 norm, got {nrm}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def support(self) -> np.ndarray:
        """Indices of nonzero coefficients."""
        return np.flatnonzero(self.coeffs)


@dataclass(frozen=True)
class ProbSearchParams:
    """Knobs for the sampling distribution and the diversity filter.

    range_scale/range_decay set how wide the integer coefficient range is
    per rank; select_decay sets how fast participation probability falls
    off with rank; max_active caps the number of nonzero coefficients.
    """

    range_scale: float = 10.0
    range_decay: float = 0.3
    select_decay: float = 0.2
    max_active: int = 8
    n_candidates: int = 512
    n_keep: int = 1
    max_cosine: float = 0.9

    def __post_init__(self):
        if self.range_scale <= 0.0:
            raise ValueError("range_scale must be positive")
        if self.range_decay < 0.0 or self.select_decay < 0.0:
            raise ValueError("decay rates must be non-negative")
        if self.max_active < 1:
            raise ValueError("max_active must be >= 1")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")
        if not 1 <= self.n_keep <= self.n_candidates:
            raise ValueError("n_keep must be in [1, n_candidates]")
        if self.max_cosine <= 0.0:
            raise ValueError("max_cosine must be positive")


def coefficient_range(rank: int, params: ProbSearchParams) -> int:
    """Half-width of the integer coefficient range at a 1-based rank."""
    if rank < 1:
        raise ValueError("rank is 1-based")
    return int(math.floor(params.range_scale * math.exp(-params.range_decay * rank)))


def selection_probability(rank: int, params: ProbSearchParams) -> float:
    """Probability that the dimension at a 1-based rank participates.

    Rank 1 always participates.
    """
    if rank < 1:
        raise ValueError("rank is 1-based")
    return math.exp(-params.select_decay * (rank - 1))


def sample_projection(
    ranking: DftRanking, params: ProbSearchParams, rng: np.random.Generator
) -> ProjectionVector:
    """Draw one sparse unit-norm direction over the ranked dimensions.

    Walks ranks best-first: each rank participates with its selection
    probability until max_active ranks are kept; each kept rank gets a
    nonzero integer coefficient from its range (or 0 when the range is
    empty).  All-zero draws are resampled from scratch.
    """
    n_ranks = ranking.order.size
    if n_ranks == 0:
        raise ValueError("empty ranking")
    dim = ranking.losses.size
    budget = min(params.max_active, n_ranks)

    for _ in range(100):
        coeffs = np.zeros(dim, dtype=np.float64)
        kept = 0
        for pos in range(n_ranks):
            if kept >= budget:
                break
            rank = pos + 1
            if rng.random() >= selection_probability(rank, params):
                continue
            kept += 1
            half = coefficient_range(rank, params)
            if half < 1:
                continue
            c = 0
            while c == 0:
                c = int(rng.integers(-half, half + 1))
            coeffs[ranking.order[pos]] = c
        nrm = np.linalg.norm(coeffs)
        if nrm > 0.0:
            return ProjectionVector(coeffs / nrm)

    raise ValueError(
        "sampled 100 all-zero projections; range_scale/range_decay leave no "
        "usable coefficient range"
    )


def diverse_indices(
    vectors: list[ProjectionVector],
    losses,
    n_keep: int,
    max_cosine: float,
) -> list[int]:
    """Greedy diversity filter; returns indices into `vectors`.

    Candidates are visited by ascending loss (ties keep input order); one is
    accepted iff its |cosine| to every accepted one is <= max_cosine.  The
    best candidate is always accepted, so the result is never empty.
    """
    if not vectors:
        raise ValueError("no candidates")
    losses = np.asarray(losses, dtype=np.float64)
    if losses.shape[0] != len(vectors):
        raise ValueError("losses length does not match candidates")
    if n_keep < 1:
        raise ValueError("n_keep must be >= 1")

    order = np.argsort(losses, kind="stable")
    selected: list[int] = [int(order[0])]
    for idx in order[1:]:
        if len(selected) >= n_keep:
            break
        v = vectors[idx].coeffs
        # unit norms make the dot product the cosine directly
        if all(abs(float(v @ vectors[s].coeffs)) <= max_cosine for s in selected):
            selected.append(int(idx))
    return selected


def select_diverse(
    vectors: list[ProjectionVector],
    losses,
    n_keep: int,
    max_cosine: float,
) -> list[ProjectionVector]:
    """Like diverse_indices, but returns the vectors themselves."""
    return [vectors[i] for i in diverse_indices(vectors, losses, n_keep, max_cosine)]
