"""Particle swarm minimization over a bounded box, with an adaptive variant.

The adaptive variant estimates how spread out the swarm is each iteration
(evolutionary factor), classifies the swarm into one of four states, nudges
the learning factors accordingly, reshapes inertia as a function of the
factor, and in the convergence state tries a Gaussian perturbation of the
best known point (elite learning).

Determinism contract: identical config (including seed) gives identical
results, including the loss history.  Random draws happen in a pinned
order: initial positions, initial velocities, then per iteration the
adaptation delta, the elite coordinate and noise (convergence state only),
and the r1, r2 component vectors per particle in particle order.  Loss
evaluations never consume randomness, so they may be batched or
parallelized freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

C_MIN = 1.5
C_MAX = 2.5
C_SUM_CAP = 4.0
SIGMA_MAX = 1.0
SIGMA_MIN = 0.1


class EvoState(Enum):
    EXPLORATION = "exploration"
    EXPLOITATION = "exploitation"
    CONVERGENCE = "convergence"
    JUMPOUT = "jumpout"


@dataclass(frozen=True)
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_loss: float


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm shape, dynamics coefficients and the search box.

    bounds is a uniform (lo, hi) box applied to every coordinate.  vmax
    defaults to 0.2 * (hi - lo).  When adaptive is set, c1/c2 must start
    inside [1.5, 2.5] because adaptation clamps them there.
    """

    dim: int
    population: int = 30
    max_iter: int = 110
    omega: float = 0.9
    c1: float = 2.0
    c2: float = 2.0
    bounds: tuple[float, float] = (-1.0, 1.0)
    vmax: float | None = None
    adaptive: bool = True
    seed: int = 0
    patience: int | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.population < 2:
            raise ValueError(f"population must be >= 2, got {self.population}")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        lo, hi = self.bounds
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"bounds must be a finite (lo, hi) pair with lo < hi, got {self.bounds}")
        object.__setattr__(self, "bounds", (float(lo), float(hi)))
        if self.vmax is not None and self.vmax <= 0.0:
            raise ValueError("vmax must be positive")
        if self.adaptive and not (C_MIN <= self.c1 <= C_MAX and C_MIN <= self.c2 <= C_MAX):
            raise ValueError(
                f"adaptive mode requires c1, c2 in [{C_MIN}, {C_MAX}], got ({self.c1}, {self.c2})"
            )
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1 when set")

    @property
    def resolved_vmax(self) -> float:
        lo, hi = self.bounds
        return self.vmax if self.vmax is not None else 0.2 * (hi - lo)


@dataclass
class SwarmState:
    particles: list[Particle]
    gbest_position: np.ndarray
    gbest_loss: float
    iteration: int = 0
    evo_state: EvoState | None = None
    evo_factor: float = 0.0


@dataclass(frozen=True)
class OptimizeResult:
    position: np.ndarray
    loss: float
    history: np.ndarray
    iterations: int
    evaluations: int


def step_particle(
    p: Particle,
    gbest: np.ndarray,
    cfg: SwarmConfig,
    r1,
    r2,
    omega: float | None = None,
    c1: float | None = None,
    c2: float | None = None,
) -> Particle:
    """One velocity-then-position update for a single particle.

    r1 and r2 are random factors in [0, 1], either scalars or one value
    per component.  The new velocity is clamped to [-vmax, vmax] per
    component before the position moves, and the position is clamped to
    the box.  The explicit omega/c1/c2 arguments let the adaptive loop
    supply per-iteration values.
    """
    if not (np.all((np.asarray(r1) >= 0.0) & (np.asarray(r1) <= 1.0))
            and np.all((np.asarray(r2) >= 0.0) & (np.asarray(r2) <= 1.0))):
        raise ValueError(f"r1 and r2 must be in [0, 1], got ({r1}, {r2})")
    w = cfg.omega if omega is None else omega
    a1 = cfg.c1 if c1 is None else c1
    a2 = cfg.c2 if c2 is None else c2
    vmax = cfg.resolved_vmax
    lo, hi = cfg.bounds

    v = w * p.velocity + a1 * r1 * (p.pbest_position - p.position) + a2 * r2 * (gbest - p.position)
    v = np.clip(v, -vmax, vmax)
    x = np.clip(p.position + v, lo, hi)
    return Particle(x, v, p.pbest_position, p.pbest_loss)


def evolutionary_factor(state: SwarmState) -> float:
    """Normalized isolation of the best particle within the swarm.

    Each particle's mean distance to the others is computed on current
    positions; the factor compares the best particle's distance to the
    swarm-wide min/max.  0 means the best particle sits in the densest
    spot (converged), 1 means it is the most isolated.
    """
    pop = len(state.particles)
    if pop < 2:
        raise ValueError("evolutionary factor needs at least two particles")
    positions = np.stack([p.position for p in state.particles])
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    mean_dist = dist.sum(axis=1) / (pop - 1)

    pbest = np.array([p.pbest_loss for p in state.particles])
    d_g = mean_dist[int(np.argmin(pbest))]
    d_min = mean_dist.min()
    d_max = mean_dist.max()
    if d_max == d_min:
        return 0.0
    return float((d_g - d_min) / (d_max - d_min))


def classify_state(f: float) -> EvoState:
    """Map the evolutionary factor to a swarm state via fixed intervals."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"evolutionary factor must be in [0, 1], got {f}")
    if f < 0.25:
        return EvoState.CONVERGENCE
    if f < 0.5:
        return EvoState.EXPLOITATION
    if f < 0.75:
        return EvoState.EXPLORATION
    return EvoState.JUMPOUT


def adapt_coefficients(
    state: EvoState, c1: float, c2: float, f: float, rng: np.random.Generator
) -> tuple[float, float, float]:
    """Per-iteration learning-factor and inertia update for the given state.

    Draws one delta uniform in [0.05, 0.1].  c1/c2 are clamped to
    [1.5, 2.5] and rescaled to sum 4 when they exceed it.  Inertia follows
    omega(f) = 1 / (1 + 1.5 * exp(-2.6 f)).
    """
    delta = rng.uniform(0.05, 0.1)
    if state is EvoState.EXPLORATION:
        c1, c2 = c1 + delta, c2 - delta
    elif state is EvoState.EXPLOITATION:
        c1, c2 = c1 + 0.5 * delta, c2 - 0.5 * delta
    elif state is EvoState.CONVERGENCE:
        c1, c2 = c1 + 0.5 * delta, c2 + 0.5 * delta
    else:
        c1, c2 = c1 - delta, c2 + delta
    c1 = min(max(c1, C_MIN), C_MAX)
    c2 = min(max(c2, C_MIN), C_MAX)
    total = c1 + c2
    if total > C_SUM_CAP:
        c1 *= C_SUM_CAP / total
        c2 *= C_SUM_CAP / total
    omega = 1.0 / (1.0 + 1.5 * math.exp(-2.6 * f))
    return c1, c2, omega


def elite_learning(
    gbest: np.ndarray,
    iteration: int,
    max_iter: int,
    cfg: SwarmConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Gaussian perturbation of one coordinate of the best known point.

    The noise scale shrinks linearly from 1.0 to 0.1 of the box width over
    the run.  The result is clamped to the box; acceptance is the caller's
    job.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    lo, hi = cfg.bounds
    sigma = SIGMA_MAX - (SIGMA_MAX - SIGMA_MIN) * iteration / max_iter
    coord = int(rng.integers(cfg.dim))
    out = np.array(gbest, dtype=np.float64, copy=True)
    out[coord] += rng.normal(0.0, sigma * (hi - lo))
    return np.clip(out, lo, hi)


def optimize(loss, cfg: SwarmConfig, batch_loss=None) -> OptimizeResult:
    """Minimize a black-box loss over the box with a particle swarm.

    `loss` maps one position to a float.  `batch_loss`, when given, maps a
    (k, dim) array to k floats and is used for all evaluations; it must
    agree with `loss`.  Every loss value must be finite.

    Returns the best position found, its loss, and the per-iteration
    history of the best loss (history[0] is the post-initialization value,
    so its length is iterations + 1).
    """
    if loss is None and batch_loss is None:
        raise ValueError("need a loss function")

    def eval_positions(positions: np.ndarray) -> list[float]:
        if batch_loss is not None:
            values = [float(v) for v in batch_loss(positions)]
        else:
            values = [float(loss(positions[i])) for i in range(positions.shape[0])]
        for i, v in enumerate(values):
            if not math.isfinite(v):
                raise ValueError(f"loss returned non-finite value {v} at position {positions[i]}")
        return values

    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds
    vmax = cfg.resolved_vmax

    positions = rng.uniform(lo, hi, (cfg.population, cfg.dim))
    velocities = rng.uniform(-vmax, vmax, (cfg.population, cfg.dim))
    values = eval_positions(positions)
    evaluations = cfg.population

    particles = [
        Particle(positions[i].copy(), velocities[i].copy(), positions[i].copy(), values[i])
        for i in range(cfg.population)
    ]
    best = int(np.argmin(values))
    state = SwarmState(particles, particles[best].position.copy(), values[best])

    history = [state.gbest_loss]
    c1, c2 = cfg.c1, cfg.c2
    stall = 0

    for it in range(cfg.max_iter):
        state.iteration = it
        omega = cfg.omega
        if cfg.adaptive:
            f = evolutionary_factor(state)
            evo = classify_state(f)
            state.evo_factor = f
            state.evo_state = evo
            c1, c2, omega = adapt_coefficients(evo, c1, c2, f, rng)
            if evo is EvoState.CONVERGENCE:
                cand = elite_learning(state.gbest_position, it, cfg.max_iter, cfg, rng)
                cand_loss = eval_positions(cand[None, :])[0]
                evaluations += 1
                _place_elite(state, cand, cand_loss)

        for i, p in enumerate(state.particles):
            r1 = rng.random(cfg.dim)
            r2 = rng.random(cfg.dim)
            state.particles[i] = step_particle(p, state.gbest_position, cfg, r1, r2, omega, c1, c2)

        moved = np.stack([p.position for p in state.particles])
        values = eval_positions(moved)
        evaluations += cfg.population

        for i, v in enumerate(values):
            p = state.particles[i]
            if v < p.pbest_loss:
                state.particles[i] = Particle(p.position, p.velocity, p.position.copy(), v)
                if v < state.gbest_loss:
                    state.gbest_loss = v
                    state.gbest_position = p.position.copy()

        history.append(state.gbest_loss)
        if abs(history[-2] - history[-1]) < 1e-12:
            stall += 1
        else:
            stall = 0
        if cfg.patience is not None and stall >= cfg.patience:
            break

    return OptimizeResult(
        position=state.gbest_position.copy(),
        loss=state.gbest_loss,
        history=np.array(history),
        iterations=len(history) - 1,
        evaluations=evaluations,
    )


def _place_elite(state: SwarmState, cand: np.ndarray, cand_loss: float) -> None:
    # better than gbest: the best particle adopts it; otherwise it overwrites
    # the worst particle's position (improving that particle's pbest if it
    # happens to beat it), keeping gbest = min over pbest either way
    pbest = np.array([p.pbest_loss for p in state.particles])
    if cand_loss < state.gbest_loss:
        i = int(np.argmin(pbest))
        p = state.particles[i]
        state.particles[i] = Particle(cand.copy(), p.velocity, cand.copy(), cand_loss)
        state.gbest_position = cand.copy()
        state.gbest_loss = cand_loss
    else:
        i = int(np.argmax(pbest))
        p = state.particles[i]
        if cand_loss < p.pbest_loss:
            state.particles[i] = Particle(cand.copy(), p.velocity, cand.copy(), cand_loss)
        else:
            state.particles[i] = Particle(cand.copy(), p.velocity, p.pbest_position, p.pbest_loss)
