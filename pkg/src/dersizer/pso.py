"""Global-best particle swarm optimizer over a bounded box.

Used to search the cut-off frequency, but written dimension-agnostic.
Objectives must return a finite value everywhere on the box; constraint
violations are expected to come back as large finite penalties so the swarm
keeps pressure toward feasible regions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class PsoConfig:
    bounds: tuple[tuple[float, float], ...]
    swarm_size: int = 30
    max_iterations: int = 100
    inertia_weight: float = 0.729
    cognitive_coeff: float = 1.49445
    social_coeff: float = 1.49445
    velocity_clamp: float = 0.5      # fraction of each dimension's range
    stagnation_tolerance: float = 1e-8
    stagnation_patience: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if len(bounds) < 1:
            raise ValueError("at least one search dimension is required")
        for lo, hi in bounds:
            if not lo < hi:
                raise ValueError(f"bounds must satisfy lo < hi, got ({lo}, {hi})")
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be at least 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        for name in ("inertia_weight", "cognitive_coeff", "social_coeff"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if not 0 < self.velocity_clamp <= 1:
            raise ValueError("velocity_clamp must be in (0, 1]")
        if self.stagnation_patience < 1:
            raise ValueError("stagnation_patience must be at least 1")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_objective: float
    iterations_run: int
    convergence_trace: list[float] = field(default_factory=list)


def _reflect(positions: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    below = positions < lo
    positions = np.where(below, 2 * lo - positions, positions)
    above = positions > hi
    positions = np.where(above, 2 * hi - positions, positions)
    # Large overshoots can still land outside after one reflection.
    return np.clip(positions, lo, hi)


def optimize(objective: Callable[[np.ndarray], float],
             config: PsoConfig) -> PsoResult:
    """Minimize the objective on the bounded box; deterministic given the seed.

    Random draws are generated per iteration before any evaluation, so the
    trajectory does not depend on how the objective evaluations are scheduled.
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.rng_seed))
    lo = np.array([b[0] for b in config.bounds])
    hi = np.array([b[1] for b in config.bounds])
    span = hi - lo
    v_max = config.velocity_clamp * span
    n, dim = config.swarm_size, len(config.bounds)

    positions = lo + rng.random((n, dim)) * span
    velocities = np.zeros((n, dim))
    costs = np.array([float(objective(p)) for p in positions])

    pbest_pos = positions.copy()
    pbest_cost = costs.copy()
    gbest_idx = int(np.argmin(pbest_cost))
    gbest_pos = pbest_pos[gbest_idx].copy()
    gbest_cost = float(pbest_cost[gbest_idx])

    trace = [gbest_cost]
    stagnant = 0
    iterations = 0
    for _ in range(config.max_iterations):
        iterations += 1
        r_cog = rng.random((n, dim))
        r_soc = rng.random((n, dim))
        velocities = (config.inertia_weight * velocities
                      + config.cognitive_coeff * r_cog * (pbest_pos - positions)
                      + config.social_coeff * r_soc * (gbest_pos - positions))
        velocities = np.clip(velocities, -v_max, v_max)
        positions = _reflect(positions + velocities, lo, hi)

        costs = np.array([float(objective(p)) for p in positions])
        improved = costs < pbest_cost
        pbest_pos[improved] = positions[improved]
        pbest_cost[improved] = costs[improved]

        best_idx = int(np.argmin(pbest_cost))
        previous = gbest_cost
        if pbest_cost[best_idx] < gbest_cost:
            gbest_cost = float(pbest_cost[best_idx])
            gbest_pos = pbest_pos[best_idx].copy()
        trace.append(gbest_cost)

        relative_drop = (previous - gbest_cost) / max(abs(previous), 1e-30)
        stagnant = stagnant + 1 if relative_drop <= config.stagnation_tolerance else 0
        if stagnant >= config.stagnation_patience:
            break

    return PsoResult(best_position=gbest_pos, best_objective=gbest_cost,
                     iterations_run=iterations, convergence_trace=trace)


def write_trace_csv(path, trace: Sequence[float]) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "best_objective"])
        for i, value in enumerate(trace):
            writer.writerow([i, repr(float(value))])
