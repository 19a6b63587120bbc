"""Global parameter search: differential evolution and exhaustive grid scans.

Both minimize. The DE strategy is rand/1/bin with the differential weight
redrawn uniformly in [0.5, 1.0] each generation; selection is
generation-synchronous, so concurrent objective evaluation within a
generation cannot change the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

GRID_MAX_DIMENSIONS = 4


def qaoa_bounds(p: int) -> list[tuple[float, float]]:
    """Search box for a p-level problem: gammas in [0, 2pi], betas in [0, pi]."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return [(0.0, 2 * np.pi)] * p + [(0.0, np.pi)] * p


def _check_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    lows = np.array([b[0] for b in bounds], dtype=float)
    highs = np.array([b[1] for b in bounds], dtype=float)
    if lows.size == 0:
        raise ValueError("bounds must not be empty")
    if not (lows < highs).all():
        raise ValueError("each bound must satisfy low < high")
    return lows, highs


@dataclass(frozen=True)
class DEConfig:
    """Differential-evolution hyperparameters.

    population=None selects max(20, 15 * dimensions). Convergence stops the
    run once the population's objective spread falls below tol relative to
    its mean, before max_generations is exhausted. polish runs a bounded
    Nelder-Mead descent from the evolved best, which closes the gap between
    the basin DE finds and that basin's bottom.
    """

    population: int | None = None
    f_range: tuple[float, float] = (0.5, 1.0)
    crossover: float = 0.7
    max_generations: int = 200
    tol: float = 1e-6
    seed: int = 0
    polish: bool = True

    def __post_init__(self):
        if self.population is not None and self.population < 4:
            raise ValueError("population must be at least 4")
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError("crossover rate must lie in [0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be at least 1")
        lo, hi = self.f_range
        if not 0.0 < lo <= hi:
            raise ValueError("f_range must satisfy 0 < low <= high")

    def population_for(self, dimensions: int) -> int:
        return self.population if self.population is not None else max(20, 15 * dimensions)


@dataclass(frozen=True)
class OptResult:
    best_params: np.ndarray
    best_value: float
    history: np.ndarray       # best objective after init and after each generation
    evaluations: int


def differential_evolution(objective, bounds, config: DEConfig = DEConfig(),
                           x0=None) -> OptResult:
    """Minimize objective over a box with rand/1/bin DE.

    Deterministic for a fixed config: all randomness comes from one seeded
    generator, and trial vectors for a generation are built from the
    pre-generation population before any replacement. An optional x0 joins
    the initial population, so the result can only refine a known point.
    """
    lows, highs = _check_bounds(bounds)
    dim = lows.size
    npop = config.population_for(dim)
    rng = np.random.default_rng(config.seed)

    pop = lows + (highs - lows) * rng.random((npop, dim))
    if x0 is not None:
        pop[0] = np.clip(np.asarray(x0, dtype=float), lows, highs)
    fvals = np.array([objective(x) for x in pop], dtype=float)
    evaluations = npop
    history = [float(fvals.min())]

    for _ in range(config.max_generations):
        f_weight = rng.uniform(*config.f_range)
        trials = np.empty_like(pop)
        for i in range(npop):
            choices = rng.permutation(npop - 1)[:3]
            choices[choices >= i] += 1  # distinct from i and from each other
            a, b, c = pop[choices]
            mutant = a + f_weight * (b - c)
            cross = rng.random(dim) < config.crossover
            cross[rng.integers(dim)] = True
            trial = np.where(cross, mutant, pop[i])
            out = (trial < lows) | (trial > highs)
            if out.any():
                trial[out] = lows[out] + (highs[out] - lows[out]) * rng.random(out.sum())
            trials[i] = trial
        trial_vals = np.array([objective(x) for x in trials], dtype=float)
        evaluations += npop
        improved = trial_vals <= fvals
        pop[improved] = trials[improved]
        fvals[improved] = trial_vals[improved]
        history.append(float(fvals.min()))
        if np.std(fvals) <= config.tol * abs(np.mean(fvals)):
            break

    best = int(np.argmin(fvals))
    best_x, best_f = pop[best].copy(), float(fvals[best])
    if config.polish:
        best_x, best_f, used = _nelder_mead(objective, best_x, lows, highs)
        evaluations += used
        history.append(best_f)

    return OptResult(
        best_params=best_x,
        best_value=best_f,
        history=np.array(history),
        evaluations=evaluations,
    )


def _nelder_mead(objective, x0, lows, highs, maxiter=None,
                 xatol=1e-8, fatol=1e-10):
    """Bounded Nelder-Mead simplex descent (deterministic local refinement).

    Candidate points are clipped to the box. Returns the best vertex, its
    value, and the number of objective evaluations.
    """
    dim = lows.size
    if maxiter is None:
        maxiter = 200 * dim
    step = 0.05 * (highs - lows)
    simplex = [np.asarray(x0, dtype=float)]
    for d in range(dim):
        v = simplex[0].copy()
        v[d] = v[d] + step[d] if v[d] + step[d] <= highs[d] else v[d] - step[d]
        simplex.append(v)
    simplex = np.array(simplex)
    fvals = np.array([objective(x) for x in simplex])
    used = dim + 1

    for _ in range(maxiter):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if (fvals[-1] - fvals[0] <= fatol
                and np.abs(simplex[1:] - simplex[0]).max() <= xatol):
            break
        centroid = simplex[:-1].mean(axis=0)

        def clipped(point):
            return np.clip(point, lows, highs)

        reflected = clipped(centroid + (centroid - simplex[-1]))
        f_r = objective(reflected)
        used += 1
        if f_r < fvals[0]:
            expanded = clipped(centroid + 2.0 * (centroid - simplex[-1]))
            f_e = objective(expanded)
            used += 1
            if f_e < f_r:
                simplex[-1], fvals[-1] = expanded, f_e
            else:
                simplex[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_r
        else:
            if f_r < fvals[-1]:
                contracted = clipped(centroid + 0.5 * (reflected - centroid))
            else:
                contracted = clipped(centroid + 0.5 * (simplex[-1] - centroid))
            f_c = objective(contracted)
            used += 1
            if f_c < min(f_r, fvals[-1]):
                simplex[-1], fvals[-1] = contracted, f_c
            else:
                # shrink toward the best vertex
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                fvals[1:] = [objective(x) for x in simplex[1:]]
                used += dim

    best = int(np.argmin(fvals))
    return simplex[best].copy(), float(fvals[best]), used


@dataclass(frozen=True)
class GridResult:
    axes: tuple[np.ndarray, ...]   # grid coordinates per dimension
    values: np.ndarray             # objective on the full Cartesian grid
    best_params: np.ndarray
    best_value: float


def grid_scan(objective, bounds, resolution: int) -> GridResult:
    """Evaluate objective on the full endpoint-inclusive Cartesian grid.

    Returns every value plus the (first) minimizing grid point. Guarded to
    4 dimensions; resolution is points per dimension.
    """
    lows, highs = _check_bounds(bounds)
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if lows.size > GRID_MAX_DIMENSIONS:
        raise ValueError(f"grid scan limited to {GRID_MAX_DIMENSIONS} dimensions")
    axes = tuple(np.linspace(lo, hi, resolution) for lo, hi in zip(lows, highs))
    shape = (resolution,) * lows.size
    values = np.empty(shape)
    for pos in itertools.product(range(resolution), repeat=lows.size):
        x = np.array([axes[d][pos[d]] for d in range(lows.size)])
        values[pos] = objective(x)
    flat_best = int(np.argmin(values))
    pos = np.unravel_index(flat_best, shape)
    best = np.array([axes[d][pos[d]] for d in range(lows.size)])
    return GridResult(axes=axes, values=values, best_params=best,
                      best_value=float(values[pos]))
