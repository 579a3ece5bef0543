"""Genetic-algorithm calibration against a plausibility envelope."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..simkit.solve import SimConfig, simulate
from .criterion import PlausibilityCriterion, evaluate_candidate

__all__ = ["GaConfig", "GaResult", "NoPlausibleFound", "ga_calibrate"]

Individual = tuple[float, ...]
Bounds = tuple[tuple[float, float], ...]


class NoPlausibleFound(RuntimeError):
    """Raised by require_ensemble when calibration produced no plausible set."""


@dataclass(frozen=True)
class GaConfig:
    population: int
    generations: int
    seed: int
    tournament: int = 3
    crossover_rate: float = 0.9
    mutation_rate: float = 0.2
    mutation_sigma: float = 0.1
    elitism: int = 2

    def __post_init__(self) -> None:
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        if not 1 <= self.tournament <= self.population:
            raise ValueError("tournament size must lie in [1, population]")
        for name in ("crossover_rate", "mutation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.mutation_sigma < 0.0:
            raise ValueError("mutation_sigma must be non-negative")
        if not 0 <= self.elitism < self.population:
            raise ValueError("elitism must lie in [0, population)")


@dataclass(frozen=True)
class GaResult:
    """ensemble holds every distinct individual ever scored at fitness zero;
    best_curve[g] is the best fitness in generation g (g = 0 is the seed
    population) and is non-increasing because elites survive unchanged."""

    ensemble: tuple[Individual, ...]
    best_curve: tuple[float, ...]
    evaluations: int

    @property
    def plausible_found(self) -> bool:
        return bool(self.ensemble)

    def require_ensemble(self) -> tuple[Individual, ...]:
        if not self.ensemble:
            raise NoPlausibleFound("no parameter set satisfied the envelope")
        return self.ensemble


def _clip(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def ga_calibrate(
    factory,
    bounds: Bounds,
    criterion: PlausibilityCriterion,
    sim: SimConfig,
    ga: GaConfig,
) -> GaResult:
    """Evolve parameter vectors inside ``bounds`` toward envelope membership.

    ``factory(individual)`` must return an executable model; each candidate is
    simulated with ``sim`` and scored by the criterion (failures score +inf).
    """
    if not bounds:
        raise ValueError("bounds must name at least one parameter")
    for lo, hi in bounds:
        if not lo <= hi:
            raise ValueError(f"bad bound ({lo!r}, {hi!r})")

    rng = np.random.default_rng(ga.seed)
    cache: dict[Individual, float] = {}
    ensemble: dict[Individual, None] = {}

    def score(ind: Individual) -> float:
        if ind not in cache:
            cache[ind] = evaluate_candidate(lambda: simulate(factory(ind), sim), criterion)
            if cache[ind] == 0.0:
                ensemble[ind] = None
        return cache[ind]

    def tournament(fits: list[float]) -> int:
        picks = rng.integers(0, ga.population, size=ga.tournament)
        return min(picks, key=lambda i: (fits[i], i))

    pop: list[Individual] = [
        tuple(float(rng.uniform(lo, hi)) for lo, hi in bounds)
        for _ in range(ga.population)
    ]
    curve: list[float] = []
    for _gen in range(ga.generations + 1):
        fits = [score(ind) for ind in pop]
        curve.append(min(fits))
        if _gen == ga.generations:
            break
        order = sorted(range(ga.population), key=lambda i: (fits[i], i))
        nxt: list[Individual] = [pop[i] for i in order[: ga.elitism]]
        while len(nxt) < ga.population:
            a = pop[tournament(fits)]
            b = pop[tournament(fits)]
            if rng.random() < ga.crossover_rate:
                child = [x if rng.random() < 0.5 else y for x, y in zip(a, b)]
            else:
                child = list(a)
            for k, (lo, hi) in enumerate(bounds):
                if rng.random() < ga.mutation_rate:
                    child[k] = float(_clip(child[k] + rng.normal(0.0, ga.mutation_sigma * (hi - lo)), lo, hi))
            nxt.append(tuple(child))
        pop = nxt

    return GaResult(tuple(ensemble), tuple(curve), len(cache))
