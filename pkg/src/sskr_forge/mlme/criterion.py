"""Plausibility envelopes and the fitness they induce on simulated trajectories."""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass, field

from ..simkit.compile import NumericalBlowup
from ..simkit.solve import Trajectory

__all__ = [
    "Envelope",
    "GridMismatch",
    "PlausibilityCriterion",
    "evaluate_candidate",
    "fitness",
    "is_plausible",
    "load_envelope_csv",
    "save_envelope_csv",
]

# Relative tolerance when matching envelope grid times against output times.
_TIME_RTOL = 1e-9


class GridMismatch(ValueError):
    """An envelope grid time has no matching simulation output time."""


@dataclass(frozen=True)
class Envelope:
    """Per-observable band: at times[j] the value must lie in [lower[j], upper[j]]."""

    times: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.times) == len(self.lower) == len(self.upper)):
            raise ValueError("envelope columns differ in length")
        if not self.times:
            raise ValueError("empty envelope")
        for lo, hi in zip(self.lower, self.upper):
            if not lo <= hi:
                raise ValueError(f"envelope bound crossing: {lo!r} > {hi!r}")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("envelope times must be strictly increasing")


@dataclass(frozen=True)
class PlausibilityCriterion:
    """Envelopes keyed by observable, plus the tolerated violation fraction.

    A trajectory is plausible when the fraction of (observable, grid point)
    pairs falling outside their band does not exceed ``allowed_violation``.
    """

    envelopes: dict[str, Envelope]
    allowed_violation: float = 0.0

    def __post_init__(self) -> None:
        if not self.envelopes:
            raise ValueError("criterion needs at least one observable")
        if not 0.0 <= self.allowed_violation <= 1.0:
            raise ValueError("allowed_violation must lie in [0, 1]")

    @property
    def observables(self) -> tuple[str, ...]:
        return tuple(self.envelopes)


def _grid_indices(times: tuple[float, ...], grid: tuple[float, ...]) -> tuple[int, ...]:
    # Each grid time must appear among the output times (within _TIME_RTOL).
    out = []
    for t in grid:
        i = bisect_left(times, t)
        tol = _TIME_RTOL * max(1.0, abs(t))
        for j in (i - 1, i, i + 1):
            if 0 <= j < len(times) and abs(times[j] - t) <= tol:
                out.append(j)
                break
        else:
            raise GridMismatch(f"no output time matches envelope time {t!r}")
    return tuple(out)


def fitness(traj: Trajectory, criterion: PlausibilityCriterion) -> float:
    """0.0 inside the envelope (up to the allowed violation fraction), else the
    sum of squared out-of-band distances, each normalized by the band width."""
    total = 0.0
    points = 0
    violations = 0
    for name, env in criterion.envelopes.items():
        if name not in traj.variables:
            raise KeyError(f"trajectory has no observable {name!r}")
        series = traj.column(name)
        idx = _grid_indices(traj.times, env.times)
        for j, k in enumerate(idx):
            v = series[k]
            lo, hi = env.lower[j], env.upper[j]
            points += 1
            if lo <= v <= hi:
                continue
            violations += 1
            width = hi - lo
            dist = (lo - v) if v < lo else (v - hi)
            if math.isinf(width):
                # One-sided or unbounded band: distance is already absolute.
                total += dist * dist
            else:
                scaled = dist / max(width, 1e-12)
                total += scaled * scaled
    if violations / points <= criterion.allowed_violation:
        return 0.0
    return total


def is_plausible(traj: Trajectory, criterion: PlausibilityCriterion) -> bool:
    return fitness(traj, criterion) == 0.0


def evaluate_candidate(run, criterion: PlausibilityCriterion) -> float:
    """Run a zero-argument simulation thunk and score it; failures are +inf."""
    try:
        traj = run()
    except (NumericalBlowup, ZeroDivisionError, ArithmeticError):
        return math.inf
    return fitness(traj, criterion)


def load_envelope_csv(path) -> Envelope:
    """Read a ``t,lo,hi`` file. Accepts inf/-inf for one-sided bands."""
    times: list[float] = []
    lower: list[float] = []
    upper: list[float] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if [c.strip() for c in header.split(",")] != ["t", "lo", "hi"]:
            raise ValueError(f"expected header 't,lo,hi', got {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, lo, hi = (float(c) for c in line.split(","))
            times.append(t)
            lower.append(lo)
            upper.append(hi)
    return Envelope(tuple(times), tuple(lower), tuple(upper))


def save_envelope_csv(env: Envelope, path) -> None:
    rows = ["t,lo,hi"]
    for t, lo, hi in zip(env.times, env.lower, env.upper):
        rows.append("%.17g,%.17g,%.17g" % (t, lo, hi))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
