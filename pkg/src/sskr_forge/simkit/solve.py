"""Fixed-step integration with output sampling and knockout clamping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .compile import BLOWUP_LIMIT, ExecutableModel, NumericalBlowup

SOLVERS = ("euler", "rk2", "rk4")
SCHEME_NAMES = {"euler": "Euler", "rk2": "RK2", "rk4": "RK4"}


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    solver: str
    dt: float
    t_end: float
    initial: dict[str, float]
    params: dict[str, float] = field(default_factory=dict)
    stride: int = 1
    knockouts: frozenset[str] = frozenset()

    def validate(self, variables: tuple[str, ...]) -> None:
        if self.solver not in SOLVERS:
            raise InvalidConfig(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if not (self.dt > 0):
            raise InvalidConfig("dt must be positive")
        if not (self.t_end > 0):
            raise InvalidConfig("t_end must be positive")
        if self.dt > self.t_end:
            raise InvalidConfig("dt must not exceed t_end")
        if not (isinstance(self.stride, int) and self.stride >= 1):
            raise InvalidConfig("stride must be an integer >= 1")
        missing = [v for v in variables if v not in self.initial]
        if missing:
            raise InvalidConfig(f"initial conditions missing for {', '.join(missing)}")
        extra = [v for v in self.initial if v not in variables]
        if extra:
            raise InvalidConfig(f"initial conditions for unknown {', '.join(extra)}")
        bad = [v for v in self.knockouts if v not in variables]
        if bad:
            raise InvalidConfig(f"knockout of unknown {', '.join(bad)}")


@dataclass(frozen=True)
class Trajectory:
    variables: tuple[str, ...]
    times: tuple[float, ...]
    states: tuple[tuple[float, ...], ...]

    def column(self, variable: str) -> tuple[float, ...]:
        i = self.variables.index(variable)
        return tuple(row[i] for row in self.states)

    def final(self) -> dict[str, float]:
        return dict(zip(self.variables, self.states[-1]))


def _step_euler(f, y, t, h):
    k1 = f(y, t)
    return [a + h * b for a, b in zip(y, k1)]


def _step_rk2(f, y, t, h):
    # classical midpoint scheme
    half = 0.5 * h
    k1 = f(y, t)
    k2 = f([a + half * b for a, b in zip(y, k1)], t + half)
    return [a + h * b for a, b in zip(y, k2)]


def _step_rk4(f, y, t, h):
    half = 0.5 * h
    k1 = f(y, t)
    k2 = f([a + half * b for a, b in zip(y, k1)], t + half)
    k3 = f([a + half * b for a, b in zip(y, k2)], t + half)
    k4 = f([a + h * b for a, b in zip(y, k3)], t + h)
    sixth = h / 6.0
    return [a + sixth * (b + 2.0 * (c + d) + e)
            for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


_STEPPERS = {"euler": _step_euler, "rk2": _step_rk2, "rk4": _step_rk4}


def _check_state(y, variables, step: int) -> None:
    for i, val in enumerate(y):
        # a float-mode power can stray into C; that counts as divergence
        if not isinstance(val, float) or not math.isfinite(val) or abs(val) > BLOWUP_LIMIT:
            raise NumericalBlowup(step, variables[i])


def simulate(m: ExecutableModel, cfg: SimConfig) -> Trajectory:
    cfg.validate(m.variables)
    stepper = _STEPPERS[cfg.solver]
    ko = [i for i, v in enumerate(m.variables) if v in cfg.knockouts]

    y = [float(cfg.initial[v]) for v in m.variables]
    for i in ko:
        y[i] = 0.0
    _check_state(y, m.variables, 0)

    # full steps land on k*dt (no accumulation drift); one shortened step
    # finishes exactly at t_end when dt does not divide it
    full = int(math.floor(cfg.t_end / cfg.dt + 1e-9))
    rem = cfg.t_end - full * cfg.dt
    partial = rem > 1e-12 * max(1.0, cfg.t_end)
    total = full + (1 if partial else 0)

    times = [0.0]
    states = [tuple(y)]
    rhs = m.rhs
    f = lambda state, t: rhs(state, t)
    for k in range(1, total + 1):
        if k <= full:
            t_prev = (k - 1) * cfg.dt
            h = cfg.dt
            t_now = k * cfg.dt
        else:
            t_prev = full * cfg.dt
            h = cfg.t_end - t_prev
            t_now = cfg.t_end
        try:
            y = stepper(f, y, t_prev, h)
        except NumericalBlowup as e:
            raise NumericalBlowup(k, e.variable) from None
        except (TypeError, OverflowError):
            raise NumericalBlowup(k, m.variables[0]) from None
        for i in ko:
            y[i] = 0.0
        _check_state(y, m.variables, k)
        if k % cfg.stride == 0 or k == total:
            times.append(t_now)
            states.append(tuple(y))
    return Trajectory(variables=m.variables, times=tuple(times),
                      states=tuple(states))


def to_csv(traj: Trajectory) -> str:
    """Delimited export: header t,<vars>, 17-significant-digit floats, LF."""
    lines = ["t," + ",".join(traj.variables)]
    for t, row in zip(traj.times, traj.states):
        lines.append(",".join(f"{x:.17g}" for x in (t, *row)))
    return "\n".join(lines) + "\n"
