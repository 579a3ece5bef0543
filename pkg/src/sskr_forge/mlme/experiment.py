"""Experiment configs: JSON descriptions of calibration and learning runs.

Paths inside a config resolve relative to the config file's directory, so a
config can ship next to its model and envelope files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace

from ..simkit import SimConfig, simulate
from ..simkit import compile as compile_model
from ..sskr import Sskr, load as load_sskr
from .active import AlConfig, AlResult, TrainParams, active_learn
from .criterion import PlausibilityCriterion, evaluate_candidate, load_envelope_csv
from .ga import GaConfig, GaResult, ga_calibrate
from .network import save_weights

__all__ = [
    "AlExperiment",
    "CalibrationProblem",
    "ConfigError",
    "GaExperiment",
    "calibration_problem",
    "load_al_experiment",
    "load_ga_experiment",
    "load_pool_csv",
    "run_al_experiment",
    "run_ga_experiment",
]


class ConfigError(ValueError):
    """The experiment description is malformed or references bad files."""


@dataclass(frozen=True)
class CalibrationProblem:
    """Free parameters of a model as a search space plus a compile closure."""

    param_ids: tuple[str, ...]
    bounds: tuple[tuple[float, float], ...]
    base_params: dict[str, float]
    spec: object

    def factory(self, individual):
        params = dict(self.base_params)
        params.update(zip(self.param_ids, individual))
        return compile_model(self.spec, params)


def calibration_problem(s: Sskr) -> CalibrationProblem:
    """Search over every non-fixed bounded parameter; pin the rest at value."""
    from ..cma import spec_from_sskr

    spec = spec_from_sskr(s)
    ids: list[str] = []
    bounds: list[tuple[float, float]] = []
    base: dict[str, float] = {}
    for p in s.parameters:
        if not p.fixed and p.bounds is not None:
            ids.append(p.id)
            bounds.append((float(p.bounds[0]), float(p.bounds[1])))
        elif p.value is not None:
            base[p.id] = float(p.value)
        else:
            raise ConfigError(f"parameter {p.id!r} has neither bounds nor a value")
    if not ids:
        raise ConfigError("model has no free bounded parameter to calibrate")
    return CalibrationProblem(tuple(ids), tuple(bounds), base, spec)


def _resolve(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def _criterion(block: dict, base_dir: str) -> PlausibilityCriterion:
    try:
        envelopes = {
            name: load_envelope_csv(_resolve(base_dir, path))
            for name, path in block["envelopes"].items()
        }
    except KeyError as exc:
        raise ConfigError(f"criterion block is missing {exc}") from None
    return PlausibilityCriterion(envelopes, float(block.get("allowed_violation", 0.0)))


def _sim(block: dict) -> SimConfig:
    try:
        return SimConfig(
            solver=block.get("solver", "rk4"),
            dt=float(block["dt"]),
            t_end=float(block["t_end"]),
            initial={k: float(v) for k, v in block["initial"].items()},
            stride=int(block.get("stride", 1)),
        )
    except KeyError as exc:
        raise ConfigError(f"sim block is missing {exc}") from None


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("experiment config must be a JSON object")
    return doc


@dataclass(frozen=True)
class GaExperiment:
    model: Sskr
    problem: CalibrationProblem
    criterion: PlausibilityCriterion
    sim: SimConfig
    ga: GaConfig


def load_ga_experiment(path) -> GaExperiment:
    base_dir = os.path.dirname(os.path.abspath(path))
    doc = _load_json(path)
    for key in ("model", "criterion", "sim", "ga"):
        if key not in doc:
            raise ConfigError(f"calibration config is missing {key!r}")
    model = load_sskr(_resolve(base_dir, doc["model"]))
    problem = calibration_problem(model)
    ga = GaConfig(**{k: v for k, v in doc["ga"].items()})
    return GaExperiment(model, problem, _criterion(doc["criterion"], base_dir), _sim(doc["sim"]), ga)


def run_ga_experiment(path, results_dir, seed: int | None = None) -> tuple[GaExperiment, GaResult]:
    exp = load_ga_experiment(path)
    if seed is not None:
        exp = replace(exp, ga=replace(exp.ga, seed=seed))
    result = ga_calibrate(exp.problem.factory, exp.problem.bounds, exp.criterion, exp.sim, exp.ga)
    os.makedirs(results_dir, exist_ok=True)
    with open(os.path.join(results_dir, "ensemble.csv"), "w", encoding="utf-8") as fh:
        fh.write(",".join(exp.problem.param_ids) + "\n")
        for ind in result.ensemble:
            fh.write(",".join("%.17g" % v for v in ind) + "\n")
    with open(os.path.join(results_dir, "fitness_curve.csv"), "w", encoding="utf-8") as fh:
        fh.write("generation,best_fitness\n")
        for g, f in enumerate(result.best_curve):
            fh.write("%d,%.17g\n" % (g, f))
    return exp, result


def load_pool_csv(path) -> tuple[tuple[str, ...], list[tuple[float, ...]]]:
    with open(path, encoding="utf-8") as fh:
        names = tuple(c.strip() for c in fh.readline().strip().split(","))
        points = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            values = tuple(float(c) for c in line.split(","))
            if len(values) != len(names):
                raise ConfigError(f"pool row arity {len(values)} != header arity {len(names)}")
            points.append(values)
    if not points:
        raise ConfigError("empty pool")
    return names, points


def _oracle(block: dict, base_dir: str):
    kind = block.get("kind")
    if kind == "ring":
        center = tuple(float(c) for c in block["center"])
        radius = float(block["radius"])
        return lambda p: sum((x - c) ** 2 for x, c in zip(p, center)) <= radius * radius
    if kind == "model":
        model = load_sskr(_resolve(base_dir, block["model"]))
        problem = calibration_problem(model)
        crit = _criterion(block["criterion"], base_dir)
        sim = _sim(block["sim"])
        return lambda p: evaluate_candidate(lambda: simulate(problem.factory(p), sim), crit) == 0.0
    raise ConfigError(f"unknown oracle kind {kind!r}")


@dataclass(frozen=True)
class AlExperiment:
    dim_names: tuple[str, ...]
    pool: list[tuple[float, ...]]
    bounds: tuple[tuple[float, float], ...]
    oracle: object
    al: AlConfig
    train: TrainParams


def load_al_experiment(path) -> AlExperiment:
    base_dir = os.path.dirname(os.path.abspath(path))
    doc = _load_json(path)
    for key in ("pool", "oracle", "al"):
        if key not in doc:
            raise ConfigError(f"learning config is missing {key!r}")
    names, pool = load_pool_csv(_resolve(base_dir, doc["pool"]))
    if "bounds" in doc:
        bounds = tuple((float(a), float(b)) for a, b in doc["bounds"])
    else:
        bounds = tuple(
            (min(p[k] for p in pool), max(p[k] for p in pool))
            for k in range(len(names))
        )
    if len(bounds) != len(names):
        raise ConfigError("bounds arity does not match the pool")
    al = AlConfig(**doc["al"])
    tr = doc.get("train", {})
    train = TrainParams(
        hidden=tuple(int(h) for h in tr.get("hidden", (32, 32))),
        epochs=int(tr.get("epochs", 300)),
        learning_rate=float(tr.get("learning_rate", 0.5)),
    )
    return AlExperiment(names, pool, bounds, _oracle(doc["oracle"], base_dir), al, train)


def run_al_experiment(path, results_dir, seed: int | None = None) -> tuple[AlExperiment, AlResult]:
    exp = load_al_experiment(path)
    if seed is not None:
        exp = replace(exp, al=replace(exp.al, seed=seed))
    result = active_learn(exp.pool, exp.oracle, exp.al, exp.train, bounds=exp.bounds)
    os.makedirs(results_dir, exist_ok=True)
    with open(os.path.join(results_dir, "accuracy.csv"), "w", encoding="utf-8") as fh:
        fh.write("round,labels_used,accuracy\n")
        for i, (spent, acc) in enumerate(zip(result.labels_curve, result.accuracy_curve), start=1):
            fh.write("%d,%d,%.17g\n" % (i, spent, acc))
    save_weights(result.classifier, os.path.join(results_dir, "weights.json"))
    return exp, result
