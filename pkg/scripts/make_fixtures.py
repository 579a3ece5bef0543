#!/usr/bin/env python3
"""Regenerate the derived fixtures: plausibility envelopes for the toy SIR
model, the 2-D active-learning pool, the experiment configs that tie them
together, and the golden simulation document.

Everything here is deterministic; rerunning must reproduce the committed
files byte for byte.
"""

from __future__ import annotations

import json
import os
import sys

import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT, "fixtures")
sys.path.insert(0, os.path.join(ROOT, "src"))

from sskr_forge.cma import spec_from_sskr  # noqa: E402
from sskr_forge.mlme import Envelope, save_envelope_csv  # noqa: E402
from sskr_forge.simkit import SimConfig, emit_simulation_document, simulate  # noqa: E402
from sskr_forge.simkit import compile as compile_model  # noqa: E402
from sskr_forge.sskr import load as load_sskr  # noqa: E402

SIR_SIM = {
    "solver": "rk4",
    "dt": 0.1,
    "t_end": 40.0,
    "stride": 5,
    "initial": {"S": 0.99, "I": 0.01, "R": 0.0},
}
BAND = 0.10  # half-width as a fraction of each observable's peak magnitude


def sir_envelopes() -> None:
    s = load_sskr(os.path.join(FIXTURES, "toy_sir.sskr.json"))
    spec = spec_from_sskr(s)
    params = {p.id: p.value for p in s.parameters}
    model = compile_model(spec, params)
    cfg = SimConfig(**SIR_SIM)
    traj = simulate(model, cfg)
    for name in traj.variables:
        series = traj.column(name)
        half = BAND * max(abs(v) for v in series)
        env = Envelope(
            traj.times,
            tuple(v - half for v in series),
            tuple(v + half for v in series),
        )
        save_envelope_csv(env, os.path.join(FIXTURES, f"toy_sir_envelope_{name}.csv"))
        print(f"toy_sir_envelope_{name}.csv: {len(traj.times)} points, half-width {half:.6g}")


def al_pool(n: int = 2000, seed: int = 2024) -> None:
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n, 2))
    lines = ["x1,x2"]
    for a, b in pts:
        lines.append("%.17g,%.17g" % (a, b))
    with open(os.path.join(FIXTURES, "al_pool.csv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    inside = sum(1 for a, b in pts if (a - 0.5) ** 2 + (b - 0.5) ** 2 <= 0.35**2)
    print(f"al_pool.csv: {n} points, {inside} inside the ring")


def configs() -> None:
    ga = {
        "model": "toy_sir.sskr.json",
        "criterion": {
            "envelopes": {
                "S": "toy_sir_envelope_S.csv",
                "I": "toy_sir_envelope_I.csv",
                "R": "toy_sir_envelope_R.csv",
            },
            "allowed_violation": 0.0,
        },
        "sim": SIR_SIM,
        "ga": {
            "population": 32,
            "generations": 50,
            "seed": 1,
            "tournament": 3,
            "crossover_rate": 0.9,
            "mutation_rate": 0.2,
            "mutation_sigma": 0.1,
            "elitism": 2,
        },
    }
    al = {
        "pool": "al_pool.csv",
        "bounds": [[0.0, 1.0], [0.0, 1.0]],
        "oracle": {"kind": "ring", "center": [0.5, 0.5], "radius": 0.35},
        "al": {
            "batch_size": 16,
            "max_rounds": 24,
            "stopping_accuracy": 0.93,
            "seed": 1,
            "initial_per_class": 8,
        },
        "train": {"hidden": [32, 32], "epochs": 2000, "learning_rate": 0.5},
    }
    for name, doc in (("ga_experiment.json", ga), ("al_experiment.json", al)):
        with open(os.path.join(FIXTURES, name), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        print(name)


def golden_document() -> None:
    s = load_sskr(os.path.join(FIXTURES, "toy_sir.sskr.json"))
    spec = spec_from_sskr(s)
    cfg = SimConfig(
        solver="rk4",
        dt=0.1,
        t_end=40.0,
        stride=5,
        initial={"S": 0.99, "I": 0.01, "R": 0.0},
        params={p.id: p.value for p in s.parameters},
    )
    text = emit_simulation_document(spec, cfg)
    with open(os.path.join(FIXTURES, "toy_sir_document.txt"), "w", encoding="utf-8") as fh:
        fh.write(text)
    print("toy_sir_document.txt")


if __name__ == "__main__":
    sir_envelopes()
    al_pool()
    configs()
    golden_document()
