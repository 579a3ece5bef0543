"""Uncertainty-driven active learning over a fixed candidate pool."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Classifier, accuracy, train_classifier

__all__ = ["AlConfig", "AlResult", "PoolExhausted", "TrainParams", "active_learn"]


class PoolExhausted(RuntimeError):
    """The pool ran out before a class-balanced initial set was assembled."""


@dataclass(frozen=True)
class AlConfig:
    batch_size: int
    max_rounds: int
    stopping_accuracy: float
    seed: int
    initial_per_class: int = 8
    held_out_fraction: float = 0.2

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if not 0.0 < self.stopping_accuracy <= 1.0:
            raise ValueError("stopping_accuracy must lie in (0, 1]")
        if self.initial_per_class < 1:
            raise ValueError("initial_per_class must be positive")
        if not 0.0 < self.held_out_fraction < 1.0:
            raise ValueError("held_out_fraction must lie in (0, 1)")


@dataclass(frozen=True)
class TrainParams:
    hidden: tuple[int, ...] = (32, 32)
    epochs: int = 300
    learning_rate: float = 0.5


@dataclass(frozen=True)
class AlResult:
    classifier: Classifier
    labels_used: int
    accuracy_curve: tuple[float, ...]
    labels_curve: tuple[int, ...]  # labels spent when each accuracy was measured
    held_out: tuple[int, ...]
    queried: tuple[int, ...]

    @property
    def final_accuracy(self) -> float:
        return self.accuracy_curve[-1]


def active_learn(
    pool,
    oracle,
    al: AlConfig,
    train: TrainParams,
    *,
    bounds,
    initial_plausible=(),
) -> AlResult:
    """Label as little of ``pool`` as possible while reaching the accuracy target.

    A seeded 20% slice of the pool is held out for measurement; its oracle
    labels score the classifier and are not charged against labels_used.
    The starting set draws random pool points until both classes reach
    max(initial_per_class, len(initial_plausible)); known-plausible seeds
    count toward the plausible side for free. Each round then
    trains from scratch, measures held-out accuracy, and either stops or
    labels the batch_size most uncertain remaining points.
    """
    pool = [tuple(float(v) for v in p) for p in pool]
    if len(pool) < 2:
        raise ValueError("pool too small")
    rng = np.random.default_rng(al.seed)

    n = len(pool)
    n_held = max(1, round(al.held_out_fraction * n))
    held = tuple(sorted(int(i) for i in rng.choice(n, size=n_held, replace=False)))
    held_set = set(held)
    held_points = [pool[i] for i in held]
    held_labels = [bool(oracle(pool[i])) for i in held]

    remaining = [i for i in range(n) if i not in held_set]
    labeled: dict[int, bool] = {}
    labels_used = 0
    pos = len(initial_plausible)
    neg = 0

    # Both classes must reach the floor; known-plausible seeds raise the bar
    # so the implausible side catches up to them. Requiring exact equality
    # instead would chase a random walk and could label the entire pool.
    floor = max(al.initial_per_class, pos)

    def draw_one() -> None:
        nonlocal labels_used, pos, neg
        if not remaining:
            raise PoolExhausted(
                f"needed {floor} per class, pool gave "
                f"{pos} plausible / {neg} implausible"
            )
        i = remaining.pop(int(rng.integers(0, len(remaining))))
        y = bool(oracle(pool[i]))
        labeled[i] = y
        labels_used += 1
        if y:
            pos += 1
        else:
            neg += 1

    while pos < floor or neg < floor:
        draw_one()

    seeds = [tuple(float(v) for v in p) for p in initial_plausible]
    curve: list[float] = []
    spent: list[int] = []
    clf = None
    for round_no in range(1, al.max_rounds + 1):
        order = sorted(labeled)
        points = seeds + [pool[i] for i in order]
        ys = [True] * len(seeds) + [labeled[i] for i in order]
        clf = train_classifier(
            points,
            ys,
            bounds=bounds,
            hidden=train.hidden,
            epochs=train.epochs,
            learning_rate=train.learning_rate,
            seed=al.seed,
        ).classifier
        curve.append(accuracy(clf, held_points, held_labels))
        spent.append(labels_used)
        if curve[-1] >= al.stopping_accuracy or round_no == al.max_rounds:
            break
        if not remaining:
            break
        probs = clf.predict_proba([pool[i] for i in remaining])
        unc = {i: 0.5 - abs(p - 0.5) for i, p in zip(remaining, probs)}
        batch = sorted(remaining, key=lambda i: (-unc[i], i))[: al.batch_size]
        for i in batch:
            remaining.remove(i)
            labeled[i] = bool(oracle(pool[i]))
            labels_used += 1

    assert clf is not None
    return AlResult(clf, labels_used, tuple(curve), tuple(spent), held, tuple(sorted(labeled)))
