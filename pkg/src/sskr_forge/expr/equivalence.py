"""Randomized functional equivalence of two expression trees.

Both trees are evaluated on the same seeded sample of real points, one uniform
draw per symbolic leaf per sample. Samples where either side raises a domain
or division error are rejected and redrawn, up to 10*n rejections in total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evaluate import DivisionByZero, DomainError, evaluate
from .nodes import DEFAULT_REGISTRY, Expr, FreeSymbol, ParamRef, Registry, VarRef, free_symbols
from .printer import to_text

DEFAULT_INTERVAL = (-10.0, 10.0)
ABS_FLOOR = 1e-12


class SymbolMismatch(ValueError):
    pass


class ExhaustedSamples(RuntimeError):
    pass


def leaf_key(leaf: Expr) -> str:
    """Canonical string key for a symbolic leaf: 'x', 'v(3)', 'p(1,2,1)'."""
    return to_text(leaf)


@dataclass(frozen=True)
class Witness:
    index: int
    bindings: dict[str, float]
    left: complex
    right: complex


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    samples: int
    tol: float
    seed: int
    witness: Witness | None

    @property
    def outcome(self) -> str:
        return "Equivalent" if self.equivalent else "Differs"


def _split_bindings(sample: dict[str, float], leaves: list[Expr]):
    by_name: dict[str, complex] = {}
    by_var: dict[int, complex] = {}
    by_param: dict[tuple[int, int, int], complex] = {}
    for leaf in leaves:
        value = sample[leaf_key(leaf)]
        if isinstance(leaf, FreeSymbol):
            by_name[leaf.name] = value
        elif isinstance(leaf, VarRef):
            by_var[leaf.column] = value
        elif isinstance(leaf, ParamRef):
            by_param[(leaf.row, leaf.column, leaf.index)] = value
    return by_name, by_var, by_param


def equivalent(
    e1: Expr,
    e2: Expr,
    domain: dict[str, tuple[float, float]] | None = None,
    n: int = 200,
    tol: float = 1e-9,
    seed: int = 0,
    registry: Registry = DEFAULT_REGISTRY,
) -> EquivalenceVerdict:
    """Decide functional equivalence by seeded random sampling.

    domain maps leaf keys (see leaf_key) to real intervals; unlisted leaves
    use [-10, 10]. Both trees must expose the same symbolic leaf set, else
    SymbolMismatch. The witness, when the verdict is Differs, is the
    lowest-index disagreeing sample.
    """
    domain = domain or {}
    set1 = set(free_symbols(e1))
    set2 = set(free_symbols(e2))
    if set1 != set2:
        only1 = sorted(leaf_key(s) for s in set1 - set2)
        only2 = sorted(leaf_key(s) for s in set2 - set1)
        raise SymbolMismatch(f"free symbol sets differ: {only1} vs {only2}")
    # bindings are drawn per symbol in canonical key order, so the stream is
    # independent of argument order and of appearance order inside the trees
    leaves = sorted(set1, key=leaf_key)
    intervals = [domain.get(leaf_key(s), DEFAULT_INTERVAL) for s in leaves]
    for key, (lo, hi) in zip((leaf_key(s) for s in leaves), intervals):
        if not lo < hi:
            raise ValueError(f"empty domain for {key}: [{lo}, {hi}]")

    rng = np.random.default_rng(seed)
    max_rejections = 10 * n
    rejections = 0
    witness = None
    accepted = 0
    while accepted < n:
        sample = {
            leaf_key(s): float(rng.uniform(lo, hi))
            for s, (lo, hi) in zip(leaves, intervals)
        }
        by_name, by_var, by_param = _split_bindings(sample, leaves)
        try:
            out1 = evaluate(e1, by_name, by_var, by_param, registry)
            out2 = evaluate(e2, by_name, by_var, by_param, registry)
        except (DomainError, DivisionByZero):
            rejections += 1
            if rejections > max_rejections:
                raise ExhaustedSamples(
                    f"rejected {rejections} samples for {n} requested"
                ) from None
            continue
        threshold = max(tol * max(1.0, abs(out1), abs(out2)), ABS_FLOOR)
        if abs(out1 - out2) > threshold:
            # scanning in order, so the first disagreement has the lowest index
            witness = Witness(index=accepted, bindings=sample, left=out1, right=out2)
            break
        accepted += 1
    return EquivalenceVerdict(
        equivalent=witness is None, samples=n, tol=tol, seed=seed, witness=witness
    )
