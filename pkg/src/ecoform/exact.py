"""Exact coalition-structure baselines.

The subset DP solves the full problem in O(3^n) by trying every bipartition
of every coalition bottom-up; brute-force partition enumeration cross-checks
it at small n.  Both accept any value function over coalitions, so they score
induced-subgraph games and the original energy-model oracle alike.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .energy import Coalition
from .isg import IsgInstance
from .pipeline import CoalitionStructure

IDP_CAP = 22
BRUTE_CAP = 10
TIE_EPS_REL = 1e-12  # splits must beat the whole coalition by more than this

ValueFn = Callable[[Coalition], float]


class ExactError(ValueError):
    pass


@dataclass(frozen=True)
class CsgSolution:
    structure: CoalitionStructure
    value: float
    subsets_explored: int


def dense_values(oracle: ValueFn | IsgInstance | np.ndarray, n: int) -> np.ndarray:
    """Oracle values for every nonempty bitmask, as a dense 2^n array."""
    if isinstance(oracle, np.ndarray):
        if oracle.shape != (1 << n,):
            raise ExactError("dense value array must have 2^n entries")
        return oracle.astype(float)
    if isinstance(oracle, IsgInstance):
        if oracle.n != n:
            raise ExactError("instance size does not match n")
        return _kernels.isg_dense_values(oracle.weights)
    values = np.zeros(1 << n)
    for mask in range(1, 1 << n):
        values[mask] = oracle(Coalition.from_mask(mask))
    return values


def idp_solve(oracle: ValueFn | IsgInstance | np.ndarray, n: int) -> CsgSolution:
    """Optimal coalition structure by bottom-up subset dynamic programming.

    Every coalition's best achievable value is the max of keeping it whole or
    the best sum over complementary part pairs (the lower part pinned to the
    coalition's lowest member so each bipartition is tried once).
    """
    if n < 1:
        raise ExactError("need n >= 1")
    if n > IDP_CAP:
        raise ExactError(f"subset DP limited to n <= {IDP_CAP} (memory grows as 2^n)")
    values = dense_values(oracle, n)
    tie_eps = TIE_EPS_REL * max(1.0, float(np.abs(values).max()))
    best, choice = _kernels.idp_tables(values, tie_eps)
    full = (1 << n) - 1
    parts: list[Coalition] = []
    stack = [full]
    while stack:
        mask = stack.pop()
        picked = int(choice[mask])
        if picked == 0:
            parts.append(Coalition.from_mask(mask))
        else:
            stack.append(picked)
            stack.append(mask ^ picked)
    parts.sort(key=lambda c: min(c.members))
    structure = CoalitionStructure(coalitions=tuple(parts), value=float(best[full]))
    return CsgSolution(structure=structure, value=float(best[full]),
                       subsets_explored=(1 << n) - 1)


def _restricted_growth_strings(n: int):
    """All set partitions of 0..n-1 as restricted-growth strings, lexicographic."""
    rgs = [0] * n

    def rec(pos: int, max_label: int):
        if pos == n:
            yield rgs
            return
        for label in range(max_label + 2):
            rgs[pos] = label
            yield from rec(pos + 1, max(max_label, label))

    yield from rec(1, 0)


def brute_force_partitions(oracle: ValueFn | IsgInstance | np.ndarray, n: int) -> CsgSolution:
    """Exhaustive maximum over all set partitions; ties keep the partition with
    the lexicographically smallest restricted-growth string."""
    if n < 1:
        raise ExactError("need n >= 1")
    if n > BRUTE_CAP:
        raise ExactError(f"partition enumeration limited to n <= {BRUTE_CAP}"
                         f" (Bell numbers explode)")
    values = dense_values(oracle, n)
    tie_eps = TIE_EPS_REL * max(1.0, float(np.abs(values).max()))
    best_value = -np.inf
    best_masks: list[int] = []
    explored = 0
    for rgs in _restricted_growth_strings(n):
        explored += 1
        masks: list[int] = []
        for i, label in enumerate(rgs):
            while label >= len(masks):
                masks.append(0)
            masks[label] |= 1 << i
        total = sum(values[m] for m in masks)
        if total > best_value + tie_eps:
            best_value = total
            best_masks = list(masks)
    parts = [Coalition.from_mask(m) for m in best_masks]
    parts.sort(key=lambda c: min(c.members))
    structure = CoalitionStructure(coalitions=tuple(parts), value=float(best_value))
    return CsgSolution(structure=structure, value=float(best_value),
                       subsets_explored=explored)
