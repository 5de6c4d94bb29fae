"""Approximate coalition structure generation by recursive min-cut splitting.

Starting from the grand coalition, each coalition is offered its best signed
min-cut bipartition; cuts with negative energy strictly increase the summed
pairwise value, so the structure value climbs monotonically until no
value-increasing split remains.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .energy import Coalition
from .isg import IsgInstance, isg_value
from .qubo import build_split_qubo, split_assignment
from .seeds import derive_seed
from .solvers import SolverParams, SolverResult, solve


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class CoalitionStructure:
    """Partition of the agents plus its value under the evaluating game."""

    coalitions: tuple[Coalition, ...]
    value: float

    def n(self) -> int:
        return sum(len(c) for c in self.coalitions)

    def as_lists(self) -> list[list[int]]:
        return [c.sorted_members() for c in self.coalitions]


@dataclass(frozen=True)
class SplitStep:
    coalition: Coalition
    solver_result: SolverResult
    accepted: bool


@dataclass(frozen=True)
class SplitTrace:
    steps: tuple[SplitStep, ...]

    @property
    def qubo_solves(self) -> int:
        return len(self.steps)

    @property
    def accepted_splits(self) -> int:
        return sum(1 for s in self.steps if s.accepted)


def default_tolerance(instance: IsgInstance) -> float:
    iu = np.triu_indices(instance.n, k=1)
    return 1e-9 * float(np.abs(instance.weights[iu]).sum())


def iterative_split(instance: IsgInstance, solver_params: SolverParams,
                    seed: int = 0, tolerance: float | None = None
                    ) -> tuple[CoalitionStructure, SplitTrace]:
    """Split the grand coalition recursively until no cut beats -tolerance.

    The worklist pops the largest pending coalition first; per-split solver
    seeds derive from (seed, step index) so traces are reproducible.
    """
    if tolerance is None:
        tolerance = default_tolerance(instance)
    grand = Coalition(frozenset(range(instance.n)))
    heap: list[tuple[int, int, Coalition]] = []
    heapq.heappush(heap, (-len(grand), grand.to_mask(), grand))
    final: list[Coalition] = []
    steps: list[SplitStep] = []
    step_idx = 0
    while heap:
        _, _, coalition = heapq.heappop(heap)
        if len(coalition) < 2:
            final.append(coalition)
            continue
        qubo = build_split_qubo(instance, coalition)
        try:
            result = solve(qubo, solver_params, derive_seed(seed, step_idx))
        except Exception as exc:
            raise PipelineError(
                f"solver failed on coalition {coalition.sorted_members()}: {exc}") from exc
        accepted = result.best_energy < -tolerance
        steps.append(SplitStep(coalition=coalition, solver_result=result, accepted=accepted))
        step_idx += 1
        if accepted:
            # a negative cut cannot come from a constant labeling (zero cut)
            part_a, part_b = split_assignment(qubo, result.best_x)
            heapq.heappush(heap, (-len(part_a), part_a.to_mask(), part_a))
            heapq.heappush(heap, (-len(part_b), part_b.to_mask(), part_b))
        else:
            final.append(coalition)
    final.sort(key=lambda c: min(c.members))
    value = sum(isg_value(instance, c) for c in final)
    structure = CoalitionStructure(coalitions=tuple(final), value=value)
    return structure, SplitTrace(steps=tuple(steps))


def structure_value(structure: CoalitionStructure, game: Callable[[Coalition], float]) -> float:
    """Sum of per-coalition values under `game`; validates the partition."""
    seen: set[int] = set()
    total_members = 0
    for c in structure.coalitions:
        members = c.members
        if seen & members:
            raise PipelineError("coalitions overlap")
        seen |= members
        total_members += len(members)
    if not seen or seen != set(range(max(seen) + 1)) or total_members != len(seen):
        raise PipelineError("coalitions do not cover 0..n-1")
    ordered = sorted(structure.coalitions, key=lambda c: min(c.members))
    return float(sum(game(c) for c in ordered))


def quality_ratio(candidate: float, reference: float) -> float:
    """candidate / reference; NaN when the reference is zero (undefined, not an error)."""
    if reference == 0.0:
        return math.nan
    return candidate / reference


def structure_to_json(structure: CoalitionStructure, trace: SplitTrace | None = None) -> str:
    doc: dict = {
        "coalitions": structure.as_lists(),
        "value": structure.value,
    }
    if trace is not None:
        doc["trace"] = [
            {
                "coalition": step.coalition.sorted_members(),
                "cut": step.solver_result.best_energy,
                "accepted": step.accepted,
            }
            for step in trace.steps
        ]
    return json.dumps(doc, indent=2)
