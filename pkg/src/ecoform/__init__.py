"""Coalition formation for net-metered energy communities.

Pipeline: generate a prosumer scenario, value coalitions through the dispatch
oracle, fit an induced subgraph game, split it by iterative signed min-cut
with interchangeable QUBO solvers, and score everything against exact
dynamic-programming baselines.
"""

__version__ = "0.1.0"

from .energy import (AgentProfile, Coalition, DispatchResult, PriceSchedule,
                     Scenario, ScenarioConfig, ValueOracle, coalition_value,
                     generate_scenario, optimize_dispatch, power_bounds,
                     scenario_from_json, scenario_to_json)
from .isg import (IsgInstance, IsgMeta, fit_isg, isg_from_json, isg_to_json,
                  isg_value, random_isg)
from .qubo import (IsingInstance, QuboInstance, build_split_qubo, energy,
                   ising_energy, to_ising)
from .solvers import (Decomposed, Exhaustive, RandomSampler, Sa, SolverResult,
                      Sqa, Tabu, decomposed_solve, exhaustive, random_sampler,
                      simulated_annealing, solve, sqa, tabu_search)
from .exact import CsgSolution, brute_force_partitions, idp_solve
from .pipeline import (CoalitionStructure, SplitTrace, iterative_split,
                       quality_ratio, structure_to_json, structure_value)
from .bench import (AggregateRow, BenchConfig, BenchmarkRecord, RandomSource,
                    ScenarioSource, aggregate, read_records, run_benchmark,
                    write_records)

__all__ = [name for name in dir() if not name.startswith("_")]
