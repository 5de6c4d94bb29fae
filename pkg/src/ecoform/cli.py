"""Command-line entry point: generation, fitting, splitting, exact solving, benchmarks.

Every command is reproducible from its flags and input files alone; outputs
are the JSON/CSV formats owned by the library modules.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import aggregate, config_from_json, run_benchmark, write_records
from .energy import (ScenarioConfig, ValueOracle, generate_scenario,
                     scenario_from_json, scenario_to_json)
from .exact import IDP_CAP, idp_solve
from .isg import FIT_CAP, fit_isg, isg_from_json, isg_to_json, random_isg
from .pipeline import iterative_split, structure_to_json
from .solvers import params_from_name


class CliError(Exception):
    pass


def _read(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise CliError(f"input file not found: {path}")
    return p.read_text()


def _write(path: str | None, text: str) -> None:
    if path is not None:
        Path(path).write_text(text + "\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecoform",
        description="Coalition formation for net-metered energy communities.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-scenario", help="generate a random prosumer scenario")
    g.add_argument("--n", type=int, required=True, help="number of agents")
    g.add_argument("--timesteps", type=int, default=4, help="horizon length (default 4)")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--epsilon", type=float, default=0.5, help="flexibility (default 0.5)")
    g.add_argument("--kappa", type=float, default=0.05,
                   help="dispersion penalty coefficient (default 0.05)")
    g.add_argument("--out", required=True, help="output scenario JSON path")

    g = sub.add_parser("gen-isg", help="generate a random induced-subgraph game")
    g.add_argument("--n", type=int, required=True, help="number of agents")
    g.add_argument("--sigma", type=float, default=0.2, help="weight std-dev (default 0.2)")
    g.add_argument("--density", type=float, default=0.95, help="edge density (default 0.95)")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--out", required=True, help="output ISG JSON path")

    g = sub.add_parser("fit", help="fit pairwise weights to a scenario's value oracle")
    g.add_argument("--scenario", required=True, help="scenario JSON path")
    g.add_argument("--out", help="output ISG JSON path")

    g = sub.add_parser("split", help="split a game by iterative min-cut bipartition")
    g.add_argument("--isg", required=True, help="ISG JSON path")
    g.add_argument("--solver", default="exhaustive",
                   choices=["exhaustive", "sa", "tabu", "random", "qbsolv", "sqa"],
                   help="QUBO solver (default exhaustive)")
    g.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    g.add_argument("--out", help="output structure JSON path")

    g = sub.add_parser("exact", help="exact optimal structure by subset DP")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--isg", help="ISG JSON path")
    src.add_argument("--scenario", help="scenario JSON path (uses the energy oracle)")
    g.add_argument("--out", help="output structure JSON path")

    g = sub.add_parser("bench", help="run the benchmark matrix from a config file")
    g.add_argument("--config", required=True, help="benchmark config JSON path")
    g.add_argument("--out", required=True, help="output CSV path")
    g.add_argument("--jobs", type=int, default=None,
                   help="parallel instance cells (default: config value or 1)")

    return parser


def _cmd_gen_scenario(args) -> int:
    cfg = ScenarioConfig(timesteps=args.timesteps, epsilon=args.epsilon, kappa=args.kappa)
    scenario = generate_scenario(args.n, seed=args.seed, config=cfg)
    _write(args.out, scenario_to_json(scenario))
    print(f"wrote scenario n={scenario.n} T={scenario.prices.timesteps} to {args.out}")
    return 0


def _cmd_gen_isg(args) -> int:
    instance = random_isg(args.n, sigma=args.sigma, density=args.density, seed=args.seed)
    _write(args.out, isg_to_json(instance))
    print(f"wrote ISG n={instance.n} density={instance.density:.3f} to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    scenario = scenario_from_json(_read(args.scenario))
    if scenario.n > FIT_CAP:
        raise CliError(f"fit supports n <= {FIT_CAP}; scenario has n={scenario.n}")
    instance = fit_isg(ValueOracle(scenario), scenario.n)
    _write(args.out, isg_to_json(instance))
    print(f"residual {instance.meta.residual:.9g}")
    return 0


def _cmd_split(args) -> int:
    instance = isg_from_json(_read(args.isg))
    params = params_from_name(args.solver)
    structure, trace = iterative_split(instance, params, seed=args.seed)
    _write(args.out, structure_to_json(structure, trace))
    print(f"value {structure.value:.9g} coalitions {len(structure.coalitions)} "
          f"qubo_solves {trace.qubo_solves}")
    return 0


def _cmd_exact(args) -> int:
    if args.isg:
        instance = isg_from_json(_read(args.isg))
        n = instance.n
        oracle = instance
    else:
        scenario = scenario_from_json(_read(args.scenario))
        n = scenario.n
        oracle = ValueOracle(scenario)
    if n > IDP_CAP:
        raise CliError(f"exact supports n <= {IDP_CAP}; input has n={n}")
    solution = idp_solve(oracle, n)
    doc = {
        "coalitions": solution.structure.as_lists(),
        "value": solution.value,
        "subsets_explored": solution.subsets_explored,
    }
    _write(args.out, json.dumps(doc, indent=2))
    print(f"value {solution.value:.9g} coalitions {len(solution.structure.coalitions)}")
    return 0


def _cmd_bench(args) -> int:
    config = config_from_json(_read(args.config))
    if args.jobs is not None:
        from dataclasses import replace
        config = replace(config, jobs=args.jobs)
    records = run_benchmark(config)
    write_records(records, args.out)
    for row in aggregate(records):
        quality = "undefined" if row.mean_quality is None else f"{row.mean_quality:.4f}"
        print(f"n={row.n} solver={row.solver} runs={row.runs} "
              f"mean_quality={quality} mean_runtime_ms={row.mean_runtime_ms:.3f}")
    return 0


def dispatch(argv: list[str] | None = None) -> int:
    """Parse argv and run one subcommand; returns the process exit status."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen-scenario": _cmd_gen_scenario,
        "gen-isg": _cmd_gen_isg,
        "fit": _cmd_fit,
        "split": _cmd_split,
        "exact": _cmd_exact,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
