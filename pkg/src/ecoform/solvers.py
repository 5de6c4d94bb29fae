"""Interchangeable QUBO minimizers.

Every solver sees the same reduced-form instance, always scores the all-zeros
assignment (the "don't split" candidate), and is bit-reproducible from
(instance, params, seed).  Ties on energy resolve to the assignment with the
smallest big-endian integer value.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .qubo import QuboInstance, QuboError, assignment_key, energy, to_ising
from .seeds import derive_seed

EXHAUSTIVE_CAP = 28
_ENUM_CHUNK = 1 << 16


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class Exhaustive:
    """Full enumeration with x_0 fixed to 0 (complement symmetry halves the space)."""


@dataclass(frozen=True)
class Sa:
    """Simulated annealing: geometric temperature schedule, restarts from random bits.

    t_start defaults to 2 * weight_scale * size when left unset.
    """
    sweeps: int = 200
    t_start: float | None = None
    t_end: float = 1e-3
    restarts: int = 8


@dataclass(frozen=True)
class Tabu:
    """Steepest-descent tabu search; tenure defaults to min(20, ceil(size / 4)),
    max_iters to 50 * size non-improving iterations."""
    tenure: int | None = None
    max_iters: int | None = None
    restarts: int = 3


@dataclass(frozen=True)
class RandomSampler:
    shots: int = 4096


@dataclass(frozen=True)
class Decomposed:
    """QBsolv-style decomposition: clamp all but the highest-flip-impact
    variables, solve the induced sub-QUBO, pass the merged candidate through
    a full-problem tabu improvement phase, adopt on improvement."""
    subproblem_size: int = 40
    inner: "SolverParams | None" = None
    max_rounds: int = 10


@dataclass(frozen=True)
class Sqa:
    """Simulated quantum annealing: path-integral Monte Carlo over Trotter
    slices of the transverse-field Ising form.  A classical proxy for
    annealing hardware; no hardware runtime claims attach to it.

    gamma_start defaults to 3 * weight_scale, beta to 10 / weight_scale.
    """
    slices: int = 32
    gamma_start: float | None = None
    gamma_end: float = 1e-2
    beta: float | None = None
    sweeps: int = 200


SolverParams = Exhaustive | Sa | Tabu | RandomSampler | Decomposed | Sqa

SOLVER_NAMES = {
    Exhaustive: "exhaustive",
    Sa: "sa",
    Tabu: "tabu",
    RandomSampler: "random",
    Decomposed: "qbsolv",
    Sqa: "sqa",
}


@dataclass(frozen=True)
class SolverResult:
    """Best assignment found plus bookkeeping.

    best_energy is always re-evaluated through qubo.energy on best_x, and
    evaluations counts assignment evaluations (incremental single-flip deltas
    count as one each).  wall_time is informational and excluded from the
    determinism contract.
    """
    best_x: np.ndarray
    best_energy: float
    evaluations: int
    wall_time: float
    seed: int
    solver_name: str

    def same_outcome(self, other: "SolverResult") -> bool:
        return (np.array_equal(self.best_x, other.best_x)
                and self.best_energy == other.best_energy
                and self.evaluations == other.evaluations
                and self.seed == other.seed
                and self.solver_name == other.solver_name)


def weight_scale(qubo: QuboInstance) -> float:
    """RMS magnitude of the underlying pair weights (couplings are -2w)."""
    if not qubo.quadratic:
        return 1.0
    q = np.array(list(qubo.quadratic.values()))
    scale = float(np.sqrt(np.mean((q / 2.0) ** 2)))
    return scale if scale > 0.0 else 1.0


def _validate(params: SolverParams) -> None:
    def positive_counts(**kw):
        for name, val in kw.items():
            if val is not None and val < 1:
                raise SolverError(f"{name} must be >= 1")

    if isinstance(params, Sa):
        positive_counts(sweeps=params.sweeps, restarts=params.restarts)
        if params.t_end <= 0:
            raise SolverError("t_end must be positive")
        if params.t_start is not None and params.t_start <= params.t_end:
            raise SolverError("need t_start > t_end > 0")
    elif isinstance(params, Tabu):
        positive_counts(tenure=params.tenure, max_iters=params.max_iters,
                        restarts=params.restarts)
    elif isinstance(params, RandomSampler):
        positive_counts(shots=params.shots)
    elif isinstance(params, Decomposed):
        positive_counts(max_rounds=params.max_rounds)
        if params.subproblem_size < 2:
            raise SolverError("subproblem_size must be >= 2")
    elif isinstance(params, Sqa):
        positive_counts(slices=params.slices, sweeps=params.sweeps)
        if params.gamma_end <= 0:
            raise SolverError("gamma_end must be positive")
        if params.gamma_start is not None and params.gamma_start <= params.gamma_end:
            raise SolverError("need gamma_start > gamma_end > 0")
        if params.beta is not None and params.beta <= 0:
            raise SolverError("beta must be positive")
    elif not isinstance(params, Exhaustive):
        raise SolverError(f"unknown solver params {params!r}")


def _finalize(qubo: QuboInstance, candidates: list[np.ndarray], evaluations: int,
              started: float, seed: int, name: str) -> SolverResult:
    """Pick the winner among finalist assignments: lowest exact energy, then
    smallest big-endian key.  The all-zeros assignment is always a finalist."""
    zeros = np.zeros(qubo.size, dtype=np.int8)
    best_x = zeros
    best_e = energy(qubo, zeros)
    best_key = 0
    for x in candidates:
        x = np.asarray(x, dtype=np.int8)
        e = energy(qubo, x)
        key = assignment_key(x)
        if e < best_e or (e == best_e and key < best_key):
            best_x, best_e, best_key = x, e, key
    return SolverResult(best_x=best_x, best_energy=best_e,
                        evaluations=evaluations + 1,
                        wall_time=time.perf_counter() - started,
                        seed=seed, solver_name=name)


def exhaustive(qubo: QuboInstance) -> SolverResult:
    """Exact minimum by enumerating the 2^(size-1) assignments with x_0 = 0."""
    started = time.perf_counter()
    m = qubo.size
    if m > EXHAUSTIVE_CAP:
        raise SolverError(f"exhaustive cap exceeded (size {m} > {EXHAUSTIVE_CAP})")
    free = m - 1
    total = 1 << free
    h_tail = qubo.linear[1:].astype(float)
    qu_tail = qubo.upper_quadratic()[1:, 1:]
    shifts = np.arange(free, dtype=np.int64)

    best_e = math.inf
    best_key = None
    best_bits = None
    for start in range(0, total, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.int64)
        bits = ((idx[:, None] >> shifts) & 1).astype(float)
        energies = qubo.offset + bits @ h_tail + ((bits @ qu_tail) * bits).sum(axis=1)
        chunk_min = float(energies.min())
        if chunk_min > best_e:
            continue
        for row in np.flatnonzero(energies == chunk_min):
            x = np.zeros(m, dtype=np.int8)
            x[1:] = bits[row].astype(np.int8)
            key = assignment_key(x)
            if chunk_min < best_e or (chunk_min == best_e and key < best_key):
                best_e, best_key, best_bits = chunk_min, key, x
    return _finalize(qubo, [best_bits], total - 1, started, 0, "exhaustive")


def simulated_annealing(qubo: QuboInstance, params: Sa, seed: int) -> SolverResult:
    started = time.perf_counter()
    _validate(params)
    m = qubo.size
    scale = weight_scale(qubo)
    t_end = params.t_end
    t_start = params.t_start if params.t_start is not None else max(2.0 * scale * m, 10.0 * t_end)
    # geometric schedule, one temperature per sweep
    if params.sweeps == 1:
        temps = np.array([t_start])
    else:
        ratio = (t_end / t_start) ** (1.0 / (params.sweeps - 1))
        temps = t_start * ratio ** np.arange(params.sweeps)
    h = qubo.linear.astype(float)
    mat = qubo.dense_quadratic()
    rng = np.random.default_rng(seed)
    finalists = []
    evaluations = 0
    for _ in range(params.restarts):
        x = rng.integers(0, 2, size=m).astype(np.int8)
        uniforms = rng.random(params.sweeps * m)
        _, best_x, _ = _kernels.sa_run(h, mat, x, temps, uniforms)
        finalists.append(best_x)
        evaluations += params.sweeps * m + 1
    return _finalize(qubo, finalists, evaluations, started, seed, "sa")


def tabu_search(qubo: QuboInstance, params: Tabu, seed: int) -> SolverResult:
    started = time.perf_counter()
    _validate(params)
    m = qubo.size
    tenure = params.tenure if params.tenure is not None else min(20, max(1, math.ceil(m / 4)))
    max_iters = params.max_iters if params.max_iters is not None else 50 * m
    h = qubo.linear.astype(float)
    mat = qubo.dense_quadratic()
    rng = np.random.default_rng(seed)
    finalists = []
    evaluations = 0
    for _ in range(params.restarts):
        x = rng.integers(0, 2, size=m).astype(np.int8)
        _, best_x, iterations = _kernels.tabu_run(h, mat, x, tenure, max_iters)
        finalists.append(best_x)
        evaluations += int(iterations) * m + 1
    return _finalize(qubo, finalists, evaluations, started, seed, "tabu")


def random_sampler(qubo: QuboInstance, params: RandomSampler, seed: int) -> SolverResult:
    started = time.perf_counter()
    _validate(params)
    m = qubo.size
    rng = np.random.default_rng(seed)
    shots = rng.integers(0, 2, size=(params.shots, m), dtype=np.int8)
    bits = shots.astype(float)
    energies = qubo.offset + bits @ qubo.linear + ((bits @ qubo.upper_quadratic()) * bits).sum(axis=1)
    low = float(energies.min())
    finalists = [shots[row] for row in np.flatnonzero(energies == low)]
    return _finalize(qubo, finalists, params.shots, started, seed, "random")


def _clamped_subqubo(qubo: QuboInstance, mat: np.ndarray, selected: np.ndarray,
                     x: np.ndarray) -> QuboInstance:
    """Sub-QUBO over `selected` with the rest pinned at x; constant term dropped."""
    outside = np.setdiff1d(np.arange(qubo.size), selected)
    x_out = x[outside].astype(float)
    sub_h = qubo.linear[selected] + mat[np.ix_(selected, outside)] @ x_out
    local = {g: a for a, g in enumerate(selected)}
    sub_q = {}
    for (i, j), q in qubo.quadratic.items():
        if i in local and j in local:
            a, b = local[i], local[j]
            sub_q[(min(a, b), max(a, b))] = q
    var_map = tuple(qubo.var_map[g] for g in selected)
    return QuboInstance(size=len(selected), linear=sub_h, quadratic=sub_q,
                        offset=0.0, var_map=var_map)


def decomposed_solve(qubo: QuboInstance, params: Decomposed, seed: int) -> SolverResult:
    started = time.perf_counter()
    _validate(params)
    inner = params.inner if params.inner is not None else Tabu()
    m = qubo.size
    k = min(params.subproblem_size, m)
    mat = qubo.dense_quadratic()
    h = qubo.linear.astype(float)
    tenure = min(20, max(1, math.ceil(m / 4)))
    x = np.zeros(m, dtype=np.int8)
    e = energy(qubo, x)
    evaluations = 1
    rounds_without_improvement = 0
    round_idx = 0
    while rounds_without_improvement < params.max_rounds:
        fields = qubo.linear + mat @ x.astype(float)
        impact = np.abs((1.0 - 2.0 * x) * fields)
        order = np.lexsort((np.arange(m), -impact))  # largest impact, ties by index
        selected = np.sort(order[:k])
        sub = _clamped_subqubo(qubo, mat, selected, x)
        inner_result = solve(sub, inner, derive_seed(seed, round_idx))
        evaluations += inner_result.evaluations
        candidate = x.copy()
        candidate[selected] = inner_result.best_x
        # full-problem tabu improvement phase on the merged candidate, as in
        # the published decomposing solver; deterministic given the candidate
        _, candidate, polish_iters = _kernels.tabu_run(h, mat, candidate, tenure, 50 * m)
        evaluations += int(polish_iters) * m + 1
        e_cand = energy(qubo, candidate)
        evaluations += 1
        round_idx += 1
        if e_cand < e:
            x, e = candidate, e_cand
            rounds_without_improvement = 0
        else:
            rounds_without_improvement += 1
    return _finalize(qubo, [x], evaluations, started, seed, "qbsolv")


def sqa(qubo: QuboInstance, params: Sqa, seed: int) -> SolverResult:
    started = time.perf_counter()
    _validate(params)
    m = qubo.size
    scale = weight_scale(qubo)
    gamma_end = params.gamma_end
    gamma_start = params.gamma_start if params.gamma_start is not None \
        else max(3.0 * scale, 2.0 * gamma_end)
    if gamma_start <= gamma_end:
        raise SolverError("need gamma_start > gamma_end > 0")
    beta = params.beta if params.beta is not None else 10.0 / scale
    ising = to_ising(qubo)
    h = ising.fields.astype(float)
    couplings = ising.dense_couplings()
    gammas = np.linspace(gamma_start, gamma_end, params.sweeps)
    rng = np.random.default_rng(seed)
    s_init = np.where(rng.random((params.slices, m)) < 0.5, -1.0, 1.0)
    uniforms = rng.random(params.sweeps * (params.slices * m + m))
    _, best_s = _kernels.sqa_run(h, couplings, params.slices, beta, gammas,
                                 uniforms, s_init)
    best_x = ((1.0 + best_s) / 2.0).astype(np.int8)
    evaluations = params.sweeps * (params.slices * m + m) + params.slices
    return _finalize(qubo, [best_x], evaluations, started, seed, "sqa")


def solve(qubo: QuboInstance, params: SolverParams, seed: int = 0) -> SolverResult:
    """Dispatch to the solver selected by `params`."""
    if isinstance(params, Exhaustive):
        return exhaustive(qubo)
    if isinstance(params, Sa):
        return simulated_annealing(qubo, params, seed)
    if isinstance(params, Tabu):
        return tabu_search(qubo, params, seed)
    if isinstance(params, RandomSampler):
        return random_sampler(qubo, params, seed)
    if isinstance(params, Decomposed):
        return decomposed_solve(qubo, params, seed)
    if isinstance(params, Sqa):
        return sqa(qubo, params, seed)
    raise SolverError(f"unknown solver params {params!r}")


def params_from_name(name: str, **overrides) -> SolverParams:
    """Construct default params for a CLI/bench solver name."""
    classes = {v: k for k, v in SOLVER_NAMES.items()}
    if name not in classes:
        raise SolverError(f"unknown solver {name!r}; expected one of {sorted(classes)}")
    cls = classes[name]
    if cls is Decomposed and "inner" in overrides and isinstance(overrides["inner"], dict):
        inner_spec = dict(overrides["inner"])
        inner_name = inner_spec.pop("name", "tabu")
        overrides["inner"] = params_from_name(inner_name, **inner_spec)
    try:
        return cls(**overrides)
    except TypeError as exc:
        raise SolverError(f"bad parameters for solver {name!r}: {exc}") from exc
