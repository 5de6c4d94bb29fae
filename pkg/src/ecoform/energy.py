"""Net-metered energy community model.

Agents (prosumers, pure producers, pure consumers) dispatch flexible power
against a per-timestep import/export price spread.  A coalition is billed on
its aggregate power, so members can net each other's surplus and demand; the
coalition value is the retail gain over individual metering minus a
dispersion penalty on pairwise member distances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

PROSUMER = "prosumer"
PURE_PRODUCER = "pure_producer"
PURE_CONSUMER = "pure_consumer"
ROLES = (PROSUMER, PURE_PRODUCER, PURE_CONSUMER)


class EnergyModelError(ValueError):
    pass


@dataclass(frozen=True)
class PriceSchedule:
    """Import/export price vectors (currency/kWh) over a horizon of `timesteps` slots."""

    import_price: np.ndarray
    export_price: np.ndarray
    delta_t: float  # hours per timestep

    def __post_init__(self):
        imp = np.asarray(self.import_price, dtype=float)
        exp = np.asarray(self.export_price, dtype=float)
        object.__setattr__(self, "import_price", imp)
        object.__setattr__(self, "export_price", exp)
        if imp.ndim != 1 or exp.shape != imp.shape or imp.size < 1:
            raise EnergyModelError("price vectors must be 1-D with equal length >= 1")
        if self.delta_t <= 0:
            raise EnergyModelError("delta_t must be positive")
        if np.any(exp > imp + 1e-12):
            raise EnergyModelError("export price must not exceed import price")

    @property
    def timesteps(self) -> int:
        return int(self.import_price.size)


@dataclass(frozen=True)
class AgentProfile:
    """One agent: role, baseline power per timestep (kW, production positive),
    marginal cost (currency/kWh) and a position in the unit square."""

    id: int
    role: str
    p_init: np.ndarray
    marginal_cost: float
    position: tuple[float, float]

    def __post_init__(self):
        p = np.asarray(self.p_init, dtype=float)
        object.__setattr__(self, "p_init", p)
        if self.role not in ROLES:
            raise EnergyModelError(f"unknown role {self.role!r}")
        if self.role == PURE_PRODUCER and np.any(p < 0):
            raise EnergyModelError("pure producer must have p_init >= 0")
        if self.role == PURE_CONSUMER and np.any(p > 0):
            raise EnergyModelError("pure consumer must have p_init <= 0")
        if not math.isfinite(self.marginal_cost):
            raise EnergyModelError("marginal cost must be finite")


@dataclass(frozen=True)
class Scenario:
    agents: tuple[AgentProfile, ...]
    prices: PriceSchedule
    epsilon: float
    kappa: float
    seed: int

    def __post_init__(self):
        if self.epsilon < 0 or self.kappa < 0:
            raise EnergyModelError("epsilon and kappa must be nonnegative")
        ids = [a.id for a in self.agents]
        if ids != list(range(len(self.agents))):
            raise EnergyModelError("agent ids must be 0..n-1 without gaps")
        for a in self.agents:
            if a.p_init.shape != (self.prices.timesteps,):
                raise EnergyModelError("agent p_init length must match price horizon")

    @property
    def n(self) -> int:
        return len(self.agents)


@dataclass(frozen=True)
class Coalition:
    """Nonempty set of agent indices; bitmask-backed for fast subset work."""

    members: frozenset[int]

    def __post_init__(self):
        if not self.members:
            raise EnergyModelError("empty coalition")
        if any(i < 0 for i in self.members):
            raise EnergyModelError("negative agent index")

    @classmethod
    def of(cls, *indices: int) -> "Coalition":
        return cls(frozenset(indices))

    @classmethod
    def from_mask(cls, mask: int) -> "Coalition":
        if mask <= 0:
            raise EnergyModelError("empty coalition")
        return cls(frozenset(i for i in range(mask.bit_length()) if mask >> i & 1))

    def to_mask(self) -> int:
        mask = 0
        for i in self.members:
            mask |= 1 << i
        return mask

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))


@dataclass(frozen=True)
class DispatchResult:
    powers: np.ndarray  # |C| x T, rows follow Coalition.sorted_members()
    objective: float


def power_bounds(agent: AgentProfile, epsilon: float, t: int) -> tuple[float, float]:
    """Box [lo, hi] (kW) available to `agent` at timestep `t` under flexibility `epsilon`.

    Prosumers get a symmetric box around zero scaled by |baseline|*(1+eps);
    pure producers/consumers keep their sign; a zero baseline pins the agent.
    """
    p = float(agent.p_init[t])
    if p == 0.0:
        return (0.0, 0.0)
    stretch = abs(p) * (1.0 + epsilon)
    if agent.role == PROSUMER:
        return (-stretch, stretch)
    if agent.role == PURE_PRODUCER:
        return (0.0, stretch)
    return (-stretch, 0.0)


def _minimize_timestep(a: np.ndarray, lo: np.ndarray, hi: np.ndarray,
                       price_imp: float, price_exp: float, delta_t: float):
    """Exact minimum of delta_t*(sum a_i p_i - imp*min(S,0) - exp*max(S,0)) over the boxes.

    The aggregate-power profile g(S) = min {sum a_i p_i : sum p_i = S} is convex
    piecewise linear (cheapest agents raised first), and the netting term is
    convex because export <= import, so the total is minimized at one of the
    finitely many breakpoints: box prefix sums and S = 0.
    """
    m = a.size
    order = np.lexsort((np.arange(m), a))  # ascending cost, stable by index
    lo_s, hi_s = lo[order], hi[order]
    span = hi_s - lo_s
    base_sum = float(lo_s.sum())
    base_cost = float(a[order] @ lo_s)
    # cumulative aggregate power / cost along the greedy fill
    agg = base_sum + np.concatenate(([0.0], np.cumsum(span)))
    cost = base_cost + np.concatenate(([0.0], np.cumsum(a[order] * span)))

    def netting(s: float) -> float:
        return price_imp * min(s, 0.0) + price_exp * max(s, 0.0)

    candidates = list(range(agg.size))
    zero_fill = None
    if agg[0] < 0.0 < agg[-1]:
        zero_fill = int(np.searchsorted(agg, 0.0, side="right")) - 1  # segment holding S=0

    best_val = math.inf
    best_s = agg[0]
    for k in candidates:
        val = delta_t * (cost[k] - netting(agg[k]))
        if val < best_val:
            best_val, best_s = val, agg[k]
    if zero_fill is not None:
        c0 = cost[zero_fill] + a[order][zero_fill] * (0.0 - agg[zero_fill])
        val = delta_t * c0
        if val < best_val:
            best_val, best_s = val, 0.0

    # reconstruct the greedy fill at the chosen aggregate power
    p_sorted = lo_s.copy()
    remaining = best_s - base_sum
    for j in range(m):
        if remaining <= 0.0:
            break
        step = min(span[j], remaining)
        p_sorted[j] += step
        remaining -= step
    powers = np.empty(m)
    powers[order] = p_sorted
    objective = delta_t * (float(a @ powers) - netting(float(powers.sum())))
    return powers, objective


def optimize_dispatch(coalition: Coalition, scenario: Scenario) -> DispatchResult:
    """Minimum-cost dispatch of a coalition against aggregate net metering.

    Decomposes per timestep and scans the convex piecewise-linear breakpoints
    exactly; no iterative solver involved.
    """
    members = coalition.sorted_members()
    if members[-1] >= scenario.n:
        raise EnergyModelError("coalition member outside scenario")
    prices = scenario.prices
    T = prices.timesteps
    a = np.array([scenario.agents[i].marginal_cost for i in members])
    powers = np.empty((len(members), T))
    objective = 0.0
    for t in range(T):
        bounds = [power_bounds(scenario.agents[i], scenario.epsilon, t) for i in members]
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        p_t, obj_t = _minimize_timestep(a, lo, hi,
                                        float(prices.import_price[t]),
                                        float(prices.export_price[t]),
                                        prices.delta_t)
        powers[:, t] = p_t
        objective += obj_t
    return DispatchResult(powers=powers, objective=objective)


class ValueOracle:
    """Memoizing map coalition -> value.

    value(C) = sum_i J({i}) - J(C) - kappa * sum of pairwise member distances,
    where J is the optimal dispatch cost.  Singletons are exactly zero.
    """

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self._memo: dict[int, float] = {}
        self._singleton_cost: dict[int, float] = {}
        pos = np.array([a.position for a in scenario.agents])
        diff = pos[:, None, :] - pos[None, :, :]
        self._dist = np.sqrt((diff ** 2).sum(axis=2))

    def _cost(self, i: int) -> float:
        if i not in self._singleton_cost:
            self._singleton_cost[i] = optimize_dispatch(Coalition.of(i), self.scenario).objective
        return self._singleton_cost[i]

    def __call__(self, coalition: Coalition) -> float:
        mask = coalition.to_mask()
        if mask in self._memo:
            return self._memo[mask]
        members = coalition.sorted_members()
        if len(members) == 1:
            value = 0.0
        else:
            joint = optimize_dispatch(coalition, self.scenario).objective
            gain = sum(self._cost(i) for i in members) - joint
            penalty = 0.0
            for ai in range(len(members)):
                for bi in range(ai + 1, len(members)):
                    penalty += self._dist[members[ai], members[bi]]
            value = gain - self.scenario.kappa * penalty
        self._memo[mask] = value
        return value


def coalition_value(coalition: Coalition, oracle: ValueOracle) -> float:
    return oracle(coalition)


@dataclass(frozen=True)
class ScenarioConfig:
    """Generator knobs; defaults model four 15-minute slots of a residential feeder."""

    timesteps: int = 4
    delta_t: float = 0.25
    prosumer_fraction: float = 0.9
    epsilon: float = 0.5
    kappa: float = 0.05
    # baseline power: A*sin(2*pi*t/T + phase) + offset + noise, sign-clamped by role
    amp_range: tuple[float, float] = (0.5, 2.0)
    offset_sigma: float = 0.5
    noise_sigma: float = 0.2
    # per-timestep prices; export is a fraction of import so the spread is real
    import_range: tuple[float, float] = (0.4, 0.6)
    export_ratio_range: tuple[float, float] = (0.2, 0.5)
    # None -> costs drawn to straddle the energy-value spread; else constant
    marginal_cost: float | None = None

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)


def generate_scenario(n: int, timesteps: int | None = None, seed: int = 0,
                      config: ScenarioConfig | None = None) -> Scenario:
    """Random but fully seed-determined scenario with a 90/10 prosumer role split."""
    if n < 1:
        raise EnergyModelError("need at least one agent")
    cfg = config or ScenarioConfig()
    if timesteps is not None:
        cfg = cfg.with_overrides(timesteps=timesteps)
    T = cfg.timesteps
    rng = np.random.default_rng(seed)

    n_pros = int(round(cfg.prosumer_fraction * n))
    roles = [PROSUMER] * n_pros
    roles += [PURE_PRODUCER if rng.random() < 0.5 else PURE_CONSUMER for _ in range(n - n_pros)]
    perm = rng.permutation(n)
    roles = [roles[perm[i]] for i in range(n)]

    imp = rng.uniform(*cfg.import_range, size=T)
    exp = imp * rng.uniform(*cfg.export_ratio_range, size=T)
    prices = PriceSchedule(import_price=imp, export_price=exp, delta_t=cfg.delta_t)

    # costs must straddle the import/export spread, otherwise every agent sits
    # at a coalition-independent box corner and all values collapse to zero
    cost_lo = 0.8 * float(exp.min())
    cost_hi = 1.2 * float(imp.max())

    agents = []
    t_grid = np.arange(T)
    for i in range(n):
        amp = rng.uniform(*cfg.amp_range)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        offset = rng.normal(0.0, cfg.offset_sigma)
        noise = rng.normal(0.0, cfg.noise_sigma, size=T)
        p = amp * np.sin(2.0 * math.pi * t_grid / T + phase) + offset + noise
        # reflect rather than clip at zero: a clipped-to-zero baseline pins the
        # agent to a degenerate [0, 0] box and decouples it from every coalition
        if roles[i] == PURE_PRODUCER:
            p = np.abs(p)
        elif roles[i] == PURE_CONSUMER:
            p = -np.abs(p)
        cost = rng.uniform(cost_lo, cost_hi) if cfg.marginal_cost is None else cfg.marginal_cost
        pos = (float(rng.random()), float(rng.random()))
        agents.append(AgentProfile(id=i, role=roles[i], p_init=p, marginal_cost=cost, position=pos))

    return Scenario(agents=tuple(agents), prices=prices,
                    epsilon=cfg.epsilon, kappa=cfg.kappa, seed=seed)


def scenario_to_json(scenario: Scenario) -> str:
    doc = {
        "n": scenario.n,
        "timesteps": scenario.prices.timesteps,
        "delta_t_hours": scenario.prices.delta_t,
        "epsilon": scenario.epsilon,
        "kappa": scenario.kappa,
        "prices": {
            "import": scenario.prices.import_price.tolist(),
            "export": scenario.prices.export_price.tolist(),
        },
        "agents": [
            {
                "id": a.id,
                "role": a.role,
                "a": a.marginal_cost,
                "p_init": a.p_init.tolist(),
                "pos": [a.position[0], a.position[1]],
            }
            for a in scenario.agents
        ],
    }
    return json.dumps(doc, indent=2)


def scenario_from_json(text: str) -> Scenario:
    doc = json.loads(text)
    prices = PriceSchedule(
        import_price=np.array(doc["prices"]["import"], dtype=float),
        export_price=np.array(doc["prices"]["export"], dtype=float),
        delta_t=float(doc["delta_t_hours"]),
    )
    agents = tuple(
        AgentProfile(
            id=int(a["id"]),
            role=str(a["role"]),
            p_init=np.array(a["p_init"], dtype=float),
            marginal_cost=float(a["a"]),
            position=(float(a["pos"][0]), float(a["pos"][1])),
        )
        for a in doc["agents"]
    )
    scenario = Scenario(agents=agents, prices=prices,
                        epsilon=float(doc["epsilon"]), kappa=float(doc["kappa"]),
                        seed=int(doc.get("seed", 0)))
    if scenario.n != int(doc["n"]) or prices.timesteps != int(doc["timesteps"]):
        raise EnergyModelError("scenario JSON header does not match its agents")
    return scenario
