"""Where coalition value comes from: net metering against a price spread.

A producer whose marginal cost sits between the export and import price has
no reason to produce for the grid alone, but inside a coalition its power
displaces a neighbor's imports.  The value oracle turns that spread into a
transferable-utility game.
"""

import numpy as np

from ecoform import Coalition, ValueOracle, generate_scenario, optimize_dispatch
from ecoform.energy import Scenario

scenario = generate_scenario(n=6, seed=42)
print(f"scenario: {scenario.n} agents, {scenario.prices.timesteps} x "
      f"{scenario.prices.delta_t} h, kappa={scenario.kappa}")
print("roles:", [a.role for a in scenario.agents])
print("marginal costs:", np.round([a.marginal_cost for a in scenario.agents], 3))
print("import prices:", np.round(scenario.prices.import_price, 3))
print("export prices:", np.round(scenario.prices.export_price, 3))

# individual dispatch: every agent optimizes against the retail prices alone
for i in range(3):
    result = optimize_dispatch(Coalition.of(i), scenario)
    print(f"agent {i} alone: cost {result.objective:+.4f}, "
          f"powers {np.round(result.powers[0], 2)}")

# the same agents jointly: aggregate metering nets surplus against demand
joint = optimize_dispatch(Coalition.of(0, 1, 2), scenario)
print(f"agents 0-2 jointly: cost {joint.objective:+.4f}")

oracle = ValueOracle(scenario)
print("\ncoalition values (gain over individual metering, minus dispersion):")
for members in [(0,), (0, 1), (0, 1, 2), tuple(range(6))]:
    c = Coalition(frozenset(members))
    print(f"  v({list(members)}) = {oracle(c):+.4f}")

# with the dispersion penalty off, merging never hurts
flat = Scenario(agents=scenario.agents, prices=scenario.prices,
                epsilon=scenario.epsilon, kappa=0.0, seed=scenario.seed)
flat_oracle = ValueOracle(flat)
v_all = flat_oracle(Coalition(frozenset(range(6))))
v_parts = flat_oracle(Coalition.of(0, 1, 2)) + flat_oracle(Coalition.of(3, 4, 5))
print(f"\nkappa=0: v(grand)={v_all:.4f} >= v(0-2)+v(3-5)={v_parts:.4f} "
      f"(superadditive: {v_all >= v_parts - 1e-12})")
