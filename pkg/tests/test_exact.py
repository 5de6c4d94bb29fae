import numpy as np
import pytest

from ecoform import _kernels
from ecoform.energy import Coalition, Scenario, ValueOracle, generate_scenario
from ecoform.exact import (ExactError, brute_force_partitions, dense_values,
                           idp_solve)
from ecoform.isg import isg_value, random_isg


def kappa_zero(scenario):
    return Scenario(agents=scenario.agents, prices=scenario.prices,
                    epsilon=scenario.epsilon, kappa=0.0, seed=scenario.seed)


class TestIdp:
    def test_single_agent(self):
        solution = idp_solve(lambda c: 0.0, 1)
        assert solution.value == 0.0
        assert solution.structure.as_lists() == [[0]]

    def test_three_node_example(self, three_node_instance):
        solution = idp_solve(three_node_instance, 3)
        assert solution.value == pytest.approx(1.0)
        assert solution.structure.as_lists() == [[0, 1], [2]]

    def test_matches_brute_force_on_random_games(self):
        rng = np.random.default_rng(123)
        for trial in range(50):
            n = int(rng.integers(4, 9))
            inst = random_isg(n, sigma=float(rng.uniform(0.1, 1.0)),
                              density=float(rng.uniform(0.4, 1.0)),
                              seed=int(rng.integers(1 << 30)))
            a = idp_solve(inst, n)
            b = brute_force_partitions(inst, n)
            assert a.value == pytest.approx(b.value, rel=1e-9, abs=1e-12)

    def test_grand_coalition_under_superadditive_oracle(self):
        scenario = kappa_zero(generate_scenario(6, seed=33))
        solution = idp_solve(ValueOracle(scenario), 6)
        assert solution.structure.as_lists() == [[0, 1, 2, 3, 4, 5]]

    def test_dp_table_dominates_raw_values(self):
        inst = random_isg(8, sigma=0.4, density=0.8, seed=77)
        values = dense_values(inst, 8)
        best, _ = _kernels.idp_tables(values, 1e-12)
        assert np.all(best >= values - 1e-12)

    def test_structure_value_consistency(self):
        inst = random_isg(7, sigma=0.3, density=0.9, seed=5)
        solution = idp_solve(inst, 7)
        recomputed = sum(isg_value(inst, c) for c in solution.structure.coalitions)
        assert solution.value == pytest.approx(recomputed, rel=1e-12)

    def test_cap(self):
        with pytest.raises(ExactError, match="n <= 22"):
            idp_solve(lambda c: 0.0, 23)

    def test_accepts_dense_array(self):
        inst = random_isg(6, sigma=0.3, density=0.9, seed=8)
        values = dense_values(inst, 6)
        assert idp_solve(values, 6).value == idp_solve(inst, 6).value


class TestBruteForce:
    def test_bell_count_n3(self, three_node_instance):
        solution = brute_force_partitions(three_node_instance, 3)
        assert solution.subsets_explored == 5  # Bell(3)

    def test_bell_count_n5(self):
        inst = random_isg(5, sigma=0.2, density=0.9, seed=1)
        assert brute_force_partitions(inst, 5).subsets_explored == 52  # Bell(5)

    def test_zero_weights_tie_breaks_to_grand_coalition(self):
        inst = random_isg(5, sigma=0.2, density=0.9, seed=1)
        zero = np.zeros(1 << 5)
        solution = brute_force_partitions(zero, 5)
        assert solution.value == 0.0
        assert solution.structure.as_lists() == [[0, 1, 2, 3, 4]]

    def test_cap(self):
        with pytest.raises(ExactError, match="n <= 10"):
            brute_force_partitions(lambda c: 0.0, 11)

    def test_against_energy_oracle(self):
        scenario = generate_scenario(5, seed=44)
        oracle = ValueOracle(scenario)
        a = idp_solve(oracle, 5)
        b = brute_force_partitions(oracle, 5)
        assert a.value == pytest.approx(b.value, rel=1e-9, abs=1e-12)


class TestDenseValues:
    def test_isg_fast_path_matches_generic(self):
        inst = random_isg(8, sigma=0.5, density=0.7, seed=19)
        fast = dense_values(inst, 8)
        generic = dense_values(inst.value_oracle(), 8)
        assert fast == pytest.approx(generic, abs=1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ExactError):
            dense_values(np.zeros(7), 3)
