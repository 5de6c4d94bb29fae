import json
import math

import numpy as np
import pytest

from ecoform.energy import Coalition
from ecoform.exact import idp_solve
from ecoform.isg import IsgInstance, IsgMeta, fit_isg, isg_value, random_isg
from ecoform.pipeline import (CoalitionStructure, PipelineError, iterative_split,
                              quality_ratio, structure_to_json, structure_value)
from ecoform.qubo import energy
from ecoform.solvers import Exhaustive, Sa, Tabu


def instance_from_weights(w):
    w = np.asarray(w, dtype=float)
    return IsgInstance(n=w.shape[0], weights=w, meta=IsgMeta(source="random"))


class TestIterativeSplit:
    def test_three_node_hand_trace(self, three_node_instance):
        structure, trace = iterative_split(three_node_instance, Exhaustive(), seed=0)
        assert structure.as_lists() == [[0, 1], [2]]
        assert structure.value == pytest.approx(1.0)
        assert trace.qubo_solves == 2
        # first split accepted at cut -1, the {0,1} re-split rejected at +1
        assert trace.steps[0].accepted
        assert trace.steps[0].solver_result.best_energy == pytest.approx(-1.0)
        assert not trace.steps[1].accepted
        assert trace.steps[1].solver_result.best_energy == 0.0

    def test_all_nonnegative_weights_keep_grand_coalition(self):
        rng = np.random.default_rng(1)
        w = np.abs(rng.normal(0, 0.3, size=(6, 6)))
        w = np.triu(w, 1)
        w = w + w.T
        structure, trace = iterative_split(instance_from_weights(w), Exhaustive(), seed=0)
        assert structure.as_lists() == [[0, 1, 2, 3, 4, 5]]
        assert trace.qubo_solves == 1

    def test_all_negative_weights_fully_singleton(self):
        rng = np.random.default_rng(2)
        w = -np.abs(rng.normal(0, 0.3, size=(7, 7))) - 0.01
        w = np.triu(w, 1)
        w = w + w.T
        structure, trace = iterative_split(instance_from_weights(w), Exhaustive(), seed=0)
        assert structure.as_lists() == [[i] for i in range(7)]
        assert trace.accepted_splits == 6  # n - 1 internal nodes of the split tree

    def test_termination_bounds(self):
        for seed in range(5):
            inst = random_isg(10, sigma=0.4, density=0.9, seed=seed)
            _, trace = iterative_split(inst, Exhaustive(), seed=seed)
            assert trace.accepted_splits <= 9
            assert trace.qubo_solves <= 19

    def test_accepted_splits_strictly_increase_value(self):
        inst = random_isg(12, sigma=0.3, density=0.9, seed=6)
        tolerance = 1e-9 * float(np.abs(inst.weights).sum() / 2)
        structure, trace = iterative_split(inst, Exhaustive(), seed=0)
        running = isg_value(inst, Coalition(frozenset(range(12))))
        values = [running]
        for step in trace.steps:
            if step.accepted:
                assert step.solver_result.best_energy < -tolerance
                running -= step.solver_result.best_energy
                values.append(running)
        assert all(b > a for a, b in zip(values, values[1:]))
        assert structure.value == pytest.approx(running, rel=1e-9)

    def test_split_bookkeeping_identity_on_every_accepted_split(self):
        from ecoform.qubo import build_split_qubo, split_assignment
        for seed in range(8):
            inst = random_isg(11, sigma=0.25, density=0.9, seed=40 + seed)
            _, trace = iterative_split(inst, Tabu(), seed=seed)
            for step in trace.steps:
                if not step.accepted:
                    continue
                qubo = build_split_qubo(inst, step.coalition)
                a, b = split_assignment(qubo, step.solver_result.best_x)
                whole = isg_value(inst, step.coalition)
                parts = isg_value(inst, a) + isg_value(inst, b)
                cut = step.solver_result.best_energy
                assert whole == pytest.approx(parts + cut, rel=1e-9, abs=1e-12)

    def test_partition_validity(self):
        for seed in range(5):
            inst = random_isg(9, sigma=0.5, density=0.8, seed=seed)
            structure, _ = iterative_split(inst, Sa(), seed=seed)
            members = [i for c in structure.coalitions for i in c.members]
            assert sorted(members) == list(range(9))

    def test_never_beats_exact_dp(self):
        for seed in range(10):
            inst = random_isg(12, sigma=0.2, density=0.95, seed=seed)
            structure, _ = iterative_split(inst, Exhaustive(), seed=seed)
            exact = idp_solve(inst, 12).value
            if exact != 0.0:
                assert quality_ratio(structure.value, exact) <= 1.0 + 1e-9

    def test_deterministic_per_seed(self):
        inst = random_isg(10, sigma=0.3, density=0.9, seed=3)
        s1, t1 = iterative_split(inst, Sa(), seed=5)
        s2, t2 = iterative_split(inst, Sa(), seed=5)
        assert s1.as_lists() == s2.as_lists()
        assert s1.value == s2.value
        assert [s.solver_result.best_energy for s in t1.steps] == \
               [s.solver_result.best_energy for s in t2.steps]


class TestStructureValue:
    def test_all_singletons_zero_under_isg(self):
        inst = random_isg(5, sigma=0.3, density=0.9, seed=0)
        structure = CoalitionStructure(
            coalitions=tuple(Coalition.of(i) for i in range(5)), value=0.0)
        assert structure_value(structure, inst.value_oracle()) == 0.0

    def test_pipeline_output_value(self, three_node_instance):
        structure, _ = iterative_split(three_node_instance, Exhaustive(), seed=0)
        assert structure_value(structure, three_node_instance.value_oracle()) == \
               pytest.approx(1.0)

    def test_pairwise_additive_oracle_gives_identical_dual_values(self):
        # evaluating the same structure under the game and under its own
        # pairwise oracle is the same computation, so equality is exact
        inst = random_isg(8, sigma=0.3, density=0.9, seed=9)
        structure, _ = iterative_split(inst, Exhaustive(), seed=0)
        assert structure_value(structure, inst.value_oracle()) == structure.value

    def test_fig2b_ratio_equals_fig2a_ratio_for_additive_oracles(self):
        # CSG oracle that is exactly pairwise additive: fit it, split the fit,
        # and score the result both ways
        truth = random_isg(8, sigma=0.3, density=0.9, seed=14)
        oracle = truth.value_oracle()
        fitted = fit_isg(oracle, 8)
        structure, _ = iterative_split(fitted, Exhaustive(), seed=0)
        isg_side = structure_value(structure, fitted.value_oracle())
        csg_side = structure_value(structure, oracle)
        assert csg_side == pytest.approx(isg_side, abs=1e-6)
        ref_isg = idp_solve(fitted, 8).value
        ref_csg = idp_solve(truth, 8).value
        assert quality_ratio(csg_side, ref_csg) == \
               pytest.approx(quality_ratio(isg_side, ref_isg), abs=1e-6)

    def test_overlap_rejected(self):
        structure = CoalitionStructure(
            coalitions=(Coalition.of(0, 1), Coalition.of(1, 2)), value=0.0)
        with pytest.raises(PipelineError, match="overlap"):
            structure_value(structure, lambda c: 0.0)

    def test_gap_rejected(self):
        structure = CoalitionStructure(
            coalitions=(Coalition.of(0), Coalition.of(2)), value=0.0)
        with pytest.raises(PipelineError, match="cover"):
            structure_value(structure, lambda c: 0.0)


class TestQualityRatio:
    def test_identity(self):
        assert quality_ratio(1.0, 1.0) == 1.0

    def test_worse_candidate(self):
        assert quality_ratio(0.9, 1.0) == pytest.approx(0.9)

    def test_zero_reference_is_nan(self):
        assert math.isnan(quality_ratio(0.5, 0.0))


class TestStructureJson:
    def test_document_shape(self, three_node_instance):
        structure, trace = iterative_split(three_node_instance, Exhaustive(), seed=0)
        doc = json.loads(structure_to_json(structure, trace))
        assert doc["coalitions"] == [[0, 1], [2]]
        assert doc["value"] == pytest.approx(1.0)
        assert len(doc["trace"]) == 2
        assert doc["trace"][0] == {"coalition": [0, 1, 2], "cut": -1.0, "accepted": True}
