import dataclasses

import numpy as np
import pytest

from dro_offload.ambiguity import AmbiguitySet, Distribution, SampleSpace
from dro_offload.config import default_config
from dro_offload.errors import InfeasibleProblemError, SizeError
from dro_offload.geometry import generate_scenario
from dro_offload.mdrloa import (
    METHOD_DO,
    METHOD_MDRLOA,
    METHOD_RO,
    do_solve,
    exhaustive_solve,
    mdrloa_solve,
    ro_solve,
    select_branch,
)
from dro_offload.model import expected_latency, worst_case_distributions

SPACE = SampleSpace.with_midpoint_edges([3e6, 9e6, 15e6, 21e6, 27e6])


def _scenario(seed=1, **overrides):
    cfg = default_config().scenario
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    return generate_scenario(cfg, seed)


def _uniform_sets(n, radius=0.3):
    return [AmbiguitySet(SPACE, Distribution.uniform(5), radius) for _ in range(n)]


class TestSelectBranch:
    def test_integral_returns_none(self):
        assert select_branch(np.array([[0.0, 1.0], [1.0, 0.0]])) is None

    def test_most_fractional_wins(self):
        m = np.array([[0.9, 0.1], [0.45, 0.55]])
        assert select_branch(m) == (1, 0)

    def test_tie_breaks_lexicographically(self):
        m = np.array([[0.5, 0.5], [0.5, 0.5]])
        assert select_branch(m) == (0, 0)

    def test_respects_tolerance(self):
        m = np.array([[1.0 - 1e-8, 1e-8]])
        assert select_branch(m) is None


class TestMdrloaSolve:
    def test_solution_valid_and_counted(self):
        sc = _scenario()
        result = mdrloa_solve(sc, _uniform_sets(10))
        result.decision.validate(sc)
        assert result.method == METHOD_MDRLOA
        assert result.lp_solve_count >= 2
        assert result.worst_case_expected_latency >= result.relaxation_bound - 1e-9

    def test_deterministic(self):
        sc = _scenario(seed=9)
        a = mdrloa_solve(sc, _uniform_sets(10))
        b = mdrloa_solve(sc, _uniform_sets(10))
        np.testing.assert_array_equal(a.decision.x, b.decision.x)
        np.testing.assert_array_equal(a.decision.y, b.decision.y)
        assert a.worst_case_expected_latency == b.worst_case_expected_latency

    def test_latency_matches_reported(self):
        sc = _scenario(seed=3)
        sets = _uniform_sets(10)
        result = mdrloa_solve(sc, sets)
        _, means = worst_case_distributions(sets)
        assert result.worst_case_expected_latency == pytest.approx(
            expected_latency(result.decision, sc, means), rel=1e-12
        )

    def test_set_count_mismatch(self):
        with pytest.raises(Exception):
            mdrloa_solve(_scenario(), _uniform_sets(3))

    def test_pigeonhole_infeasible(self):
        sc = _scenario(num_tds=3, num_uavs=1, quota_uav=2)
        with pytest.raises(InfeasibleProblemError):
            mdrloa_solve(sc, _uniform_sets(3))


class TestAgainstExhaustive:
    @pytest.mark.parametrize("seed", range(1, 11))
    def test_dive_near_optimal(self, seed):
        sc = _scenario(seed=seed, num_tds=4, num_uavs=2, quota_uav=2)
        sets = _uniform_sets(4)
        _, means = worst_case_distributions(sets)
        dive = mdrloa_solve(sc, sets)
        opt = exhaustive_solve(sc, means)
        assert dive.worst_case_expected_latency <= 1.10 * opt.worst_case_expected_latency
        assert dive.relaxation_bound <= opt.worst_case_expected_latency + 1e-9

    def test_exhaustive_size_guard(self):
        with pytest.raises(SizeError):
            exhaustive_solve(_scenario(), np.full(10, 1e6))

    def test_exhaustive_infeasible(self):
        sc = _scenario(num_tds=3, num_uavs=1, quota_uav=2)
        with pytest.raises(InfeasibleProblemError):
            exhaustive_solve(sc, np.full(3, 1e6))


class TestBaselines:
    def test_do_uses_mean_atom(self):
        sc = _scenario(seed=2)
        result = do_solve(sc, SPACE)
        assert result.method == METHOD_DO
        result.decision.validate(sc)
        # reported latency is evaluated at the 15 Mbit average estimate
        est = np.full(10, 15e6)
        assert result.worst_case_expected_latency == pytest.approx(
            expected_latency(result.decision, sc, est), rel=1e-12
        )

    def test_ro_uses_max_atom(self):
        sc = _scenario(seed=2)
        result = ro_solve(sc, SPACE)
        assert result.method == METHOD_RO
        est = np.full(10, 27e6)
        assert result.worst_case_expected_latency == pytest.approx(
            expected_latency(result.decision, sc, est), rel=1e-12
        )

    def test_ro_latency_at_least_do(self):
        # same instance scored at a larger per-bit budget can't be cheaper
        sc = _scenario(seed=6)
        assert (
            ro_solve(sc, SPACE).worst_case_expected_latency
            >= do_solve(sc, SPACE).worst_case_expected_latency - 1e-9
        )

    def test_result_serialization(self):
        result = do_solve(_scenario(), SPACE)
        data = result.to_dict()
        assert data["method"] == METHOD_DO
        assert set(data["decision"]) == {"x", "y", "z"}
