"""Dive-and-fix latency optimization plus deterministic/robust baselines.

The main routine follows the greedy scheme of the source algorithm: fix
the worst-case distributions, solve the LP relaxation, then repeatedly
branch on the most fractional access variable, keep the cheaper child,
and never backtrack; afterwards repeat for the compute variables. The
relay matrix is derived from flow conservation. Because the dive is
greedy, optimality is measured against the exhaustive oracle rather
than assumed.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass

import numpy as np

from .ambiguity import AmbiguitySet, SampleSpace
from .errors import InfeasibleProblemError, ShapeError, SizeError, SolverError
from .geometry import Scenario, per_bit_coefficients
from .lp import LinearProgram, LpSolution, LpStatus, solve_lp
from .model import (
    INTEGRALITY_TOL,
    OffloadDecision,
    RelaxedDecision,
    build_p2,
    expected_latency,
    worst_case_distributions,
)

METHOD_MDRLOA = "MDRLOA"
METHOD_DO = "DO"
METHOD_RO = "RO"
METHOD_EXHAUSTIVE = "EXHAUSTIVE"

EXHAUSTIVE_MAX_TDS = 6
EXHAUSTIVE_MAX_UAVS = 3


@dataclass(frozen=True)
class SolveResult:
    decision: OffloadDecision
    worst_case_expected_latency: float
    relaxation_bound: float
    lp_solve_count: int
    method: str

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "worst_case_expected_latency_s": self.worst_case_expected_latency,
            "relaxation_bound_s": self.relaxation_bound,
            "lp_solve_count": self.lp_solve_count,
            "decision": self.decision.to_dict(),
        }


def select_branch(matrix: np.ndarray, tol: float = INTEGRALITY_TOL):
    """Index of the entry farthest from integrality, or None if all integral.

    Ties break to the lexicographically smallest (i, j).
    """
    scores = np.minimum(matrix, 1.0 - matrix)
    if scores.max(initial=0.0) <= tol:
        return None
    flat = int(np.argmax(scores))
    return tuple(int(v) for v in np.unravel_index(flat, matrix.shape))


# the access and compute phases use the identical most-fractional rule
select_branch_x = select_branch
select_branch_y = select_branch


def _solve_fixed(base: LinearProgram, fixed: dict[int, float]) -> LpSolution:
    lp = copy.copy(base)
    lp.lower = base.lower.copy()
    lp.upper = base.upper.copy()
    for col, value in fixed.items():
        lp.lower[col] = value
        lp.upper[col] = value
    return solve_lp(lp)


def _dive(scenario: Scenario, mean_sizes: np.ndarray):
    """Greedy integerization. Returns (decision, root bound, lp count)."""
    i, j = scenario.num_tds, scenario.num_uavs
    ij = i * j
    base = build_p2(scenario, mean_sizes)
    fixed: dict[int, float] = {}
    current = _solve_fixed(base, fixed)
    count = 1
    if current.status is not LpStatus.OPTIMAL:
        raise InfeasibleProblemError(
            f"root relaxation is {current.status.value} "
            f"(I={i}, J={j}, N_u={scenario.quota_uav}, N_H={scenario.quota_hap})"
        )
    bound = current.objective_value

    pinned = {}
    for offset in (0, ij):  # access block first, then compute block
        while True:
            rel = RelaxedDecision.from_lp_vector(current.x, i, j)
            matrix = rel.x if offset == 0 else rel.y
            pick = select_branch(matrix)
            if pick is None:
                break
            col = offset + pick[0] * j + pick[1]
            children = {}
            for value in (0.0, 1.0):
                trial = dict(fixed)
                trial[col] = value
                children[value] = _solve_fixed(base, trial)
                count += 1
            lat0 = (
                children[0.0].objective_value
                if children[0.0].status is LpStatus.OPTIMAL
                else np.inf
            )
            lat1 = (
                children[1.0].objective_value
                if children[1.0].status is LpStatus.OPTIMAL
                else np.inf
            )
            if not np.isfinite(lat0) and not np.isfinite(lat1):
                raise InfeasibleProblemError(
                    f"both children infeasible after fixings {sorted(fixed.items())} "
                    f"at variable column {col}"
                )
            chosen = 0.0 if lat0 < lat1 else 1.0
            fixed[col] = chosen
            current = children[chosen]
        # pin the whole block at its (integral) relaxed values and re-solve so
        # the next phase branches from a consistent point
        rel = RelaxedDecision.from_lp_vector(current.x, i, j)
        matrix = rel.x if offset == 0 else rel.y
        rounded = np.rint(matrix)
        pinned[offset] = rounded.astype(int)
        if offset == 0:
            for col, value in enumerate(rounded.ravel()):
                fixed[col] = float(value)
            current = _solve_fixed(base, fixed)
            count += 1
            if current.status is not LpStatus.OPTIMAL:  # pragma: no cover
                raise SolverError("re-solve after pinning the access block failed")

    x_mat, y_mat = pinned[0], pinned[ij]
    z_mat = x_mat - y_mat
    if not np.isin(z_mat, (0, 1)).all():
        raise SolverError("derived relay matrix is not binary")
    decision = OffloadDecision(x=x_mat, y=y_mat, z=z_mat)
    decision.validate(scenario)
    return decision, bound, count


def mdrloa_solve(scenario: Scenario, ambiguity_sets: list[AmbiguitySet]) -> SolveResult:
    """Distributionally robust solve: worst-case distributions, then dive."""
    if len(ambiguity_sets) != scenario.num_tds:
        raise ShapeError("need one ambiguity set per TD")
    _, means = worst_case_distributions(ambiguity_sets)
    decision, bound, count = _dive(scenario, means)
    return SolveResult(
        decision=decision,
        worst_case_expected_latency=expected_latency(decision, scenario, means),
        relaxation_bound=bound,
        lp_solve_count=count,
        method=METHOD_MDRLOA,
    )


def baseline_deterministic(
    scenario: Scenario, estimate_bits: float, method: str = METHOD_DO
) -> SolveResult:
    """Dive with every task size replaced by one point estimate."""
    if not estimate_bits > 0:
        raise ShapeError(f"estimate must be > 0, got {estimate_bits}")
    means = np.full(scenario.num_tds, float(estimate_bits))
    decision, bound, count = _dive(scenario, means)
    return SolveResult(
        decision=decision,
        worst_case_expected_latency=expected_latency(decision, scenario, means),
        relaxation_bound=bound,
        lp_solve_count=count,
        method=method,
    )


def do_solve(scenario: Scenario, space: SampleSpace) -> SolveResult:
    """Deterministic baseline: estimate at the average atom."""
    return baseline_deterministic(scenario, float(np.mean(space.atoms)), METHOD_DO)


def ro_solve(scenario: Scenario, space: SampleSpace) -> SolveResult:
    """Robust baseline: estimate at the largest atom."""
    return baseline_deterministic(scenario, float(max(space.atoms)), METHOD_RO)


def exhaustive_solve(scenario: Scenario, mean_sizes: np.ndarray) -> SolveResult:
    """Enumerate every feasible decision; optimality oracle for small cases."""
    i, j = scenario.num_tds, scenario.num_uavs
    if i > EXHAUSTIVE_MAX_TDS or j > EXHAUSTIVE_MAX_UAVS:
        raise SizeError(
            f"exhaustive search limited to I <= {EXHAUSTIVE_MAX_TDS}, "
            f"J <= {EXHAUSTIVE_MAX_UAVS}; got I={i}, J={j}"
        )
    mean_sizes = np.asarray(mean_sizes, dtype=float)
    if mean_sizes.shape != (i,):
        raise ShapeError("mean_sizes must have one entry per TD")
    coeffs = per_bit_coefficients(scenario)
    en = scenario.energy
    access = coeffs.access_delay
    uav_cp = coeffs.uav_compute_delay
    relay = coeffs.relay_path_delay

    masks = np.array(list(itertools.product((0, 1), repeat=i)), dtype=float)
    quota_ok = masks.sum(axis=1) <= scenario.quota_hap
    hap_energy = masks @ (mean_sizes * coeffs.hap_compute_energy)
    hap_ok = hap_energy <= en.hap_budget - en.hap_basic + 1e-9

    best_value = np.inf
    best = None
    idx = np.arange(i)
    for assign in itertools.product(range(j), repeat=i):
        a = np.array(assign)
        counts = np.bincount(a, minlength=j)
        if (counts > scenario.quota_uav).any():
            continue
        base_lat = float(mean_sizes @ (access[idx, a] + uav_cp[a]))
        delta = mean_sizes * (relay[a] - uav_cp[a])
        latencies = base_lat + masks @ delta
        feasible = quota_ok & hap_ok
        relay_en = mean_sizes * coeffs.uav_relay_energy[a]
        comp_en = mean_sizes * coeffs.uav_compute_energy[a]
        for jj in range(j):
            sel = (a == jj).astype(float)
            uav_energy = masks @ (relay_en * sel) + (1.0 - masks) @ (comp_en * sel)
            feasible &= uav_energy <= en.uav_budget - en.uav_basic + 1e-9
        if not feasible.any():
            continue
        cand = np.where(feasible, latencies, np.inf)
        k = int(np.argmin(cand))
        if cand[k] < best_value - 1e-15:
            best_value = float(cand[k])
            best = (a.copy(), masks[k].astype(int))
    if best is None:
        raise InfeasibleProblemError("no feasible decision exists for this instance")

    a, s = best
    x = np.zeros((i, j), dtype=int)
    x[idx, a] = 1
    z = x * s[:, None]
    y = x - z
    decision = OffloadDecision(x=x, y=y, z=z)
    decision.validate(scenario)
    return SolveResult(
        decision=decision,
        worst_case_expected_latency=best_value,
        relaxation_bound=best_value,
        lp_solve_count=0,
        method=METHOD_EXHAUSTIVE,
    )
