"""Monte-Carlo evaluation harness: solve, realize, compare, sweep.

For each seed the harness generates a scenario, samples a task-size
history from the ground-truth distribution, builds the ambiguity sets,
solves with every configured method, then draws one fresh realization of
the task sizes from the truth and scores each decision on it. Results
are flat rows that serialize to a deterministic CSV: same config and
seeds means byte-identical output.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field

import numpy as np

from .ambiguity import AmbiguitySet, SampleSpace, empirical_distribution, generate_history
from .config import RunConfig
from .errors import InfeasibleProblemError, ShapeError
from .geometry import Scenario, generate_scenario
from .mdrloa import (
    METHOD_DO,
    METHOD_EXHAUSTIVE,
    METHOD_MDRLOA,
    METHOD_RO,
    SolveResult,
    do_solve,
    exhaustive_solve,
    mdrloa_solve,
    ro_solve,
)
from .model import expected_energy, expected_latency, worst_case_distributions

# independent per-purpose rng streams; geometry owns its own (0x6E0)
HISTORY_STREAM = 0x415
REALIZATION_STREAM = 0x7EA

METHOD_LABELS = {
    "dro": METHOD_MDRLOA,
    "do": METHOD_DO,
    "ro": METHOD_RO,
    "exhaustive": METHOD_EXHAUSTIVE,
}

CSV_COLUMNS = (
    "method",
    "seed",
    "param_name",
    "param_value",
    "realized_latency_s",
    "max_uav_energy_J",
    "hap_energy_J",
    "feasible",
)

ENERGY_SLACK = 1e-9


@dataclass(frozen=True)
class Realization:
    """One drawn task size per TD, in bits; every size is a space atom."""

    task_sizes: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.task_sizes, dtype=float)


def draw_realization(config: RunConfig, seed: int) -> Realization:
    space = config.ambiguity.sample_space()
    truth = config.ambiguity.truth.distribution(space)
    rng = np.random.default_rng([int(seed), REALIZATION_STREAM])
    draws = rng.choice(np.asarray(space.atoms), size=config.scenario.num_tds, p=truth.as_array())
    return Realization(task_sizes=tuple(float(v) for v in draws))


def build_ambiguity_sets(config: RunConfig, seed: int) -> list[AmbiguitySet]:
    """Histories -> empirical references -> L1 balls, one per TD.

    With a shared history every TD sees the same reference distribution;
    otherwise each TD gets an independent sample stream.
    """
    amb = config.ambiguity
    space = amb.sample_space()
    truth = amb.truth.distribution(space)
    eps = amb.effective_epsilon()
    num_tds = config.scenario.num_tds
    if amb.per_device_history:
        refs = [
            empirical_distribution(
                generate_history(truth, space, amb.history_len, [int(seed), HISTORY_STREAM, i]),
                space,
            )
            for i in range(num_tds)
        ]
    else:
        shared = empirical_distribution(
            generate_history(truth, space, amb.history_len, [int(seed), HISTORY_STREAM]),
            space,
        )
        refs = [shared] * num_tds
    return [AmbiguitySet(space=space, reference=r, radius=eps) for r in refs]


def realized_latency(decision, scenario: Scenario, realization: Realization) -> float:
    """Latency for the sizes that actually occurred (point-mass expectation)."""
    return expected_latency(decision, scenario, realization.as_array())


def realized_energy(decision, scenario: Scenario, realization: Realization):
    """(per-UAV vector, HAP total) joules under the realized sizes, basics included."""
    return expected_energy(decision, scenario, realization.as_array())


def solve_with_method(
    method: str, scenario: Scenario, ambiguity_sets: list[AmbiguitySet]
) -> SolveResult:
    space = ambiguity_sets[0].space
    if method == "dro":
        return mdrloa_solve(scenario, ambiguity_sets)
    if method == "do":
        return do_solve(scenario, space)
    if method == "ro":
        return ro_solve(scenario, space)
    if method == "exhaustive":
        _, means = worst_case_distributions(ambiguity_sets)
        return exhaustive_solve(scenario, means)
    raise ShapeError(f"unknown method {method!r}")


@dataclass(frozen=True)
class EvaluationRow:
    method: str
    seed: int
    param_name: str
    param_value: float | None
    realized_latency: float  # s; NaN when the solve failed
    max_uav_energy: float  # J above the basic cost
    hap_energy: float  # J above the basic cost
    feasible: bool

    def sort_key(self, method_order: dict[str, int]):
        pv = -math.inf if self.param_value is None else self.param_value
        return (self.param_name, pv, self.seed, method_order.get(self.method, 99))


def _fmt(value: float) -> str:
    if math.isnan(value):
        return ""
    return format(value, ".12g")


def evaluate_seed(
    config: RunConfig, seed: int, param_name: str = "", param_value: float | None = None
) -> list[EvaluationRow]:
    """Solve every configured method on one seeded instance and score it."""
    scenario = generate_scenario(config.scenario, seed)
    sets = build_ambiguity_sets(config, seed)
    realization = draw_realization(config, seed)
    en = config.scenario.energy
    rows = []
    for method in config.experiment.methods:
        label = METHOD_LABELS[method]
        try:
            result = solve_with_method(method, scenario, sets)
        except InfeasibleProblemError:
            rows.append(
                EvaluationRow(
                    method=label,
                    seed=seed,
                    param_name=param_name,
                    param_value=param_value,
                    realized_latency=math.nan,
                    max_uav_energy=math.nan,
                    hap_energy=math.nan,
                    feasible=False,
                )
            )
            continue
        latency = realized_latency(result.decision, scenario, realization)
        uav, hap = realized_energy(result.decision, scenario, realization)
        ok = bool(
            (uav <= en.uav_budget + ENERGY_SLACK).all() and hap <= en.hap_budget + ENERGY_SLACK
        )
        rows.append(
            EvaluationRow(
                method=label,
                seed=seed,
                param_name=param_name,
                param_value=param_value,
                realized_latency=latency,
                max_uav_energy=float(uav.max() - en.uav_basic),
                hap_energy=hap - en.hap_basic,
                feasible=ok,
            )
        )
    return rows


def _seed_worker(args) -> list[EvaluationRow]:
    return evaluate_seed(*args)


@dataclass(frozen=True)
class EvaluationReport:
    rows: tuple[EvaluationRow, ...]
    method_order: tuple[str, ...] = (METHOD_MDRLOA, METHOD_DO, METHOD_RO, METHOD_EXHAUSTIVE)

    def sorted_rows(self) -> list[EvaluationRow]:
        order = {m: k for k, m in enumerate(self.method_order)}
        return sorted(self.rows, key=lambda r: r.sort_key(order))

    def to_csv(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        for r in self.sorted_rows():
            lines.append(
                ",".join(
                    [
                        r.method,
                        str(r.seed),
                        r.param_name,
                        "" if r.param_value is None else _fmt(r.param_value),
                        _fmt(r.realized_latency),
                        _fmt(r.max_uav_energy),
                        _fmt(r.hap_energy),
                        "true" if r.feasible else "false",
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())

    def groups(self) -> list[tuple[tuple[str, float | None], list[EvaluationRow]]]:
        seen: dict[tuple[str, float | None], list[EvaluationRow]] = {}
        for r in self.sorted_rows():
            seen.setdefault((r.param_name, r.param_value), []).append(r)
        return list(seen.items())

    def aggregates(self) -> dict:
        """Per (param, method): count, feasible count, mean/std latency, mean energies."""
        out: dict = {}
        for key, rows in self.groups():
            per_method: dict = {}
            for method in self.method_order:
                mrows = [r for r in rows if r.method == method]
                if not mrows:
                    continue
                good = [r for r in mrows if not math.isnan(r.realized_latency)]
                lat = np.array([r.realized_latency for r in good])
                per_method[method] = {
                    "count": len(mrows),
                    "solved": len(good),
                    "feasible": sum(r.feasible for r in mrows),
                    "mean_latency_s": float(lat.mean()) if good else math.nan,
                    "std_latency_s": float(lat.std()) if good else math.nan,
                    "mean_max_uav_energy_J": (
                        float(np.mean([r.max_uav_energy for r in good])) if good else math.nan
                    ),
                    "mean_hap_energy_J": (
                        float(np.mean([r.hap_energy for r in good])) if good else math.nan
                    ),
                }
            out[key] = per_method
        return out

    def summary(self) -> str:
        """Human-readable digest with the two headline relative savings."""
        lines = []
        for (pname, pvalue), per_method in self.aggregates().items():
            if pname:
                lines.append(f"[{pname} = {_fmt(pvalue)}]")
            else:
                lines.append("[default parameters]")
            for method, agg in per_method.items():
                lines.append(
                    f"  {method:10s} n={agg['count']} solved={agg['solved']} "
                    f"feasible={agg['feasible']} "
                    f"latency={_fmt(agg['mean_latency_s'])}s "
                    f"(std {_fmt(agg['std_latency_s'])}) "
                    f"max_uav={_fmt(agg['mean_max_uav_energy_J'])}J "
                    f"hap={_fmt(agg['mean_hap_energy_J'])}J"
                )
            main = per_method.get(METHOD_MDRLOA)
            if main is not None and not math.isnan(main["mean_latency_s"]):
                do = per_method.get(METHOD_DO)
                if do and do["mean_latency_s"] > 0:
                    pct = 100.0 * (do["mean_latency_s"] - main["mean_latency_s"]) / do["mean_latency_s"]
                    lines.append(f"  latency vs DO: {pct:+.2f}% lower")
                ro = per_method.get(METHOD_RO)
                if ro:
                    e_main = main["mean_max_uav_energy_J"] + main["mean_hap_energy_J"]
                    e_ro = ro["mean_max_uav_energy_J"] + ro["mean_hap_energy_J"]
                    if e_ro > 0:
                        pct = 100.0 * (e_ro - e_main) / e_ro
                        lines.append(f"  energy vs RO: {pct:+.2f}% lower")
        return "\n".join(lines) + "\n"

    def write_summary(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.summary())


def compare_methods(
    config: RunConfig, param_name: str = "", param_value: float | None = None
) -> EvaluationReport:
    """Evaluate every (seed, method) pair of the experiment block."""
    seeds = config.experiment.seeds
    args = [(config, s, param_name, param_value) for s in seeds]
    if config.experiment.jobs > 1 and len(seeds) > 1:
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=config.experiment.jobs
        ) as pool:
            chunks = list(pool.map(_seed_worker, args))
    else:
        chunks = [evaluate_seed(*a) for a in args]
    rows = tuple(r for chunk in chunks for r in chunk)
    return EvaluationReport(rows=rows)


def sweep(config: RunConfig, param: str, values) -> EvaluationReport:
    """Repeat the comparison for each parameter value.

    Sweeping Q under a fixed confidence level re-derives epsilon per
    value, since the config stores the confidence, not the radius.
    """
    rows: list[EvaluationRow] = []
    for value in values:
        cfg = config.with_override(param, float(value))
        rows.extend(compare_methods(cfg, param_name=param, param_value=float(value)).rows)
    return EvaluationReport(rows=tuple(rows))
