"""Data generation and Monte Carlo size/power sweeps.

Random numbers come from numpy's counter-based Philox generator. A dataset
seed is expanded through ``SeedSequence``; per-rep seeds are the first eight
bytes (little endian) of a BLAKE2b digest of the JSON list
``[master_seed, scenario, n, repr(beta), rep]``, so any rep can be
regenerated on its own and rep order never affects results.
"""

import hashlib
import json
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
import structlog

from .combine import combined_test, disambiguate, run_estimators
from .data import ObservationTable
from .errors import CausalEvidenceError, ConfigError, TooFewModels
from .models import (
    EstimatorSettings,
    ModelSpec,
    RejectionRow,
    RejectionTable,
    ScenarioConfig,
    SweepConfig,
)
from .scenarios import FAMILY_MODELS, ScenarioDraw, get_scenario
from .sweep_cache import SweepCache

logger = structlog.get_logger(__name__)

CSV_COLUMNS = [
    "scenario",
    "n",
    "beta",
    "alpha",
    "reps",
    "rejections",
    "rejection_rate",
    "mean_t_stat",
    "degenerate_fraction",
    "failures",
    "models",
]


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def derive_seed(master_seed: int, scenario: str, n: int, beta: float, rep: int) -> int:
    """64-bit seed of one rep."""
    payload = json.dumps([master_seed, scenario, n, repr(float(beta)), rep]).encode()
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


def draw(config: ScenarioConfig, treat: float | None = None) -> ScenarioDraw:
    """Full internal state of a simulated dataset, latents included."""
    scenario = get_scenario(config.scenario)
    return scenario.draw(make_rng(config.seed), config.n, config.beta, treat)


def generate(config: ScenarioConfig) -> ObservationTable:
    """Observed columns of a simulated dataset."""
    return draw(config).table


def true_effect(scenario: str, beta: float, n_mc: int = 200_000, seed: int = 0) -> float:
    """Monte Carlo E[Y(1) − Y(0)] using common random numbers for both arms."""
    treated = draw(ScenarioConfig(scenario=scenario, n=n_mc, beta=beta, seed=seed), treat=1.0)
    control = draw(ScenarioConfig(scenario=scenario, n=n_mc, beta=beta, seed=seed), treat=0.0)
    return float(np.mean(treated.table.outcome - control.table.outcome))


def sweep_specs(config: SweepConfig) -> list[ModelSpec]:
    """Model specs a sweep fits, with the sweep's basis applied."""
    scenario = get_scenario(config.scenario)
    if config.models is not None:
        unsupported = [kind for kind in config.models if kind not in FAMILY_MODELS[scenario.family]]
        if unsupported:
            raise ConfigError(
                f"scenario {config.scenario} ({scenario.family.value}) cannot fit "
                f"{', '.join(kind.value for kind in unsupported)}"
            )
    specs = [spec.model_copy(update={"basis": config.basis}) for spec in scenario.specs_for(config.models)]
    if len(specs) < 2:
        raise TooFewModels(len(specs))
    return specs


@dataclass(frozen=True)
class RepOutcome:
    rep: int
    rejected: bool = False
    degenerate: bool = False
    t_stat: float | None = None
    failed: bool = False


@dataclass(frozen=True)
class _RepTask:
    scenario: str
    n: int
    beta: float
    rep: int
    master_seed: int
    alpha: float
    specs: tuple[ModelSpec, ...]
    settings: EstimatorSettings


def _run_rep(task: _RepTask) -> RepOutcome:
    seed = derive_seed(task.master_seed, task.scenario, task.n, task.beta, task.rep)
    try:
        table = generate(ScenarioConfig(scenario=task.scenario, n=task.n, beta=task.beta, seed=seed))
        outputs = run_estimators(table, list(task.specs), task.settings)
        result = combined_test(outputs, [task.alpha], task.settings)
    except CausalEvidenceError as e:
        logger.info("rep failed", scenario=task.scenario, n=task.n, rep=task.rep, error=str(e))
        return RepOutcome(rep=task.rep, failed=True)
    return RepOutcome(
        rep=task.rep,
        rejected=result.reject_at[task.alpha],
        degenerate=result.degenerate,
        t_stat=result.t_stat,
    )


def _cache_key(config: SweepConfig, specs: list[ModelSpec], n: int, beta: float) -> dict[str, Any]:
    return {
        "scenario": config.scenario,
        "n": n,
        "beta": repr(float(beta)),
        "rep_start": config.rep_start,
        "rep_stop": config.rep_start + config.reps,
        "alpha": config.alpha,
        "master_seed": config.master_seed,
        "models": [spec.model_dump(mode="json") for spec in specs],
        "settings": config.settings.model_dump(mode="json"),
    }


def tally(
    scenario: str,
    n: int,
    beta: float,
    alpha: float,
    labels: list[str],
    outcomes: list[RepOutcome],
    rep_range: tuple[int, int],
) -> RejectionRow:
    ordered = sorted(outcomes, key=lambda o: o.rep)
    return RejectionRow(
        scenario=scenario,
        n=n,
        beta=beta,
        alpha=alpha,
        reps=len(ordered),
        rejections=sum(o.rejected for o in ordered),
        degenerate=sum(o.degenerate for o in ordered),
        failures=sum(o.failed for o in ordered),
        models=labels,
        t_stats=[o.t_stat for o in ordered if o.t_stat is not None],
        rep_ranges=[rep_range],
    )


def run_sweep(
    config: SweepConfig,
    workers: int = 1,
    cache: SweepCache | None = None,
    on_rep: Callable[[], None] | None = None,
    on_point: Callable[[RejectionRow], None] | None = None,
) -> RejectionTable:
    """Rejection rates of the product test over the (beta, n) grid.

    Reps run in a process pool when ``workers`` > 1; each rep derives its own
    seed so results do not depend on scheduling. A rep whose estimators fail
    counts as a non-rejection and is tallied under ``failures``.
    """
    specs = sweep_specs(config)
    labels = disambiguate(specs)
    rep_range = (config.rep_start, config.rep_start + config.reps)
    rows: list[RejectionRow] = []

    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for beta in sorted(config.beta_values):
            for n in sorted(config.n_grid):
                key = _cache_key(config, specs, n, beta)
                row = cache.get_row(key) if cache is not None else None
                if row is None:
                    tasks = [
                        _RepTask(
                            config.scenario,
                            n,
                            beta,
                            rep,
                            config.master_seed,
                            config.alpha,
                            tuple(specs),
                            config.settings,
                        )
                        for rep in range(*rep_range)
                    ]
                    outcomes = []
                    results = (
                        executor.map(_run_rep, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
                        if executor is not None
                        else map(_run_rep, tasks)
                    )
                    for outcome in results:
                        outcomes.append(outcome)
                        if on_rep is not None:
                            on_rep()
                    row = tally(config.scenario, n, beta, config.alpha, labels, outcomes, rep_range)
                    if cache is not None:
                        cache.cache_row(key, row)
                elif on_rep is not None:
                    for _ in range(config.reps):
                        on_rep()

                if row.failures:
                    logger.warning(
                        "estimator failures in sweep", scenario=config.scenario, n=n, beta=beta, failures=row.failures
                    )
                logger.info(
                    "grid point done",
                    scenario=config.scenario,
                    n=n,
                    beta=beta,
                    rejection_rate=row.rejection_rate,
                )
                rows.append(row)
                if on_point is not None:
                    on_point(row)
    finally:
        if executor is not None:
            executor.shutdown()

    return RejectionTable(rows=rows).sorted()


def _coalesce(ranges: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Sorted ranges with adjacent ones joined."""
    joined: list[tuple[int, int]] = []
    for start, stop in sorted(ranges):
        if joined and joined[-1][1] == start:
            joined[-1] = (joined[-1][0], stop)
        else:
            joined.append((start, stop))
    return joined


def merge_tables(*tables: RejectionTable) -> RejectionTable:
    """Merge sweeps over disjoint rep ranges of the same grid.

    Parts are folded in order of their first rep, so merging contiguous
    splits reproduces the row of a single run.
    """
    parts = sorted(
        (row for table in tables for row in table.rows),
        key=lambda r: min(r.rep_ranges, default=(0, 0)),
    )
    merged: dict[tuple[str, int, float, float, tuple[str, ...]], RejectionRow] = {}
    for row in parts:
        key = (row.scenario, row.n, row.beta, row.alpha, tuple(row.models))
        if key not in merged:
            merged[key] = row.model_copy(deep=True)
            continue
        current = merged[key]
        for start, stop in row.rep_ranges:
            for other_start, other_stop in current.rep_ranges:
                if start < other_stop and other_start < stop:
                    raise ValueError(
                        f"rep ranges [{start}, {stop}) and [{other_start}, {other_stop}) overlap"
                    )
        merged[key] = current.model_copy(
            update={
                "reps": current.reps + row.reps,
                "rejections": current.rejections + row.rejections,
                "degenerate": current.degenerate + row.degenerate,
                "failures": current.failures + row.failures,
                "t_stats": current.t_stats + row.t_stats,
                "rep_ranges": _coalesce(current.rep_ranges + row.rep_ranges),
            }
        )
    return RejectionTable(rows=list(merged.values())).sorted()


def summarize(table: RejectionTable, path: str | Path) -> None:
    """Write one CSV row per (scenario, n, beta)."""
    if not table.rows:
        raise ValueError("cannot summarize an empty rejection table")
    frame = pd.DataFrame([row.csv_record() for row in table.sorted().rows], columns=CSV_COLUMNS)
    frame.to_csv(path, index=False)
    logger.info("wrote rejection table", path=str(path), rows=len(frame))
