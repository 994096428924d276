"""CSV and text rendering of analyses, sweeps and the scenario registry."""

from pathlib import Path

import numpy as np
import pandas as pd
import structlog
from rich.console import Console
from rich.table import Table

from .combine import AnalysisReport
from .models import RejectionRow
from .scenarios import Scenario

logger = structlog.get_logger(__name__)

INTERVAL_COLUMNS = ["label", "estimate", "std_error", "ci_lower", "ci_upper", "p_value"]


def combined_path(out: Path) -> Path:
    return out.with_name(f"{out.stem}_combined{out.suffix or '.csv'}")


def write_analysis(report: AnalysisReport, out: str | Path) -> tuple[Path, Path]:
    """Write per-model Wald rows to ``out`` and the combined row next to it."""
    out = Path(out)
    pd.DataFrame(report.interval_rows(), columns=INTERVAL_COLUMNS).to_csv(out, index=False)
    combined = combined_path(out)
    pd.DataFrame([report.combined_row()]).to_csv(combined, index=False)
    logger.info("wrote analysis", intervals=str(out), combined=str(combined))
    return out, combined


def _num(value: float, digits: int = 4) -> str:
    if np.isinf(value):
        return "inf"
    return f"{value:.{digits}g}"


def render_analysis(report: AnalysisReport, console: Console, level: float = 0.95) -> None:
    table = Table(title="Per-model estimates")
    table.add_column("Model", style="cyan")
    table.add_column("Estimate", justify="right")
    table.add_column("Std. error", justify="right")
    table.add_column(f"{level:.0%} CI", justify="right")
    table.add_column("p-value", justify="right")
    for interval in report.intervals:
        table.add_row(
            interval.label,
            _num(interval.estimate),
            _num(interval.std_error),
            f"({_num(interval.lower)}, {_num(interval.upper)})",
            _num(interval.p_value, 3),
        )
    console.print(table)

    result = report.result
    combined = Table(title=f"Product test over K={result.k} models (n={result.n})")
    combined.add_column("Product", justify="right")
    combined.add_column("T", justify="right")
    combined.add_column("p-value", justify="right")
    combined.add_column("cond(Σ)", justify="right")
    for alpha in sorted(result.reject_at):
        combined.add_column(f"reject @ {alpha:g}", justify="center")
    combined.add_row(
        _num(result.product),
        _num(result.t_stat),
        _num(result.p_value, 3),
        _num(result.sigma_condition_number, 3),
        *("yes" if result.reject_at[alpha] else "no" for alpha in sorted(result.reject_at)),
    )
    console.print(combined)
    if result.degenerate:
        console.print("[yellow]Degenerate variance: test reported as non-rejecting (p = 1).[/yellow]")

    corr = result.correlation()
    corr_table = Table(title="Estimator correlations")
    corr_table.add_column("")
    for label in result.labels:
        corr_table.add_column(label, justify="right")
    for label, values in zip(result.labels, corr, strict=True):
        corr_table.add_row(label, *(f"{v:.3f}" for v in values))
    console.print(corr_table)


def format_point(row: RejectionRow) -> str:
    """One summary line per grid point."""
    line = (
        f"{row.scenario} n={row.n} beta={row.beta:g}: "
        f"rejection rate {row.rejection_rate:.3f} ({row.rejections}/{row.reps})"
    )
    if row.degenerate:
        line += f", degenerate {row.degenerate_fraction:.3f}"
    if row.failures:
        line += f", failures {row.failures}"
    return line


def render_scenarios(
    scenarios: list[Scenario],
    console: Console,
    detail: bool = False,
    effects: dict[str, float] | None = None,
) -> None:
    """Registry listing; ``effects`` maps keys to a Monte Carlo ACE shown with ``detail``."""
    table = Table(title=f"{len(scenarios)} scenarios")
    table.add_column("Key", style="cyan", no_wrap=True)
    table.add_column("Family")
    table.add_column("Source")
    table.add_column("Description")
    if detail:
        table.add_column("Valid models")
        table.add_column("Wrong-model functional")
        table.add_column("Default specs")
        table.add_column("Use")
        if effects is not None:
            table.add_column("ACE at beta=10", justify="right")
    for scenario in scenarios:
        cells = [scenario.key, scenario.family.value, scenario.source, scenario.description]
        if detail:
            cells += [
                ", ".join(scenario.valid_models) or "-",
                scenario.wrong_functional.value,
                "; ".join(
                    spec.qualified_label() if spec.adjustment_covariates else spec.display_label()
                    for spec in scenario.model_specs
                ),
                "demonstration" if scenario.demonstration else "sweep",
            ]
            if effects is not None:
                cells.append(_num(effects[scenario.key], 3))
        table.add_row(*cells)
    console.print(table)
