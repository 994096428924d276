"""Command-line interface for causal-evidence."""

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path

import click
from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

from . import __version__
from .combine import analyze_all
from .config import analysis_from_config, load_config, merge_overrides, sweep_from_config
from .data import load_csv, write_csv
from .errors import CausalEvidenceError, ConfigError
from .logging_config import setup_logging
from .models import ScenarioConfig
from .report import format_point, render_analysis, render_scenarios, write_analysis
from .scenarios import SCENARIOS, get_scenario
from .simulate import derive_seed, generate, run_sweep, summarize, sweep_specs, true_effect
from .sweep_cache import SweepCache

CONSOLE_WIDTH = 160

MODEL_HELP = """Candidate model, repeatable (at least two). Syntax:
backdoor:adj=<c1,c2,...> or frontdoor:adj=<c1,...> or iv,
each optionally followed by :basis=<b> :interactions=true|false :label=<name>
(written without spaces). Bases: linear, poly:<degree>, spline:<knots>;
without basis= the --basis default applies."""


def _console() -> Console:
    return Console(width=CONSOLE_WIDTH, highlight=False)


@contextmanager
def _reported_errors() -> Iterator[None]:
    """Config problems exit 2, data and model problems exit 1."""
    try:
        yield
    except ConfigError as e:
        raise click.UsageError(str(e)) from e
    except (CausalEvidenceError, OSError) as e:
        raise click.ClickException(str(e)) from e


@click.group()
@click.version_option(__version__, prog_name="causal-evidence")
@click.option("-v", "--verbose", count=True, help="-v for INFO logs, -vv for DEBUG.")
@click.option(
    "--log-dir",
    type=click.Path(file_okay=False, path_type=Path),
    help="Also write JSON logs to a timestamped file in this directory.",
)
def main(verbose: int, log_dir: Path | None) -> None:
    """Test a causal null under several candidate causal models at once.

    The combined test stays valid if at least one model is correct.
    """
    setup_logging(verbose, log_dir)


@main.command()
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False, path_type=Path), help="Input CSV with a header row.")
@click.option("--outcome", help="Outcome column Y.")
@click.option("--treatment", help="Binary treatment column A.")
@click.option("--instrument", help="Binary instrument column Z.")
@click.option("--mediator", help="Binary mediator column M.")
@click.option("--covariates", help="Comma-separated covariate columns C.")
@click.option("--model", "models", multiple=True, help=MODEL_HELP)
@click.option("--alpha", "alphas", type=float, multiple=True, help="Test level, repeatable (default 0.05).")
@click.option("--level", type=float, help="Wald interval level (default 0.95).")
@click.option("--basis", help="Default nuisance basis for models without basis=.")
@click.option("--interactions", is_flag=True, default=None, help="Add pairwise covariate products.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Per-model CSV; the combined row goes to <stem>_combined.csv.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="YAML or key=value config file.")
def analyze(
    csv_path: Path | None,
    outcome: str | None,
    treatment: str | None,
    instrument: str | None,
    mediator: str | None,
    covariates: str | None,
    models: tuple[str, ...],
    alphas: tuple[float, ...],
    level: float | None,
    basis: str | None,
    interactions: bool | None,
    out: Path | None,
    config_path: Path | None,
) -> None:
    """Fit each model, then run the combined product test."""
    with _reported_errors():
        data = load_config(config_path) if config_path else {}
        data = merge_overrides(
            data,
            {
                "csv": str(csv_path) if csv_path else None,
                "outcome": outcome,
                "treatment": treatment,
                "instrument": instrument,
                "mediator": mediator,
                "covariates": covariates,
                "model": list(models) or None,
                "alpha": list(alphas) or None,
                "level": level,
                "basis": basis,
                "interactions": interactions,
                "out": str(out) if out else None,
            },
        )
        config = analysis_from_config(data)
        if len(config.models) < 2:
            raise click.UsageError("the combined test needs at least two --model specs")
        if "csv" not in data:
            raise click.UsageError("missing --csv")

        table = load_csv(data["csv"], config.mapping)
        report = analyze_all(table, config.models, config.alphas, config.settings, config.level)

        render_analysis(report, _console(), config.level)
        if data.get("out"):
            intervals, combined = write_analysis(report, data["out"])
            click.echo(f"Wrote {intervals} and {combined}")


@main.command()
@click.option("--scenario", help="Scenario key (see `causal-evidence scenarios`).")
@click.option("--n-grid", help="Comma-separated sample sizes (default 100,250,500,750,1000).")
@click.option("--beta", help="Comma-separated effect sizes (default 0,10).")
@click.option("--reps", type=int, help="Reps per grid point (default 1000).")
@click.option("--rep-start", type=int, help="First rep index, for splitting a sweep (default 0).")
@click.option("--alpha", type=float, help="Test level (default 0.05).")
@click.option("--seed", type=int, help="Master seed (required).")
@click.option("--models", help="Comma-separated subset of the scenario's models.")
@click.option("--basis", help="Nuisance basis: linear, poly:<d> or spline:<k> (default spline:3).")
@click.option("--interactions", is_flag=True, default=None, help="Add pairwise covariate products.")
@click.option("--workers", type=int, help="Worker processes (default 1).")
@click.option("--cache-dir", type=click.Path(file_okay=False, path_type=Path), help="Cache finished grid points here.")
@click.option("--clear-cache", is_flag=True, help="Empty --cache-dir before running.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), help="Rejection table CSV.")
@click.option("--dump", type=click.Path(dir_okay=False, path_type=Path), help="Write the first grid point's first dataset instead of sweeping.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="YAML or key=value config file.")
def simulate(
    scenario: str | None,
    n_grid: str | None,
    beta: str | None,
    reps: int | None,
    rep_start: int | None,
    alpha: float | None,
    seed: int | None,
    models: str | None,
    basis: str | None,
    interactions: bool | None,
    workers: int | None,
    cache_dir: Path | None,
    clear_cache: bool,
    out: Path | None,
    dump: Path | None,
    config_path: Path | None,
) -> None:
    """Monte Carlo size/power sweep of the product test on a scenario."""
    with _reported_errors():
        data = load_config(config_path) if config_path else {}
        data = merge_overrides(
            data,
            {
                "scenario": scenario,
                "n_grid": n_grid,
                "beta": beta,
                "reps": reps,
                "rep_start": rep_start,
                "alpha": alpha,
                "seed": seed,
                "models": models,
                "basis": basis,
                "interactions": interactions,
                "workers": workers,
                "cache_dir": str(cache_dir) if cache_dir else None,
                "out": str(out) if out else None,
            },
        )
        config = sweep_from_config(data)
        get_scenario(config.scenario)

        if dump is not None:
            n, effect = config.n_grid[0], config.beta_values[0]
            rep_seed = derive_seed(config.master_seed, config.scenario, n, effect, config.rep_start)
            table = generate(ScenarioConfig(scenario=config.scenario, n=n, beta=effect, seed=rep_seed))
            write_csv(table, dump)
            click.echo(f"Wrote {n} rows of {config.scenario} (beta={effect:g}) to {dump}")
            return

        sweep_specs(config)
        cache = SweepCache(data["cache_dir"]) if data.get("cache_dir") else None
        if cache is not None and clear_cache:
            cache.clear_cache()

        total = config.reps * len(config.n_grid) * len(config.beta_values)
        progress = Progress(
            TextColumn("{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=Console(stderr=True),
            transient=True,
        )
        with progress:
            task = progress.add_task(config.scenario, total=total)
            table = run_sweep(
                config,
                workers=int(data.get("workers", 1)),
                cache=cache,
                on_rep=lambda: progress.advance(task),
            )

        for row in table.rows:
            click.echo(format_point(row))
        if data.get("out"):
            summarize(table, data["out"])
            click.echo(f"Wrote {data['out']}")


@main.command()
@click.option("--detail", is_flag=True, help="Show valid models, default specs and a Monte Carlo ACE.")
def scenarios(detail: bool) -> None:
    """List the registered simulation scenarios."""
    registry = list(SCENARIOS.values())
    effects = None
    if detail:
        effects = {s.key: true_effect(s.key, 10.0, n_mc=100_000) for s in registry}
    render_scenarios(registry, _console(), detail, effects)


if __name__ == "__main__":
    main()
