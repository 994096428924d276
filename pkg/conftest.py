"""Shared fixtures and the --runslow switch."""

import numpy as np
import pytest

from causal_evidence.data import ObservationTable
from causal_evidence.models import ColumnMapping, ScenarioConfig
from causal_evidence.simulate import generate

SEED = 20240613


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow Monte Carlo tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def make_table(
    y,
    a,
    covariates=None,
    *,
    z=None,
    m=None,
    covariate_names=None,
) -> ObservationTable:
    """Build a table from plain lists, naming columns y/a/z/m and c1..cp."""
    y = np.asarray(y, dtype=float)
    covariates = np.empty((len(y), 0)) if covariates is None else np.asarray(covariates, dtype=float)
    if covariates.ndim == 1:
        covariates = covariates.reshape(-1, 1)
    names = covariate_names or [f"c{j + 1}" for j in range(covariates.shape[1])]
    mapping = ColumnMapping(
        outcome_name="y",
        treatment_name="a",
        instrument_name="z" if z is not None else None,
        mediator_name="m" if m is not None else None,
        covariate_names=names,
    )
    return ObservationTable(
        outcome=y,
        treatment=np.asarray(a, dtype=float),
        covariates=covariates,
        mapping=mapping,
        instrument=None if z is None else np.asarray(z, dtype=float),
        mediator=None if m is None else np.asarray(m, dtype=float),
    )


@pytest.fixture
def bfi_table() -> ObservationTable:
    return generate(ScenarioConfig(scenario="BFI-a", n=500, beta=0.0, seed=SEED))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(SEED)
