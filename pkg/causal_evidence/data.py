"""Observed dataset: loading, validation and role-based access."""

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd
import structlog

from .errors import (
    DataError,
    EmptyFile,
    MissingColumn,
    MissingValue,
    NonBinaryValue,
    NonNumericValue,
    SpecError,
    SpecRequiresInstrument,
    SpecRequiresMediator,
    UnknownCovariate,
)
from .models import ColumnMapping, ModelKind, ModelSpec

logger = structlog.get_logger(__name__)

MISSING_TOKENS = frozenset({"", "na", "nan", "null", "none"})


def _frozen(values: np.ndarray) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


def _check_binary(name: str, values: np.ndarray) -> None:
    bad = np.flatnonzero((values != 0.0) & (values != 1.0))
    if bad.size:
        raise NonBinaryValue(name, int(bad[0]) + 1, values[bad[0]])


@dataclass(frozen=True, eq=False)
class ObservationTable:
    """Fully observed realizations of O = {C, Z, A, M, Y}.

    Arrays are copied to read-only float64 on construction, so a table can be
    shared between workers without defensive copies.
    """

    outcome: np.ndarray
    treatment: np.ndarray
    covariates: np.ndarray
    mapping: ColumnMapping
    instrument: np.ndarray | None = None
    mediator: np.ndarray | None = None
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = len(self.outcome)
        covariates = np.asarray(self.covariates, dtype=float)
        if covariates.ndim == 1 and covariates.size == 0:
            covariates = covariates.reshape(n, 0)
        object.__setattr__(self, "outcome", _frozen(self.outcome))
        object.__setattr__(self, "treatment", _frozen(self.treatment))
        object.__setattr__(self, "covariates", _frozen(covariates))
        if self.instrument is not None:
            object.__setattr__(self, "instrument", _frozen(self.instrument))
        if self.mediator is not None:
            object.__setattr__(self, "mediator", _frozen(self.mediator))

        if n < 2:
            raise DataError(f"need at least 2 rows, got {n}")
        columns = {self.mapping.outcome_name: self.outcome, self.mapping.treatment_name: self.treatment}
        if self.instrument is not None:
            columns[self.mapping.instrument_name or "instrument"] = self.instrument
        if self.mediator is not None:
            columns[self.mapping.mediator_name or "mediator"] = self.mediator
        for name, values in columns.items():
            if len(values) != n:
                raise ValueError(f"column {name!r} has {len(values)} rows, expected {n}")
        if self.covariates.shape != (n, len(self.mapping.covariate_names)):
            raise ValueError(
                f"covariates have shape {self.covariates.shape}, "
                f"expected ({n}, {len(self.mapping.covariate_names)})"
            )
        for name, values in columns.items():
            missing = np.flatnonzero(~np.isfinite(values))
            if missing.size:
                raise MissingValue(name, int(missing[0]) + 1)
        missing_rows, missing_cols = np.nonzero(~np.isfinite(self.covariates))
        if missing_rows.size:
            raise MissingValue(self.mapping.covariate_names[missing_cols[0]], int(missing_rows[0]) + 1)

        _check_binary(self.mapping.treatment_name, self.treatment)
        if self.instrument is not None:
            _check_binary(self.mapping.instrument_name or "instrument", self.instrument)
        if self.mediator is not None:
            _check_binary(self.mapping.mediator_name or "mediator", self.mediator)

        object.__setattr__(
            self, "_index", {name: i for i, name in enumerate(self.mapping.covariate_names)}
        )

    @property
    def n_rows(self) -> int:
        return len(self.outcome)

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    @property
    def covariate_names(self) -> list[str]:
        return list(self.mapping.covariate_names)

    def has_column(self, name: str) -> bool:
        return name in self._index or (
            self.instrument is not None and name == self.mapping.instrument_name
        )

    def select(self, names: tuple[str, ...] | list[str]) -> np.ndarray:
        """Return the n×|names| matrix of an adjustment set.

        Names resolve against covariates first, then the instrument.
        """
        columns = []
        for name in names:
            if name in self._index:
                columns.append(self.covariates[:, self._index[name]])
            elif self.instrument is not None and name == self.mapping.instrument_name:
                columns.append(self.instrument)
            else:
                raise UnknownCovariate(name)
        if not columns:
            return np.empty((self.n_rows, 0))
        return np.column_stack(columns)

    def with_outcome(self, outcome: np.ndarray) -> "ObservationTable":
        return replace(self, outcome=np.asarray(outcome, dtype=float))

    def take(self, order: np.ndarray) -> "ObservationTable":
        """Rows reordered (or subset) by integer index."""
        return replace(
            self,
            outcome=self.outcome[order],
            treatment=self.treatment[order],
            covariates=self.covariates[order],
            instrument=None if self.instrument is None else self.instrument[order],
            mediator=None if self.mediator is None else self.mediator[order],
        )

    def to_frame(self) -> pd.DataFrame:
        data: dict[str, np.ndarray] = {
            self.mapping.outcome_name: self.outcome,
            self.mapping.treatment_name: self.treatment.astype(int),
        }
        if self.instrument is not None and self.mapping.instrument_name:
            data[self.mapping.instrument_name] = self.instrument.astype(int)
        if self.mediator is not None and self.mapping.mediator_name:
            data[self.mapping.mediator_name] = self.mediator.astype(int)
        for i, name in enumerate(self.mapping.covariate_names):
            data[name] = self.covariates[:, i]
        return pd.DataFrame(data)


def _parse_column(frame: pd.DataFrame, name: str, binary: bool) -> np.ndarray:
    if name not in frame.columns:
        raise MissingColumn(name)
    values = np.empty(len(frame), dtype=float)
    for row, raw in enumerate(frame[name].tolist(), start=1):
        text = raw.strip()
        if text.lower() in MISSING_TOKENS:
            raise MissingValue(name, row)
        try:
            value = float(text)
        except ValueError:
            if binary:
                raise NonBinaryValue(name, row, text) from None
            raise NonNumericValue(name, row, text) from None
        if binary and value not in (0.0, 1.0):
            raise NonBinaryValue(name, row, text)
        values[row - 1] = value
    return values


def load_csv(path: str | Path, mapping: ColumnMapping) -> ObservationTable:
    """Load a header-first UTF-8 CSV and validate it against ``mapping``.

    Row numbers in errors count data rows from 1.
    """
    path = Path(path)
    mapping.check_distinct()
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8"
        )
    except pd.errors.EmptyDataError:
        raise EmptyFile(str(path)) from None
    if frame.empty:
        raise EmptyFile(str(path))

    outcome = _parse_column(frame, mapping.outcome_name, binary=False)
    treatment = _parse_column(frame, mapping.treatment_name, binary=True)
    instrument = (
        _parse_column(frame, mapping.instrument_name, binary=True)
        if mapping.instrument_name
        else None
    )
    mediator = (
        _parse_column(frame, mapping.mediator_name, binary=True)
        if mapping.mediator_name
        else None
    )
    covariates = [_parse_column(frame, name, binary=False) for name in mapping.covariate_names]
    matrix = np.column_stack(covariates) if covariates else np.empty((len(frame), 0))

    table = ObservationTable(
        outcome=outcome,
        treatment=treatment,
        covariates=matrix,
        mapping=mapping,
        instrument=instrument,
        mediator=mediator,
    )
    logger.info("loaded table", path=str(path), n_rows=table.n_rows, p=table.p)
    return table


def write_csv(table: ObservationTable, path: str | Path) -> None:
    """Write a table so that ``load_csv`` reproduces it bit for bit."""
    table.to_frame().to_csv(path, index=False, float_format="%.17g")


def validate_spec(table: ObservationTable, spec: ModelSpec) -> None:
    """Check that ``table`` carries every column ``spec`` needs."""
    if spec.kind == ModelKind.FRONTDOOR and table.mediator is None:
        raise SpecRequiresMediator()
    if spec.kind == ModelKind.IV:
        if table.instrument is None:
            raise SpecRequiresInstrument()
        if spec.adjustment_covariates:
            raise SpecError("the IV model is unconditional and takes no adjustment set")
    for name in spec.adjustment_covariates:
        if not table.has_column(name):
            raise UnknownCovariate(name)
