"""Domain models: column mappings, model specs, settings and sweep results."""

import math
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import DuplicateColumn

MAX_POLY_DEGREE = 5
MAX_KNOTS = 10
DEFAULT_N_GRID = [100, 250, 500, 750, 1000]


class ModelKind(str, Enum):
    """Candidate causal models."""

    BACKDOOR = "backdoor"
    FRONTDOOR = "frontdoor"
    IV = "iv"


class BasisKind(str, Enum):
    """Basis families for nuisance design matrices."""

    LINEAR = "linear"
    POLYNOMIAL = "poly"
    SPLINE = "spline"


class BasisSpec(BaseModel):
    """Basis expansion applied to covariates before a nuisance fit."""

    model_config = ConfigDict(frozen=True)

    kind: BasisKind = BasisKind.SPLINE
    degree: int = 2
    knots_per_covariate: int = 3
    include_interactions: bool = False

    @field_validator("degree")
    @classmethod
    def _check_degree(cls, value: int) -> int:
        if not 2 <= value <= MAX_POLY_DEGREE:
            raise ValueError(f"polynomial degree must be in [2, {MAX_POLY_DEGREE}]")
        return value

    @field_validator("knots_per_covariate")
    @classmethod
    def _check_knots(cls, value: int) -> int:
        if not 1 <= value <= MAX_KNOTS:
            raise ValueError(f"knots_per_covariate must be in [1, {MAX_KNOTS}]")
        return value

    @classmethod
    def parse(cls, text: str, include_interactions: bool = False) -> "BasisSpec":
        """Parse ``linear``, ``poly:<degree>`` or ``spline:<knots>``."""
        head, _, arg = text.strip().lower().partition(":")
        if head == BasisKind.LINEAR.value and not arg:
            return cls(kind=BasisKind.LINEAR, include_interactions=include_interactions)
        if head == BasisKind.POLYNOMIAL.value and arg:
            return cls(
                kind=BasisKind.POLYNOMIAL,
                degree=int(arg),
                include_interactions=include_interactions,
            )
        if head == BasisKind.SPLINE.value:
            return cls(
                kind=BasisKind.SPLINE,
                knots_per_covariate=int(arg) if arg else 3,
                include_interactions=include_interactions,
            )
        raise ValueError(f"unrecognised basis {text!r}; use linear, poly:<d> or spline:<k>")

    def label(self) -> str:
        if self.kind == BasisKind.LINEAR:
            text = "linear"
        elif self.kind == BasisKind.POLYNOMIAL:
            text = f"poly:{self.degree}"
        else:
            text = f"spline:{self.knots_per_covariate}"
        return text + ("+int" if self.include_interactions else "")


class ColumnMapping(BaseModel):
    """Maps source CSV columns onto observed-data roles."""

    outcome_name: str
    treatment_name: str
    instrument_name: str | None = None
    mediator_name: str | None = None
    covariate_names: list[str] = Field(default_factory=list)

    def all_names(self) -> list[str]:
        names = [self.outcome_name, self.treatment_name]
        if self.instrument_name:
            names.append(self.instrument_name)
        if self.mediator_name:
            names.append(self.mediator_name)
        return names + list(self.covariate_names)

    def check_distinct(self) -> None:
        seen: set[str] = set()
        for name in self.all_names():
            if name in seen:
                raise DuplicateColumn(name)
            seen.add(name)


class ModelSpec(BaseModel):
    """One candidate causal model and how to fit its nuisances."""

    model_config = ConfigDict(frozen=True)

    kind: ModelKind
    adjustment_covariates: tuple[str, ...] = ()
    basis: BasisSpec = Field(default_factory=BasisSpec)
    label: str | None = None

    @classmethod
    def parse(cls, text: str, default_basis: BasisSpec | None = None) -> "ModelSpec":
        """Parse the CLI mini-syntax, e.g. ``backdoor:adj=c1,c2:basis=poly:3``.

        Segments after the kind are ``key=value`` pairs separated by ``:``; a
        segment without ``=`` continues the previous value, which lets basis
        specs carry their own colon.
        """
        parts = text.strip().split(":")
        try:
            kind = ModelKind(parts[0].lower())
        except ValueError as e:
            raise ValueError(f"unknown model kind {parts[0]!r}") from e

        options: dict[str, str] = {}
        last_key: str | None = None
        for segment in parts[1:]:
            if "=" in segment:
                key, _, value = segment.partition("=")
                last_key = key.strip().lower()
                options[last_key] = value.strip()
            elif last_key is not None:
                options[last_key] += ":" + segment.strip()
            else:
                raise ValueError(f"malformed model option {segment!r} in {text!r}")

        unknown = set(options) - {"adj", "basis", "label", "interactions"}
        if unknown:
            raise ValueError(f"unknown model option(s) {sorted(unknown)} in {text!r}")

        interactions = options.get("interactions", "false").lower() == "true"
        if "basis" in options:
            basis = BasisSpec.parse(options["basis"], include_interactions=interactions)
        elif default_basis is not None:
            basis = default_basis
            if "interactions" in options:
                basis = default_basis.model_copy(update={"include_interactions": interactions})
        else:
            basis = BasisSpec(include_interactions=interactions)
        adjustment = tuple(c for c in options.get("adj", "").split(",") if c.strip())
        return cls(
            kind=kind,
            adjustment_covariates=tuple(c.strip() for c in adjustment),
            basis=basis,
            label=options.get("label"),
        )

    def display_label(self) -> str:
        """Label used in reports; explicit labels win."""
        return self.label or self.kind.value

    def qualified_label(self) -> str:
        """Label disambiguated by adjustment set."""
        if self.label:
            return self.label
        return f"{self.kind.value}[{','.join(self.adjustment_covariates)}]"


class EstimatorSettings(BaseModel):
    """Numeric knobs shared by the nuisance fits and the estimators."""

    model_config = ConfigDict(frozen=True)

    ridge: float = Field(default=1e-8, ge=0.0)
    propensity_clamp: float = Field(default=0.01, ge=0.0, lt=0.5)
    mediator_clamp: float = Field(default=0.01, ge=0.0, lt=0.5)
    max_iterations: int = Field(default=100, ge=1)
    tolerance: float = Field(default=1e-10, gt=0.0)
    degenerate_scale: float = Field(default=1e-12, gt=0.0)


class ScenarioConfig(BaseModel):
    """One simulated dataset: scenario key, sample size, effect and seed."""

    model_config = ConfigDict(frozen=True)

    scenario: str
    n: int = Field(ge=2)
    beta: float = 0.0
    seed: int = Field(ge=0, lt=2**64)


class SweepConfig(BaseModel):
    """A Monte Carlo size/power sweep over sample sizes and effects."""

    model_config = ConfigDict(frozen=True)

    scenario: str
    n_grid: list[int] = Field(default_factory=lambda: list(DEFAULT_N_GRID))
    beta_values: list[float] = Field(default_factory=lambda: [0.0, 10.0])
    reps: int = Field(default=1000, ge=1)
    rep_start: int = Field(default=0, ge=0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    master_seed: int = Field(ge=0, lt=2**64)
    models: list[ModelKind] | None = None
    basis: BasisSpec = Field(default_factory=BasisSpec)
    settings: EstimatorSettings = Field(default_factory=EstimatorSettings)

    @field_validator("n_grid")
    @classmethod
    def _check_grid(cls, value: list[int]) -> list[int]:
        if not value or any(n < 2 for n in value):
            raise ValueError("n_grid must be non-empty with every n >= 2")
        return value

    @field_validator("beta_values")
    @classmethod
    def _check_betas(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("beta_values must be non-empty")
        return value


class AnalysisConfig(BaseModel):
    """Inputs of a real-data analysis run."""

    mapping: ColumnMapping
    models: list[ModelSpec]
    alphas: list[float] = Field(default_factory=lambda: [0.05])
    level: float = Field(default=0.95, gt=0.0, lt=1.0)
    settings: EstimatorSettings = Field(default_factory=EstimatorSettings)

    @model_validator(mode="after")
    def _check_alphas(self) -> "AnalysisConfig":
        if any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ValueError("every alpha must lie in (0, 1)")
        return self


class RejectionRow(BaseModel):
    """Tally of one (scenario, n, beta) grid point over a range of reps."""

    scenario: str
    n: int
    beta: float
    alpha: float
    reps: int = Field(ge=0)
    rejections: int = Field(ge=0)
    degenerate: int = Field(ge=0)
    failures: int = Field(ge=0)
    models: list[str]
    t_stats: list[float] = Field(default_factory=list)
    rep_ranges: list[tuple[int, int]] = Field(default_factory=list)

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.reps if self.reps else 0.0

    @property
    def degenerate_fraction(self) -> float:
        return self.degenerate / self.reps if self.reps else 0.0

    @property
    def mean_t_stat(self) -> float:
        """Mean statistic over reps whose estimators all succeeded."""
        if not self.t_stats:
            return float("nan")
        return math.fsum(self.t_stats) / len(self.t_stats)

    def csv_record(self) -> dict[str, object]:
        return {
            "scenario": self.scenario,
            "n": self.n,
            "beta": self.beta,
            "alpha": self.alpha,
            "reps": self.reps,
            "rejections": self.rejections,
            "rejection_rate": self.rejection_rate,
            "mean_t_stat": self.mean_t_stat,
            "degenerate_fraction": self.degenerate_fraction,
            "failures": self.failures,
            "models": "|".join(self.models),
        }


class RejectionTable(BaseModel):
    """Rows of a sweep, ordered by scenario, beta and n."""

    rows: list[RejectionRow] = Field(default_factory=list)

    def sorted(self) -> "RejectionTable":
        return RejectionTable(rows=sorted(self.rows, key=lambda r: (r.scenario, r.beta, r.n)))

    def row(self, n: int, beta: float) -> RejectionRow:
        for candidate in self.rows:
            if candidate.n == n and candidate.beta == beta:
                return candidate
        raise KeyError((n, beta))
