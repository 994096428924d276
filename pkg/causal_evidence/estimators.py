"""Backdoor AIPW, front-door augmented primal IPW and IV Wald estimators.

Each estimator returns its point estimate together with the estimated
centered influence value of every observation, which is what the product
test needs to build the joint covariance.
"""

from dataclasses import dataclass

import numpy as np
import structlog
from pydantic import BaseModel, Field
from scipy.stats import norm

from .data import ObservationTable, validate_spec
from .errors import (
    AllTreatedOrAllControl,
    DegenerateVariance,
    InstrumentConstant,
    MediatorConstant,
    WeakInstrumentDegenerate,
)
from .models import EstimatorSettings, ModelKind, ModelSpec
from .nuisance import Family, expand_basis, fit_with_settings, predict_batch, set_binary

logger = structlog.get_logger(__name__)

DEFAULT_SETTINGS = EstimatorSettings()


@dataclass(frozen=True, eq=False)
class EstimatorOutput:
    """Point estimate plus per-observation estimated influence values."""

    label: str
    psi_hat: float
    if_values: np.ndarray
    nuisance_report: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        values = np.array(self.if_values, dtype=float).reshape(-1)
        values.flags.writeable = False
        object.__setattr__(self, "if_values", values)
        object.__setattr__(self, "psi_hat", float(self.psi_hat))
        if not np.isfinite(self.psi_hat) or not np.all(np.isfinite(values)):
            raise ValueError(f"{self.label}: estimate and influence values must be finite")

    @property
    def n(self) -> int:
        return len(self.if_values)

    @property
    def variance(self) -> float:
        """Influence-function variance estimate, the sample mean of squared values."""
        return float(np.mean(self.if_values**2))

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.variance / self.n))

    def relabel(self, label: str) -> "EstimatorOutput":
        return EstimatorOutput(label, self.psi_hat, self.if_values, self.nuisance_report)


class WaldInterval(BaseModel):
    """Wald-style interval and two-sided p-value for one estimator."""

    label: str = ""
    estimate: float
    std_error: float = Field(gt=0.0)
    lower: float
    upper: float
    p_value: float = Field(ge=0.0, le=1.0)
    level: float = Field(gt=0.0, lt=1.0)

    @classmethod
    def from_standard_error(
        cls, estimate: float, std_error: float, level: float = 0.95, label: str = ""
    ) -> "WaldInterval":
        if not 0.0 < level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        q = float(norm.ppf(1.0 - (1.0 - level) / 2.0))
        return cls(
            label=label,
            estimate=estimate,
            std_error=std_error,
            lower=estimate - q * std_error,
            upper=estimate + q * std_error,
            p_value=float(2.0 * norm.sf(abs(estimate) / std_error)),
            level=level,
        )


def wald_interval(output: EstimatorOutput, level: float = 0.95) -> WaldInterval:
    """Interval from the influence-function-based variance estimator."""
    if output.variance == 0.0:
        raise DegenerateVariance(output.label)
    return WaldInterval.from_standard_error(output.psi_hat, output.std_error, level, output.label)


def _centered(label: str, contributions: np.ndarray, report: list[tuple[str, str]]) -> EstimatorOutput:
    psi_hat = float(np.mean(contributions))
    logger.info("estimator fitted", label=label, psi_hat=psi_hat, n=len(contributions))
    return EstimatorOutput(label, psi_hat, contributions - psi_hat, tuple(report))


def _require(spec: ModelSpec, kind: ModelKind) -> None:
    if spec.kind != kind:
        raise ValueError(f"expected a {kind.value} spec, got {spec.kind.value}")


# Backdoor


def backdoor_contributions(
    y: np.ndarray,
    a: np.ndarray,
    propensity: np.ndarray,
    outcome_observed: np.ndarray,
    outcome_treated: np.ndarray,
    outcome_control: np.ndarray,
) -> np.ndarray:
    """Uncentered AIPW contributions for already-evaluated nuisances."""
    weight = (a - propensity) / (propensity * (1.0 - propensity))
    return (y - outcome_observed) * weight + outcome_treated - outcome_control


def estimate_backdoor_aipw(
    table: ObservationTable, spec: ModelSpec, settings: EstimatorSettings = DEFAULT_SETTINGS
) -> EstimatorOutput:
    _require(spec, ModelKind.BACKDOOR)
    validate_spec(table, spec)
    y, a = table.outcome, table.treatment
    if np.all(a == a[0]):
        raise AllTreatedOrAllControl()

    covariates = table.select(spec.adjustment_covariates)
    basis = spec.basis

    propensity_model = fit_with_settings(
        Family.BERNOULLI, expand_basis(covariates, (), basis), a, settings, basis
    )
    propensity = predict_batch(
        propensity_model, expand_basis(covariates, (), basis), settings.propensity_clamp
    )

    design = expand_basis(covariates, (a,), basis)
    outcome_model = fit_with_settings(Family.GAUSSIAN, design, y, settings, basis)
    contributions = backdoor_contributions(
        y,
        a,
        propensity,
        predict_batch(outcome_model, design),
        predict_batch(outcome_model, set_binary(design, 0, 1.0)),
        predict_batch(outcome_model, set_binary(design, 0, 0.0)),
    )
    report = [("propensity", basis.label()), ("outcome_regression", basis.label())]
    return _centered(spec.display_label(), contributions, report)


# Front-door


def frontdoor_contributions(
    y: np.ndarray,
    a: np.ndarray,
    m: np.ndarray,
    propensity: np.ndarray,
    mediator_prob: np.ndarray,
    outcome_mean: np.ndarray,
    mediator_clamp: float = DEFAULT_SETTINGS.mediator_clamp,
) -> np.ndarray:
    """Uncentered front-door efficient-influence-function contributions.

    ``mediator_prob[i, a0]`` is P(M=1 | A=a0, C=c_i) and
    ``outcome_mean[i, m, a]`` is E(Y | M=m, A=a, C=c_i). γ, η and τ are exact
    sums over the binary arguments.
    """
    rows = np.arange(len(y))
    ai = a.astype(int)
    mi = m.astype(int)
    pi = propensity

    def alpha(m_values: np.ndarray, a0: np.ndarray | int) -> np.ndarray:
        p_one = mediator_prob[rows, a0]
        return np.where(m_values == 1, p_one, 1.0 - p_one)

    def eta(a0: np.ndarray | int, a_arg: np.ndarray | int) -> np.ndarray:
        p_one = mediator_prob[rows, a0]
        return outcome_mean[rows, 1, a_arg] * p_one + outcome_mean[rows, 0, a_arg] * (1.0 - p_one)

    gamma = outcome_mean[rows, mi, 1] * pi + outcome_mean[rows, mi, 0] * (1.0 - pi)
    tau = eta(ai, 1) * pi + eta(ai, 0) * (1.0 - pi)

    denominator = np.clip(alpha(mi, ai), mediator_clamp, 1.0 - mediator_clamp)
    ratio_term = (alpha(mi, 1) - alpha(mi, 0)) / denominator * (y - outcome_mean[rows, mi, ai])
    propensity_term = (a - pi) / (pi * (1.0 - pi)) * (gamma - tau)
    eta_term = eta(1, ai) - eta(0, ai)
    return ratio_term + propensity_term + eta_term


def estimate_frontdoor_apipw(
    table: ObservationTable, spec: ModelSpec, settings: EstimatorSettings = DEFAULT_SETTINGS
) -> EstimatorOutput:
    _require(spec, ModelKind.FRONTDOOR)
    validate_spec(table, spec)
    y, a, m = table.outcome, table.treatment, table.mediator
    assert m is not None
    if np.all(a == a[0]):
        raise AllTreatedOrAllControl()
    if np.all(m == m[0]):
        raise MediatorConstant()

    covariates = table.select(spec.adjustment_covariates)
    basis = spec.basis
    clamp = settings.propensity_clamp

    base = expand_basis(covariates, (), basis)
    propensity_model = fit_with_settings(Family.BERNOULLI, base, a, settings, basis)
    propensity = predict_batch(propensity_model, base, clamp)

    mediator_design = expand_basis(covariates, (a,), basis)
    mediator_model = fit_with_settings(Family.BERNOULLI, mediator_design, m, settings, basis)
    mediator_prob = np.column_stack(
        [predict_batch(mediator_model, set_binary(mediator_design, 0, a0), clamp) for a0 in (0.0, 1.0)]
    )

    outcome_design = expand_basis(covariates, (m, a), basis)
    outcome_model = fit_with_settings(Family.GAUSSIAN, outcome_design, y, settings, basis)
    outcome_mean = np.empty((len(y), 2, 2))
    for m_value in (0, 1):
        fixed_m = set_binary(outcome_design, 0, float(m_value))
        for a_value in (0, 1):
            outcome_mean[:, m_value, a_value] = predict_batch(
                outcome_model, set_binary(fixed_m, 1, float(a_value))
            )

    contributions = frontdoor_contributions(
        y, a, m, propensity, mediator_prob, outcome_mean, settings.mediator_clamp
    )
    report = [
        ("propensity", basis.label()),
        ("mediator_law", basis.label()),
        ("outcome_regression", basis.label()),
    ]
    return _centered(spec.display_label(), contributions, report)


# Instrumental variable


def estimate_iv_wald(
    table: ObservationTable,
    spec: ModelSpec,
    settings: EstimatorSettings = DEFAULT_SETTINGS,
) -> EstimatorOutput:
    """Unconditional Wald ratio with its plug-in efficient influence function."""
    _require(spec, ModelKind.IV)
    validate_spec(table, spec)
    y, a, z = table.outcome, table.treatment, table.instrument
    assert z is not None
    treated_arm = z == 1.0
    if treated_arm.all() or not treated_arm.any():
        raise InstrumentConstant()

    mu1, mu0 = y[treated_arm].mean(), y[~treated_arm].mean()
    pi1, pi0 = a[treated_arm].mean(), a[~treated_arm].mean()
    if pi1 == pi0:
        raise WeakInstrumentDegenerate()
    zeta = z.mean()
    first_stage = pi1 - pi0
    psi_hat = (mu1 - mu0) / first_stage

    mu_z = np.where(treated_arm, mu1, mu0)
    pi_z = np.where(treated_arm, pi1, pi0)
    arm_weight = z / zeta - (1.0 - z) / (1.0 - zeta)
    if_values = (
        ((y - mu_z) * first_stage - (a - pi_z) * (mu1 - mu0)) * arm_weight / first_stage**2
    )
    logger.info("estimator fitted", label=spec.display_label(), psi_hat=psi_hat, n=len(y))
    return EstimatorOutput(spec.display_label(), psi_hat, if_values, (("arm_means", "empirical"),))


ESTIMATORS = {
    ModelKind.BACKDOOR: estimate_backdoor_aipw,
    ModelKind.FRONTDOOR: estimate_frontdoor_apipw,
    ModelKind.IV: estimate_iv_wald,
}


def estimate(
    table: ObservationTable, spec: ModelSpec, settings: EstimatorSettings = DEFAULT_SETTINGS
) -> EstimatorOutput:
    """Run the estimator matching ``spec.kind``."""
    return ESTIMATORS[spec.kind](table, spec, settings)
