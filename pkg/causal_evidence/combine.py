"""Joint influence-function covariance and the product test of K estimators."""

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import structlog
from pydantic import BaseModel, Field
from scipy.stats import norm

from .data import ObservationTable
from .errors import DuplicateLabel, LengthMismatch, TooFewModels
from .estimators import DEFAULT_SETTINGS, EstimatorOutput, WaldInterval, estimate, wald_interval
from .models import EstimatorSettings, ModelSpec

logger = structlog.get_logger(__name__)

MEAN_ZERO_TOLERANCE = 1e-8
SYMMETRY_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class JointEstimate:
    """Stacked estimates ψₙ and the n×K matrix of influence values."""

    labels: tuple[str, ...]
    psi: np.ndarray
    if_matrix: np.ndarray

    def __post_init__(self) -> None:
        psi = np.array(self.psi, dtype=float).reshape(-1)
        matrix = np.array(self.if_matrix, dtype=float)
        psi.flags.writeable = False
        matrix.flags.writeable = False
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "if_matrix", matrix)
        if len(self.labels) < 2:
            raise TooFewModels(len(self.labels))
        if matrix.ndim != 2 or matrix.shape[1] != len(psi) or len(psi) != len(self.labels):
            raise ValueError(
                f"{len(self.labels)} labels, {len(psi)} estimates and influence matrix {matrix.shape}"
            )
        scale = np.maximum(1.0, np.max(np.abs(matrix), axis=0))
        off_centre = np.abs(matrix.mean(axis=0)) > MEAN_ZERO_TOLERANCE * scale
        if np.any(off_centre):
            bad = self.labels[int(np.flatnonzero(off_centre)[0])]
            raise ValueError(f"influence values of {bad!r} are not centred")

    @property
    def k(self) -> int:
        return len(self.psi)

    @property
    def n(self) -> int:
        return self.if_matrix.shape[0]


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    """Influence-function-based covariance Σₙ of the K estimators."""

    sigma: np.ndarray

    def __post_init__(self) -> None:
        sigma = np.array(self.sigma, dtype=float)
        sigma.flags.writeable = False
        object.__setattr__(self, "sigma", sigma)
        if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
            raise ValueError(f"sigma must be square, got shape {sigma.shape}")
        if np.any(np.abs(sigma - sigma.T) > SYMMETRY_TOLERANCE * max(1.0, np.max(np.abs(sigma)))):
            raise ValueError("sigma is not symmetric")
        if np.any(np.diag(sigma) < 0.0):
            raise ValueError("sigma has a negative diagonal entry")
        floor = -PSD_TOLERANCE * max(1.0, float(np.max(np.diag(sigma))))
        if np.min(self.eigenvalues()) < floor:
            raise ValueError("sigma is not positive semidefinite")

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.sigma)

    def condition_number(self) -> float:
        """Ratio of extreme eigenvalues; infinite when Σₙ is numerically singular."""
        values = self.eigenvalues()
        top = float(values[-1])
        bottom = float(values[0])
        if top <= 0.0 or bottom <= top * len(values) * np.finfo(float).eps:
            return float("inf")
        return top / bottom


class ProductTestResult(BaseModel):
    """Outcome of the combined test of H0: β = 0."""

    labels: list[str]
    n: int
    psi: list[float]
    product: float
    gamma: list[float]
    variance: float = Field(ge=0.0)
    t_stat: float
    p_value: float = Field(ge=0.0, le=1.0)
    reject_at: dict[float, bool]
    degenerate: bool = False
    sigma: list[list[float]]
    sigma_condition_number: float

    @property
    def k(self) -> int:
        return len(self.psi)

    def correlation(self) -> np.ndarray:
        """K×K correlation matrix of the estimators; zero-variance rows stay zero."""
        sigma = np.asarray(self.sigma)
        scale = np.sqrt(np.diag(sigma))
        outer = np.outer(scale, scale)
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.where(outer > 0.0, sigma / outer, 0.0)
        return corr

    def rejects(self, alpha: float) -> bool:
        if alpha in self.reject_at:
            return self.reject_at[alpha]
        return critical_reject(self.t_stat, alpha) and not self.degenerate


def critical_reject(t_stat: float, alpha: float) -> bool:
    """|T| > q_{1−α/2} of the standard normal."""
    return abs(t_stat) > float(norm.ppf(1.0 - alpha / 2.0))


def joint(outputs: list[EstimatorOutput]) -> JointEstimate:
    """Stack estimator outputs in input order."""
    if len(outputs) < 2:
        raise TooFewModels(len(outputs))
    lengths = [output.n for output in outputs]
    if len(set(lengths)) != 1:
        raise LengthMismatch(lengths)
    for label, count in Counter(output.label for output in outputs).items():
        if count > 1:
            raise DuplicateLabel(label)
    return JointEstimate(
        labels=tuple(output.label for output in outputs),
        psi=np.array([output.psi_hat for output in outputs]),
        if_matrix=np.column_stack([output.if_values for output in outputs]),
    )


def estimate_covariance(joint_estimate: JointEstimate) -> CovarianceEstimate:
    """Σₙ[j, k] = (1/n) Σᵢ φᵢⱼ φᵢₖ, computed on one triangle and mirrored."""
    matrix = joint_estimate.if_matrix
    k = joint_estimate.k
    sigma = np.zeros((k, k))
    for j in range(k):
        for m in range(j, k):
            sigma[j, m] = sigma[m, j] = float(np.dot(matrix[:, j], matrix[:, m])) / joint_estimate.n
    return CovarianceEstimate(sigma)


def _leave_one_out_products(psi: np.ndarray) -> np.ndarray:
    return np.array([np.prod(np.delete(psi, k)) for k in range(len(psi))])


def product_test(
    joint_estimate: JointEstimate,
    covariance: CovarianceEstimate,
    levels: Sequence[float] = (0.05,),
    degenerate_scale: float = DEFAULT_SETTINGS.degenerate_scale,
) -> ProductTestResult:
    """Studentized product statistic Tₙ = √n ∏ψ / √(γ′Σγ) and its two-sided p-value.

    A variance below ``degenerate_scale · max diag(Σ) · max(max|γ|², 1)`` is
    reported as a degenerate result with T = 0 and p = 1.
    """
    psi = joint_estimate.psi
    sigma = covariance.sigma
    product = float(np.prod(psi))
    gamma = _leave_one_out_products(psi)
    variance = max(float(gamma @ sigma @ gamma), 0.0)
    threshold = degenerate_scale * float(np.max(np.diag(sigma))) * max(float(np.max(gamma**2)), 1.0)

    degenerate = variance < threshold or variance == 0.0
    if degenerate:
        t_stat = 0.0
        p_value = 1.0
        logger.info(
            "degenerate product test", labels=list(joint_estimate.labels), variance=variance
        )
    else:
        t_stat = float(np.sqrt(joint_estimate.n) * product / np.sqrt(variance))
        p_value = float(min(1.0, 2.0 * norm.sf(abs(t_stat))))

    return ProductTestResult(
        labels=list(joint_estimate.labels),
        n=joint_estimate.n,
        psi=psi.tolist(),
        product=product,
        gamma=gamma.tolist(),
        variance=variance,
        t_stat=t_stat,
        p_value=p_value,
        reject_at={alpha: (not degenerate) and critical_reject(t_stat, alpha) for alpha in levels},
        degenerate=degenerate,
        sigma=sigma.tolist(),
        sigma_condition_number=covariance.condition_number(),
    )


class AnalysisReport(BaseModel):
    """Per-model Wald intervals plus the combined product test."""

    intervals: list[WaldInterval]
    result: ProductTestResult

    def interval_rows(self) -> list[dict[str, float | str]]:
        return [
            {
                "label": interval.label,
                "estimate": interval.estimate,
                "std_error": interval.std_error,
                "ci_lower": interval.lower,
                "ci_upper": interval.upper,
                "p_value": interval.p_value,
            }
            for interval in self.intervals
        ]

    def combined_row(self) -> dict[str, float | int | bool]:
        row: dict[str, float | int | bool] = {
            "K": self.result.k,
            "product": self.result.product,
            "variance": self.result.variance,
            "t_stat": self.result.t_stat,
            "p_value": self.result.p_value,
            "degenerate_flag": self.result.degenerate,
            "sigma_condition_number": self.result.sigma_condition_number,
        }
        for alpha, rejected in sorted(self.result.reject_at.items()):
            row[f"reject_at_{alpha:g}"] = rejected
        return row


def disambiguate(specs: list[ModelSpec]) -> list[str]:
    """Display labels, qualified by adjustment set wherever two specs collide."""
    labels = [spec.display_label() for spec in specs]
    counts = Counter(labels)
    return [
        spec.qualified_label() if counts[label] > 1 else label
        for spec, label in zip(specs, labels, strict=True)
    ]


def run_estimators(
    table: ObservationTable,
    specs: list[ModelSpec],
    settings: EstimatorSettings = DEFAULT_SETTINGS,
) -> list[EstimatorOutput]:
    """Fit every spec on ``table`` under disambiguated labels."""
    if len(specs) < 2:
        raise TooFewModels(len(specs))
    return [
        estimate(table, spec, settings).relabel(label)
        for spec, label in zip(specs, disambiguate(specs), strict=True)
    ]


def combined_test(
    outputs: list[EstimatorOutput],
    levels: Sequence[float] = (0.05,),
    settings: EstimatorSettings = DEFAULT_SETTINGS,
) -> ProductTestResult:
    joint_estimate = joint(outputs)
    return product_test(
        joint_estimate, estimate_covariance(joint_estimate), levels, settings.degenerate_scale
    )


def analyze_all(
    table: ObservationTable,
    specs: list[ModelSpec],
    levels: Sequence[float] = (0.05,),
    settings: EstimatorSettings = DEFAULT_SETTINGS,
    level: float = 0.95,
) -> AnalysisReport:
    """Fit each model, report its Wald interval, then run the product test."""
    outputs = run_estimators(table, specs, settings)
    intervals = [wald_interval(output, level) for output in outputs]
    result = combined_test(outputs, levels, settings)
    logger.info(
        "analysis complete",
        labels=result.labels,
        t_stat=result.t_stat,
        p_value=result.p_value,
        degenerate=result.degenerate,
    )
    return AnalysisReport(intervals=intervals, result=result)
