"""Regression nuisances: basis expansion, ridge least squares and ridge IRLS."""

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np
import structlog
from scipy.special import expit

from .errors import DegenerateCovariate, DimensionMismatch, NoConvergence, SingularDesign
from .models import BasisKind, BasisSpec, EstimatorSettings

logger = structlog.get_logger(__name__)

PROBABILITY_CLAMP = 0.01
DEFAULT_RIDGE = 1e-8
MAX_IRLS_ITERATIONS = 100
IRLS_TOLERANCE = 1e-10


class Family(str, Enum):
    """Response families for nuisance regressions."""

    GAUSSIAN = "gaussian"
    BERNOULLI = "bernoulli"


@dataclass(frozen=True, eq=False)
class FittedRegression:
    """A fitted linear or logistic regression on an expanded design."""

    family: Family
    coefficients: np.ndarray
    basis: BasisSpec | None = None
    feature_names: tuple[str, ...] = ()
    iterations: int = 0

    def __post_init__(self) -> None:
        coefficients = np.array(self.coefficients, dtype=float).reshape(-1)
        coefficients.flags.writeable = False
        object.__setattr__(self, "coefficients", coefficients)
        if not np.all(np.isfinite(coefficients)):
            raise ValueError("regression coefficients must be finite")
        if self.feature_names and len(self.feature_names) != len(coefficients):
            raise ValueError(
                f"{len(self.feature_names)} feature names for {len(coefficients)} coefficients"
            )

    @property
    def width(self) -> int:
        return len(self.coefficients)


def _standardize(column: np.ndarray) -> np.ndarray:
    scale = column.std()
    if scale == 0.0:
        return column - column.mean()
    return (column - column.mean()) / scale


def _covariate_terms(z: np.ndarray, index: int, spec: BasisSpec) -> list[np.ndarray]:
    if spec.kind == BasisKind.LINEAR:
        return [z]
    if spec.kind == BasisKind.POLYNOMIAL:
        return [z**power for power in range(1, spec.degree + 1)]
    if np.ptp(z) == 0.0:
        raise DegenerateCovariate(index)
    k = spec.knots_per_covariate
    knots = np.quantile(z, np.arange(1, k + 1) / (k + 1))
    terms = [z, z**2, z**3]
    terms.extend(np.clip(z - knot, 0.0, None) ** 3 for knot in knots)
    return terms


def expand_basis(
    covariates: np.ndarray,
    extra_binary: Sequence[np.ndarray] = (),
    spec: BasisSpec | None = None,
) -> np.ndarray:
    """Build a nuisance design matrix.

    Columns are ordered: intercept, binary columns, per-covariate basis
    functions, then pairwise covariate products when interactions are on.
    Covariates are centred and scaled before expansion. Spline bases are
    truncated-power cubics with knots at empirical quantiles.
    """
    spec = spec or BasisSpec()
    covariates = np.asarray(covariates, dtype=float)
    n = covariates.shape[0] if covariates.ndim == 2 else len(extra_binary[0])
    if covariates.ndim != 2:
        covariates = covariates.reshape(n, -1)

    columns: list[np.ndarray] = [np.ones(n)]
    columns.extend(np.asarray(b, dtype=float) for b in extra_binary)

    standardized = [_standardize(covariates[:, j]) for j in range(covariates.shape[1])]
    for j, z in enumerate(standardized):
        columns.extend(_covariate_terms(z, j, spec))
    if spec.include_interactions:
        columns.extend(a * b for a, b in combinations(standardized, 2))
    return np.column_stack(columns)


def basis_feature_names(
    covariate_names: Sequence[str],
    binary_names: Sequence[str] = (),
    spec: BasisSpec | None = None,
) -> tuple[str, ...]:
    """Names of the columns ``expand_basis`` produces, in the same order."""
    spec = spec or BasisSpec()
    names = ["intercept", *binary_names]
    for name in covariate_names:
        if spec.kind == BasisKind.LINEAR:
            names.append(name)
        elif spec.kind == BasisKind.POLYNOMIAL:
            names.extend(name if d == 1 else f"{name}^{d}" for d in range(1, spec.degree + 1))
        else:
            names.extend([name, f"{name}^2", f"{name}^3"])
            names.extend(f"({name}-k{j})+^3" for j in range(1, spec.knots_per_covariate + 1))
    if spec.include_interactions:
        names.extend(f"{a}*{b}" for a, b in combinations(covariate_names, 2))
    return tuple(names)


def set_binary(design: np.ndarray, index: int, value: float) -> np.ndarray:
    """Copy of ``design`` with binary column ``index`` (0-based among binaries) fixed."""
    counterfactual = design.copy()
    counterfactual[:, 1 + index] = value
    return counterfactual


def _penalty(design: np.ndarray, ridge: float) -> np.ndarray:
    penalty = np.full(design.shape[1], ridge)
    if np.all(design[:, 0] == 1.0):
        penalty[0] = 0.0
    return penalty


def fit_regression(
    family: Family,
    design: np.ndarray,
    response: np.ndarray,
    ridge: float = DEFAULT_RIDGE,
    *,
    max_iterations: int = MAX_IRLS_ITERATIONS,
    tolerance: float = IRLS_TOLERANCE,
    basis: BasisSpec | None = None,
    feature_names: tuple[str, ...] = (),
) -> FittedRegression:
    """Ridge least squares (Gaussian) or ridge logistic regression via IRLS (Bernoulli).

    An all-ones first column is treated as the intercept and left unpenalized.
    """
    design = np.asarray(design, dtype=float)
    response = np.asarray(response, dtype=float)
    n, d = design.shape
    if len(response) != n:
        raise DimensionMismatch(n, len(response))
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    penalty = _penalty(design, ridge)

    if family == Family.GAUSSIAN:
        if ridge == 0.0 and np.linalg.matrix_rank(design) < d:
            raise SingularDesign(d)
        gram = design.T @ design + np.diag(penalty)
        try:
            coefficients = np.linalg.solve(gram, design.T @ response)
        except np.linalg.LinAlgError:
            raise SingularDesign(d) from None
        logger.debug("nuisance fit", family=family.value, width=d, n=n)
        return FittedRegression(family, coefficients, basis, feature_names, iterations=0)

    if not np.all((response == 0.0) | (response == 1.0)):
        raise ValueError("Bernoulli responses must be 0 or 1")

    coefficients = np.zeros(d)
    step_size = np.inf
    for iteration in range(1, max_iterations + 1):
        probabilities = expit(design @ coefficients)
        weights = probabilities * (1.0 - probabilities)
        gradient = design.T @ (response - probabilities) - penalty * coefficients
        hessian = (design.T * weights) @ design + np.diag(penalty)
        try:
            step = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError:
            raise SingularDesign(d) from None
        if not np.all(np.isfinite(step)):
            raise NoConvergence(iteration, float("inf"))
        coefficients = coefficients + step
        step_size = float(np.max(np.abs(step))) if d else 0.0
        if step_size < tolerance:
            logger.debug(
                "nuisance fit", family=family.value, width=d, n=n, iterations=iteration
            )
            return FittedRegression(family, coefficients, basis, feature_names, iteration)
    raise NoConvergence(max_iterations, step_size)


def fit_with_settings(
    family: Family,
    design: np.ndarray,
    response: np.ndarray,
    settings: EstimatorSettings,
    basis: BasisSpec | None = None,
) -> FittedRegression:
    return fit_regression(
        family,
        design,
        response,
        settings.ridge,
        max_iterations=settings.max_iterations,
        tolerance=settings.tolerance,
        basis=basis,
    )


def logistic_gradient(model: FittedRegression, design: np.ndarray, response: np.ndarray, ridge: float) -> np.ndarray:
    """Score of the penalized log-likelihood at the fitted coefficients."""
    probabilities = expit(design @ model.coefficients)
    return design.T @ (response - probabilities) - _penalty(design, ridge) * model.coefficients


def predict_batch(
    model: FittedRegression, design: np.ndarray, clamp: float = PROBABILITY_CLAMP
) -> np.ndarray:
    """Vectorized ``predict`` over the rows of ``design``."""
    design = np.atleast_2d(np.asarray(design, dtype=float))
    if design.shape[1] != model.width:
        raise DimensionMismatch(model.width, design.shape[1])
    linear = design @ model.coefficients
    if model.family == Family.GAUSSIAN:
        return linear
    return np.clip(expit(linear), clamp, 1.0 - clamp)


def predict(model: FittedRegression, design_row: np.ndarray, clamp: float = PROBABILITY_CLAMP) -> float:
    """Linear predictor (Gaussian) or clamped probability (Bernoulli) for one row."""
    row = np.asarray(design_row, dtype=float).reshape(-1)
    if len(row) != model.width:
        raise DimensionMismatch(model.width, len(row))
    return float(predict_batch(model, row.reshape(1, -1), clamp)[0])
