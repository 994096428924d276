"""Exception hierarchy for causal-evidence."""


class CausalEvidenceError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(CausalEvidenceError, ValueError):
    """Invalid configuration file or flag combination."""


# Data loading and model specs


class DataError(CausalEvidenceError, ValueError):
    """The observed dataset cannot be loaded or is invalid."""


class EmptyFile(DataError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"{path}: no header row or no data rows")


class MissingColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} not found")


class DuplicateColumn(DataError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"column {name!r} mapped to more than one role")


class NonBinaryValue(DataError):
    def __init__(self, column: str, row: int, value: object = None):
        self.column = column
        self.row = row
        self.value = value
        super().__init__(f"column {column!r} row {row}: expected 0 or 1, got {value!r}")


class MissingValue(DataError):
    def __init__(self, column: str, row: int):
        self.column = column
        self.row = row
        super().__init__(f"column {column!r} row {row}: missing value")


class NonNumericValue(DataError):
    def __init__(self, column: str, row: int, value: object = None):
        self.column = column
        self.row = row
        self.value = value
        super().__init__(f"column {column!r} row {row}: {value!r} is not a number")


class SpecError(CausalEvidenceError, ValueError):
    """A model spec is incompatible with the table it is applied to."""


class SpecRequiresMediator(SpecError):
    def __init__(self) -> None:
        super().__init__("front-door model requires a mediator column")


class SpecRequiresInstrument(SpecError):
    def __init__(self) -> None:
        super().__init__("IV model requires an instrument column")


class UnknownCovariate(SpecError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"adjustment covariate {name!r} is not in the table")


# Nuisance regressions


class NuisanceError(CausalEvidenceError, ArithmeticError):
    """A nuisance regression could not be fitted or evaluated."""


class SingularDesign(NuisanceError):
    def __init__(self, width: int):
        self.width = width
        super().__init__(f"design matrix with {width} columns is rank deficient")


class NoConvergence(NuisanceError):
    def __init__(self, iterations: int, last_step: float):
        self.iterations = iterations
        self.last_step = last_step
        super().__init__(
            f"IRLS did not converge after {iterations} iterations (last step {last_step:.3g})"
        )


class DegenerateCovariate(NuisanceError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"covariate {index} is constant; spline basis is undefined")


class DimensionMismatch(NuisanceError):
    def __init__(self, expected: int, got: int):
        self.expected = expected
        self.got = got
        super().__init__(f"design row has length {got}, model expects {expected}")


# Estimators


class EstimationError(CausalEvidenceError, ArithmeticError):
    """An estimator is undefined on the given data."""


class AllTreatedOrAllControl(EstimationError):
    def __init__(self) -> None:
        super().__init__("treatment is constant; propensity is degenerate")


class MediatorConstant(EstimationError):
    def __init__(self) -> None:
        super().__init__("mediator is constant; front-door functional is degenerate")


class InstrumentConstant(EstimationError):
    def __init__(self) -> None:
        super().__init__("instrument is constant; one instrument arm is empty")


class WeakInstrumentDegenerate(EstimationError):
    def __init__(self) -> None:
        super().__init__("treatment rate is identical in both instrument arms")


class DegenerateVariance(EstimationError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"{label}: all influence values are zero")


# Combination


class CombineError(CausalEvidenceError, ValueError):
    """Estimator outputs cannot be combined."""


class TooFewModels(CombineError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"the product test needs at least 2 models, got {k}")


class LengthMismatch(CombineError):
    def __init__(self, lengths: list[int]):
        self.lengths = lengths
        super().__init__(f"estimator outputs have different lengths: {lengths}")


class DuplicateLabel(CombineError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"duplicate estimator label {label!r}")


# Simulation


class UnknownScenario(CausalEvidenceError, KeyError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(key)

    def __str__(self) -> str:
        return f"unknown scenario {self.key!r} (see `causal-evidence scenarios`)"
