"""Registry of simulation data-generating processes.

Every sampler draws the variables in a fixed order from the generator it is
handed, so a seed pins the whole table. Samplers accept ``treat`` to evaluate
the same draw under an intervention that sets A for every row; Bernoulli and
Gaussian draws consume random numbers independently of their parameters, so
interventional draws share noise with the observational one.

Letters in keys name the invalid model(s): b = backdoor, f = front-door,
i = IV. All uniforms are on (-2, 2) unless stated otherwise.
"""

import re
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import expit

from .data import ObservationTable
from .errors import UnknownScenario
from .models import ColumnMapping, ModelKind, ModelSpec

BASE_COVARIATES = ("c1", "c2", "c3", "c4")
COLLIDER_COVARIATES = (*BASE_COVARIATES, "c5")


class ScenarioFamily(str, Enum):
    """Which candidate models a scenario is built to combine."""

    BFI = "BFI"
    BF = "BF"
    BI = "BI"
    FI = "FI"
    MBD = "MBD"
    FAITH = "FAITH"


class WrongFunctional(str, Enum):
    """Value of the identified functional of the invalid model(s)."""

    NONE = "none"
    ZERO = "zero"
    NONZERO = "nonzero"
    MIXED = "zero under the null, nonzero under the alternative"


FAMILY_MODELS = {
    ScenarioFamily.BFI: (ModelKind.BACKDOOR, ModelKind.FRONTDOOR, ModelKind.IV),
    ScenarioFamily.BF: (ModelKind.BACKDOOR, ModelKind.FRONTDOOR),
    ScenarioFamily.BI: (ModelKind.BACKDOOR, ModelKind.IV),
    ScenarioFamily.FI: (ModelKind.FRONTDOOR, ModelKind.IV),
    ScenarioFamily.MBD: (ModelKind.BACKDOOR,),
    ScenarioFamily.FAITH: (ModelKind.BACKDOOR,),
}


@dataclass(frozen=True, eq=False)
class ScenarioDraw:
    """Full internal state of one draw; ``table`` is the observed part."""

    table: ObservationTable
    u: np.ndarray
    v: np.ndarray | None = None
    abar1: np.ndarray | None = None
    abar0: np.ndarray | None = None
    a1: np.ndarray | None = None
    a0: np.ndarray | None = None

    def defier_fraction(self, converted: bool = True) -> float:
        """Share of rows with A(0)=1, A(1)=0 after (or before) defier conversion."""
        a1, a0 = (self.a1, self.a0) if converted else (self.abar1, self.abar0)
        if a1 is None or a0 is None:
            return 0.0
        return float(np.mean((a0 == 1.0) & (a1 == 0.0)))


Sampler = Callable[[np.random.Generator, int, float, float | None], ScenarioDraw]


@dataclass(frozen=True)
class Scenario:
    key: str
    family: ScenarioFamily
    description: str
    source: str
    valid_models: tuple[str, ...]
    wrong_functional: WrongFunctional
    sampler: Sampler = field(repr=False)
    model_specs: tuple[ModelSpec, ...] = ()
    demonstration: bool = False

    def draw(self, rng: np.random.Generator, n: int, beta: float, treat: float | None = None) -> ScenarioDraw:
        return self.sampler(rng, n, beta, treat)

    def specs_for(self, kinds: list[ModelKind] | None = None) -> list[ModelSpec]:
        """Default specs, optionally restricted to the given model kinds."""
        if kinds is None:
            return list(self.model_specs)
        return [spec for spec in self.model_specs if spec.kind in kinds]


SCENARIOS: dict[str, Scenario] = {}


def _default_specs(family: ScenarioFamily, backdoor_adjustment: tuple[str, ...]) -> tuple[ModelSpec, ...]:
    specs = []
    for kind in FAMILY_MODELS[family]:
        if kind == ModelKind.BACKDOOR:
            specs.append(ModelSpec(kind=kind, adjustment_covariates=backdoor_adjustment))
        elif kind == ModelKind.FRONTDOOR:
            specs.append(ModelSpec(kind=kind, adjustment_covariates=BASE_COVARIATES))
        else:
            specs.append(ModelSpec(kind=kind))
    return tuple(specs)


def scenario(
    key: str,
    family: ScenarioFamily,
    description: str,
    valid: str,
    wrong: WrongFunctional = WrongFunctional.NONE,
    *,
    backdoor_adjustment: tuple[str, ...] = BASE_COVARIATES,
    specs: tuple[ModelSpec, ...] | None = None,
    source: str = "",
    demonstration: bool = False,
) -> Callable[[Sampler], Sampler]:
    """Register a sampler under ``key``."""

    def register(sampler: Sampler) -> Sampler:
        SCENARIOS[key] = Scenario(
            key=key,
            family=family,
            description=description,
            source=source or f"{family.value} simulation study",
            valid_models=tuple(re.split(r",(?![^\[]*\])", valid)) if valid else (),
            wrong_functional=wrong,
            sampler=sampler,
            model_specs=specs if specs is not None else _default_specs(family, backdoor_adjustment),
            demonstration=demonstration,
        )
        return sampler

    return register


def get_scenario(key: str) -> Scenario:
    try:
        return SCENARIOS[key]
    except KeyError:
        raise UnknownScenario(key) from None


# Shared building blocks


def _bern(rng: np.random.Generator, p: np.ndarray) -> np.ndarray:
    return (rng.random(len(p)) < p).astype(float)


def _normal(rng: np.random.Generator, mean: np.ndarray) -> np.ndarray:
    return mean + rng.standard_normal(len(mean))


def _treated(natural: np.ndarray, treat: float | None) -> np.ndarray:
    return natural if treat is None else np.full(len(natural), float(treat))


@dataclass
class _Prefix:
    u: np.ndarray
    c: np.ndarray
    z: np.ndarray | None = None
    v: np.ndarray | None = None

    @property
    def c1(self) -> np.ndarray:
        return self.c[:, 0]

    @property
    def c2(self) -> np.ndarray:
        return self.c[:, 1]

    @property
    def c3(self) -> np.ndarray:
        return self.c[:, 2]

    @property
    def c4(self) -> np.ndarray:
        return self.c[:, 3]

    def signal(self) -> np.ndarray:
        """2√|C1| + sin(C4), the covariate part of most outcome equations."""
        return 2.0 * np.sqrt(np.abs(self.c1)) + np.sin(self.c4)


def _prefix(
    rng: np.random.Generator,
    n: int,
    *,
    instrument: bool = True,
    with_v: bool = False,
    z_prob: Callable[[np.ndarray], np.ndarray] | None = None,
) -> _Prefix:
    u = rng.uniform(-2.0, 2.0, n)
    c = rng.uniform(-2.0, 2.0, (n, 4))
    v = rng.uniform(-2.0, 2.0, n) if with_v else None
    z = None
    if instrument:
        z = _bern(rng, z_prob(u) if z_prob else np.full(n, 0.5))
    return _Prefix(u=u, c=c, z=z, v=v)


def _pi(x: _Prefix, shift: np.ndarray | float = 0.0) -> np.ndarray:
    """π = expit{c1 + expit(c2) + sin(c3) + shift}."""
    return expit(x.c1 + expit(x.c2) + np.sin(x.c3) + shift)


@dataclass
class _Potential:
    abar1: np.ndarray
    abar0: np.ndarray
    a1: np.ndarray
    a0: np.ndarray

    def observed(self, z: np.ndarray) -> np.ndarray:
        return np.where(z == 1.0, self.a1, self.a0)

    def complier(self) -> np.ndarray:
        return (self.a0 < self.a1).astype(float)

    def defier(self) -> np.ndarray:
        return (self.a0 > self.a1).astype(float)


def _potential(rng: np.random.Generator, p1: np.ndarray, p0: np.ndarray, convert: bool = True) -> _Potential:
    """Ā(1) ~ Bern(p1), Ā(0) ~ Bern(p0); defiers become compliers when ``convert``."""
    abar1 = _bern(rng, p1)
    abar0 = _bern(rng, p0)
    if not convert:
        return _Potential(abar1, abar0, abar1, abar0)
    defier = (abar1 == 0.0) & (abar0 == 1.0)
    return _Potential(abar1, abar0, np.where(defier, 1.0, abar1), np.where(defier, 0.0, abar0))


def _table(
    x: _Prefix,
    a: np.ndarray,
    y: np.ndarray,
    *,
    m: np.ndarray | None = None,
    extra: dict[str, np.ndarray] | None = None,
    instrument: bool = True,
) -> ObservationTable:
    extra = extra or {}
    names = [*BASE_COVARIATES, *extra]
    covariates = np.column_stack([x.c, *extra.values()]) if extra else x.c
    mapping = ColumnMapping(
        outcome_name="y",
        treatment_name="a",
        instrument_name="z" if instrument else None,
        mediator_name="m" if m is not None else None,
        covariate_names=names,
    )
    return ObservationTable(
        outcome=y,
        treatment=a,
        covariates=covariates,
        mapping=mapping,
        instrument=x.z if instrument else None,
        mediator=m,
    )


def _iv_draw(x: _Prefix, table: ObservationTable, pot: _Potential) -> ScenarioDraw:
    return ScenarioDraw(
        table=table, u=x.u, v=x.v, abar1=pot.abar1, abar0=pot.abar0, a1=pot.a1, a0=pot.a0
    )


def _mediator(rng: np.random.Generator, x: _Prefix, a: np.ndarray, slope: float, shift: np.ndarray | float = 0.0) -> np.ndarray:
    """M ~ Bern(expit{slope·A − 1 + C2 + shift})."""
    return _bern(rng, expit(slope * a - 1.0 + x.c2 + shift))


# Backdoor + front-door + IV


def _bfi(
    rng: np.random.Generator,
    n: int,
    beta: float,
    treat: float | None,
    *,
    pi_shift: Callable[[_Prefix], np.ndarray | float] = lambda x: 0.0,
    m_slope: float = 5.0,
    m_shift: Callable[[_Prefix], np.ndarray | float] = lambda x: 0.0,
    u_coef: float = 3.0,
    z_coef: float = 0.0,
    direct: bool = False,
) -> ScenarioDraw:
    x = _prefix(rng, n)
    pi = _pi(x, pi_shift(x))
    pot = _potential(rng, pi, 1.0 - pi)
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, m_slope, m_shift(x))
    cause = a if direct else m
    y = _normal(rng, beta * cause + u_coef * x.u + x.signal() + z_coef * x.z)
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario("BFI-a", ScenarioFamily.BFI, "all three models valid", "backdoor,frontdoor,iv")
def bfi_all_valid(rng, n, beta, treat=None):
    """U, C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5); π = expit{c1 + expit(c2) + sin(c3)};
    Ā(1) ~ Bern(π), Ā(0) ~ Bern(1 − π), defiers converted to compliers, A = A(Z);
    M ~ Bern(expit{5A − 1 + C2}); Y ~ N(βM + 3U + 2√|C1| + sin(C4), 1)."""
    return _bfi(rng, n, beta, treat)


@scenario(
    "BFI-b-nonzero",
    ScenarioFamily.BFI,
    "backdoor confounded by U; identified backdoor functional nonzero",
    "frontdoor,iv",
    WrongFunctional.NONZERO,
)
def bfi_backdoor_nonzero(rng, n, beta, treat=None):
    """As BFI-a with π = expit{c1 + expit(c2) + sin(c3) + u}."""
    return _bfi(rng, n, beta, treat, pi_shift=lambda x: x.u)


@scenario(
    "BFI-b-zero-null",
    ScenarioFamily.BFI,
    "backdoor confounded by U; backdoor functional zero under the null",
    "frontdoor,iv",
    WrongFunctional.ZERO,
)
def bfi_backdoor_zero_null(rng, n, beta, treat=None):
    """As BFI-a with π = expit{c1 + expit(c2) + sin(c3) − u};
    Y ~ N(βM + U + 2√|C1| + sin(C4), 1)."""
    return _bfi(rng, n, beta, treat, pi_shift=lambda x: -x.u, u_coef=1.0)


@scenario(
    "BFI-b-zero-alt",
    ScenarioFamily.BFI,
    "backdoor confounded by U; backdoor functional near zero under the alternative",
    "frontdoor,iv",
    WrongFunctional.ZERO,
)
def bfi_backdoor_zero_alt(rng, n, beta, treat=None):
    """As BFI-a with π(c1, c2, z, u) = expit{−0.5 + 5z + c1 + expit(c2) − 0.97u};
    M ~ Bern(expit{2A − 1 + C2}); Y ~ N(βM + 5U − 2√|C1| + sin(C4), 1).

    π takes z here, so Ā(1) uses π at z = 1 and Ā(0) uses 1 − π at z = 0.
    The −0.97 coefficient only approximately cancels the backdoor functional.
    """
    x = _prefix(rng, n)

    def pi(z: float) -> np.ndarray:
        return expit(-0.5 + 5.0 * z + x.c1 + expit(x.c2) - 0.97 * x.u)

    pot = _potential(rng, pi(1.0), 1.0 - pi(0.0))
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, 2.0)
    y = _normal(rng, beta * m + 5.0 * x.u - 2.0 * np.sqrt(np.abs(x.c1)) + np.sin(x.c4))
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario(
    "BFI-i-exclusion",
    ScenarioFamily.BFI,
    "IV exclusion violated by a direct Z→Y effect",
    "backdoor,frontdoor",
    WrongFunctional.NONZERO,
    backdoor_adjustment=(*BASE_COVARIATES, "z"),
)
def bfi_iv_exclusion(rng, n, beta, treat=None):
    """As BFI-a with Y ~ N(βM + U + 2√|C1| + sin(C4) + 2Z, 1).
    The backdoor adjustment set includes Z."""
    return _bfi(rng, n, beta, treat, u_coef=1.0, z_coef=2.0)


def _bfi_monotonicity(rng, n, beta, treat, alpha1: float, alpha2: float) -> ScenarioDraw:
    """Shared form of the BFI monotonicity violations.

    π as in BFI-a; A(1) ~ Bern(π), A(0) ~ Bern(1 − π) with no defier
    conversion; A = A(Z); M ~ Bern(expit{α1·A + α2·I{A(0) < A(1)}·A − 1 + C2});
    Y ~ N(βM + U + 2√|C1| + sin(C4), 1).
    """
    x = _prefix(rng, n)
    pi = _pi(x)
    pot = _potential(rng, pi, 1.0 - pi, convert=False)
    a = _treated(pot.observed(x.z), treat)
    m = _bern(rng, expit(alpha1 * a + alpha2 * pot.complier() * a - 1.0 + x.c2))
    y = _normal(rng, beta * m + x.u + x.signal())
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario(
    "BFI-monotonicity-null",
    ScenarioFamily.BFI,
    "IV monotonicity violated (α1=5, α2=−3); IV functional zero under the null",
    "backdoor,frontdoor",
    WrongFunctional.ZERO,
)
def bfi_monotonicity_null(rng, n, beta, treat=None):
    """BFI monotonicity violation with α1 = 5, α2 = −3."""
    return _bfi_monotonicity(rng, n, beta, treat, 5.0, -3.0)


@scenario(
    "BFI-monotonicity-zero-alt",
    ScenarioFamily.BFI,
    "IV monotonicity violated (α1=5, α2=−2.838); IV functional near zero under the alternative",
    "backdoor,frontdoor",
    WrongFunctional.ZERO,
)
def bfi_monotonicity_zero_alt(rng, n, beta, treat=None):
    """BFI monotonicity violation with α1 = 5, α2 = −2.838."""
    return _bfi_monotonicity(rng, n, beta, treat, 5.0, -2.838)


@scenario(
    "BFI-monotonicity-nonzero-alt",
    ScenarioFamily.BFI,
    "IV monotonicity violated (α1=2, α2=3); IV functional nonzero under the alternative",
    "backdoor,frontdoor",
    WrongFunctional.NONZERO,
)
def bfi_monotonicity_nonzero_alt(rng, n, beta, treat=None):
    """BFI monotonicity violation with α1 = 2, α2 = 3."""
    return _bfi_monotonicity(rng, n, beta, treat, 2.0, 3.0)


@scenario(
    "BFI-bi-confounded",
    ScenarioFamily.BFI,
    "backdoor confounded by V and instrument confounded by U",
    "frontdoor",
    WrongFunctional.NONZERO,
)
def bfi_backdoor_iv_confounded(rng, n, beta, treat=None):
    """As BFI-a plus V ~ Unif(−2,2), with Z ~ Bern(expit{2 + 2U});
    π = expit{c1 + expit(c2) + sin(c3) + v}; M ~ Bern(expit{2A − 1 + C2});
    Y ~ N(βM + 2U + V + 2√|C1| + sin(C4), 1)."""
    x = _prefix(rng, n, with_v=True, z_prob=lambda u: expit(2.0 + 2.0 * u))
    pi = _pi(x, x.v)
    pot = _potential(rng, pi, 1.0 - pi)
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, 2.0)
    y = _normal(rng, beta * m + 2.0 * x.u + x.v + x.signal())
    return _iv_draw(x, _table(x, a, y, m=m), pot)


def _bfi_bi_monotonicity(rng, n, beta, treat, alpha1: float, alpha2: float) -> ScenarioDraw:
    """π = expit{c1 + expit(c2) + sin(c3) + u}; A(1) ~ Bern(π), A(0) ~ Bern(1 − π)
    with no defier conversion; M ~ Bern(expit{α1·A + α2·I{A(0) < A(1)}·A − 1 + C2});
    Y ~ N(βM + U + 2√|C1| + sin(C4), 1)."""
    x = _prefix(rng, n)
    pi = _pi(x, x.u)
    pot = _potential(rng, pi, 1.0 - pi, convert=False)
    a = _treated(pot.observed(x.z), treat)
    m = _bern(rng, expit(alpha1 * a + alpha2 * pot.complier() * a - 1.0 + x.c2))
    y = _normal(rng, beta * m + x.u + x.signal())
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario(
    "BFI-bi-monotonicity-null",
    ScenarioFamily.BFI,
    "backdoor confounded by U and IV monotonicity violated (α1=5, α2=−3)",
    "frontdoor",
    WrongFunctional.ZERO,
)
def bfi_backdoor_iv_monotonicity_null(rng, n, beta, treat=None):
    """Backdoor and IV invalid with α1 = 5, α2 = −3."""
    return _bfi_bi_monotonicity(rng, n, beta, treat, 5.0, -3.0)


@scenario(
    "BFI-bi-monotonicity-zero-alt",
    ScenarioFamily.BFI,
    "backdoor confounded by U and IV monotonicity violated (α1=5, α2=−2.63)",
    "frontdoor",
    WrongFunctional.ZERO,
)
def bfi_backdoor_iv_monotonicity_zero_alt(rng, n, beta, treat=None):
    """Backdoor and IV invalid with α1 = 5, α2 = −2.63."""
    return _bfi_bi_monotonicity(rng, n, beta, treat, 5.0, -2.63)


@scenario(
    "BFI-bi-exclusion",
    ScenarioFamily.BFI,
    "Z affects Y directly, opening a backdoor path through Z and breaking IV exclusion",
    "frontdoor",
    WrongFunctional.NONZERO,
)
def bfi_backdoor_iv_exclusion(rng, n, beta, treat=None):
    """As BFI-a with M ~ Bern(expit{2A − 1 + C2});
    Y ~ N(βM + 3U + 2√|C1| + sin(C4) + 2Z, 1). Z is left out of the backdoor set."""
    return _bfi(rng, n, beta, treat, m_slope=2.0, z_coef=2.0)


@scenario(
    "BFI-f-direct",
    ScenarioFamily.BFI,
    "front-door invalid through a direct A→Y effect",
    "backdoor,iv",
    WrongFunctional.ZERO,
)
def bfi_frontdoor_direct(rng, n, beta, treat=None):
    """As BFI-a with Y ~ N(βA + 3U + 2√|C1| + sin(C4), 1)."""
    return _bfi(rng, n, beta, treat, direct=True)


@scenario(
    "BFI-f-confounded",
    ScenarioFamily.BFI,
    "front-door invalid through U confounding M and Y",
    "backdoor,iv",
    WrongFunctional.NONZERO,
)
def bfi_frontdoor_confounded(rng, n, beta, treat=None):
    """As BFI-a with M ~ Bern(expit{3A − 1 + C2 + U})."""
    return _bfi(rng, n, beta, treat, m_slope=3.0, m_shift=lambda x: x.u)


@scenario(
    "BFI-bf-collider-nonzero",
    ScenarioFamily.BFI,
    "backdoor adjusts for collider C5; front-door confounded by U",
    "iv",
    WrongFunctional.NONZERO,
    backdoor_adjustment=COLLIDER_COVARIATES,
)
def bfi_backdoor_frontdoor_collider_nonzero(rng, n, beta, treat=None):
    """As BFI-a with π = expit{c4 + expit(c2) + sin(c3)};
    M ~ Bern(expit{5A − 1 + C2 + 2U}); Y ~ N(βM + U + sin(C4), 1);
    C5 ~ N(3A − Y, 1)."""
    x = _prefix(rng, n)
    pi = expit(x.c4 + expit(x.c2) + np.sin(x.c3))
    pot = _potential(rng, pi, 1.0 - pi)
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, 5.0, 2.0 * x.u)
    y = _normal(rng, beta * m + x.u + np.sin(x.c4))
    c5 = _normal(rng, 3.0 * a - y)
    return _iv_draw(x, _table(x, a, y, m=m, extra={"c5": c5}), pot)


@scenario(
    "BFI-bf-confounded",
    ScenarioFamily.BFI,
    "U confounds both A–Y and M–Y",
    "iv",
    WrongFunctional.MIXED,
)
def bfi_backdoor_frontdoor_confounded(rng, n, beta, treat=None):
    """As BFI-a with π = expit{c1 + expit(c2) + sin(c3) + u};
    M ~ Bern(expit{3A − 1 + C2 + U})."""
    return _bfi(rng, n, beta, treat, pi_shift=lambda x: x.u, m_slope=3.0, m_shift=lambda x: x.u)


@scenario(
    "BFI-bf-collider-zero",
    ScenarioFamily.BFI,
    "backdoor adjusts for collider C5; front-door confounded by U through A",
    "iv",
    WrongFunctional.ZERO,
    backdoor_adjustment=COLLIDER_COVARIATES,
)
def bfi_backdoor_frontdoor_collider_zero(rng, n, beta, treat=None):
    """As BFI-a with π = expit{c4 + sin(c3) − u}; M ~ Bern(expit{5A − 1 + C2 − 2U});
    Y ~ N(βM − 5 sin(C4), 1); C5 ~ N(−2A − 5Y, 1)."""
    x = _prefix(rng, n)
    pi = expit(x.c4 + np.sin(x.c3) - x.u)
    pot = _potential(rng, pi, 1.0 - pi)
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, 5.0, -2.0 * x.u)
    y = _normal(rng, beta * m - 5.0 * np.sin(x.c4))
    c5 = _normal(rng, -2.0 * a - 5.0 * y)
    return _iv_draw(x, _table(x, a, y, m=m, extra={"c5": c5}), pot)


@scenario(
    "BFI-fi-exclusion",
    ScenarioFamily.BFI,
    "front-door confounded by U; IV exclusion violated by Z→Y",
    "backdoor",
    WrongFunctional.NONZERO,
    backdoor_adjustment=(*BASE_COVARIATES, "z"),
)
def bfi_frontdoor_iv_exclusion(rng, n, beta, treat=None):
    """As BFI-a with M ~ Bern(expit{2A − 1 + C2 + U});
    Y ~ N(βM − 3U + 2√|C1| + sin(C4) + 2Z, 1). The backdoor set includes Z."""
    return _bfi(rng, n, beta, treat, m_slope=2.0, m_shift=lambda x: x.u, u_coef=-3.0, z_coef=2.0)


def _bfi_fi_monotonicity(rng, n, beta, treat, complier_slope, other_slope, m_shift_u, direct, u_coef):
    x = _prefix(rng, n)
    pi = _pi(x)
    pot = _potential(rng, pi, 1.0 - pi, convert=False)
    a = _treated(pot.observed(x.z), treat)
    slope = np.where(pot.complier() == 1.0, complier_slope, other_slope)
    m = _bern(rng, expit(slope * a - 1.0 + x.c2 + m_shift_u * x.u))
    y = _normal(rng, beta * (a if direct else m) + u_coef * x.u + x.signal())
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario(
    "BFI-fi-monotonicity-confounded",
    ScenarioFamily.BFI,
    "front-door confounded by U; IV monotonicity violated",
    "backdoor",
    WrongFunctional.MIXED,
)
def bfi_frontdoor_iv_monotonicity_confounded(rng, n, beta, treat=None):
    """π as in BFI-a; A(1) ~ Bern(π), A(0) ~ Bern(1 − π), no conversion;
    M ~ I{A(0) < A(1)} Bern(expit{5A − 1 + C2 + U}) + I{A(0) ≥ A(1)} Bern(expit{2A − 1 + C2 + U});
    Y ~ N(βM − 3U + 2√|C1| + sin(C4), 1)."""
    return _bfi_fi_monotonicity(rng, n, beta, treat, 5.0, 2.0, 1.0, False, -3.0)


@scenario(
    "BFI-fi-monotonicity-direct",
    ScenarioFamily.BFI,
    "front-door invalid through A→Y; IV monotonicity violated",
    "backdoor",
    WrongFunctional.ZERO,
)
def bfi_frontdoor_iv_monotonicity_direct(rng, n, beta, treat=None):
    """π as in BFI-a; A(1) ~ Bern(π), A(0) ~ Bern(1 − π), no conversion;
    M ~ I{A(0) < A(1)} Bern(expit{2A − 1 + C2}) + I{A(0) ≥ A(1)} Bern(expit{5A − 1 + C2});
    Y ~ N(βA + 3U + 2√|C1| + sin(C4), 1)."""
    return _bfi_fi_monotonicity(rng, n, beta, treat, 2.0, 5.0, 0.0, True, 3.0)


# Backdoor + front-door


def _bf(
    rng: np.random.Generator,
    n: int,
    beta: float,
    treat: float | None,
    *,
    a_index: Callable[[_Prefix], np.ndarray],
    m_slope: float = 2.0,
    m_shift: Callable[[_Prefix], np.ndarray | float] = lambda x: 0.0,
    u_coef: float = 2.0,
    direct: bool = False,
) -> ScenarioDraw:
    x = _prefix(rng, n, instrument=False)
    a = _treated(_bern(rng, expit(a_index(x))), treat)
    m = _mediator(rng, x, a, m_slope, m_shift(x))
    y = _normal(rng, beta * (a if direct else m) + u_coef * x.u + x.signal())
    return ScenarioDraw(table=_table(x, a, y, m=m, instrument=False), u=x.u)


def _bf_index(x: _Prefix) -> np.ndarray:
    return x.c1 + expit(x.c2) + np.sin(x.c3)


@scenario("BF-a", ScenarioFamily.BF, "backdoor and front-door valid", "backdoor,frontdoor")
def bf_all_valid(rng, n, beta, treat=None):
    """U, C1..C4 ~ Unif(-2,2); A ~ Bern(expit{C1 + expit(C2) + sin(C3)});
    M ~ Bern(expit{2A − 1 + C2}); Y ~ N(βM + 2U + 2√|C1| + sin(C4), 1)."""
    return _bf(rng, n, beta, treat, a_index=_bf_index)


@scenario(
    "BF-b-nonzero",
    ScenarioFamily.BF,
    "backdoor confounded by U; backdoor functional nonzero",
    "frontdoor",
    WrongFunctional.NONZERO,
)
def bf_backdoor_nonzero(rng, n, beta, treat=None):
    """As BF-a with A ~ Bern(expit{C1 + expit(C2) + sin(C3) + U})."""
    return _bf(rng, n, beta, treat, a_index=lambda x: _bf_index(x) + x.u)


@scenario(
    "BF-b-zero-null",
    ScenarioFamily.BF,
    "backdoor weakly confounded by U; backdoor functional near zero under the null",
    "frontdoor",
    WrongFunctional.ZERO,
)
def bf_backdoor_zero_null(rng, n, beta, treat=None):
    """As BF-a with A ~ Bern(expit{C1 + expit(C2) + sin(C3) − 0.05U});
    M ~ Bern(expit{5A − 1 + C2}); Y ~ N(βM + 0.05U + 2√|C1| + sin(C4), 1)."""
    return _bf(rng, n, beta, treat, a_index=lambda x: _bf_index(x) - 0.05 * x.u, m_slope=5.0, u_coef=0.05)


@scenario(
    "BF-b-zero-alt",
    ScenarioFamily.BF,
    "backdoor confounded by U; backdoor functional near zero under the alternative",
    "frontdoor",
    WrongFunctional.ZERO,
)
def bf_backdoor_zero_alt(rng, n, beta, treat=None):
    """As BF-a with A ~ Bern(expit{C1 − expit(C2) − sin(C3) + 0.6U});
    M ~ Bern(expit{0.37A − 1 + C2}); Y ~ N(βM − 0.9U + 2√|C1| + sin(C4), 1)."""
    return _bf(
        rng,
        n,
        beta,
        treat,
        a_index=lambda x: x.c1 - expit(x.c2) - np.sin(x.c3) + 0.6 * x.u,
        m_slope=0.37,
        u_coef=-0.9,
    )


@scenario(
    "BF-f-direct",
    ScenarioFamily.BF,
    "front-door invalid through a direct A→Y effect",
    "backdoor",
    WrongFunctional.ZERO,
)
def bf_frontdoor_direct(rng, n, beta, treat=None):
    """As BF-a with Y ~ N(βA + 2U + 2√|C1| + sin(C4), 1)."""
    return _bf(rng, n, beta, treat, a_index=_bf_index, direct=True)


@scenario(
    "BF-f-confounded",
    ScenarioFamily.BF,
    "front-door invalid through U confounding M and Y",
    "backdoor",
    WrongFunctional.NONZERO,
)
def bf_frontdoor_confounded(rng, n, beta, treat=None):
    """As BF-a with M ~ Bern(expit{2A − 1 + C2 + U})."""
    return _bf(rng, n, beta, treat, a_index=_bf_index, m_shift=lambda x: x.u)


# Backdoor + IV


def _bi(
    rng: np.random.Generator,
    n: int,
    beta: float,
    treat: float | None,
    *,
    pi_index: Callable[[_Prefix], np.ndarray] | None = None,
    outcome: Callable[[_Prefix, np.ndarray, _Potential], np.ndarray] | None = None,
    collider: tuple[float, float] | None = None,
    convert: bool = True,
) -> ScenarioDraw:
    x = _prefix(rng, n)
    pi = expit(pi_index(x)) if pi_index else _pi(x)
    pot = _potential(rng, pi, 1.0 - pi, convert=convert)
    a = _treated(pot.observed(x.z), treat)
    if outcome is None:
        mean = beta * a + 2.0 * x.u + x.signal()
    else:
        mean = outcome(x, a, pot)
    y = _normal(rng, mean)
    extra = None
    if collider is not None:
        a_coef, y_coef = collider
        extra = {"c5": _normal(rng, a_coef * a + y_coef * y)}
    return _iv_draw(x, _table(x, a, y, extra=extra), pot)


def _collider_index(x: _Prefix) -> np.ndarray:
    return x.c4 + expit(x.c2) + np.sin(x.c3)


@scenario("BI-a", ScenarioFamily.BI, "backdoor and IV valid", "backdoor,iv")
def bi_all_valid(rng, n, beta, treat=None):
    """U, C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5); π = expit{c1 + expit(c2) + sin(c3)};
    Ā(1) ~ Bern(π), Ā(0) ~ Bern(1 − π), defiers converted; A = A(Z);
    Y ~ N(βA + 2U + 2√|C1| + sin(C4), 1)."""
    return _bi(rng, n, beta, treat)


@scenario(
    "BI-b-confounded",
    ScenarioFamily.BI,
    "backdoor confounded by U",
    "iv",
    WrongFunctional.ZERO,
)
def bi_backdoor_confounded(rng, n, beta, treat=None):
    """As BI-a with π = expit{c1 + expit(c2) + sin(c3) + u}."""
    return _bi(rng, n, beta, treat, pi_index=lambda x: x.c1 + expit(x.c2) + np.sin(x.c3) + x.u)


def _collider_outcome(beta: float, u_coef: float, sin_coef: float):
    def outcome(x: _Prefix, a: np.ndarray, pot: _Potential) -> np.ndarray:
        return beta * a + u_coef * x.u + sin_coef * np.sin(x.c4)

    return outcome


@scenario(
    "BI-b-collider-nonzero-null",
    ScenarioFamily.BI,
    "backdoor adjusts for collider C5 ~ N(2A + Y, 1)",
    "iv",
    WrongFunctional.NONZERO,
    backdoor_adjustment=COLLIDER_COVARIATES,
)
def bi_backdoor_collider_nonzero_null(rng, n, beta, treat=None):
    """As BI-a with π = expit{c4 + expit(c2) + sin(c3)}; Y ~ N(βA + 2U + sin(C4), 1);
    C5 ~ N(2A + Y, 1)."""
    return _bi(
        rng, n, beta, treat, pi_index=_collider_index, outcome=_collider_outcome(beta, 2.0, 1.0), collider=(2.0, 1.0)
    )


@scenario(
    "BI-b-collider-nonzero-alt",
    ScenarioFamily.BI,
    "backdoor adjusts for collider C5 ~ N(A + Y, 1)",
    "iv",
    WrongFunctional.NONZERO,
    backdoor_adjustment=COLLIDER_COVARIATES,
)
def bi_backdoor_collider_nonzero_alt(rng, n, beta, treat=None):
    """As BI-a with π = expit{c4 + expit(c2) + sin(c3)}; Y ~ N(βA + 2U + sin(C4), 1);
    C5 ~ N(A + Y, 1)."""
    return _bi(
        rng, n, beta, treat, pi_index=_collider_index, outcome=_collider_outcome(beta, 2.0, 1.0), collider=(1.0, 1.0)
    )


@scenario(
    "BI-b-collider-zero-alt",
    ScenarioFamily.BI,
    "backdoor adjusts for collider C5 ~ N(0.6A + 2Y, 1); backdoor functional near zero",
    "iv",
    WrongFunctional.ZERO,
    backdoor_adjustment=COLLIDER_COVARIATES,
)
def bi_backdoor_collider_zero_alt(rng, n, beta, treat=None):
    """As BI-a with π = expit{c4 + expit(c2) + sin(c3)}; Y ~ N(βA − 3U − sin(C4), 1);
    C5 ~ N(0.6A + 2Y, 1)."""
    return _bi(
        rng, n, beta, treat, pi_index=_collider_index, outcome=_collider_outcome(beta, -3.0, -1.0), collider=(0.6, 2.0)
    )


@scenario(
    "BI-i-exclusion",
    ScenarioFamily.BI,
    "IV exclusion violated by a direct Z→Y effect",
    "backdoor",
    WrongFunctional.NONZERO,
    backdoor_adjustment=(*BASE_COVARIATES, "z"),
)
def bi_iv_exclusion(rng, n, beta, treat=None):
    """As BI-a with Y ~ N(βA + 2U + 2√|C1| + sin(C4) + 2Z, 1). The backdoor set includes Z."""

    def outcome(x: _Prefix, a: np.ndarray, pot: _Potential) -> np.ndarray:
        return beta * a + 2.0 * x.u + x.signal() + 2.0 * x.z

    return _bi(rng, n, beta, treat, outcome=outcome)


def _bi_monotonicity(rng, n, beta, treat, beta1: float, beta2: float) -> ScenarioDraw:
    """π as in BI-a; A(1) ~ Bern(π), A(0) ~ Bern(1 − π) with no conversion;
    Y ~ N(β1·A + β2·I{A(0) > A(1)}·A + 2U + 2√|C1| + sin(C4), 1)."""

    def outcome(x: _Prefix, a: np.ndarray, pot: _Potential) -> np.ndarray:
        return beta1 * a + beta2 * pot.defier() * a + 2.0 * x.u + x.signal()

    return _bi(rng, n, beta, treat, outcome=outcome, convert=False)


@scenario(
    "BI-monotonicity-null",
    ScenarioFamily.BI,
    "IV monotonicity violated; β1 = β, β2 = 0",
    "backdoor",
    WrongFunctional.ZERO,
)
def bi_monotonicity_null(rng, n, beta, treat=None):
    """BI monotonicity violation with β1 = β and β2 = 0 (both zero at β = 0)."""
    return _bi_monotonicity(rng, n, beta, treat, beta, 0.0)


@scenario(
    "BI-monotonicity-zero-alt",
    ScenarioFamily.BI,
    "IV monotonicity violated; β1 = 0.575β, β2 = 0.425β",
    "backdoor",
    WrongFunctional.ZERO,
)
def bi_monotonicity_zero_alt(rng, n, beta, treat=None):
    """BI monotonicity violation with β1 = 0.575β and β2 = 0.425β (5.75 and 4.25 at β = 10)."""
    return _bi_monotonicity(rng, n, beta, treat, 0.575 * beta, 0.425 * beta)


@scenario(
    "BI-monotonicity-nonzero-alt",
    ScenarioFamily.BI,
    "IV monotonicity violated; β1 = β, β2 = −0.8β",
    "backdoor",
    WrongFunctional.NONZERO,
)
def bi_monotonicity_nonzero_alt(rng, n, beta, treat=None):
    """BI monotonicity violation with β1 = β and β2 = −0.8β (10 and −8 at β = 10)."""
    return _bi_monotonicity(rng, n, beta, treat, beta, -0.8 * beta)


# Front-door + IV


def _fi(
    rng: np.random.Generator,
    n: int,
    beta: float,
    treat: float | None,
    *,
    pi_with_u: bool = True,
    m_slope: float = 5.0,
    m_shift_u: float = 0.0,
    z_coef: float = 0.0,
    direct: bool = False,
) -> ScenarioDraw:
    x = _prefix(rng, n)
    pi = _pi(x, x.u if pi_with_u else 0.0)
    pot = _potential(rng, pi, 1.0 - pi)
    a = _treated(pot.observed(x.z), treat)
    m = _mediator(rng, x, a, m_slope, m_shift_u * x.u)
    y = _normal(rng, beta * (a if direct else m) + 3.0 * x.u + x.signal() + z_coef * x.z)
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario("FI-a", ScenarioFamily.FI, "front-door and IV valid", "frontdoor,iv")
def fi_all_valid(rng, n, beta, treat=None):
    """U, C1..C4 ~ Unif(-2,2); Z ~ Bern(0.5); π = expit{c1 + expit(c2) + sin(c3) + u};
    Ā(1) ~ Bern(π), Ā(0) ~ Bern(1 − π), defiers converted; A = A(Z);
    M ~ Bern(expit{5A − 1 + C2}); Y ~ N(βM + 3U + 2√|C1| + sin(C4), 1)."""
    return _fi(rng, n, beta, treat)


@scenario(
    "FI-f-direct",
    ScenarioFamily.FI,
    "front-door invalid through a direct A→Y effect",
    "iv",
    WrongFunctional.ZERO,
)
def fi_frontdoor_direct(rng, n, beta, treat=None):
    """As FI-a with π = expit{c1 + expit(c2) + sin(c3)}; Y ~ N(βA + 3U + 2√|C1| + sin(C4), 1)."""
    return _fi(rng, n, beta, treat, pi_with_u=False, direct=True)


@scenario(
    "FI-f-confounded",
    ScenarioFamily.FI,
    "front-door invalid through U confounding M and Y",
    "iv",
    WrongFunctional.NONZERO,
)
def fi_frontdoor_confounded(rng, n, beta, treat=None):
    """As FI-a with π = expit{c1 + expit(c2) + sin(c3)}; M ~ Bern(expit{3A − 1 + C2 + U})."""
    return _fi(rng, n, beta, treat, pi_with_u=False, m_slope=3.0, m_shift_u=1.0)


@scenario(
    "FI-i-exclusion",
    ScenarioFamily.FI,
    "IV exclusion violated by a direct Z→Y effect",
    "frontdoor",
    WrongFunctional.NONZERO,
)
def fi_iv_exclusion(rng, n, beta, treat=None):
    """As FI-a with Y ~ N(βM + 3U + 2√|C1| + sin(C4) + 2Z, 1)."""
    return _fi(rng, n, beta, treat, z_coef=2.0)


def _fi_monotonicity(rng, n, beta, treat, complier_slope: float, u_coef: float) -> ScenarioDraw:
    """π as in FI-a; A(1) ~ Bern(π), A(0) ~ Bern(1 − π) with no conversion;
    M ~ I{A(0) < A(1)} Bern(expit{s·A − 1 + C2}) + I{A(0) ≥ A(1)} Bern(expit{5A − 1 + C2});
    Y ~ N(βM + u_coef·U + 2√|C1| + sin(C4), 1)."""
    x = _prefix(rng, n)
    pi = _pi(x, x.u)
    pot = _potential(rng, pi, 1.0 - pi, convert=False)
    a = _treated(pot.observed(x.z), treat)
    slope = np.where(pot.complier() == 1.0, complier_slope, 5.0)
    m = _bern(rng, expit(slope * a - 1.0 + x.c2))
    y = _normal(rng, beta * m + u_coef * x.u + x.signal())
    return _iv_draw(x, _table(x, a, y, m=m), pot)


@scenario(
    "FI-monotonicity-null",
    ScenarioFamily.FI,
    "IV monotonicity violated; complier mediator slope 2",
    "frontdoor",
    WrongFunctional.ZERO,
)
def fi_monotonicity_null(rng, n, beta, treat=None):
    """FI monotonicity violation with complier slope 2 and Y ~ N(βM + 2U + ..., 1)."""
    return _fi_monotonicity(rng, n, beta, treat, 2.0, 2.0)


@scenario(
    "FI-monotonicity-alt",
    ScenarioFamily.FI,
    "IV monotonicity violated; complier mediator slope 2.38",
    "frontdoor",
    WrongFunctional.ZERO,
)
def fi_monotonicity_alt(rng, n, beta, treat=None):
    """FI monotonicity violation with complier slope 2.38 and Y ~ N(βM + U + ..., 1).

    M is Bernoulli with the mediator probability of the other FI scenarios.
    """
    return _fi_monotonicity(rng, n, beta, treat, 2.38, 1.0)


# Multiple backdoor adjustment sets

MBD_ADJUSTMENT_SETS = (("c1", "c2", "c3", "c4"), ("c1", "c3"), ("c1", "c4"))


@scenario(
    "MBD",
    ScenarioFamily.MBD,
    "three backdoor models; only the full adjustment set {c1,c2,c3,c4} is valid",
    "backdoor[c1,c2,c3,c4]",
    WrongFunctional.NONZERO,
    specs=tuple(
        ModelSpec(
            kind=ModelKind.BACKDOOR,
            adjustment_covariates=adjustment,
            label=f"backdoor[{','.join(adjustment)}]",
        )
        for adjustment in MBD_ADJUSTMENT_SETS
    ),
    source="multiple backdoor adjustment sets study",
)
def multiple_backdoor(rng, n, beta, treat=None):
    """U, C1..C4 ~ Unif(-2,2); A ~ Bern(expit{C1 + C2}); Y ~ N(βA + 4C2 + C3 + U, 1)."""
    x = _prefix(rng, n, instrument=False)
    a = _treated(_bern(rng, expit(x.c1 + x.c2)), treat)
    y = _normal(rng, beta * a + 4.0 * x.c2 + x.c3 + x.u)
    return ScenarioDraw(table=_table(x, a, y, instrument=False), u=x.u)


# Faithfulness counterexample

FAITH_EFFECT = 2.0


@scenario(
    "FAITH",
    ScenarioFamily.FAITH,
    "unfaithful linear model: backdoor functional is exactly zero while the ACE is 2",
    "backdoor",
    WrongFunctional.NONE,
    specs=(ModelSpec(kind=ModelKind.BACKDOOR, adjustment_covariates=("c",)),),
    source="faithfulness counterexample",
    demonstration=True,
)
def faithfulness_violation(rng, n, beta, treat=None):
    """C ~ Unif(−0.3, 0.3); U ~ Unif(−1, 1); A = I{3C + U > 0}; Y ~ N(2A − 2U + 4C, 1).

    The treatment is binary, so the continuous linear model is replaced by a
    threshold on its linear index. Given C, U is uniform on the part of
    (−1, 1) above or below −3C, so E[U | A=1, C] − E[U | A=0, C] = 1 and the
    adjusted contrast is 2 − 2·1 = 0 while the effect of A on Y is 2.
    ``beta`` is ignored.
    """
    c = rng.uniform(-0.3, 0.3, n)
    u = rng.uniform(-1.0, 1.0, n)
    a = _treated((3.0 * c + u > 0.0).astype(float), treat)
    y = _normal(rng, FAITH_EFFECT * a - 2.0 * u + 4.0 * c)
    mapping = ColumnMapping(outcome_name="y", treatment_name="a", covariate_names=["c"])
    table = ObservationTable(outcome=y, treatment=a, covariates=c.reshape(-1, 1), mapping=mapping)
    return ScenarioDraw(table=table, u=u)
