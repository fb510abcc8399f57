"""
Contrasts between ``p(D_1=1)`` and ``p(D_0=1)`` and their sharp bounds.

Any contrast ``g(p1, p0)`` that is nondecreasing in ``p1`` and nonincreasing in
``p0`` is bounded below by ``g(LB_1, UB_0)`` and above by ``g(UB_1, LB_0)``. The
four named contrasts have this shape; custom contrasts are spot-checked for it when
they are declared.

Evaluation happens in IEEE float64 through numpy so that extended reals behave as
expected: ``0.3 / 0 = inf`` and ``odds(1) = inf``, while ``0/0``, ``inf/inf`` and
``inf - inf`` come out as NaN and are reported as ``IndeterminateError``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from sharpbounds import logger

from .config import Config, default_config
from .core import (
    ObservedMargins,
    SensitivityParams,
    counterfactual_intervals,
    crude_risk,
    feasible_region,
    validate_params,
)
from .exceptions import ContrastError, IndeterminateError, SharpBoundsError
from .util import raise_if_bad_type

# Probability pairs used to spot-check custom contrast monotonicity
MONOTONICITY_CHECK_POINTS = np.linspace(0.0, 1.0, 21)
MONOTONICITY_TOLERANCE = 1e-9


class ContrastKind(Enum):
    RISK_RATIO = "risk_ratio"
    RISK_DIFFERENCE = "risk_difference"
    ODDS_RATIO = "odds_ratio"
    ODDS_DIFFERENCE = "odds_difference"
    CUSTOM = "custom"


SHORT_NAMES = {
    "rr": ContrastKind.RISK_RATIO,
    "rd": ContrastKind.RISK_DIFFERENCE,
    "or": ContrastKind.ODDS_RATIO,
    "od": ContrastKind.ODDS_DIFFERENCE,
}


def odds(p):
    """
    ``p / (1 - p)`` with ``odds(1) = inf``. Accepts floats or numpy arrays.
    """

    p = np.asarray(p, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        result = np.divide(p, 1.0 - p)
    return result[()] if result.ndim == 0 else result


def _risk_ratio(p1, p0):
    return np.divide(p1, p0)


def _risk_difference(p1, p0):
    return np.subtract(p1, p0)


def _odds_ratio(p1, p0):
    return np.divide(odds(p1), odds(p0))


def _odds_difference(p1, p0):
    return np.subtract(odds(p1), odds(p0))


BUILTIN_EVALUATORS: Dict[ContrastKind, Callable] = {
    ContrastKind.RISK_RATIO: _risk_ratio,
    ContrastKind.RISK_DIFFERENCE: _risk_difference,
    ContrastKind.ODDS_RATIO: _odds_ratio,
    ContrastKind.ODDS_DIFFERENCE: _odds_difference,
}

NULL_VALUES = {
    ContrastKind.RISK_RATIO: 1.0,
    ContrastKind.RISK_DIFFERENCE: 0.0,
    ContrastKind.ODDS_RATIO: 1.0,
    ContrastKind.ODDS_DIFFERENCE: 0.0,
}


@dataclass(frozen=True)
class ContrastSpec:
    """
    Identifies a contrast ``g(p1, p0)``. Use the named constructors or
    ``ContrastSpec.custom`` rather than building one directly.
    """

    kind: ContrastKind
    name: str
    evaluator: Optional[Callable[[float, float], float]] = field(default=None, compare=False)
    null: float = 0.0

    @classmethod
    def from_name(cls, name: str) -> "ContrastSpec":
        key = name.strip().lower()
        kind = SHORT_NAMES.get(key)

        if kind is None:
            try:
                kind = ContrastKind(key)
            except ValueError:
                kind = None

        if kind is None or kind is ContrastKind.CUSTOM:
            valid = ", ".join(list(SHORT_NAMES) + [k.value for k in BUILTIN_EVALUATORS])
            raise ContrastError(f"Unknown contrast: `{name}` (valid: {valid})")

        return cls(kind=kind, name=kind.value, null=NULL_VALUES[kind])

    @classmethod
    def risk_ratio(cls) -> "ContrastSpec":
        return cls.from_name("risk_ratio")

    @classmethod
    def risk_difference(cls) -> "ContrastSpec":
        return cls.from_name("risk_difference")

    @classmethod
    def odds_ratio(cls) -> "ContrastSpec":
        return cls.from_name("odds_ratio")

    @classmethod
    def odds_difference(cls) -> "ContrastSpec":
        return cls.from_name("odds_difference")

    @classmethod
    def custom(
        cls,
        name: str,
        evaluator: Callable[[float, float], float],
        null: float = 0.0,
    ) -> "ContrastSpec":
        """
        Declare a custom contrast. The evaluator must be nondecreasing in ``p1``
        and nonincreasing in ``p0``; this is checked on a grid of probability
        pairs and violations raise ``ContrastError``. It is called with numpy
        float64 scalars.
        """

        raise_if_bad_type(name, str, ContrastError, "Invalid custom contrast name")
        raise_if_bad_type(
            evaluator,
            Callable[[float, float], float],
            ContrastError,
            f"Invalid evaluator for contrast `{name}`",
        )

        spec = cls(kind=ContrastKind.CUSTOM, name=name, evaluator=evaluator, null=float(null))
        _check_monotone(spec)
        return spec

    @property
    def is_builtin(self) -> bool:
        return self.kind is not ContrastKind.CUSTOM

    def to_dict(self):
        return {"name": self.name, "kind": self.kind.value, "null": self.null}


def _evaluate_raw(spec: ContrastSpec, p1, p0):
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.is_builtin:
            return BUILTIN_EVALUATORS[spec.kind](
                np.asarray(p1, dtype=np.float64),
                np.asarray(p0, dtype=np.float64),
            )

        assert spec.evaluator is not None
        if np.ndim(p1) == 0 and np.ndim(p0) == 0:
            # float64 arguments give x/0 = inf and 0/0 = nan instead of raising; math
            # domain errors (log(0), sqrt(-x)) are treated as indeterminate
            try:
                return np.float64(spec.evaluator(np.float64(p1), np.float64(p0)))
            except (ZeroDivisionError, OverflowError, ValueError):
                return np.float64(np.nan)

        return np.frompyfunc(
            lambda a, b: _evaluate_raw(spec, a, b),
            2,
            1,
        )(p1, p0).astype(np.float64)


def _check_monotone(spec: ContrastSpec) -> None:
    points = MONOTONICITY_CHECK_POINTS
    p1, p0 = np.meshgrid(points, points, indexing="ij")
    values = _evaluate_raw(spec, p1, p0)

    def violates(diffs):
        finite = np.isfinite(diffs)
        return bool(np.any(diffs[finite] < -MONOTONICITY_TOLERANCE))

    with np.errstate(invalid="ignore"):
        # Increasing p1 (axis 0) must not decrease g, increasing p0 (axis 1) must not increase it
        along_p1 = np.diff(values, axis=0)
        along_p0 = np.diff(values, axis=1)

    if violates(along_p1):
        raise ContrastError(f"Custom contrast `{spec.name}` is not nondecreasing in p1")
    if violates(-along_p0):
        raise ContrastError(f"Custom contrast `{spec.name}` is not nonincreasing in p0")


def eval_contrast(spec: ContrastSpec, p1: float, p0: float) -> float:
    """
    Evaluate ``g(p1, p0)`` as an extended real, raising ``IndeterminateError`` for
    indeterminate forms.
    """

    value = float(_evaluate_raw(spec, p1, p0))
    if np.isnan(value):
        raise IndeterminateError(
            f"{spec.name} is indeterminate at p1={p1!r}, p0={p0!r}",
        )
    return value


def eval_contrast_array(spec: ContrastSpec, p1: np.ndarray, p0: np.ndarray) -> np.ndarray:
    """
    Vectorised ``eval_contrast``, indeterminate entries are left as NaN.
    """

    return np.asarray(_evaluate_raw(spec, p1, p0), dtype=np.float64)


@dataclass(frozen=True)
class ContrastInterval:
    lower: float
    upper: float
    contrast: ContrastSpec

    def __post_init__(self):
        if self.lower > self.upper:
            raise SharpBoundsError(
                f"{self.contrast.name} lower bound {self.lower!r} exceeds upper "
                f"bound {self.upper!r}",
            )

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def null_position(self) -> str:
        """
        Where the interval sits relative to the null effect: ``above``,
        ``below`` or ``around``.
        """

        null = self.contrast.null
        if self.lower > null:
            return "above"
        if self.upper < null:
            return "below"
        return "around"

    def share_above_null(self) -> Optional[float]:
        """
        Fraction of the interval's length above the null, ``None`` when the interval
        is unbounded or a single point.
        """

        width = self.upper - self.lower
        if not np.isfinite(width) or width <= 0:
            return None

        above = self.upper - max(self.lower, self.contrast.null)
        return min(max(above / width, 0.0), 1.0)


def contrast_interval(
    obs: ObservedMargins,
    params: SensitivityParams,
    spec: ContrastSpec,
) -> ContrastInterval:
    """
    Combine the counterfactual intervals: ``(g(LB_1, UB_0), g(UB_1, LB_0))``.
    """

    interval_0, interval_1 = counterfactual_intervals(obs, params)
    return ContrastInterval(
        lower=eval_contrast(spec, interval_1.lower, interval_0.upper),
        upper=eval_contrast(spec, interval_1.upper, interval_0.lower),
        contrast=spec,
    )


def contrast_bounds_array(
    obs: ObservedMargins,
    m: np.ndarray,
    big_m: np.ndarray,
    spec: ContrastSpec,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Contrast bounds for arrays of already feasible ``(m, M)`` pairs. Returns
    ``(lower, upper)`` arrays with NaN where a bound is indeterminate.
    """

    m = np.asarray(m, dtype=np.float64)
    big_m = np.asarray(big_m, dtype=np.float64)

    crude_0 = crude_risk(obs, 0)
    crude_1 = crude_risk(obs, 1)
    p_e0 = obs.p_e(0)
    p_e1 = obs.p_e(1)

    # Same arithmetic as counterfactual_interval, element for element
    lower_0 = np.clip(crude_0 + p_e1 * (m - crude_0), 0.0, 1.0)
    upper_0 = np.clip(crude_0 + p_e1 * (big_m - crude_0), 0.0, 1.0)
    lower_1 = np.clip(crude_1 + p_e0 * (m - crude_1), 0.0, 1.0)
    upper_1 = np.clip(crude_1 + p_e0 * (big_m - crude_1), 0.0, 1.0)

    return (
        eval_contrast_array(spec, lower_1, upper_0),
        eval_contrast_array(spec, upper_1, lower_0),
    )


def crude_contrast(obs: ObservedMargins, spec: ContrastSpec) -> float:
    """
    The contrast of the observed risks, the causal effect only in the absence of
    confounding.
    """

    return eval_contrast(spec, crude_risk(obs, 1), crude_risk(obs, 0))


def null_value(spec: ContrastSpec) -> float:
    return spec.null


# Grid tables
#


@dataclass(frozen=True)
class GridFailure:
    row: int
    column: int
    message: str


@dataclass(frozen=True)
class GridTable:
    """
    Contrast intervals over a grid of sensitivity parameters: rows run over ``m``
    from ``m*`` down to 0, columns over ``M`` from ``M*`` up to 1.
    """

    m_values: List[float]
    big_m_values: List[float]
    cells: List[List[Optional[ContrastInterval]]]
    contrast: ContrastSpec
    failures: List[GridFailure] = field(default_factory=list)

    def cell(self, m_index: int, big_m_index: int) -> Optional[ContrastInterval]:
        return self.cells[m_index][big_m_index]


def _axis(start: float, stop: float, steps: int) -> List[float]:
    values = [float(v) for v in np.linspace(start, stop, steps)]
    # linspace hits both ends, pin them anyway so they equal the region exactly
    values[0] = start
    values[-1] = stop
    return values


def grid(
    obs: ObservedMargins,
    steps: int,
    spec: ContrastSpec,
    config: Optional[Config] = None,
) -> GridTable:
    """
    Evaluate ``contrast_interval`` at ``steps x steps`` equally spaced parameter
    values spanning the feasible region. Cells are computed at the exact grid
    points; rounding is only applied when displaying.
    """

    config = config or default_config

    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise SharpBoundsError(f"Grid steps must be an integer >= 2 (got {steps!r})")

    region = feasible_region(obs)
    m_values = _axis(region.m_star, 0.0, steps)
    big_m_values = _axis(region.big_m_star, 1.0, steps)

    logger.debug(f"Building {steps}x{steps} {spec.name} grid over {region.describe()}")

    cells: List[List[Optional[ContrastInterval]]] = []
    failures: List[GridFailure] = []

    for i, m in enumerate(m_values):
        row: List[Optional[ContrastInterval]] = []
        for j, big_m in enumerate(big_m_values):
            params = validate_params(obs, m, big_m, config=config)
            try:
                row.append(contrast_interval(obs, params, spec))
            except IndeterminateError as e:
                logger.warning(f"Grid cell (m={m:g}, M={big_m:g}) is indeterminate: {e}")
                failures.append(GridFailure(row=i, column=j, message=str(e)))
                row.append(None)
        cells.append(row)

    return GridTable(
        m_values=m_values,
        big_m_values=big_m_values,
        cells=cells,
        contrast=spec,
        failures=failures,
    )
