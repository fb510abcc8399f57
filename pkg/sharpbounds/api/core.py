"""
Observed margins, sensitivity parameters and the counterfactual probability bounds.

For a binary exposure ``E`` and outcome ``D`` confounded by an unmeasured ``U`` the
analyst supplies ``M = max p(D=1|E=e,U=u)`` and ``m = min p(D=1|E=e,U=u)``. The data
restrict these to the feasible region ``M* <= M <= 1`` and ``0 <= m <= m*`` where
``M*``/``m*`` are the largest/smallest observed risks, and then::

    p(D=1, E=e) + p(E=1-e) m  <=  p(D_e=1)  <=  p(D=1, E=e) + p(E=1-e) M
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from sharpbounds import logger

from .config import Config, default_config
from .exceptions import (
    InfeasibleMError,
    InfeasibleSmallMError,
    InvertedParamsError,
    MarginsError,
    ProbabilityError,
)
from .util import as_probability

EXPOSURE_LEVELS = (0, 1)


def _check_exposure(e: int) -> int:
    if e not in EXPOSURE_LEVELS or isinstance(e, bool):
        raise ProbabilityError(f"Exposure level must be 0 or 1 (got {e!r})")
    return e


@dataclass(frozen=True)
class ObservedMargins:
    """
    The observed data distribution: ``p(E=1)`` and ``p(D=1|E=e)`` for both arms.
    """

    p_e1: float
    p_d1_e0: float
    p_d1_e1: float

    def __post_init__(self):
        for name in ("p_e1", "p_d1_e0", "p_d1_e1"):
            object.__setattr__(self, name, as_probability(getattr(self, name), name))

        if not 0 < self.p_e1 < 1:
            raise MarginsError(
                f"p_e1 must lie strictly between 0 and 1 so both exposure arms are "
                f"observed (got {self.p_e1!r})",
            )

    def p_e(self, e: int) -> float:
        return self.p_e1 if _check_exposure(e) == 1 else 1 - self.p_e1

    def p_d1_given(self, e: int) -> float:
        return self.p_d1_e1 if _check_exposure(e) == 1 else self.p_d1_e0

    def p_d1_and(self, e: int) -> float:
        return self.p_d1_given(e) * self.p_e(e)

    def to_dict(self) -> Dict[str, float]:
        return {"p_e1": self.p_e1, "p_d1_e0": self.p_d1_e0, "p_d1_e1": self.p_d1_e1}


@dataclass(frozen=True)
class FeasibleRegion:
    m_star: float
    big_m_star: float

    def __post_init__(self):
        if self.m_star > self.big_m_star:
            raise ProbabilityError(
                f"m* ({self.m_star!r}) cannot exceed M* ({self.big_m_star!r})",
            )

    def describe(self) -> str:
        return f"0 <= m <= {self.m_star:g} and {self.big_m_star:g} <= M <= 1"

    def to_dict(self) -> Dict[str, float]:
        return {"m_star": self.m_star, "M_star": self.big_m_star}


@dataclass(frozen=True)
class SensitivityParams:
    """
    Validated sensitivity parameters, build these with ``validate_params``.
    """

    m: float
    big_m: float

    def to_dict(self) -> Dict[str, float]:
        return {"m": self.m, "M": self.big_m}


@dataclass(frozen=True)
class ProbabilityInterval:
    lower: float
    upper: float
    exposure_level: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ProbabilityError(
                f"Interval lower bound {self.lower!r} exceeds upper bound {self.upper!r}",
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self):
        return {"e": self.exposure_level, "lower": self.lower, "upper": self.upper}


def feasible_region(obs: ObservedMargins) -> FeasibleRegion:
    return FeasibleRegion(
        m_star=min(obs.p_d1_e0, obs.p_d1_e1),
        big_m_star=max(obs.p_d1_e0, obs.p_d1_e1),
    )


def validate_params(
    obs: ObservedMargins,
    raw_m: float,
    raw_big_m: float,
    config: Optional[Config] = None,
) -> SensitivityParams:
    """
    Check a raw ``(m, M)`` pair against the feasible region of ``obs``.

    Boundary values (``m = m*``, ``M = M*``, ``m = 0``, ``M = 1``) are valid. Values
    within the feasibility tolerance of a boundary are snapped onto it.
    """

    config = config or default_config
    tolerance = config.FEASIBILITY_TOLERANCE
    region = feasible_region(obs)

    m = float(raw_m)
    big_m = float(raw_big_m)

    if m > big_m + tolerance:
        raise InvertedParamsError(
            f"m ({m:g}) must not exceed M ({big_m:g}); feasible region: {region.describe()}",
            boundary=big_m,
            region=region,
        )

    if not -tolerance <= m <= region.m_star + tolerance:
        boundary = 0.0 if m < 0 else region.m_star
        raise InfeasibleSmallMError(
            f"m must lie in [0, {region.m_star:g}] (got {m:g}); "
            f"feasible region: {region.describe()}",
            boundary=boundary,
            region=region,
        )

    if not region.big_m_star - tolerance <= big_m <= 1 + tolerance:
        boundary = 1.0 if big_m > 1 else region.big_m_star
        raise InfeasibleMError(
            f"M must lie in [{region.big_m_star:g}, 1] (got {big_m:g}); "
            f"feasible region: {region.describe()}",
            boundary=boundary,
            region=region,
        )

    m = min(max(m, 0.0), region.m_star)
    big_m = min(max(big_m, region.big_m_star), 1.0)
    logger.debug(f"Validated sensitivity parameters m={m!r}, M={big_m!r}")
    return SensitivityParams(m=m, big_m=big_m)


def counterfactual_interval(
    obs: ObservedMargins,
    params: SensitivityParams,
    e: int,
) -> ProbabilityInterval:
    """
    Bounds on ``p(D_e=1)``: the exposed-as-observed part ``p(D=1, E=e)`` is known,
    the counterfactual part for ``E=1-e`` lies between ``m`` and ``M``.
    """

    crude = obs.p_d1_given(e)
    other_arm = obs.p_e(1 - e)

    # p(D=1, E=e) + p(E=1-e) * x, centred on the crude risk: lower <= crude <= upper
    # survives rounding
    lower = min(max(crude + other_arm * (params.m - crude), 0.0), 1.0)
    upper = min(max(crude + other_arm * (params.big_m - crude), 0.0), 1.0)
    return ProbabilityInterval(lower=lower, upper=upper, exposure_level=e)


def counterfactual_intervals(
    obs: ObservedMargins,
    params: SensitivityParams,
) -> Tuple[ProbabilityInterval, ProbabilityInterval]:
    """
    Returns the ``(e=0, e=1)`` interval pair.
    """

    return (
        counterfactual_interval(obs, params, 0),
        counterfactual_interval(obs, params, 1),
    )


def crude_risk(obs: ObservedMargins, e: int) -> float:
    return obs.p_d1_given(e)


def joint_cells(obs: ObservedMargins) -> Dict[Tuple[int, int], float]:
    """
    The observed joint ``p(D=d, E=e)`` keyed by ``(d, e)``.
    """

    cells = {}
    for e in EXPOSURE_LEVELS:
        cells[(1, e)] = obs.p_d1_and(e)
        cells[(0, e)] = (1 - obs.p_d1_given(e)) * obs.p_e(e)
    return cells
