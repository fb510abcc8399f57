"""
Explicit confounded models that attain the bounds.

A ``WitnessModel`` is a joint ``p(D, E, U)`` with binary ``U`` built so that its
extremes of ``p(D=1|E=e,U=u)`` are exactly the requested ``(m, M)``, its observed
margins are within ``epsilon`` of the data, and one counterfactual probability sits
within ``epsilon`` of each targeted bound. Shrinking ``epsilon`` makes the bounds
arbitrarily sharp.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Mapping, NamedTuple, Optional, Tuple

from sharpbounds import logger

from .config import Config, default_config
from .core import (
    EXPOSURE_LEVELS,
    ObservedMargins,
    ProbabilityInterval,
    SensitivityParams,
    counterfactual_interval,
    validate_params,
)
from .exceptions import EpsilonOutOfRangeError, ProbabilityError
from .util import as_probability

# Cells of p(D=1|E=e,U=u) are keyed by (e, u)
Cell = Tuple[int, int]
CELLS: Tuple[Cell, ...] = ((1, 1), (1, 0), (0, 1), (0, 0))


class WitnessTarget(Enum):
    # Attains the lower bound of p(D_1=1) and the upper bound of p(D_0=1)
    LOWER_P1_AND_UPPER_P0 = "theorem1"
    # Attains the upper bound of p(D_1=1) and the lower bound of p(D_0=1)
    UPPER_P1_AND_LOWER_P0 = "theorem2"

    @classmethod
    def from_name(cls, name: str) -> "WitnessTarget":
        key = name.strip().lower()
        for target in cls:
            if key in (target.value, target.name.lower()):
                return target
        valid = ", ".join(target.value for target in cls)
        raise ValueError(f"Unknown witness target: `{name}` (valid: {valid})")


@dataclass(frozen=True)
class ConfoundedModel:
    """
    A joint ``p(D, E, U)`` with binary ``U``: ``p(E=1)``, ``p(U=1|E=e)`` for both arms
    and ``p(D=1|E=e,U=u)`` for all four cells.
    """

    p_e1: float
    p_u1_given_e: Mapping[int, float]
    cond_table: Mapping[Cell, float]

    def __post_init__(self):
        object.__setattr__(self, "p_e1", as_probability(self.p_e1, "p_e1"))
        if not 0 < self.p_e1 < 1:
            raise ProbabilityError(f"p_e1 must lie strictly between 0 and 1 (got {self.p_e1!r})")

        p_u1_given_e = {}
        for e in EXPOSURE_LEVELS:
            value = as_probability(self.p_u1_given_e[e], f"p(U=1|E={e})")
            # Positivity: every confounder level must be possible in both arms
            if not 0 < value < 1:
                raise ProbabilityError(
                    f"p(U=1|E={e}) must lie strictly between 0 and 1 (got {value!r})",
                )
            p_u1_given_e[e] = value
        object.__setattr__(self, "p_u1_given_e", p_u1_given_e)

        cond_table = {
            cell: as_probability(self.cond_table[cell], "p(D=1|E={0},U={1})".format(*cell))
            for cell in CELLS
        }
        object.__setattr__(self, "cond_table", cond_table)

    def p_e(self, e: int) -> float:
        return self.p_e1 if e == 1 else 1 - self.p_e1

    def p_u_given_e(self, u: int, e: int) -> float:
        p_u1 = self.p_u1_given_e[e]
        return p_u1 if u == 1 else 1 - p_u1

    def joint(self) -> Dict[Tuple[int, int, int], float]:
        """
        All eight cells ``p(D=d, E=e, U=u)`` keyed by ``(d, e, u)``.
        """

        cells = {}
        for e in EXPOSURE_LEVELS:
            for u in (0, 1):
                p_eu = self.p_e(e) * self.p_u_given_e(u, e)
                p_d1 = self.cond_table[(e, u)]
                cells[(1, e, u)] = p_d1 * p_eu
                cells[(0, e, u)] = (1 - p_d1) * p_eu
        return cells


@dataclass(frozen=True)
class WitnessModel(ConfoundedModel):
    """
    The binary-U construction with ``p(U=1|E=1) = p(U=0|E=0) = 1 - epsilon``.
    """

    epsilon: float = 0.0
    target: WitnessTarget = WitnessTarget.LOWER_P1_AND_UPPER_P0

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        super().__post_init__()

    @property
    def u_given_e(self) -> float:
        return 1 - self.epsilon


def implied_margins(w: ConfoundedModel) -> ObservedMargins:
    """
    Marginalise ``U`` out: ``p(D=1|E=e) = sum_u p(D=1|E=e,U=u) p(U=u|E=e)``.
    """

    conditionals = {
        e: sum(w.cond_table[(e, u)] * w.p_u_given_e(u, e) for u in (0, 1))
        for e in EXPOSURE_LEVELS
    }
    return ObservedMargins(p_e1=w.p_e1, p_d1_e0=conditionals[0], p_d1_e1=conditionals[1])


def implied_extrema(w: ConfoundedModel) -> Tuple[float, float]:
    """
    ``(m, M)`` of the model: the min and max of ``p(D=1|E=e,U=u)``.
    """

    values = list(w.cond_table.values())
    return min(values), max(values)


def exact_counterfactual(w: ConfoundedModel, e: int) -> float:
    """
    The true ``p(D_e=1)`` under the model. The unobserved part uses the other arm's
    confounder distribution: ``p(D_e=1|E=1-e) = sum_u p(D=1|E=e,U=u) p(U=u|E=1-e)``.
    """

    margins = implied_margins(w)
    other = 1 - e
    counterfactual_other = sum(w.cond_table[(e, u)] * w.p_u_given_e(u, other) for u in (0, 1))
    return margins.p_d1_given(e) * w.p_e(e) + counterfactual_other * w.p_e(other)


def model_interval(w: ConfoundedModel, e: int) -> ProbabilityInterval:
    """
    The bound interval a data analyst would compute from the model's own margins
    and extrema.
    """

    m, big_m = implied_extrema(w)
    margins = implied_margins(w)
    params = SensitivityParams(m=m, big_m=big_m)
    return counterfactual_interval(margins, params, e)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0 < epsilon < 1:
        raise EpsilonOutOfRangeError(f"epsilon must lie strictly between 0 and 1 (got {epsilon:g})")
    return epsilon


def build_witness(
    obs: ObservedMargins,
    params: SensitivityParams,
    target: WitnessTarget,
    epsilon: float,
    config: Optional[Config] = None,
) -> WitnessModel:
    """
    Build the witness model for ``target``. Raises ``InfeasibleParamsError`` if the
    parameters are outside the feasible region of ``obs`` and
    ``EpsilonOutOfRangeError`` unless ``0 < epsilon < 1``.
    """

    epsilon = _check_epsilon(epsilon)
    # Re-validate: params may have been validated against other margins
    params = validate_params(obs, params.m, params.big_m, config=config or default_config)

    if target is WitnessTarget.LOWER_P1_AND_UPPER_P0:
        low_cell, high_cell = (1, 0), (0, 1)
    else:
        low_cell, high_cell = (0, 1), (1, 0)

    cond_table = {
        (1, 1): obs.p_d1_e1,
        (0, 0): obs.p_d1_e0,
        low_cell: params.m,
        high_cell: params.big_m,
    }

    logger.debug(f"Building {target.value} witness with epsilon={epsilon:g}")
    return WitnessModel(
        p_e1=obs.p_e1,
        p_u1_given_e={1: 1 - epsilon, 0: epsilon},
        cond_table=cond_table,
        epsilon=epsilon,
        target=target,
    )


class SharpnessGap(NamedTuple):
    gap_p1: float
    gap_p0: float
    margin_drift: float


def sharpness_gap(
    obs: ObservedMargins,
    params: SensitivityParams,
    target: WitnessTarget,
    epsilon: float,
    config: Optional[Config] = None,
) -> SharpnessGap:
    """
    How far the witness's counterfactual probabilities are from the targeted bounds.

    The bounds are computed from the witness's own implied margins so the gaps
    measure sharpness alone; how far those margins moved from ``obs`` is returned
    separately as ``margin_drift``.
    """

    w = build_witness(obs, params, target, epsilon, config=config)
    margins = implied_margins(w)
    m, big_m = implied_extrema(w)
    witness_params = SensitivityParams(m=m, big_m=big_m)

    interval_1 = counterfactual_interval(margins, witness_params, 1)
    interval_0 = counterfactual_interval(margins, witness_params, 0)

    if target is WitnessTarget.LOWER_P1_AND_UPPER_P0:
        bound_1, bound_0 = interval_1.lower, interval_0.upper
    else:
        bound_1, bound_0 = interval_1.upper, interval_0.lower

    drift = max(abs(margins.p_d1_given(e) - obs.p_d1_given(e)) for e in EXPOSURE_LEVELS)

    return SharpnessGap(
        gap_p1=abs(bound_1 - exact_counterfactual(w, 1)),
        gap_p0=abs(bound_0 - exact_counterfactual(w, 0)),
        margin_drift=drift,
    )
