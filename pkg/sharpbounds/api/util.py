from __future__ import annotations

import math
from decimal import ROUND_HALF_UP, Decimal
from typing import Any, Type

from typeguard import TypeCheckError, check_type

from sharpbounds import logger

from .config import default_config
from .exceptions import ProbabilityError


def raise_if_bad_type(
    value: Any,
    type_: Any,
    exception: Type[Exception],
    message_prefix: str,
):
    try:
        check_type(value, type_)
    except TypeCheckError as e:
        raise exception(f"{message_prefix}: {e}")


def as_probability(value: Any, name: str, tolerance: float | None = None) -> float:
    """
    Coerce ``value`` to a float in [0, 1]. Values within ``tolerance`` of the unit
    interval are clamped onto it, anything further out raises ``ProbabilityError``.
    """

    if tolerance is None:
        tolerance = default_config.PROBABILITY_TOLERANCE

    raise_if_bad_type(value, float, ProbabilityError, f"Invalid probability `{name}`")

    value = float(value)
    if math.isnan(value) or value < -tolerance or value > 1 + tolerance:
        raise ProbabilityError(f"{name} must lie in [0, 1] (got {value!r})")

    if value < 0 or value > 1:
        clamped = min(max(value, 0.0), 1.0)
        logger.debug(f"Clamping {name}={value!r} onto {clamped}")
        return clamped

    return value


def round_half_away(value: float, decimals: int = 2) -> Decimal:
    """
    Round half away from zero, the way tables in print are rounded (``round``
    rounds half to even and works on the binary representation).
    """

    # Strip float noise first so 0.28499999999999998 still reads as 0.285
    exact = Decimal(repr(float(value))).quantize(Decimal(1).scaleb(-12), rounding=ROUND_HALF_UP)
    return exact.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)


def format_value(value: float, decimals: int = 2) -> str:
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"

    rounded = round_half_away(value, decimals)
    # Avoid "-0.00" when a tiny negative rounds to zero
    if rounded.is_zero():
        rounded = abs(rounded)
    return f"{rounded:.{decimals}f}"


def format_axis_value(value: float, decimals: int = 2) -> str:
    """
    Axis labels drop trailing zeros (``0.1``, ``1``) like the printed tables.
    """

    text = format_value(value, decimals)
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def json_float(value: float):
    """
    JSON has no infinity, encode extended reals as strings.
    """

    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if math.isnan(value):
        return "nan"
    return value


def parse_json_float(value) -> float:
    if isinstance(value, str):
        return float(value)
    return value
