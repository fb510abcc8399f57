from multiprocessing import cpu_count
from typing import Any, Callable, Dict

from .exceptions import ConfigError


class ConfigDefaults:
    # Slack allowed when checking a value lies in [0, 1]
    PROBABILITY_TOLERANCE: float = 1e-12
    # Slack allowed when comparing sensitivity parameters against the feasible region,
    # margins computed from counts are rarely exact.
    FEASIBILITY_TOLERANCE: float = 1e-9
    # Witness slack used for sharpness checks when none is given
    DEFAULT_EPSILON: float = 1e-4
    # Monte Carlo sample count and chunk size (one chunk per worker task)
    MC_SAMPLES: int = 100_000
    MC_CHUNK_SIZE: int = 10_000
    HISTOGRAM_BINS: int = 50
    # Worker threads for Monte Carlo chunks, output is identical for any value
    THREADS: int = cpu_count()
    # Decimals shown in markdown output
    DISPLAY_DECIMALS: int = 2
    # Points per axis for grid tables
    GRID_STEPS: int = 5


config_defaults = {key: value for key, value in ConfigDefaults.__dict__.items() if key.isupper()}


def _check_positive_int(key: str, minimum: int = 1) -> Callable[[Any], None]:
    def checker(value):
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            raise ConfigError(f"{key} must be an integer >= {minimum} (got {value!r})")

    return checker


def _check_tolerance(key: str) -> Callable[[Any], None]:
    def checker(value):
        if not isinstance(value, (int, float)) or not 0 <= value < 1e-3:
            raise ConfigError(f"{key} must be a small non-negative number (got {value!r})")

    return checker


def check_epsilon(value):
    if not isinstance(value, (int, float)) or not 0 < value < 1:
        raise ConfigError(f"DEFAULT_EPSILON must lie strictly between 0 and 1 (got {value!r})")


config_checkers: Dict[str, Callable[[Any], None]] = {
    "PROBABILITY_TOLERANCE": _check_tolerance("PROBABILITY_TOLERANCE"),
    "FEASIBILITY_TOLERANCE": _check_tolerance("FEASIBILITY_TOLERANCE"),
    "DEFAULT_EPSILON": check_epsilon,
    "MC_SAMPLES": _check_positive_int("MC_SAMPLES"),
    "MC_CHUNK_SIZE": _check_positive_int("MC_CHUNK_SIZE"),
    "HISTOGRAM_BINS": _check_positive_int("HISTOGRAM_BINS"),
    "THREADS": _check_positive_int("THREADS"),
    "DISPLAY_DECIMALS": _check_positive_int("DISPLAY_DECIMALS", minimum=0),
    "GRID_STEPS": _check_positive_int("GRID_STEPS", minimum=2),
}


class Config(ConfigDefaults):
    """
    The default/base configuration options for sharpbounds computations.
    """

    def __init__(self, **kwargs):
        config = config_defaults.copy()

        unknown = set(kwargs) - set(config)
        if unknown:
            raise ConfigError("Unknown config keys: {0}".format(", ".join(sorted(unknown))))

        config.update(kwargs)

        for key, value in config.items():
            setattr(self, key, value)

    def __setattr__(self, key, value):
        checker = config_checkers.get(key)
        if checker:
            checker(value)

        super().__setattr__(key, value)

    def get_current_state(self):
        return [(key, getattr(self, key)) for key in config_defaults.keys()]

    def copy(self) -> "Config":
        return Config(**dict(self.get_current_state()))


# Module level config used when callers do not pass their own
default_config = Config()
