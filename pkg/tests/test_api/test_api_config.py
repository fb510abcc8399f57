from unittest import TestCase

from sharpbounds.api.config import Config, ConfigDefaults, default_config
from sharpbounds.api.exceptions import ConfigError


class TestConfig(TestCase):
    def test_defaults(self):
        config = Config()

        assert config.FEASIBILITY_TOLERANCE == ConfigDefaults.FEASIBILITY_TOLERANCE
        assert config.MC_SAMPLES == 100_000
        assert config.GRID_STEPS == 5
        assert config.DISPLAY_DECIMALS == 2

    def test_overrides(self):
        config = Config(MC_CHUNK_SIZE=10, THREADS=2)

        assert config.MC_CHUNK_SIZE == 10
        assert config.THREADS == 2
        # The module level default is untouched
        assert default_config.MC_CHUNK_SIZE == ConfigDefaults.MC_CHUNK_SIZE

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as context:
            Config(SAMPLES=10)

        assert context.exception.args[0] == "Unknown config keys: SAMPLES"

    def test_checks_values(self):
        for kwargs in (
            {"MC_SAMPLES": 0},
            {"THREADS": True},
            {"GRID_STEPS": 1},
            {"FEASIBILITY_TOLERANCE": 0.1},
            {"PROBABILITY_TOLERANCE": -1e-12},
            {"DEFAULT_EPSILON": 0},
            {"DEFAULT_EPSILON": 1},
            {"DISPLAY_DECIMALS": -1},
        ):
            with self.assertRaises(ConfigError):
                Config(**kwargs)

    def test_checks_on_assignment(self):
        config = Config()

        with self.assertRaises(ConfigError):
            config.HISTOGRAM_BINS = 0

        config.HISTOGRAM_BINS = 20
        assert config.HISTOGRAM_BINS == 20

    def test_copy(self):
        config = Config(GRID_STEPS=7)
        copied = config.copy()

        copied.GRID_STEPS = 3
        assert config.GRID_STEPS == 7
        assert dict(copied.get_current_state())["GRID_STEPS"] == 3
