import json
from io import open
from os import listdir, path

from hypothesis import assume, strategies as st

from sharpbounds.api.core import ObservedMargins, feasible_region, validate_params

# Margins of the observational study used throughout the tables
STUDY_MARGINS = ObservedMargins(p_e1=0.27, p_d1_e0=0.38, p_d1_e1=0.49)


def parse_value(value):
    """
    Convert JSON strings for extended reals back to floats because JSON is lacking.
    """

    if value in ("inf", "-inf", "nan"):
        return float(value)

    if isinstance(value, list):
        return [parse_value(item) for item in value]

    if isinstance(value, dict):
        return {key: parse_value(item) for key, item in value.items()}

    return value


# Hypothesis strategies
#

inner_probabilities = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)
probabilities = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
unit_fractions = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def margins(draw, exposure=inner_probabilities, risk=probabilities):
    return ObservedMargins(p_e1=draw(exposure), p_d1_e0=draw(risk), p_d1_e1=draw(risk))


@st.composite
def feasible_inputs(draw, risk=probabilities):
    """
    Observed margins with a feasible ``(m, M)`` pair, drawn as fractions of the
    feasible intervals so every draw is valid.
    """

    obs = draw(margins(risk=risk))
    region = feasible_region(obs)
    m = region.m_star * draw(unit_fractions)
    big_m = region.big_m_star + (1 - region.big_m_star) * draw(unit_fractions)
    assume(m <= big_m)
    return obs, validate_params(obs, m, big_m)


class JsonTest(type):
    def __new__(cls, name, bases, attrs):
        # Get the JSON files
        files = sorted(listdir(attrs["jsontest_files"]))
        files = [f for f in files if f.endswith(".json")]

        test_prefix = attrs.get("jsontest_prefix", "test_")

        def gen_test(test_name, filename):
            def test(self):
                with open(path.join(attrs["jsontest_files"], filename), encoding="utf-8") as f:
                    test_data = parse_value(json.load(f))
                self.jsontest_function(test_name, test_data)

            return test

        # Loop them and create class methods to call the jsontest_function
        for filename in files:
            test_name = filename[:-5]

            # Attach the method
            method_name = "{0}{1}".format(test_prefix, test_name)
            attrs[method_name] = gen_test(test_name, filename)

        return type.__new__(cls, name, bases, attrs)
