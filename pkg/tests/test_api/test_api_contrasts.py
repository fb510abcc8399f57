import math
from unittest import TestCase

import numpy as np
from hypothesis import given, reject, settings, strategies as st

from sharpbounds.api.contrasts import (
    ContrastInterval,
    ContrastKind,
    ContrastSpec,
    contrast_bounds_array,
    contrast_interval,
    crude_contrast,
    eval_contrast,
    eval_contrast_array,
    grid,
    null_value,
    odds,
)
from sharpbounds.api.core import (
    ObservedMargins,
    counterfactual_intervals,
    feasible_region,
    validate_params,
)
from sharpbounds.api.exceptions import ContrastError, IndeterminateError, SharpBoundsError

from ..util import STUDY_MARGINS, feasible_inputs, margins, unit_fractions

NAMED_CONTRASTS = ("rr", "rd", "or", "od")
inner_risks = st.floats(min_value=0.01, max_value=0.99, allow_nan=False)


class TestContrastSpec(TestCase):
    def test_from_short_and_long_names(self):
        assert ContrastSpec.from_name("rr") == ContrastSpec.risk_ratio()
        assert ContrastSpec.from_name("Risk_Difference").kind is ContrastKind.RISK_DIFFERENCE
        assert ContrastSpec.from_name(" or ").name == "odds_ratio"
        assert ContrastSpec.odds_difference().kind is ContrastKind.ODDS_DIFFERENCE

    def test_unknown_name(self):
        with self.assertRaises(ContrastError) as context:
            ContrastSpec.from_name("hazard_ratio")

        assert "valid: rr, rd, or, od" in context.exception.args[0]

    def test_custom_is_not_a_name(self):
        with self.assertRaises(ContrastError):
            ContrastSpec.from_name("custom")

    def test_null_values(self):
        assert null_value(ContrastSpec.risk_ratio()) == 1.0
        assert null_value(ContrastSpec.odds_ratio()) == 1.0
        assert null_value(ContrastSpec.risk_difference()) == 0.0
        assert null_value(ContrastSpec.odds_difference()) == 0.0

    def test_to_dict(self):
        assert ContrastSpec.risk_ratio().to_dict() == {
            "name": "risk_ratio",
            "kind": "risk_ratio",
            "null": 1.0,
        }


class TestCustomContrast(TestCase):
    def test_monotone_custom(self):
        spec = ContrastSpec.custom("weighted_difference", lambda p1, p0: 2 * p1 - p0, null=0.0)
        params = validate_params(STUDY_MARGINS, 0, 1)
        interval = contrast_interval(STUDY_MARGINS, params, spec)
        interval_0, interval_1 = counterfactual_intervals(STUDY_MARGINS, params)

        assert not spec.is_builtin
        assert abs(interval.lower - (2 * interval_1.lower - interval_0.upper)) < 1e-12
        assert abs(interval.upper - (2 * interval_1.upper - interval_0.lower)) < 1e-12

    def test_custom_ratio_matches_builtin_inside(self):
        spec = ContrastSpec.custom("my_ratio", lambda p1, p0: p1 / p0, null=1.0)
        params = validate_params(STUDY_MARGINS, 0.19, 0.745)

        custom = contrast_interval(STUDY_MARGINS, params, spec)
        builtin = contrast_interval(STUDY_MARGINS, params, ContrastSpec.risk_ratio())

        assert abs(custom.lower - builtin.lower) < 1e-12
        assert abs(custom.upper - builtin.upper) < 1e-12

    def test_custom_ratio_follows_extended_reals(self):
        spec = ContrastSpec.custom("my_ratio", lambda p1, p0: p1 / p0, null=1.0)

        assert eval_contrast(spec, 0.3, 0.0) == math.inf
        with self.assertRaises(IndeterminateError):
            eval_contrast(spec, 0.0, 0.0)

        values = eval_contrast_array(spec, np.array([0.0, 0.3, 0.2]), np.array([0.0, 0.0, 0.4]))
        assert math.isnan(values[0])
        assert values[1] == math.inf
        assert values[2] == 0.5

    def test_math_domain_errors_are_indeterminate(self):
        spec = ContrastSpec.custom("log_risk_ratio", lambda p1, p0: math.log(p1 / p0), null=0.0)
        params = validate_params(STUDY_MARGINS, 0.19, 0.745)

        interval = contrast_interval(STUDY_MARGINS, params, spec)
        builtin = contrast_interval(STUDY_MARGINS, params, ContrastSpec.risk_ratio())
        assert abs(interval.lower - math.log(builtin.lower)) < 1e-12
        assert abs(interval.upper - math.log(builtin.upper)) < 1e-12

        assert eval_contrast(spec, 0.3, 0.0) == math.inf
        with self.assertRaises(IndeterminateError):
            eval_contrast(spec, 0.0, 0.4)

    def test_rejects_wrong_direction_in_p1(self):
        with self.assertRaises(ContrastError) as context:
            ContrastSpec.custom("backwards", lambda p1, p0: p0 - p1)

        assert "nondecreasing in p1" in context.exception.args[0]

    def test_rejects_wrong_direction_in_p0(self):
        with self.assertRaises(ContrastError) as context:
            ContrastSpec.custom("sum", lambda p1, p0: p1 + p0)

        assert "nonincreasing in p0" in context.exception.args[0]

    def test_rejects_non_callable(self):
        with self.assertRaises(ContrastError):
            ContrastSpec.custom("nothing", "p1 - p0")


class TestExtendedReals(TestCase):
    def test_odds(self):
        assert odds(0.5) == 1.0
        assert odds(1.0) == math.inf
        assert np.array_equal(odds(np.array([0.0, 0.5])), np.array([0.0, 1.0]))

    def test_division_by_zero_is_infinite(self):
        assert eval_contrast(ContrastSpec.risk_ratio(), 0.3, 0.0) == math.inf
        assert eval_contrast(ContrastSpec.odds_ratio(), 1.0, 0.5) == math.inf
        assert eval_contrast(ContrastSpec.odds_ratio(), 0.5, 1.0) == 0.0
        assert eval_contrast(ContrastSpec.odds_difference(), 0.2, 1.0) == -math.inf

    def test_indeterminate_forms(self):
        with self.assertRaises(IndeterminateError):
            eval_contrast(ContrastSpec.risk_ratio(), 0.0, 0.0)

        with self.assertRaises(IndeterminateError):
            eval_contrast(ContrastSpec.odds_ratio(), 1.0, 1.0)

        with self.assertRaises(IndeterminateError):
            eval_contrast(ContrastSpec.odds_difference(), 1.0, 1.0)

    def test_array_marks_indeterminate_as_nan(self):
        values = eval_contrast_array(
            ContrastSpec.risk_ratio(),
            np.array([0.0, 0.3, 0.2]),
            np.array([0.0, 0.0, 0.4]),
        )

        assert math.isnan(values[0])
        assert values[1] == math.inf
        assert values[2] == 0.5


class TestContrastInterval(TestCase):
    def test_study_corners(self):
        rd = ContrastSpec.risk_difference()
        interval = contrast_interval(STUDY_MARGINS, validate_params(STUDY_MARGINS, 0, 1), rd)

        assert abs(interval.lower - (-0.42)) <= 0.005
        assert abs(interval.upper - 0.58) <= 0.005

        interval = contrast_interval(
            STUDY_MARGINS,
            validate_params(STUDY_MARGINS, 0.38, 0.49),
            ContrastSpec.odds_ratio(),
        )
        assert abs(interval.lower - 1.00) <= 0.005
        assert abs(interval.upper - 1.57) <= 0.005

    def test_assumption_free_spot_values(self):
        params = validate_params(STUDY_MARGINS, 0, 1)

        rr = contrast_interval(STUDY_MARGINS, params, ContrastSpec.risk_ratio())
        assert abs(rr.lower - 0.24) <= 0.015
        assert abs(rr.upper - 3.11) <= 0.015

        od = contrast_interval(STUDY_MARGINS, params, ContrastSpec.odds_difference())
        assert abs(od.lower - (-1.06)) <= 0.015
        assert abs(od.upper - 5.88) <= 0.015

    def test_null_position_and_share(self):
        rd = ContrastSpec.risk_difference()

        around = ContrastInterval(lower=-0.42, upper=0.58, contrast=rd)
        assert around.null_position() == "around"
        assert abs(around.share_above_null() - 0.58) < 1e-12
        assert 0 in around

        assert ContrastInterval(lower=0.1, upper=0.3, contrast=rd).null_position() == "above"
        assert ContrastInterval(lower=-0.3, upper=-0.1, contrast=rd).null_position() == "below"
        assert ContrastInterval(lower=0.1, upper=0.1, contrast=rd).share_above_null() is None

        unbounded = ContrastInterval(lower=0.2, upper=math.inf, contrast=ContrastSpec.risk_ratio())
        assert unbounded.share_above_null() is None

    def test_inverted_interval(self):
        with self.assertRaises(SharpBoundsError):
            ContrastInterval(lower=1.0, upper=0.5, contrast=ContrastSpec.risk_ratio())

    def test_crude_contrast(self):
        assert crude_contrast(STUDY_MARGINS, ContrastSpec.risk_ratio()) == 0.49 / 0.38
        assert crude_contrast(STUDY_MARGINS, ContrastSpec.risk_difference()) == 0.49 - 0.38

    def test_tightest_bounds_contain_null_and_crude(self):
        params = validate_params(STUDY_MARGINS, 0.38, 0.49)

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            interval = contrast_interval(STUDY_MARGINS, params, spec)
            assert spec.null in interval
            crude = crude_contrast(STUDY_MARGINS, spec)
            assert interval.lower - 1e-12 <= crude <= interval.upper + 1e-12

    def test_crude_on_the_region_corner(self):
        obs = ObservedMargins(p_e1=0.71484375, p_d1_e0=0.7166976637637307, p_d1_e1=0.0)
        params = validate_params(obs, 0, 0.7166976637637307)

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            interval = contrast_interval(obs, params, spec)
            assert interval.lower <= crude_contrast(obs, spec) <= interval.upper, name

    @settings(max_examples=1000, deadline=None)
    @given(feasible_inputs())
    def test_intervals_contain_the_crude_contrast(self, inputs):
        obs, params = inputs

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            try:
                crude = crude_contrast(obs, spec)
                interval = contrast_interval(obs, params, spec)
            except IndeterminateError:
                continue
            assert interval.lower <= crude <= interval.upper, (name, obs, params)

    @settings(max_examples=500, deadline=None)
    @given(margins(), unit_fractions, unit_fractions, unit_fractions, unit_fractions)
    def test_wider_parameters_nest_the_interval(self, obs, a, b, c, d):
        region = feasible_region(obs)
        small_m, large_m = (region.m_star * x for x in sorted((a, b)))
        small_big_m, large_big_m = (
            region.big_m_star + (1 - region.big_m_star) * x for x in sorted((c, d))
        )
        narrow = validate_params(obs, large_m, small_big_m)
        wide = validate_params(obs, small_m, large_big_m)

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            try:
                inner = contrast_interval(obs, narrow, spec)
                outer = contrast_interval(obs, wide, spec)
            except IndeterminateError:
                continue
            assert outer.lower <= inner.lower, (name, obs, narrow, wide)
            assert inner.upper <= outer.upper, (name, obs, narrow, wide)

    @settings(max_examples=1000, deadline=None)
    @given(feasible_inputs())
    def test_intervals_contain_the_null(self, inputs):
        obs, params = inputs

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            try:
                interval = contrast_interval(obs, params, spec)
            except IndeterminateError:
                reject()
            assert interval.lower <= spec.null <= interval.upper, (name, obs, params)

    @settings(max_examples=500, deadline=None)
    @given(feasible_inputs(risk=inner_risks))
    def test_matches_brute_force_over_the_rectangle(self, inputs):
        obs, params = inputs
        interval_0, interval_1 = counterfactual_intervals(obs, params)

        p1, p0 = np.meshgrid(
            np.linspace(interval_1.lower, interval_1.upper, 200),
            np.linspace(interval_0.lower, interval_0.upper, 200),
            indexing="ij",
        )

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            interval = contrast_interval(obs, params, spec)
            values = eval_contrast_array(spec, p1, p0)

            tolerance = 1e-6
            if spec.kind in (ContrastKind.ODDS_RATIO, ContrastKind.ODDS_DIFFERENCE):
                tolerance = 1e-3

            for got, want in ((interval.lower, values.min()), (interval.upper, values.max())):
                assert math.isclose(got, want, rel_tol=tolerance, abs_tol=1e-6), (name, got, want)

    @settings(max_examples=200, deadline=None)
    @given(feasible_inputs(risk=inner_risks))
    def test_vectorised_bounds_match_scalar(self, inputs):
        obs, params = inputs

        for name in NAMED_CONTRASTS:
            spec = ContrastSpec.from_name(name)
            lower, upper = contrast_bounds_array(
                obs,
                np.array([params.m]),
                np.array([params.big_m]),
                spec,
            )
            interval = contrast_interval(obs, params, spec)
            assert lower[0] == interval.lower
            assert upper[0] == interval.upper


class TestGrid(TestCase):
    def test_axes_span_the_region(self):
        table = grid(STUDY_MARGINS, 5, ContrastSpec.risk_difference())

        assert np.allclose(table.m_values, [0.38, 0.285, 0.19, 0.095, 0.0], rtol=0, atol=1e-15)
        assert np.allclose(
            table.big_m_values,
            [0.49, 0.6175, 0.745, 0.8725, 1.0],
            rtol=0,
            atol=1e-15,
        )
        assert table.m_values[0] == 0.38
        assert table.m_values[-1] == 0.0
        assert table.big_m_values[0] == 0.49
        assert table.big_m_values[-1] == 1.0
        assert len(table.cells) == 5
        assert all(len(row) == 5 for row in table.cells)

    def test_corner_table(self):
        table = grid(STUDY_MARGINS, 2, ContrastSpec.risk_difference())

        assert table.m_values == [0.38, 0.0]
        assert table.big_m_values == [0.49, 1.0]
        corner = table.cell(1, 1)
        assert corner is not None
        assert abs(corner.lower - (-0.42)) <= 0.005

    def test_too_few_steps(self):
        for steps in (1, 0, 2.5):
            with self.assertRaises(SharpBoundsError):
                grid(STUDY_MARGINS, steps, ContrastSpec.risk_ratio())

    def test_indeterminate_cells_are_reported(self):
        obs = ObservedMargins(p_e1=0.5, p_d1_e0=0.0, p_d1_e1=0.0)
        table = grid(obs, 3, ContrastSpec.risk_ratio())

        assert [(failure.row, failure.column) for failure in table.failures] == [
            (0, 0),
            (1, 0),
            (2, 0),
        ]
        assert table.cell(0, 0) is None
        assert table.cell(0, 2) is not None
        assert table.cell(0, 2).upper == math.inf
