import functools
import logging
import os
import sys
import warnings
from typing import Optional, Tuple

import click

from sharpbounds import __version__, logger
from sharpbounds.api.config import default_config
from sharpbounds.api.contrasts import (
    SHORT_NAMES,
    ContrastSpec,
    contrast_interval,
    crude_contrast,
    grid as build_grid,
)
from sharpbounds.api.core import (
    ObservedMargins,
    counterfactual_intervals,
    feasible_region,
    validate_params,
)
from sharpbounds.api.exceptions import IndeterminateError, SharpBoundsError
from sharpbounds.api.montecarlo import DistributionKind, McConfig, ParamDistribution, run_mc
from sharpbounds.api.witness import WitnessTarget, build_witness, sharpness_gap

from .exceptions import CliUsageError, UnexpectedInternalError, WrappedError
from .log import setup_logging
from .prints import (
    OutputFormat,
    bounds_payload,
    grid_payload,
    histogram_csv,
    mc_payload,
    render,
    samples_csv,
    witness_payload,
)
from .util import load_margins, write_output


class SharpBoundsGroup(click.Group):
    """
    Maps every failure onto the stable exit codes: click usage errors and library
    input errors exit 1, infeasible inputs exit 2.
    """

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            raise CliUsageError(e)

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            raise CliUsageError(e)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except SharpBoundsError as e:
            # Re-raise "expected" sharpbounds exceptions with our click exception wrapper
            raise WrappedError(e)
        except OSError as e:
            raise WrappedError(e)
        except Exception as e:
            # Re-raise any unexpected internal exceptions as UnexpectedInternalError
            raise UnexpectedInternalError(e)


@click.group(cls=SharpBoundsGroup)
@click.option(
    "--debug",
    is_flag=True,
    default=False,
    help="Print debug logs from sharpbounds.",
)
@click.option(
    "--debug-all",
    is_flag=True,
    default=False,
    help="Print debug logs from all packages including sharpbounds.",
)
@click.version_option(
    version=__version__,
    prog_name="sharpbounds",
    message="%(prog)s: v%(version)s",
)
def cli(debug: bool, debug_all: bool):
    """
    sharpbounds computes bounds on counterfactual probabilities and causal
    contrasts under unmeasured confounding, given the sensitivity parameters
    m and M: the smallest and largest risk of the outcome within any exposure
    and confounder stratum.

    \b
    # Bounds for one (m, M) pair
    sharpbounds bounds --p-e1 0.27 --p-d1-e0 0.38 --p-d1-e1 0.49 --m 0 --M 1 --contrast rd

    \b
    # Table over the whole feasible region
    sharpbounds grid --counts counts.json --contrast rr --format markdown

    \b
    # Model that attains the bounds
    sharpbounds witness --data records.csv --m 0.1 --M 0.87 --target theorem1

    \b
    # Distribution of the bounds when m and M are uncertain
    sharpbounds mc --p-e1 0.27 --p-d1-e0 0.38 --p-d1-e1 0.49 --contrast rd --seed 42

    Exit codes: 0 success, 1 input/parse error, 2 infeasible parameters.
    """

    _setup_log_level(debug, debug_all)


def _setup_log_level(debug, debug_all):
    if not debug and not sys.warnoptions:
        warnings.simplefilter("ignore")

    log_level = logging.INFO
    if debug or debug_all:
        log_level = logging.DEBUG

    other_log_level = None
    if debug_all:
        other_log_level = logging.DEBUG

    setup_logging(log_level, other_log_level)


# Shared options
#

MARGIN_OPTIONS = (
    click.option("--p-e1", type=float, help="Observed p(E=1)."),
    click.option("--p-d1-e0", type=float, help="Observed p(D=1|E=0)."),
    click.option("--p-d1-e1", type=float, help="Observed p(D=1|E=1)."),
    click.option(
        "--counts",
        type=click.File("r"),
        help="JSON file of 2x2 counts (keys d1e1, d0e1, d1e0, d0e0), - for stdin.",
    ),
    click.option(
        "--data",
        type=click.File("r"),
        help="CSV file of records with E and D columns, - for stdin.",
    ),
)


def margins_options(func):
    """
    Add the three mutually exclusive margin sources, handing the resolved
    ``ObservedMargins`` to the command as ``obs``.
    """

    @functools.wraps(func)
    def wrapper(*args, p_e1, p_d1_e0, p_d1_e1, counts, data, **kwargs):
        obs = load_margins(p_e1, p_d1_e0, p_d1_e1, counts, data)
        logger.debug(f"Observed margins: {obs}")
        return func(*args, obs=obs, **kwargs)

    for option in reversed(MARGIN_OPTIONS):
        wrapper = option(wrapper)
    return wrapper


def output_options(func):
    func = click.option(
        "--out",
        type=click.Path(dir_okay=False, writable=True),
        help="Write the output to this file instead of stdout.",
    )(func)
    func = click.option(
        "--format",
        "output_format",
        type=click.Choice([output_format.value for output_format in OutputFormat]),
        default=OutputFormat.JSON.value,
        show_default=True,
        help="Output format.",
    )(func)
    return func


contrast_option = click.option(
    "--contrast",
    type=click.Choice(list(SHORT_NAMES)),
    default="rd",
    show_default=True,
    help="Contrast: risk ratio (rr), risk difference (rd), odds ratio (or), odds difference (od).",
)

params_options = (
    click.option("--m", "small_m", type=float, required=True, help="Sensitivity parameter m."),
    click.option("--M", "big_m", type=float, required=True, help="Sensitivity parameter M."),
)


def with_params(func):
    for option in reversed(params_options):
        func = option(func)
    return func


def _emit(command: str, payload: dict, output_format: str, out: Optional[str]) -> None:
    write_output(render(command, payload, OutputFormat(output_format)), out)


# Commands
#


@cli.command()
@margins_options
@with_params
@contrast_option
@output_options
def bounds(obs: ObservedMargins, small_m, big_m, contrast, output_format, out):
    """
    Bound both counterfactual probabilities and a contrast for one (m, M) pair.
    """

    spec = ContrastSpec.from_name(contrast)
    params = validate_params(obs, small_m, big_m)

    logger.info("--> Computing bounds...")
    intervals = counterfactual_intervals(obs, params)
    interval = contrast_interval(obs, params, spec)

    try:
        crude: Optional[float] = crude_contrast(obs, spec)
    except IndeterminateError as e:
        logger.warning(f"Crude {spec.name} is indeterminate: {e}")
        crude = None

    payload = bounds_payload(obs, feasible_region(obs), params, intervals, interval, crude)
    _emit("bounds", payload, output_format, out)


@cli.command()
@margins_options
@click.option(
    "--steps",
    type=int,
    default=default_config.GRID_STEPS,
    show_default=True,
    help="Number of values of m and of M, spanning the feasible region.",
)
@contrast_option
@output_options
def grid(obs: ObservedMargins, steps, contrast, output_format, out):
    """
    Tabulate contrast bounds over a steps x steps grid of (m, M): rows run over m
    from m* down to 0, columns over M from M* up to 1.
    """

    spec = ContrastSpec.from_name(contrast)

    logger.info(f"--> Computing {steps}x{steps} grid...")
    table = build_grid(obs, steps, spec)
    if table.failures:
        logger.warning(f"{len(table.failures)} grid cells are indeterminate")

    _emit("grid", grid_payload(obs, feasible_region(obs), table), output_format, out)


@cli.command()
@margins_options
@with_params
@click.option(
    "--target",
    type=click.Choice([target.value for target in WitnessTarget]),
    default=WitnessTarget.LOWER_P1_AND_UPPER_P0.value,
    show_default=True,
    help=(
        "theorem1 attains the lower bound of p(D_1=1) and the upper bound of p(D_0=1), "
        "theorem2 the reverse."
    ),
)
@click.option(
    "--epsilon",
    type=float,
    default=default_config.DEFAULT_EPSILON,
    show_default=True,
    help="Witness epsilon, strictly between 0 and 1.",
)
@output_options
def witness(obs: ObservedMargins, small_m, big_m, target, epsilon, output_format, out):
    """
    Build a confounded model whose counterfactual probabilities come within
    epsilon of the bounds, and report how close they get.
    """

    witness_target = WitnessTarget.from_name(target)
    params = validate_params(obs, small_m, big_m)

    logger.info(f"--> Building {witness_target.value} witness...")
    w = build_witness(obs, params, witness_target, epsilon)
    gap = sharpness_gap(obs, params, witness_target, epsilon)

    _emit("witness", witness_payload(obs, params, w, gap), output_format, out)


DISTRIBUTION_CHOICE = click.Choice([kind.value for kind in DistributionKind])


@cli.command()
@margins_options
@contrast_option
@click.option(
    "-n",
    "--samples",
    type=int,
    default=default_config.MC_SAMPLES,
    show_default=True,
    help="Number of (m, M) samples.",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed.")
@click.option(
    "--m-dist",
    type=DISTRIBUTION_CHOICE,
    default=DistributionKind.TRUNCATED_NORMAL.value,
    show_default=True,
    help="Distribution of m on (0, m*).",
)
@click.option("--m-mean", type=float, help="Truncated normal mean for m (default m*/2).")
@click.option("--m-variance", type=float, help="Truncated normal variance for m (default 0.1).")
@click.option("--m-value", type=float, help="Point mass value for m.")
@click.option(
    "--M-dist",
    "big_m_dist",
    type=DISTRIBUTION_CHOICE,
    default=DistributionKind.UNIFORM.value,
    show_default=True,
    help="Distribution of M on (M*, 1).",
)
@click.option("--M-mean", "big_m_mean", type=float, help="Truncated normal mean for M.")
@click.option("--M-variance", "big_m_variance", type=float, help="Truncated normal variance for M.")
@click.option("--M-value", "big_m_value", type=float, help="Point mass value for M.")
@click.option(
    "--bins",
    type=int,
    default=default_config.HISTOGRAM_BINS,
    show_default=True,
    help="Histogram bins.",
)
@click.option(
    "--threshold",
    "thresholds",
    type=float,
    multiple=True,
    help="Report P(bound <= x) and P(bound >= x) for this value (repeatable).",
)
@click.option(
    "--histograms",
    type=click.Path(file_okay=False),
    help="Directory to write lower/upper bound histograms as CSV.",
)
@click.option(
    "--samples-out",
    type=click.Path(dir_okay=False, writable=True),
    help="Write every sample (index, m, M, lower, upper) to this CSV file.",
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    envvar="SHARPBOUNDS_THREADS",
    show_envvar=True,
    help="Worker threads for sampling, the output does not depend on it.",
)
@output_options
def mc(
    obs: ObservedMargins,
    contrast,
    samples: int,
    seed: int,
    m_dist: str,
    m_mean,
    m_variance,
    m_value,
    big_m_dist: str,
    big_m_mean,
    big_m_variance,
    big_m_value,
    bins: int,
    thresholds: Tuple[float, ...],
    histograms: Optional[str],
    samples_out: Optional[str],
    threads: Optional[int],
    output_format,
    out,
):
    """
    Sample (m, M) from distributions over the feasible region and summarise the
    resulting distributions of the lower and upper contrast bounds.
    """

    spec = ContrastSpec.from_name(contrast)
    region = feasible_region(obs)

    config = McConfig(
        m_dist=ParamDistribution.for_m(
            region,
            DistributionKind(m_dist),
            mean=m_mean,
            variance=m_variance,
            value=m_value,
        ),
        big_m_dist=ParamDistribution.for_big_m(
            region,
            DistributionKind(big_m_dist),
            mean=big_m_mean,
            variance=big_m_variance,
            value=big_m_value,
        ),
        contrast=spec,
        n_samples=samples,
        seed=seed,
        histogram_bins=bins,
        thresholds=thresholds,
    )

    logger.info(f"--> Sampling {samples} (m, M) pairs...")
    summary = run_mc(obs, config, threads=threads)

    if histograms:
        os.makedirs(histograms, exist_ok=True)
        for name, bound_summary in (("lower", summary.lower), ("upper", summary.upper)):
            filename = os.path.join(histograms, f"{name}_histogram.csv")
            write_output(histogram_csv(bound_summary), filename)

    if samples_out:
        write_output(samples_csv(summary), samples_out)

    _emit("mc", mc_payload(obs, region, summary), output_format, out)

