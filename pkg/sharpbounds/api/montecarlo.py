"""
Monte Carlo propagation of uncertainty about ``(m, M)`` into contrast bounds.

Instead of fixing the sensitivity parameters the analyst gives each a distribution
over its feasible range; pairs are drawn, bounds computed, and the resulting bound
distributions summarised.

Reproducibility: sample ``i`` draws from Philox block ``i`` of the key ``seed`` (one
block of four 64 bit words per sample: word 0 for ``m``, word 1 for ``M``). Every
sample consumes exactly one block so results do not depend on how samples are split
into chunks or how many workers run them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import gevent
import numpy as np
from gevent.threadpool import ThreadPool
from scipy.special import ndtr, ndtri

from sharpbounds import logger
from sharpbounds.progress import sample_progress

from .config import Config, default_config
from .contrasts import ContrastSpec, contrast_bounds_array
from .core import FeasibleRegion, ObservedMargins, feasible_region
from .exceptions import DegenerateSupportError, DistributionError

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)
WORDS_PER_SAMPLE = 4
MAX_SEED = 2**64 - 1


class DistributionKind(Enum):
    POINT = "point"
    UNIFORM = "uniform"
    TRUNCATED_NORMAL = "truncnorm"


def _open_unit_uniforms(raw: np.ndarray) -> np.ndarray:
    # 53 random bits centred in their cell, strictly inside (0, 1)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


@dataclass(frozen=True)
class ParamDistribution:
    """
    Distribution of one sensitivity parameter over its feasible interval
    ``(low, high)``. Build with ``for_m`` / ``for_big_m`` so the support matches
    the feasible region.
    """

    kind: DistributionKind
    parameter: str
    low: float
    high: float
    mean: Optional[float] = None
    variance: Optional[float] = None
    value: Optional[float] = None

    def __post_init__(self):
        if self.low > self.high:
            raise DistributionError(
                f"{self.parameter} support ({self.low:g}, {self.high:g}) is inverted",
            )

        if self.kind is DistributionKind.TRUNCATED_NORMAL:
            if self.mean is None or self.variance is None:
                raise DistributionError(
                    f"Truncated normal for {self.parameter} needs a mean and a variance",
                )
            if not self.variance > 0:
                raise DistributionError(
                    f"Variance for {self.parameter} must be positive (got {self.variance:g})",
                )

        if self.kind is DistributionKind.POINT:
            if self.value is None or not self.low <= self.value <= self.high:
                raise DistributionError(
                    f"Point mass for {self.parameter} must lie in "
                    f"[{self.low:g}, {self.high:g}] (got {self.value!r})",
                )

    @classmethod
    def _bound(
        cls,
        parameter: str,
        low: float,
        high: float,
        kind: DistributionKind,
        mean: Optional[float],
        variance: Optional[float],
        value: Optional[float],
    ) -> "ParamDistribution":
        if kind is DistributionKind.TRUNCATED_NORMAL:
            # Centre of the support unless told otherwise
            mean = (low + high) / 2 if mean is None else float(mean)
            variance = 0.1 if variance is None else float(variance)
        return cls(
            kind=kind,
            parameter=parameter,
            low=low,
            high=high,
            mean=mean,
            variance=variance,
            value=None if value is None else float(value),
        )

    @classmethod
    def for_m(
        cls,
        region: FeasibleRegion,
        kind: DistributionKind = DistributionKind.TRUNCATED_NORMAL,
        mean: Optional[float] = None,
        variance: Optional[float] = None,
        value: Optional[float] = None,
    ) -> "ParamDistribution":
        """
        Distribution for ``m`` on ``(0, m*)``; the default is a truncated normal
        with mean ``m*/2`` and variance 0.1.
        """

        return cls._bound("m", 0.0, region.m_star, kind, mean, variance, value)

    @classmethod
    def for_big_m(
        cls,
        region: FeasibleRegion,
        kind: DistributionKind = DistributionKind.UNIFORM,
        mean: Optional[float] = None,
        variance: Optional[float] = None,
        value: Optional[float] = None,
    ) -> "ParamDistribution":
        """
        Distribution for ``M`` on ``(M*, 1)``; the default is uniform.
        """

        return cls._bound("M", region.big_m_star, 1.0, kind, mean, variance, value)

    def check_support(self, low: float, high: float) -> None:
        if (self.low, self.high) != (low, high):
            raise DistributionError(
                f"{self.parameter} distribution support ({self.low:g}, {self.high:g}) "
                f"does not match the feasible interval ({low:g}, {high:g})",
            )

    def from_uniforms(self, uniforms: np.ndarray) -> np.ndarray:
        """
        Map uniforms in ``(0, 1)`` to draws by inverting the CDF. Non point-mass
        draws land strictly inside ``(low, high)``.
        """

        uniforms = np.asarray(uniforms, dtype=np.float64)

        if self.kind is DistributionKind.POINT:
            assert self.value is not None
            return np.full(uniforms.shape, self.value)

        if not self.high > self.low:
            raise DegenerateSupportError(
                f"Cannot sample {self.parameter} from the zero length interval "
                f"({self.low:g}, {self.high:g})",
            )

        if self.kind is DistributionKind.UNIFORM:
            draws = self.low + uniforms * (self.high - self.low)
        else:
            assert self.mean is not None and self.variance is not None
            sigma = math.sqrt(self.variance)
            cdf_low = ndtr((self.low - self.mean) / sigma)
            cdf_high = ndtr((self.high - self.mean) / sigma)
            if not cdf_high > cdf_low:
                raise DegenerateSupportError(
                    f"Truncated normal for {self.parameter} puts no mass on "
                    f"({self.low:g}, {self.high:g})",
                )
            draws = self.mean + sigma * ndtri(cdf_low + uniforms * (cdf_high - cdf_low))

        return np.clip(
            draws,
            np.nextafter(self.low, self.high),
            np.nextafter(self.high, self.low),
        )

    def to_dict(self):
        data = {"kind": self.kind.value, "low": self.low, "high": self.high}
        if self.kind is DistributionKind.TRUNCATED_NORMAL:
            data.update({"mean": self.mean, "variance": self.variance})
        if self.kind is DistributionKind.POINT:
            data["value"] = self.value
        return data


def sample_param(dist: ParamDistribution, stream: np.random.Generator) -> float:
    """
    Draw a single value, consuming exactly one 64 bit word from ``stream``.
    """

    raw = stream.bit_generator.random_raw(1)
    return float(dist.from_uniforms(_open_unit_uniforms(np.asarray(raw, dtype=np.uint64)))[0])


@dataclass(frozen=True)
class McConfig:
    m_dist: ParamDistribution
    big_m_dist: ParamDistribution
    contrast: ContrastSpec
    n_samples: int = default_config.MC_SAMPLES
    seed: int = 0
    histogram_bins: int = default_config.HISTOGRAM_BINS
    thresholds: Tuple[float, ...] = ()

    def __post_init__(self):
        for name in ("n_samples", "histogram_bins"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise DistributionError(f"{name} must be a positive integer (got {value!r})")

        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise DistributionError(f"seed must be an integer (got {self.seed!r})")
        if not 0 <= self.seed <= MAX_SEED:
            raise DistributionError(f"seed must be a 64 bit unsigned integer (got {self.seed})")

        object.__setattr__(self, "thresholds", tuple(float(x) for x in self.thresholds))


class ChunkResult(NamedTuple):
    m: np.ndarray
    big_m: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


@dataclass(frozen=True)
class BoundSummary:
    """
    Summary of one bound over the valid samples. ``histogram_counts`` covers the
    finite samples only, so ``sum(histogram_counts) + n_infinite == n``.
    """

    n: int
    mean: float
    std: float
    quantiles: Dict[float, float]
    histogram_edges: List[float]
    histogram_counts: List[int]
    n_infinite: int
    sorted_values: np.ndarray = field(repr=False, compare=False)

    def p_leq(self, x: float) -> float:
        """
        Empirical ``P(bound <= x)``.
        """

        if self.n == 0:
            return math.nan
        return int(np.searchsorted(self.sorted_values, x, side="right")) / self.n

    def p_geq(self, x: float) -> float:
        """
        Empirical ``P(bound >= x)``.
        """

        if self.n == 0:
            return math.nan
        return (self.n - int(np.searchsorted(self.sorted_values, x, side="left"))) / self.n


def summarise_bound(values: np.ndarray, bins: int) -> BoundSummary:
    n = int(values.size)
    sorted_values = np.sort(values)

    if n == 0:
        return BoundSummary(
            n=0,
            mean=math.nan,
            std=math.nan,
            quantiles={level: math.nan for level in QUANTILE_LEVELS},
            histogram_edges=[],
            histogram_counts=[],
            n_infinite=0,
            sorted_values=sorted_values,
        )

    with np.errstate(invalid="ignore"):
        mean = float(np.mean(values))
        std = float(np.std(values, ddof=1)) if n > 1 else 0.0
        # inverted_cdf never interpolates, so infinite samples cannot produce NaN
        quantiles = np.quantile(sorted_values, QUANTILE_LEVELS, method="inverted_cdf")

    finite = values[np.isfinite(values)]
    if finite.size:
        counts, edges = np.histogram(finite, bins=bins)
        histogram_edges = [float(edge) for edge in edges]
        histogram_counts = [int(count) for count in counts]
    else:
        histogram_edges, histogram_counts = [], []

    return BoundSummary(
        n=n,
        mean=mean,
        std=std,
        quantiles={level: float(q) for level, q in zip(QUANTILE_LEVELS, quantiles)},
        histogram_edges=histogram_edges,
        histogram_counts=histogram_counts,
        n_infinite=int(n - finite.size),
        sorted_values=sorted_values,
    )


@dataclass(frozen=True)
class McSummary:
    config: McConfig
    n_samples: int
    n_indeterminate: int
    lower: BoundSummary
    upper: BoundSummary
    samples: ChunkResult = field(repr=False, compare=False)

    def exceedance(self) -> Dict[float, Dict[str, float]]:
        return exceedance_table(self, self.config.thresholds)


def _check_bound_to(obs: ObservedMargins, config: McConfig) -> FeasibleRegion:
    region = feasible_region(obs)
    config.m_dist.check_support(0.0, region.m_star)
    config.big_m_dist.check_support(region.big_m_star, 1.0)
    return region


def _run_chunk(
    obs: ObservedMargins,
    config: McConfig,
    start: int,
    stop: int,
) -> ChunkResult:
    n = stop - start
    # Philox increments its counter before each block, sample i always gets block i + 1
    bit_generator = np.random.Philox(key=config.seed, counter=start)
    raw = bit_generator.random_raw(n * WORDS_PER_SAMPLE).reshape(n, WORDS_PER_SAMPLE)
    uniforms = _open_unit_uniforms(raw)

    m = config.m_dist.from_uniforms(uniforms[:, 0])
    big_m = config.big_m_dist.from_uniforms(uniforms[:, 1])
    lower, upper = contrast_bounds_array(obs, m, big_m, config.contrast)
    return ChunkResult(m=m, big_m=big_m, lower=lower, upper=upper)


def _chunk_ranges(n_samples: int, chunk_size: int) -> List[Tuple[int, int]]:
    return [
        (start, min(start + chunk_size, n_samples)) for start in range(0, n_samples, chunk_size)
    ]


def run_mc(
    obs: ObservedMargins,
    config: McConfig,
    threads: Optional[int] = None,
    settings: Optional[Config] = None,
) -> McSummary:
    """
    Draw ``config.n_samples`` parameter pairs, bound the contrast for each and
    summarise the lower and upper bound distributions.

    Chunks of samples run on a pool of ``threads`` workers; results are assembled in
    sample order so the summary is bit-identical for any worker count.
    """

    settings = settings or default_config
    threads = threads or settings.THREADS

    _check_bound_to(obs, config)
    # Fail fast on degenerate supports rather than inside a worker
    for dist in (config.m_dist, config.big_m_dist):
        dist.from_uniforms(np.array([0.5]))

    chunks = _chunk_ranges(config.n_samples, settings.MC_CHUNK_SIZE)
    logger.debug(
        f"Running {config.n_samples} samples in {len(chunks)} chunks on {threads} threads",
    )

    pool = ThreadPool(min(threads, len(chunks)))
    try:
        task_to_size = {
            pool.spawn(_run_chunk, obs, config, start, stop): stop - start for start, stop in chunks
        }

        with sample_progress(config.n_samples) as advance:
            for task in gevent.iwait(list(task_to_size.keys())):
                advance(task_to_size[task])

        # Dicts keep insertion order, so this is sample order whatever finished first
        results = [task.get() for task in task_to_size.keys()]
    finally:
        pool.kill()

    samples = ChunkResult(
        *(
            np.concatenate([getattr(result, name) for result in results])
            for name in ChunkResult._fields
        ),
    )

    indeterminate = np.isnan(samples.lower) | np.isnan(samples.upper)
    n_indeterminate = int(np.count_nonzero(indeterminate))
    if n_indeterminate:
        logger.warning(
            f"{n_indeterminate} of {config.n_samples} samples gave an indeterminate "
            f"{config.contrast.name}, excluded from the summaries",
        )

    valid = ~indeterminate
    return McSummary(
        config=config,
        n_samples=config.n_samples,
        n_indeterminate=n_indeterminate,
        lower=summarise_bound(samples.lower[valid], config.histogram_bins),
        upper=summarise_bound(samples.upper[valid], config.histogram_bins),
        samples=samples,
    )


def default_distributions(region: FeasibleRegion) -> Tuple[ParamDistribution, ParamDistribution]:
    """
    ``m`` truncated normal with mean ``m*/2`` and variance 0.1 on ``(0, m*)``, ``M``
    uniform on ``(M*, 1)``.
    """

    return (
        ParamDistribution.for_m(region, DistributionKind.TRUNCATED_NORMAL, mean=region.m_star / 2),
        ParamDistribution.for_big_m(region, DistributionKind.UNIFORM),
    )


def exceedance_table(
    summary: McSummary,
    thresholds: Sequence[float],
) -> Dict[float, Dict[str, float]]:
    """
    Empirical probabilities that each bound is below/above each threshold.
    """

    return {
        x: {
            "p_lower_leq": summary.lower.p_leq(x),
            "p_upper_leq": summary.upper.p_leq(x),
            "p_lower_geq": summary.lower.p_geq(x),
            "p_upper_geq": summary.upper.p_geq(x),
        }
        for x in thresholds
    }
