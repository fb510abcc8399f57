from .config import Config  # noqa: F401 # pragma: no cover
from .contrasts import (  # noqa: F401
    ContrastInterval,
    ContrastKind,
    ContrastSpec,
    GridTable,
    contrast_interval,
    crude_contrast,
    eval_contrast,
    grid,
    odds,
)
from .core import (  # noqa: F401
    FeasibleRegion,
    ObservedMargins,
    ProbabilityInterval,
    SensitivityParams,
    counterfactual_interval,
    counterfactual_intervals,
    crude_risk,
    feasible_region,
    joint_cells,
    validate_params,
)
from .exceptions import (  # noqa: F401
    DegenerateSupportError,
    DomainError,
    EmptyArmError,
    EpsilonOutOfRangeError,
    IndeterminateError,
    InfeasibleMError,
    InfeasibleParamsError,
    InfeasibleSmallMError,
    InvertedParamsError,
    MalformedRowError,
    SharpBoundsError,
)
from .ingest import ContingencyCounts, margins_from_counts, margins_from_records  # noqa: F401
from .montecarlo import (  # noqa: F401
    DistributionKind,
    McConfig,
    McSummary,
    ParamDistribution,
    run_mc,
    sample_param,
)
from .witness import (  # noqa: F401
    ConfoundedModel,
    WitnessModel,
    WitnessTarget,
    build_witness,
    exact_counterfactual,
    implied_extrema,
    implied_margins,
    sharpness_gap,
)
