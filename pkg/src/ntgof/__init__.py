"""Data-driven score tests for goodness of fit.

The package builds smooth score tests whose dimension is chosen from
the data by a penalized criterion, calibrates them by Monte Carlo, and
ships the finite-sample tail bounds that justify the selection rule.

Layout:

- :mod:`ntgof.basis` -- orthonormal score systems on [0, 1] (shifted
  Legendre by default) and their envelope constants.
- :mod:`ntgof.statistics` -- the quadratic-form statistics (cumulative
  sums of squares, normalized forms, plug-in variants) and Monte Carlo
  estimation of normalizing matrices.
- :mod:`ntgof.selection` -- penalty schedules, dimension budgets, the
  penalized selector, and admissibility validators.
- :mod:`ntgof.majorant` -- finite-sample tail bounds and their
  validity windows.
- :mod:`ntgof.catalog` -- ready-made tests: uniformity, rank
  independence, deconvolution, composite parametric nulls.
- :mod:`ntgof.montecarlo` -- calibration, power curves, consistency
  and tail-rate probes; deterministic under any worker count.
- :mod:`ntgof.cli` -- the ``ntgof`` command.
"""

from .basis import (
    OrthonormalBasis,
    design_matrix,
    eval_basis,
    gram_matrix,
    legendre_basis,
    sup_norm_bound,
    user_basis,
)
from .catalog import (
    AlternativeSpec,
    NoiseDensity,
    NullDensity,
    ParametricFamily,
    TestSpec,
    composite_score_statistic,
    composite_spec,
    composite_test,
    contamination_alternative,
    deconvolution_score,
    deconvolution_spec,
    deconvolution_test,
    gaussian_location_family,
    gaussian_noise,
    independence_rank_test,
    independence_spec,
    noisy_copy_pairs,
    null_sampler,
    rank_transform,
    run_test,
    uniform_null,
    uniformity_spec,
    uniformity_test,
)
from .errors import (
    InputError,
    NumericError,
    ScoreMeanError,
    SingularMatrixError,
    WindowViolationError,
)
from .majorant import (
    MajorantParams,
    b2_tail_sum,
    prohorov_bound,
    prohorov_ptype_params,
    ptype_majorant,
)
from .montecarlo import (
    CalibrationResult,
    MonteCarloConfig,
    PowerCurveResult,
    ProbeResult,
    consistency_probe,
    null_distribution,
    p_value,
    power_curve,
    tail_rate_probe,
)
from .selection import (
    DimensionBudget,
    PenaltySchedule,
    ProperWeightSpec,
    SelectionOutcome,
    check_proper_weight,
    default_budget,
    default_weight_spec,
    fixed_budget,
    linear_schedule,
    schwarz_penalty,
    schwarz_schedule,
    select_dimension,
    table_schedule,
    validate_penalty,
)
from .statistics import (
    MeanVector,
    NormalizingMatrix,
    ScoreBasis,
    estimate_moment_matrix,
    estimate_normalizing_matrix,
    gnt_statistic,
    nt_series,
    nt_statistic,
    ordered_eigenvalues,
    snt_statistic,
)

__version__ = "0.1.0"
