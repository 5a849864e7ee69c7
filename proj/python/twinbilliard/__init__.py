"""Twin-billiard phase-information loss simulator (C++ core)."""

from ._core import (  # noqa: F401
    Boundary,
    DispersionHistogram,
    InfoBudget,
    RatioSampler,
    ScalingFit,
    TableConfig,
    TriangleFit,
    World,
    __version__,
    axis_crossing,
    billiard_information,
    collect_dispersion,
    demon_condition,
    demon_frontier,
    dispersion_coordinate,
    entropy_from_info,
    fit_scaling,
    fit_triangle,
    info_det,
    info_ind,
    info_total,
    invariance_check,
    linear_loss_model,
    max_billiard_information,
    precision_tradeoff,
    radius_for_void_ratio,
    ratio_from_coordinate,
    run_paired_trial,
    surrogate_nc,
)
