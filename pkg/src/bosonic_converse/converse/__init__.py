"""Capacity bounds, strong converse envelopes and supporting experiments."""

from .bounds import (
    BoundRow,
    RankReport,
    additive_bounds,
    cap_lower_additive,
    cap_lower_thermal,
    cap_upper_gio,
    cap_upper_gio_additive,
    cap_upper_ks,
    cap_upper_ks_additive,
    min_rank_delta,
    rank_bound_check,
    thermal_bounds,
)
from .envelopes import (
    ConverseEnvelope,
    DeltaSchedule,
    DeltaSet,
    EnvelopeCurve,
    envelope_curve,
    envelope_thm1,
    envelope_thm2,
    terms_thm1,
    terms_thm2,
    threshold_thm1,
    threshold_thm2,
)
from .experiments import (
    CodebookSpec,
    ConcentrationReport,
    MeanConstraintReport,
    QubitConverseReport,
    concentration_experiment,
    mean_constraint_demo,
    qubit_converse_check,
)
