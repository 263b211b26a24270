"""Photocounting statistics for intensities on the diagonal of a non-central complex Wishart matrix."""

__version__ = "0.1.0"

from .combinatorics import IntegerPartition, MultiIndexPartition, enumerate_multiindex_partitions, enumerate_partitions
from .errors import (
    BoundsError,
    BudgetError,
    DegenerateDimensionError,
    DegreesOfFreedomError,
    ModelError,
    OrderError,
)
from .estimators import Sample, factorial_moment_ustat, polykay, polykay_coefficients
from .modelio import parse_model, serialize_model
from .photon import (
    CountModel,
    joint_cumulant,
    joint_factorial_cumulant,
    joint_factorial_moment,
    joint_moment,
    joint_pmf_series,
    overall_cumulant,
    overall_factorial_cumulant,
    overall_factorial_moment,
    overall_moment,
    overall_pmf,
    randomized_stats,
)
from .series import SeriesResult
from .spectral import SpectralSample, spectr_weights, spectral_polykay
from .wishart import (
    WishartModel,
    joint_intensity_cumulant,
    joint_intensity_moment,
    single_wave,
    trace_cumulant,
    trace_moment,
)
