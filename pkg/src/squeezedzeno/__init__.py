"""Dynamics and weak-measurement timescales of an atom in squeezed light.

The package models a driven two-level atom coupled to a
finite-bandwidth squeezed vacuum: squeezing spectra, effective
master-equation coefficients, Bloch/superoperator dynamics, weak-value
survival machinery with decoherence and Zeno timescales, a discrete
bath-mode oracle, and sustainable-coherence classification over
parameter grids.  The squeezedzeno console script exposes the same
functionality from the command line.
"""

from .analysis import (
    RegimeVerdict,
    SWEEP_COLUMNS,
    SweepGrid,
    SweepRow,
    angular_condition,
    angular_theta,
    evaluate_regime,
    regime_sweep,
    squeezing_phase_profile,
    sufficient_condition_margin,
    sustainable_condition,
    tan_theta_asymptotic,
    timescale_ratio,
)
from .bloch import (
    BlochState,
    DensityMatrix,
    FitResult,
    Liouvillian,
    Trajectory,
    bloch_derivative,
    bloch_generator,
    build_liouvillian,
    evolve,
    fit_decay_rate,
    fit_exponential,
    population_decay_rate,
    quadrature_decay_rate,
    quadrature_effective_rates,
    steady_state,
)
from .coefficients import (
    DriveParams,
    EffectiveCoefficients,
    SqueezingShifts,
    effective_coefficients,
    upsilon,
)
from .config import DEFAULTS, RunConfig, canonical_json
from .errors import (
    ConfigError,
    DegenerateFitError,
    EmptyGridError,
    IllConditionedFitError,
    InvalidParamsError,
    OrthogonalSelectionError,
    OutOfWindowError,
    ResourceLimitError,
    SingularDenominatorError,
    SqueezedZenoError,
    StepFailureError,
    TangentSingularityError,
    UnphysicalCoefficientsError,
)
from .spectrum import (
    SpectralPoint,
    SqueezedVacuumParams,
    spectral_m,
    spectral_m_abs,
    spectral_n,
    spectral_point,
)
from .weakmeas import (
    DaviesModel,
    MeasurementSchedule,
    PrePostSelection,
    davies_amplitude,
    davies_deviation,
    davies_max_deviation,
    davies_propagator_column,
    decay_time_approx,
    decay_time_exact,
    decoherence_time,
    propagator,
    weak_survival,
    weak_value,
    zeno_time,
)

__version__ = "0.1.0"

__all__ = [
    "BlochState",
    "ConfigError",
    "DEFAULTS",
    "DaviesModel",
    "DegenerateFitError",
    "DensityMatrix",
    "DriveParams",
    "EffectiveCoefficients",
    "EmptyGridError",
    "FitResult",
    "IllConditionedFitError",
    "InvalidParamsError",
    "Liouvillian",
    "MeasurementSchedule",
    "OrthogonalSelectionError",
    "OutOfWindowError",
    "PrePostSelection",
    "RegimeVerdict",
    "ResourceLimitError",
    "RunConfig",
    "SWEEP_COLUMNS",
    "SingularDenominatorError",
    "SpectralPoint",
    "SqueezedVacuumParams",
    "SqueezedZenoError",
    "SqueezingShifts",
    "StepFailureError",
    "SweepGrid",
    "SweepRow",
    "TangentSingularityError",
    "Trajectory",
    "UnphysicalCoefficientsError",
    "angular_condition",
    "angular_theta",
    "bloch_derivative",
    "bloch_generator",
    "build_liouvillian",
    "canonical_json",
    "davies_amplitude",
    "davies_deviation",
    "davies_max_deviation",
    "davies_propagator_column",
    "decay_time_approx",
    "decay_time_exact",
    "decoherence_time",
    "effective_coefficients",
    "evaluate_regime",
    "evolve",
    "fit_decay_rate",
    "fit_exponential",
    "population_decay_rate",
    "propagator",
    "quadrature_decay_rate",
    "quadrature_effective_rates",
    "regime_sweep",
    "spectral_m",
    "spectral_m_abs",
    "spectral_n",
    "spectral_point",
    "squeezing_phase_profile",
    "steady_state",
    "sufficient_condition_margin",
    "sustainable_condition",
    "tan_theta_asymptotic",
    "timescale_ratio",
    "upsilon",
    "weak_survival",
    "weak_value",
    "zeno_time",
]
