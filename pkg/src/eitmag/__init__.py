"""Cavity-EIT Faraday magnetometer modeling.

Polarization-resolved cavity transmission and phase, Faraday rotation,
single-photon measurement statistics, Doppler-averaged Fisher information,
and magnetic-field sensitivity bounds, with deterministic sweeps and a CLI.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateParametersError,
    EitmagError,
    NoBracketError,
    NoPeakFoundError,
    QuadratureDivergenceError,
    RegimeViolationError,
    StepUnderflowError,
)
from .params import (
    AS_WRITTEN,
    COPROPAGATING,
    PROBE_ONLY,
    SWAPPED,
    FieldResponse,
    ModelParams,
    Polarization,
)
from .response import (
    cavity_transfer,
    resonant_closed_form,
    response,
    small_field_faraday,
    susceptibility,
    transparency_width_analytic,
    transparency_width_measured,
)
from .statistics import (
    FisherResult,
    OutcomeDistribution,
    d_prob_d_delta,
    fisher_h,
    fisher_information,
    fisher_small_field_expansion,
    outcome_probabilities,
)
from .doppler import (
    AVERAGE_OF_FISHER,
    FISHER_OF_AVERAGED,
    DopplerConfig,
    averaged_fisher,
    averaged_outcome_probabilities,
    doppler_average,
    doppler_width,
    doppler_width_in_gamma,
)
from .sensitivity import (
    PhysicalConstants,
    SensitivityReport,
    b_field_for_shift,
    calibrate_repetition_rate,
    fisher_physical,
    multiphoton_sensitivity,
    single_photon_sensitivity,
    zeeman_shift,
)
from .sweep import (
    OBSERVABLES,
    SweepSpec,
    SweepTable,
    find_extremum,
    golden_section,
    optimize_operating_point,
    run_sweep,
)
