"""Levitated cavity mirror: steady states, linear stability and the
entanglement and squeezing of the mirror and cavity output fields."""

from .errors import (
    ConsistencyError,
    DomainError,
    LevMirrorError,
    NoRealSteadyState,
    NumericalError,
    ThresholdNotFound,
    UnphysicalStateError,
)
from .params import (
    CODATA_CONSTANTS,
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    SystemParams,
    derived_scalars,
    input_photon_rate,
    laser_frequency,
    load_params,
    mode_index,
    validate_regime,
)
from .steady_state import (
    Branch,
    SteadyStateBranch,
    detuning_closed_form,
    residual,
    solve_branches,
    steady_state,
    threshold_power,
    threshold_power_bisect,
)
from .linearization import (
    LinearizedModel,
    coupling_strength,
    drift_matrix,
    linearize,
    mechanical_frequency,
    stability,
    stability_map,
)
from .spectra import io_coefficients, transfer_matrix
from .gaussian_state import (
    SidebandCovariance,
    covariance,
    entanglement_entropy,
    max_squeezing,
    purity_check,
    quadrature_variances,
    sideband_covariance,
    submatrices,
    uncertainty_min_eigenvalue,
)

__version__ = "0.1.0"
