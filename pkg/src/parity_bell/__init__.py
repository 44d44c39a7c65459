"""Parity-pseudospin CHSH violation for two-mode squeezed vacuum."""

__version__ = "0.1.0"

from .kernels import BACKEND
from .fock import (
    FockTruncation,
    ReducedDensity,
    TmsvState,
    TwoModeVector,
    fidelity,
    reduced_density,
    squeeze_oracle,
    tmsv_state,
    truncation_for,
)
from .pseudospin import (
    AlgebraReport,
    OperatorSet,
    PseudospinConfig,
    alt_phase,
    custom_config,
    hermite_psi,
    number_config,
    operator_set,
    phase_config,
    position_config,
    verify_su2,
)
from .quadrature import QuadratureSpec
from .correlations import (
    CorrelationTensor,
    FResult,
    correlation_tensor,
    f_closed,
    f_direct,
    f_position_integral,
    f_trace,
    tensor_from_configs,
)
from .bell import (
    BellOutcome,
    BellSetting,
    ConfigSearchResult,
    bell_value,
    direct_search,
    horodecki_max,
    nonmonotonicity_certificate,
    optimize_phases,
    random_unitary_search,
)
