"""Channel-relative modified Wigner-Yanase-Dyson skew information and correlations."""

from .channels import (
    HermitianOperatorBasis,
    KrausMap,
    MeasurementBasis,
    QuantumChannel,
    amplitude_damping,
    apply,
    depolarizing_channel,
    hermitian_operator_basis,
    lift_left,
    make_channel,
    positive_mix,
    projective_channel,
    unitary_channel,
)
from .linalg import (
    BipartiteState,
    DensityMatrix,
    eig_hermitian,
    frac_power,
    hs_inner,
    kron,
    maximally_entangled,
    partial_trace,
)
from .measures import (
    MeasureParams,
    corr_i,
    corr_t,
    gwyd_channel,
    gwyd_skew,
    mwyd_channel,
    mwyd_skew,
    projective_skew,
    twirl_corr_closed,
    variance,
)

__version__ = "0.1.0"
