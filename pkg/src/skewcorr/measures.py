"""Skew-information quantities and the channel-relative correlation measures.

Notation used in the docstrings: ``T`` is the modified WYD skew information
``tr(rho K^dagger K) - tr(rho^a K rho^(1-a) K^dagger)`` and ``I`` the
generalized WYD skew information. Channel versions sum over Kraus operators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .channels import KrausMap, MeasurementBasis, QuantumChannel, apply, lift_left
from .errors import ConsistencyError, DimensionMismatch, ImaginaryResidue, NegativeCorrelation
from .linalg import BipartiteState, DensityMatrix, as_matrix, density, frac_power, ptrace

log = logging.getLogger(__name__)

IMAG_TOL = 1e-9
FORM_TOL = 1e-10
NEG_TOL = 1e-9


@dataclass(frozen=True)
class MeasureParams:
    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {self.alpha}")


def _alpha(params) -> float:
    if isinstance(params, MeasureParams):
        return params.alpha
    return MeasureParams(float(params)).alpha


def _real(z, what: str) -> float:
    z = complex(z)
    if abs(z.imag) > IMAG_TOL:
        raise ImaginaryResidue(f"{what}: imaginary part {z.imag:.3e} exceeds {IMAG_TOL:g}")
    return z.real


def _tr(a, b) -> complex:
    # tr(a @ b) without forming the product
    return np.einsum("ij,ji->", a, b)


def _check_op(rho: DensityMatrix, k: np.ndarray):
    if k.shape != (rho.dim, rho.dim):
        raise DimensionMismatch(f"operator {k.shape} does not act on dimension {rho.dim}")


def variance(rho, k) -> float:
    """Generalized variance ``tr(rho K^dagger K) - tr(rho K) tr(rho K^dagger)``."""
    rho, k = density(rho), as_matrix(k)
    _check_op(rho, k)
    r = rho.matrix
    kd = k.conj().T
    return _real(_tr(r, kd @ k) - _tr(r, k) * _tr(r, kd), "variance")


def _gwyd(r, ra, rb, k) -> complex:
    kd = k.conj().T
    return 0.5 * (_tr(r, k @ kd) - _tr(ra @ kd, rb @ k) + _tr(r, kd @ k) - _tr(ra @ k, rb @ kd))


def _mwyd(r, ra, rb, k) -> complex:
    kd = k.conj().T
    return _tr(r, kd @ k) - _tr(ra @ k, rb @ kd)


def gwyd_skew(rho, k, params) -> float:
    """Generalized WYD skew information ``-1/2 tr([rho^a, K][rho^(1-a), K^dagger])``.

    Evaluated through its four-trace expansion.
    """
    a = _alpha(params)
    rho, k = density(rho), as_matrix(k)
    _check_op(rho, k)
    ra, rb = frac_power(rho, a), frac_power(rho, 1.0 - a)
    return _real(_gwyd(rho.matrix, ra, rb, k), "gwyd_skew")


def mwyd_skew(rho, k, params) -> float:
    """Modified WYD skew information of a single operator.

    Unlike the channel version this can be negative when ``k`` is not
    Hermitian.
    """
    a = _alpha(params)
    rho, k = density(rho), as_matrix(k)
    _check_op(rho, k)
    ra, rb = frac_power(rho, a), frac_power(rho, 1.0 - a)
    return _real(_mwyd(rho.matrix, ra, rb, k), "mwyd_skew")


def _check_map(rho: DensityMatrix, phi: KrausMap):
    if phi.dim != rho.dim:
        raise DimensionMismatch(f"channel acts on dimension {phi.dim}, state has dimension {rho.dim}")


def channel_overlap(rho, phi: KrausMap, t: float) -> float:
    """``tr(rho^t Phi(rho^(1-t)))`` for ``t`` in ``[0, 1]``.

    Endpoints use the support-projector convention for ``rho^0``.
    """
    rho = density(rho)
    _check_map(rho, phi)
    return _real(_tr(frac_power(rho, t), apply(phi, frac_power(rho, 1.0 - t))), "channel_overlap")


def mwyd_channel(rho, phi: KrausMap, params) -> float:
    """MWYD skew information of ``rho`` relative to the map ``phi``.

    The Kraus sum is always computed. For a :class:`QuantumChannel` the
    closed form ``1 - tr(rho^a Phi(rho^(1-a)))`` is evaluated too, and a
    disagreement above ``1e-10`` raises :class:`ConsistencyError`.
    """
    a = _alpha(params)
    rho = density(rho)
    _check_map(rho, phi)
    r = rho.matrix
    ra, rb = frac_power(rho, a), frac_power(rho, 1.0 - a)
    total = _real(sum(_mwyd(r, ra, rb, k) for k in phi.kraus_ops), "mwyd_channel")
    if isinstance(phi, QuantumChannel):
        closed = 1.0 - _real(_tr(ra, apply(phi, rb)), "mwyd_channel closed form")
        if abs(closed - total) > FORM_TOL:
            raise ConsistencyError(
                f"Kraus-sum ({total:.15g}) and closed form ({closed:.15g}) disagree"
            )
    return total


def gwyd_channel(rho, phi: KrausMap, params) -> float:
    a = _alpha(params)
    rho = density(rho)
    _check_map(rho, phi)
    r = rho.matrix
    ra, rb = frac_power(rho, a), frac_power(rho, 1.0 - a)
    return _real(sum(_gwyd(r, ra, rb, k) for k in phi.kraus_ops), "gwyd_channel")


def _split(state: BipartiteState, phi_a: KrausMap):
    if phi_a.dim != state.dim_a:
        raise DimensionMismatch(
            f"local channel acts on dimension {phi_a.dim}, subsystem A has dimension {state.dim_a}"
        )
    return lift_left(phi_a, state.dim_b), state.rho_a


def corr_terms(state: BipartiteState, phi_a: KrausMap, params, measure=mwyd_channel):
    """Global and local terms ``(T(rho_AB, Phi (x) id), T(rho_A, Phi))``."""
    lifted, rho_a = _split(state, phi_a)
    return measure(state.state, lifted, params), measure(rho_a, phi_a, params)


def corr_t(state: BipartiteState, phi_a: KrausMap, params) -> float:
    """Correlation of ``state`` relative to the local channel ``phi_a``.

    Global MWYD skew information under ``phi_a (x) id_B`` minus the local one.

    Raises
    ------
    NegativeCorrelation
        If the value falls below ``-1e-9``; the quantity is non-negative in
        exact arithmetic so this signals a fault.
    """
    glob, loc = corr_terms(state, phi_a, params)
    value = glob - loc
    if value < -NEG_TOL:
        raise NegativeCorrelation(f"corr_t = {value:.3e} < 0 (global {glob:.12g}, local {loc:.12g})")
    return value


def corr_i(state: BipartiteState, phi_a: KrausMap, params) -> float:
    """Same construction as :func:`corr_t` with the generalized WYD quantity.

    Its sign is not guaranteed; negative values are logged, not raised.
    """
    glob, loc = corr_terms(state, phi_a, params, measure=gwyd_channel)
    value = glob - loc
    if value < -NEG_TOL:
        log.warning("corr_i is negative: %.3e", value)
    return value


def projective_skew(rho, basis: MeasurementBasis, params) -> float:
    """``1 - sum_i <i|rho^(1-a)|i><i|rho^a|i>`` over the basis vectors."""
    a = _alpha(params)
    rho = density(rho)
    if basis.dim != rho.dim:
        raise DimensionMismatch(f"basis dimension {basis.dim} != state dimension {rho.dim}")
    v = basis.vectors
    da = np.einsum("ji,jk,ki->i", v.conj(), frac_power(rho, a), v)
    db = np.einsum("ji,jk,ki->i", v.conj(), frac_power(rho, 1.0 - a), v)
    return 1.0 - _real(np.sum(da * db), "projective_skew")


def twirl_corr_closed(state: BipartiteState, params) -> float:
    """Correlation relative to the Haar twirl on A, in closed form.

    ``(1/d_A) [tr rho_A^a tr rho_A^(1-a) - tr_B(tr_A(rho^a) tr_A(rho^(1-a)))]``
    """
    a = _alpha(params)
    da, db = state.dim_a, state.dim_b
    rho_a = state.rho_a
    local = np.trace(frac_power(rho_a, a)) * np.trace(frac_power(rho_a, 1.0 - a))
    sa = ptrace(frac_power(state.state, a), da, db, "B")
    sb = ptrace(frac_power(state.state, 1.0 - a), da, db, "B")
    value = _real((local - _tr(sa, sb)) / da, "twirl_corr_closed")
    if value < -NEG_TOL:
        raise NegativeCorrelation(f"twirl correlation {value:.3e} < 0")
    return value


# Worked example: a rank-one two-qubit state under amplitude damping on A.

def example1_state() -> BipartiteState:
    """Projector onto ``(|00> + |01> - |10>) / sqrt(3)``."""
    m = np.array(
        [
            [1, 1, -1, 0],
            [1, 1, -1, 0],
            [-1, -1, 1, 0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    ) / 3.0
    return BipartiteState(2, 2, DensityMatrix(m))


_S5 = np.sqrt(5.0)


def example1_closed_dt(p: float, alpha: float) -> float:
    """Reference closed form for ``corr_t`` of the worked example.

    Not reliable: at ``p = 0`` it returns 4/45 although the identity
    channel forces 0, and it departs from :func:`corr_t` elsewhere too.
    """
    q = np.sqrt(1.0 - p)
    a2 = 2.0 * alpha
    bracket = (
        -(4.0 ** (1 + alpha))
        - 6 * (3 - _S5) ** a2 * (3 + _S5) * (q - 1)
        + 6 * (_S5 - 3) * (_S5 + 3) ** a2 * (q - 1)
        - 4.0 ** (1 + alpha) * q
        + p * (3 * 2.0 ** (1 + a2) - 3 * (3 - _S5) ** a2 * (1 + _S5) + 3 * (_S5 - 1) * (3 + _S5) ** a2)
    )
    return float(-1.0 / 45.0 * 2.0 ** (-1 - a2) * bracket)


def example1_closed_d(p: float, alpha: float) -> float:
    """Reference closed form for ``corr_i`` of the worked example."""
    q = np.sqrt(1.0 - p)
    a2 = 2.0 * alpha
    bracket = (
        2.0 ** (3 + a2)
        - 12 * (3 - _S5) ** a2 * (3 + _S5) * (q - 1)
        + 12 * (_S5 - 3) * (_S5 + 3) ** a2 * (q - 1)
        - 2.0 ** (3 + a2) * q
        + p * (6 * 2.0 ** (1 + a2) + 3 * (3 - _S5) ** a2 * (3 + _S5) - 3 * (_S5 - 3) * (3 + _S5) ** a2)
    )
    return float(1.0 / 45.0 * 4.0 ** (-1 - alpha) * bracket)
