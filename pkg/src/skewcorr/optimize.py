"""Optimization of the correlation measures over local measurements and unitaries.

Search is multi-start Nelder-Mead over a Hermitian-generator parametrisation
``U = exp(i H(theta))`` with ``d**2`` real parameters. Results are the best
value found, not certified global optima.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .channels import MeasurementBasis
from .errors import DimensionMismatch, NonConvergence, NotUnitary
from .linalg import TOL, BipartiteState, as_matrix, frac_power, is_unitary, max_abs
from .measures import _alpha
from .sampling import SeededRng

DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class OptBudget:
    restarts: int = 32
    max_evals: int = 2000
    tol: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class UnitaryParams:
    dim: int
    theta: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float).ravel()
        if theta.size != self.dim**2:
            raise DimensionMismatch(f"need {self.dim ** 2} parameters, got {theta.size}")
        object.__setattr__(self, "theta", theta)

    def unitary(self) -> np.ndarray:
        return unitary_from_params(self)


@dataclass
class OptResult:
    """Best value over restarts.

    ``unitary`` is ``frame @ unitary_from_params(params)``; ``frame`` is the
    identity except for the non-disturbing search, which rotates inside the
    eigenbasis of the reduced state.
    """

    value: float
    params: UnitaryParams
    unitary: np.ndarray
    restarts_used: int
    converged: bool
    n_converged: int = 0
    trace: list = field(default_factory=list)
    objective: str = ""

    @property
    def argmin_or_argmax(self) -> UnitaryParams:
        return self.params


def hermitian_from_params(theta, d: int) -> np.ndarray:
    """``d`` diagonal reals, then ``(re, im)`` for each upper entry ``j < k``."""
    theta = np.asarray(theta, dtype=float)
    h = np.diag(theta[:d]).astype(complex)
    j, k = np.triu_indices(d, 1)
    off = theta[d::2] + 1j * theta[d + 1::2]
    h[j, k] = off
    h[k, j] = off.conj()
    return h


def unitary_from_params(p: UnitaryParams) -> np.ndarray:
    """``exp(i H(theta))`` via the eigendecomposition of ``H``."""
    w, v = np.linalg.eigh(hermitian_from_params(p.theta, p.dim))
    return (v * np.exp(1j * w)) @ v.conj().T


def basis_from_unitary(u) -> MeasurementBasis:
    u = as_matrix(u)
    if not is_unitary(u):
        raise NotUnitary(f"matrix is not unitary (max deviation {max_abs(u.conj().T @ u - np.eye(len(u))):.3e})")
    return MeasurementBasis(u)


# Objective kernels. Each precomputes the state powers once; the public
# measure functions are the independent route used to re-check results.

class _Overlaps:
    def __init__(self, state: BipartiteState, alpha: float):
        self.da, self.db = state.dim_a, state.dim_b
        da, db = self.da, self.db
        self.ga = frac_power(state.state, alpha)
        self.gb = frac_power(state.state, 1.0 - alpha)
        self.ta = self.ga.reshape(da, db, da, db)
        self.tb = self.gb.reshape(da, db, da, db)
        self.la = frac_power(state.rho_a, alpha)
        self.lb = frac_power(state.rho_a, 1.0 - alpha)

    def projective_global(self, u):
        """``sum_i tr(rho^a (P_i x I) rho^(1-a) (P_i x I))``, ``P_i`` the columns of ``u``."""
        m = np.einsum("ai,abcd,ci->ibd", u.conj(), self.ta, u)
        n = np.einsum("ai,abcd,ci->ibd", u.conj(), self.tb, u)
        return np.einsum("ibd,idb->", m, n).real

    def projective_local(self, u):
        da = np.einsum("ji,jk,ki->i", u.conj(), self.la, u)
        db = np.einsum("ji,jk,ki->i", u.conj(), self.lb, u)
        return np.sum(da * db).real

    def unitary_global(self, u):
        r = np.einsum("jk,kclb,il->jcib", u, self.tb, u.conj())
        return np.einsum("ibjc,jcib->", self.ta, r).real

    def unitary_local(self, u):
        return np.einsum("ij,jk,kl,li->", self.la, u, self.lb, u.conj().T).real


def _multistart(fun: Callable[[np.ndarray], float], d: int, budget: OptBudget, maximize: bool,
                mask: np.ndarray | None = None, name: str = "") -> OptResult:
    sign = -1.0 if maximize else 1.0
    n = d * d
    free = np.ones(n, bool) if mask is None else mask

    def full(x):
        theta = np.zeros(n)
        theta[free] = x
        return theta

    def obj(x):
        return sign * fun(full(x))

    rng = SeededRng(budget.seed)
    best = None
    trace = []
    n_conv = 0
    for r in range(budget.restarts):
        if r == 0:
            x0 = np.zeros(int(free.sum()))
        else:
            x0 = rng.spawn(r).generator.uniform(-np.pi, np.pi, size=int(free.sum()))
        if x0.size == 0:
            res_x, res_f, ok = x0, obj(x0), True
        else:
            res = minimize(obj, x0, method="Nelder-Mead",
                           options={"maxfev": budget.max_evals, "xatol": budget.tol,
                                    "fatol": budget.tol, "adaptive": n > 4})
            res_x, res_f, ok = res.x, float(res.fun), bool(res.success)
        n_conv += ok
        if best is None or res_f < best[1]:
            best = (res_x, res_f)
        trace.append((r, sign * best[1]))
    theta = full(best[0])
    p = UnitaryParams(d, theta)
    result = OptResult(
        value=fun(theta), params=p, unitary=unitary_from_params(p),
        restarts_used=budget.restarts, converged=n_conv > 0, n_converged=n_conv,
        trace=trace, objective=name,
    )
    if not result.converged:
        raise NonConvergence(
            f"{name}: none of {budget.restarts} restarts converged within {budget.max_evals} evaluations "
            f"(best value {result.value:.12g})"
        )
    return result


def _unitary_of(d):
    return lambda theta: unitary_from_params(UnitaryParams(d, theta))


def max_corr_projective(state: BipartiteState, params, budget: OptBudget = OptBudget()) -> OptResult:
    """Maximum over von Neumann measurements on A of the measurement-relative correlation."""
    ov = _Overlaps(state, _alpha(params))
    u_of = _unitary_of(state.dim_a)

    def f(theta):
        u = u_of(theta)
        return ov.projective_local(u) - ov.projective_global(u)

    return _multistart(f, state.dim_a, budget, maximize=True, name="max-proj")


def min_corr_projective(state: BipartiteState, params, budget: OptBudget = OptBudget()) -> OptResult:
    """Minimum over von Neumann measurements on A of the measurement-relative correlation."""
    ov = _Overlaps(state, _alpha(params))
    u_of = _unitary_of(state.dim_a)

    def f(theta):
        u = u_of(theta)
        return ov.projective_local(u) - ov.projective_global(u)

    return _multistart(f, state.dim_a, budget, maximize=False, name="min-proj")


def geometric_discord(state: BipartiteState, budget: OptBudget = OptBudget()) -> OptResult:
    """``min`` over measurements on A of the global skew term at ``alpha = 1/2``."""
    ov = _Overlaps(state, 0.5)
    u_of = _unitary_of(state.dim_a)
    return _multistart(lambda th: 1.0 - ov.projective_global(u_of(th)), state.dim_a, budget,
                       maximize=False, name="geo-discord")


def max_corr_unitary(state: BipartiteState, params, budget: OptBudget = OptBudget()) -> OptResult:
    """Maximum over local unitary channels on A of the correlation."""
    ov = _Overlaps(state, _alpha(params))
    u_of = _unitary_of(state.dim_a)

    def f(theta):
        u = u_of(theta)
        return ov.unitary_local(u) - ov.unitary_global(u)

    return _multistart(f, state.dim_a, budget, maximize=True, name="max-unitary")


def degenerate_blocks(eigenvalues, tol: float = DEGENERACY_TOL) -> list[list[int]]:
    """Group ascending eigenvalues into runs whose neighbours differ by at most ``tol``."""
    blocks = [[0]]
    for i in range(1, len(eigenvalues)):
        if eigenvalues[i] - eigenvalues[i - 1] <= tol:
            blocks[-1].append(i)
        else:
            blocks.append([i])
    return blocks


def min_nondisturbing_max(state: BipartiteState, budget: OptBudget = OptBudget()) -> OptResult:
    """Maximum of the global skew term at ``alpha = 1/2`` over measurements leaving ``rho_A`` unchanged.

    The admissible bases are eigenbases of ``rho_A``; only rotations inside
    degenerate eigenspaces are searched.
    """
    d = state.dim_a
    eig = state.rho_a.eig
    frame = eig.eigenvectors
    blocks = degenerate_blocks(eig.eigenvalues)
    allowed = np.zeros((d, d), bool)
    for b in blocks:
        allowed[np.ix_(b, b)] = True
    mask = np.zeros(d * d, bool)
    mask[:d] = True
    j, k = np.triu_indices(d, 1)
    on = allowed[j, k]
    mask[d::2] = on
    mask[d + 1::2] = on
    if all(len(b) == 1 for b in blocks):
        mask[:] = False  # diagonal phases leave the basis unchanged
    ov = _Overlaps(state, 0.5)
    u_of = _unitary_of(d)
    result = _multistart(lambda th: 1.0 - ov.projective_global(frame @ u_of(th)), d,
                         budget if mask.any() else OptBudget(1, budget.max_evals, budget.tol, budget.seed),
                         maximize=True, mask=mask, name="min-nondisturb")
    result.unitary = frame @ result.unitary
    return result


OBJECTIVES = {
    "max-proj": max_corr_projective,
    "min-proj": min_corr_projective,
    "max-unitary": max_corr_unitary,
    "geo-discord": geometric_discord,
    "min-nondisturb": min_nondisturbing_max,
}
FIXED_HALF = {"geo-discord", "min-nondisturb"}


def reevaluate(state: BipartiteState, objective: str, unitary, alpha: float | None = None) -> float:
    """Objective at ``unitary`` through the public measure functions."""
    from .channels import projective_channel, unitary_channel, lift_left
    from .measures import corr_t, mwyd_channel

    if objective in ("max-proj", "min-proj"):
        return corr_t(state, projective_channel(basis_from_unitary(unitary)), alpha)
    if objective == "max-unitary":
        return corr_t(state, unitary_channel(unitary), alpha)
    if objective in FIXED_HALF:
        ch = lift_left(projective_channel(basis_from_unitary(unitary)), state.dim_b)
        return mwyd_channel(state.state, ch, 0.5)
    raise ValueError(f"unknown objective {objective!r}")
