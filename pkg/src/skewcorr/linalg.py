"""Complex-matrix primitives.

Matrices are plain ``numpy`` complex arrays. Subsystem A is always the
leading tensor factor, so an operator on AB reshapes to
``(d_a, d_b, d_a, d_b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, NotDensityMatrix, NotHermitian

#: Absolute tolerance for Hermiticity, trace and unitarity checks.
TOL = 1e-10
#: Eigenvalues at or below this are treated as exact zeros before powers.
ZERO_EIG = 1e-12


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def max_abs(m) -> float:
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


@dataclass(frozen=True)
class HermitianEigensystem:
    """Ascending eigenvalues and the unitary of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(m, tol: float = TOL) -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix.

    Raises
    ------
    NotHermitian
        If ``max |m - m^dagger|`` exceeds ``tol``; the message reports the
        deviation.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {m.shape}")
    dev = max_abs(m - m.conj().T)
    if dev > tol:
        raise NotHermitian(f"matrix is not Hermitian (max deviation {dev:.3e})", dev)
    w, v = np.linalg.eigh(hermitize(m))
    return HermitianEigensystem(w, v)


class DensityMatrix:
    """Validated density matrix with a lazily cached eigensystem.

    Eigenvalues in ``[-tol, ZERO_EIG]`` are snapped to zero; anything more
    negative than ``-tol`` is rejected.
    """

    def __init__(self, matrix, tol: float = TOL):
        m = as_matrix(matrix)
        if m.shape[0] != m.shape[1]:
            raise NotDensityMatrix(f"density matrix must be square, got {m.shape}")
        dev = max_abs(m - m.conj().T)
        if dev > tol:
            raise NotHermitian(f"state is not Hermitian (max deviation {dev:.3e})", dev)
        tr = np.trace(m)
        if abs(tr - 1.0) > tol:
            raise NotDensityMatrix(f"state trace is {tr.real:.12g}, expected 1", abs(tr - 1.0))
        self._matrix = hermitize(m)
        self._matrix.setflags(write=False)
        self.dim = m.shape[0]
        self.tol = tol
        if self.eig.eigenvalues[0] < -tol:
            raise NotDensityMatrix(
                f"state has negative eigenvalue {self.eig.eigenvalues[0]:.3e}",
                -self.eig.eigenvalues[0],
            )

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @cached_property
    def eig(self) -> HermitianEigensystem:
        w, v = np.linalg.eigh(self._matrix)
        if w[0] >= -self.tol:
            w = np.where(w <= ZERO_EIG, 0.0, w)
        return HermitianEigensystem(w, v)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig.eigenvalues

    def purity(self) -> float:
        return float(np.sum(self.eigenvalues**2))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._matrix, dtype=dtype)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def density(x) -> DensityMatrix:
    return x if isinstance(x, DensityMatrix) else DensityMatrix(x)


@dataclass(frozen=True)
class BipartiteState:
    dim_a: int
    dim_b: int
    state: DensityMatrix

    def __post_init__(self):
        if not isinstance(self.state, DensityMatrix):
            object.__setattr__(self, "state", DensityMatrix(self.state))
        if self.state.dim != self.dim_a * self.dim_b:
            raise DimensionMismatch(
                f"state dimension {self.state.dim} != {self.dim_a} x {self.dim_b}"
            )

    @property
    def matrix(self) -> np.ndarray:
        return self.state.matrix

    @cached_property
    def rho_a(self) -> DensityMatrix:
        return partial_trace(self, "A")

    @cached_property
    def rho_b(self) -> DensityMatrix:
        return partial_trace(self, "B")


def frac_power(rho, t: float) -> np.ndarray:
    """Return ``rho**t`` for ``0 <= t <= 1``.

    Zero eigenvalues map to zero for ``t > 0``; at ``t = 0`` the result is
    the projector onto the support of ``rho``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"power must lie in [0, 1], got {t}")
    rho = density(rho)
    w, v = rho.eig.eigenvalues, rho.eig.eigenvectors
    pos = w > 0
    if t == 0.0:
        wt = pos.astype(float)
    else:
        wt = np.where(pos, np.abs(w) ** t, 0.0)
    return hermitize((v * wt) @ v.conj().T)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def ptrace(m, dim_a: int, dim_b: int, keep: str) -> np.ndarray:
    """Partial trace of an arbitrary operator on AB."""
    m = as_matrix(m)
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise DimensionMismatch(f"operator shape {m.shape} does not match {dim_a}x{dim_b}")
    t = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep.upper() == "A":
        return np.einsum("ibjb->ij", t)
    if keep.upper() == "B":
        return np.einsum("aiaj->ij", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace(state: BipartiteState, keep: str) -> DensityMatrix:
    """Reduced state of the kept subsystem (``keep`` is ``"A"`` or ``"B"``)."""
    return DensityMatrix(ptrace(state.matrix, state.dim_a, state.dim_b, keep))


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product ``tr(a^dagger b)``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def is_unitary(u, tol: float = TOL) -> bool:
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and max_abs(u.conj().T @ u - np.eye(u.shape[0])) <= tol


def product_state(rho_a, rho_b) -> BipartiteState:
    ra, rb = density(rho_a), density(rho_b)
    return BipartiteState(ra.dim, rb.dim, DensityMatrix(kron(ra.matrix, rb.matrix)))


def maximally_entangled(d: int) -> BipartiteState:
    """``|Phi+> = sum_i |ii> / sqrt(d)`` as a bipartite state."""
    psi = np.eye(d, dtype=complex).reshape(d * d) / np.sqrt(d)
    return BipartiteState(d, d, DensityMatrix(np.outer(psi, psi.conj())))


def pure(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))
