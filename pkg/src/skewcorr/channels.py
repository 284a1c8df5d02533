"""Kraus-map representation of channels and the standard channel families."""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal, NotTracePreserving, NotUnitary, ValidationError
from .linalg import TOL, as_matrix, hermitize, max_abs


class KrausMap:
    """A completely positive map ``x -> sum_i K_i x K_i^dagger``.

    Completeness is not required; see :class:`QuantumChannel`.
    """

    def __init__(self, kraus_ops: Sequence):
        ops = [as_matrix(k) for k in kraus_ops]
        if not ops:
            raise ValidationError("a Kraus map needs at least one operator")
        d = ops[0].shape[0]
        for k in ops:
            if k.shape != (d, d):
                raise DimensionMismatch(f"Kraus operators must all be {d}x{d}, got {k.shape}")
        self.dim = d
        self.kraus_ops = tuple(ops)
        for k in self.kraus_ops:
            k.setflags(write=False)

    @cached_property
    def weight_sum(self) -> np.ndarray:
        """``sum_i K_i^dagger K_i``."""
        return hermitize(sum(k.conj().T @ k for k in self.kraus_ops))

    def completeness_residual(self) -> float:
        return max_abs(self.weight_sum - np.eye(self.dim))

    def __len__(self):
        return len(self.kraus_ops)

    def __iter__(self):
        return iter(self.kraus_ops)

    def __call__(self, x):
        return apply(self, x)

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, n_kraus={len(self.kraus_ops)})"


class QuantumChannel(KrausMap):
    """Trace-preserving Kraus map: ``sum_i K_i^dagger K_i = I`` within ``tol``."""

    def __init__(self, kraus_ops: Sequence, tol: float = TOL):
        super().__init__(kraus_ops)
        res = self.completeness_residual()
        if res > tol:
            raise NotTracePreserving(
                f"Kraus operators violate completeness (max deviation {res:.3e})", res
            )


class MeasurementBasis:
    """Orthonormal basis; ``vectors`` holds the basis vectors as columns."""

    def __init__(self, vectors, tol: float = TOL):
        v = as_matrix(vectors)
        if v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"basis must have d vectors of length d, got {v.shape}")
        dev = max_abs(v.conj().T @ v - np.eye(v.shape[0]))
        if dev > tol:
            raise NotOrthonormal(f"basis vectors are not orthonormal (max deviation {dev:.3e})", dev)
        self.dim = v.shape[0]
        self.vectors = v

    def projectors(self) -> list[np.ndarray]:
        return [np.outer(v, v.conj()) for v in self.vectors.T]

    @classmethod
    def computational(cls, d: int) -> "MeasurementBasis":
        return cls(np.eye(d, dtype=complex))


class HermitianOperatorBasis:
    """Orthonormal basis ``{W_l}`` of the d x d Hermitian operators."""

    def __init__(self, operators: Sequence, tol: float = TOL):
        ops = [as_matrix(w) for w in operators]
        d = ops[0].shape[0]
        if len(ops) != d * d:
            raise ValidationError(f"need {d * d} operators, got {len(ops)}")
        stack = np.array(ops)
        gram = np.einsum("lij,mji->lm", stack, stack)
        dev = max_abs(gram - np.eye(d * d))
        if dev > tol:
            raise NotOrthonormal(f"operators are not trace-orthonormal (max deviation {dev:.3e})", dev)
        self.dim = d
        self.operators = tuple(ops)

    def __iter__(self):
        return iter(self.operators)

    def __len__(self):
        return len(self.operators)


def make_channel(ops: Sequence) -> QuantumChannel:
    return QuantumChannel(ops)


def apply(phi: KrausMap, x) -> np.ndarray:
    """``sum_i K_i x K_i^dagger``."""
    x = as_matrix(np.asarray(x))
    if x.shape != (phi.dim, phi.dim):
        raise DimensionMismatch(f"channel acts on dimension {phi.dim}, operand is {x.shape}")
    return sum(k @ x @ k.conj().T for k in phi.kraus_ops)


def amplitude_damping(p: float) -> QuantumChannel:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"damping probability must lie in [0, 1], got {p}")
    k1 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=complex)
    k2 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=complex)
    return QuantumChannel([k1, k2])


def identity_channel(d: int) -> QuantumChannel:
    return QuantumChannel([np.eye(d, dtype=complex)])


def unitary_channel(u) -> QuantumChannel:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise NotUnitary(f"unitary must be square, got {u.shape}")
    dev = max_abs(u.conj().T @ u - np.eye(u.shape[0]))
    if dev > TOL:
        raise NotUnitary(f"matrix is not unitary (max deviation {dev:.3e})", dev)
    return QuantumChannel([u])


def projective_channel(basis: MeasurementBasis) -> QuantumChannel:
    return QuantumChannel(basis.projectors())


def hermitian_operator_basis(d: int) -> HermitianOperatorBasis:
    """Normalised generalised Gell-Mann basis.

    Order: symmetric off-diagonal ``(j, k)`` pairs lexicographically, then
    the antisymmetric pairs, then the ``d - 1`` diagonal operators, then
    ``I / sqrt(d)``.
    """
    if d < 2:
        raise ValueError("operator basis needs d >= 2")
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    s = 1.0 / np.sqrt(2.0)
    ops = []
    for j, k in pairs:
        w = np.zeros((d, d), dtype=complex)
        w[j, k] = w[k, j] = s
        ops.append(w)
    for j, k in pairs:
        w = np.zeros((d, d), dtype=complex)
        w[j, k] = -1j * s
        w[k, j] = 1j * s
        ops.append(w)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    ops.append(np.eye(d, dtype=complex) / np.sqrt(d))
    return HermitianOperatorBasis(ops)


def depolarizing_channel(d: int) -> QuantumChannel:
    """Completely depolarizing channel with Kraus operators ``W_l / sqrt(d)``."""
    return QuantumChannel([w / np.sqrt(d) for w in hermitian_operator_basis(d)])


def lift_left(phi: KrausMap, dim_b: int) -> KrausMap:
    """``phi (x) id_B``; a QuantumChannel stays a QuantumChannel."""
    ops = [np.kron(k, np.eye(dim_b)) for k in phi.kraus_ops]
    return QuantumChannel(ops) if isinstance(phi, QuantumChannel) else KrausMap(ops)


def lift_right(dim_a: int, phi: KrausMap) -> KrausMap:
    """``id_A (x) phi``."""
    ops = [np.kron(np.eye(dim_a), k) for k in phi.kraus_ops]
    return QuantumChannel(ops) if isinstance(phi, QuantumChannel) else KrausMap(ops)


def conjugate(phi: KrausMap, u) -> KrausMap:
    """Channel with Kraus operators ``U^dagger K_i U``."""
    u = as_matrix(u)
    ops = [u.conj().T @ k @ u for k in phi.kraus_ops]
    return QuantumChannel(ops) if isinstance(phi, QuantumChannel) else KrausMap(ops)


def positive_mix(coeffs: Sequence[float], maps: Sequence[KrausMap]) -> KrausMap:
    """``sum_j c_j Phi_j`` realised by concatenating ``sqrt(c_j) K`` lists."""
    if len(coeffs) != len(maps) or not maps:
        raise ValueError("need one positive coefficient per map")
    if any(c <= 0 for c in coeffs):
        raise ValueError(f"coefficients must be strictly positive, got {list(coeffs)}")
    if len({m.dim for m in maps}) != 1:
        raise DimensionMismatch("all maps must act on the same dimension")
    ops = [np.sqrt(c) * k for c, m in zip(coeffs, maps) for k in m.kraus_ops]
    return KrausMap(ops)
