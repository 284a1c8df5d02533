import numpy as np
import pytest
from hypothesis import given, strategies as st

from skewcorr.errors import DimensionMismatch, NotDensityMatrix, NotHermitian, ValidationError
from skewcorr.linalg import (
    ZERO_EIG,
    BipartiteState,
    DensityMatrix,
    eig_hermitian,
    frac_power,
    hs_inner,
    is_unitary,
    kron,
    maximally_entangled,
    partial_trace,
    product_state,
    ptrace,
    pure,
)
from skewcorr.sampling import haar_unitary, random_bipartite, random_density


def test_density_rejects_non_hermitian():
    with pytest.raises(NotHermitian) as info:
        DensityMatrix([[0.5, 0.1], [0.2, 0.5]])
    assert info.value.deviation == pytest.approx(0.1)
    assert isinstance(info.value, ValueError)


def test_density_rejects_bad_trace_and_negative():
    with pytest.raises(NotDensityMatrix):
        DensityMatrix(np.eye(2))
    with pytest.raises(NotDensityMatrix):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(NotDensityMatrix):
        DensityMatrix(np.ones((2, 3)) / 2)


def test_tiny_negative_eigenvalue_is_clamped():
    rho = DensityMatrix(np.diag([1.0 + 5e-11, -5e-11]))
    assert rho.eigenvalues[0] == 0.0


def test_pure_state_zero_eigenvalues_are_exact(rng):
    rho = pure(rng.standard_normal(4) + 1j * rng.standard_normal(4))
    w = rho.eigenvalues
    assert np.count_nonzero(w) == 1
    assert w[-1] == pytest.approx(1.0)
    assert ZERO_EIG < 1e-10


def test_matrix_is_read_only():
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_eig_hermitian_reconstructs(rng):
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = z + z.conj().T
    e = eig_hermitian(h)
    assert np.all(np.diff(e.eigenvalues) >= 0)
    assert np.allclose(e.reconstruct(), h, atol=1e-12)
    with pytest.raises(NotHermitian):
        eig_hermitian(z)


@given(st.floats(0.0, 1.0), st.integers(0, 10**6))
def test_frac_power_composes(t, seed):
    rho = random_density(3, rng=np.random.default_rng(seed))
    a, b = frac_power(rho, t), frac_power(rho, 1.0 - t)
    assert np.allclose(a @ b, rho.matrix, atol=1e-10)
    assert np.allclose(a, a.conj().T)


def test_frac_power_zero_is_support_projector(rng):
    rho = random_density(4, rank=2, rng=rng)
    p = frac_power(rho, 0.0)
    assert np.allclose(p @ p, p, atol=1e-10)
    assert np.trace(p).real == pytest.approx(2.0)
    with pytest.raises(ValueError):
        frac_power(rho, 1.5)


def test_partial_trace_of_product(rng):
    ra, rb = random_density(2, rng=rng), random_density(3, rng=rng)
    s = product_state(ra, rb)
    assert np.allclose(s.rho_a.matrix, ra.matrix)
    assert np.allclose(s.rho_b.matrix, rb.matrix)
    assert np.allclose(partial_trace(s, "b").matrix, rb.matrix)
    with pytest.raises(ValueError):
        partial_trace(s, "C")


def test_ptrace_is_adjoint_of_tensoring_identity(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = hs_inner(x, ptrace(m, 2, 3, "A"))
    rhs = hs_inner(kron(x, np.eye(3)), m)
    assert lhs == pytest.approx(rhs)
    with pytest.raises(DimensionMismatch):
        ptrace(m, 2, 2, "A")


def test_maximally_entangled_marginals():
    s = maximally_entangled(3)
    assert np.allclose(s.rho_a.matrix, np.eye(3) / 3)
    assert s.state.purity() == pytest.approx(1.0)


def test_bipartite_dimension_check():
    with pytest.raises(DimensionMismatch):
        BipartiteState(2, 3, DensityMatrix(np.eye(4) / 4))


def test_is_unitary(rng):
    assert is_unitary(haar_unitary(4, rng))
    assert not is_unitary(np.ones((2, 2)))


def test_random_bipartite_is_valid(rng):
    s = random_bipartite(2, 3, rng=rng)
    assert s.state.dim == 6
    assert np.trace(s.matrix).real == pytest.approx(1.0)
