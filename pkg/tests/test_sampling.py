import numpy as np
import pytest

from skewcorr.linalg import is_unitary, ptrace
from skewcorr.measures import twirl_corr_closed
from skewcorr.sampling import (
    McEstimate,
    SeededRng,
    ginibre,
    haar_unitary,
    mc_twirl_corr,
    random_bipartite,
    random_classical_quantum,
    random_density,
    random_probabilities,
    twirl_integrand,
)

N = 20000


def entrywise(samples):
    """McEstimate for every real and imaginary entry of a stack of matrices."""
    flat = samples.reshape(len(samples), -1)
    parts = np.concatenate([flat.real, flat.imag], axis=1)
    return [McEstimate.from_samples(parts[:, j]) for j in range(parts.shape[1])]


def within(estimates, target):
    t = np.concatenate([target.real.ravel(), target.imag.ravel()])
    return all(e.consistent_with(v) for e, v in zip(estimates, t))


def test_seeded_rng_streams():
    a = SeededRng(7).spawn(3).generator.standard_normal(4)
    b = SeededRng(7).spawn(3).generator.standard_normal(4)
    c = SeededRng(7).spawn(4).generator.standard_normal(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert "7" in repr(SeededRng(7))


def test_haar_unitaries_are_unitary():
    us = haar_unitary(4, SeededRng(1), size=50)
    assert us.shape == (50, 4, 4)
    assert all(is_unitary(u) for u in us)


def test_haar_first_moment_vanishes():
    us = haar_unitary(3, SeededRng(2), size=N)
    assert within(entrywise(us), np.zeros((3, 3)))


def test_haar_phase_is_uniform():
    # Without the QR phase fix the diagonal of R biases U towards positive real diagonals.
    us = haar_unitary(2, SeededRng(3), size=N)
    est = McEstimate.from_samples(us[:, 0, 0].real)
    assert est.consistent_with(0.0)


@pytest.mark.parametrize("d", [2, 3])
def test_haar_twirl_of_operator(d):
    g = SeededRng(4).generator
    x = ginibre((d, d), g)
    us = haar_unitary(d, g, size=N)
    ys = np.einsum("nij,jk,nlk->nil", us, x, us.conj())
    assert within(entrywise(ys), np.trace(x) * np.eye(d) / d)


def test_haar_twirl_of_bipartite_operator():
    g = SeededRng(5).generator
    da, db = 2, 2
    t = ginibre((da * db, da * db), g).reshape(da, db, da, db)
    us = haar_unitary(da, g, size=N)
    ys = np.einsum("nij,jbkc,nlk->niblc", us, t, us.conj())
    ys = ys.reshape(N, da * db, da * db)
    target = np.kron(np.eye(da) / da, ptrace(t.reshape(4, 4), da, db, "B"))
    assert within(entrywise(ys), target)


def test_random_density_rank():
    rho = random_density(4, rank=2, rng=SeededRng(6))
    assert np.count_nonzero(rho.eigenvalues) == 2
    with pytest.raises(ValueError):
        random_density(3, rank=5, rng=SeededRng(6))


def test_random_probabilities():
    p = random_probabilities(5, SeededRng(8))
    assert p.min() >= 0
    assert p.sum() == pytest.approx(1.0)


def test_classical_quantum_block_structure():
    s = random_classical_quantum(3, 2, SeededRng(9))
    t = s.matrix.reshape(3, 2, 3, 2)
    for i in range(3):
        for j in range(3):
            if i != j:
                assert np.allclose(t[i, :, j, :], 0)


def test_mc_estimate_merge_matches_pooled():
    x = SeededRng(10).generator.standard_normal(1000)
    whole = McEstimate.from_samples(x)
    merged = McEstimate.from_samples(x[:300]).merge(McEstimate.from_samples(x[300:]))
    assert merged.mean == pytest.approx(whole.mean)
    assert merged.stderr == pytest.approx(whole.stderr)
    assert merged.n_samples == 1000
    with pytest.raises(ValueError):
        McEstimate.from_samples([1.0])


def test_mc_stderr_scales_as_inverse_sqrt():
    s = random_bipartite(2, 2, rng=SeededRng(11))
    small = mc_twirl_corr(s, 0.5, n=2000, rng=SeededRng(12))
    large = mc_twirl_corr(s, 0.5, n=32000, rng=SeededRng(12))
    assert large.stderr / small.stderr == pytest.approx(0.25, rel=0.15)


def test_mc_twirl_is_deterministic():
    s = random_bipartite(2, 3, rng=SeededRng(13))
    a = mc_twirl_corr(s, 0.3, n=5000, rng=SeededRng(14), batch=1000)
    b = mc_twirl_corr(s, 0.3, n=5000, rng=SeededRng(14), batch=1000)
    assert a == b


def test_mc_twirl_matches_closed_form():
    s = random_bipartite(3, 2, rng=SeededRng(15))
    est = mc_twirl_corr(s, 0.7, n=N, rng=SeededRng(16))
    assert est.consistent_with(twirl_corr_closed(s, 0.7))


def test_twirl_integrand_identity_is_zero():
    s = random_bipartite(2, 2, rng=SeededRng(17))
    assert np.allclose(twirl_integrand(s, 0.5, np.eye(2)[None]), 0.0)
