"""Random ensembles and Monte Carlo estimation of the twirled correlation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import QuantumChannel
from .linalg import BipartiteState, DensityMatrix, frac_power, hermitize
from .measures import _alpha


class SeededRng:
    """Seeded PCG64 stream.

    ``spawn(i)`` gives worker ``i`` an independent stream that depends only
    on ``(seed, i)``.
    """

    algorithm = "PCG64"

    def __init__(self, seed: int = 0, _key: tuple = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._key = _key
        self.generator = np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=_key)))

    def spawn(self, i: int) -> "SeededRng":
        return SeededRng(self.seed, self._key + (int(i),))

    def __repr__(self):
        return f"SeededRng(seed={self.seed}, key={self._key}, algorithm={self.algorithm!r})"


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    return SeededRng(0 if rng is None else rng).generator


def ginibre(shape, rng) -> np.ndarray:
    g = _gen(rng)
    return (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2.0)


def _qr_haar(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    # without this phase fix Q is not Haar distributed
    return q * phases[..., None, :]


def haar_unitary(d: int, rng, size: int | None = None) -> np.ndarray:
    """Haar-random ``d x d`` unitary (or a stack of ``size`` of them)."""
    shape = (d, d) if size is None else (size, d, d)
    return _qr_haar(ginibre(shape, rng))


def random_density(d: int, rank: int | None = None, rng=None) -> DensityMatrix:
    """``G G^dagger / tr(G G^dagger)`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    g = ginibre((d, rank), rng)
    m = g @ g.conj().T
    return DensityMatrix(hermitize(m / np.trace(m).real))


def random_bipartite(d_a: int, d_b: int, rank: int | None = None, rng=None) -> BipartiteState:
    return BipartiteState(d_a, d_b, random_density(d_a * d_b, rank, rng))


def random_channel(d: int, kraus_count: int, rng) -> QuantumChannel:
    """Kraus blocks of a Haar-random isometry from ``d`` into ``d * kraus_count``."""
    if kraus_count < 1:
        raise ValueError("need at least one Kraus operator")
    v = _qr_haar(ginibre((d * kraus_count, d), rng))
    return QuantumChannel([v[i * d:(i + 1) * d, :] for i in range(kraus_count)])


def random_probabilities(n: int, rng) -> np.ndarray:
    e = _gen(rng).exponential(size=n)
    return e / e.sum()


def random_classical_quantum(d_a: int, d_b: int, rng) -> BipartiteState:
    """``sum_j p_j |j><j| (x) rho_j`` in the computational basis of A."""
    p = random_probabilities(d_a, rng)
    m = np.zeros((d_a * d_b, d_a * d_b), dtype=complex)
    for j in range(d_a):
        proj = np.zeros((d_a, d_a))
        proj[j, j] = 1.0
        m += p[j] * np.kron(proj, random_density(d_b, rng=rng).matrix)
    return BipartiteState(d_a, d_b, DensityMatrix(m))


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n_samples: int
    # sum of squared deviations; kept so estimates can be pooled exactly
    m2: float = 0.0

    @classmethod
    def from_samples(cls, x) -> "McEstimate":
        x = np.asarray(x, dtype=float)
        n = x.size
        if n < 2:
            raise ValueError("need at least two samples")
        mean = float(x.mean())
        m2 = float(np.sum((x - mean) ** 2))
        return cls(mean, float(np.sqrt(m2 / (n - 1)) / np.sqrt(n)), n, m2)

    def merge(self, other: "McEstimate") -> "McEstimate":
        """Pooled estimate over the union of both sample sets."""
        n = self.n_samples + other.n_samples
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n_samples / n
        m2 = self.m2 + other.m2 + delta**2 * self.n_samples * other.n_samples / n
        return McEstimate(mean, float(np.sqrt(m2 / (n - 1)) / np.sqrt(n)), n, m2)

    def consistent_with(self, value: float, k: float = 4.0) -> bool:
        return abs(self.mean - value) <= k * self.stderr


def twirl_integrand(state: BipartiteState, alpha: float, unitaries: np.ndarray) -> np.ndarray:
    """Per-unitary difference of the local and global overlaps.

    For each ``U``: ``tr(rho_A^a U rho_A^(1-a) U^dagger) -
    tr(rho^a (U (x) I) rho^(1-a) (U^dagger (x) I))``.
    """
    da, db = state.dim_a, state.dim_b
    la, lb = frac_power(state.rho_a, alpha), frac_power(state.rho_a, 1.0 - alpha)
    ga = frac_power(state.state, alpha).reshape(da, db, da, db)
    gb = frac_power(state.state, 1.0 - alpha).reshape(da, db, da, db)
    u = unitaries
    ud = np.conj(np.swapaxes(u, -1, -2))
    loc = np.einsum("ij,njk,kl,nli->n", la, u, lb, ud, optimize=True)
    # (U x I) gb (U^dagger x I), contracted against ga
    rot = np.einsum("njk,kclb,nli->njcib", u, gb, ud, optimize=True)
    glob = np.einsum("ibjc,njcib->n", ga, rot, optimize=True)
    return (loc - glob).real


def mc_twirl_corr(state: BipartiteState, params, n: int = 20000, rng=None, batch: int = 4096) -> McEstimate:
    """Monte Carlo estimate of the twirled correlation over ``n`` Haar unitaries on A."""
    if n < 2:
        raise ValueError("need n >= 2")
    a = _alpha(params)
    g = _gen(rng)
    samples = []
    done = 0
    while done < n:
        m = min(batch, n - done)
        samples.append(twirl_integrand(state, a, haar_unitary(state.dim_a, g, size=m)))
        done += m
    return McEstimate.from_samples(np.concatenate(samples))
