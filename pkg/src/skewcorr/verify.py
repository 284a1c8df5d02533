"""Randomized verification of the structural properties of the measures.

Every property draws fresh instances from a per-instance seed derived from
``(seed, property index, instance index)``, so a failure can be replayed in
isolation with :func:`run_instance`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import channels as ch
from . import measures as ms
from . import optimize as opt
from . import sampling as sp
from .linalg import BipartiteState, DensityMatrix, frac_power, kron, product_state, ptrace


@dataclass
class VerifyConfig:
    instances: int = 200
    max_dim: int = 4
    seed: int = 42
    tol: float = 1e-8
    alpha: float | None = None
    allow_nontp: bool = False
    opt_instances: int = 3
    opt_budget: opt.OptBudget = field(default_factory=lambda: opt.OptBudget(restarts=8, max_evals=2000))


@dataclass
class Property:
    key: str
    title: str
    check: Callable
    optimizer: bool = False


@dataclass
class Outcome:
    key: str
    passed: int
    total: int
    first_failure: tuple | None = None  # (instance index, instance seed, details)

    @property
    def ok(self) -> bool:
        return self.passed == self.total


EXACT_TOL = 1e-10
OPT_TOL = 1e-5


class Instance:
    """Random-draw helper bound to one instance's generator."""

    def __init__(self, seed: int, cfg: VerifyConfig):
        self.seed = seed
        self.cfg = cfg
        self.g = sp.SeededRng(seed).generator

    def dim(self, hi=None):
        return int(self.g.integers(2, (hi or self.cfg.max_dim) + 1))

    def alpha(self):
        return self.cfg.alpha if self.cfg.alpha is not None else float(self.g.uniform(0.05, 0.95))

    def state(self, d, rank=None):
        return sp.random_density(d, rank, self.g)

    def bipartite(self, da, db):
        return BipartiteState(da, db, self.state(da * db))

    def channel(self, d):
        phi = sp.random_channel(d, int(self.g.integers(1, 5)), self.g)
        if self.cfg.allow_nontp:
            # fault injection: completeness broken by ~1e-3
            return ch.KrausMap([np.sqrt(1.0 + 1e-3) * k for k in phi.kraus_ops])
        return phi

    def unitary(self, d):
        return sp.haar_unitary(d, self.g)


def _dual_form(rho, phi, a):
    """Kraus-sum value and closed-form value of the channel skew information."""
    r = DensityMatrix(np.asarray(rho)) if not isinstance(rho, DensityMatrix) else rho
    total = ms.mwyd_channel(r, ch.KrausMap(phi.kraus_ops), a)
    closed = 1.0 - ms.channel_overlap(r, phi, a)
    return total, closed


# -- channel skew information ----------------------------------------------

def t1_bounds(x: Instance):
    d, a = x.dim(), x.alpha()
    rho, phi = x.state(d), x.channel(d)
    t, closed = _dual_form(rho, phi, a)
    tol = x.cfg.tol
    ok = -tol <= t <= 1 + tol and abs(t - closed) <= tol
    return ok, {"d": d, "alpha": a, "T": t, "closed_form": closed}


def t1_ancilla(x: Instance):
    da, db, a = x.dim(), x.dim(), x.alpha()
    ra, rb, phi = x.state(da), x.state(db), x.channel(da)
    lhs = ms.mwyd_channel(product_state(ra, rb).state, ch.lift_left(phi, db), a)
    rhs = ms.mwyd_channel(ra, phi, a)
    return abs(lhs - rhs) <= x.cfg.tol, {"T_AB": lhs, "T_A": rhs}


def t1_covariance(x: Instance):
    d, a = x.dim(), x.alpha()
    rho, phi, u = x.state(d), x.channel(d), x.unitary(d)
    lhs = ms.mwyd_channel(u @ rho.matrix @ u.conj().T, phi, a)
    rhs = ms.mwyd_channel(rho, ch.conjugate(phi, u), a)
    return abs(lhs - rhs) <= x.cfg.tol, {"T(U rho U+, Phi)": lhs, "T(rho, U+ Phi U)": rhs}


def t1_linearity(x: Instance):
    d, a = x.dim(), x.alpha()
    rho, p1, p2 = x.state(d), x.channel(d), x.channel(d)
    c1, c2 = x.g.uniform(0.1, 2.0, size=2)
    lhs = ms.mwyd_channel(rho, ch.positive_mix([c1, c2], [p1, p2]), a)
    rhs = c1 * ms.mwyd_channel(rho, p1, a) + c2 * ms.mwyd_channel(rho, p2, a)
    return abs(lhs - rhs) <= x.cfg.tol, {"mix": lhs, "sum": rhs, "c": (c1, c2)}


def t1_partial_trace(x: Instance):
    da, db, a = x.dim(), x.dim(), x.alpha()
    s, phi = x.bipartite(da, db), x.channel(da)
    glob = ms.mwyd_channel(s.state, ch.lift_left(phi, db), a)
    loc = ms.mwyd_channel(s.rho_a, phi, a)
    return glob >= loc - x.cfg.tol, {"T_AB": glob, "T_A": loc}


def t1_convexity(x: Instance):
    d, a = x.dim(), x.alpha()
    phi = x.channel(d)
    rhos = [x.state(d) for _ in range(3)]
    p = sp.random_probabilities(3, x.g)
    mix = DensityMatrix(sum(pj * r.matrix for pj, r in zip(p, rhos)))
    avg = sum(pj * ms.mwyd_channel(r, phi, a) for pj, r in zip(p, rhos))
    val = ms.mwyd_channel(mix, phi, a)
    return avg >= val - x.cfg.tol, {"average": avg, "of_mixture": val}


ALPHA_GRID = np.linspace(0.0, 1.0, 21)


def _overlap_curve(x: Instance):
    d = x.dim()
    rho, phi = x.state(d), x.channel(d)
    return d, np.array([ms.channel_overlap(rho, phi, t) for t in ALPHA_GRID])


def f_convexity(x: Instance):
    d, f = _overlap_curve(x)
    second = f[:-2] + f[2:] - 2 * f[1:-1]
    ok = second.min() >= -x.cfg.tol and abs(f[0] - 1.0) <= x.cfg.tol
    return ok, {"d": d, "min_second_difference": second.min(), "F(0)": f[0]}


def f_endpoint(x: Instance):
    d, f = _overlap_curve(x)
    return f[-1] <= 1.0 + x.cfg.tol, {"d": d, "F(1)": f[-1]}


# -- correlation measures ---------------------------------------------------

def _dt(s, phi, a):
    glob, loc = ms.corr_terms(s, phi, a)
    return glob - loc


def t2_nonnegative(x: Instance):
    hi = min(3, x.cfg.max_dim)
    da, db, a = x.dim(hi), x.dim(hi), x.alpha()
    s, phi = x.bipartite(da, db), x.channel(da)
    prod = product_state(x.state(da), x.state(db))
    v, v0 = _dt(s, phi, a), _dt(prod, phi, a)
    return v >= -x.cfg.tol and abs(v0) <= x.cfg.tol, {"D": v, "D_product": v0}


def t2_covariance(x: Instance):
    hi = min(3, x.cfg.max_dim)
    da, db, a = x.dim(hi), x.dim(hi), x.alpha()
    s, phi = x.bipartite(da, db), x.channel(da)
    ua, ub = x.unitary(da), x.unitary(db)
    u = kron(ua, ub)
    rotated = BipartiteState(da, db, DensityMatrix(u @ s.matrix @ u.conj().T))
    lhs = _dt(rotated, phi, a)
    rhs = _dt(s, ch.conjugate(phi, ua), a)
    return abs(lhs - rhs) <= x.cfg.tol, {"lhs": lhs, "rhs": rhs}


def t2_contractivity(x: Instance):
    hi = min(3, x.cfg.max_dim)
    da, db, a = x.dim(hi), x.dim(hi), x.alpha()
    s, phi = x.bipartite(da, db), x.channel(da)
    phi_b = sp.random_channel(db, int(x.g.integers(1, 5)), x.g)
    after = BipartiteState(da, db, DensityMatrix(ch.apply(ch.lift_right(da, phi_b), s.matrix)))
    v0, v1 = _dt(s, phi, a), _dt(after, phi, a)
    return v1 <= v0 + x.cfg.tol, {"before": v0, "after": v1}


# -- identities --------------------------------------------------------------

def herm_collapse(x: Instance):
    d, a = x.dim(), x.alpha()
    rho = x.state(d)
    z = x.g.standard_normal((d, d)) + 1j * x.g.standard_normal((d, d))
    h = z + z.conj().T
    gi, ti = ms.gwyd_skew(rho, h, a), ms.mwyd_skew(rho, h, a)
    return abs(gi - ti) <= EXACT_TOL, {"I": gi, "T": ti}


def pure_collapse(x: Instance):
    d, a = x.dim(), x.alpha()
    rho = x.state(d, rank=1)
    k = x.g.standard_normal((d, d)) + 1j * x.g.standard_normal((d, d))
    t, v = ms.mwyd_skew(rho, k, a), ms.variance(rho, k)
    return abs(t - v) <= EXACT_TOL, {"T": t, "V": v}


def alpha_half(x: Instance):
    da, db = x.dim(), x.dim()
    s, phi = x.bipartite(da, db), x.channel(da)
    dt, di = _dt(s, phi, 0.5), ms.corr_terms(s, phi, 0.5, ms.gwyd_channel)
    di = di[0] - di[1]
    return abs(dt - di) <= EXACT_TOL, {"D_T": dt, "D_I": di}


def projective_identity(x: Instance):
    d, a = x.dim(), x.alpha()
    rho = x.state(d)
    basis = ch.MeasurementBasis(x.unitary(d))
    lhs = ms.projective_skew(rho, basis, a)
    rhs = ms.gwyd_channel(rho, ch.projective_channel(basis), a)
    return abs(lhs - rhs) <= EXACT_TOL, {"diagonal_formula": lhs, "I_channel": rhs}


def twirl_identity(x: Instance):
    da, db, a = x.dim(), x.dim(), x.alpha()
    s = x.bipartite(da, db)
    closed = ms.twirl_corr_closed(s, a)
    dep = _dt(s, ch.depolarizing_channel(da), a)
    return abs(closed - dep) <= EXACT_TOL, {"closed": closed, "depolarizing": dep}


# -- optimized measures ------------------------------------------------------

def _opt_values(s, a, budget):
    return {
        "max-proj": opt.max_corr_projective(s, a, budget).value,
        "min-proj": opt.min_corr_projective(s, a, budget).value,
        "max-unitary": opt.max_corr_unitary(s, a, budget).value,
    }


def c_order(x: Instance):
    s, a = x.bipartite(2, 2), x.alpha()
    b = x.cfg.opt_budget
    hi, lo = opt.max_corr_projective(s, a, b), opt.min_corr_projective(s, a, b)
    ok = hi.value >= lo.value - 1e-9 and lo.value >= -1e-9
    for r, sign in ((hi, 1), (lo, -1)):
        vals = [sign * v for _, v in r.trace]
        ok &= all(v1 >= v0 for v0, v1 in zip(vals, vals[1:]))
    return ok, {"max": hi.value, "min": lo.value}


def c_covariance(x: Instance):
    s, a = x.bipartite(2, 2), x.alpha()
    u = kron(x.unitary(2), x.unitary(2))
    rotated = BipartiteState(2, 2, DensityMatrix(u @ s.matrix @ u.conj().T))
    v0, v1 = _opt_values(s, a, x.cfg.opt_budget), _opt_values(rotated, a, x.cfg.opt_budget)
    worst = max(abs(v0[k] - v1[k]) for k in v0)
    return worst <= OPT_TOL, {"before": v0, "after": v1}


def c_contractivity(x: Instance):
    s, a = x.bipartite(2, 2), x.alpha()
    phi_b = sp.random_channel(2, int(x.g.integers(1, 5)), x.g)
    after = BipartiteState(2, 2, DensityMatrix(ch.apply(ch.lift_right(2, phi_b), s.matrix)))
    v0, v1 = _opt_values(s, a, x.cfg.opt_budget), _opt_values(after, a, x.cfg.opt_budget)
    worst = max(v1[k] - v0[k] for k in v0)
    return worst <= OPT_TOL, {"before": v0, "after": v1}


PROPERTIES = [
    Property("T1-i", "skew information within [0, 1]", t1_bounds),
    Property("T1-ii", "ancillary independence", t1_ancilla),
    Property("T1-iii", "unitary covariance", t1_covariance),
    Property("T1-iv", "positive linearity in the channel", t1_linearity),
    Property("T1-v", "monotone under partial trace", t1_partial_trace),
    Property("T1-vi", "convex in the state", t1_convexity),
    Property("F-convex", "overlap convex in alpha, F(0) = 1", f_convexity),
    Property("F-end", "overlap F(1) <= 1", f_endpoint),
    Property("T2-i", "correlation non-negative, zero on products", t2_nonnegative),
    Property("T2-ii", "local unitary covariance", t2_covariance),
    Property("T2-iii", "contractive under channels on B", t2_contractivity),
    Property("herm", "Hermitian operator: T = I", herm_collapse),
    Property("pure", "pure state: T = V", pure_collapse),
    Property("half", "alpha = 1/2: D_T = D_I", alpha_half),
    Property("proj", "measurement skew: diagonal formula = I", projective_identity),
    Property("twirl", "twirl closed form = depolarizing", twirl_identity),
    Property("C-order", "max >= min >= 0 over measurements", c_order, optimizer=True),
    Property("C-cov", "optimized values invariant under local unitaries", c_covariance, optimizer=True),
    Property("C-contr", "optimized values contractive under channels on B", c_contractivity, optimizer=True),
]


def instance_seed(seed: int, prop_index: int, i: int) -> int:
    ss = np.random.SeedSequence([seed, prop_index, i])
    return int(ss.generate_state(1, np.uint64)[0])


def run_instance(key: str, seed: int, cfg: VerifyConfig | None = None):
    """Replay one instance of property ``key`` from its instance seed."""
    cfg = cfg or VerifyConfig()
    prop = next(p for p in PROPERTIES if p.key == key)
    return prop.check(Instance(seed, cfg))


def run_property(index: int, cfg: VerifyConfig) -> Outcome:
    prop = PROPERTIES[index]
    n = min(cfg.instances, cfg.opt_instances) if prop.optimizer else cfg.instances
    passed = 0
    first = None
    for i in range(n):
        s = instance_seed(cfg.seed, index, i)
        try:
            ok, info = prop.check(Instance(s, cfg))
        except ArithmeticError as exc:
            ok, info = False, {"error": str(exc)}
        passed += bool(ok)
        if not ok and first is None:
            first = (i, s, info)
    return Outcome(prop.key, passed, n, first)


def run_suite(cfg: VerifyConfig, keys=None) -> list[Outcome]:
    return [run_property(i, cfg) for i, p in enumerate(PROPERTIES) if keys is None or p.key in keys]


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".12g")
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (tuple, list)):
        return "(" + ", ".join(_fmt(float(x)) if isinstance(x, (float, np.floating)) else _fmt(x) for x in v) + ")"
    if isinstance(v, np.floating):
        return format(float(v), ".12g")
    return str(v)


def format_report(cfg: VerifyConfig, outcomes: list[Outcome]) -> str:
    titles = {p.key: p.title for p in PROPERTIES}
    lines = [
        f"verify: seed={cfg.seed} instances={cfg.instances} max_dim={cfg.max_dim} tol={cfg.tol:g}"
        + (f" alpha={cfg.alpha:g}" if cfg.alpha is not None else "")
        + (" allow_nontp" if cfg.allow_nontp else "")
    ]
    for o in outcomes:
        lines.append(f"{o.key:<9}{titles[o.key]:<52}{o.passed:>4}/{o.total:<4} {'PASS' if o.ok else 'FAIL'}")
    failed = [o for o in outcomes if not o.ok]
    if failed:
        o = failed[0]
        i, s, info = o.first_failure
        lines.append(f"first failure: {o.key} instance {i} seed {s}: {_fmt(info)}")
    lines.append(f"{len(outcomes) - len(failed)}/{len(outcomes)} properties passed")
    return "\n".join(lines)
