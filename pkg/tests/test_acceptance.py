"""Acceptance suite: one test and one summary line per criterion."""

import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import grid_objective, grid_optimum
from skewcorr import channels as ch
from skewcorr import measures as ms
from skewcorr import optimize as opt
from skewcorr import verify as vf
from skewcorr.cli import sweep_rows
from skewcorr.linalg import maximally_entangled, product_state, ptrace
from skewcorr.sampling import (
    McEstimate,
    SeededRng,
    ginibre,
    haar_unitary,
    mc_twirl_corr,
    random_bipartite,
    random_classical_quantum,
    random_density,
)

N_MC = 20000


def _suite(keys, **kw):
    cfg = vf.VerifyConfig(**kw)
    outcomes = vf.run_suite(cfg, set(keys))
    return outcomes, ", ".join(f"{o.key} {o.passed}/{o.total}" for o in outcomes)


def test_skew_information_suite(report):
    start = time.perf_counter()
    outcomes, summary = _suite(["T1-i", "T1-ii", "T1-iii", "T1-iv", "T1-v", "T1-vi"], instances=200, max_dim=4, tol=1e-8)
    elapsed = time.perf_counter() - start
    ok = all(o.ok for o in outcomes) and elapsed < 30
    detail = f"{summary}; {elapsed:.1f}s"
    bad = next((o for o in outcomes if not o.ok), None)
    if bad is not None:
        detail += f"; first failure {bad.key} seed {bad.first_failure[1]}: T = {bad.first_failure[2].get('T', float('nan')):.3e}"
    assert report(1, ok, detail)


def test_correlation_suite(report):
    outcomes, summary = _suite(["T2-i", "T2-ii", "T2-iii"], instances=200, max_dim=3, tol=1e-8)
    assert report(2, all(o.ok for o in outcomes), summary)


def test_twirl_closed_form(report):
    g = SeededRng(303).generator
    worst = 0.0
    for _ in range(100):
        da, db = int(g.integers(2, 4)), int(g.integers(2, 4))
        s, a = random_bipartite(da, db, rng=g), float(g.uniform(0.05, 0.95))
        worst = max(worst, abs(ms.twirl_corr_closed(s, a) - ms.corr_t(s, ch.depolarizing_channel(da), a)))
    mc_ok = 0
    for i in range(10):
        s = random_bipartite(2, 2 + i % 2, rng=SeededRng(310 + i))
        est = mc_twirl_corr(s, 0.5, n=N_MC, rng=SeededRng(320 + i))
        mc_ok += est.consistent_with(ms.twirl_corr_closed(s, 0.5), 4.0)
    ok = worst <= 1e-10 and mc_ok == 10
    assert report(3, ok, f"closed vs depolarizing max diff {worst:.1e}; Monte Carlo {mc_ok}/10 within 4 stderr")


def test_example1_alpha_sweep(report):
    rows = np.array(sweep_rows(np.linspace(0.05, 0.95, 19), [0.25]))
    alpha, dt, d = rows[:, 0], rows[:, 2], rows[:, 3]
    lo, hi, mid = alpha < 0.5, alpha > 0.5, np.isclose(alpha, 0.5)
    checks = {
        "dt increasing": np.all(np.diff(dt) > 0),
        "d decreasing below 1/2": np.all(np.diff(d[alpha <= 0.5]) < 0),
        "d increasing above 1/2": np.all(np.diff(d[alpha >= 0.5]) > 0),
        "dt = d at 1/2": abs(dt[mid] - d[mid]).max() <= 1e-10,
        "dt >= d above 1/2": np.all(dt[hi] >= d[hi] - 1e-10),
        "d >= dt below 1/2": np.all(d[lo] >= dt[lo] - 1e-10),
    }
    failed = [k for k, v in checks.items() if not v]
    assert report(4, not failed, "all shape checks hold" if not failed else "failed: " + ", ".join(failed))


def test_example1_p_sweep(report):
    rows = np.array(sweep_rows([0.75], np.linspace(0.0, 1.0, 11)))
    dt, d = rows[:, 2], rows[:, 3]
    checks = {
        "dt increasing": np.all(np.diff(dt) > 0),
        "d increasing": np.all(np.diff(d) > 0),
        "dt >= d": np.all(dt >= d - 1e-10),
        "dt(0) = 0": abs(dt[0]) <= 1e-10,
    }
    failed = [k for k, v in checks.items() if not v]
    assert report(5, not failed, "all shape checks hold" if not failed else "failed: " + ", ".join(failed))


def test_projective_identity(report):
    g = SeededRng(606).generator
    worst = 0.0
    for _ in range(100):
        d = int(g.integers(2, 5))
        rho, a = random_density(d, rng=g), float(g.uniform(0.05, 0.95))
        basis = ch.MeasurementBasis(haar_unitary(d, g))
        diff = ms.projective_skew(rho, basis, a) - ms.gwyd_channel(rho, ch.projective_channel(basis), a)
        worst = max(worst, abs(diff))
    assert report(6, worst <= 1e-10, f"max diff {worst:.1e} over 100 instances")


def _run(name, s, alpha=0.5):
    fn = opt.OBJECTIVES[name]
    return (fn(s) if name in opt.FIXED_HALF else fn(s, alpha)).value


@pytest.mark.slow
def test_optimizer_benchmarks(report):
    errs = {}
    errs["Bell geometric discord"] = abs(_run("geo-discord", maximally_entangled(2)) - 0.5)
    cq = random_classical_quantum(2, 2, SeededRng(700))
    errs["classical-quantum min-proj"] = abs(_run("min-proj", cq, 0.3))
    g = SeededRng(701).generator
    prod = product_state(random_density(2, rng=g), random_density(2, rng=g))
    errs["product max-proj"] = abs(_run("max-proj", prod, 0.3))
    errs["product max-unitary"] = abs(_run("max-unitary", prod, 0.3))
    bench_ok = all(v <= 1e-6 for v in errs.values())
    grid_err = 0.0
    for i in range(5):
        s = random_bipartite(2, 2, rng=SeededRng(710 + i))
        alpha = 0.25 + 0.1 * i
        for name in ("max-proj", "min-proj", "geo-discord", "max-unitary"):
            a = 0.5 if name in opt.FIXED_HALF else alpha
            want = grid_optimum(grid_objective(s.matrix, name, a), name.startswith("max"))
            grid_err = max(grid_err, abs(_run(name, s, a) - want))
    ok = bench_ok and grid_err <= 1e-4
    worst = max(errs.values())
    assert report(7, ok, f"benchmark max error {worst:.1e}; grid oracle max diff {grid_err:.1e} over 5 instances")


def test_collapse_identities(report):
    outcomes, summary = _suite(["herm", "pure"], instances=200)
    assert report(8, all(o.ok for o in outcomes), summary)


def _entrywise_ok(samples, target):
    flat = samples.reshape(len(samples), -1)
    parts = np.concatenate([flat.real, flat.imag], axis=1)
    t = np.concatenate([target.real.ravel(), target.imag.ravel()])
    return sum(McEstimate.from_samples(parts[:, j]).consistent_with(t[j]) for j in range(parts.shape[1])), len(t)


def test_haar_identities(report):
    g = SeededRng(909).generator
    d = 3
    x = ginibre((d, d), g)
    us = haar_unitary(d, g, size=N_MC)
    ys = np.einsum("nij,jk,nlk->nil", us, x, us.conj())
    ok1, n1 = _entrywise_ok(ys, np.trace(x) * np.eye(d) / d)
    da, db = 2, 3
    t = ginibre((da * db, da * db), g)
    us = haar_unitary(da, g, size=N_MC)
    zs = np.einsum("nij,jbkc,nlk->niblc", us, t.reshape(da, db, da, db), us.conj()).reshape(N_MC, da * db, da * db)
    ok2, n2 = _entrywise_ok(zs, np.kron(np.eye(da) / da, ptrace(t, da, db, "B")))
    assert report(9, ok1 == n1 and ok2 == n2, f"single-system {ok1}/{n1}, bipartite {ok2}/{n2} entries within 4 stderr")


def _cli(*argv):
    res = subprocess.run([sys.executable, "-m", "skewcorr", *argv], capture_output=True)
    return res.returncode, res.stdout


@pytest.mark.slow
def test_reproducibility(report):
    v1, v2 = _cli("verify", "--seed", "7"), _cli("verify", "--seed", "7")
    s1 = _cli("sweep-example1", "--p", "0:1:11", "--alpha", "0.05:0.95:19")
    s2 = _cli("sweep-example1", "--p", "0:1:11", "--alpha", "0.05:0.95:19")
    ok = v1 == v2 and s1 == s2 and s1[0] == 0 and len(v1[1]) > 0
    assert report(10, ok, f"verify identical: {v1 == v2} (exit {v1[0]}); sweep identical: {s1 == s2}")
