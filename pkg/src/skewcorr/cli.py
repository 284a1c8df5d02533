"""Command-line interface.

Exit codes: 0 success, 1 property failure, 2 validation error, 3 dimension
mismatch, 4 I/O error, 5 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import io as _io
import logging
import sys

import numpy as np

from . import channels as ch
from . import io
from . import measures as ms
from . import optimize as opt
from . import sampling as sp
from . import verify as vf
from .errors import DimensionMismatch, NonConvergence, ValidationError
from .linalg import BipartiteState, DensityMatrix, maximally_entangled, product_state

EXIT_OK, EXIT_PROPERTY, EXIT_VALIDATION, EXIT_DIMENSION, EXIT_IO, EXIT_NONCONVERGENCE = range(6)

SWEEP_HEADER = "alpha,p,dt,d,dt_closed,d_closed"


def fmt(x) -> str:
    return format(float(x), ".12g")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def parse_range(text: str, default_steps: int) -> np.ndarray:
    """``"v"`` -> ``[v]``; ``"a:b"`` or ``"a:b:n"`` -> ``linspace(a, b, n)``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) in (2, 3):
            n = int(parts[2]) if len(parts) == 3 else default_steps
            if n < 1:
                raise ValueError
            return np.linspace(float(parts[0]), float(parts[1]), n)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad range {text!r}; use V, A:B or A:B:N")


def _emit(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc


def _load_state(path) -> BipartiteState:
    try:
        return io.load_state(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


def _load_channel(path, allow_nontp) -> ch.KrausMap:
    try:
        return io.load_channel(path, allow_nontp)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc


# -- subcommands ---------------------------------------------------------------

def cmd_measure(args) -> int:
    state = _load_state(args.state)
    phi = _load_channel(args.channel, args.allow_nontp)
    if phi.dim != state.dim_a:
        raise DimensionMismatch(f"channel acts on dimension {phi.dim}, subsystem A has dimension {state.dim_a}")
    a = args.alpha
    t_glob, t_loc = ms.corr_terms(state, phi, a)
    i_glob, i_loc = ms.corr_terms(state, phi, a, ms.gwyd_channel)
    print(f"alpha        {fmt(a)}")
    print(f"T_global     {fmt(t_glob)}")
    print(f"T_local      {fmt(t_loc)}")
    print(f"D_T          {fmt(t_glob - t_loc)}")
    print(f"D_I          {fmt(i_glob - i_loc)}")
    if t_glob - t_loc < -ms.NEG_TOL:
        print("warning: D_T is negative", file=sys.stderr)
        return EXIT_PROPERTY
    return EXIT_OK


def sweep_rows(alphas, ps):
    state = ms.example1_state()
    rows = []
    for p in ps:
        phi = ch.amplitude_damping(float(p))
        for a in alphas:
            a = float(a)
            rows.append((a, float(p), ms.corr_t(state, phi, a), ms.corr_i(state, phi, a),
                         ms.example1_closed_dt(p, a), ms.example1_closed_d(p, a)))
    return rows


def format_sweep(rows) -> str:
    buf = _io.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def cmd_sweep(args) -> int:
    alphas = parse_range(args.alpha, args.steps)
    ps = parse_range(args.p, args.steps)
    if np.any((alphas <= 0) | (alphas >= 1)):
        raise ValidationError("alpha values must lie strictly inside (0, 1)")
    if np.any((ps < 0) | (ps > 1)):
        raise ValidationError("p values must lie in [0, 1]")
    _emit(format_sweep(sweep_rows(alphas, ps)), args.out)
    return EXIT_OK


def _budget(args) -> opt.OptBudget:
    return opt.OptBudget(args.restarts, args.max_evals, args.tol, args.seed)


def cmd_optimize(args) -> int:
    state = _load_state(args.state)
    fn = opt.OBJECTIVES[args.objective]
    budget = _budget(args)
    try:
        if args.objective in opt.FIXED_HALF:
            res = fn(state, budget)
            alpha = 0.5
        else:
            if args.alpha is None:
                raise ValidationError(f"--alpha is required for objective {args.objective}")
            res = fn(state, args.alpha, budget)
            alpha = args.alpha
    except NonConvergence as exc:
        raise CliError(str(exc), EXIT_NONCONVERGENCE) from exc
    print(f"objective    {args.objective}")
    print(f"alpha        {fmt(alpha)}")
    print(f"value        {fmt(res.value)}")
    print(f"restarts     {res.restarts_used}")
    print(f"converged    {res.n_converged}/{res.restarts_used}")
    print("unitary")
    for row in res.unitary:
        print("  " + "  ".join(f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j" for z in row))
    return EXIT_OK


def cmd_twirl(args) -> int:
    state = _load_state(args.state)
    a = args.alpha
    closed = ms.twirl_corr_closed(state, a)
    dep = ms.corr_t(state, ch.depolarizing_channel(state.dim_a), a)
    est = sp.mc_twirl_corr(state, a, args.n, sp.SeededRng(args.seed))
    ok = est.consistent_with(closed, 4.0)
    print(f"alpha          {fmt(a)}")
    print(f"closed_form    {fmt(closed)}")
    print(f"depolarizing   {fmt(dep)}")
    print(f"monte_carlo    {fmt(est.mean)} +/- {fmt(est.stderr)} (n={est.n_samples}, seed={args.seed})")
    print(f"consistency    {'PASS' if ok else 'FAIL'} (|mc - closed| = {fmt(abs(est.mean - closed))}, 4*stderr = {fmt(4 * est.stderr)})")
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_verify(args) -> int:
    cfg = vf.VerifyConfig(
        instances=args.n, max_dim=args.dims, seed=args.seed, tol=args.tol, alpha=args.alpha,
        allow_nontp=args.allow_nontp, opt_instances=args.opt_instances,
        opt_budget=opt.OptBudget(args.restarts, args.max_evals, 1e-9, args.seed),
    )
    keys = set(args.only.split(",")) if args.only else None
    if keys:
        unknown = keys - {p.key for p in vf.PROPERTIES}
        if unknown:
            raise ValidationError(f"unknown properties: {', '.join(sorted(unknown))}")
    outcomes = vf.run_suite(cfg, keys)
    _emit(vf.format_report(cfg, outcomes) + "\n", args.out)
    return EXIT_OK if all(o.ok for o in outcomes) else EXIT_PROPERTY


GEN_KINDS = ("density", "channel", "cq-state", "bell", "example1", "product", "depolarizing", "amplitude-damping")


def cmd_gen(args) -> int:
    rng = sp.SeededRng(args.seed)
    dims = args.dims
    kind = args.kind

    def need(n):
        if len(dims) != n:
            raise ValidationError(f"gen {kind} takes {n} dimension(s), got {len(dims)}")

    state = phi = None
    if kind == "density":
        if len(dims) == 1:
            dims = [dims[0], 1]
        need(2)
        state = BipartiteState(dims[0], dims[1], sp.random_density(dims[0] * dims[1], args.rank, rng))
    elif kind == "product":
        need(2)
        state = product_state(sp.random_density(dims[0], rng=rng), sp.random_density(dims[1], rng=rng))
    elif kind == "cq-state":
        need(2)
        state = sp.random_classical_quantum(dims[0], dims[1], rng)
    elif kind == "bell":
        if not dims:
            dims = [2, 2]
        need(2)
        if dims[0] != dims[1]:
            raise DimensionMismatch("bell state needs equal dimensions")
        state = maximally_entangled(dims[0])
    elif kind == "example1":
        need(0)
        state = ms.example1_state()
    elif kind == "channel":
        need(1)
        phi = sp.random_channel(dims[0], args.kraus, rng)
    elif kind == "depolarizing":
        need(1)
        phi = ch.depolarizing_channel(dims[0])
    elif kind == "amplitude-damping":
        need(0)
        phi = ch.amplitude_damping(args.p)
    out = args.out if args.out and args.out != "-" else sys.stdout
    try:
        if state is not None:
            io.save_state(out, state)
        else:
            io.save_channel(out, phi)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", EXIT_IO) from exc
    return EXIT_OK


# -- parser ----------------------------------------------------------------------

def _alpha(text):
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie strictly inside (0, 1), got {text}")
    return v


def _add_budget(p, restarts=32):
    p.add_argument("--restarts", type=int, default=restarts, help="optimizer restarts (default %(default)s)")
    p.add_argument("--max-evals", type=int, default=2000, help="objective evaluations per restart")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewcorr", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="evaluate skew informations and correlations of a state")
    p.add_argument("state")
    p.add_argument("channel", help="channel file acting on subsystem A")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--allow-nontp", action="store_true", help="accept non-trace-preserving Kraus maps")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep-example1", help="CSV sweep of the amplitude-damping worked example")
    p.add_argument("--alpha", default="0.05:0.95:19", help="V, A:B or A:B:N (default %(default)s)")
    p.add_argument("--p", default="0.25", help="V, A:B or A:B:N (default %(default)s)")
    p.add_argument("--steps", type=int, default=19, help="grid points for ranges given as A:B")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="optimize a correlation over local measurements or unitaries")
    p.add_argument("state")
    p.add_argument("--objective", choices=sorted(opt.OBJECTIVES), required=True)
    p.add_argument("--alpha", type=_alpha)
    _add_budget(p)
    p.add_argument("--tol", type=float, default=1e-9, help="simplex convergence tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("twirl", help="closed form, depolarizing and Monte Carlo twirl correlation")
    p.add_argument("state")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--n", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_twirl)

    p = sub.add_parser("verify", help="randomized property suite")
    p.add_argument("--n", type=int, default=200, help="instances per property")
    p.add_argument("--dims", type=int, default=4, help="maximum subsystem dimension")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--alpha", type=_alpha, help="pin alpha instead of sampling it")
    p.add_argument("--allow-nontp", action="store_true", help="inject channels with broken completeness")
    p.add_argument("--opt-instances", type=int, default=3, help="instances for optimizer properties")
    p.add_argument("--only", help="comma-separated property keys")
    _add_budget(p, restarts=8)
    p.add_argument("--out", help="also write the summary here instead of stdout")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a state or channel file")
    p.add_argument("kind", choices=GEN_KINDS)
    p.add_argument("dims", nargs="*", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kraus", type=int, default=2, help="Kraus operators for random channels")
    p.add_argument("--rank", type=int, help="rank of a random density matrix")
    p.add_argument("--p", type=float, default=0.25, help="damping probability")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DimensionMismatch as exc:
        print(f"dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ValidationError as exc:
        print(f"validation failed [{exc.invariant}]: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ArithmeticError as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
