"""Command-line entry point.

Every command prints ``key=value`` lines.  Exit status is 0 on success, 2 on
usage or configuration errors and 3 on runtime failures.
"""
from __future__ import annotations

import argparse
import math
import os
import secrets
import sys
from pathlib import Path

from . import dp, projection, search, sim
from .strategy import BUILTIN_NAMES, Strategy, builtin_from_spec, format_strategy, parse_strategy


class UsageError(Exception):
    pass


def _emit(out, **kv):
    for k, v in kv.items():
        if isinstance(v, float):
            v = f"{v:.12g}"
        out.write(f"{k}={v}\n")


def load_strategy(source: str, n: int | None) -> Strategy:
    """Builtin spec (``square:2``) or a path to a strategy file."""
    name = source.partition(":")[0]
    if name in BUILTIN_NAMES:
        if n is None:
            raise UsageError("--n is required for builtin strategies")
        return builtin_from_spec(source, n)
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"unknown strategy {source!r} (not a builtin name or an existing file)")
    s = parse_strategy(path.read_text(encoding="utf-8"))
    if n is not None and s.n != n:
        raise UsageError(f"strategy file is for n={s.n}, but --n {n} was given")
    return s


def _seed(args, out) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(63)
    return args.seed


def _write(path: str, data: bytes):
    Path(path).write_bytes(data)


def _policy(args, n):
    if args.policy == "scripted":
        if not args.strategy:
            raise UsageError("--policy scripted needs --strategy")
        return sim.Scripted(load_strategy(args.strategy, n))
    return sim.Adaptive(args.policy)


def cmd_weight(args, out):
    s = load_strategy(args.strategy, args.n)
    f = dp.capture_field(s)
    w = dp.WeightSummary(s.n, f.total())
    _emit(out, n=s.n, M=s.M, strategy=args.strategy, t=w.t, t_over_n2_8=w.t_scaled_sq, t_over_n32=w.t_scaled_32)
    if args.out:
        _write(args.out, dp.export_field(f, args.format, binary=not args.ascii))
        _emit(out, wrote=args.out)


def cmd_heatmap(args, out):
    if not args.out:
        raise UsageError("heatmap needs --out")
    s = load_strategy(args.strategy, args.n)
    f = dp.capture_field(s)
    _write(args.out, dp.export_field(f, args.format, binary=not args.ascii))
    _emit(out, n=s.n, M=s.M, strategy=args.strategy, format=args.format, wrote=args.out)


def cmd_project(args, out):
    s = load_strategy(args.strategy, args.n)
    r = projection.check_domination(s)
    _emit(
        out,
        n=s.n,
        M=s.M,
        strategy=args.strategy,
        min_q_minus_w=r.min_q_minus_w,
        argmin_q_minus_w=f"{r.argmin_q_minus_w[0]}:{r.argmin_q_minus_w[1]}",
        min_w_minus_z=r.min_w_minus_z,
        min_q_minus_z=r.min_q_minus_z,
        max_z_jump=r.max_z_jump,
        q_dominates_w=str(r.q_dominates_w()).lower(),
    )
    if args.out:
        if args.kind == "q":
            prof = projection.project(dp.capture_field(s))
        elif args.kind == "w":
            prof = projection.w_profile(s)
        else:
            prof = projection.z_profile(s)
        _write(args.out, projection.export_profile_csv(prof))
        _emit(out, wrote=args.out)


def cmd_simulate(args, out):
    seed = _seed(args, out)
    pol = _policy(args, args.n)
    horizon = args.horizon or args.n
    est = sim.estimate_capture_prob(args.n, args.k, pol, horizon, args.trials, seed, args.workers)
    _emit(out, n=args.n, k=args.k, policy=args.policy, horizon=horizon)
    _emit(out, captured_frac=est.p, ci_halfwidth=est.halfwidth, trials=est.trials, seed=seed)
    if args.log:
        lines: list[str] = []
        sim.play(args.n, args.k, pol, horizon, seed, trial=0, log=lines)
        _write(args.log, ("\n".join(lines) + "\n").encode("utf-8"))
        _emit(out, wrote=args.log)


def cmd_bracket(args, out):
    seed = _seed(args, out)
    pol = _policy(args, args.n)
    b = sim.bracket_zombie_number(args.n, pol, args.trials, seed, horizon=args.horizon, workers=args.workers)
    _emit(out, n=args.n, policy=args.policy, horizon=args.horizon or args.n)
    _emit(out, k_lo=b.k_lo, k_hi=b.k_hi, k_half=b.k_half, k_max=b.k_max, trials=args.trials, seed=seed)


def cmd_r3(args, out):
    seed = _seed(args, out)
    e = sim.r3_return_probability(args.y, args.trials, seed, args.workers)
    _emit(out, y=args.y, p=e.p, stderr=e.stderr, sqrt_y_p=math.sqrt(args.y) * e.p, trials=e.trials, seed=seed)


def cmd_lowerbound(args, out):
    seed = _seed(args, out)
    if args.omega_log:
        omega = math.log(args.n)
    elif args.omega is not None:
        omega = args.omega
    else:
        raise UsageError("give --omega or --omega-log")
    r = sim.diagonal_survival_experiment(args.n, omega, args.trials, seed, args.workers, horizon=args.horizon)
    _emit(out, n=r.n, omega=omega, k=r.k, horizon=r.horizon)
    _emit(out, survival_frac=r.survival_frac, ci_halfwidth=r.halfwidth, trials=r.trials, seed=seed)


def cmd_search(args, out):
    if args.exact is not None:
        r = search.exact_tn(args.exact)
        _emit(out, M=args.exact, best_t=r.best_t, evaluations=r.evaluations)
    else:
        seed = _seed(args, out)
        init = load_strategy(args.strategy, args.n)
        r = search.local_search(init.n, init, args.budget, seed, args.workers)
        _emit(out, n=init.n, init_t=r.history[0], best_t=r.best_t, evaluations=r.evaluations, seed=seed)
        _emit(out, t_over_n2_8=r.best_t / (init.n**2 / 8), t_over_n32=r.best_t / init.n**1.5)
    out.write(format_strategy(r.best_strategy))
    if args.out:
        _write(args.out, format_strategy(r.best_strategy).encode("utf-8"))


def cmd_sweep(args, out):
    ns = [int(v) for v in args.ns.split(",") if v]
    fit = search.scaling_sweep(args.strategy, ns, args.workers)
    for n, t in zip(fit.ns, fit.ts):
        _emit(out, **{f"t_{n}": t})
    _emit(out, strategy=args.strategy, slope=fit.slope, intercept=fit.intercept)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zombie-torus", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, n_required=False, strategy=False, seeded=False, field_out=False):
        sp.add_argument("--n", type=int, required=n_required)
        if strategy:
            sp.add_argument("--strategy", required=True, help="builtin name[:arg] or strategy file")
        if seeded:
            sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
        if field_out:
            sp.add_argument("--format", choices=("csv", "pgm"), default="csv")
            sp.add_argument("--ascii", action="store_true", help="write PGM as ASCII P2")
            sp.add_argument("--out", default=None)

    sp = sub.add_parser("weight", help="exact t(S) for a strategy")
    common(sp, strategy=True, field_out=True)
    sp.set_defaults(fn=cmd_weight)

    sp = sub.add_parser("heatmap", help="export the capture-probability field")
    common(sp, strategy=True, field_out=True)
    sp.set_defaults(fn=cmd_heatmap)

    sp = sub.add_parser("project", help="projection profiles and coupling checks")
    common(sp, strategy=True)
    sp.add_argument("--kind", choices=projection.KINDS, default="z")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_project)

    policies = sim.ADAPTIVE_RULES + ("scripted",)
    for name, fn, helptext in (
        ("simulate", cmd_simulate, "Monte Carlo capture frequency"),
        ("bracket", cmd_bracket, "bracket the zombie number for a policy"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp, n_required=True, seeded=True)
        sp.add_argument("--policy", choices=policies, default="stay")
        sp.add_argument("--strategy", default=None)
        sp.add_argument("--trials", type=int, default=200 if name == "bracket" else 1000)
        sp.add_argument("--horizon", type=int, default=None)
        if name == "simulate":
            sp.add_argument("--k", type=int, required=True)
            sp.add_argument("--log", default=None, help="write the per-round log of trial 0")
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("r3", help="return probability of the lazy offset chain")
    sp.add_argument("--y", type=int, required=True)
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(fn=cmd_r3)

    sp = sub.add_parser("lowerbound", help="diagonal walker against sqrt(n)/omega zombies")
    common(sp, n_required=True, seeded=True)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--omega", type=float, default=None)
    g.add_argument("--omega-log", action="store_true", help="use omega = ln n")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--horizon", type=int, default=None)
    sp.set_defaults(fn=cmd_lowerbound)

    sp = sub.add_parser("search", help="minimise t(S) by hill climbing or exhaustively")
    common(sp, seeded=True)
    sp.add_argument("--strategy", default="stay")
    sp.add_argument("--budget", type=int, default=2000)
    sp.add_argument("--exact", type=int, default=None, metavar="M")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_search)

    sp = sub.add_parser("sweep", help="log-log slope of t over several n")
    sp.add_argument("--strategy", required=True)
    sp.add_argument("--ns", default="500,1000,2000,4000")
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(fn=cmd_sweep)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.fn(args, out)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # noqa: BLE001
        print(f"error: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
