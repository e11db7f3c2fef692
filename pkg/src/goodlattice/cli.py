"""
Command-line front end: search, points, merit, bench, pinn.

Every run is reproducible from its flags: all randomness derives from
--seed, output rows are deterministically ordered, and each output file
starts with comment lines recording the tool version and the resolved
configuration.  Files are written atomically (temp file + rename), so a
failed run leaves no partial output.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bench import (
    default_schedule,
    get_integrand,
    resolve_kind,
    run_bench,
    summarize,
)
from .lattice import GeneratingVector
from .merit import figure_of_merit, korobov_search
from .periodization import TransformChain
from .pinn import PoissonProblem, TrainConfig, init_mlp, train
from .samplers import SamplerKind, sample

_KIND_ALIASES = {"mc": "mc", "random": "mc", "grid": "grid", "lhs": "lhs",
                 "sobol": "sobol", "glt": "glt"}


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _header(command: str, config: dict) -> list[str]:
    items = " ".join(f"{k}={v}" for k, v in config.items())
    return [f"# goodlattice {__version__}", f"# command: {command}", f"# config: {items}"]


def _write_rows(path: str | None, header: list[str], columns: str, rows) -> None:
    lines = header + [columns] + [",".join(str(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_table_rows(path: str) -> list[list[str]]:
    """Existing data rows of a generator table (comments and column line skipped)."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("s,"):
                continue
            rows.append(line.split(","))
    return rows


def _canonical_tag(tag: str) -> str:
    canon = _KIND_ALIASES.get(tag.strip())
    if canon is None:
        raise ValueError(
            f"unknown sampler kind {tag!r}; choose from {sorted(set(_KIND_ALIASES))}")
    return canon


def _resolve_kind_flag(tag: str, n: int, s: int, z: str | None, m: int | None,
                       skip_origin: bool) -> SamplerKind:
    tag = _canonical_tag(tag)
    if tag == "glt" and z is not None:
        return SamplerKind.good_lattice(GeneratingVector(n=n, z=tuple(_parse_int_list(z))))
    if tag == "grid" and m is not None:
        return SamplerKind.uniform_grid(m)
    if tag == "sobol":
        return SamplerKind.sobol(skip_origin=skip_origin)
    return resolve_kind(tag, n, s)


def cmd_search(args) -> None:
    ns = sorted(set(_parse_int_list(args.n)))
    if not ns:
        raise ValueError("empty n list")
    rows = []
    for n in ns:
        gv = korobov_search(n, args.s, args.alpha, workers=args.workers)
        mv = figure_of_merit(gv, args.alpha)
        rows.append([args.s, n, *gv.z, args.alpha, mv.p_alpha])
    columns = "s,n," + ",".join(f"z{i + 1}" for i in range(args.s)) + ",alpha,p_alpha"
    if args.out and os.path.exists(args.out):
        existing = _read_table_rows(args.out)
        for old in existing:
            if len(old) != len(rows[0]):
                raise ValueError(
                    f"existing table {args.out} has a different dimension; "
                    "use one table file per s")
        merged = {tuple(r[: 2 + args.s]) + (r[2 + args.s],): r
                  for r in ([str(v) for v in row] for row in rows)}
        for old in existing:
            key = tuple(old[: 2 + args.s]) + (old[2 + args.s],)
            merged.setdefault(key, old)
        rows = sorted(merged.values(), key=lambda r: (int(r[0]), int(r[1]), float(r[-2])))
    header = _header("search", {"n": args.n, "s": args.s, "alpha": args.alpha,
                                "workers": args.workers})
    _write_rows(args.out, header, columns, rows)


def cmd_points(args) -> None:
    kind = _resolve_kind_flag(args.kind, args.n, args.s, args.z, args.m, args.skip_origin)
    shift = np.asarray(_parse_float_list(args.shift)) if args.shift else None
    batch = sample(kind, args.n, args.s, args.seed, shift=shift)
    shift_str = ("none" if batch.shift is None
                 else ";".join(str(v) for v in batch.shift))
    header = _header("points", {"kind": kind.tag, "n": args.n, "s": args.s,
                                "seed": args.seed, "shift": shift_str})
    columns = ",".join(f"x{i + 1}" for i in range(args.s))
    _write_rows(args.out, header, columns, batch.points.tolist())


def cmd_merit(args) -> None:
    z = tuple(_parse_int_list(args.z))
    gv = GeneratingVector(n=args.n, z=z)
    mv = figure_of_merit(gv, args.alpha, box=args.box)
    header = _header("merit", {"n": args.n, "z": args.z, "alpha": args.alpha,
                               "box": args.box})
    columns = "n," + ",".join(f"z{i + 1}" for i in range(len(z))) + ",alpha,p_alpha"
    _write_rows(args.out, header, columns, [[args.n, *z, args.alpha, mv.p_alpha]])


def _bench_group(task) -> list:
    integrand_name, s, tag, n, trials, seed, chain_spec = task
    integrand = get_integrand(integrand_name, s)
    chain = TransformChain.parse(chain_spec) if chain_spec else None
    return run_bench(integrand, [tag], [n], trials, seed, transforms=chain)


def cmd_bench(args) -> None:
    tags = [_canonical_tag(t) for t in args.kinds.split(",")]
    integrand = get_integrand(args.integrand, args.s)
    schedule = {t: (_parse_int_list(args.schedule) if args.schedule
                    else default_schedule(t, args.s)) for t in tags}
    tasks = [(args.integrand, args.s, tag, n, args.trials, args.seed, args.transforms)
             for tag in tags for n in schedule[tag]]
    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            groups = list(pool.map(_bench_group, tasks))
    else:
        groups = [_bench_group(t) for t in tasks]
    records = [rec for group in groups for rec in group]
    config = {"integrand": args.integrand, "kinds": ",".join(tags), "s": args.s,
              "trials": args.trials, "seed": args.seed,
              "schedule": args.schedule or "default",
              "transforms": args.transforms or "none", "workers": args.workers}
    _write_rows(args.out, _header("bench", config),
                "integrand,kind,n,trial,seed,abs_error",
                [[r.integrand, r.kind, r.n, r.trial, r.seed, r.abs_error]
                 for r in records])
    summary_path = args.summary_out
    if summary_path is None and args.out is not None:
        stem, ext = os.path.splitext(args.out)
        summary_path = f"{stem}_summary{ext or '.csv'}"
    _write_rows(summary_path, _header("bench-summary", config),
                "integrand,kind,n,mean,std,max",
                [[r.integrand, r.kind, r.n, r.mean, r.std, r.max]
                 for r in summarize(records)])


def _pinn_trial(task):
    s, k, kind, n, iterations, seed, lr, checkpoint_every, widths = task
    problem = PoissonProblem(s=s, k=k)
    net = init_mlp(widths, seed=seed)
    config = TrainConfig(kind=kind, n=n, iterations=iterations, seed=seed, lr=lr,
                         checkpoint_every=checkpoint_every)
    return seed, train(problem, net, config)


def cmd_pinn(args) -> None:
    seeds = _parse_int_list(args.seeds)
    if not seeds:
        raise ValueError("empty seeds list")
    kind = _resolve_kind_flag(args.kind, args.n, args.s, args.z, args.m,
                              args.skip_origin)
    widths = [args.s] + _parse_int_list(args.hidden) + [1]
    tasks = [(args.s, args.k, kind, args.n, args.iters, seed, args.lr,
              args.checkpoint_every, tuple(widths)) for seed in seeds]
    if args.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_pinn_trial, tasks))
    else:
        results = [_pinn_trial(t) for t in tasks]
    rows = []
    for seed, report in results:
        for cp in report.checkpoints:
            rows.append([seed, kind.tag, args.n, cp.iteration, cp.loss, cp.rel_error])
        if report.diverged_at is not None:
            print(f"warning: seed {seed} diverged at iteration {report.diverged_at}",
                  file=sys.stderr)
    config = {"s": args.s, "k": args.k, "kind": kind.tag, "n": args.n,
              "iters": args.iters, "seeds": args.seeds, "lr": args.lr,
              "hidden": args.hidden, "checkpoint_every": args.checkpoint_every,
              "workers": args.workers}
    _write_rows(args.out, _header("pinn", config),
                "seed,kind,n,iter,loss,rel_error", rows)


def _add_common(p: argparse.ArgumentParser, *, out_required: bool = False) -> None:
    p.add_argument("--seed", type=int, default=0, help="base seed for all randomness")
    p.add_argument("--out", required=out_required, default=None,
                   help="output CSV path (stdout if omitted)" if not out_required
                   else "output CSV path")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="worker parallelism (default: available cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goodlattice",
        description="Rank-1 lattice collocation toolkit")
    parser.add_argument("--version", action="version",
                        version=f"goodlattice {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="search generating vectors and tabulate them")
    p.add_argument("--n", required=True, help="comma-separated point counts")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--alpha", type=int, default=2)
    _add_common(p, out_required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("points", help="emit one batch of collocation points")
    p.add_argument("--kind", required=True, help="mc|grid|lhs|sobol|glt")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--z", default=None, help="explicit lattice vector, e.g. 1,89")
    p.add_argument("--m", type=int, default=None, help="grid points per axis")
    p.add_argument("--shift", default=None, help="explicit shift, e.g. 0.5,0.5")
    p.add_argument("--skip-origin", action="store_true",
                   help="Sobol only: start at index 1")
    _add_common(p)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("merit", help="evaluate P_alpha of one generating vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--z", required=True, help="generating vector, e.g. 1,89")
    p.add_argument("--alpha", type=float, default=2)
    p.add_argument("--box", type=int, default=10**4,
                   help="dual-lattice box for non-closed-form alpha")
    _add_common(p)
    p.set_defaults(func=cmd_merit)

    p = sub.add_parser("bench", help="integration-error benchmark")
    p.add_argument("--integrand", default="korobov2")
    p.add_argument("--kinds", default="mc,lhs,sobol,glt")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--schedule", default=None,
                   help="comma-separated n values (default: per-kind schedule)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--transforms", default=None,
                   help="per-axis chain, e.g. fold,poly3")
    p.add_argument("--summary-out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("pinn", help="train the Poisson solver with one sampler")
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--kind", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--iters", type=int, required=True)
    p.add_argument("--seeds", default="1", help="comma-separated trial seeds")
    p.add_argument("--lr", type=float, default=2e-3)
    p.add_argument("--hidden", default="32,32", help="hidden layer widths")
    p.add_argument("--checkpoint-every", type=int, default=1000)
    p.add_argument("--z", default=None, help="explicit lattice vector for glt")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--skip-origin", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_pinn)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, OSError, ZeroDivisionError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
