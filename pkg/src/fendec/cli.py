"""Command-line front end.

Subcommands
    gen       write seeded knapsack test instances as .sipx files
    solve     run one algorithm on one instance, print a report, append a CSV row
    bench     run an instance grid x algorithm grid under a shared budget
    isg-demo  print the three lower-corner reduction walkthroughs and check them

The environment variable FENDEC_SEED supplies the seed when --seed is absent.
Exit codes: 0 ok, 1 I/O failure, 2 usage error, 3 self-check failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from pathlib import Path

from fendec.gen import GenConfig, TAGS, generate, instance_name
from fendec.isg import reduce_integer_set
from fendec.model import SipxError, read_instance, write_instance
from fendec.sfd import SfdOptions, SfdResult, direct_solve, sfd_solve

CSV_COLUMNS = [
    "instance", "algorithm", "scens", "mips_solved", "fenchel_cuts",
    "lb", "ub", "gap_pct", "iterations", "wall_s", "seed",
]
ALGORITHMS = ("sfd", "sfd-r", "direct")


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("FENDEC_SEED")
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        print(f"fendec: FENDEC_SEED is not an integer: {env!r}", file=sys.stderr)
        raise SystemExit(2)


def _run_algorithm(program, alg: str, eps: float, budget_s: float, budget_iters: int) -> SfdResult:
    if alg == "direct":
        return direct_solve(program, time_limit=budget_s, node_limit=budget_iters)
    opts = SfdOptions(
        use_reduction=(alg == "sfd-r"),
        rel_gap=eps,
        time_limit=budget_s,
        max_iterations=budget_iters,
    )
    return sfd_solve(program, opts)


def _result_row(instance: str, alg: str, scens: int, res: SfdResult, seed: int) -> dict:
    return {
        "instance": instance,
        "algorithm": alg,
        "scens": scens,
        "mips_solved": res.mips_solved,
        "fenchel_cuts": res.fenchel_cuts,
        "lb": f"{res.objective:.6f}",
        "ub": f"{res.best_bound:.6f}",
        "gap_pct": f"{res.gap_pct:.6f}",
        "iterations": res.iterations,
        "wall_s": f"{res.wall_s:.3f}",
        "seed": seed,
    }


def _append_rows(path, rows: list[dict]) -> None:
    """Append rows, writing the header only when the file starts empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if fresh:
            writer.writeheader()
        writer.writerows(rows)


def _print_report(row: dict, status: str) -> None:
    print(f"instance      {row['instance']}  ({row['scens']} scenarios)")
    print(f"algorithm     {row['algorithm']}  status={status}")
    print(f"bounds        lb={row['lb']}  ub={row['ub']}  gap={row['gap_pct']}%")
    print(f"work          mips={row['mips_solved']}  fenchel_cuts={row['fenchel_cuts']}"
          f"  iterations={row['iterations']}  wall={row['wall_s']}s")


# ----------------------------------------------------------------------
# gen
# ----------------------------------------------------------------------

def cmd_gen(ns: argparse.Namespace) -> int:
    seed = _resolve_seed(ns.seed)
    if not 1 <= ns.reps <= len(TAGS):
        print(f"fendec gen: --reps must be in 1..{len(TAGS)}", file=sys.stderr)
        return 2
    base = GenConfig(
        n1=ns.n1,
        n2=ns.n2,
        m1=ns.m1,
        m2=ns.m2 if ns.m2 is not None else ns.n2,
        scenarios=ns.scens,
        v_ub=ns.v_ub,
        coupling_scale=ns.coupling_scale,
        seed=seed,
    )
    try:
        base.check()
    except ValueError as exc:
        print(f"fendec gen: {exc}", file=sys.stderr)
        return 2
    out = Path(ns.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for tag in TAGS[: ns.reps]:
            cfg = replace(base, tag=tag)
            path = out / f"{instance_name(cfg)}.sipx"
            write_instance(generate(cfg), path)
            print(path)
    except OSError as exc:
        print(f"fendec gen: {exc}", file=sys.stderr)
        return 1
    return 0


# ----------------------------------------------------------------------
# solve
# ----------------------------------------------------------------------

def cmd_solve(ns: argparse.Namespace) -> int:
    seed = _resolve_seed(ns.seed)
    try:
        program = read_instance(ns.instance)
    except (OSError, SipxError) as exc:
        print(f"fendec solve: {exc}", file=sys.stderr)
        return 1
    res = _run_algorithm(program, ns.alg, ns.eps, ns.budget, ns.budget_iters)
    row = _result_row(Path(ns.instance).stem, ns.alg, len(program.scenarios), res, seed)
    _print_report(row, res.status)
    if ns.csv:
        try:
            _append_rows(ns.csv, [row])
        except OSError as exc:
            print(f"fendec solve: {exc}", file=sys.stderr)
            return 1
    return 0


# ----------------------------------------------------------------------
# bench
# ----------------------------------------------------------------------

def _parse_sizes(spec: str) -> list[tuple[int, int, int]]:
    sizes = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        parts = token.removeprefix("k.").split(".")
        if len(parts) != 3:
            raise ValueError(f"bad size {token!r}; expected n1.n2.scens")
        try:
            sizes.append(tuple(int(p) for p in parts))
        except ValueError:
            raise ValueError(f"bad size {token!r}; expected three integers")
    if not sizes:
        raise ValueError("no sizes given")
    return sizes


def _bench_cell(cell: dict) -> dict:
    """One (instance x algorithm) run; isolated so it can live in a worker."""
    try:
        if cell["kind"] == "file":
            program = read_instance(cell["path"])
            label = Path(cell["path"]).stem
        else:
            cfg = GenConfig(**cell["cfg"])
            program = generate(cfg)
            label = instance_name(cfg)
        res = _run_algorithm(program, cell["alg"], cell["eps"], cell["budget_s"], cell["budget_iters"])
        row = _result_row(label, cell["alg"], len(program.scenarios), res, cell["seed"])
        row["_group"] = cell["group"]
        return row
    except Exception as exc:  # failures become rows, the bench keeps going
        return {
            "instance": cell.get("label", "?"),
            "algorithm": cell["alg"],
            "scens": 0,
            "mips_solved": 0,
            "fenchel_cuts": 0,
            "lb": "nan",
            "ub": "nan",
            "gap_pct": "inf",
            "iterations": 0,
            "wall_s": "0.000",
            "seed": cell["seed"],
            "_group": cell["group"],
            "_error": f"{type(exc).__name__}: {exc}",
        }


def _average_rows(rows: list[dict], seed: int) -> list[dict]:
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in rows:
        if "_error" in row:
            continue
        groups.setdefault((row["_group"], row["algorithm"]), []).append(row)
    out = []
    for (group, alg), members in sorted(groups.items()):
        def mean(key, fmt):
            vals = [float(r[key]) for r in members]
            return fmt.format(sum(vals) / len(vals))
        out.append({
            "instance": f"{group}.avg",
            "algorithm": alg,
            "scens": members[0]["scens"],
            "mips_solved": mean("mips_solved", "{:.1f}"),
            "fenchel_cuts": mean("fenchel_cuts", "{:.1f}"),
            "lb": mean("lb", "{:.6f}"),
            "ub": mean("ub", "{:.6f}"),
            "gap_pct": mean("gap_pct", "{:.6f}"),
            "iterations": mean("iterations", "{:.1f}"),
            "wall_s": mean("wall_s", "{:.3f}"),
            "seed": seed,
        })
    return out


def _emit_plots(avg_rows: list[dict], outdir) -> None:
    try:
        import matplotlib
    except ImportError:
        print("bench: matplotlib unavailable, skipping plots", file=sys.stderr)
        return
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    groups = sorted({r["instance"] for r in avg_rows})
    algs = sorted({r["algorithm"] for r in avg_rows})
    for key, fname, label in (
        ("gap_pct", "gap.svg", "average gap (%)"),
        ("mips_solved", "mips.svg", "average integer solves"),
        ("fenchel_cuts", "cuts.svg", "average cuts"),
    ):
        fig, ax = plt.subplots(figsize=(1.6 + 1.4 * len(groups), 3.2))
        width = 0.8 / len(algs)
        for a, alg in enumerate(algs):
            vals = []
            for g in groups:
                match = [float(r[key]) for r in avg_rows
                         if r["instance"] == g and r["algorithm"] == alg]
                vals.append(match[0] if match else 0.0)
            xs = [i + a * width for i in range(len(groups))]
            ax.bar(xs, vals, width=width, label=alg)
        ax.set_xticks([i + 0.4 - width / 2 for i in range(len(groups))])
        ax.set_xticklabels(groups, fontsize=8)
        ax.set_ylabel(label)
        ax.legend(fontsize=8)
        fig.tight_layout()
        fig.savefig(outdir / fname)
        plt.close(fig)
        print(outdir / fname)


def cmd_bench(ns: argparse.Namespace) -> int:
    seed = _resolve_seed(ns.seed)
    algs = [a.strip() for a in ns.algs.split(",") if a.strip()]
    bad = [a for a in algs if a not in ALGORITHMS]
    if bad or not algs:
        print(f"fendec bench: unknown algorithms {bad}", file=sys.stderr)
        return 2
    if ns.budget_s <= 0 and ns.budget_iters <= 0:
        print("fendec bench: need --budget-s > 0 or --budget-iters > 0", file=sys.stderr)
        return 2

    cells = []
    common = dict(eps=ns.eps, budget_s=ns.budget_s, budget_iters=ns.budget_iters, seed=seed)
    if ns.instances:
        for path in ns.instances:
            if not Path(path).is_file():
                print(f"fendec bench: no such instance file: {path}", file=sys.stderr)
                return 1
            for alg in algs:
                cells.append(dict(kind="file", path=path, alg=alg,
                                  group=Path(path).stem, label=Path(path).stem, **common))
    else:
        try:
            sizes = _parse_sizes(ns.sizes)
        except ValueError as exc:
            print(f"fendec bench: {exc}", file=sys.stderr)
            return 2
        if not 1 <= ns.reps <= len(TAGS):
            print(f"fendec bench: --reps must be in 1..{len(TAGS)}", file=sys.stderr)
            return 2
        for n1, n2, scens in sizes:
            group = f"k.{n1}.{n2}.{scens}"
            for tag in TAGS[: ns.reps]:
                cfg = GenConfig(n1=n1, n2=n2, m1=ns.m1, m2=n2, scenarios=scens,
                                v_ub=ns.v_ub, coupling_scale=ns.coupling_scale,
                                seed=seed, tag=tag)
                try:
                    cfg.check()
                except ValueError as exc:
                    print(f"fendec bench: {exc}", file=sys.stderr)
                    return 2
                for alg in algs:
                    cells.append(dict(kind="gen", cfg=asdict(cfg), alg=alg,
                                      group=group, label=instance_name(cfg), **common))

    t0 = time.monotonic()
    if ns.jobs > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            rows = list(pool.map(_bench_cell, cells))
    else:
        rows = [_bench_cell(c) for c in cells]
    failed = [r for r in rows if "_error" in r]
    for r in failed:
        print(f"bench: {r['instance']} x {r['algorithm']} failed: {r['_error']}", file=sys.stderr)

    avg_rows = _average_rows(rows, seed)
    clean = [{k: v for k, v in r.items() if not k.startswith("_")} for r in rows]
    try:
        _append_rows(ns.csv, clean + avg_rows)
    except OSError as exc:
        print(f"fendec bench: {exc}", file=sys.stderr)
        return 1
    if ns.plots is not None:
        _emit_plots(avg_rows, ns.plots)

    for row in clean + avg_rows:
        print(",".join(str(row[c]) for c in CSV_COLUMNS))
    if avg_rows:
        best = min(avg_rows, key=lambda r: float(r["gap_pct"]))
        print(f"# lowest average gap: {best['algorithm']} ({best['gap_pct']}% on {best['instance']})")
    print(f"# {len(rows)} cells in {time.monotonic() - t0:.1f}s -> {ns.csv}")
    return 1 if failed else 0


# ----------------------------------------------------------------------
# isg-demo
# ----------------------------------------------------------------------

def _demo_problems(third_upper: int) -> list[dict]:
    return [
        dict(name="demo-1", W=[[0.4, 1.0]], tau=[3.4], u=[3, 3],
             y_hat=[3.0, 2.2], expect=(1, 2)),
        dict(name="demo-2", W=[[0.4, 1.0], [1.0, 0.4]], tau=[3.4, 3.4], u=[3, 3],
             y_hat=[17 / 7, 17 / 7], expect=(1, 2)),
        dict(name="demo-3", W=[[6.0, 5.0]], tau=[37.4], u=[5, third_upper],
             y_hat=[5.0, 1.48], expect=(2, 0)),
    ]


def cmd_isg_demo(ns: argparse.Namespace) -> int:
    records = []
    ok_all = True
    for demo in _demo_problems(ns.demo3_upper):
        trace = reduce_integer_set(
            W=demo["W"], tau=demo["tau"], u=demo["u"], y_hat=demo["y_hat"])
        got = tuple(int(v) for v in trace.final)
        ok = got == demo["expect"]
        ok_all &= ok
        if ns.json:
            records.append({
                "name": demo["name"],
                "y_hat": list(demo["y_hat"]),
                "start": trace.start.astype(int).tolist(),
                "axis_order": trace.axis_order,
                "binding_rows": trace.binding_rows,
                "steps": [
                    {"pair": list(s.pair), "rule": s.rule, "value": s.value,
                     "point": s.point.astype(int).tolist()}
                    for s in trace.steps
                ],
                "final": list(got),
                "expected": list(demo["expect"]),
                "ok": ok,
            })
        else:
            print(f"--- {demo['name']} ---")
            print(trace.describe())
            print(f"{'PASS' if ok else 'FAIL'}: expected {demo['expect']}, got {got}")
            print()
    if ns.json:
        print(json.dumps(records, indent=2))
    return 0 if ok_all else 3


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fendec",
        description="Stage-wise Fenchel decomposition toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write seeded test instances")
    p.add_argument("--n1", type=int, default=10, help="first-stage binaries")
    p.add_argument("--n2", type=int, default=20, help="second-stage integers")
    p.add_argument("--m1", type=int, default=10, help="first-stage rows")
    p.add_argument("--m2", type=int, default=None, help="second-stage rows (default: n2)")
    p.add_argument("--scens", type=int, required=True, help="scenarios per instance")
    p.add_argument("--reps", type=int, default=1, help=f"replications, tags {TAGS!r}")
    p.add_argument("--v-ub", type=int, default=5, help="second-stage upper bound")
    p.add_argument("--coupling-scale", type=float, default=10.0,
                   help="weight of the first stage in coupling rows")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one algorithm on one instance")
    p.add_argument("instance", help="path to a .sipx file")
    p.add_argument("--alg", required=True, choices=ALGORITHMS)
    p.add_argument("--eps", type=float, default=1e-6, help="relative gap tolerance")
    p.add_argument("--budget", type=float, default=0.0, help="wall seconds, 0 = none")
    p.add_argument("--budget-iters", type=int, default=0,
                   help="iteration/node cap, 0 = none (deterministic runs)")
    p.add_argument("--csv", default=None, help="append the result row here")
    p.add_argument("--seed", type=int, default=None, help="recorded in the CSV row")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="instance grid x algorithm grid")
    p.add_argument("instances", nargs="*", help=".sipx files (overrides --sizes)")
    p.add_argument("--sizes", default="k.10.20.50",
                   help="comma list of n1.n2.scens triples")
    p.add_argument("--reps", type=int, default=5, help=f"replications, tags {TAGS!r}")
    p.add_argument("--algs", default="sfd,sfd-r,direct")
    p.add_argument("--m1", type=int, default=10)
    p.add_argument("--v-ub", type=int, default=5)
    p.add_argument("--coupling-scale", type=float, default=10.0)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--budget-s", type=float, default=60.0, help="wall seconds per cell")
    p.add_argument("--budget-iters", type=int, default=0,
                   help="iteration/node cap per cell (deterministic runs)")
    p.add_argument("--csv", default="bench.csv")
    p.add_argument("--plots", default=None, help="directory for SVG bar charts")
    p.add_argument("--jobs", type=int, default=1, help="parallel cells")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("isg-demo", help="print the reduction walkthroughs")
    p.add_argument("--json", action="store_true", help="machine-readable traces")
    p.add_argument("--demo3-upper", type=int, default=5,
                   help="override demo-3's second upper bound (corrupts the check)")
    p.set_defaults(func=cmd_isg_demo)
    return parser


def main(argv: list[str] | None = None) -> int:
    ns = _build_parser().parse_args(argv)
    return ns.func(ns)


if __name__ == "__main__":
    sys.exit(main())
