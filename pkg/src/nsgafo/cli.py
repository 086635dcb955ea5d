"""Command-line experiment runner: ``bench``, ``plan`` and ``metrics``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure,
3 success with warnings (no feasible solution).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import shutil
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from nsgafo.core import ALGORITHMS, AlgorithmConfig, run
from nsgafo.core.algorithm import EvaluationError
from nsgafo.metrics import hv_reference, hypervolume, igd
from nsgafo.problems import make_benchmark
from nsgafo.robot import TaskProblem, load_model, load_task, segment_durations, time_vector

log = logging.getLogger("nsgafo")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME, EXIT_WARN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else _fmt(v) for v in row])
    path.write_text(buf.getvalue())


def read_front(path) -> np.ndarray:
    """Objective columns of a front CSV.

    Columns named ``f1``, ``f2``, ... are used when present (in numeric
    order); otherwise every column is taken as an objective.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    obj_cols = sorted(
        (int(m.group(1)), i) for i, h in enumerate(header) if (m := re.fullmatch(r"f(\d+)", h.strip()))
    )
    cols = [i for _, i in obj_cols] or list(range(len(header)))
    try:
        data = np.array([[float(r[i]) for i in cols] for r in body], dtype=float)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"{path}: malformed front file ({exc})") from exc
    return data.reshape(len(body), len(cols))


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")], dtype=float)
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}") from exc


class _Staging:
    """Write outputs to a scratch directory and move them into place on success."""

    def __init__(self, out: Path):
        self.out = out

    def __enter__(self) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        self.tmp = Path(tempfile.mkdtemp(prefix=".nsgafo-", dir=self.out))
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            for f in sorted(self.tmp.iterdir()):
                f.replace(self.out / f.name)
        shutil.rmtree(self.tmp, ignore_errors=True)
        return False


def _make_problem(selector: str, samples: int):
    if selector.startswith("task:"):
        spec = selector[len("task:") :]
        model_file = None
        if "@" in spec:
            spec, model_file = spec.split("@", 1)
        try:
            return TaskProblem(load_task(spec), load_model(model_file), samples)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot load task/model: {exc}") from exc
    try:
        return make_benchmark(selector)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _config(args, algorithm: str, seed: int) -> AlgorithmConfig:
    return AlgorithmConfig(
        algorithm=algorithm,
        pop_size=args.pop,
        divisions=args.divisions,
        max_evaluations=args.budget,
        focused_count=args.focused,
        nonfocused_count=args.nonfocused,
        seed=seed,
    )


def _run_job(job):
    problem, config, true_front = job
    return run(problem, config, true_front=true_front)


def _trace_rows(trace):
    for r in trace.records:
        yield [str(r.generation), str(r.evaluations), r.hv, r.igd, r.archive_hv, r.feasible_fraction]


TRACE_HEADER = ["gen", "evals", "hv", "igd", "archive_hv", "feasible_fraction"]


def _stats(values):
    v = np.array([x for x in values if x is not None], dtype=float)
    if v.size == 0:
        return None, None, None
    std = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return float(v.mean()), std, float(np.median(v))


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    if args.seeds < 1:
        raise UsageError("need at least one seed")
    problem = _make_problem(args.problem, args.samples)
    pname = problem.name if not args.problem.startswith("task:") else "task_" + problem.name
    n_pop = _config(args, algos[0], 0).population_size(problem.n_obj)
    if args.budget < n_pop:
        raise UsageError(f"budget {args.budget} is below the population size {n_pop}")
    for a in algos:
        try:
            _config(args, a, 0).validate(problem.n_obj)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    true_front = None
    if not args.problem.startswith("task:"):
        true_front = problem.true_front(args.front_size)

    seeds = [args.seed_base + k for k in range(args.seeds)]
    jobs = [(problem, _config(args, a, s), true_front) for a in algos for s in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            traces = list(pool.map(_run_job, jobs))
    else:
        traces = []
        for job in jobs:
            traces.append(_run_job(job))
            log.info("%s %s seed %d: %d evaluations", pname, job[1].algorithm, job[1].seed, traces[-1].evaluations)

    if args.hv_ref == "worst":
        fronts = [f for t in traces for f in t.fronts() if len(f)]
        if not fronts:
            raise RuntimeError("no feasible front in any run; cannot place the HV reference point")
        ref = hv_reference(fronts)
    elif args.hv_ref == "front":
        if true_front is None:
            raise UsageError("--hv-ref front needs a benchmark with a known front")
        ref = hv_reference([true_front])
    else:
        ref = _parse_vector(args.hv_ref)
        if ref.size != problem.n_obj:
            raise UsageError("--hv-ref has the wrong number of coordinates")
    for t in traces:
        t.with_hv(ref)

    summary = []
    with _Staging(Path(args.out)) as tmp:
        for (_, cfg, _), trace in zip(jobs, traces):
            stem = f"{pname}_{cfg.algorithm}_seed{cfg.seed}"
            _write_csv(tmp / f"{stem}.csv", TRACE_HEADER, _trace_rows(trace))
            front = trace.pareto.objectives
            _write_csv(tmp / f"{stem}_front.csv", [f"f{i + 1}" for i in range(problem.n_obj)], front)
        for a in algos:
            runs = [t for (_, c, _), t in zip(jobs, traces) if c.algorithm == a]
            finals = [t.records[-1] for t in runs]
            igd_mean, igd_std, igd_med = _stats(r.igd for r in finals)
            hv_mean, hv_std, hv_med = _stats(r.archive_hv for r in finals)
            table = "" if igd_mean is None else f"{igd_mean:.4g}±{igd_std:.2g}"
            summary.append([pname, a, str(len(runs)), igd_mean, igd_std, igd_med, hv_mean, hv_std, hv_med, table])
        _write_csv(
            tmp / "summary.csv",
            ["problem", "algorithm", "seeds", "igd_mean", "igd_std", "igd_median",
             "hv_mean", "hv_std", "hv_median", "igd_table"],
            summary,
        )
        meta = {
            "problem": pname,
            "algorithms": algos,
            "seeds": seeds,
            "budget": args.budget,
            "population": n_pop,
            "divisions": args.divisions,
            "focused": args.focused,
            "nonfocused": args.nonfocused,
            "hv_reference": [float(x) for x in ref],
            "front_size": args.front_size if true_front is not None else None,
        }
        (tmp / "summary.json").write_text(json.dumps(meta, indent=2) + "\n")

    if not args.quiet:
        for row in summary:
            print(f"{row[0]:>10} {row[1]:>9}  IGD {row[-1] or 'n/a'}")
    return EXIT_OK


def _plan_row(problem: TaskProblem, genes, objectives, violation):
    segs = segment_durations(genes, problem.task)
    tv = time_vector(segs)
    return {
        "time_vector": [float(x) for x in tv],
        "segments": [float(x) for x in segs],
        "genes": [float(x) for x in genes],
        "f1": float(objectives[0]),
        "f2": float(objectives[1]),
        "f3": float(objectives[2]),
        "violation": float(violation),
    }


def cmd_plan(args) -> int:
    try:
        task = load_task(args.task)
        model = load_model(args.model)
        problem = TaskProblem(task, model, args.samples)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load task/model: {exc}") from exc
    config = _config(args, args.algo, args.seed_base)
    try:
        config.validate(problem.n_obj)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.budget < config.population_size(problem.n_obj):
        raise UsageError("budget is below the population size")

    trace = run(problem, config)
    fronts = [f for f in trace.fronts() if len(f)]
    ref = hv_reference(fronts) if fronts else None
    if ref is not None:
        trace.with_hv(ref)

    pareto = trace.pareto
    feasible = pareto.feasible
    F, G, cv = pareto.objectives[feasible], pareto.genes[feasible], pareto.violation[feasible]
    order = np.lexsort(F.T[::-1])
    F, G, cv = F[order], G[order], cv[order]

    rows = [_plan_row(problem, g, f, v) for g, f, v in zip(G, F, cv)]
    plans = {}
    for label, col in zip("ABC", range(3)):
        if rows:
            best = int(np.argmin(F[:, col]))
            plans[label] = {"optimizes": f"f{col + 1}", **rows[best]}
    accepted = task.accepts(F) if len(F) else np.zeros(0, dtype=bool)
    report = {
        "task": task.name,
        "model": model.name,
        "algorithm": config.algorithm,
        "seed": config.seed,
        "budget": config.max_evaluations,
        "evaluations": trace.evaluations,
        "generations": trace.records[-1].generation,
        "feasible_count": len(rows),
        "pareto_size": len(pareto),
        "hv_reference": None if ref is None else [float(x) for x in ref],
        "plans": plans,
        "thresholds": {k: str(v) for k, v in task.thresholds.items()},
        "filtered": [r for r, ok in zip(rows, accepted) if ok],
    }

    n_genes = problem.n_var
    with _Staging(Path(args.out)) as tmp:
        header = ["f1", "f2", "f3", "violation"] + [f"g{i + 1}" for i in range(n_genes)]
        _write_csv(tmp / "pareto.csv", header, (list(f) + [v] + list(g) for f, v, g in zip(F, cv, G)))
        _write_csv(tmp / "trace.csv", TRACE_HEADER, _trace_rows(trace))
        (tmp / "report.json").write_text(json.dumps(report, indent=2) + "\n")

    if not rows:
        log.warning("no feasible solution in the final population")
        return EXIT_WARN
    if not args.quiet:
        for label, p in plans.items():
            tv = ", ".join(f"{t:.2f}" for t in p["time_vector"])
            print(f"Plan {label} [{tv}]  f1={p['f1']:.2f} f2={p['f2']:.2f} f3={p['f3']:.2f}")
        print(f"{len(rows)} feasible Pareto solutions, {len(report['filtered'])} meet the task thresholds")
    return EXIT_OK


def cmd_metrics(args) -> int:
    front = read_front(args.front)
    if len(front) == 0:
        raise UsageError("front file has no rows")
    out = {"points": len(front), "objectives": front.shape[1]}
    if args.ref_front:
        ref_front = read_front(args.ref_front)
        if ref_front.shape[1] != front.shape[1]:
            raise UsageError("front and reference front have different objective counts")
        out["igd"] = igd(front, ref_front, mode=args.igd_mode)
        out["igd_mode"] = args.igd_mode
    if args.ref_point:
        ref = _parse_vector(args.ref_point)
        if ref.size != front.shape[1]:
            raise UsageError("reference point dimension does not match the front")
        out["hv"] = hypervolume(front, ref)
    print(json.dumps(out))
    return EXIT_OK


def _shared(p: argparse.ArgumentParser, budget: int, seed: int) -> None:
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed-base", type=int, default=seed, help="first seed (unsigned 64-bit)")
    p.add_argument("--pop", type=int, default=None, help="population size (default: multiple of 4 >= reference points)")
    p.add_argument("--divisions", type=int, default=12, help="reference-point divisions per axis")
    p.add_argument("--budget", type=int, default=budget, help="objective evaluations per run")
    p.add_argument("--focused", type=int, default=1, help="members promoted per generation")
    p.add_argument("--nonfocused", type=int, default=1, help="members excluded per generation")
    p.add_argument("--samples", type=int, default=1000, help="trajectory samples per evaluation")
    p.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsgafo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="benchmark campaign over algorithms and seeds")
    b.add_argument("--problem", required=True, help="dtlz3 | wfg3 | task:<file>[@<model file>]")
    b.add_argument("--algos", default="nsga3,nsga3-fo", help="comma-separated: " + ", ".join(ALGORITHMS))
    b.add_argument("--seeds", type=int, default=10, help="number of seeds")
    b.add_argument("--front-size", type=int, default=1000, help="true-front sample size for IGD")
    b.add_argument("--hv-ref", default="worst", help="worst | front | comma-separated point")
    b.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    _shared(b, budget=20_000, seed=0)
    b.set_defaults(func=cmd_bench)

    p = sub.add_parser("plan", help="multi-objective trajectory planning for a task")
    p.add_argument("--task", required=True, help="task JSON file or bundled name (table2, task1, task2)")
    p.add_argument("--model", default=None, help="arm model JSON (default: bundled placeholder model)")
    p.add_argument("--algo", default="nsga3-fo", choices=ALGORITHMS)
    _shared(p, budget=30_000, seed=42)
    p.set_defaults(func=cmd_plan)

    m = sub.add_parser("metrics", help="IGD / HV of a stored front")
    m.add_argument("front", help="front CSV")
    m.add_argument("--ref-front", help="reference front CSV for IGD")
    m.add_argument("--ref-point", help="comma-separated HV reference point")
    m.add_argument("--igd-mode", choices=("standard", "paper"), default="standard")
    m.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    quiet = getattr(args, "quiet", False)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EvaluationError, RuntimeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
