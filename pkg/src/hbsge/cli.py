"""Command-line entry point: ``hbsge {bench,run,stability,gradcheck,tune}``.

Exit codes: 0 success, 1 runtime or check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .exceptions import HBSGEError
from .harness import (
    DEFAULT_BUDGETS, LR_GRID, REFERENCE_PROBLEMS, ProblemSpec, RunConfig, build_suite,
    initial_point, reference_suite, run, run_suite, tune_learning_rate,
)
from .numerics import SeededRng
from .optimizers import Method, OptimizerConfig
from .problems import Beale, Rosenbrock, gradient_relative_error, make_quadratic, quadratic_eigenvalues
from .stability import STABILITY_HEADER, predict, report_rows
from .tables import (
    fmt_full, median_summary, runs_to_csv, slugify, summary_to_csv, summary_to_markdown,
    trace_to_csv, write_text,
)

# learning rates used for the reference grid when a config entry omits eta
REFERENCE_ETA = {("quadratic", float(p.kappa)) if p.kind == "quadratic" else (p.kind, None): p.eta
                 for p in REFERENCE_PROBLEMS}

PROBLEM_ALIASES = {"quad": "quadratic", "quadratic": "quadratic",
                   "rosenbrock": "rosenbrock", "beale": "beale"}
METHOD_ALIASES = {"sgd": Method.SGD, "momentum": Method.MOMENTUM, "nag": Method.NAG,
                  "adam": Method.ADAM, "hbsge": Method.HBSGE, "hb-sge": Method.HBSGE}


class UsageError(Exception):
    """Bad flags or config; maps to exit code 2."""


# --- config file ----------------------------------------------------------------

CONFIG_KEYS = {"seeds", "problems", "optimizers", "budget_quadratic", "budget_nonconvex",
               "tol_primary", "tol_high", "x_explode", "f_explode", "out", "jobs"}


@dataclass
class BenchConfig:
    seeds: list[int] = field(default_factory=lambda: [42])
    problems: list[ProblemSpec] = field(default_factory=lambda: list(REFERENCE_PROBLEMS))
    optimizers: list[OptimizerConfig] | None = None
    budget_quadratic: int = DEFAULT_BUDGETS["quadratic"]
    budget_nonconvex: int = DEFAULT_BUDGETS["rosenbrock"]
    run: RunConfig = field(default_factory=RunConfig)
    out: str = "bench_out"
    jobs: int | None = None


def _split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_options(parts: list[str], where: str) -> dict[str, str]:
    opts = {}
    for part in parts:
        if "=" not in part:
            raise UsageError(f"{where}: expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        opts[k.strip()] = v.strip()
    return opts


def parse_problem(entry: str) -> ProblemSpec:
    """``quad:kappa=50:eta=0.05``, ``rosenbrock``, ``beale:eta=0.01:max_iters=3000``."""
    head, *rest = entry.split(":")
    kind = PROBLEM_ALIASES.get(head.strip().lower())
    if kind is None:
        raise UsageError(f"unknown problem {head!r}")
    opts = _parse_options(rest, f"problem {entry!r}")
    unknown = set(opts) - {"kappa", "eta", "d", "max_iters"}
    if unknown:
        raise UsageError(f"problem {entry!r}: unknown option(s) {sorted(unknown)}")
    try:
        kappa = float(opts["kappa"]) if "kappa" in opts else None
        key = (kind, kappa) if kind == "quadratic" else (kind, None)
        if "eta" in opts:
            eta = float(opts["eta"])
        elif key in REFERENCE_ETA:
            eta = REFERENCE_ETA[key]
        else:
            raise UsageError(f"problem {entry!r}: no default learning rate, set eta=")
        return ProblemSpec(kind, eta, kappa=kappa, d=int(opts.get("d", 10)),
                           max_iters=int(opts["max_iters"]) if "max_iters" in opts else None)
    except ValueError as exc:
        raise UsageError(f"problem {entry!r}: {exc}") from None


def parse_optimizer(entry: str) -> OptimizerConfig:
    """``hbsge:beta=0.95:label=HB-SGE-Safe(beta=0.95)``; eta is set per problem."""
    head, *rest = entry.split(":")
    method = METHOD_ALIASES.get(head.strip().lower())
    if method is None:
        raise UsageError(f"unknown optimizer {head!r}")
    opts = _parse_options(rest, f"optimizer {entry!r}")
    floats = {"beta", "alpha_max", "tau"}
    unknown = set(opts) - floats - {"label", "adaptive"}
    if unknown:
        raise UsageError(f"optimizer {entry!r}: unknown option(s) {sorted(unknown)}")
    kwargs: dict = {k: float(v) for k, v in opts.items() if k in floats}
    if "label" in opts:
        kwargs["label"] = opts["label"]
    if "adaptive" in opts:
        kwargs["adaptive"] = opts["adaptive"].lower() in ("1", "true", "yes")
    try:
        return OptimizerConfig(method, 1.0, **kwargs)
    except ValueError as exc:
        raise UsageError(f"optimizer {entry!r}: {exc}") from None


def parse_seeds(text: str) -> list[int]:
    try:
        seeds = [int(s) for s in _split_list(text)]
    except ValueError:
        raise UsageError(f"seeds must be comma-separated integers, got {text!r}") from None
    if not seeds:
        raise UsageError("seeds: empty list")
    return seeds


def load_config(path: str | os.PathLike) -> BenchConfig:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[bench]\n" + fh.read())
    except configparser.Error as exc:
        raise UsageError(f"{path}: {exc}") from None
    values = dict(parser["bench"])
    unknown = set(values) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"{path}: unknown key(s) {sorted(unknown)}")

    cfg = BenchConfig()
    for key in ("problems", "optimizers", "seeds"):
        if key in values and not _split_list(values[key]):
            raise UsageError(f"{path}: key {key!r} is empty")
    if "seeds" in values:
        cfg.seeds = parse_seeds(values["seeds"])
    if "problems" in values:
        cfg.problems = [parse_problem(p) for p in _split_list(values["problems"])]
    if "optimizers" in values:
        cfg.optimizers = [parse_optimizer(o) for o in _split_list(values["optimizers"])]
    try:
        if "budget_quadratic" in values:
            cfg.budget_quadratic = int(values["budget_quadratic"])
        if "budget_nonconvex" in values:
            cfg.budget_nonconvex = int(values["budget_nonconvex"])
        run_kwargs = {k: float(values[k]) for k in ("tol_primary", "tol_high", "x_explode", "f_explode")
                      if k in values}
        cfg.run = RunConfig(**run_kwargs)
        if "jobs" in values:
            cfg.jobs = int(values["jobs"])
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if "out" in values:
        cfg.out = values["out"]
    return cfg


# --- subcommands ----------------------------------------------------------------

def _with_budgets(cfg: BenchConfig) -> list[ProblemSpec]:
    out = []
    for p in cfg.problems:
        if p.max_iters is None:
            budget = cfg.budget_quadratic if p.kind == "quadratic" else cfg.budget_nonconvex
            p = replace(p, max_iters=budget)
        out.append(p)
    return out


def cmd_bench(args) -> int:
    if args.config is None and not args.paper_grid:
        raise UsageError("bench needs a config file or --paper-grid")
    cfg = load_config(args.config) if args.config else BenchConfig()
    if args.paper_grid and args.config is None:
        suite = reference_suite()
    else:
        suite = build_suite(_with_budgets(cfg), cfg.optimizers)
    if args.seeds is not None:
        cfg.seeds = parse_seeds(args.seeds)
    out = Path(args.out if args.out is not None else cfg.out)
    jobs = args.jobs or cfg.jobs or os.cpu_count() or 1

    results = []
    try:
        for seed in cfg.seeds:
            seed_results = run_suite(suite, replace(cfg.run, seed=seed), jobs=jobs)
            cells = [(spec, opt) for spec, opts in suite for opt in opts]
            for (spec, opt), res in zip(cells, seed_results):
                name = f"{spec.slug}_{slugify(opt.display_name)}_{seed}.csv"
                write_text(out / "traces" / name, trace_to_csv(res.trace))
            results.extend(seed_results)

        summary = median_summary(results)
        write_text(out / "summary.csv", summary_to_csv(summary))
        write_text(out / "summary.md", summary_to_markdown(summary, results))
        write_text(out / "runs.csv", runs_to_csv(results))
        write_text(out / "stability.csv", _stability_for_suite(suite))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(results)} runs ({len(summary)} summary rows) to {out}")
    return 0


def _stability_for_suite(suite) -> str:
    rows = []
    for spec, opts in suite:
        if spec.kind != "quadratic":
            continue
        eigs = quadratic_eigenvalues(spec.kappa, spec.d)
        rows += _stability_rows(eigs, opts, prefix=f"{spec.label} ")
    return _csv(STABILITY_HEADER, rows)


def _stability_rows(eigs, opts, prefix="", alpha=None) -> list[tuple]:
    rows = []
    for opt in opts:
        if opt.method is Method.ADAM:
            # nonlinear update: no mode matrix
            rows += [(prefix + opt.display_name, lam, None, None, None, "") for lam in eigs]
            continue
        if opt.method is Method.HBSGE:
            a = opt.alpha_max if alpha is None else alpha
            for a_used in (a, 0.0):
                report = predict(eigs, opt, alpha_fixed=a_used)
                label = f"{prefix}{opt.display_name}[alpha={a_used:g}]"
                rows += [(label,) + r[1:] for r in report_rows(report)]
            continue
        rows += [(prefix + opt.display_name,) + r[1:] for r in report_rows(predict(eigs, opt))]
    return rows


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(c if isinstance(c, str) else fmt_full(c) for c in row))
    return "\n".join(lines) + "\n"


def _make_problem(args):
    kind = PROBLEM_ALIASES.get(args.problem)
    if kind is None:
        raise UsageError(f"unknown problem {args.problem!r}")
    if kind == "quadratic":
        if args.kappa is None:
            raise UsageError("--kappa is required for quadratic problems")
        rng = SeededRng(args.seed)
        try:
            problem = make_quadratic(args.kappa, args.d, rng)
        except (HBSGEError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        return problem, rng
    return (Rosenbrock() if kind == "rosenbrock" else Beale()), None


def cmd_run(args) -> int:
    problem, rng = _make_problem(args)
    x0 = initial_point(problem.kind, rng, problem.dim)
    method = METHOD_ALIASES.get(args.opt)
    if method is None:
        raise UsageError(f"unknown optimizer {args.opt!r}")
    try:
        opt = OptimizerConfig(method, args.eta, beta=args.beta, alpha_max=args.alpha_max, tau=args.tau)
        cfg = RunConfig(max_iters=args.max_iters or DEFAULT_BUDGETS[problem.kind], seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run(problem, opt, cfg, x0)
    text = trace_to_csv(result.trace)
    if args.trace in (None, "-"):
        sys.stdout.write(text)
    else:
        try:
            write_text(Path(args.trace), text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    print(f"status={result.status.value} iters_to_primary={result.iters_to_primary} "
          f"iters_to_high={result.iters_to_high} divergence_iter={result.divergence_iter} "
          f"final_f={result.final_f:.6g} final_grad_norm={result.final_grad_norm:.6g}",
          file=sys.stderr)
    return 0


def cmd_stability(args) -> int:
    if not args.kappa >= 1:
        raise UsageError(f"--kappa must be >= 1, got {args.kappa}")
    if not args.eta > 0 or not 0 <= args.beta < 1 or args.d < 2:
        raise UsageError("need eta > 0, 0 <= beta < 1 and d >= 2")
    eigs = quadratic_eigenvalues(args.kappa, args.d)
    opts = [
        OptimizerConfig(Method.SGD, args.eta),
        OptimizerConfig(Method.MOMENTUM, args.eta, beta=args.beta),
        OptimizerConfig(Method.NAG, args.eta, beta=args.beta),
        OptimizerConfig(Method.ADAM, 0.5 * args.eta),
        OptimizerConfig(Method.HBSGE, args.eta, beta=args.beta),
        OptimizerConfig(Method.HBSGE, args.eta, beta=0.95, label="HB-SGE-Safe(beta=0.95)"),
    ]
    sys.stdout.write(_csv(STABILITY_HEADER, _stability_rows(eigs, opts, alpha=args.alpha)))
    return 0


def cmd_gradcheck(args) -> int:
    if args.points < 1:
        raise UsageError("--points must be >= 1")
    problem, _ = _make_problem(args)
    rng = SeededRng(args.seed + 1)
    worst, worst_x = 0.0, None
    for _ in range(args.points):
        x = -3.0 + 6.0 * rng.uniform(problem.dim)
        err = gradient_relative_error(problem, x)
        if err >= worst:
            worst, worst_x = err, x
    print(f"{problem.name}: max relative error {worst:.3e} over {args.points} points "
          f"(worst at {np.array2string(worst_x, precision=4)})")
    return 0 if worst <= args.tol else 1


def cmd_tune(args) -> int:
    problem, rng = _make_problem(args)
    x0 = initial_point(problem.kind, rng, problem.dim)
    cfg = RunConfig(max_iters=args.max_iters or DEFAULT_BUDGETS[problem.kind], seed=args.seed)
    print(tune_learning_rate(problem, LR_GRID, cfg, x0))
    return 0


# --- argument parsing -------------------------------------------------------------

def _add_problem_args(p, default=None):
    p.add_argument("--problem", required=default is None, default=default,
                   help="quad, rosenbrock or beale")
    p.add_argument("--kappa", type=float, help="condition number (quadratics)")
    p.add_argument("--d", type=int, default=10, help="dimension (quadratics)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hbsge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="run a benchmark grid and write tables and traces")
    p.add_argument("config", nargs="?", help="flat key = value config file")
    p.add_argument("--paper-grid", action="store_true",
                   help="the four quadratics, Rosenbrock and Beale with the six reference optimizers")
    p.add_argument("--seeds", help="comma-separated seeds, e.g. 41,42,43")
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("run", help="single run, trace CSV to stdout or --trace")
    _add_problem_args(p)
    p.add_argument("--opt", required=True, help="sgd, momentum, nag, adam or hbsge")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--alpha-max", type=float, default=1.2)
    p.add_argument("--tau", type=float, default=1000.0)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--trace", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("stability", help="per-mode spectral radii for every method")
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.9)
    p.add_argument("--alpha", type=float, help="frozen HB-SGE coefficient (default alpha_max)")
    p.add_argument("--d", type=int, default=10)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    _add_problem_args(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-5)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("tune", help="largest grid learning rate at which SGD converges")
    _add_problem_args(p)
    p.add_argument("--max-iters", type=int)
    p.set_defaults(func=cmd_tune)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
