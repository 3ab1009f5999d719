"""Command-line entry point.

Subcommands: ``example1``, ``synthetic``, ``check``, ``prox-selftest`` and
``bound-verify``. Global flags ``--seed``, ``--jobs`` and ``--out`` may be
given before or after the subcommand. Sub-seeds are ``seed + offset``: the
j-th draw of a generator family, or config seed ``s``, uses ``--seed + j``
(or ``--seed + s``).
"""

import argparse
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import io
from .conditions import GroundTruth, condition_report
from .datagen import SyntheticSpec, add_noise, gen_correlated, gen_example1, gen_example2
from .exceptions import ConfigError, DivergenceError, ParameterError
from .harness import (
    ExperimentConfig,
    bound_cases,
    run_example1,
    run_sweep,
    verify_bound_sweep,
)
from .metrics import CSV_COLUMNS, REPARAM_SUPPORT_TOL, extract_path
from .oracles import run_prox_battery
from .solvers import ProblemInstance
from .svg import FigureSpec, write_svg

logger = logging.getLogger("irksn")

BUNDLED_CONFIGS = ("fig4a", "fig4b", "fig4c", "fig4d")


class UsageError(Exception):
    """Bad flag values; reported like an argparse error (exit status 2)."""


def _global_flags(suppress):
    parent = argparse.ArgumentParser(add_help=False)
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parent.add_argument("--seed", type=int, default=default(0),
                        help="base seed for every random draw (default 0)")
    parent.add_argument("--jobs", type=int, default=default(None),
                        help="parallel work units (default: available cores)")
    parent.add_argument("--out", default=default(None),
                        help="output directory")
    parent.add_argument("-v", "--verbose", action="store_true",
                        default=default(False), help="log skipped grid cells")
    return parent


def build_parser():
    parser = argparse.ArgumentParser(
        prog="irksn", parents=[_global_flags(False)],
        description="Sparse recovery with k-support norm iterative regularization.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _global_flags(True)

    p = sub.add_parser("example1", parents=[common],
                       help="paths and error curves on the five-feature example")
    p.add_argument("--alpha", type=float, default=None,
                   help="IRKSN alpha (default: alpha_max / 2)")
    p.add_argument("--iters", type=int, default=20_000)
    p.add_argument("--record-every", type=int, default=1)

    p = sub.add_parser("synthetic", parents=[common],
                       help="F1 sweep on correlated Gaussian designs")
    p.add_argument("--config", required=True,
                   help=f"YAML file or bundled name ({', '.join(BUNDLED_CONFIGS)})")
    p.add_argument("--algorithms", default=None,
                   help="comma-separated subset of the config's algorithms")

    p = sub.add_parser("check", parents=[common], help="recovery condition report")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance-file", help="instance text file with w_star and support")
    src.add_argument("--generator",
                     choices=("example1", "example2", "correlated", "identity"))
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--snr", type=float, default=1.0)

    p = sub.add_parser("prox-selftest", parents=[common],
                       help="prox and norm oracle battery")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--dim-max", type=int, default=12)

    p = sub.add_parser("bound-verify", parents=[common],
                       help="check the early-stopping error bound numerically")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--family", choices=("mixed", "example2", "correlated"), default="mixed")
    p.add_argument("--deltas", default="0,0.01,0.1")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--c", type=float, default=1.0)
    return parser


def _out_dir(args, fallback):
    path = Path(args.out if args.out is not None else fallback)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _metric_csv(path, rows):
    io.write_csv(path, CSV_COLUMNS, [r.as_record() for r in rows])


def _coef_csv(path, label, xs, coefs):
    cols = [label] + [f"w{j}" for j in range(coefs.shape[1])]
    rows = [dict(zip(cols, [x, *w])) for x, w in zip(xs, coefs)]
    io.write_csv(path, cols, rows)


def cmd_example1(args):
    if args.iters < 2:
        raise UsageError("iters must be ≥ 2")
    if args.record_every < 1 or args.record_every > args.iters:
        raise UsageError("record-every must lie in [1, iters]")
    if args.alpha is not None and not 0.0 < args.alpha < 1.0:
        raise UsageError("alpha must lie in (0, 1)")
    out = _out_dir(args, "results/example1")
    study = run_example1(args.seed, args.alpha, args.iters, args.record_every)
    truth = study.truth

    fields = {"seed": args.seed, "alpha": study.alpha, **study.report.as_dict()}
    io.write_report(out / "conditions.txt", fields)
    io.save_instance(out / "instance.txt", study.instance, truth, args.seed)

    curves = {}
    for name, run in study.runs.items():
        tol = REPARAM_SUPPORT_TOL if name == "irosr" else 1e-8
        rows = extract_path(run, truth, tol, args.seed)
        _metric_csv(out / f"{name}.csv", rows)
        curves[name] = rows
    _coef_csv(out / "irksn_path.csv", "iter", study.runs["irksn"].iterations,
              study.runs["irksn"].coefs)
    for name, path in study.paths.items():
        lams = np.array([lam for lam, _ in path])
        coefs = np.array([w for _, w in path])
        _coef_csv(out / f"{name}_path.csv", "lambda", lams, coefs)

    t = study.runs["irksn"].iterations
    run = study.runs["irksn"]
    figs = [
        FigureSpec("path", {f"w{j}": (t, run.coefs[:, j]) for j in range(truth.w_star.size)},
                   "iteration t", "coefficient", "irksn_path.svg", "IRKSN path", log_x=True),
    ]
    lasso = study.paths["lasso"]
    lam_max = lasso[0][0]
    xs = np.array([np.log10(lam_max / lam) for lam, _ in lasso]) if lam_max > 0 else None
    if xs is not None:
        coefs = np.array([w for _, w in lasso])
        figs.append(FigureSpec("path", {f"w{j}": (xs, coefs[:, j])
                                        for j in range(coefs.shape[1])},
                               "log10(lambda_max / lambda)", "coefficient",
                               "lasso_path.svg", "Lasso path"))
    figs.append(FigureSpec("error_vs_iter",
                           {n: (np.array([r.iteration for r in rows]),
                                np.array([r.err2 for r in rows]))
                            for n, rows in curves.items()},
                           "iteration t", "model error", "error_vs_iter.svg",
                           "Model error", log_x=True, log_y=True))
    figs.append(FigureSpec("sparsity_vs_iter",
                           {n: (np.array([r.iteration for r in rows]),
                                np.array([r.sparsity for r in rows], dtype=float))
                            for n, rows in curves.items()},
                           "iteration t", "nonzeros", "sparsity_vs_iter.svg",
                           "Model sparsity", log_x=True))
    for fig in figs:
        write_svg(fig, out)

    final = study.runs["irksn"].final
    print(f"l1_condition_value = {study.report.l1_condition_value!r}")
    print(f"ours_lhs = {study.report.ours_lhs!r}")
    print(f"ours_rhs = {study.report.ours_rhs!r}")
    print(f"alpha = {study.alpha!r}")
    print(f"irksn_final_error = {float(np.linalg.norm(final - truth.w_star))!r}")
    print(f"irksn_final_nonzeros = {int(np.sum(np.abs(final) > 1e-8))}")
    print(f"written to {out}")
    return 0


def _resolve_config(name):
    path = Path(name)
    if path.exists():
        return ExperimentConfig.load(path)
    if name in BUNDLED_CONFIGS:
        text = resources.files("irksn.configs").joinpath(f"{name}.yaml").read_text("utf-8")
        import yaml

        return ExperimentConfig.from_dict(yaml.safe_load(text), source=name)
    raise ConfigError(f"config {name!r} is neither a file nor a bundled name")


def cmd_synthetic(args):
    config = _resolve_config(args.config)
    if args.algorithms:
        chosen = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
        config = ExperimentConfig(**{**vars(config), "algorithms": chosen})
    out = _out_dir(args, config.output_dir)
    result = run_sweep(config, jobs=args.jobs, seed_offset=args.seed)

    seed_rows = result.seed_records()
    seed_cols = [config.sweep, *CSV_COLUMNS, "final_f1", "final_iter"]
    io.write_csv(out / f"{config.name}_seeds.csv", seed_cols, seed_rows)
    agg = result.records()
    io.write_csv(out / f"{config.name}_aggregate.csv",
                 ["algorithm", config.sweep, "mean_f1", "std_f1", "mean_err2", "n_seeds"], agg)

    series, bands = {}, {}
    values = np.array(sorted(config.values), dtype=float)
    for alg in config.algorithms:
        mean = np.array([result.mean(alg, v) for v in sorted(config.values)])
        std = np.array([result.std(alg, v) for v in sorted(config.values)])
        series[alg] = (values, mean)
        bands[alg] = (mean - std, mean + std)
    if values.size > 1:
        write_svg(FigureSpec("f1_vs_param", series, config.sweep, "best F1",
                             f"{config.name}_f1.svg", f"F1 vs {config.sweep}", bands=bands),
                  out)
    for rec in agg:
        print(f"{rec['algorithm']:>10} {config.sweep}={rec[config.sweep]!r:<6} "
              f"F1 {rec['mean_f1']:.3f} +- {rec['std_f1']:.3f}")
    print(f"written to {out}")
    return 0


def _check_instance(args):
    if args.instance_file:
        instance, truth, seed = io.load_instance(args.instance_file)
        if truth is None:
            raise ConfigError(f"{args.instance_file}: no w_star/support block; "
                              "the conditions need the ground truth")
        return instance, truth, seed
    seed = args.seed
    if args.generator == "example1":
        instance, truth = gen_example1(seed)
    elif args.generator == "example2":
        instance, truth = gen_example2(args.n, args.d, args.k, seed)
    elif args.generator == "correlated":
        noisy, truth = gen_correlated(SyntheticSpec(args.n, args.d, args.k, args.rho,
                                                    args.snr, seed))
        instance = add_noise(noisy, truth, 0.0)
    else:
        rng = np.random.default_rng(seed)
        w_star = np.zeros(args.d)
        support = np.sort(rng.choice(args.d, size=args.k, replace=False))
        w_star[support] = rng.standard_normal(args.k)
        X = np.eye(args.d)
        instance = ProblemInstance(X, w_star.copy(), 0.0)
        truth = GroundTruth(w_star, support, w_star.copy())
    return instance, truth, seed


def cmd_check(args):
    instance, truth, seed = _check_instance(args)
    report = condition_report(instance, truth)
    fields = {"n": instance.n, "d": instance.d, "k": truth.k, "seed": seed,
              **report.as_dict()}
    text = io.format_report(fields)
    sys.stdout.write(text)
    out = _out_dir(args, "results/check")
    (out / "conditions.txt").write_text(text, encoding="utf-8")
    return 0


def cmd_prox_selftest(args):
    if args.trials < 0:
        raise UsageError("trials must be >= 0")
    if args.dim_max < 1:
        raise UsageError("dim-max must be >= 1")
    summary = run_prox_battery(trials=args.trials, dim_max=args.dim_max, seed=args.seed)
    fields = {"trials": summary["trials"], "checks": summary["checks"],
              "failures": len(summary["failures"]), "passed": summary["passed"]}
    for key, value in summary["worst"].items():
        fields[f"worst_{key}"] = value
    text = io.format_report(fields)
    sys.stdout.write(text)
    for failure in summary["failures"]:
        print(f"failed: {failure}", file=sys.stderr)
    if args.out is not None:
        out = _out_dir(args, args.out)
        (out / "prox_selftest.txt").write_text(text, encoding="utf-8")
    return 0 if summary["passed"] else 1


def cmd_bound_verify(args):
    try:
        deltas = [float(v) for v in args.deltas.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"deltas must be comma-separated numbers, got {args.deltas!r}")
    if not deltas or any(d < 0 for d in deltas):
        raise UsageError("deltas must be a non-empty list of values >= 0")
    if args.max_iter < 2:
        raise UsageError("max-iter must be >= 2")
    cases = bound_cases(args.instances, args.family, seed=args.seed)
    noisy, meta = [], []
    for index, (instance, truth, draw_seed, family) in enumerate(cases):
        for delta in deltas:
            noisy.append((add_noise(instance, truth, delta, seed=draw_seed), truth))
            meta.append((index, draw_seed, family))
    report = verify_bound_sweep(noisy, c=args.c, max_iter=args.max_iter)
    rows = report.records()
    for rec, (index, draw_seed, family) in zip(rows, meta):
        rec.update(case=index, draw_seed=draw_seed, family=family)
    out = _out_dir(args, "results/bound")
    cols = ["case", "family", "draw_seed", "delta", "alpha", "a", "b", "t_stop",
            "min_slack", "worst_t", "final_err", "ok"]
    io.write_csv(out / "bound_verify.csv", cols, rows)
    print(f"cases = {len(report.checks)}")
    print(f"min_slack = {report.min_slack!r}")
    print(f"passed = {'true' if report.ok else 'false'}")
    return 0 if report.ok else 1


COMMANDS = {
    "example1": cmd_example1,
    "synthetic": cmd_synthetic,
    "check": cmd_check,
    "prox-selftest": cmd_prox_selftest,
    "bound-verify": cmd_bound_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs is not None and args.jobs < 1:
        parser.error("jobs must be >= 1")
    if args.jobs is None:
        args.jobs = os.cpu_count() or 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ConfigError, ParameterError) as exc:
        print(f"irksn {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"irksn {args.command}: diverged: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
