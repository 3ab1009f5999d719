"""Grid search, multi-seed sweeps and bound verification.

Selection protocol: every grid cell is run for ``max_iter`` iterations and
every recorded iterate is a candidate (path methods contribute one candidate
per path point). The best candidate maximises support F1; ties go to the
lower model error, then to the earlier cell in grid order, then to the
earlier iterate. This is oracle early stopping and needs the ground truth.

Seeds: the data of sweep seed ``s`` is ``gen_correlated(..., seed=base + s)``
for every sweep value, so all values share the same random stream.
"""

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .conditions import AssumptionViolation, admissible_alpha_max, theorem1_constants
from .datagen import SyntheticSpec, add_noise, gen_correlated, gen_example2
from .exceptions import ConfigError, DivergenceError, ParameterError
from .metrics import (
    DEFAULT_SUPPORT_TOL,
    REPARAM_SUPPORT_TOL,
    MetricRow,
    f1_batch,
    row_errors,
)
from .solvers import (
    ENET_L1_RATIOS,
    IrksnConfig,
    elasticnet_path,
    iht,
    ircr,
    irksn,
    irosr,
    ksn_penalized,
    lasso_path,
    omp,
    srdi,
)

__all__ = [
    "ALGORITHMS",
    "LOG_GRID",
    "IRKSN_ALPHAS",
    "ExperimentConfig",
    "AggregateResult",
    "CellResult",
    "BoundCheck",
    "BoundReport",
    "bound_cases",
    "Example1Study",
    "run_example1",
    "default_grids",
    "expand_grid",
    "evaluate_cell",
    "run_grid",
    "run_sweep",
    "verify_bound",
    "verify_bound_sweep",
]

logger = logging.getLogger(__name__)

LOG_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)
IRKSN_ALPHAS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)
MAX_ITER = 20_000
SWEEP_VARIABLES = ("n", "snr", "rho")

# accepted grid keys per algorithm
_PARAMS = {
    "irksn": ("k", "alpha"),
    "iht": ("k", "eta"),
    "omp": ("k",),
    "lasso": (),
    "elasticnet": ("l1_ratio",),
    "ksn": ("k", "lam", "L"),
    "srdi": ("kappa", "alpha"),
    "irosr": ("eta", "alpha"),
    "ircr": (),
}
ALGORITHMS = tuple(_PARAMS)


def default_grids(k):
    """Hyperparameter grids of the synthetic benchmark, ``k`` the true sparsity."""
    return {
        "irksn": {"k": [k], "alpha": list(IRKSN_ALPHAS)},
        "iht": {"k": [k], "eta": list(LOG_GRID)},
        "omp": {"k": [k]},
        "lasso": {},
        "elasticnet": {"l1_ratio": list(ENET_L1_RATIOS)},
        "ksn": {"k": [k], "lam": [0.1, 1.0], "L": [1e6]},
        "srdi": {"kappa": list(LOG_GRID), "alpha": list(LOG_GRID)},
        "irosr": {"eta": list(LOG_GRID), "alpha": list(LOG_GRID)},
        "ircr": {},
    }


def _check_algorithm(algorithm):
    if algorithm not in _PARAMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of "
                          f"{', '.join(ALGORITHMS)}")


def expand_grid(algorithm, grid):
    """Cartesian product of a ``{name: values}`` grid, in key order.

    A list of dicts is taken as already expanded. An empty mapping gives a
    single cell with no parameters.
    """
    _check_algorithm(algorithm)
    if isinstance(grid, dict):
        for key, values in grid.items():
            if key not in _PARAMS[algorithm]:
                raise ConfigError(f"grid key {key!r} is not a parameter of {algorithm}")
            if isinstance(values, (str, bytes)) or not hasattr(values, "__iter__"):
                raise ConfigError(f"grid entry {algorithm}.{key} must be a list")
            if len(list(values)) == 0:
                raise ConfigError(f"grid entry {algorithm}.{key} is empty")
        keys = list(grid)
        cells = [dict(zip(keys, combo))
                 for combo in itertools.product(*(list(grid[key]) for key in keys))]
    else:
        cells = [dict(cell) for cell in grid]
        for cell in cells:
            for key in cell:
                if key not in _PARAMS[algorithm]:
                    raise ConfigError(f"grid key {key!r} is not a parameter of {algorithm}")
    if not cells:
        raise ConfigError(f"grid for {algorithm} is empty")
    return cells


def _candidates(instance, algorithm, params, max_iter, record_every):
    """Yield ``(params, labels, coefs)`` blocks for one grid cell."""
    p = params
    if algorithm == "irksn":
        run = irksn(instance, IrksnConfig(k=p["k"], alpha=p["alpha"], max_iter=max_iter,
                                          record_every=record_every))
    elif algorithm == "iht":
        run = iht(instance, p["k"], p["eta"], max_iter, record_every)
    elif algorithm == "ksn":
        run = ksn_penalized(instance, p["k"], p["lam"], p.get("L"), max_iter, record_every)
    elif algorithm == "srdi":
        run = srdi(instance, p["kappa"], p["alpha"], max_iter, record_every)
    elif algorithm == "irosr":
        run = irosr(instance, p["eta"], p["alpha"], max_iter, record_every)
    elif algorithm == "ircr":
        run = ircr(instance, max_iter, record_every)
    elif algorithm == "omp":
        return [(p, np.array([float(p["k"])]), omp(instance, p["k"])[None])]
    elif algorithm == "lasso":
        return [({**p, "lam": lam}, np.array([lam]), w[None])
                for lam, w in lasso_path(instance)]
    elif algorithm == "elasticnet":
        path = elasticnet_path(instance, l1_ratios=(p.get("l1_ratio", 0.8),))
        return [({**p, "lam": lam}, np.array([lam]), w[None]) for lam, _, w in path]
    else:
        _check_algorithm(algorithm)
    return [(p, run.iterations.astype(float), run.coefs)]


def _missing(algorithm, params):
    required = {"irksn": ("k", "alpha"), "iht": ("k", "eta"), "omp": ("k",),
                "ksn": ("k", "lam"), "srdi": ("kappa", "alpha"), "irosr": ("eta", "alpha")}
    return [key for key in required.get(algorithm, ()) if key not in params]


@dataclass
class CellResult:
    """Best and last candidate of one grid cell, with provenance."""

    algorithm: str
    params: dict
    cell_index: int
    best: MetricRow
    final: MetricRow
    best_key: tuple = ()


def _score(coefs, truth, support_tol, criterion, holdout):
    f1, prec, rec, spars = f1_batch(coefs, truth.support, support_tol)
    errs = row_errors(coefs, truth.w_star)
    if criterion == "f1":
        primary = f1
    else:
        X_val, y_val = holdout
        with np.errstate(over="ignore", invalid="ignore"):
            primary = -np.mean((coefs @ X_val.T - y_val) ** 2, axis=1)
        primary = np.where(np.isnan(primary), -np.inf, primary)
    return primary, f1, prec, rec, errs, spars


def evaluate_cell(instance, truth, algorithm, params, cell_index=0, *, max_iter=MAX_ITER,
                  record_every=1, seed=0, support_tol=None, criterion="f1", holdout=None):
    """Run one grid cell and return its :class:`CellResult`.

    Raises the solver's :class:`DivergenceError` or :class:`ParameterError`
    unchanged; :func:`run_grid` turns those into skipped cells.
    """
    _check_algorithm(algorithm)
    missing = _missing(algorithm, params)
    if missing:
        raise ConfigError(f"{algorithm} cell {params!r} lacks {', '.join(missing)}")
    if support_tol is None:
        support_tol = REPARAM_SUPPORT_TOL if algorithm == "irosr" else DEFAULT_SUPPORT_TOL
    best = final = None
    best_key = None
    for block_index, (p, labels, coefs) in enumerate(
            _candidates(instance, algorithm, params, max_iter, record_every)):
        primary, f1, prec, rec, errs, spars = _score(coefs, truth, support_tol,
                                                     criterion, holdout)
        # lexsort: last key is primary; earliest index wins remaining ties
        order = np.lexsort((np.arange(len(labels)), errs, -primary))
        i = int(order[0])
        key = (-float(primary[i]), float(errs[i]), block_index, i)

        def row(j):
            return MetricRow(algorithm, dict(p), seed, float(labels[j]), float(f1[j]),
                             float(prec[j]), float(rec[j]), float(errs[j]), int(spars[j]))

        if best_key is None or key < best_key:
            best, best_key = row(i), key
        final = row(len(labels) - 1)
    return CellResult(algorithm, dict(params), cell_index, best, final, best_key)


def _select(results):
    """Best cell by (primary score, error, grid order, iterate order)."""
    return min(results, key=lambda r: (r.best_key[0], r.best_key[1], r.cell_index,
                                       r.best_key[2], r.best_key[3]))


def _run_cells(instance, truth, algorithm, cells, **kwargs):
    results = []
    for index, params in enumerate(cells):
        try:
            results.append(evaluate_cell(instance, truth, algorithm, params, index, **kwargs))
        except (DivergenceError, ParameterError) as exc:
            logger.info("skipping %s cell %r: %s", algorithm, params, exc)
    return results


def run_grid(instance, truth, algorithm, grid, *, max_iter=MAX_ITER, record_every=1,
             seed=0, support_tol=None, criterion="f1", holdout=None, return_cell=False):
    """Grid search for one algorithm on one instance.

    Parameters
    ----------
    grid : dict of lists or list of dicts
        Hyperparameter cells, see :func:`expand_grid`.
    criterion : {"f1", "holdout"}
        ``"holdout"`` ranks candidates by mean squared error on
        ``holdout = (X_val, y_val)`` instead of the oracle F1.
    return_cell : bool
        Return the full :class:`CellResult` of the selected cell.

    Returns
    -------
    MetricRow or CellResult
        Diverging cells and cells with invalid parameters are skipped and
        logged.

    Raises
    ------
    RuntimeError
        If every cell was skipped.
    """
    if criterion not in ("f1", "holdout"):
        raise ParameterError(f"criterion must be 'f1' or 'holdout', got {criterion!r}")
    if criterion == "holdout" and holdout is None:
        raise ParameterError("criterion='holdout' needs holdout=(X_val, y_val)")
    cells = expand_grid(algorithm, grid)
    results = _run_cells(instance, truth, algorithm, cells, max_iter=max_iter,
                         record_every=record_every, seed=seed, support_tol=support_tol,
                         criterion=criterion, holdout=holdout)
    if not results:
        raise RuntimeError(f"every grid cell of {algorithm} was skipped")
    chosen = _select(results)
    return chosen if return_cell else chosen.best


# ---------------------------------------------------------------- sweeps


@dataclass
class ExperimentConfig:
    """One sweep over ``n``, ``snr`` or ``rho`` with the others fixed.

    ``fixed`` holds ``n``, ``d``, ``k``, ``rho`` and ``snr`` (the swept one
    is ignored). ``grids`` overrides :func:`default_grids` per algorithm.
    """

    name: str
    sweep: str
    values: tuple
    fixed: dict
    seeds: tuple
    algorithms: tuple = ALGORITHMS
    grids: dict = field(default_factory=dict)
    max_iter: int = MAX_ITER
    record_every: int = 1
    output_dir: str = "results"

    def __post_init__(self):
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, "
                              f"got {self.sweep!r}")
        self.values = tuple(self.values)
        self.seeds = tuple(int(s) for s in self.seeds)
        self.algorithms = tuple(self.algorithms)
        if not self.values:
            raise ConfigError("sweep.values must be non-empty")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if not self.algorithms:
            raise ConfigError("algorithms must be non-empty")
        needed = {"n", "d", "k", "rho", "snr"} - {self.sweep}
        absent = sorted(needed - set(self.fixed))
        if absent:
            raise ConfigError(f"fixed is missing {', '.join(absent)}")
        for name in self.algorithms:
            _check_algorithm(name)
        for name, grid in self.grids.items():
            _check_algorithm(name)
            expand_grid(name, grid)
        if int(self.max_iter) < 2:
            raise ConfigError(f"max_iter must be >= 2, got {self.max_iter}")
        if int(self.record_every) < 1:
            raise ConfigError(f"record_every must be >= 1, got {self.record_every}")

    def grid_for(self, algorithm):
        return self.grids.get(algorithm, default_grids(int(self.fixed["k"]))[algorithm])

    def spec_for(self, value, seed):
        params = {key: self.fixed[key] for key in ("n", "d", "k", "rho", "snr")
                  if key in self.fixed}
        params[self.sweep] = value
        try:
            return SyntheticSpec(int(params["n"]), int(params["d"]), int(params["k"]),
                                 float(params["rho"]), float(params["snr"]), int(seed))
        except ParameterError as exc:
            raise ConfigError(f"{self.sweep}={value!r}: {exc}") from None

    @classmethod
    def from_dict(cls, raw, source="config"):
        """Build from the parsed YAML schema documented in the README."""
        if not isinstance(raw, dict):
            raise ConfigError(f"{source}: top level must be a mapping")
        known = {"name", "sweep", "fixed", "seeds", "algorithms", "grids", "max_iter",
                 "record_every", "output_dir"}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"{source}: unknown key {unknown[0]!r}")
        for key in ("sweep", "fixed", "seeds"):
            if key not in raw:
                raise ConfigError(f"{source}: missing key {key!r}")
        sweep = raw["sweep"]
        if not isinstance(sweep, dict) or "variable" not in sweep or "values" not in sweep:
            raise ConfigError(f"{source}: key 'sweep' needs 'variable' and 'values'")
        if not isinstance(raw["fixed"], dict):
            raise ConfigError(f"{source}: key 'fixed' must be a mapping")
        if not isinstance(raw["seeds"], list):
            raise ConfigError(f"{source}: key 'seeds' must be a list")
        grids = raw.get("grids") or {}
        if not isinstance(grids, dict):
            raise ConfigError(f"{source}: key 'grids' must be a mapping")
        try:
            return cls(name=str(raw.get("name", Path(str(source)).stem)),
                       sweep=sweep["variable"], values=sweep["values"], fixed=raw["fixed"],
                       seeds=raw["seeds"],
                       algorithms=raw.get("algorithms", ALGORITHMS),
                       grids={k: v for k, v in grids.items()},
                       max_iter=int(raw.get("max_iter", MAX_ITER)),
                       record_every=int(raw.get("record_every", 1)),
                       output_dir=str(raw.get("output_dir", "results")))
        except ConfigError as exc:
            raise ConfigError(f"{source}: {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{source}: {exc}") from None

    @classmethod
    def load(cls, path):
        import yaml

        try:
            raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML: {exc}") from None
        return cls.from_dict(raw, source=str(path))


@dataclass
class AggregateResult:
    """Per ``(algorithm, value)``: mean and std of best F1 over seeds.

    ``best[(alg, value)]`` lists the per-seed best rows sorted by seed and
    ``final[(alg, value)]`` the last iterate of the selected cell.
    """

    sweep: str
    best: dict
    final: dict

    def keys(self):
        return sorted(self.best, key=lambda kv: (kv[0], kv[1]))

    def f1_values(self, algorithm, value):
        return np.array([row.f1 for row in self.best[(algorithm, value)]])

    def mean(self, algorithm, value):
        return float(np.mean(self.f1_values(algorithm, value)))

    def std(self, algorithm, value):
        return float(np.std(self.f1_values(algorithm, value)))

    def records(self):
        out = []
        for alg, value in self.keys():
            rows = self.best[(alg, value)]
            out.append({"algorithm": alg, self.sweep: value, "mean_f1": self.mean(alg, value),
                        "std_f1": self.std(alg, value),
                        "mean_err2": float(np.mean([r.err2 for r in rows])),
                        "n_seeds": len(rows)})
        return out

    def seed_records(self):
        out = []
        for alg, value in self.keys():
            for row, last in zip(self.best[(alg, value)], self.final[(alg, value)]):
                rec = row.as_record()
                rec[self.sweep] = value
                rec["final_f1"] = last.f1
                rec["final_iter"] = last.iteration
                out.append(rec)
        return out


def _sweep_unit(args):
    config, value, seed, algorithm = args
    instance, truth = gen_correlated(config.spec_for(value, seed))
    cell = run_grid(instance, truth, algorithm, config.grid_for(algorithm),
                    max_iter=int(config.max_iter), record_every=int(config.record_every),
                    seed=seed, return_cell=True)
    return value, seed, algorithm, cell


def run_sweep(config, jobs=1, seed_offset=0):
    """Run every (value, seed, algorithm) grid search and aggregate.

    ``seed_offset`` is added to every seed of the config. Work units run
    in a process pool when ``jobs > 1``; results are sorted before
    aggregation so the outcome does not depend on completion order.
    """
    units = [(config, value, seed + seed_offset, algorithm)
             for value in config.values for seed in config.seeds
             for algorithm in config.algorithms]
    if jobs is None or jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_sweep_unit, units))
    else:
        outputs = [_sweep_unit(unit) for unit in units]
    best, final = {}, {}
    for value, seed, algorithm, cell in sorted(outputs, key=lambda o: (o[2], o[1])):
        best.setdefault((algorithm, value), []).append(cell.best)
        final.setdefault((algorithm, value), []).append(cell.final)
    return AggregateResult(config.sweep, best, final)


# ---------------------------------------------------------------- bound checks


@dataclass
class BoundCheck:
    case: int
    delta: float
    alpha: float
    a: float
    b: float
    t_stop: Optional[int]
    min_slack: float
    worst_t: int
    final_err: float
    ok: bool


@dataclass
class BoundReport:
    checks: list
    tol: float

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def min_slack(self):
        return min((c.min_slack for c in self.checks), default=math.inf)

    def records(self):
        return [dict(vars(c)) for c in self.checks]


def verify_bound(instance, truth, alpha=None, c=1.0, max_iter=2000, record_every=1,
                 tol=1e-9, case=0, norm="spectral"):
    """Check ``||w_t - w*|| <= a t delta + b / t`` at every recorded ``t >= 2``.

    ``alpha`` defaults to half of ``alpha_max``. Slack is bound minus error.
    """
    if alpha is None:
        alpha = admissible_alpha_max(instance, truth).alpha_max / 2.0
    bound, _ = theorem1_constants(instance, truth, alpha, c=c, norm=norm)
    run = irksn(instance, IrksnConfig(k=truth.k, alpha=alpha, max_iter=max_iter,
                                      record_every=record_every, norm=norm))
    t = run.iterations
    errs = row_errors(run.coefs, truth.w_star)
    mask = t >= 2
    slack = bound.value(t[mask].astype(float), instance.delta) - errs[mask]
    if slack.size == 0:
        raise ParameterError("no recorded iterate with t >= 2")
    i = int(np.argmin(slack))
    return BoundCheck(case, float(instance.delta), float(alpha), bound.a, bound.b,
                      bound.stopping_time(), float(slack[i]), int(t[mask][i]),
                      float(errs[-1]), bool(slack[i] >= -tol))


def verify_bound_sweep(cases, alphas=None, c=1.0, max_iter=2000, record_every=1, tol=1e-9):
    """Run :func:`verify_bound` on ``(instance, truth)`` pairs.

    Raises
    ------
    AssumptionViolation
        Naming the first case that does not satisfy the assumptions.
    """
    cases = list(cases)
    if alphas is not None and len(alphas) != len(cases):
        raise ParameterError("alphas must match the number of cases")
    checks = []
    for i, (instance, truth) in enumerate(cases):
        alpha = None if alphas is None else alphas[i]
        try:
            checks.append(verify_bound(instance, truth, alpha, c, max_iter, record_every,
                                       tol, case=i))
        except AssumptionViolation as exc:
            raise AssumptionViolation(f"case {i}: {exc}") from None
    return BoundReport(checks, tol)


def bound_cases(count, family="mixed", seed=0, n=30, d=50, k=None, max_draws=10_000):
    """Draw ``count`` noiseless instances that satisfy the bound's assumptions.

    ``family`` is ``"example2"``, ``"correlated"`` or ``"mixed"`` (alternating,
    Example-2 first). Draw ``j`` of a family uses seed ``seed + j``; draws
    that fail the assumptions are skipped. Correlated draws default to
    ``k=3`` because acceptance becomes rare for larger supports at this size.

    Returns a list of ``(instance, truth, draw_seed, family)``.
    """
    if family not in ("example2", "correlated", "mixed"):
        raise ParameterError(f"unknown family {family!r}")
    families = ["example2", "correlated"] if family == "mixed" else [family]
    cursor = {name: 0 for name in families}
    cases = []
    while len(cases) < count:
        name = families[len(cases) % len(families)]
        while True:
            j = cursor[name]
            cursor[name] += 1
            if j >= max_draws:
                raise RuntimeError(f"no admissible {name} draw within {max_draws} seeds")
            if name == "example2":
                instance, truth = gen_example2(n, d, 5 if k is None else k, seed=seed + j)
            else:
                spec = SyntheticSpec(n, d, 3 if k is None else k, 0.5, 1.0, seed + j)
                noisy, truth = gen_correlated(spec)
                instance = add_noise(noisy, truth, 0.0)
            try:
                admissible_alpha_max(instance, truth)
            except AssumptionViolation:
                continue
            cases.append((instance, truth, seed + j, name))
            break
    return cases


@dataclass
class Example1Study:
    """Everything the Example-1 figures and checks need.

    ``runs`` holds one :class:`SolverRun` per iterative method; for the
    methods with a grid it is the cell reaching the lowest model error.
    ``paths`` holds the Lasso and ElasticNet ``(lam, w)`` paths.
    """

    instance: object
    truth: object
    report: object
    alpha: float
    runs: dict
    paths: dict


def _min_error(run, truth):
    return float(np.min(row_errors(run.coefs, truth.w_star)))


def run_example1(seed=0, alpha=None, iters=MAX_ITER, record_every=1, enet_ratio=0.8):
    """IRKSN and the baselines on the five-feature Example-1 instance.

    ``alpha`` defaults to half of ``alpha_max``. IHT, SRDI and IROSR are
    run on the same logarithmic grids as the synthetic benchmark and the
    cell with the lowest error over all iterates is kept.
    """
    from .conditions import condition_report
    from .datagen import gen_example1

    if int(iters) < 2:
        raise ParameterError("iters must be >= 2")
    instance, truth = gen_example1(seed)
    report = condition_report(instance, truth)
    if alpha is None:
        alpha = admissible_alpha_max(instance, truth).alpha_max / 2.0
    runs = {"irksn": irksn(instance, IrksnConfig(k=truth.k, alpha=alpha, max_iter=iters,
                                                 record_every=record_every))}
    grids = {
        "iht": [dict(eta=e) for e in LOG_GRID],
        "srdi": [dict(kappa=kp, alpha=a) for kp in LOG_GRID for a in LOG_GRID],
        "irosr": [dict(eta=e, alpha=a) for e in LOG_GRID for a in LOG_GRID],
    }
    solvers = {
        "iht": lambda p: iht(instance, truth.k, p["eta"], iters, record_every),
        "srdi": lambda p: srdi(instance, p["kappa"], p["alpha"], iters, record_every),
        "irosr": lambda p: irosr(instance, p["eta"], p["alpha"], iters, record_every),
    }
    for name, cells in grids.items():
        best = None
        for params in cells:
            try:
                run = solvers[name](params)
            except DivergenceError as exc:
                logger.info("skipping %s cell %r: %s", name, params, exc)
                continue
            if best is None or _min_error(run, truth) < _min_error(best, truth):
                best = run
        if best is None:
            raise RuntimeError(f"every {name} cell diverged on Example 1")
        runs[name] = best
    runs["ircr"] = ircr(instance, iters, record_every)
    paths = {"lasso": lasso_path(instance),
             "elasticnet": [(lam, w) for lam, _, w in
                            elasticnet_path(instance, l1_ratios=(enet_ratio,))]}
    return Example1Study(instance, truth, report, float(alpha), runs, paths)
