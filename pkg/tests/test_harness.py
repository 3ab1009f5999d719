import logging

import numpy as np
import pytest

from irksn.conditions import AssumptionViolation, GroundTruth, check_assumption1
from irksn.datagen import SyntheticSpec, add_noise, gen_correlated, gen_example2
from irksn.exceptions import ConfigError, ParameterError
from irksn.harness import (
    IRKSN_ALPHAS,
    LOG_GRID,
    AggregateResult,
    ExperimentConfig,
    bound_cases,
    default_grids,
    evaluate_cell,
    expand_grid,
    run_example1,
    run_grid,
    run_sweep,
    verify_bound,
    verify_bound_sweep,
)
from irksn.metrics import MetricRow
from irksn.solvers import ProblemInstance


@pytest.fixture(scope="module")
def small():
    return gen_correlated(SyntheticSpec(20, 15, 3, 0.5, 3.0, 0))


def config_dict(**over):
    raw = {"name": "t", "sweep": {"variable": "rho", "values": [0.1]},
           "fixed": {"n": 15, "d": 10, "k": 2, "snr": 3.0}, "seeds": [0],
           "algorithms": ["omp"], "max_iter": 50}
    raw.update(over)
    return raw


class TestGrids:
    def test_default_grids(self):
        g = default_grids(10)
        assert g["irksn"] == {"k": [10], "alpha": [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0]}
        assert g["iht"] == {"k": [10], "eta": [1e-4, 1e-3, 1e-2, 1e-1, 1.0]}
        assert g["srdi"] == {"kappa": list(LOG_GRID), "alpha": list(LOG_GRID)}
        assert g["irosr"] == {"eta": list(LOG_GRID), "alpha": list(LOG_GRID)}
        assert g["ircr"] == {}
        assert g["omp"] == {"k": [10]}
        assert g["ksn"]["L"] == [1e6]
        assert tuple(IRKSN_ALPHAS) == (1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0)
        assert len(expand_grid("srdi", g["srdi"])) == 25

    def test_expand_order(self):
        cells = expand_grid("srdi", {"kappa": [1, 2], "alpha": [3, 4]})
        assert cells == [{"kappa": 1, "alpha": 3}, {"kappa": 1, "alpha": 4},
                         {"kappa": 2, "alpha": 3}, {"kappa": 2, "alpha": 4}]
        assert expand_grid("ircr", {}) == [{}]
        assert expand_grid("iht", [{"k": 1, "eta": 0.1}]) == [{"k": 1, "eta": 0.1}]

    @pytest.mark.parametrize("algorithm,grid,match", [
        ("iht", {"step": [1]}, "step"),
        ("iht", {"eta": []}, "empty"),
        ("iht", {"eta": 0.1}, "list"),
        ("nope", {}, "unknown algorithm"),
        ("iht", [], "empty"),
        ("iht", [{"bad": 1}], "bad"),
    ])
    def test_bad_grids(self, algorithm, grid, match):
        with pytest.raises(ConfigError, match=match):
            expand_grid(algorithm, grid)


class TestRunGrid:
    def test_single_cell(self, small):
        inst, truth = small
        cell = evaluate_cell(inst, truth, "iht", {"k": 3, "eta": 0.01}, max_iter=30)
        row = run_grid(inst, truth, "iht", {"k": [3], "eta": [0.01]}, max_iter=30)
        assert row == cell.best
        assert cell.final.iteration == 30.0

    def test_best_is_max_f1_over_iterates(self, small):
        inst, truth = small
        cell = evaluate_cell(inst, truth, "irksn", {"k": 3, "alpha": 0.01}, max_iter=200)
        from irksn.solvers import IrksnConfig, irksn
        from irksn.metrics import f1_batch

        run = irksn(inst, IrksnConfig(k=3, alpha=0.01, max_iter=200))
        f1 = f1_batch(run.coefs, truth.support)[0]
        assert cell.best.f1 == f1.max()

    def test_diverging_cell_skipped(self, small, caplog):
        inst, truth = small
        with caplog.at_level(logging.INFO, logger="irksn.harness"):
            row = run_grid(inst, truth, "iht", {"k": [3], "eta": [10.0, 0.01]}, max_iter=500)
        assert row.hyperparams["eta"] == 0.01
        assert np.isfinite(row.err2)
        assert "skipping iht" in caplog.text

    def test_invalid_cell_skipped(self, small):
        inst, truth = small
        row = run_grid(inst, truth, "irksn", {"k": [3], "alpha": [0.01, 1.0, 10.0]},
                       max_iter=50)
        assert row.hyperparams["alpha"] == 0.01

    def test_all_skipped(self, small):
        inst, truth = small
        with pytest.raises(RuntimeError, match="every grid cell"):
            run_grid(inst, truth, "irksn", {"k": [3], "alpha": [1.0, 10.0]}, max_iter=10)

    def test_missing_parameter(self, small):
        inst, truth = small
        with pytest.raises(ConfigError, match="eta"):
            evaluate_cell(inst, truth, "iht", {"k": 3})

    def test_tie_goes_to_earlier_cell(self):
        inst = ProblemInstance(np.eye(4), np.array([1.0, 0, 0, 0]))
        truth = GroundTruth(np.array([1.0, 0, 0, 0]), np.array([0]), inst.y_delta)
        cell = run_grid(inst, truth, "omp", [{"k": 1}, {"k": 1}], return_cell=True)
        assert cell.cell_index == 0

    def test_tie_goes_to_lower_error(self):
        inst = ProblemInstance(np.eye(3), np.array([2.0, 0, 0]))
        truth = GroundTruth(np.array([2.0, 0, 0]), np.array([0]), inst.y_delta)
        # eta=1 lands on w* after one step, eta=0.5 approaches it
        cell = run_grid(inst, truth, "iht", {"k": [1], "eta": [0.5, 1.0]}, max_iter=3,
                        return_cell=True)
        assert cell.params["eta"] == 1.0
        assert cell.best.err2 == 0.0 and cell.best.iteration == 1.0

    def test_grid_order_does_not_change_best(self, small):
        inst, truth = small
        a = run_grid(inst, truth, "iht", {"k": [3], "eta": [0.001, 0.01, 0.1]}, max_iter=200)
        b = run_grid(inst, truth, "iht", {"k": [3], "eta": [0.1, 0.01, 0.001]}, max_iter=200)
        assert (a.f1, a.err2) == (b.f1, b.err2)

    def test_path_methods(self, small):
        inst, truth = small
        lasso = run_grid(inst, truth, "lasso", {}, return_cell=True)
        assert "lam" in lasso.best.hyperparams
        # path labels are lambdas in decreasing order; final is the smallest
        assert lasso.final.iteration <= lasso.best.iteration
        enet = run_grid(inst, truth, "elasticnet", {"l1_ratio": [0.5]})
        assert enet.hyperparams["l1_ratio"] == 0.5

    def test_holdout_mode(self, small):
        inst, truth = small
        rng = np.random.default_rng(0)
        X_val = rng.normal(size=(40, inst.d))
        holdout = (X_val, X_val @ truth.w_star)
        row = run_grid(inst, truth, "irksn", {"k": [3], "alpha": [0.01]}, max_iter=300,
                       criterion="holdout", holdout=holdout)
        assert 0.0 <= row.f1 <= 1.0
        with pytest.raises(ParameterError):
            run_grid(inst, truth, "iht", {"k": [3], "eta": [0.01]}, criterion="holdout")
        with pytest.raises(ParameterError):
            run_grid(inst, truth, "iht", {"k": [3], "eta": [0.01]}, criterion="mse")

    def test_irosr_uses_loose_tolerance(self, small):
        inst, truth = small
        row = run_grid(inst, truth, "irosr", {"eta": [0.01], "alpha": [1e-3]}, max_iter=200)
        assert 0.0 <= row.f1 <= 1.0


class TestConfig:
    def test_from_dict(self):
        cfg = ExperimentConfig.from_dict(config_dict())
        assert cfg.sweep == "rho" and cfg.values == (0.1,)
        assert cfg.grid_for("omp") == {"k": [2]}
        spec = cfg.spec_for(0.1, 4)
        assert (spec.n, spec.d, spec.k_true, spec.rho, spec.snr, spec.seed) == (
            15, 10, 2, 0.1, 3.0, 4)

    @pytest.mark.parametrize("over,match", [
        (dict(seeds=[]), "seeds"),
        (dict(sweep={"variable": "d", "values": [1]}), "sweep.variable"),
        (dict(sweep={"variable": "rho", "values": []}), "sweep.values"),
        (dict(fixed={"n": 15}), "fixed is missing"),
        (dict(algorithms=["bogus"]), "bogus"),
        (dict(grids={"iht": {"step": [1]}}), "step"),
        (dict(colour="red"), "colour"),
        (dict(max_iter=1), "max_iter"),
        (dict(seeds=3), "seeds"),
    ])
    def test_errors_name_key(self, over, match):
        with pytest.raises(ConfigError, match=match):
            ExperimentConfig.from_dict(config_dict(**over))

    def test_missing_key(self):
        raw = config_dict()
        del raw["fixed"]
        with pytest.raises(ConfigError, match="fixed"):
            ExperimentConfig.from_dict(raw)

    def test_load_yaml(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("sweep: {variable: n, values: [10, 20]}\n"
                        "fixed: {d: 10, k: 2, rho: 0.5, snr: 1.0}\nseeds: [0, 1]\n")
        cfg = ExperimentConfig.load(path)
        assert cfg.name == "c" and cfg.values == (10, 20)
        path.write_text("sweep: [unclosed\n")
        with pytest.raises(ConfigError, match="YAML"):
            ExperimentConfig.load(path)

    def test_bad_sweep_value(self):
        cfg = ExperimentConfig.from_dict(config_dict())
        with pytest.raises(ConfigError, match="rho"):
            cfg.spec_for(1.5, 0)


class TestSweep:
    def test_one_cell_std_zero(self):
        cfg = ExperimentConfig.from_dict(config_dict())
        res = run_sweep(cfg)
        assert res.std("omp", 0.1) == 0.0
        assert len(res.records()) == 1
        assert res.seed_records()[0]["rho"] == 0.1

    def test_seed_permutation(self):
        a = run_sweep(ExperimentConfig.from_dict(config_dict(seeds=[0, 1, 2])))
        b = run_sweep(ExperimentConfig.from_dict(config_dict(seeds=[2, 0, 1])))
        assert a.records() == b.records()
        assert [r.seed for r in b.best[("omp", 0.1)]] == [0, 1, 2]

    def test_seed_offset(self):
        cfg = ExperimentConfig.from_dict(config_dict())
        res = run_sweep(cfg, seed_offset=5)
        assert res.best[("omp", 0.1)][0].seed == 5

    def test_parallel_matches_serial(self):
        cfg = ExperimentConfig.from_dict(config_dict(seeds=[0, 1],
                                                     algorithms=["omp", "iht"]))
        assert run_sweep(cfg, jobs=2).records() == run_sweep(cfg, jobs=1).records()

    def test_mean_within_range(self):
        rows = [MetricRow("a", f1=v) for v in (0.2, 0.5, 0.9)]
        res = AggregateResult("n", {("a", 10): rows}, {("a", 10): rows})
        assert 0.2 <= res.mean("a", 10) <= 0.9
        assert res.std("a", 10) > 0


class TestBound:
    def test_noiseless_example2(self):
        inst, truth = gen_example2(30, 50, 5, seed=0)
        check = verify_bound(inst, truth, max_iter=300)
        assert check.ok and check.t_stop is None
        assert check.min_slack >= -1e-9

    def test_noisy_clip(self):
        inst, truth = gen_example2(30, 50, 5, seed=0)
        noisy = add_noise(inst, truth, 1.0, seed=1)
        check = verify_bound(noisy, truth, max_iter=50)
        assert check.t_stop == 2

    def test_sweep_rejects_violation(self):
        inst, truth = gen_example2(30, 50, 5, seed=0)
        w = truth.w_star.copy()
        bad = GroundTruth(w, np.r_[truth.support, truth.off_support[0]], inst.X @ w)
        with pytest.raises(AssumptionViolation, match="case 1"):
            verify_bound_sweep([(inst, truth), (inst, bad)], max_iter=20)

    def test_alphas_length(self):
        inst, truth = gen_example2(30, 50, 5, seed=0)
        with pytest.raises(ParameterError):
            verify_bound_sweep([(inst, truth)], alphas=[0.1, 0.2])

    def test_bound_cases(self):
        cases = bound_cases(4, seed=3)
        assert [c[3] for c in cases] == ["example2", "correlated", "example2", "correlated"]
        for inst, truth, _, _ in cases:
            assert inst.delta == 0.0
            assert check_assumption1(inst, truth)
        again = bound_cases(4, seed=3)
        assert [c[2] for c in cases] == [c[2] for c in again]

    def test_bound_cases_family(self):
        with pytest.raises(ParameterError):
            bound_cases(1, family="other")


class TestExample1Study:
    def test_short_run(self):
        study = run_example1(seed=0, iters=50)
        assert set(study.runs) == {"irksn", "iht", "srdi", "irosr", "ircr"}
        assert all(len(run) == 50 for run in study.runs.values())
        assert study.alpha == pytest.approx(1 / 30, abs=1e-9)
        assert len(study.paths["lasso"]) == 100

    def test_iters_domain(self):
        with pytest.raises(ParameterError, match="iters"):
            run_example1(iters=1)
