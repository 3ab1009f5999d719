import pytest

from irksn.cli import main
from irksn.datagen import gen_example1
from irksn.io import parse_report, read_csv, save_instance


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestExample1:
    def test_outputs(self, tmp_path, capsys):
        code, out, _ = run(capsys, "example1", "--iters", "40", "--record-every", "4",
                           "--out", str(tmp_path))
        assert code == 0
        report = parse_report((tmp_path / "conditions.txt").read_text())
        assert report["l1_condition_value"] == pytest.approx(13 / 11, abs=1e-9)
        assert report["ours_lhs"] == pytest.approx(11 / 15, abs=1e-9)
        assert report["region"] == "ours_only"
        for name in ("irksn", "iht", "srdi", "irosr", "ircr"):
            assert len(read_csv(tmp_path / f"{name}.csv")) == 10
        assert len(read_csv(tmp_path / "irksn_path.csv")) == 10
        assert len(read_csv(tmp_path / "lasso_path.csv")) == 100
        assert (tmp_path / "elasticnet_path.csv").exists()
        svgs = sorted(p.name for p in tmp_path.glob("*.svg"))
        assert svgs == ["error_vs_iter.svg", "irksn_path.svg", "lasso_path.svg",
                        "sparsity_vs_iter.svg"]
        assert "l1_condition_value" in out

    @pytest.mark.parametrize("argv,match", [
        (["--iters", "0"], "iters must be ≥ 2"),
        (["--iters", "10", "--record-every", "20"], "record-every"),
        (["--alpha", "2"], "alpha"),
    ])
    def test_usage_errors(self, capsys, argv, match):
        with pytest.raises(SystemExit) as info:
            main(["example1", *argv])
        assert info.value.code == 2
        assert match in capsys.readouterr().err


class TestCheck:
    def test_example1(self, tmp_path, capsys):
        code, out, _ = run(capsys, "check", "--generator", "example1", "--out", str(tmp_path))
        assert code == 0
        report = parse_report(out)
        assert report["region"] == "ours_only"
        assert report["ours_rhs"] == pytest.approx(1.0, abs=1e-9)
        assert (tmp_path / "conditions.txt").read_text() == out

    def test_identity(self, tmp_path, capsys):
        _, out, _ = run(capsys, "check", "--generator", "identity", "--d", "8", "--k", "3",
                        "--out", str(tmp_path))
        assert parse_report(out)["region"] == "l1_and_ours"

    @pytest.mark.parametrize("generator", ["example2", "correlated"])
    def test_other_generators(self, tmp_path, capsys, generator):
        code, out, _ = run(capsys, "check", "--generator", generator, "--out", str(tmp_path))
        assert code == 0 and "region" in parse_report(out)

    def test_zero_coefficient_in_support(self, tmp_path, capsys):
        path = tmp_path / "inst.txt"
        path.write_text("n 3\nd 3\ndelta 0\nseed 0\nX\n1 0 0\n0 1 0\n0 0 1\n"
                        "y_delta\n1 0 0\nw_star\n1 0 0\nsupport\n0 1\n")
        code, out, _ = run(capsys, "check", "--instance-file", str(path), "--out",
                           str(tmp_path))
        report = parse_report(out)
        assert code == 0
        # lhs = rhs = 0: the strict inequality fails on the boundary
        assert report["ours_rhs"] == 0.0 and report["a2_status"] == "boundary"
        assert report["region"] == "l1_only"

    def test_instance_file_round_trip(self, tmp_path, capsys):
        inst, truth = gen_example1(0)
        path = tmp_path / "e1.txt"
        save_instance(path, inst, truth)
        _, out, _ = run(capsys, "check", "--instance-file", str(path), "--out", str(tmp_path))
        assert parse_report(out)["l1_condition_value"] == pytest.approx(13 / 11, abs=1e-9)

    def test_missing_truth(self, tmp_path, capsys):
        inst, _ = gen_example1(0)
        path = tmp_path / "e1.txt"
        save_instance(path, inst)
        code, _, err = run(capsys, "check", "--instance-file", str(path), "--out",
                           str(tmp_path))
        assert code == 2 and "ground truth" in err

    def test_source_required(self, capsys):
        with pytest.raises(SystemExit):
            main(["check"])


class TestProxSelftest:
    def test_zero_trials(self, capsys):
        code, out, _ = run(capsys, "prox-selftest", "--trials", "0")
        report = parse_report(out)
        assert code == 0 and report["checks"] == 0 and report["passed"] is True

    def test_deterministic(self, capsys, tmp_path):
        _, a, _ = run(capsys, "prox-selftest", "--trials", "15", "--seed", "3")
        _, b, _ = run(capsys, "prox-selftest", "--trials", "15", "--seed", "3",
                      "--out", str(tmp_path))
        assert a == b
        assert (tmp_path / "prox_selftest.txt").read_text() == a

    def test_negative_trials(self):
        with pytest.raises(SystemExit):
            main(["prox-selftest", "--trials", "-1"])


class TestBoundVerify:
    def test_small(self, tmp_path, capsys):
        code, out, _ = run(capsys, "bound-verify", "--instances", "2", "--max-iter", "100",
                           "--deltas", "0,0.1", "--out", str(tmp_path))
        rows = read_csv(tmp_path / "bound_verify.csv")
        assert code == 0 and len(rows) == 4
        assert {r["delta"] for r in rows} == {"0.0", "0.1"}
        assert all(r["ok"] == "True" for r in rows)
        assert "passed = true" in out

    def test_bad_deltas(self):
        with pytest.raises(SystemExit):
            main(["bound-verify", "--deltas", "a,b"])


class TestSynthetic:
    def test_config_file(self, tmp_path, capsys):
        cfg = tmp_path / "tiny.yaml"
        cfg.write_text("name: tiny\nsweep: {variable: rho, values: [0.1, 0.5]}\n"
                       "fixed: {n: 15, d: 10, k: 2, snr: 3.0}\nseeds: [0, 1]\n"
                       "algorithms: [omp, iht]\nmax_iter: 30\n")
        code, _, _ = run(capsys, "synthetic", "--config", str(cfg), "--jobs", "1",
                         "--out", str(tmp_path / "res"))
        assert code == 0
        agg = read_csv(tmp_path / "res" / "tiny_aggregate.csv")
        seeds = read_csv(tmp_path / "res" / "tiny_seeds.csv")
        assert len(agg) == 4 and len(seeds) == 8
        assert (tmp_path / "res" / "tiny_f1.svg").exists()

    def test_seed_flag_after_subcommand(self, tmp_path, capsys):
        cfg = tmp_path / "tiny.yaml"
        cfg.write_text("sweep: {variable: n, values: [12]}\n"
                       "fixed: {d: 10, k: 2, rho: 0.5, snr: 3.0}\nseeds: [0]\n"
                       "algorithms: [omp]\n")
        run(capsys, "--seed", "4", "synthetic", "--config", str(cfg), "--jobs", "1",
            "--out", str(tmp_path))
        a = read_csv(tmp_path / "tiny_seeds.csv")
        run(capsys, "synthetic", "--config", str(cfg), "--seed", "4", "--jobs", "1",
            "--out", str(tmp_path))
        assert read_csv(tmp_path / "tiny_seeds.csv") == a
        assert a[0]["seed"] == "4"

    def test_empty_seeds(self, tmp_path, capsys):
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("sweep: {variable: n, values: [12]}\n"
                       "fixed: {d: 10, k: 2, rho: 0.5, snr: 3.0}\nseeds: []\n")
        code, _, err = run(capsys, "synthetic", "--config", str(cfg), "--out", str(tmp_path))
        assert code == 2 and "seeds" in err

    def test_bundled_configs(self):
        from irksn.cli import _resolve_config

        a = _resolve_config("fig4a")
        assert a.sweep == "n" and a.values == (10, 30, 50, 70, 90)
        assert a.fixed["rho"] == 0.5 and a.fixed["snr"] == 1 and a.fixed["d"] == 50
        assert a.fixed["k"] == 10 and len(a.seeds) == 5
        c = _resolve_config("fig4c")
        assert c.sweep == "rho" and c.values == (0.1, 0.3, 0.5, 0.7, 0.9)
        b = _resolve_config("fig4b")
        assert b.values == (0.1, 0.5, 1.0, 2.0, 3.0)

    def test_unknown_config(self, capsys):
        code, _, err = run(capsys, "synthetic", "--config", "nope")
        assert code == 2 and "nope" in err


def test_bad_jobs():
    with pytest.raises(SystemExit):
        main(["--jobs", "0", "prox-selftest", "--trials", "0"])
