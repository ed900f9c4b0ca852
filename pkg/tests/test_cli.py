import hashlib
import json

import pytest

from dhillon.cli import main

FAST_MCMC = ["--iterations", "1500", "--burn-in", "300", "--thin", "2"]


def _digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


class TestSample:
    def test_writes_single_time_column(self, tmp_path):
        out = tmp_path / "draws.csv"
        code = main(["sample", "--beta", "2", "--theta", "4", "--n", "3",
                     "--seed", "7", "--out", str(out), "--out-dir", str(tmp_path)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "time"
        assert len(lines) == 4
        assert all(float(v) > 0 for v in lines[1:])

    def test_same_seed_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            assert main(["sample", "--beta", "3", "--theta", "1", "--n", "50",
                         "--seed", "11", "--out", str(path),
                         "--out-dir", str(tmp_path)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["sample", "--beta", "3", "--theta", "1", "--n", "50", "--seed", "1",
              "--out", str(a), "--out-dir", str(tmp_path)])
        main(["sample", "--beta", "3", "--theta", "1", "--n", "50", "--seed", "2",
              "--out", str(b), "--out-dir", str(tmp_path)])
        assert a.read_bytes() != b.read_bytes()

    def test_zero_n_is_input_error(self, tmp_path):
        assert main(["sample", "--beta", "2", "--theta", "1", "--n", "0",
                     "--out-dir", str(tmp_path)]) == 2

    def test_negative_parameter_is_input_error(self, tmp_path):
        assert main(["sample", "--beta", "-2", "--theta", "1", "--n", "5",
                     "--out-dir", str(tmp_path)]) == 2


class TestFit:
    def test_mle_on_builtin(self, tmp_path):
        code = main(["fit", "--data", "diesel_engine", "--method", "mle",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        payload = json.loads((tmp_path / "fit_mle.json").read_text())
        assert payload["mle"]["params"]["beta"] == pytest.approx(1.344, abs=0.01)
        assert (tmp_path / "fit_mle.txt").exists()
        assert (tmp_path / "fit_mle.png").exists()
        assert (tmp_path / "run_manifest.json").exists()

    def test_mom_on_builtin(self, tmp_path):
        assert main(["fit", "--data", "diesel_engine", "--method", "mom",
                     "--out-dir", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "fit_mom.json").read_text())
        assert payload["mom"]["feasible"] is True

    def test_bayes_on_builtin(self, tmp_path):
        code = main(["fit", "--data", "diesel_engine", "--method", "bayes",
                     "--seed", "7", "--dump-chain", "--out-dir", str(tmp_path),
                     *FAST_MCMC])
        assert code == 0
        payload = json.loads((tmp_path / "fit_bayes.json").read_text())
        assert payload["chain"]["retained"] == (1500 - 300) // 2
        chain_csv = (tmp_path / "chain.csv").read_text().splitlines()
        assert chain_csv[0] == "iter,beta,theta"
        assert len(chain_csv) == 1 + (1500 - 300) // 2
        assert (tmp_path / "fit_bayes_trace.png").exists()

    def test_bayes_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            assert main(["fit", "--data", "diesel_engine", "--method", "bayes",
                         "--seed", "7", "--dump-chain", "--out-dir", str(out),
                         *FAST_MCMC]) == 0
        for name in ("fit_bayes.json", "fit_bayes.txt", "chain.csv",
                     "fit_bayes_trace.png"):
            assert _digest(out1 / name) == _digest(out2 / name), name

    def test_mdip_prior_refused_with_exit_3(self, tmp_path, capsys):
        code = main(["fit", "--data", "diesel_engine", "--method", "bayes",
                     "--prior", "mdip", "--out-dir", str(tmp_path)])
        assert code == 3
        assert "improper" in capsys.readouterr().err.lower()

    def test_negative_time_csv_exit_2_names_row(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("time\n1.0\n2.0\n-0.5\n")
        code = main(["fit", "--data", str(bad), "--out-dir", str(tmp_path)])
        assert code == 2
        assert "row 4" in capsys.readouterr().err

    def test_all_equal_mle_exit_2(self, tmp_path):
        flat = tmp_path / "flat.csv"
        flat.write_text("2.0\n2.0\n2.0\n")
        assert main(["fit", "--data", str(flat), "--method", "mle",
                     "--out-dir", str(tmp_path)]) == 2

    def test_all_equal_bayes_exit_3(self, tmp_path):
        flat = tmp_path / "flat.csv"
        flat.write_text("2.0\n2.0\n2.0\n")
        assert main(["fit", "--data", str(flat), "--method", "bayes",
                     "--out-dir", str(tmp_path)]) == 3

    def test_single_point_bayes_exit_3(self, tmp_path):
        single = tmp_path / "one.csv"
        single.write_text("3.0\n")
        assert main(["fit", "--data", str(single), "--method", "bayes",
                     "--out-dir", str(tmp_path)]) == 3

    def test_unknown_dataset_exit_2(self, tmp_path):
        assert main(["fit", "--data", "not_a_dataset",
                     "--out-dir", str(tmp_path)]) == 2


class TestCompare:
    def test_diesel_outputs(self, tmp_path):
        assert main(["compare", "--data", "diesel_engine",
                     "--out-dir", str(tmp_path)]) == 0
        table = (tmp_path / "criteria.txt").read_text()
        first_model_line = table.splitlines()[2]
        assert first_model_line.startswith("Dhillon")
        overlay = (tmp_path / "survival_overlay.csv").read_text().splitlines()
        assert overlay[0] == "model,t,s"
        models = {line.split(",")[0] for line in overlay[1:]}
        assert models == {"empirical", "Dhillon", "Weibull", "Gamma"}
        assert (tmp_path / "survival_overlay.png").exists()

    def test_compare_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "c1", tmp_path / "c2"
        for out in (out1, out2):
            assert main(["compare", "--data", "line_divider",
                         "--out-dir", str(out)]) == 0
        for name in ("criteria.json", "criteria.txt", "survival_overlay.csv",
                     "survival_overlay.png"):
            assert _digest(out1 / name) == _digest(out2 / name), name

    def test_too_small_dataset_exit_2(self, tmp_path):
        tiny = tmp_path / "tiny.csv"
        tiny.write_text("1.0\n")
        assert main(["compare", "--data", str(tiny),
                     "--out-dir", str(tmp_path)]) == 2


class TestPredict:
    def test_outputs(self, tmp_path):
        code = main(["predict", "--data", "line_divider", "--seed", "3",
                     "--out-dir", str(tmp_path), *FAST_MCMC])
        assert code == 0
        payload = json.loads((tmp_path / "predictive.json").read_text())
        assert payload["predictive"]["draws"] == (1500 - 300) // 2
        assert payload["predictive"]["mean"] > 0
        draws_csv = (tmp_path / "predictive_draws.csv").read_text().splitlines()
        assert draws_csv[0] == "time"
        assert (tmp_path / "predictive.png").exists()

    def test_rerun_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "p1", tmp_path / "p2"
        for out in (out1, out2):
            assert main(["predict", "--data", "line_divider", "--seed", "3",
                         "--out-dir", str(out), *FAST_MCMC]) == 0
        for name in ("predictive.json", "predictive_draws.csv", "predictive.png"):
            assert _digest(out1 / name) == _digest(out2 / name), name


class TestSimulate:
    def test_tiny_run_outputs(self, tmp_path):
        code = main(["simulate", "--beta", "4", "--theta", "2",
                     "--n-values", "10", "--replicates", "3", "--seed", "5",
                     "--iterations", "800", "--burn-in", "100", "--thin", "5",
                     "--out-dir", str(tmp_path)])
        assert code == 0
        csv_lines = (tmp_path / "sim_report.csv").read_text().splitlines()
        assert csv_lines[0] == "estimator,parameter,n,bias,mse,cp"
        assert len(csv_lines) == 7
        assert (tmp_path / "sim_report.txt").exists()
        assert (tmp_path / "sim_report.png").exists()

    def test_bad_grid_exit_2(self, tmp_path):
        assert main(["simulate", "--n-values", "1", "--replicates", "3",
                     "--out-dir", str(tmp_path)]) == 2
        assert main(["simulate", "--n-values", "x,y", "--replicates", "3",
                     "--out-dir", str(tmp_path)]) == 2


class TestManifest:
    def test_manifest_written_with_every_command(self, tmp_path):
        assert main(["sample", "--beta", "1", "--theta", "1", "--n", "2",
                     "--seed", "1", "--out-dir", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "run_manifest.json").read_text())
        for key in ("command", "seed", "config", "version", "timestamp"):
            assert key in manifest
        assert manifest["command"] == "sample"
        assert manifest["seed"] == 1

    def test_json_reports_embed_manifest_without_timestamp(self, tmp_path):
        assert main(["fit", "--data", "diesel_engine", "--method", "mle",
                     "--out-dir", str(tmp_path)]) == 0
        payload = json.loads((tmp_path / "fit_mle.json").read_text())
        assert "timestamp" not in payload["manifest"]
        assert payload["manifest"]["command"] == "fit"
