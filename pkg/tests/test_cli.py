import json

import numpy as np
import pytest

from glkern import cli


def run(argv):
    return cli.main(argv)


class TestSimulate:
    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["simulate", "--n", "10", "--seed", "1", "--out", str(a)])
        run(["simulate", "--n", "10", "--seed", "1", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_header_and_length(self, tmp_path):
        out = tmp_path / "s.csv"
        run(["simulate", "--n", "25", "--seed", "3", "--out", str(out)])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "t,x,y"
        assert len(lines) == 26

    def test_acf_output(self, tmp_path):
        out, acf = tmp_path / "s.csv", tmp_path / "acf.csv"
        run(["simulate", "--n", "500", "--seed", "3", "--out", str(out),
             "--acf-out", str(acf), "--max-lag", "10"])
        lines = acf.read_text().strip().splitlines()
        assert lines[0] == "lag,acf"
        assert len(lines) == 11

    def test_provenance_written(self, tmp_path):
        out = tmp_path / "s.csv"
        run(["simulate", "--n", "10", "--seed", "9", "--out", str(out)])
        prov = json.loads((tmp_path / "s.csv.provenance.json").read_text())
        assert prov["command"] == "simulate"
        assert prov["config"]["seed"] == 9

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "42")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["simulate", "--n", "10", "--out", str(a)])
        monkeypatch.delenv(cli.SEED_ENV_VAR)
        run(["simulate", "--n", "10", "--seed", "42", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


@pytest.fixture(scope="module")
def sample_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "sample.csv"
    run(["simulate", "--n", "360", "--sigma", "0.4", "--seed", "11",
         "--out", str(path)])
    return path


class TestEstimate:
    def test_fixed_bandwidth(self, tmp_path, sample_csv):
        out = tmp_path / "est.csv"
        run(["estimate", "--data", str(sample_csv), "--h", "0.3",
             "--grid-size", "5", "--out", str(out)])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,h,estimate"
        assert len(lines) == 6

    def test_adaptive_with_table(self, tmp_path, sample_csv):
        out, table = tmp_path / "est.csv", tmp_path / "table.csv"
        run(["estimate", "--data", str(sample_csv), "--adaptive",
             "--gamma", "0.01", "--grid-size", "3", "--out", str(out),
             "--table", str(table)])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "x,h_hat,estimate,gamma"
        assert len(lines) == 4
        tlines = table.read_text().strip().splitlines()
        assert tlines[0] == "x,h,A,V"
        assert len(tlines) > 3

    def test_requires_bandwidth_choice(self, tmp_path, sample_csv):
        with pytest.raises(SystemExit):
            run(["estimate", "--data", str(sample_csv),
                 "--out", str(tmp_path / "x.csv")])


class TestCalibrateCommand:
    def test_curve_csv(self, tmp_path, capsys):
        data = tmp_path / "sample.csv"
        run(["simulate", "--n", "360", "--sigma", "0.4", "--seed", "5",
             "--out", str(data)])
        out = tmp_path / "curve.csv"
        run(["calibrate", "--data", str(data), "--n", "280", "--q", "40",
             "--gamma-count", "4", "--out", str(out)])
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "gamma,error"
        assert len(lines) == 5
        assert "gamma_star=" in capsys.readouterr().out


class TestStudyCommand:
    def test_outputs_and_mise_line(self, tmp_path, capsys):
        out = tmp_path / "study"
        code = run(["study", "--n", "220", "--sigma", "0.4", "--q", "40",
                    "--replicas", "2", "--s", "7", "--seed", "7",
                    "--workers", "1", "--out", str(out)])
        assert code == 0
        for name in ("mse.csv", "mise.csv", "integrated_errors.csv",
                     "config.json", "provenance.json"):
            assert (out / name).exists()
        assert "mise=" in capsys.readouterr().out


class TestCheckCommand:
    def test_lemma_exit_zero(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(["check", "--which", "lemma-a2", "--out", str(out)])
        assert code == 0
        payload = json.loads(out.read_text())
        assert all(entry["passed"] for entry in payload)

    def test_constants_identities_exit_zero(self):
        assert run(["check", "--which", "constants", "--seed", "3"]) == 0

    def test_failure_exits_two(self, monkeypatch):
        from glkern.checks import CheckReport
        monkeypatch.setattr(cli.checks_mod, "check_lemma_a2",
                            lambda *a, **k: CheckReport("lemma_a2", False, {}))
        assert run(["check", "--which", "lemma-a2"]) == 2


class TestConstantsCommand:
    def test_prints_table(self, capsys):
        assert run(["constants", "--gamma", "2.5"]) == 0
        table = json.loads(capsys.readouterr().out)
        assert table["A1"] == pytest.approx(
            (2.0**2 + 0.5**2) / 0.4 * (1.0 / (2.0 * np.sqrt(np.pi))), rel=1e-9)
        assert table["gamma_regime"] == "theory"


class TestUsageErrors:
    def test_unknown_flag_exits_one(self):
        with pytest.raises(SystemExit) as exc:
            run(["simulate", "--no-such-flag"])
        assert exc.value.code == 1

    def test_unknown_command_exits_one(self):
        with pytest.raises(SystemExit) as exc:
            run(["frobnicate"])
        assert exc.value.code == 1

    def test_domain_error_exits_one(self, tmp_path, capsys):
        code = run(["simulate", "--n", "25", "--seed", "1",
                    "--out", str(tmp_path / "s.csv"),
                    "--acf-out", str(tmp_path / "a.csv"), "--max-lag", "100"])
        assert code == 1
        assert "error" in capsys.readouterr().err


class TestAdaptiveRoundTrip:
    def test_cli_matches_library(self, tmp_path, sample_csv):
        from glkern.regression import GoldenshlugerLepskiRegressor
        out = tmp_path / "est.csv"
        run(["estimate", "--data", str(sample_csv), "--adaptive",
             "--gamma", "0.01", "--grid-min", "-0.5", "--grid-max", "0.5",
             "--grid-size", "3", "--out", str(out)])
        rows = [line.split(",") for line
                in out.read_text().strip().splitlines()[1:]]
        data = np.genfromtxt(sample_csv, delimiter=",", names=True)
        model = GoldenshlugerLepskiRegressor(gamma=0.01, delta_exponent=0.2)
        model.fit(data["x"], data["y"])
        xs = np.array([float(r[0]) for r in rows])
        assert model.predict(xs) == pytest.approx(
            [float(r[2]) for r in rows], rel=1e-9)
        assert model.select_bandwidths(xs) == pytest.approx(
            [float(r[1]) for r in rows], rel=1e-9)


class TestProvenanceRoundTrip:
    @staticmethod
    def argv_from_provenance(prov, out):
        argv = [prov["command"]]
        for key, value in prov["config"].items():
            if value is None or key == "out":
                continue
            flag = "--" + key.replace("_", "-")
            if isinstance(value, bool):
                if value:
                    argv.append(flag)
            elif isinstance(value, list):
                for item in value:
                    argv.extend([flag, str(item)])
            else:
                argv.extend([flag, str(value)])
        argv.extend(["--out", str(out)])
        return argv

    def test_simulate_rerun_is_bit_identical(self, tmp_path):
        first = tmp_path / "first.csv"
        run(["simulate", "--n", "40", "--sigma", "0.7", "--seed", "123",
             "--out", str(first)])
        prov = json.loads((tmp_path / "first.csv.provenance.json").read_text())
        second = tmp_path / "second.csv"
        run(self.argv_from_provenance(prov, second))
        assert first.read_bytes() == second.read_bytes()

    def test_study_rerun_is_bit_identical(self, tmp_path):
        first = tmp_path / "study1"
        run(["study", "--n", "220", "--sigma", "0.4", "--q", "40",
             "--replicas", "2", "--s", "5", "--seed", "31", "--workers", "1",
             "--out", str(first)])
        prov = json.loads((first / "provenance.json").read_text())
        second = tmp_path / "study2"
        run(self.argv_from_provenance(prov, second))
        for name in ("mse.csv", "mise.csv", "integrated_errors.csv"):
            assert (first / name).read_bytes() == (second / name).read_bytes()


class TestConfigFile:
    def test_precedence_flags_over_config_over_defaults(self, tmp_path):
        conf = tmp_path / "conf.json"
        conf.write_text(json.dumps({"n": 15, "seed": 5}))
        a = tmp_path / "a.csv"
        run(["--config", str(conf), "simulate", "--out", str(a)])
        assert len(a.read_text().strip().splitlines()) == 16  # config n wins over default
        b = tmp_path / "b.csv"
        run(["--config", str(conf), "simulate", "--n", "8", "--out", str(b)])
        assert len(b.read_text().strip().splitlines()) == 9  # flag wins over config
        prov = json.loads((tmp_path / "b.csv.provenance.json").read_text())
        assert prov["config"]["seed"] == 5
