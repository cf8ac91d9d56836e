import csv
import json

import numpy as np
import pytest

from levysim.cli import main
from levysim.models import make_model


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestSimulate:
    def test_bm_fig1(self, tmp_path):
        out = tmp_path / "a.csv"
        args = ["simulate", "--model", "bm", "--param", "mu=0.5", "--param", "sigma=0.5", "--T", "1",
                "--N", "252", "--paths", "5", "--seed", "42", "--out", str(out)]
        assert main(args) == 0
        rows = read_csv(out)
        assert rows[0] == ["t"] + [f"path_{k}" for k in range(5)]
        assert len(rows) == 254
        assert rows[1] == ["0"] * 6
        assert float(rows[-1][0]) == 1.0

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["simulate", "--model", "kou", "--N", "50", "--paths", "3", "--seed", "7", "--mode", "asset",
                "--risk-neutral", "--rate", "0.05"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip_17_digits(self, tmp_path):
        out = tmp_path / "a.csv"
        assert main(["simulate", "--model", "vg", "--N", "20", "--paths", "2", "--seed", "1", "--out", str(out),
                     "--format", "json"]) == 0
        payload = json.loads(out.read_text())
        out_csv = tmp_path / "b.csv"
        assert main(["simulate", "--model", "vg", "--N", "20", "--paths", "2", "--seed", "1", "--out", str(out_csv)]) == 0
        rows = read_csv(out_csv)[1:]
        col = [float(r[1]) for r in rows]
        assert col == payload["columns"]["path_0"]

    def test_cgmy(self, tmp_path):
        assert main(["simulate", "--model", "cgmy", "--param", "C=5", "--param", "G=25", "--param", "M=25",
                     "--param", "Y=1", "--out", str(tmp_path / "c.csv")]) == 0

    def test_cgmy_bad_y(self, tmp_path, capsys):
        assert main(["simulate", "--model", "cgmy", "--param", "Y=2", "--out", str(tmp_path / "c.csv")]) == 2
        assert "Y" in capsys.readouterr().err

    def test_workers_same_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["simulate", "--model", "meixner", "--N", "10", "--paths", "9", "--seed", "3"]
        assert main(base + ["--out", str(a)]) == 0
        assert main(base + ["--workers", "4", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_equals_flags(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# fig 4\nmodel = merton\nparam.lambda = 2.0\nT = 2\nN = 30\npaths = 4\nseed = 11\n"
                       "mode = asset\nrisk_neutral = true\nrate = 0.01\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", str(cfg), "--out", str(a)]) == 0
        assert main(["simulate", "--model", "merton", "--param", "lambda=2.0", "--T", "2", "--N", "30", "--paths",
                     "4", "--seed", "11", "--mode", "asset", "--risk-neutral", "--rate", "0.01", "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize("text,field", [("N = 0\n", "N"), ("bogus = 1\n", "bogus"), ("T = abc\n", "T"),
                                            ("risk_neutral = maybe\n", "risk_neutral")])
    def test_config_errors(self, tmp_path, capsys, text, field):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
        assert field in capsys.readouterr().err

    def test_risk_neutral_unavailable(self, tmp_path):
        assert main(["simulate", "--model", "gh", "--risk-neutral", "--mode", "asset",
                     "--out", str(tmp_path / "x.csv")]) == 2

    def test_io_error(self, tmp_path):
        assert main(["simulate", "--model", "bm", "--out", str(tmp_path / "missing" / "x.csv")]) == 3
        assert main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 3


class TestCf:
    def test_bm(self, tmp_path):
        out = tmp_path / "cf.csv"
        assert main(["cf", "--model", "bm", "--param", "mu=0", "--param", "sigma=1", "--u-min", "-1",
                     "--u-max", "1", "--u-steps", "3", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == ["u", "re", "im"]
        assert rows[2] == ["0", "1", "0"]
        assert float(rows[3][1]) == pytest.approx(np.exp(-0.5), abs=1e-15)
        assert float(rows[3][2]) == 0.0

    def test_nig_values(self, tmp_path):
        out = tmp_path / "cf.csv"
        assert main(["cf", "--model", "nig", "--u-min", "-4", "--u-max", "4", "--u-steps", "9", "--out", str(out)]) == 0
        m = make_model("nig")
        for row in read_csv(out)[1:]:
            u, re, im = map(float, row)
            assert complex(re, im) == pytest.approx(m.char_function(u, 1.0), abs=1e-15)

    def test_bad_grid(self, tmp_path):
        assert main(["cf", "--model", "bm", "--u-min", "1", "--u-max", "0", "--out", str(tmp_path / "x")]) == 2
        assert main(["cf", "--model", "bm", "--u-steps", "1", "--out", str(tmp_path / "x")]) == 2


class TestValidate:
    def test_bm(self, tmp_path):
        out = tmp_path / "v.txt"
        assert main(["validate", "--model", "bm", "--seed", "7", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3 and all("pass=true" in ln for ln in lines)

    def test_unknown_model(self, capsys):
        assert main(["validate", "--model", "nosuchmodel"]) == 2

    def test_small_n_is_config_error(self):
        assert main(["validate", "--model", "bm", "--n", "100"]) == 2

    def test_failure_exit(self, monkeypatch):
        import levysim.cli as cli
        from levysim.validate import ValidationReport

        failing = ValidationReport("ecf_gof", 1.0, 0.01, False, 10_000, "bm", 0)
        monkeypatch.setattr(cli, "run_suite", lambda *a, **k: [failing])
        assert main(["validate", "--model", "bm"]) == 1

    def test_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate", "--mode", "sideways"])
        assert exc.value.code == 2
