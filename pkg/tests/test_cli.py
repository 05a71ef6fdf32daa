import csv
import json

import numpy as np
import pytest

from bosent import cli, verify
from bosent.entanglement import DensityMatrix


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_pairs(out):
    return dict(line.split(None, 1) for line in out.strip().splitlines())


def usage_exit(capsys, *argv):
    with pytest.raises(SystemExit) as info:
        cli.main(list(argv))
    _, err = capsys.readouterr()
    return info.value.code, err


class TestTms:
    def test_point_zero(self, capsys):
        code, out, _ = run(capsys, "tms", "--lambda", "0")
        vals = parse_pairs(out)
        assert code == 0
        assert float(vals["closed_form"]) == 0.0
        assert float(vals["numeric"]) == 0.0
        assert vals["numeric"] == "0.0000000000"

    def test_point_one(self, capsys):
        code, out, _ = run(capsys, "tms", "--lambda", "1", "--base", "e")
        vals = parse_pairs(out)
        assert float(vals["closed_form"]) == pytest.approx(1.6198220929, abs=1e-9)
        assert float(vals["numeric"]) == pytest.approx(1.6198220929, abs=1e-9)
        assert float(vals["abs_difference"]) < 1e-8

    def test_negative_lambda(self, capsys):
        code, err = usage_exit(capsys, "tms", "--lambda", "-1")
        assert code == 2
        assert "--lambda" in err

    def test_sweep_to_csv(self, capsys, tmp_path):
        out_file = tmp_path / "tms.csv"
        code, _, _ = run(capsys, "tms", "--sweep", "0:2:41", "--out", str(out_file))
        assert code == 0
        text = out_file.read_bytes().decode("utf-8")
        lines = text.split("\n")
        assert lines[0].startswith("lambda,closed_form,numeric,abs_difference")
        assert len([l for l in lines[1:] if l]) == 41
        assert "\r" not in text
        assert [p.name for p in tmp_path.iterdir()] == ["tms.csv"]

    def test_csv_and_json_agree_bitwise(self, capsys, tmp_path):
        run(capsys, "tms", "--sweep", "0:1.5:7", "--out", str(tmp_path / "a.csv"))
        run(capsys, "tms", "--sweep", "0:1.5:7", "--out", str(tmp_path / "a.json"))
        with open(tmp_path / "a.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        doc = json.loads((tmp_path / "a.json").read_text())
        assert doc["columns"] == rows[0]
        assert set(doc) == {"metadata", "columns", "rows"}
        assert doc["metadata"]["cutoff"] == 128
        for crow, jrow in zip(rows[1:], doc["rows"]):
            for cell, value in zip(crow, jrow):
                if isinstance(value, bool):
                    assert cell == ("true" if value else "false")
                else:
                    assert float(cell) == value

    def test_seventeen_significant_digits(self):
        assert cli.format_value(0.1) == "0.10000000000000001"
        assert cli.format_value(1e-20) == "9.9999999999999995e-21"
        assert float(cli.format_value(np.pi)) == np.pi

    def test_output_dir_env(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("BOSENT_OUTPUT_DIR", str(tmp_path))
        run(capsys, "tms", "--lambda", "0.5", "--out", "point.json")
        doc = json.loads((tmp_path / "point.json").read_text())
        assert len(doc["rows"]) == 1
        assert doc["rows"][0][1] == pytest.approx(0.6594529591680367, abs=1e-13)

    def test_stdout_table(self, capsys):
        code, out, _ = run(capsys, "tms", "--sweep", "0:1:3", "--format", "json")
        assert code == 0
        assert len(json.loads(out)["rows"]) == 3


class TestThermal:
    def test_beta_omega(self, capsys):
        _, out, _ = run(capsys, "thermal", "--beta-omega", "1")
        assert float(parse_pairs(out)["closed_form"]) == pytest.approx(1.0406518523, abs=1e-9)

    def test_room_temperature(self, capsys):
        _, out, _ = run(capsys, "thermal", "--temp", "300")
        vals = parse_pairs(out)
        assert float(vals["closed_form"]) == pytest.approx(0.3307977498, abs=1e-9)
        assert float(vals["beta_omega"]) == pytest.approx(2.414309865662005, rel=1e-13)

    def test_cold_display_and_raw_file(self, capsys, tmp_path):
        _, out, _ = run(capsys, "thermal", "--temp", "10", "--out", str(tmp_path / "t.csv"))
        assert parse_pairs(out)["closed_form"] == "0.0000000000"
        with open(tmp_path / "t.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        raw = float(rows[0]["closed_form"])
        assert 0 < raw < 1e-12

    @pytest.mark.parametrize("temp", ["0", "-4"])
    def test_nonpositive_temperature(self, capsys, temp):
        code, err = usage_exit(capsys, "thermal", "--temp", temp)
        assert code == 2
        assert "--temp" in err

    def test_default_temperature_sweep(self, capsys, tmp_path):
        code, _, _ = run(capsys, "thermal", "--sweep", "50:1000:96", "--out", str(tmp_path / "f2.json"))
        doc = json.loads((tmp_path / "f2.json").read_text())
        assert code == 0
        assert doc["metadata"]["omega_energy"] == 1e-20
        closed = [r[2] for r in doc["rows"]]
        assert len(closed) == 96
        assert all(b > a for a, b in zip(closed, closed[1:]))


class TestCho:
    def test_uncoupled(self, capsys):
        code, out, _ = run(capsys, "cho", "--delta", "0")
        vals = parse_pairs(out)
        assert code == 0
        assert float(vals["gaussian"]) == 0.0
        assert float(vals["numeric"]) == 0.0
        assert float(vals["ground_energy"]) == pytest.approx(1.0, abs=1e-9)

    def test_half_coupling(self, capsys):
        _, out, _ = run(capsys, "cho", "--delta", "0.5", "--cutoff", "24")
        vals = parse_pairs(out)
        assert float(vals["nu"]) == pytest.approx(1.03795485, abs=1e-8)
        assert float(vals["numeric"]) == pytest.approx(0.0943924659, abs=1e-9)
        assert float(vals["ground_energy"]) == pytest.approx(0.9659258263, abs=1e-9)

    def test_unstable_exit_code(self, capsys):
        code, _, err = run(capsys, "cho", "--delta", "1.0")
        assert code == 3
        assert "unstable normal mode" in err

    def test_paper_sweep_summary(self, capsys, tmp_path):
        code, _, err = run(capsys, "cho", "--paper-sweep", "0:5:501", "--out", str(tmp_path / "f3.csv"))
        assert code == 0
        r_max = float(err.strip().split("=")[1])
        assert 1.95 <= r_max <= 2.15

    def test_paper_point(self, capsys):
        _, out, _ = run(capsys, "cho", "--paper-r1", "2")
        assert float(parse_pairs(out)["printed_entropy"]) == pytest.approx(0.3672667964, abs=1e-9)

    def test_report_discrepancy(self, capsys, tmp_path):
        code, out, _ = run(capsys, "cho", "--delta", "0.5", "--report-discrepancy", "--out", str(tmp_path / "d.json"))
        vals = parse_pairs(out)
        assert code == 0
        assert float(vals["printed_state_factorization_error"]) <= 1e-12
        assert abs(float(vals["printed_state_intermode_entropy"])) <= 1e-10
        doc = json.loads((tmp_path / "d.json").read_text())
        assert doc["nu"] == pytest.approx(1.0379548493020425, rel=1e-13)

    def test_report_needs_delta(self, capsys):
        code, _ = usage_exit(capsys, "cho", "--report-discrepancy")
        assert code == 2

    def test_delta_sweep_flags_unstable(self, capsys, tmp_path):
        code, _, err = run(capsys, "cho", "--sweep", "0:1.2:4", "--cutoff", "8", "--out", str(tmp_path / "s.csv"))
        assert code == 0
        assert "1 unstable rows" in err
        with open(tmp_path / "s.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        assert rows[-1]["gaussian"] == "nan" and rows[-1]["flagged"] == "true"

    def test_cutoff_limit(self, capsys):
        code, _ = usage_exit(capsys, "cho", "--delta", "0.1", "--cutoff", "100")
        assert code == 2


def test_converge(capsys):
    code, out, err = run(capsys, "converge", "--system", "tms", "--lambda", "1", "--cutoffs", "16,32,64,128")
    assert code == 0
    assert len(out.strip().splitlines()) == 5
    assert float(err.split("=")[1]) < 1e-10


def test_verify_fast(capsys):
    code, out, _ = run(capsys, "verify", "--fast")
    lines = out.strip().splitlines()
    assert code == 0
    assert sum(l.startswith("[PASS]") for l in lines) == len(verify.CHECKS)
    assert lines[-1].startswith("all")


def test_verify_detects_wrong_index_convention(capsys, monkeypatch):
    def mode2_major_trace(rho, keep="mode1"):
        n1, n2 = rho.mode_structure
        blocks = rho.data.reshape(n1, n2, n1, n2)
        return DensityMatrix(np.einsum("jknn->jk", blocks))

    monkeypatch.setattr(verify, "partial_trace", mode2_major_trace)
    code, out, _ = run(capsys, "verify", "--fast")
    assert code == 1
    gibbs_line = next(l for l in out.splitlines() if l[7:9] == "4 ")
    assert gibbs_line.startswith("[FAIL]")
