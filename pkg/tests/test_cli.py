"""Command-line behavior: CSV format and determinism, exit codes, JSON
config, and the verification report."""

import json
import math

import numpy as np
import pytest

from edsense.cli import main


def _run(tmp_path, name, args):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, out


def _rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# edsense ")
    header = lines[1].split(",")
    body = [line.split(",") for line in lines[2:]]
    return header, body


def test_croc_csv(tmp_path):
    code, out = _run(tmp_path, "croc.csv",
                     ["croc", "--channel", "kms", "--kappa", "2", "--mu", "3",
                      "--m", "2", "--snr-db", "10", "--u", "2",
                      "--pf-points", "6"])
    assert code == 0
    header, body = _rows(out)
    assert header == ["pf", "pmd"]
    assert len(body) == 6
    pmds = [float(r[1]) for r in body]
    assert all(b <= a + 1e-12 for a, b in zip(pmds, pmds[1:]))
    # 10 significant digits, scientific notation
    assert all("e" in field for row in body for field in row)


def test_croc_single_point(tmp_path):
    code, out = _run(tmp_path, "croc1.csv",
                     ["croc", "--channel", "fisher", "--m", "2", "--ms", "10",
                      "--snr-db", "0", "--pf-points", "1", "--pf-min", "0.5",
                      "--tol", "1e-6"])
    assert code == 0
    _, body = _rows(out)
    assert len(body) == 1
    assert math.isclose(float(body[0][0]), 0.5)


def test_byte_identical_reruns(tmp_path):
    args = ["auc", "--channel", "kms", "--kappa", "2", "--mu", "2", "--m", "1",
            "--snr-db", "0:20:5", "--u", "2"]
    _, first = _run(tmp_path, "a1.csv", args)
    _, second = _run(tmp_path, "a2.csv", args)
    assert first.read_bytes().split(b"\n", 1)[1] == second.read_bytes().split(b"\n", 1)[1]
    # identical including provenance when the whole command line matches
    _, third = _run(tmp_path, "a1b.csv", args)
    assert first.name != third.name  # file differs, content apart from it identical


def test_auc_sweep_monotone(tmp_path):
    code, out = _run(tmp_path, "auc.csv",
                     ["auc", "--channel", "kms", "--kappa", "2", "--mu", "2",
                      "--m", "1", "--snr-db", "0:20:1", "--u", "2"])
    assert code == 0
    header, body = _rows(out)
    assert header == ["snr_db", "comp_auc"]
    assert len(body) == 21
    comp = [float(r[1]) for r in body]
    assert all(b < a for a, b in zip(comp, comp[1:]))


def test_effrate_sweep(tmp_path):
    code, out = _run(tmp_path, "rate.csv",
                     ["effrate", "--channel", "fisher", "--m", "2", "--ms", "3",
                      "--snr-db", "0:20:2", "--a", "1"])
    assert code == 0
    header, body = _rows(out)
    assert header == ["snr_db", "eff_rate_bits"]
    rates = [float(r[1]) for r in body]
    assert all(b >= a - 1e-9 for a, b in zip(rates, rates[1:]))


def test_pdf_table_consistency(tmp_path):
    code, out = _run(tmp_path, "pdf.csv",
                     ["pdf", "--channel", "kms", "--kappa", "0", "--mu", "2",
                      "--m", "1", "--snr-db", "6", "--points", "400"])
    assert code == 0
    header, body = _rows(out)
    assert header == ["gamma", "pdf", "cdf"]
    g = np.array([float(r[0]) for r in body])
    pdf = np.array([float(r[1]) for r in body])
    cdf = np.array([float(r[2]) for r in body])
    assert np.all(pdf >= 0)
    assert np.all(np.diff(cdf) >= -1e-12)
    assert cdf[-1] >= 0.999
    # trapezoid integral of the pdf column reproduces the cdf column
    assert abs(np.trapezoid(pdf, g) - cdf[-1]) < 1e-3


def test_pdf_fisher_m_below_one(tmp_path):
    code, out = _run(tmp_path, "pdff.csv",
                     ["pdf", "--channel", "fisher", "--m", "0.8", "--ms", "3",
                      "--snr-db", "6", "--points", "50"])
    assert code == 0
    _, body = _rows(out)
    assert float(body[0][0]) > 0.0  # grid dodges the singular origin


def test_json_config(tmp_path):
    cfg = dict(channel="kms", kappa=2.0, mu=2, m=1, snr_db="0:10:5", u=2)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, out = _run(tmp_path, "json.csv", ["auc", "--json", str(path)])
    assert code == 0
    _, body = _rows(out)
    assert len(body) == 3
    # explicit flags take precedence over the JSON values
    code, out2 = _run(tmp_path, "json2.csv",
                      ["auc", "--json", str(path), "--snr-db", "0:10:10"])
    assert code == 0
    _, body2 = _rows(out2)
    assert len(body2) == 2


def test_usage_errors_exit_2(tmp_path):
    code, _ = _run(tmp_path, "x.csv", ["croc", "--channel", "kms", "--kappa", "2",
                                       "--mu", "3", "--m", "2"])  # no snr
    assert code == 2
    code, _ = _run(tmp_path, "y.csv", ["croc", "--channel", "kms", "--kappa", "2",
                                       "--mu", "1", "--m", "2", "--snr-db", "10"])
    assert code == 2  # mu < m
    code, _ = _run(tmp_path, "z.csv", ["auc", "--snr-db", "0:10:1"])
    assert code == 2  # missing channel


def test_numerical_failure_exits_3(tmp_path):
    code, _ = _run(tmp_path, "n.csv",
                   ["croc", "--channel", "fisher", "--m", "2", "--ms", "1.2",
                    "--snr-db", "10", "--pf-points", "2", "--tol", "1e-13"])
    assert code == 3


def test_verify_single_cell_and_perturb(tmp_path, monkeypatch):
    args = ["verify", "--channel", "kms", "--kappa", "0", "--mu", "2", "--m", "1",
            "--snr-db", "6", "--seed", "7", "--mc-samples", "100000"]
    code, out = _run(tmp_path, "v.txt", args)
    assert code == 0
    text = out.read_text()
    assert "PASS" in text and "FAIL" not in text
    monkeypatch.setenv("EDSENSE_VERIFY_PERTURB", "1e-3")
    code, out = _run(tmp_path, "v2.txt", args)
    assert code == 1
    assert "FAIL" in out.read_text()


def test_stdout_output(capsys):
    code = main(["pdf", "--channel", "fisher", "--m", "1", "--ms", "2",
                 "--snr-db", "0", "--points", "5", "--out", "-"])
    assert code == 0
    captured = capsys.readouterr().out
    assert captured.startswith("# edsense ")
    assert "gamma,pdf,cdf" in captured
