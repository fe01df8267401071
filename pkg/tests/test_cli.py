"""Command-line driver: configs in, JSON/CSV envelopes out, exit codes."""

import csv
import json
import math

import pytest

from diraclab import __version__
from diraclab.cli import main

HARMONIC_SPECTRUM = {"entries": [[0.0, 1]], "symmetric": True}


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def spectrum_config(tmp_path, **overrides):
    doc = {
        "profile": {"kind": "exponential", "m": 2, "domain_length": math.pi},
        "spectrum": HARMONIC_SPECTRUM,
        "count": 5,
        "mesh": 1024,
    }
    doc.update(overrides)
    return write_config(tmp_path, doc)


def read_json(out_dir, command):
    return json.loads((out_dir / f"{command}.json").read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

def test_spectrum_harmonic_cylinder(tmp_path):
    cfg = spectrum_config(tmp_path)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = read_json(tmp_path, "spectrum")
    assert doc["command"] == "spectrum"
    assert doc["version"] == __version__
    assert doc["seed"] == 0
    assert doc["config"]["count"] == 5
    values = [r["value"] for r in doc["result"]["eigenvalues"]]
    expected = [(n + 1) ** 2 for n in range(5)]
    assert values == pytest.approx(expected, rel=1e-5)
    assert doc["result"]["truncation_safe"] is True


def test_spectrum_csv_output(tmp_path):
    cfg = spectrum_config(tmp_path)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path),
                 "--format", "csv"]) == 0
    with open(tmp_path / "spectrum.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["index", "value"]
    assert float(rows[1][1]) == pytest.approx(1.0, rel=1e-5)
    assert len(rows) == 1 + 5


def test_spectrum_circle_source_and_mesh_override(tmp_path):
    cfg = spectrum_config(
        tmp_path,
        spectrum={"circle": {"length": 2 * math.pi, "delta": 0.0,
                             "truncation": 2}},
        count=3)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path),
                 "--mesh", "256"]) == 0
    doc = read_json(tmp_path, "spectrum")
    assert doc["result"]["mesh_size"] == 256


def test_spectrum_truncation_risk_fails_closed(tmp_path):
    cfg = spectrum_config(
        tmp_path,
        spectrum={"circle": {"length": 40.0, "delta": 0.5, "truncation": 0}},
        count=8)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 1
    assert not (tmp_path / "spectrum.json").exists()


def test_spectrum_reruns_are_byte_identical(tmp_path):
    cfg = spectrum_config(tmp_path)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--config", cfg, "--out", str(a)]) == 0
    assert main(["spectrum", "--config", cfg, "--out", str(b)]) == 0
    assert (a / "spectrum.json").read_bytes() == (b / "spectrum.json").read_bytes()


# ---------------------------------------------------------------------------
# config error paths
# ---------------------------------------------------------------------------

def test_malformed_json_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["spectrum", "--config", str(path),
                 "--out", str(tmp_path)]) == 2


def test_missing_config_file(tmp_path):
    assert main(["spectrum", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path)]) == 2


def test_schema_rejects_incomplete_config(tmp_path):
    cfg = write_config(tmp_path, {"profile": {"kind": "exponential", "m": 2,
                                              "domain_length": 1.0}})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_non_object_config(tmp_path):
    path = tmp_path / "list.json"
    path.write_text("[1, 2]", encoding="utf-8")
    assert main(["spectrum", "--config", str(path),
                 "--out", str(tmp_path)]) == 2


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["transmogrify", "--config", "x.json"])
    assert exc.value.code == 2


# ---------------------------------------------------------------------------
# bracket
# ---------------------------------------------------------------------------

def test_bracket_seeded_and_deterministic(tmp_path):
    cfg = write_config(tmp_path, {"cases": 3, "j_count": 3, "mesh": 256})
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["bracket", "--config", cfg, "--out", str(a),
                 "--seed", "11"]) == 0
    assert main(["bracket", "--config", cfg, "--out", str(b),
                 "--seed", "11"]) == 0
    assert main(["bracket", "--config", cfg, "--out", str(c),
                 "--seed", "12"]) == 0
    assert (a / "bracket.json").read_bytes() == (b / "bracket.json").read_bytes()
    assert (a / "bracket.json").read_bytes() != (c / "bracket.json").read_bytes()
    doc = read_json(a, "bracket")
    assert doc["seed"] == 11
    assert doc["result"]["all_passed"] is True
    assert doc["result"]["cases"] == 3


# ---------------------------------------------------------------------------
# stretch
# ---------------------------------------------------------------------------

def test_stretch_sweep_with_growth(tmp_path):
    cfg = write_config(tmp_path, {
        "m": 2,
        "t_values": [2.0, 4.0],
        "spectrum": HARMONIC_SPECTRUM,
        "mesh": 256,
        "norm_ks": [0, 1],
        "growth": {"k_values": [0], "t_values": [2.0, 4.0, 8.0, 16.0]},
    })
    assert main(["stretch", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = read_json(tmp_path, "stretch")
    assert doc["result"]["sweep"]["passed"] is True
    assert doc["result"]["growth"][0]["within_limit"] is True


# ---------------------------------------------------------------------------
# vary
# ---------------------------------------------------------------------------

def test_vary_formula_against_fd(tmp_path):
    cfg = write_config(tmp_path, {"n_grid": 1024, "delta": 0.5,
                                  "modes": 2, "perturbations": 2})
    assert main(["vary", "--config", cfg, "--out", str(tmp_path),
                 "--seed", "3"]) == 0
    doc = read_json(tmp_path, "vary")
    assert doc["result"]["all_passed"] is True
    assert len(doc["result"]["records"]) == 4
    for rec in doc["result"]["records"]:
        assert rec["defect"] <= rec["tolerance"]


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------

def test_flow_ratio_and_monotonicity(tmp_path):
    cfg = write_config(tmp_path, {"delta": 0.5, "n_grid": 256, "steps": 3})
    assert main(["flow", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = read_json(tmp_path, "flow")
    steps = doc["result"]["steps"]
    assert len(steps) == 3
    assert doc["result"]["monotone"] is True
    lams = [s["lambda0"] for s in steps] + [doc["result"]["final_lambda0"]]
    for a, b in zip(lams, lams[1:]):
        assert b / a == pytest.approx(1 / math.sqrt(3), abs=1e-9)


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------

def test_certify_chain_json(tmp_path):
    cfg = write_config(tmp_path, {"m": 10})
    assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = read_json(tmp_path, "certify")
    assert doc["result"]["chain"] == [10, 9, 8]
    assert doc["result"]["base"]["sphere_dim"] == 7
    assert doc["result"]["base"]["T"] == 8


def test_certify_csv_rows(tmp_path):
    cfg = write_config(tmp_path, {"m": 10})
    assert main(["certify", "--config", cfg, "--out", str(tmp_path),
                 "--format", "csv"]) == 0
    with open(tmp_path / "certify.csv", newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["position", "dimension", "note"]
    assert len(rows) == 1 + 3
    assert "Berger zero mode on S^7" in rows[-1][2]


def test_certify_low_dimension_not_applicable(tmp_path):
    cfg = write_config(tmp_path, {"m": 2})
    assert main(["certify", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = read_json(tmp_path, "certify")
    assert doc["result"]["applicable"] is False
    assert doc["result"]["reason"]
