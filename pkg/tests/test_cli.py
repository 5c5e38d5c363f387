"""Config parsing, mode dispatch, output files, and exit codes.

Tests verify:
- the validator names the offending field and rejects malformed JSON with position
- every mode runs end to end and writes the documented files
- state files round-trip bit-exactly; reruns with one seed are byte-identical
- exit codes: 0 success, 1 numerical failure, 2 config error
"""

import json
import os

import numpy as np
import pytest

from dg_gauge import Grid, ParseError, ValidationError, gaussian_packet
from dg_gauge.cli import main, parse_config, read_state, write_state

TWO_PI = 2.0 * np.pi

FAM = {"nu1": -0.5, "nu2": 0.0, "mu1": 0.0, "mu2": -0.25,
       "mu3": 0.5, "mu4": 0.0, "mu5": 0.125, "mu0": 1.0}

DG_EHR = {"hbar": 1.0, "mass": 1.0, "D": 0.05, "Dprime": 1.0,
          "c1": 0.05, "c2": 0.0, "c3": 0.0, "c4": -0.05, "c5": 0.0}


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_result(tmp_path, prefix="out"):
    with open(tmp_path / f"{prefix}_result.json") as fh:
        return json.load(fh)


def test_parse_reports_json_position():
    with pytest.raises(ParseError) as exc:
        parse_config('{"mode": "invariants",}')
    assert "line 1" in str(exc.value) and "column" in str(exc.value)


@pytest.mark.parametrize("doc, fragment", [
    ([1, 2], "top-level"),
    ({"mode": "meditate"}, "mode must be one of"),
    ({"mode": "invariants"}, "needs family_params or dg_params"),
    ({"mode": "invariants", "family_params": FAM, "dg_params": DG_EHR}, "exactly one"),
    ({"mode": "invariants", "family_params": FAM, "extra": 1}, "unknown field 'extra'"),
    ({"mode": "invariants", "family_params": dict(FAM, nu9=1.0)}, "unknown field 'nu9'"),
    ({"mode": "invariants", "family_params": dict(FAM, nu1=0.0)}, "nu1 must be nonzero"),
    ({"mode": "invariants", "family_params": dict(FAM, nu1=True)}, "must be a number"),
    ({"mode": "invariants", "dg_params": dict(DG_EHR, hbar=-1.0)}, "hbar must be positive"),
    ({"mode": "transform", "family_params": FAM,
      "gauge": {"lambda": 0.0, "gamma": 1.0},
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0}}, "lambda must be nonzero"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 1, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "grid.n"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "vortex"},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "initial_state.kind"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave"},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "missing field 'k'"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0}}, "needs a evolution block"),
    ({"mode": "evolve", "family_params": FAM,
      "initial_state": {"kind": "gaussian"},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "needs a grid block"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0},
      "evolution": {"dt": 1e-3, "t_end": 0.01, "scheme": "leapfrog"}},
     "scheme must be"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0},
      "evolution": {"dt": 1e-3, "t_end": 0.01, "rho_floor": -1e-9}},
     "rho_floor must be nonnegative"),
    ({"mode": "evolve", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "plane_wave", "k": 1.0},
      "potential": {"kind": "sampled", "values": []},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "nonempty list"),
    ({"mode": "commute", "family_params": FAM,
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "gaussian"},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "needs a dg_params block"),
    ({"mode": "commute", "dg_params": dict(DG_EHR, c5=0.3),
      "grid": {"n": 64, "length": TWO_PI},
      "initial_state": {"kind": "gaussian"},
      "evolution": {"dt": 1e-3, "t_end": 0.01}}, "Ehrenfest structure"),
])
def test_parse_rejections(doc, fragment):
    with pytest.raises(ValidationError) as exc:
        parse_config(json.dumps(doc))
    assert fragment in str(exc.value), f"{exc.value} lacks {fragment!r}"


def test_invariants_mode(tmp_path):
    cfg = write_config(tmp_path, {"mode": "invariants", "family_params": FAM})
    assert main([cfg, "--output", str(tmp_path)]) == 0
    doc = read_result(tmp_path)
    assert doc["invariants"]["iota0"] == -0.5
    assert doc["invariants"]["iota1"] == 0.125
    assert doc["invariants"]["iota3"] == 0.0


def test_invariants_mode_drops_iota0_for_explicit_free_potential(tmp_path):
    cfg = write_config(tmp_path, {"mode": "invariants", "family_params": FAM,
                                  "potential": {"kind": "free"}})
    assert main([cfg, "--output", str(tmp_path)]) == 0
    assert read_result(tmp_path)["invariants"]["iota0"] is None


def test_classify_mode(tmp_path):
    cfg = write_config(tmp_path, {"mode": "classify", "dg_params": DG_EHR})
    assert main([cfg, "--output", str(tmp_path)]) == 0
    doc = read_result(tmp_path)
    assert doc["verdict"] == "linearizable"
    assert doc["gauge"]["lambda"] == pytest.approx(0.99 ** -0.5, rel=1e-12)
    assert doc["mass"] == pytest.approx(1.0)
    assert doc["hbar_prime"] == pytest.approx(np.sqrt(0.99), rel=1e-12)
    assert doc["sign_convention"] == "lambda-positive"


def test_classify_galilei_not_linearizable(tmp_path):
    dg = {"hbar": 1.0, "mass": 1.0, "D": 0.2, "Dprime": 1.0,
          "c1": 0.3, "c2": 0.1, "c3": 0.0, "c4": -0.3, "c5": 0.05}
    cfg = write_config(tmp_path, {"mode": "classify", "dg_params": dg})
    assert main([cfg, "--output", str(tmp_path)]) == 0
    doc = read_result(tmp_path)
    assert doc["verdict"] == "not_linearizable"
    assert doc["gauge"] is None
    assert "iota2" in doc["obstruction"]


def test_evolve_mode_outputs(tmp_path):
    doc = {"mode": "evolve", "family_params": FAM, "output": "exp",
           "grid": {"n": 64, "length": TWO_PI},
           "initial_state": {"kind": "plane_wave", "k": 3.0},
           "evolution": {"dt": 1e-3, "t_end": 0.02, "record_every": 10,
                         "rho_floor": 0.0}}
    cfg = write_config(tmp_path, doc)
    assert main([cfg, "--seed", "7", "--output", str(tmp_path)]) == 0

    result = read_result(tmp_path, "exp")
    assert result["snapshots"] == 3
    assert result["t_final"] == pytest.approx(0.02)
    assert result["mass_drift"] < 1e-12
    for k in range(3):
        assert (tmp_path / f"exp_state_{k}.txt").exists()

    lines = (tmp_path / "exp_series.csv").read_text().splitlines()
    assert lines[0] == "# seed 7"
    assert lines[1] == "t,norm,energy"
    assert len(lines) == 5


def test_evolve_reruns_are_byte_identical(tmp_path):
    doc = {"mode": "evolve", "family_params": FAM,
           "grid": {"n": 64, "length": TWO_PI},
           "initial_state": {"kind": "gaussian", "sigma0": 0.8},
           "evolution": {"dt": 1e-3, "t_end": 0.01}}
    cfg = write_config(tmp_path, doc)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    assert main([cfg, "--seed", "5", "--output", str(d1)]) == 0
    assert main([cfg, "--seed", "5", "--output", str(d2)]) == 0
    for name in sorted(os.listdir(d1)):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes(), name


def test_transform_mode_hand_checked(tmp_path):
    doc = {"mode": "transform", "family_params": FAM,
           "gauge": {"lambda": 2.0, "gamma": 1.0},
           "grid": {"n": 64, "length": TWO_PI},
           "initial_state": {"kind": "plane_wave", "k": 1.0}}
    cfg = write_config(tmp_path, doc)
    assert main([cfg, "--output", str(tmp_path)]) == 0
    result = read_result(tmp_path)
    primed = result["primed_params"]
    expected = {"nu1": -0.25, "nu2": 0.125, "mu1": 0.25, "mu2": -0.625,
                "mu3": 0.25, "mu4": -0.25, "mu5": 0.3125, "mu0": 2.0}
    assert primed == expected
    psi = read_state(str(tmp_path / "out_state_0.txt"))
    np.testing.assert_allclose(np.abs(psi.values), 1.0, atol=1e-12)


def test_state_files_round_trip_bit_exactly(tmp_path):
    grid = Grid(128, 40.0)
    psi = gaussian_packet(grid, sigma0=1.7, x0=0.3, k0=1.2)
    path = str(tmp_path / "state.txt")
    write_state(path, psi)
    back = read_state(path)
    assert back.grid == grid
    assert np.array_equal(back.values, psi.values)


def test_state_file_feeds_a_second_run(tmp_path):
    first = {"mode": "transform", "family_params": FAM,
             "gauge": {"lambda": 1.5, "gamma": -0.3},
             "grid": {"n": 64, "length": TWO_PI},
             "initial_state": {"kind": "gaussian", "sigma0": 0.8}}
    assert main([write_config(tmp_path, first, "t.json"),
                 "--output", str(tmp_path)]) == 0

    second = {"mode": "evolve", "family_params": FAM,
              "initial_state": {"kind": "file", "path": "out_state_0.txt"},
              "evolution": {"dt": 1e-3, "t_end": 0.01}}
    assert main([write_config(tmp_path, second, "e.json"),
                 "--output", str(tmp_path)]) == 0

    mismatched = dict(second, grid={"n": 32, "length": TWO_PI})
    code = main([write_config(tmp_path, mismatched, "m.json"),
                 "--output", str(tmp_path)])
    assert code == 2


def test_commute_mode(tmp_path):
    doc = {"mode": "commute", "dg_params": DG_EHR,
           "grid": {"n": 256, "length": 40.0},
           "initial_state": {"kind": "gaussian", "sigma0": 2.0},
           "evolution": {"dt": 5e-3, "t_end": 0.05, "record_every": 5}}
    cfg = write_config(tmp_path, doc)
    assert main([cfg, "--output", str(tmp_path)]) == 0
    result = read_result(tmp_path)
    assert result["max_l2_error"] < 1e-6
    assert result["gauge"]["lambda"] == pytest.approx(0.99 ** -0.5, rel=1e-12)
    assert result["primed_params"]["nu2"] == 0.0
    lines = (tmp_path / "out_series.csv").read_text().splitlines()
    assert lines[1] == "t,norm,energy,l2_error"


def test_unstable_run_exits_1(tmp_path, capsys):
    doc = {"mode": "evolve", "family_params": FAM,
           "grid": {"n": 64, "length": TWO_PI},
           "initial_state": {"kind": "plane_wave", "k": 1.0},
           "evolution": {"dt": 0.05, "t_end": 0.5}}
    cfg = write_config(tmp_path, doc)
    assert main([cfg, "--output", str(tmp_path)]) == 1
    assert "numerical failure" in capsys.readouterr().err


def test_unreadable_or_malformed_config_exits_2(tmp_path, capsys):
    assert main([str(tmp_path / "missing.json")]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main([str(broken)]) == 2
    assert "config error" in capsys.readouterr().err


def test_verify_mode_runs_the_battery(tmp_path, capsys):
    cfg = write_config(tmp_path, {"mode": "verify"})
    assert main([cfg, "--seed", "1", "--output", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS ") == 12
    doc = read_result(tmp_path)
    assert doc["all_passed"] is True
    assert len(doc["checks"]) == 12
