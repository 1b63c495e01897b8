from __future__ import annotations

import json
from pathlib import Path

import pytest

from qfinder import catalog, cli
from qfinder.qfi import QFI, NoetherGenerator, TimeBasis, make_term
from qfinder.ring import RingElem

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def test_find_json_matches_golden(capsys):
    code, out, err = run(capsys, "find", "--dim", "2", "--potential", "-1/r", "--format", "json")
    assert code == 0 and err == ""
    assert json.loads(out) == json.loads((GOLDEN / "find_kepler_2d.json").read_text())


def test_find_text_kepler(capsys):
    code, out, _ = run(capsys, "find", "--dim", "3", "--potential", "-1/r")
    assert code == 0
    assert "Integral 1: dimension 10" in out
    assert "0 time-dependent" in out
    assert "Integral 3: dimension 0; no critical rates" in out


def test_find_oscillator_rates(capsys):
    code, out, _ = run(capsys, "find", "--dim", "3", "--potential", "-r^2", "--families", "3", "--format", "json")
    assert code == 0
    fam = json.loads(out)["families"][0]
    assert [(r["lambda2"], r["kernel"]) for r in fam["rates"]] == [("2", 11), ("8", 6)]


def test_find_inverse_square_is_time_dependent(capsys):
    code, out, _ = run(capsys, "find", "--dim", "3", "--potential", "-1/r^2", "--families", "1,2",
                       "--format", "json")
    assert code == 0
    fams = json.loads(out)["families"]
    polys = {t["time"].get("poly", 0) for f in fams for q in f["qfis"] for t in q["terms"]}
    assert polys >= {1, 2}


def test_output_file(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "find", "--dim", "2", "--potential", "-1/r", "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["dim"] == 2


def test_parse_error_exit_2(capsys):
    code, out, err = run(capsys, "find", "--dim", "3", "--potential", "x +* y")
    assert code == 2 and out == ""
    assert "^" in err


def test_bad_families_exit_2(capsys):
    assert run(capsys, "find", "--dim", "3", "--potential", "-1/r", "--families", "4")[0] == 2


def test_missing_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--dim", "3", "--potential", "-1/r", "--qfi", str(tmp_path / "none.json"))
    assert code == 2 and "cannot read" in err


def test_unsupported_dimension_exit_3(capsys):
    code, out, err = run(capsys, "find", "--dim", "4", "--potential", "-1/r")
    assert code == 3 and out == "" and err


def test_unsound_output_exit_4(capsys, monkeypatch):
    real = cli.find_integrals

    def corrupted(V, families):
        report = real(V, families)
        f = report.results[0].found[0]
        f.qfi = f.qfi + QFI(V.dim, [make_term(V.dim, TimeBasis(), k0=RingElem.coord(V.dim, 0))])
        return report

    monkeypatch.setattr(cli, "find_integrals", corrupted)
    code, out, err = run(capsys, "find", "--dim", "2", "--potential", "-1/r")
    assert code == 4 and out == ""
    assert "dI/dt" in err


def test_verify_corrupted_exit_5(capsys, tmp_path):
    H = catalog.energy(3, catalog.power_potential(3, 1, 1)).to_json()
    H["terms"][0]["k0"] = "-2*r^-1"
    path = write(tmp_path, "bad.json", H)
    code, out, _ = run(capsys, "verify", "--dim", "3", "--potential", "-1/r", "--qfi", path, "--seeds", "3",
                       "--t-end", "2")
    assert code == 5 and "drift exceeded" in out


def test_verify_reload_is_faithful(capsys, tmp_path):
    base = ["--dim", "2", "--potential", "-1/r", "--seeds", "3", "--t-end", "2", "--format", "json"]
    code, out, _ = run(capsys, "verify", *base)
    assert code == 0
    auto = json.loads(out)
    code, out, _ = run(capsys, "find", "--dim", "2", "--potential", "-1/r", "--format", "json")
    path = write(tmp_path, "found.json", json.loads(out))
    code, out, _ = run(capsys, "verify", *base, "--qfi", path)
    again = json.loads(out)
    assert code == 0
    assert [(r["name"], r["drifts"]) for r in again["qfis"]] == [(r["name"], r["drifts"]) for r in auto["qfis"]]


def test_verify_free_motion(capsys):
    code, out, _ = run(capsys, "verify", "--dim", "2", "--potential", "0", "--seeds", "3", "--t-end", "3")
    assert code == 0 and "all drifts below" in out


def test_brackets_kepler(capsys):
    code, out, _ = run(capsys, "brackets", "--dim", "3", "--potential", "-1/r", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["rank"] == 5
    assert doc["identities"] and all(i["holds"] for i in doc["identities"])


def test_brackets_oscillator(capsys):
    code, out, _ = run(capsys, "brackets", "--dim", "3", "--potential", "-r^2")
    assert code == 0 and "functional independence rank: 5" in out


def test_brackets_empty_set(capsys, tmp_path):
    path = write(tmp_path, "empty.json", [])
    code, out, _ = run(capsys, "brackets", "--dim", "3", "--potential", "-1/r", "--set", path, "--format", "json")
    assert code == 0 and json.loads(out)["rank"] == 0


def test_noether_angular_momentum(capsys, tmp_path):
    path = write(tmp_path, "l3.json", catalog.angular_momentum(3, 2).to_json())
    code, out, _ = run(capsys, "noether", "--dim", "3", "--potential", "-1/r", "--qfi", path, "--format", "json")
    g = json.loads(out)["generators"][0]
    assert code == 0
    assert g["eta"] == ["y", "-x", "0"] and g["f"] == "0"
    assert NoetherGenerator.from_json(g).to_qfi() == catalog.angular_momentum(3, 2)


def test_noether_energy_text(capsys, tmp_path):
    H = catalog.energy(3, catalog.power_potential(3, 1, 1)).scale(2)
    path = write(tmp_path, "h.json", H.to_json())
    code, out, _ = run(capsys, "noether", "--dim", "3", "--potential", "-1/r", "--qfi", path)
    assert code == 0
    assert "eta_1 = -vx" in out and "f     = -2*r^-1" in out


def test_glue_values():
    assert cli._glue_values(["--potential", "-1/r", "--dim", "3"]) == ["--potential=-1/r", "--dim", "3"]


def test_argparse_usage_error_exits_2():
    with pytest.raises(SystemExit) as err:
        cli.main(["find", "--potential", "-1/r"])
    assert err.value.code == 2
