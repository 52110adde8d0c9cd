import json

import pytest

from freelines import fixtures
from freelines.arrangement import read_arrangement, write_arrangement
from freelines.cli import main


@pytest.fixture()
def files(tmp_path):
    paths = {}
    for name, arr in [
        ("boolean", fixtures.boolean_arrangement()),
        ("free13", fixtures.free_13()),
        ("generic4", fixtures.generic_four()),
        ("near_pencil5", fixtures.near_pencil(5)),
    ]:
        p = tmp_path / f"{name}.json"
        write_arrangement(p, arr)
        paths[name] = str(p)
    return paths


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_invariants_fixture(files, capsys):
    code, data = run(capsys, ["invariants", files["free13"]])
    assert code == 0
    p = data["payload"]
    assert p["b2"] == "48"
    assert p["exponents"] == ["6", "6"]
    assert p["t"] == {"2": "14", "3": "6", "4": "6", "5": "1"}
    assert p["tjurina"] == "108"
    assert all(isinstance(v, str) for v in p["chi_cubic"])


def test_invariants_boolean(files, capsys):
    code, data = run(capsys, ["invariants", files["boolean"]])
    assert code == 0
    assert data["payload"]["b2"] == "3"
    assert data["payload"]["exponents"] == ["1", "1"]


def test_invariants_malformed_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit) as exc:
        main(["invariants", str(bad)])
    assert exc.value.code == 2


def test_saito_boolean(files, capsys):
    code, data = run(capsys, ["saito", files["boolean"]])
    assert code == 0
    assert data["payload"]["loss"] <= 1e-9
    assert data["payload"]["k1"] == "3"


def test_saito_no_exponents_exits_one(files, capsys):
    code, data = run(capsys, ["saito", files["generic4"]])
    assert code == 1
    assert data["payload"]["reason"] == "delta-negative"


def test_verify_writes_certificate(files, tmp_path, capsys):
    cert_path = str(tmp_path / "b.cert.json")
    code, data = run(capsys, ["verify", files["boolean"], "--certificate-out", cert_path])
    assert code == 0
    assert data["payload"]["verdict"] == "certified"
    code, data = run(capsys, ["check", files["boolean"], cert_path])
    assert code == 0
    assert data["payload"]["verdict"] == "valid"


def test_check_detects_wrong_arrangement(files, tmp_path, capsys):
    cert_path = str(tmp_path / "b.cert.json")
    run(capsys, ["verify", files["boolean"], "--certificate-out", cert_path])
    code, data = run(capsys, ["check", files["near_pencil5"], cert_path])
    assert code == 1
    assert data["payload"]["first_failing_check"] == "hash-mismatch"


def test_check_detects_tampered_scalar(files, tmp_path, capsys):
    cert_path = tmp_path / "b.cert.json"
    run(capsys, ["verify", files["boolean"], "--certificate-out", str(cert_path)])
    cert = json.loads(cert_path.read_text())
    from fractions import Fraction

    cert["c"] = str(Fraction(cert["c"]) * 2)
    cert_path.write_text(json.dumps(cert))
    code, data = run(capsys, ["check", files["boolean"], str(cert_path)])
    assert code == 1
    assert data["payload"]["first_failing_check"] == "determinant-mismatch"


def test_construct_small(capsys, tmp_path):
    out = str(tmp_path / "cells")
    code, data = run(capsys, ["construct", "1", "1", "--out", out])
    assert code == 0
    arr = read_arrangement(tmp_path / "cells" / "two_pencil_1x1.json")
    assert arr.n == 3
    code, data = run(capsys, [
        "check",
        str(tmp_path / "cells" / "two_pencil_1x1.json"),
        str(tmp_path / "cells" / "two_pencil_1x1.cert.json"),
    ])
    assert code == 0


def test_construct_rejects_bad_exponents(capsys):
    assert main(["construct", "3", "2"]) == 2


def test_extend_near_pencil(files, capsys):
    code, data = run(capsys, ["extend", files["near_pencil5"], "1", "4", "--pool-bound", "2"])
    assert code == 0
    assert len(data["payload"]["discoveries"]) >= 1


def test_extend_rejects_non_free_seed(files, capsys):
    code, data = run(capsys, ["extend", files["generic4"], "2", "2"])
    assert code == 1
    assert data["payload"]["error"] == "seed-not-certified"


def test_extend_unreachable_target_empty(tmp_path, capsys):
    from freelines.search import supersolvable_two_pencil

    seed = tmp_path / "tp22.json"
    write_arrangement(seed, supersolvable_two_pencil(2, 2))
    code, data = run(capsys, ["extend", str(seed), "1", "4"])
    assert code == 0
    assert data["payload"]["discoveries"] == []


def test_search_n3(capsys):
    code, data = run(capsys, ["search", "3", "1", "1", "--beam", "4"])
    assert code == 0
    assert data["payload"]["beam"][0]["verdict"] == "certified"


def test_survey(files, capsys):
    code, data = run(capsys, ["survey", files["boolean"], files["free13"], files["generic4"]])
    assert code == 0
    rows = data["payload"]["rows"]
    assert rows[0]["loss"] <= 1e-9
    assert rows[1]["loss"] < 1e-6
    assert rows[2]["loss"] is None and rows[2]["reason"] == "delta-negative"


def test_cascade_cli(files, tmp_path, capsys):
    out = str(tmp_path / "cat")
    code, data = run(
        capsys,
        [
            "cascade", files["near_pencil5"],
            "--n-max", "6", "--targets", "1,4", "--pool-bound", "2", "--out", out,
        ],
    )
    assert code == 0
    assert data["payload"]["levels"].get("6,1,4")
    index = json.loads((tmp_path / "cat" / "index.json").read_text())
    assert index


def test_round_trip_cli_files(tmp_path, files):
    arr = read_arrangement(files["free13"])
    again = tmp_path / "again.json"
    write_arrangement(again, arr)
    assert read_arrangement(again) == arr


def test_config_file_overrides(files, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"pool_bound": 2, "prefilter_threshold": 0.02}))
    code, data = run(
        capsys,
        ["extend", files["near_pencil5"], "1", "4", "--pool-bound", "1", "--config", str(cfg)],
    )
    assert code == 0
    # pool bound 1 alone has no unused apex lines; the config bound of 2 does
    assert len(data["payload"]["discoveries"]) >= 1


def test_delta_b2_override_empty(files, capsys):
    # the derived target for (1,4) is 2; an explicit impossible target gives
    # an empty result with exit 0
    code, data = run(
        capsys,
        ["extend", files["near_pencil5"], "1", "4", "--delta-b2", "1"],
    )
    assert code == 0
    assert data["payload"]["discoveries"] == []
