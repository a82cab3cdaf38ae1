import csv
import json

import pytest

from schottkylab.cli import run
from schottkylab.schottky import symmetric_group, width_for_translation_length


@pytest.fixture
def group_file(tmp_path):
    from schottkylab.schottky import save_group

    p = tmp_path / "g.json"
    save_group(symmetric_group(2, width_for_translation_length(4.0)), p)
    return p


def test_validate(group_file, tmp_path):
    m = tmp_path / "m.json"
    assert run(["validate", "--group", str(group_file), "--manifest", str(m)]) == 0
    man = json.loads(m.read_text())
    for key in ("command", "group_hash", "params", "wall_time_s", "warnings", "exit_code", "versions"):
        assert key in man
    assert man["exit_code"] == 0 and len(man["group_hash"]) == 64


def test_bad_group_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"generators": [[[1, 0], [0, 1]]]}')
    assert run(["validate", "--group", str(bad), "--manifest", str(tmp_path / "m.json")]) == 1


def test_unknown_flag_exit_2(tmp_path):
    out = tmp_path / "o.csv"
    assert run(["dim", "--group", "cylinder:2", "--bogus", "--out", str(out)]) == 2
    assert not out.exists() and not (tmp_path / "o.csv.manifest.json").exists()


def test_usage_error_exit_2(tmp_path):
    out = tmp_path / "o.csv"
    assert run(["zeta-eval", "--group", "cylinder:2", "--out", str(out)]) == 2


def test_cylinder_resonances_csv_reproducible(tmp_path):
    args = ["resonances", "--group", "cylinder:2", "--rect", "-0.5,0.5,-1,7", "--step", "0.1"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(a.open()))
    assert len(rows) == 3
    assert all(int(r["order"]) == 2 for r in rows)
    man = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert man["command"] == "resonances"


def test_config_file(tmp_path, group_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"T": 9.0}))
    out = tmp_path / "l.csv"
    assert run(["lengths", "--config", str(cfg), "--group", str(group_file), "--out", str(out)]) == 0
    man = json.loads((tmp_path / "l.csv.manifest.json").read_text())
    assert man["params"]["T"] == 9.0
    # explicit flags win over the config
    assert run(["lengths", "--config", str(cfg), "--group", str(group_file), "--T", "5", "--out", str(out)]) == 0
    assert json.loads((tmp_path / "l.csv.manifest.json").read_text())["params"]["T"] == 5.0


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nope": 1}))
    assert run(["dim", "--config", str(cfg), "--group", "cylinder:2"]) == 2


def test_dim_json(tmp_path):
    out = tmp_path / "d.json"
    assert run(["dim", "--group", "symmetric:2:4", "--format", "json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert isinstance(data, (dict, list))
