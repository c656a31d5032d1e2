import json
from pathlib import Path

import pytest

from limhodge import instances
from limhodge.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_builtin(capsys):
    code, out, _ = run(capsys, "validate", "builtin:toy")
    assert code == 0 and "valid" in out


def test_validate_malformed(tmp_path, capsys):
    bad = tmp_path / "malformed.json"
    bad.write_text(json.dumps({"schema": 1, "name": "broken"}))
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert "missing field" in err


def test_validate_unparseable(tmp_path, capsys):
    bad = tmp_path / "junk.json"
    bad.write_text("[1, 2")
    assert run(capsys, "validate", str(bad))[0] == 1


def test_validate_file(tmp_path, capsys):
    path = tmp_path / "conifold.json"
    instances.save_instance(instances.conifold_instance(), path)
    assert run(capsys, "validate", str(path))[0] == 0


def test_e1_table(capsys):
    code, out, _ = run(capsys, "--json", "e1", "builtin:toy", "--m", "3")
    data = json.loads(out)
    assert code == 0
    assert data["gr"] == {"2": 1, "3": 2, "4": 1}


@pytest.mark.parametrize("d", [1, 2, 3])
def test_distance_jordan_block(capsys, d):
    code, out, _ = run(capsys, "--json", "distance", f"builtin:jordan-block?d={d}")
    data = json.loads(out)
    assert code == 0
    assert data["d"] == d and data["classification"] == "infinite"


def test_distance_conifold(capsys):
    code, out, _ = run(capsys, "distance", "builtin:conifold")
    assert code == 0 and "finite" in out and "d = 0" in out


def test_ddbar_and_polarization(capsys):
    assert run(capsys, "ddbar", "builtin:conifold")[1].startswith("ddbar: holds")
    assert run(capsys, "polarization", "builtin:conifold")[1].strip() == "polarized: true"


def test_unsupported_shape_exit_code(capsys):
    code, _, err = run(capsys, "ddbar", "builtin:toy")
    assert code == 2 and "unsupported" in err


def test_germ_is_not_an_snc_instance(capsys):
    assert run(capsys, "e1", "builtin:jordan-block?d=1")[0] == 1


@pytest.mark.parametrize(
    "uri, fmt, name",
    [
        ("builtin:conifold", "json", "conifold.json"),
        ("builtin:conifold", "md", "conifold.md"),
        ("builtin:jordan-block?d=2", "json", "jordan-block-d2.json"),
        ("builtin:hashimoto-sano?a=1", "json", "hashimoto-sano-a1.json"),
    ],
)
def test_reports_match_golden(tmp_path, capsys, uri, fmt, name):
    out = tmp_path / name
    assert run(capsys, "report", uri, "--format", fmt, "--out", str(out))[0] == 0
    assert out.read_bytes() == (GOLDEN / name).read_bytes()


def test_report_twice_is_identical(capsys):
    first = run(capsys, "report", "builtin:toy")[1]
    second = run(capsys, "report", "builtin:toy")[1]
    assert first == second
    data = json.loads(first)
    assert data["ddbar"]["status"] == "not-applicable"
    assert data["schema"] == 1
