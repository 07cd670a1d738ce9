"""End-to-end tests of the command-line driver: exit codes, report
formats, and determinism."""

import csv
import json

import pytest

from hgtrace.cli import (
    EXIT_INFRA,
    EXIT_MATH_FAIL,
    EXIT_OK,
    load_targets,
    main,
)


# -- exit-code contract ------------------------------------------------------

def test_tables_pass(capsys):
    assert main(["verify", "tables", "--which", "hd3",
                 "--pmin", "7", "--pmax", "13"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "pass=" in out and "fail" not in out.split("summary:")[1]


def test_tables_pair_filter(capsys):
    assert main(["verify", "tables", "--which", "hd2", "--pair", "1/2,1/3",
                 "--pmin", "7", "--pmax", "23"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "hd2(1/2,1/3)" in out
    assert "hd2(1/2,1/2)" not in out


def test_unknown_pair_is_infrastructure_error(capsys):
    assert main(["verify", "tables", "--which", "hd1",
                 "--pair", "9/8,1/2"]) == EXIT_INFRA


def test_usage_error_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "tables"])          # missing required --which
    assert exc.value.code == 2


def test_theorem_failure_exit_1(capsys):
    # the mod-p^2 theorem does not extend to p^5: a true mathematical fail
    assert main(["verify", "congruences", "--case", "ahlgren",
                 "--pmin", "5", "--pmax", "7", "--k", "5"]) \
        == EXIT_MATH_FAIL
    assert "FAIL" in capsys.readouterr().out


def test_conjectural_failure_keeps_exit_0(capsys):
    # a conjectural case pushed past its stated modulus: reported, not fatal
    assert main(["verify", "congruences", "--case", "s46_1",
                 "--pmin", "13", "--pmax", "13", "--k", "5"]) == EXIT_OK
    assert "FAIL" in capsys.readouterr().out


def test_unknown_label_exit_3(capsys):
    assert main(["compute", "ap", "--label", "99.9.z.z", "--p", "7"]) \
        == EXIT_INFRA


def test_unknown_congruence_case_exit_3(capsys):
    assert main(["verify", "congruences", "--case", "nope"]) == EXIT_INFRA


# -- suites through the CLI --------------------------------------------------

def test_congruences_conjectural_status(capsys):
    assert main(["verify", "congruences", "--case", "s14_1",
                 "--pmin", "7", "--pmax", "13"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ok? " in out        # conjectural-verified marker


def test_identities_k3(capsys):
    assert main(["verify", "identities", "--which", "k3",
                 "--qmax", "13"]) == EXIT_OK


def test_identities_vanishing(capsys):
    assert main(["verify", "identities", "--which", "vanishing",
                 "--qmax", "25"]) == EXIT_OK


def test_periods_through_cli(capsys):
    assert main(["verify", "periods", "--case", "p11a",
                 "--bits", "64"]) == EXIT_OK


def test_whipple_classical(capsys):
    assert main(["verify", "whipple-classical", "--mode", "exact",
                 "--count", "5", "--seed", "11"]) == EXIT_OK


def test_compute_euler(capsys):
    assert main(["compute", "euler", "--datum", "HD2(1/2,1/3)", "--p", "7",
                 "--onedim", "-7"]) == EXIT_OK
    assert "343" in capsys.readouterr().out


def test_compute_e_profile(capsys):
    assert main(["compute", "e-profile", "--datum", "HD3(1/2,1/2)"]) \
        == EXIT_OK
    assert "weight" in capsys.readouterr().out


# -- report files ------------------------------------------------------------

def test_json_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    blobs = []
    for p in paths:
        assert main(["verify", "whipple-classical", "--count", "3",
                     "--seed", "7", "--json", str(p)]) == EXIT_OK
        data = json.loads(p.read_text())
        data.pop("timestamp")
        blobs.append(json.dumps(data, sort_keys=True))
    assert blobs[0] == blobs[1]


def test_json_schema(tmp_path, capsys):
    path = tmp_path / "r.json"
    main(["verify", "congruences", "--case", "ahlgren", "--pmin", "5",
          "--pmax", "11", "--json", str(path)])
    data = json.loads(path.read_text())
    assert data["suite"] == "congruences:ahlgren"
    assert data["toolkit_version"]
    for item in data["items"]:
        assert item["status"] == "pass"
        assert "lhs" in item and "rhs" in item
        assert "runtime_ms" not in item     # wall-clock data lives with
    assert "item_runtimes_ms" in data["timestamp"]


def test_csv_output(tmp_path, capsys):
    path = tmp_path / "r.csv"
    main(["verify", "tables", "--which", "hd3", "--pmin", "7",
          "--pmax", "11", "--csv", str(path)])
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0][0] == "case"
    assert len(rows) > 3


def test_parallel_matches_serial(tmp_path, capsys):
    out = []
    for n in ("0", "2"):
        p = tmp_path / ("p%s.json" % n)
        assert main(["verify", "tables", "--which", "hd3", "--pmin", "7",
                     "--pmax", "23", "--parallel", n,
                     "--json", str(p)]) == EXIT_OK
        data = json.loads(p.read_text())
        data.pop("timestamp")
        out.append(json.dumps(data, sort_keys=True))
    assert out[0] == out[1]


# -- targets data file -------------------------------------------------------

def test_targets_rows_complete():
    targets = load_targets()
    for which in ("hd1", "hd2", "hd3"):
        assert len(targets[which]) == 7
        for row in targets[which]:
            assert len(row["pair"]) == 2
            for term in row["primary"]:
                assert set(term) == {"p_power", "label", "kronecker"}


def test_targets_labels_resolvable():
    from hgtrace.modular_forms import handle
    targets = load_targets()
    labels = {t["label"] for which in ("hd1", "hd2", "hd3")
              for row in targets[which]
              for t in row["primary"] + row.get("alt", [])
              if t["label"]}
    for label in sorted(labels):
        assert handle(label, 50).an[1] == 1, label
