import json

import pytest
from conftest import DOCS

from cohere.commutator.cli import main
from cohere.commutator.constants import (
    EXIT_INPUT_ERROR,
    EXIT_NEGATIVE,
    EXIT_OK,
    EXIT_UNDECIDED,
)


def test_con_lists_the_congruences(capsys):
    assert main(["con", "builtin:Z4"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ["0|1|2|3", "0,2|1,3", "0,1,2,3"]


def test_con_as_json(capsys):
    assert main(["con", "builtin:V4", "--json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert len(document["congruences"]) == 5
    assert document["modular"] is True
    assert document["distributive"] is False


def test_con_writes_the_hasse_diagram(tmp_path):
    target = tmp_path / "con.dot"
    assert main(["con", "builtin:V4", "--dot", str(target)]) == EXIT_OK
    assert target.read_text().count("->") == 6


def test_cg_with_a_chain(capsys):
    assert main(["cg", "builtin:S3", "0-3", "--chain", "0-4", "--json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["congruence"] == "0,3,4|1,2,5"
    chain = document["chain"]
    assert chain[0]["start"] == 0
    assert chain[-1]["end"] == 4


def test_cg_of_unrelated_elements_is_an_input_error():
    assert main(["cg", "builtin:S3", "0-3", "--chain", "0-1"]) == EXIT_INPUT_ERROR
    assert main(["cg", "builtin:S3", "0-3", "--chain", "0"]) == EXIT_INPUT_ERROR


def test_commutator(capsys):
    assert main(["commutator", "builtin:S3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0,3,4|1,2,5"
    argv = ["commutator", "builtin:S3", "--alpha", "cg:0-3", "--beta", "0,3,4|1,2,5"]
    assert main([*argv, "--method", "delta"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0|1|2|3|4|5"


def test_day_commutator_without_day_terms():
    assert main(["commutator", "builtin:set2", "--method", "day"]) == EXIT_NEGATIVE


def test_center(capsys):
    assert main(["center", "builtin:D4"]) == EXIT_OK
    assert capsys.readouterr().out.strip().count("|") == 3


def test_abelian(capsys):
    assert main(["abelian", "builtin:Z4"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "abelian"
    assert main(["abelian", "builtin:S3"]) == EXIT_NEGATIVE
    assert capsys.readouterr().out.startswith("not abelian")


def test_maltsev(capsys):
    assert main(["maltsev", "builtin:S3", "--which", "day"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("day: found")
    assert main(["maltsev", "builtin:set2"]) == EXIT_NEGATIVE
    assert main(["maltsev", "builtin:S3", "--cap", "3"]) == EXIT_UNDECIDED


def test_affine(capsys):
    assert main(["affine", "builtin:Z4", "--json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["affine"] is True
    assert document["ring_size"] == 4
    assert main(["affine", "builtin:S3"]) == EXIT_NEGATIVE
    assert main(["affine", "builtin:Z4", "--zero", "9"]) == EXIT_INPUT_ERROR


def test_report(capsys):
    assert main(["report", "builtin:set2"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["abelian"] is True
    assert document["terms"]["maltsev"]["outcome"] == "none"
    assert document["affine"] is None
    assert document["affine_error"]


def test_report_with_timing(capsys):
    assert main(["report", "builtin:Z2", "--timing", "--jobs", "2"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert set(document["timing"]) >= {"congruences", "commutators", "terms"}


def test_input_errors(tmp_path):
    assert main(["con", str(DOCS / "trailing_comma.json")]) == EXIT_INPUT_ERROR
    assert main(["con", "builtin:nothing"]) == EXIT_INPUT_ERROR
    assert main(["con", str(tmp_path / "missing.json")]) == EXIT_INPUT_ERROR
    assert main(["commutator", "builtin:Z4", "--alpha", "0,9"]) == EXIT_INPUT_ERROR
    assert main(["con", "builtin:Z4", "--cap", "0"]) == EXIT_INPUT_ERROR
    assert main(["cg", "builtin:Z4", "0-2", "--chain", "5-6"]) == EXIT_INPUT_ERROR
    assert main(["cg", "builtin:Z4", "0-2", "--chain", "0-\N{SUPERSCRIPT TWO}"]) == (
        EXIT_INPUT_ERROR
    )


@pytest.mark.parametrize("method", ["tc", "day", "delta"])
def test_commutator_rejects_partitions_that_are_not_congruences(caplog, method):
    argv = ["commutator", "builtin:Z4", "--alpha", "0,1", "--beta", "1"]
    assert main([*argv, "--method", method]) == EXIT_INPUT_ERROR
    assert "0,1|2|3 is not a congruence of Z4" in caplog.text


def test_unknown_verb_exits_through_argparse():
    with pytest.raises(SystemExit):
        main(["lattice", "builtin:Z4"])
