import json

import pytest
from conftest import DOCS

from cohere.commutator import AlgebraCalculator
from cohere.commutator.exceptions import (
    AlgebraParseError,
    AlgebraValidationError,
    PartitionParseError,
    UnknownBuiltinError,
)
from cohere.commutator.formats import (
    emit_report,
    lattice_graph,
    parse_algebra,
    parse_algebra_text,
    parse_pair,
    parse_partition,
    parse_partition_with_log,
    serialize_algebra,
    validation_message,
)
from cohere.commutator.models import Partition
from cohere.commutator.ops.lattice import con_all


def test_parse_algebra_document():
    z3 = parse_algebra(str(DOCS / "z3.json"))
    assert z3.name == "Z3"
    assert z3.size == 3
    assert z3.apply("+", (2, 2)) == 1
    assert z3.apply("-", (1,)) == 2


def test_parse_builtin_algebras():
    assert parse_algebra("builtin:S3").size == 6
    with pytest.raises(UnknownBuiltinError):
        parse_algebra("builtin:S5")


def test_serialize_algebra_is_canonical(corpus):
    for algebra in corpus.values():
        text = serialize_algebra(algebra)
        assert text.endswith("\n")
        assert text.count("\n") == 1
        parsed = parse_algebra_text(text)
        assert parsed.name == algebra.name
        assert parsed.operations == algebra.operations
        assert serialize_algebra(parsed) == text


def test_parse_error_reports_the_line():
    with pytest.raises(AlgebraParseError) as e:
        parse_algebra(str(DOCS / "trailing_comma.json"))
    assert e.value.line == 6
    assert "(line 6)" in validation_message(e.value)


@pytest.mark.parametrize(
    "text, field",
    [
        ('{"size": "many"}', "size"),
        (
            '{"size": 2, "operations": [{"symbol": "f", "arity": 1}]}',
            "operations.0.table",
        ),
    ],
)
def test_parse_error_reports_the_field(text, field):
    with pytest.raises(AlgebraParseError) as e:
        parse_algebra_text(text)
    assert e.value.field == field
    assert f"field {field}" in validation_message(e.value)


def test_parse_rejects_unknown_attributes_and_non_objects():
    with pytest.raises(AlgebraParseError):
        parse_algebra_text('{"size": 2, "colour": "red"}')
    with pytest.raises(AlgebraParseError) as e:
        parse_algebra_text("[1, 2]")
    assert e.value.line == 1


def test_parse_reports_unreadable_paths(tmp_path):
    with pytest.raises(AlgebraParseError):
        parse_algebra(str(tmp_path / "missing.json"))


def test_validation_message_names_the_operation():
    text = '{"size": 2, "operations": [{"symbol": "f", "arity": 1, "table": [0, 2]}]}'
    with pytest.raises(AlgebraValidationError) as e:
        parse_algebra_text(text)
    assert validation_message(e.value).endswith("(operation f)")


def test_parse_partition_forms(z4):
    halves = Partition.from_blocks(4, [[0, 2], [1, 3]])
    assert parse_partition("0", 4).is_discrete
    assert parse_partition(" 1 ", 4).is_full
    assert parse_partition("0,2|1,3", 4) == halves
    assert parse_partition("0,2", 4) == Partition.from_blocks(4, [[0, 2]])
    assert parse_partition("cg:0-2", 4, z4) == halves

    partition, log = parse_partition_with_log("cg:0-2", 4, z4)
    assert log is not None
    assert log.replay() == partition
    assert parse_partition_with_log("0,2|1,3", 4)[1] is None


@pytest.mark.parametrize(
    "text",
    [
        "0,5",
        "0,1|1,2",
        "0,0",
        "a,b",
        "cg:02",
        "cg:0-x",
        "cg:0-1-2",
        "0,\N{SUPERSCRIPT TWO}",
    ],
)
def test_parse_partition_errors(z4, text):
    with pytest.raises(PartitionParseError):
        parse_partition(text, 4, z4)


def test_parse_pair():
    assert parse_pair(" 1-3", 4) == (1, 3)
    digits = ["0-\N{SUPERSCRIPT TWO}", "0-\N{FULLWIDTH DIGIT ONE}"]
    for text in ["5-6", "0-4", "1", "0-1-2", "-1-2", *digits]:
        with pytest.raises(PartitionParseError):
            parse_pair(text, 4)


def test_cg_partition_needs_an_algebra():
    with pytest.raises(PartitionParseError):
        parse_partition("cg:0-1", 4)


def test_lattice_graph_is_the_hasse_diagram(corpus):
    graph = lattice_graph(con_all(corpus["V4"]))
    assert graph.number_of_nodes() == 5
    assert graph.number_of_edges() == 6


def test_emit_report_is_deterministic(corpus):
    z2 = corpus["Z2"]
    first = emit_report(AlgebraCalculator(algebra=z2).report())
    second = emit_report(AlgebraCalculator(algebra=z2).report())
    assert first == second
    document = json.loads(first)
    assert list(document) == sorted(document)
    assert document["abelian"] is True
    assert document["congruences"] == ["0|1", "0,1"]
    assert document["timing"] is None
