# Python imports
import json
import logging
from typing import Any, Optional

# 3rd party imports
import networkx as nx
from graphviz import Digraph  # type: ignore
from pydantic import ValidationError

# Local imports
from cohere.commutator.constants import BUILTIN_PREFIX
from cohere.commutator.corpus import builtin
from cohere.commutator.exceptions import (
    AlgebraParseError,
    AlgebraValidationError,
    PartitionParseError,
)
from cohere.commutator.models.algebra import AlgebraDocument, FiniteAlgebra
from cohere.commutator.models.lattice import CongruenceLattice
from cohere.commutator.models.partitions import Partition, WitnessLog
from cohere.commutator.models.report import AlgebraReport
from cohere.commutator.ops.algebra import validate_algebra
from cohere.commutator.ops.congruence import cg_with_witnesses
from cohere.commutator.utils import read_text

logger = logging.getLogger(__name__)

CG_PREFIX = "cg:"


def parse_algebra_text(text: str) -> FiniteAlgebra:
    """
    Parse and validate an algebra document.

    :raises AlgebraParseError: with the line of a JSON syntax error or the offending
        field of a schema error.
    :raises AlgebraValidationError: if the document violates an algebra invariant.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise AlgebraParseError(f"invalid algebra document: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        raise AlgebraParseError("an algebra document must be an object", line=1)
    try:
        document = AlgebraDocument(**data)
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        raise AlgebraParseError(f"invalid field {where}: {error['msg']}", field=where)
    except ValueError as e:
        # unknown attributes are rejected by the model constructor
        raise AlgebraParseError(str(e))
    return validate_algebra(document)


def parse_algebra(source: str) -> FiniteAlgebra:
    """
    Load an algebra from ``builtin:<name>`` or a document path.

    Paths may use any filesystem fsspec understands.
    """
    if source.startswith(BUILTIN_PREFIX):
        return builtin(source[len(BUILTIN_PREFIX) :])
    logger.debug(f"Reading algebra document {source}")
    try:
        text = read_text(source)
    except (OSError, UnicodeDecodeError) as e:
        raise AlgebraParseError(f"cannot read {source}: {e}")
    return parse_algebra_text(text)


def serialize_algebra(algebra: FiniteAlgebra) -> str:
    """The canonical document of an algebra: one line, keys sorted."""
    document = AlgebraDocument(
        name=algebra.name,
        size=algebra.size,
        operations=[
            {"symbol": op.symbol, "arity": op.arity, "table": list(op.table)}
            for op in algebra.operations
        ],
    )
    return json.dumps(document.model_dump(), sort_keys=True) + "\n"


def _element(token: str, n: int, text: str) -> int:
    token = token.strip()
    if not (token.isascii() and token.isdecimal()):
        raise PartitionParseError(f"{token!r} is not an element in {text!r}")
    value = int(token)
    if value >= n:
        raise PartitionParseError(f"element {value} out of range for size {n}")
    return value


def parse_pair(text: str, n: int, context: Optional[str] = None) -> tuple[int, int]:
    """
    Parse a pair of elements written ``a-b``.

    :raises PartitionParseError: if the text is not a pair or an element is out of
        range for size ``n``.
    """
    where = context or text
    ends = text.split("-")
    if len(ends) != 2:
        raise PartitionParseError(f"{text!r} is not a pair a-b in {where!r}")
    return _element(ends[0], n, where), _element(ends[1], n, where)


def parse_partition_with_log(
    text: str, n: int, algebra: Optional[FiniteAlgebra] = None
) -> tuple[Partition, Optional[WitnessLog]]:
    """
    Parse partition text, keeping the witness log of ``cg:`` requests.

    Accepted forms are ``0``, ``1``, blocks such as ``0,2|1,3`` (omitted elements are
    singletons) and ``cg:a-b,c-d`` for the congruence generated by the listed pairs.

    :raises PartitionParseError: on syntax errors, elements out of range, overlapping
        blocks, or a ``cg:`` request without an algebra.
    """
    text = text.strip()
    if text == "0":
        return Partition.discrete(n), None
    if text == "1":
        return Partition.full(n), None
    if text.startswith(CG_PREFIX):
        if algebra is None:
            raise PartitionParseError(f"{text!r} needs an algebra to generate in")
        items = text[len(CG_PREFIX) :].split(",")
        pairs = [parse_pair(item, n, text) for item in items]
        partition, log = cg_with_witnesses(algebra, pairs)
        return partition, log

    seen: set[int] = set()
    blocks: list[list[int]] = []
    for chunk in text.split("|"):
        block = [_element(token, n, text) for token in chunk.split(",")]
        overlap = seen.intersection(block)
        if overlap or len(set(block)) != len(block):
            raise PartitionParseError(f"blocks overlap in {text!r}")
        seen.update(block)
        blocks.append(block)
    return Partition.from_blocks(n, blocks), None


def parse_partition(
    text: str, n: int, algebra: Optional[FiniteAlgebra] = None
) -> Partition:
    """Parse partition text; see ``parse_partition_with_log`` for the syntax."""
    return parse_partition_with_log(text, n, algebra)[0]


def lattice_graph(lattice: CongruenceLattice) -> Any:
    """The Hasse diagram of Con(A) as a networkx graph, edges pointing upwards."""
    order = nx.DiGraph()
    order.add_nodes_from(range(len(lattice)))
    order.add_edges_from(
        (i, j)
        for i in range(len(lattice))
        for j in range(len(lattice))
        if i != j and lattice.leq[i, j]
    )
    return nx.transitive_reduction(order)


def emit_dot(lattice: CongruenceLattice) -> str:
    """
    DOT source of the Hasse diagram of Con(A).

    One node per congruence labelled with its partition text, one edge per covering
    pair.
    """
    hasse = lattice_graph(lattice)
    diagram = Digraph(name=f"Con_{lattice.algebra_name}")
    diagram.attr(rankdir="BT")
    diagram.attr("node", shape="box", fontsize="10")
    for i, partition in enumerate(lattice.partitions):
        diagram.node(f"c{i}", partition.to_text())
    for i, j in sorted(hasse.edges):
        diagram.edge(f"c{i}", f"c{j}")
    return diagram.source


def emit_report(report: AlgebraReport) -> str:
    """The report as JSON with sorted keys."""
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def validation_message(error: Exception) -> str:
    """A one-line description of an input error for the command line."""
    if isinstance(error, AlgebraParseError):
        where = []
        if error.line is not None:
            where.append(f"line {error.line}")
        if error.field is not None:
            where.append(f"field {error.field}")
        suffix = f" ({', '.join(where)})" if where else ""
        return f"{error.message}{suffix}"
    if isinstance(error, AlgebraValidationError) and error.symbol is not None:
        return f"{error.message} (operation {error.symbol})"
    return str(error)
