# Python imports
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any, Optional, Union

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_CLOSURE_CAP, FORBIDDEN_SYMBOL_CHARS
from cohere.commutator.exceptions import (
    AlgebraValidationError,
    NotACongruenceError,
    NotAHomomorphismError,
)
from cohere.commutator.models.algebra import (
    AlgebraDocument,
    FiniteAlgebra,
    OperationTable,
)
from cohere.commutator.models.partitions import Partition
from cohere.commutator.models.terms import Constant, Term, Variable, is_reserved_symbol
from cohere.commutator.ops.closure import PowerClosure

logger = logging.getLogger(__name__)


def validate_algebra(raw: Union[AlgebraDocument, Mapping[str, Any]]) -> FiniteAlgebra:
    """
    Check an algebra description against every algebra invariant.

    :param raw: a parsed algebra document, or a mapping with the same keys.

    :returns: the validated algebra.

    :raises AlgebraValidationError: naming the first violated invariant, with the
        operation symbol and flat table index where one applies.
    """
    doc = raw if isinstance(raw, AlgebraDocument) else AlgebraDocument(**raw)
    n = doc.size
    if n < 1:
        raise AlgebraValidationError(f"size must be at least 1, got {n}")

    seen: set[str] = set()
    operations: list[OperationTable] = []
    for op in doc.operations:
        symbol = op.symbol
        if not symbol or any(c in FORBIDDEN_SYMBOL_CHARS for c in symbol):
            raise AlgebraValidationError(f"invalid operation symbol {symbol!r}", symbol)
        if is_reserved_symbol(symbol):
            raise AlgebraValidationError(
                f"operation symbol {symbol!r} is spelled like a term leaf", symbol
            )
        if symbol in seen:
            raise AlgebraValidationError(
                f"duplicate operation symbol {symbol!r}", symbol
            )
        seen.add(symbol)
        if op.arity < 0:
            raise AlgebraValidationError(
                f"operation {symbol!r} has negative arity {op.arity}", symbol
            )
        expected = n**op.arity
        if len(op.table) != expected:
            raise AlgebraValidationError(
                f"operation {symbol!r} of arity {op.arity} needs {expected} entries, "
                f"got {len(op.table)}",
                symbol,
            )
        for index, entry in enumerate(op.table):
            if not 0 <= entry < n:
                raise AlgebraValidationError(
                    f"entry {entry} out of range at index {index} of operation "
                    f"{symbol!r}",
                    symbol,
                    index,
                )
        operations.append(
            OperationTable(symbol=symbol, arity=op.arity, table=tuple(op.table))
        )
    return FiniteAlgebra(name=doc.name, size=n, operations=tuple(operations))


def make_algebra(
    name: str, size: int, operations: Sequence[tuple[str, int, Sequence[int]]]
) -> FiniteAlgebra:
    """Build and validate an algebra from ``(symbol, arity, table)`` triples."""
    return validate_algebra(
        {
            "name": name,
            "size": size,
            "operations": [
                {"symbol": s, "arity": k, "table": [int(v) for v in t]}
                for s, k, t in operations
            ],
        }
    )


def _tabulate(n: int, arity: int, values: np.ndarray) -> tuple[int, ...]:
    return tuple(int(v) for v in np.asarray(values).reshape(n**arity))


def quotient_algebra(
    algebra: FiniteAlgebra, theta: Partition
) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """
    Build A / theta.

    Blocks are numbered by increasing least element.

    :returns: the quotient algebra and the projection sending each element to its
        block.

    :raises NotACongruenceError: if some operation is not well defined on blocks.
    """
    reps = np.array(sorted(set(theta.ids)), dtype=np.intp)
    m = len(reps)
    position = np.zeros(algebra.size, dtype=np.intp)
    position[reps] = np.arange(m)
    projection = position[theta.array]

    operations: list[OperationTable] = []
    for op, arr in zip(algebra.operations, algebra.arrays):
        if op.arity == 0:
            operations.append(
                OperationTable(
                    symbol=op.symbol, arity=0, table=(int(projection[arr[()]]),)
                )
            )
            continue
        grid = np.indices((m,) * op.arity, dtype=np.intp)
        quotient = projection[arr[tuple(reps[g] for g in grid)]]
        full = np.indices((algebra.size,) * op.arity, dtype=np.intp)
        lifted = quotient[tuple(projection[g] for g in full)]
        if not np.array_equal(lifted, projection[arr]):
            bad = tuple(int(v) for v in np.argwhere(lifted != projection[arr])[0])
            raise NotACongruenceError(
                f"{theta.to_text()} is not compatible with {op.symbol!r}: "
                f"the block of {op.symbol}{bad} is not determined by the argument "
                "blocks"
            )
        operations.append(
            OperationTable(
                symbol=op.symbol, arity=op.arity, table=_tabulate(m, op.arity, quotient)
            )
        )
    quotient_name = f"{algebra.name}/{theta.to_text()}"
    return (
        FiniteAlgebra(name=quotient_name, size=m, operations=tuple(operations)),
        tuple(int(v) for v in projection),
    )


def closure_in_power(
    algebra: FiniteAlgebra,
    k: int,
    generators: Union[np.ndarray, Sequence[Sequence[int]]],
    cap: int = DEFAULT_CLOSURE_CAP,
) -> PowerClosure:
    """
    Generate the subuniverse of A^k spanned by ``generators``.

    The returned closure carries an ``incomplete`` flag when the cap was reached;
    callers needing the whole set must treat that as failure.
    """
    return PowerClosure(algebra, k, generators, cap).run()


def projection_rows(n: int, k: int) -> np.ndarray:
    """The ``k`` projections A^k -> A as rows of length ``n ** k``."""
    return np.indices((n,) * k, dtype=np.intp).reshape(k, -1)


@dataclass
class FunctionClone:
    """
    A set of k-ary functions on A generated inside A^(n^k).

    Each function is a row of its closure, tabulated row-major like an operation table;
    ``leaves`` are the terms standing for the generators when provenance is extracted.
    """

    closure: PowerClosure
    leaves: tuple[Term, ...]
    arity: int

    def __len__(self) -> int:  # noqa: D105
        return len(self.closure)

    @property
    def tables(self) -> np.ndarray:
        """The generated functions, one table per row."""
        return self.closure.rows

    @property
    def incomplete(self) -> bool:  # noqa: D102
        return self.closure.incomplete

    def term(self, i: int) -> Term:
        """The provenance term or polynomial of function ``i``."""
        return self.closure.term(i, self.leaves)

    def index_of(self, table: Sequence[int]) -> Optional[int]:
        """Return the position of the function with this table, if generated."""
        return self.closure.index_of(table)


def polynomial_closure(
    algebra: FiniteAlgebra,
    k: int,
    cap: int = DEFAULT_CLOSURE_CAP,
    *,
    run: bool = True,
) -> FunctionClone:
    """
    The k-ary polynomial operations of A.

    Generated from the projections and all constant functions; provenance polynomials
    use ``x0 ... x(k-1)`` and constant leaves ``@a``.
    """
    n = algebra.size
    rows = np.concatenate(
        [
            projection_rows(n, k),
            np.repeat(np.arange(n, dtype=np.intp)[:, None], n**k, axis=1),
        ]
    )
    leaves: tuple[Term, ...] = tuple(Variable(i) for i in range(k)) + tuple(
        Constant(a) for a in range(n)
    )
    closure = PowerClosure(algebra, n**k, rows, cap)
    if run:
        closure.run()
    return FunctionClone(closure=closure, leaves=leaves, arity=k)


def unary_polynomial_clone(
    algebra: FiniteAlgebra, cap: int = DEFAULT_CLOSURE_CAP
) -> FunctionClone:
    """
    All unary polynomial functions of A.

    The closure of the identity and the constants under the basic operations; there are
    at most ``n ** n`` of them.
    """
    clone = polynomial_closure(algebra, 1, cap)
    logger.debug(f"{algebra.name} has {len(clone)} unary polynomials")
    return clone


def _check_same_signature(a: FiniteAlgebra, b: FiniteAlgebra) -> None:
    if [(op.symbol, op.arity) for op in a.operations] != [
        (op.symbol, op.arity) for op in b.operations
    ]:
        raise AlgebraValidationError(
            f"{a.name} and {b.name} do not have the same signature"
        )


def product_algebra(
    a: FiniteAlgebra, b: FiniteAlgebra
) -> tuple[FiniteAlgebra, tuple[int, ...], tuple[int, ...]]:
    """
    Build A x B; the pair ``(x, y)`` is the element ``x * |B| + y``.

    :returns: the product and the two projections as element maps.
    """
    _check_same_signature(a, b)
    na, nb = a.size, b.size
    size = na * nb
    first = np.arange(size, dtype=np.intp) // nb
    second = np.arange(size, dtype=np.intp) % nb

    operations: list[OperationTable] = []
    for op, arr_a, arr_b in zip(a.operations, a.arrays, b.arrays):
        if op.arity == 0:
            values = np.asarray(int(arr_a[()]) * nb + int(arr_b[()]))
        else:
            grid = np.indices((size,) * op.arity, dtype=np.intp)
            values = arr_a[tuple(first[g] for g in grid)] * nb + arr_b[
                tuple(second[g] for g in grid)
            ]
        operations.append(
            OperationTable(
                symbol=op.symbol,
                arity=op.arity,
                table=_tabulate(size, op.arity, values),
            )
        )
    product = FiniteAlgebra(
        name=f"{a.name}x{b.name}", size=size, operations=tuple(operations)
    )
    return product, tuple(int(v) for v in first), tuple(int(v) for v in second)


def subalgebra(
    algebra: FiniteAlgebra,
    generators: Sequence[int],
    cap: int = DEFAULT_CLOSURE_CAP,
) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """
    The subalgebra generated by ``generators``.

    :returns: the subalgebra, renumbered in increasing order, and its embedding into A.

    :raises AlgebraValidationError: if the generated subuniverse is empty.
    """
    closure = closure_in_power(algebra, 1, [[g] for g in generators], cap)
    universe = sorted(int(v) for v in closure.rows[:, 0])
    if not universe:
        raise AlgebraValidationError(f"the subuniverse of {algebra.name} is empty")
    embedding = np.array(universe, dtype=np.intp)
    position = np.full(algebra.size, -1, dtype=np.intp)
    position[embedding] = np.arange(len(universe))
    m = len(universe)

    operations: list[OperationTable] = []
    for op, arr in zip(algebra.operations, algebra.arrays):
        if op.arity == 0:
            values = np.asarray(position[arr[()]])
        else:
            grid = np.indices((m,) * op.arity, dtype=np.intp)
            values = position[arr[tuple(embedding[g] for g in grid)]]
        operations.append(
            OperationTable(
                symbol=op.symbol, arity=op.arity, table=_tabulate(m, op.arity, values)
            )
        )
    sub = FiniteAlgebra(
        name=f"Sg({algebra.name};{','.join(str(g) for g in generators)})",
        size=m,
        operations=tuple(operations),
    )
    return sub, tuple(universe)


def is_homomorphism(
    a: FiniteAlgebra, b: FiniteAlgebra, f: Sequence[int]
) -> bool:
    """Return whether the element map ``f: A -> B`` commutes with every operation."""
    if len(f) != a.size or any(not 0 <= v < b.size for v in f):
        return False
    try:
        _check_same_signature(a, b)
    except AlgebraValidationError:
        return False
    fmap = np.asarray(f, dtype=np.intp)
    for op, arr_a, arr_b in zip(a.operations, a.arrays, b.arrays):
        if op.arity == 0:
            if fmap[arr_a[()]] != arr_b[()]:
                return False
            continue
        grid = np.indices((a.size,) * op.arity, dtype=np.intp)
        if not np.array_equal(fmap[arr_a], arr_b[tuple(fmap[g] for g in grid)]):
            return False
    return True


def check_surjective_homomorphism(
    a: FiniteAlgebra, b: FiniteAlgebra, f: Sequence[int]
) -> None:
    """
    Check that ``f`` is a surjective homomorphism from A onto B.

    :raises NotAHomomorphismError: otherwise.
    """
    if not is_homomorphism(a, b, f):
        raise NotAHomomorphismError(
            f"the map {list(f)} is not a homomorphism {a.name} -> {b.name}"
        )
    if set(f) != set(range(b.size)):
        raise NotAHomomorphismError(
            f"the map {list(f)} is not onto {b.name}"
        )
