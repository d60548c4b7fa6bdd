# Python imports
from collections.abc import Sequence
from functools import lru_cache

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.exceptions import TermError
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.terms import (
    Application,
    Constant,
    Term,
    Variable,
    term_variables,
)


def check_term(algebra: FiniteAlgebra, t: Term) -> None:
    """
    Check that ``t`` only uses operations of ``algebra`` with their declared arities.

    :raises TermError: on an unknown symbol, an arity mismatch or a constant outside the
        universe.
    """
    seen: set[int] = set()
    stack: list[Term] = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Application):
            op = algebra.operation(node.symbol)
            if op is None:
                raise TermError(f"{algebra.name} has no operation {node.symbol!r}")
            if op.arity != len(node.children):
                raise TermError(
                    f"Operation {node.symbol!r} has arity {op.arity}, "
                    f"got {len(node.children)} arguments"
                )
            stack.extend(node.children)
        elif isinstance(node, Constant) and not 0 <= node.value < algebra.size:
            raise TermError(
                f"Constant {node.value} is not an element of {algebra.name}"
            )


def eval_term(algebra: FiniteAlgebra, t: Term, assignment: Sequence[int]) -> int:
    """
    Evaluate ``t`` at one assignment.

    Shared subterms are evaluated once, so provenance terms of free algebra elements
    cost time linear in their number of distinct nodes.

    :param algebra: the algebra interpreting the operation symbols.
    :param t: the term.
    :param assignment: the value of variable ``i`` at position ``i``.

    :returns: the value of the term operation.

    :raises TermError: if ``t`` does not fit the signature or the assignment is too
        short.
    """
    check_term(algebra, t)
    memo: dict[int, int] = {}

    def value(node: Term) -> int:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            if node.index >= len(assignment):
                raise TermError(
                    f"Assignment of length {len(assignment)} does not cover "
                    f"x{node.index}"
                )
            result = int(assignment[node.index])
            if not 0 <= result < algebra.size:
                raise TermError(
                    f"Assigned value {result} is not an element of {algebra.name}"
                )
        elif isinstance(node, Constant):
            result = node.value
        else:
            index = algebra.operation_index(node.symbol)
            assert index is not None
            args = tuple(value(c) for c in node.children)
            result = int(algebra.arrays[index][args])
        memo[id(node)] = result
        return result

    return value(t)


@lru_cache(maxsize=64)
def _grids(n: int, v: int) -> tuple[np.ndarray, ...]:
    grids = tuple(g.reshape(-1) for g in np.indices((n,) * v, dtype=np.intp))
    for g in grids:
        g.setflags(write=False)
    return grids


def term_table(algebra: FiniteAlgebra, t: Term, num_vars: int) -> np.ndarray:
    """
    Tabulate the term operation of ``t`` on A^num_vars.

    The result is a flat array of length ``n ** num_vars`` indexed row-major, like an
    operation table.

    :raises TermError: if ``t`` does not fit the signature or uses a variable
        ``>= num_vars``.
    """
    check_term(algebra, t)
    used = term_variables(t)
    if used and max(used) >= num_vars:
        raise TermError(f"Term uses x{max(used)} but only {num_vars} variables exist")
    n = algebra.size
    grids = _grids(n, num_vars)
    size = n**num_vars
    memo: dict[int, np.ndarray] = {}

    def table(node: Term) -> np.ndarray:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            result = grids[node.index]
        elif isinstance(node, Constant):
            result = np.full(size, node.value, dtype=np.intp)
        else:
            index = algebra.operation_index(node.symbol)
            assert index is not None
            arr = algebra.arrays[index]
            if node.children:
                result = arr[tuple(table(c) for c in node.children)]
            else:
                result = np.full(size, int(arr[()]), dtype=np.intp)
        memo[id(node)] = result
        return result

    return np.asarray(table(t), dtype=np.intp)


def substitute(t: Term, args: Sequence[Term]) -> Term:
    """Replace every variable ``x_i`` of ``t`` by ``args[i]``."""
    memo: dict[int, Term] = {}

    def rebuild(node: Term) -> Term:
        cached = memo.get(id(node))
        if cached is not None:
            return cached
        if isinstance(node, Variable):
            if node.index >= len(args):
                raise TermError(f"No term substituted for x{node.index}")
            result = args[node.index]
        elif isinstance(node, Constant):
            result = node
        else:
            result = Application(node.symbol, tuple(rebuild(c) for c in node.children))
        memo[id(node)] = result
        return result

    return rebuild(t)


def restriction_index(n: int, pattern: Sequence[int], num_vars: int) -> np.ndarray:
    """
    Positions in a table of ``len(pattern)`` variables read along a substitution.

    Entry ``a`` of the result, for an assignment ``a`` of ``num_vars`` variables, is the
    position of ``(a[pattern[0]], ..., a[pattern[-1]])``. Indexing the table of ``m``
    with the result of ``pattern=(0, 1, 1, 0)`` tabulates ``m(x, y, y, x)``.
    """
    grids = _grids(n, num_vars)
    k = len(pattern)
    index = np.zeros(n**num_vars, dtype=np.intp)
    for i, var in enumerate(pattern):
        index += grids[var] * (n ** (k - 1 - i))
    return index


def verify_identity(algebra: FiniteAlgebra, s: Term, t: Term, num_vars: int) -> bool:
    """Return whether ``s`` and ``t`` induce the same operation on A^num_vars."""
    return bool(
        np.array_equal(
            term_table(algebra, s, num_vars), term_table(algebra, t, num_vars)
        )
    )
