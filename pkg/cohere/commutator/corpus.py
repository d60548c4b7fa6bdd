# Python imports
import itertools
import logging
from collections.abc import Iterable, Sequence
from typing import Callable

# 3rd party imports
import networkx as nx
import numpy as np

# Local imports
from cohere.commutator.exceptions import AlgebraValidationError, UnknownBuiltinError
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.ops.algebra import make_algebra

logger = logging.getLogger(__name__)

Permutation = tuple[int, ...]


def cyclic_group(n: int, name: str = "") -> FiniteAlgebra:
    """The additive group Z_n with ``+``, ``-`` and ``0``."""
    e = np.arange(n)
    return make_algebra(
        name or f"Z{n}",
        n,
        [
            ("+", 2, ((e[:, None] + e[None, :]) % n).reshape(-1)),
            ("-", 1, (-e) % n),
            ("0", 0, [0]),
        ],
    )


def klein_group(name: str = "V4") -> FiniteAlgebra:
    """The Klein four-group Z2 x Z2, written additively; ``(a, b)`` is ``2a + b``."""
    e = np.arange(4)
    return make_algebra(
        name,
        4,
        [("+", 2, (e[:, None] ^ e[None, :]).reshape(-1)), ("-", 1, e), ("0", 0, [0])],
    )


def permutation_group(name: str, generators: Sequence[Permutation]) -> FiniteAlgebra:
    """
    The permutation group generated by ``generators`` with ``*``, ``inv`` and ``e``.

    Elements are numbered in lexicographic order of their images, so the identity is
    element 0. ``(p * q)(i) = p(q(i))``.
    """
    if not generators:
        raise AlgebraValidationError(f"{name} needs at least one generator")
    degree = len(generators[0])
    identity = tuple(range(degree))
    found = {identity}
    frontier = [identity]
    while frontier:
        fresh: list[Permutation] = []
        for p in frontier:
            for g in generators:
                q = tuple(p[g[i]] for i in range(degree))
                if q not in found:
                    found.add(q)
                    fresh.append(q)
        frontier = fresh
    elements = sorted(found)
    index = {p: i for i, p in enumerate(elements)}
    n = len(elements)
    product = [
        index[tuple(p[q[i]] for i in range(degree))] for p in elements for q in elements
    ]
    inverse = []
    for p in elements:
        inv = [0] * degree
        for i, image in enumerate(p):
            inv[image] = i
        inverse.append(index[tuple(inv)])
    return make_algebra(
        name, n, [("*", 2, product), ("inv", 1, inverse), ("e", 0, [0])]
    )


def zero_ring(n: int, name: str = "") -> FiniteAlgebra:
    """Z_n with the zero multiplication: ``+``, ``-``, ``0`` and ``*``."""
    group = cyclic_group(n)
    return make_algebra(
        name or f"zeroring{n}",
        n,
        [(op.symbol, op.arity, op.table) for op in group.operations]
        + [("*", 2, [0] * (n * n))],
    )


def lattice_from_covers(
    name: str, n: int, covers: Iterable[tuple[int, int]]
) -> FiniteAlgebra:
    """
    The lattice with ``^`` and ``v`` whose order is generated by ``covers``.

    :param covers: pairs ``(a, b)`` with ``a < b``.

    :raises AlgebraValidationError: if the order is not a lattice order.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(covers)
    if not nx.is_directed_acyclic_graph(graph):
        raise AlgebraValidationError(f"the covers of {name} contain a cycle")
    closure = nx.transitive_closure_dag(graph)
    leq = np.eye(n, dtype=bool)
    for a, b in closure.edges:
        leq[a, b] = True

    def bound(a: int, b: int, below: bool) -> int:
        order = leq if below else leq.T
        common = np.nonzero(order[:, a] & order[:, b])[0]
        best = [c for c in common if all(order[d, c] for d in common)]
        if len(best) != 1:
            kind = "meet" if below else "join"
            raise AlgebraValidationError(f"{a} and {b} have no {kind} in {name}")
        return int(best[0])

    pairs = list(itertools.product(range(n), repeat=2))
    return make_algebra(
        name,
        n,
        [
            ("^", 2, [bound(a, b, True) for a, b in pairs]),
            ("v", 2, [bound(a, b, False) for a, b in pairs]),
        ],
    )


def bare_set(n: int, name: str = "") -> FiniteAlgebra:
    """An ``n``-element set with no operations."""
    return make_algebra(name or f"set{n}", n, [])


_BUILTINS: dict[str, Callable[[], FiniteAlgebra]] = {
    "trivial": lambda: bare_set(1, "trivial"),
    "set2": lambda: bare_set(2),
    "set4": lambda: bare_set(4),
    "semilattice2": lambda: make_algebra("semilattice2", 2, [("^", 2, [0, 0, 0, 1])]),
    "lattice2": lambda: lattice_from_covers("lattice2", 2, [(0, 1)]),
    "chain3": lambda: lattice_from_covers("chain3", 3, [(0, 1), (1, 2)]),
    "M3lat": lambda: lattice_from_covers(
        "M3lat", 5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]
    ),
    "N5lat": lambda: lattice_from_covers(
        "N5lat", 5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]
    ),
    "Z2": lambda: cyclic_group(2),
    "Z4": lambda: cyclic_group(4),
    "V4": klein_group,
    "S3": lambda: permutation_group("S3", [(1, 0, 2), (1, 2, 0)]),
    "D4": lambda: permutation_group("D4", [(1, 2, 3, 0), (0, 3, 2, 1)]),
    "zeroring2": lambda: zero_ring(2),
    "zeroring4": lambda: zero_ring(4),
}


def builtin_names() -> list[str]:
    """The names of the builtin algebras."""
    return list(_BUILTINS)


def builtin(name: str) -> FiniteAlgebra:
    """
    Build a builtin algebra.

    :raises UnknownBuiltinError: if ``name`` is not in the corpus.
    """
    factory = _BUILTINS.get(name)
    if factory is None:
        raise UnknownBuiltinError(
            f"unknown builtin {name!r}; known: {', '.join(_BUILTINS)}"
        )
    logger.debug(f"Building builtin algebra {name}")
    return factory()
