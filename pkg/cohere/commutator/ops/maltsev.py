# Python imports
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Optional

# 3rd party imports
import networkx as nx
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_FREE_ALGEBRA_CAP_3
from cohere.commutator.exceptions import AxiomViolationError, CapExceededError
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.config import ComputationConfig
from cohere.commutator.models.terms import (
    SearchOutcome,
    Term,
    TermChain,
    TermFamily,
    TermSearchResult,
    Variable,
)
from cohere.commutator.ops.algebra import (
    polynomial_closure,
    product_algebra,
    projection_rows,
)
from cohere.commutator.ops.closure import PowerClosure
from cohere.commutator.ops.congruence import permutes
from cohere.commutator.ops.lattice import con_all, lattice_properties
from cohere.commutator.ops.terms import restriction_index, substitute, term_table

logger = logging.getLogger(__name__)

X, Y, Z, U = (Variable(i) for i in range(4))


@dataclass
class FreeAlgebra:
    """
    The free algebra on ``arity`` generators of the variety generated by A.

    Elements are the k-ary term operations of A, tabulated as rows of length ``n ** k``
    in a closure inside A^(n^k); the generators are the projections. Element ``i``
    evaluates, pointwise on the projections, to its provenance term ``term(i)``.
    """

    algebra: FiniteAlgebra
    arity: int
    closure: PowerClosure

    def __len__(self) -> int:  # noqa: D105
        return len(self.closure)

    @property
    def tables(self) -> np.ndarray:
        """The term operations generated so far, one table per row."""
        return self.closure.rows

    @property
    def complete(self) -> bool:  # noqa: D102
        return self.closure.complete

    @property
    def incomplete(self) -> bool:  # noqa: D102
        return self.closure.incomplete

    def projection(self, i: int) -> int:
        """Position of the projection onto variable ``i``."""
        n = self.algebra.size
        index = self.closure.index_of(projection_rows(n, self.arity)[i])
        assert index is not None
        return index

    def term(self, i: int) -> Term:
        """The provenance term of element ``i``."""
        return self.closure.term(i, tuple(Variable(j) for j in range(self.arity)))


def free_algebra(
    algebra: FiniteAlgebra,
    k: int,
    cap: int = DEFAULT_FREE_ALGEBRA_CAP_3,
    *,
    run: bool = True,
) -> FreeAlgebra:
    """
    Generate the free algebra of V(A) on ``k`` generators.

    :param run: close completely (up to the cap) now; otherwise the closure advances
        as its batches are consumed.
    """
    if k < 1:
        raise ValueError(f"A free algebra needs at least one generator, got {k}")
    n = algebra.size
    closure = PowerClosure(algebra, n**k, projection_rows(n, k), cap)
    free = FreeAlgebra(algebra=algebra, arity=k, closure=closure)
    if run:
        closure.run()
        logger.debug(f"F({k}) of V({algebra.name}) has {len(free)} elements")
    return free


@dataclass(frozen=True)
class _ChainShape:
    """
    The identities of a chain family as substitution patterns.

    Every chain member ``t`` satisfies ``t[node] = x``; consecutive members at position
    ``i`` agree on the pattern ``steps[i % 2]``; the chain ends at the projection onto
    ``goal``.
    """

    family: TermFamily
    letter: str
    num_vars: int
    node: tuple[int, ...]
    steps: tuple[tuple[int, ...], tuple[int, ...]]
    goal: int


_SHAPES = {
    TermFamily.Jonsson: _ChainShape(
        TermFamily.Jonsson, "d", 3, (0, 1, 0), ((0, 0, 2), (0, 2, 2)), 2
    ),
    TermFamily.Day: _ChainShape(
        TermFamily.Day, "m", 4, (0, 1, 1, 0), ((0, 0, 3, 3), (0, 1, 1, 3)), 3
    ),
    TermFamily.Gumm: _ChainShape(
        TermFamily.Gumm, "q", 3, (0, 1, 0), ((0, 0, 2), (0, 2, 2)), 2
    ),
}

_MALTSEV_LAWS = (((0, 0, 2), 2), ((0, 2, 2), 0))
_PATTERN_NAMES = {
    (0, 1, 0): "(x,y,x)",
    (0, 0, 2): "(x,x,z)",
    (0, 2, 2): "(x,z,z)",
    (0, 1, 1, 0): "(x,y,y,x)",
    (0, 0, 3, 3): "(x,x,u,u)",
    (0, 1, 1, 3): "(x,y,y,u)",
}
_VARIABLE_NAMES = "xyzu"


def chain_violations(algebra: FiniteAlgebra, chain: TermChain) -> list[str]:
    """
    Check every defining identity of a term chain pointwise on A.

    :returns: the violated identities, empty when the chain is valid.
    """
    n = algebra.size
    family = chain.family
    v = family.arity
    grids = projection_rows(n, v)

    def restricted(table: np.ndarray, pattern: tuple[int, ...]) -> np.ndarray:
        return table[restriction_index(n, pattern, v)]

    def agree(a: np.ndarray, b: np.ndarray) -> bool:
        return bool(np.array_equal(a, b))

    tables = [term_table(algebra, t, v) for t in chain.terms]
    failures: list[str] = []
    if family is TermFamily.Maltsev:
        if len(tables) != 1:
            return [f"a Mal'tsev chain holds one term, got {len(tables)}"]
        for pattern, var in _MALTSEV_LAWS:
            if not agree(restricted(tables[0], pattern), grids[var]):
                failures.append(f"p{_PATTERN_NAMES[pattern]} = {_VARIABLE_NAMES[var]}")
        return failures

    shape = _SHAPES[family]
    letter = shape.letter
    if not tables:
        return [f"the {family.value} chain is empty"]
    if family is TermFamily.Gumm:
        if chain.p is None:
            return ["a Gumm chain needs its term p"]
        p = term_table(algebra, chain.p, v)
        if not agree(restricted(p, (0, 2, 2)), grids[0]):
            failures.append("p(x,z,z) = x")
        if not agree(restricted(p, (0, 0, 2)), restricted(tables[0], (0, 0, 2))):
            failures.append("p(x,x,z) = q_1(x,x,z)")
        offset = 1
    else:
        if not agree(tables[0], grids[0]):
            failures.append(f"{letter}_0 = x")
        offset = 0

    last = len(tables) - 1 + offset
    if not agree(tables[-1], grids[shape.goal]):
        failures.append(f"{letter}_{last} = {_VARIABLE_NAMES[shape.goal]}")
    node_name = _PATTERN_NAMES[shape.node]
    for i, table in enumerate(tables, start=offset):
        if not agree(restricted(table, shape.node), grids[0]):
            failures.append(f"{letter}_{i}{node_name} = x")
    for i in range(len(tables) - 1):
        position = i + offset
        pattern = shape.steps[position % 2]
        left = restricted(tables[i], pattern)
        if not agree(left, restricted(tables[i + 1], pattern)):
            name = _PATTERN_NAMES[pattern]
            failures.append(
                f"{letter}_{position}{name} = {letter}_{position + 1}{name}"
            )
    return failures


def verify_chain(algebra: FiniteAlgebra, chain: TermChain) -> bool:
    """Return whether ``chain`` satisfies the full identity set of its family on A."""
    return not chain_violations(algebra, chain)


def day_terms_from_maltsev(p: Term) -> TermChain:
    """The Day chain ``x, p(y, z, u), u`` of a Mal'tsev term."""
    return TermChain(TermFamily.Day, (X, substitute(p, (Y, Z, U)), U))


def maltsev_from_day(chain: TermChain) -> Term:
    """
    The Mal'tsev term ``m_1(x, x, y, z)`` of a Day chain of length 2.

    :raises ValueError: if the chain is not a Day chain of length 2.
    """
    if chain.family is not TermFamily.Day or chain.length != 2:
        raise ValueError("a Mal'tsev term is only read off a Day chain of length 2")
    return substitute(chain.terms[1], (X, X, Y, Z))


def gumm_terms_from_maltsev(p: Term) -> TermChain:
    """Gumm terms ``p`` and ``q_1 = z`` of a Mal'tsev term."""
    return TermChain(TermFamily.Gumm, (Z,), p=p)


def gumm_terms_from_jonsson(chain: TermChain) -> TermChain:
    """Gumm terms ``p = x`` and ``q_i = d_i`` of Jónsson terms ``d_0, ..., d_n``."""
    if chain.family is not TermFamily.Jonsson or len(chain.terms) < 2:
        raise ValueError("Gumm terms come from a Jónsson chain with at least 2 terms")
    return TermChain(TermFamily.Gumm, chain.terms[1:], p=X)


def day_terms_from_gumm(chain: TermChain) -> TermChain:
    """
    Day terms built from Gumm terms ``p, q_1, ..., q_n``.

    The chain is ``x, x, p(x, y, z)`` followed, for each ``q_j``, by ``q_j(x, y, u)``
    and ``q_j(x, z, u)``, in that order for odd ``j`` and swapped for even ``j``. It is
    cut at position ``2n + 1``, which is ``u``.
    """
    if chain.family is not TermFamily.Gumm or chain.p is None or not chain.terms:
        raise ValueError("Day terms are built from a Gumm chain with its term p")
    terms: list[Term] = [X, X, chain.p]
    for j, q in enumerate(chain.terms, start=1):
        with_y = substitute(q, (X, Y, U))
        with_z = substitute(q, (X, Z, U))
        terms.extend([with_y, with_z] if j % 2 else [with_z, with_y])
    n = len(chain.terms)
    return TermChain(TermFamily.Day, tuple(terms[: 2 * n + 1]) + (U,))


def _maltsev_row(closure: PowerClosure, n: int) -> Optional[int]:
    """Scan a closure of ternary operations for a Mal'tsev operation, batch by batch."""
    grids = projection_rows(n, 3)
    laws = [
        (restriction_index(n, pattern, 3), grids[var]) for pattern, var in _MALTSEV_LAWS
    ]
    for lo, hi in closure.batches():
        block = closure.rows[lo:hi]
        hits = np.ones(hi - lo, dtype=bool)
        for index, expected in laws:
            hits &= np.all(block[:, index] == expected, axis=1)
        found = np.nonzero(hits)[0]
        if len(found):
            return lo + int(found[0])
    return None


def _search_chain(
    free: FreeAlgebra, shape: _ChainShape
) -> Optional[tuple[Optional[int], list[int]]]:
    """
    Breadth-first search for a chain among the elements of a free algebra.

    States are ``(element, parity)``; two states are linked through a bucket node keyed
    by the restriction the step identity compares, so the graph stays linear in the
    number of elements. Gumm chains start from a source linked to every ``q_1`` whose
    ``(x,x,z)`` restriction is that of some ``p`` with ``p(x,z,z) = x``.

    The free algebra is closed before the path is taken, so the chain is a shortest one
    in the whole free algebra, or among the generated elements when the cap stops the
    closure.

    :returns: the position of ``p`` (Gumm only) and the chain elements, or ``None``.
    """
    n = free.algebra.size
    v = shape.num_vars
    grids = projection_rows(n, v)
    node_index = restriction_index(n, shape.node, v)
    step_index = [restriction_index(n, pattern, v) for pattern in shape.steps]
    gumm = shape.family is TermFamily.Gumm
    g1_index = restriction_index(n, (0, 2, 2), v)

    graph: Any = nx.DiGraph()
    source, goal = ("source",), ("goal",)
    graph.add_node(source)
    if not gumm:
        graph.add_edge(source, ("e", free.projection(0), 0))
    target = free.projection(shape.goal)
    for parity in (0, 1):
        graph.add_edge(("e", target, parity), goal)
    first_p: dict[bytes, int] = {}

    def extract() -> Optional[tuple[Optional[int], list[int]]]:
        if not nx.has_path(graph, source, goal):
            return None
        path = nx.shortest_path(graph, source, goal)
        elements = [node[1] for node in path if node[0] == "e"]
        p = first_p[path[1][1]] if gumm else None
        return p, elements

    for lo, hi in free.closure.batches():
        block = free.tables[lo:hi]
        keys = [np.ascontiguousarray(block[:, index]) for index in step_index]
        if gumm:
            for offset in np.nonzero(np.all(block[:, g1_index] == grids[0], axis=1))[0]:
                key = keys[0][offset].tobytes()
                if key not in first_p:
                    first_p[key] = lo + int(offset)
                    graph.add_edge(source, ("s", key))
        for offset in np.nonzero(np.all(block[:, node_index] == grids[0], axis=1))[0]:
            element = lo + int(offset)
            for parity in (0, 1):
                key = keys[parity][offset].tobytes()
                graph.add_edge(("e", element, parity), ("b", parity, key))
                graph.add_edge(("b", parity, key), ("e", element, 1 - parity))
            if gumm:
                graph.add_edge(("s", keys[0][offset].tobytes()), ("e", element, 1))
    return extract()


def _chain_terms(
    free: FreeAlgebra, shape: _ChainShape, elements: Sequence[int]
) -> tuple[Term, ...]:
    terms = [free.term(e) for e in elements]
    goal = Variable(shape.goal)
    if shape.family is TermFamily.Gumm:
        terms[-1] = goal
    elif len(terms) == 1:
        # a singleton algebra, where every projection is the same element
        terms = [X, goal]
    else:
        terms[0], terms[-1] = X, goal
    return tuple(terms)


def _con_obstruction(
    algebra: FiniteAlgebra, family: TermFamily, cap: int
) -> Optional[str]:
    """A property of Con(A) that rules ``family`` out for V(A), if there is one."""
    try:
        lattice = con_all(algebra, cap)
    except CapExceededError:
        return None
    if family is TermFamily.Maltsev:
        for i, p in enumerate(lattice.partitions):
            for q in lattice.partitions[i + 1 :]:
                if not permutes(algebra, p, q)[0]:
                    return (
                        f"{p.to_text()} and {q.to_text()} in "
                        f"Con({algebra.name}) do not permute"
                    )
        return None
    properties = lattice_properties(lattice)
    if family is TermFamily.Jonsson and not properties.distributive:
        return f"Con({algebra.name}) is not distributive"
    if family in (TermFamily.Day, TermFamily.Gumm) and not properties.modular:
        return f"Con({algebra.name}) is not modular"
    return None


def _found(
    algebra: FiniteAlgebra,
    chain: TermChain,
    how: str,
    elements: int = 0,
    notes: Optional[list[str]] = None,
) -> TermSearchResult:
    failures = chain_violations(algebra, chain)
    if failures:
        raise AxiomViolationError(
            f"{chain.family.value} chain for {algebra.name} fails {', '.join(failures)}"
        )
    logger.info(
        f"{chain.family.value} terms for {algebra.name} found ({how}), "
        f"length {chain.length}"
    )
    return TermSearchResult(
        family=chain.family,
        outcome=SearchOutcome.Found,
        chain=chain,
        reason=how,
        elements_generated=elements,
        notes=notes or [],
    )


def _none(
    algebra: FiniteAlgebra, family: TermFamily, reason: str, elements: int = 0
) -> TermSearchResult:
    logger.info(f"{algebra.name} has no {family.value} terms: {reason}")
    return TermSearchResult(
        family=family,
        outcome=SearchOutcome.NoTerms,
        reason=reason,
        elements_generated=elements,
    )


def _exhausted(
    algebra: FiniteAlgebra,
    family: TermFamily,
    free: FreeAlgebra,
    config: ComputationConfig,
) -> TermSearchResult:
    """Outcome of a search that went through its free algebra without a witness."""
    if free.complete:
        return _none(
            algebra,
            family,
            f"none of the {len(free)} elements of the free algebra on {free.arity} "
            "generators qualifies",
            len(free),
        )
    if algebra.size**2 <= config.square_obstruction_limit:
        square, _, _ = product_algebra(algebra, algebra)
        reason = _con_obstruction(square, family, config.congruence_cap)
        if reason is not None:
            return _none(algebra, family, reason, len(free))
    logger.warning(
        f"{family.value} search for {algebra.name} is undecided: the free algebra "
        f"reached its cap of {free.closure.cap}"
    )
    return TermSearchResult(
        family=family,
        outcome=SearchOutcome.Undecided,
        reason=f"free algebra cap of {free.closure.cap} reached",
        elements_generated=len(free),
    )


def _resolve(
    config: Optional[ComputationConfig], cap: Optional[int], k: int
) -> tuple[ComputationConfig, int]:
    config = config or ComputationConfig()
    return config, cap if cap is not None else config.free_algebra_cap(k)


def _maltsev_search(
    algebra: FiniteAlgebra, cap: int
) -> tuple[Optional[TermChain], FreeAlgebra]:
    free = free_algebra(algebra, 3, cap, run=False)
    hit = _maltsev_row(free.closure, algebra.size)
    if hit is None:
        return None, free
    return TermChain(TermFamily.Maltsev, (free.term(hit),)), free


def _chain_search(
    algebra: FiniteAlgebra, family: TermFamily, cap: int
) -> tuple[Optional[TermChain], FreeAlgebra]:
    shape = _SHAPES[family]
    free = free_algebra(algebra, shape.num_vars, cap, run=False)
    hit = _search_chain(free, shape)
    if hit is None:
        return None, free
    p_index, elements = hit
    p = free.term(p_index) if p_index is not None else None
    return TermChain(family, _chain_terms(free, shape, elements), p=p), free


def find_maltsev_term(
    algebra: FiniteAlgebra,
    cap: Optional[int] = None,
    *,
    config: Optional[ComputationConfig] = None,
) -> TermSearchResult:
    """
    Search for a Mal'tsev term, ``p(x,x,z) = z`` and ``p(x,z,z) = x``.

    The answer is ``none`` when Con(A) has two congruences that do not permute, or when
    the free algebra on three generators is exhausted without a witness.

    :param cap: the free algebra cap; defaults to the configured three-generator cap.
    """
    config, cap = _resolve(config, cap, 3)
    family = TermFamily.Maltsev
    reason = _con_obstruction(algebra, family, config.congruence_cap)
    if reason is not None:
        return _none(algebra, family, reason)
    chain, free = _maltsev_search(algebra, cap)
    if chain is not None:
        return _found(algebra, chain, "free algebra search", len(free))
    return _exhausted(algebra, family, free, config)


def find_maltsev_polynomial(
    algebra: FiniteAlgebra, cap: int = DEFAULT_FREE_ALGEBRA_CAP_3
) -> TermSearchResult:
    """
    Search the ternary polynomial operations of A for a Mal'tsev operation.

    The polynomial may contain constant leaves ``@a``.
    """
    clone = polynomial_closure(algebra, 3, cap, run=False)
    hit = _maltsev_row(clone.closure, algebra.size)
    family = TermFamily.Maltsev
    if hit is not None:
        chain = TermChain(family, (clone.term(hit),))
        return _found(algebra, chain, "polynomial clone search", len(clone))
    if clone.incomplete:
        return TermSearchResult(
            family=family,
            outcome=SearchOutcome.Undecided,
            reason=f"polynomial clone cap of {cap} reached",
            elements_generated=len(clone),
        )
    return _none(
        algebra,
        family,
        f"none of the {len(clone)} ternary polynomials is a Mal'tsev operation",
        len(clone),
    )


def find_jonsson_terms(
    algebra: FiniteAlgebra,
    cap: Optional[int] = None,
    *,
    config: Optional[ComputationConfig] = None,
) -> TermSearchResult:
    """Search for Jónsson terms ``d_0 = x, d_1, ..., d_n = z``, shortest first."""
    config, cap = _resolve(config, cap, 3)
    family = TermFamily.Jonsson
    reason = _con_obstruction(algebra, family, config.congruence_cap)
    if reason is not None:
        return _none(algebra, family, reason)
    chain, free = _chain_search(algebra, family, cap)
    if chain is not None:
        return _found(algebra, chain, "free algebra search", len(free))
    return _exhausted(algebra, family, free, config)


def _gumm_search(
    algebra: FiniteAlgebra, cap: int, config: ComputationConfig
) -> TermSearchResult:
    family = TermFamily.Gumm
    maltsev, _ = _maltsev_search(algebra, cap)
    if maltsev is not None:
        chain = gumm_terms_from_maltsev(maltsev.terms[0])
        return _found(algebra, chain, "built from a Mal'tsev term")
    jonsson, _ = _chain_search(algebra, TermFamily.Jonsson, cap)
    if jonsson is not None:
        chain = gumm_terms_from_jonsson(jonsson)
        return _found(algebra, chain, "built from Jónsson terms")
    chain, free = _chain_search(algebra, family, cap)
    if chain is not None:
        return _found(algebra, chain, "free algebra search", len(free))
    return _exhausted(algebra, family, free, config)


def find_gumm_terms(
    algebra: FiniteAlgebra,
    cap: Optional[int] = None,
    *,
    config: Optional[ComputationConfig] = None,
) -> TermSearchResult:
    """
    Search for Gumm terms ``p, q_1, ..., q_n``.

    A Mal'tsev term or Jónsson terms give Gumm terms directly and are tried first; the
    direct search runs only when neither exists among the generated elements.
    """
    config, cap = _resolve(config, cap, 3)
    reason = _con_obstruction(algebra, TermFamily.Gumm, config.congruence_cap)
    if reason is not None:
        return _none(algebra, TermFamily.Gumm, reason)
    return _gumm_search(algebra, cap, config)


def find_day_terms(
    algebra: FiniteAlgebra,
    cap: Optional[int] = None,
    *,
    config: Optional[ComputationConfig] = None,
) -> TermSearchResult:
    """
    Search for Day terms ``m_0 = x, m_1, ..., m_n = u``.

    Day terms are built from a Mal'tsev term when there is one, and from Gumm terms
    otherwise. Gumm terms exist exactly when Day terms do, so the four-generator free
    algebra is only searched when the Gumm search is undecided.

    :param cap: the four-generator free algebra cap.
    """
    config, cap = _resolve(config, cap, 4)
    family = TermFamily.Day
    reason = _con_obstruction(algebra, family, config.congruence_cap)
    if reason is not None:
        return _none(algebra, family, reason)

    cap3 = config.free_algebra_cap_3
    maltsev, _ = _maltsev_search(algebra, cap3)
    if maltsev is not None:
        chain = day_terms_from_maltsev(maltsev.terms[0])
        return _found(algebra, chain, "built from a Mal'tsev term")
    gumm = _gumm_search(algebra, cap3, config)
    if gumm.chain is not None:
        return _found(
            algebra,
            day_terms_from_gumm(gumm.chain),
            f"built from Gumm terms ({gumm.reason})",
            notes=gumm.chain.to_text(),
        )
    if gumm.outcome == SearchOutcome.NoTerms:
        return _none(algebra, family, f"no Gumm terms: {gumm.reason}")

    chain, free = _chain_search(algebra, family, cap)
    if chain is not None:
        return _found(algebra, chain, "free algebra search", len(free))
    return _exhausted(algebra, family, free, config)


def find_terms(
    algebra: FiniteAlgebra,
    family: TermFamily,
    config: Optional[ComputationConfig] = None,
) -> TermSearchResult:
    """Dispatch to the search for ``family``."""
    search = {
        TermFamily.Maltsev: find_maltsev_term,
        TermFamily.Jonsson: find_jonsson_terms,
        TermFamily.Day: find_day_terms,
        TermFamily.Gumm: find_gumm_terms,
    }[family]
    return search(algebra, config=config)
