# Python imports
import logging
from collections import deque
from collections.abc import Iterable, Sequence
from typing import Optional

# 3rd party imports
import networkx as nx
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_CLOSURE_CAP
from cohere.commutator.exceptions import (
    CapExceededError,
    NotACongruenceError,
    NotRelatedError,
    PremiseViolationError,
)
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.partitions import (
    ChainStep,
    Justification,
    MergeRecord,
    Partition,
    WitnessLog,
)
from cohere.commutator.models.terms import Application, Constant, Term, Variable
from cohere.commutator.ops.algebra import (
    check_surjective_homomorphism,
    quotient_algebra,
)
from cohere.commutator.ops.closure import PowerClosure

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


def _check_pairs(n: int, pairs: Iterable[Pair]) -> list[Pair]:
    checked: list[Pair] = []
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise ValueError(f"Pair ({a}, {b}) is not a pair of elements of a {n}-set")
        checked.append((int(a), int(b)))
    return checked


def _generate(
    algebra: FiniteAlgebra,
    pairs: Iterable[Pair],
    start: Optional[Partition] = None,
) -> tuple[np.ndarray, list[MergeRecord]]:
    """
    Close ``start`` joined with ``pairs`` under elementary translations.

    Block labels are kept equal to the least element of each block, so the label
    array is already in canonical form when the queue runs dry.
    """
    n = algebra.size
    labels = (
        np.arange(n, dtype=np.intp) if start is None else start.array.astype(np.intp)
    )
    records: list[MergeRecord] = []
    queue: deque[tuple[int, int, int]] = deque()
    merged_blocks = n - len(set(labels.tolist()))

    def merge(a: int, b: int, record: MergeRecord) -> None:
        nonlocal merged_blocks
        la, lb = int(labels[a]), int(labels[b])
        low, high = min(la, lb), max(la, lb)
        labels[labels == high] = low
        merged_blocks += 1
        records.append(record)
        queue.append((a, b, len(records) - 1))

    for a, b in _check_pairs(n, pairs):
        if labels[a] != labels[b]:
            merge(a, b, MergeRecord(pair=(a, b), justification=Justification.Generator))

    translations = [
        (op.symbol, arr, slot, (n,) * (op.arity - 1))
        for op, arr in zip(algebra.operations, algebra.arrays)
        for slot in range(op.arity)
    ]
    while queue and merged_blocks < n - 1:
        u, v, source = queue.popleft()
        for symbol, arr, slot, shape in translations:
            images_u = np.take(arr, u, axis=slot).reshape(-1)
            images_v = np.take(arr, v, axis=slot).reshape(-1)
            for c in np.nonzero(labels[images_u] != labels[images_v])[0].tolist():
                x, y = int(images_u[c]), int(images_v[c])
                if labels[x] == labels[y]:
                    continue
                constants = tuple(int(i) for i in np.unravel_index(c, shape))
                merge(
                    x,
                    y,
                    MergeRecord(
                        pair=(x, y),
                        justification=Justification.Translation,
                        symbol=symbol,
                        slot=slot,
                        constants=constants,
                        source=source,
                    ),
                )
    return labels, records


def cg_with_witnesses(
    algebra: FiniteAlgebra, pairs: Iterable[Pair]
) -> tuple[Partition, WitnessLog]:
    """
    Generate the least congruence containing ``pairs`` and log every merge.

    :param algebra: the algebra.
    :param pairs: the generating pairs.

    :returns: the congruence and the log that replays it from 0_A.
    """
    labels, records = _generate(algebra, pairs)
    return Partition(tuple(labels.tolist())), WitnessLog(
        size=algebra.size, records=records
    )


def cg(
    algebra: FiniteAlgebra,
    pairs: Iterable[Pair],
    start: Optional[Partition] = None,
) -> Partition:
    """
    Generate the least congruence containing ``pairs`` (and ``start``, if given).

    ``start`` must itself be a congruence of ``algebra``.
    """
    labels, _ = _generate(algebra, pairs, start)
    return Partition(tuple(labels.tolist()))


def _record_polynomials(
    records: Sequence[MergeRecord],
) -> list[tuple[Term, Pair]]:
    """For each record, a unary polynomial mapping a generator pair onto its pair."""
    result: list[tuple[Term, Pair]] = []
    for record in records:
        if record.justification == Justification.Generator or record.source is None:
            result.append((Variable(0), record.pair))
            continue
        inner, generator = result[record.source]
        children: list[Term] = [Constant(c) for c in record.constants]
        children.insert(record.slot or 0, inner)
        result.append((Application(record.symbol or "", tuple(children)), generator))
    return result


def maltsev_chain(
    algebra: FiniteAlgebra, log: WitnessLog, a: int, b: int
) -> list[ChainStep]:
    """
    Extract a chain of unary polynomials witnessing that ``a`` and ``b`` are related.

    The chain follows the path from ``a`` to ``b`` in the merge forest of ``log``;
    each step maps a generator pair, in some orientation, onto consecutive elements of
    the path.

    :raises NotRelatedError: if ``a`` and ``b`` are in different blocks.
    :raises ValueError: if ``a`` or ``b`` is not an element of A.
    """
    if not (0 <= a < algebra.size and 0 <= b < algebra.size):
        raise ValueError(f"{a} and {b} must be elements of {algebra.name}")
    partition = log.replay()
    if not partition.related(a, b):
        raise NotRelatedError(f"{a} and {b} are not related by {partition.to_text()}")
    if a == b:
        return []

    forest = nx.Graph()
    forest.add_nodes_from(range(algebra.size))
    for index, record in enumerate(log.records):
        forest.add_edge(*record.pair, record=index)
    path: list[int] = nx.shortest_path(forest, a, b)  # type: ignore

    polynomials = _record_polynomials(log.records)
    steps: list[ChainStep] = []
    for start, end in zip(path, path[1:]):
        index = forest.edges[start, end]["record"]
        polynomial, generator = polynomials[index]
        steps.append(
            ChainStep(
                polynomial=polynomial,
                generator=generator,
                forward=log.records[index].pair[0] == start,
                start=start,
                end=end,
            )
        )
    return steps


def meet(p: Partition, q: Partition) -> Partition:
    """Blockwise intersection."""
    n = p.size
    return Partition.from_labels((p.array * n + q.array).tolist())


def join(p: Partition, q: Partition) -> Partition:
    """Transitive closure of the union."""
    parent = list(range(p.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for relation in (p, q):
        for element, block in enumerate(relation.ids):
            ra, rb = find(element), find(block)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return Partition.from_labels([find(x) for x in range(p.size)])


def meet_join(
    algebra: FiniteAlgebra, p: Partition, q: Partition
) -> tuple[Partition, Partition]:
    """Return ``(p ^ q, p v q)`` in Con(A)."""
    if p.size != algebra.size or q.size != algebra.size:
        raise ValueError(
            f"Partitions must be on the {algebra.size} elements of {algebra.name}"
        )
    return meet(p, q), join(p, q)


def compose(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Relational product of two boolean relation matrices."""
    return (p.astype(np.int64) @ q.astype(np.int64)) > 0


def permutes(
    algebra: FiniteAlgebra, p: Partition, q: Partition
) -> tuple[bool, Optional[Pair]]:
    """
    Decide whether ``p o q == q o p``.

    :returns: the answer and, on failure, the lexicographically first pair in one
        product but not the other.
    """
    pq = compose(p.matrix(), q.matrix())
    qp = compose(q.matrix(), p.matrix())
    diff = np.argwhere(pq != qp)
    if len(diff) == 0:
        return True, None
    a, b = diff[0]
    return False, (int(a), int(b))


def is_congruence(algebra: FiniteAlgebra, p: Partition) -> bool:
    """Return whether ``p`` is compatible with every operation of A."""
    try:
        quotient_algebra(algebra, p)
    except NotACongruenceError:
        return False
    return True


def kernel(f: Sequence[int]) -> Partition:
    """The kernel ``{(x, y) : f(x) = f(y)}`` of an element map."""
    return Partition.from_labels(list(f))


def restrict(p: Partition, embedding: Sequence[int]) -> Partition:
    """Restrict ``p`` to a subuniverse given by its (renumbering) embedding."""
    return Partition.from_labels([p.ids[e] for e in embedding])


def product_congruence(p: Partition, q: Partition) -> Partition:
    """``p x q`` on A x B, where ``(a, b)`` is the element ``a * |B| + b``."""
    nb = q.size
    return Partition.from_labels(
        [p.ids[i // nb] * nb + q.ids[i % nb] for i in range(p.size * nb)]
    )


def transport_forward(
    a: FiniteAlgebra, b: FiniteAlgebra, f: Sequence[int], theta: Partition
) -> Partition:
    """
    The image ``f(theta)``: the congruence of B generated by ``f x f`` of theta.

    :raises NotAHomomorphismError: if ``f`` is not a surjective homomorphism.
    """
    check_surjective_homomorphism(a, b, f)
    pairs = [(f[theta.ids[x]], f[x]) for x in range(a.size) if theta.ids[x] != x]
    return cg(b, pairs)


def transport_backward(
    a: FiniteAlgebra, b: FiniteAlgebra, f: Sequence[int], theta: Partition
) -> Partition:
    """
    The preimage ``f^-1(theta) = {(x, y) : f(x) theta f(y)}``.

    :raises NotAHomomorphismError: if ``f`` is not a surjective homomorphism.
    """
    check_surjective_homomorphism(a, b, f)
    return Partition.from_labels([theta.ids[f[x]] for x in range(a.size)])


def compatible_relation_closure(
    algebra: FiniteAlgebra,
    pairs: Iterable[Pair],
    cap: int = DEFAULT_CLOSURE_CAP,
) -> np.ndarray:
    """
    The reflexive compatible relation generated by ``pairs``.

    That is the subalgebra of A^2 generated by the diagonal and ``pairs``; no witness
    log is kept.

    :returns: the relation as an ``n x n`` boolean matrix.
    """
    n = algebra.size
    generators = [(x, x) for x in range(n)] + _check_pairs(n, pairs)
    closure = PowerClosure(algebra, 2, generators, cap).run()
    if closure.incomplete:
        raise CapExceededError(
            f"compatible relation closure in {algebra.name}^2 exceeded {cap}", cap
        )
    relation = np.zeros((n, n), dtype=bool)
    rows = closure.rows.astype(np.intp)
    relation[rows[:, 0], rows[:, 1]] = True
    return relation


def shifting_check(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    gamma: Partition,
    a: int,
    b: int,
    c: int,
    d: int,
) -> bool:
    """
    Check one instance of the Shifting Lemma.

    The premise is ``alpha ^ beta <= gamma`` together with ``b alpha d``,
    ``b gamma d``, ``b beta a``, ``d beta c`` and ``a alpha c``; the conclusion is
    ``a gamma c``.

    :returns: whether the conclusion holds.

    :raises PremiseViolationError: if the premise does not hold.
    """
    return shifting_principle_check(
        algebra, alpha, beta.matrix(), gamma, a, b, c, d
    )


def shifting_principle_check(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: np.ndarray,
    gamma: Partition,
    a: int,
    b: int,
    c: int,
    d: int,
) -> bool:
    """
    Check one instance of the Shifting Principle.

    ``beta`` is a reflexive compatible relation given as a boolean matrix (a congruence
    is a special case); it must contain ``(a, b)`` and ``(d, c)``.

    :raises PremiseViolationError: if the premise does not hold.
    """
    if not bool(np.all(np.diag(beta))):
        raise PremiseViolationError("beta is not reflexive")
    overlap = alpha.matrix() & beta
    if bool(np.any(overlap & ~gamma.matrix())):
        raise PremiseViolationError("alpha ^ beta is not contained in gamma")
    premise = {
        "b alpha d": alpha.related(b, d),
        "b gamma d": gamma.related(b, d),
        "a beta b": bool(beta[a, b]),
        "d beta c": bool(beta[d, c]),
        "a alpha c": alpha.related(a, c),
    }
    failed = [name for name, holds in premise.items() if not holds]
    if failed:
        raise PremiseViolationError(f"premise fails: {', '.join(failed)}")
    return gamma.related(a, c)


def find_shifting_failure(
    algebra: FiniteAlgebra, alpha: Partition, beta: Partition, gamma: Partition
) -> Optional[tuple[int, int, int, int]]:
    """
    Search all quadruples for a Shifting Lemma premise whose conclusion fails.

    :returns: the first failing ``(a, b, c, d)`` in lexicographic order of ``(b, d)``,
        then ``(a, c)``, or ``None``.

    :raises PremiseViolationError: if ``alpha ^ beta <= gamma`` does not hold.
    """
    if not meet(alpha, beta).leq(gamma):
        raise PremiseViolationError("alpha ^ beta is not contained in gamma")
    al, be, ga = alpha.matrix(), beta.matrix(), gamma.matrix()
    bad = al & ~ga
    for b, d in np.argwhere(al & ga).tolist():
        candidates = np.argwhere(be[:, b][:, None] & be[:, d][None, :] & bad)
        if len(candidates):
            a, c = candidates[0].tolist()
            return int(a), int(b), int(c), int(d)
    return None
