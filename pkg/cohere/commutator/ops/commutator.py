# Python imports
import logging
from typing import Optional

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_CLOSURE_CAP
from cohere.commutator.exceptions import (
    AxiomViolationError,
    CapExceededError,
    NotModularError,
)
from cohere.commutator.models.algebra import FiniteAlgebra, OperationTable
from cohere.commutator.models.commutator import (
    AbelianAnalysis,
    CentralityReport,
    DeltaRelation,
    MatrixQuad,
    SolvabilityReport,
)
from cohere.commutator.models.partitions import Partition
from cohere.commutator.ops.algebra import quotient_algebra
from cohere.commutator.ops.closure import PowerClosure
from cohere.commutator.ops.congruence import cg, join
from cohere.commutator.utils import parallel_map

logger = logging.getLogger(__name__)


def m_matrices(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> PowerClosure:
    """
    Generate M(alpha, beta) inside A^4.

    Quads are ``(top_left, top_right, bottom_left, bottom_right)``. The generators are
    ``[[a, a], [a', a']]`` for ``a alpha a'`` and ``[[b, b'], [b, b']]`` for
    ``b beta b'``, so columns of every member are alpha-related and rows beta-related.

    The closure is returned even when capped; its ``incomplete`` flag tells.
    """
    alpha_pairs = np.argwhere(alpha.matrix())
    beta_pairs = np.argwhere(beta.matrix())
    generators = np.concatenate(
        [
            alpha_pairs[:, [0, 0, 1, 1]],
            beta_pairs[:, [0, 1, 0, 1]],
        ]
    )
    closure = PowerClosure(algebra, 4, generators, cap).run()
    logger.debug(
        f"M({alpha.to_text()}, {beta.to_text()}) in {algebra.name} has "
        f"{len(closure)} matrices"
    )
    return closure


def matrix_rows(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> np.ndarray:
    """
    The complete M(alpha, beta) as an ``m x 4`` array of quads.

    :raises CapExceededError: if the closure was cut short.
    """
    closure = m_matrices(algebra, alpha, beta, cap)
    if closure.incomplete:
        raise CapExceededError(
            f"M({alpha.to_text()}, {beta.to_text()}) exceeded {cap} matrices", cap
        )
    return closure.rows.astype(np.intp)


def centralizes(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    delta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
    *,
    quads: Optional[np.ndarray] = None,
) -> CentralityReport:
    """
    Decide the term condition C(alpha, beta; delta).

    :param quads: a precomputed M(alpha, beta); generated when omitted.

    :returns: whether every matrix with delta-related top row has a delta-related
        bottom row, with the first counterexample otherwise.
    """
    rows = matrix_rows(algebra, alpha, beta, cap) if quads is None else quads
    labels = delta.array
    failing = (labels[rows[:, 0]] == labels[rows[:, 1]]) & (
        labels[rows[:, 2]] != labels[rows[:, 3]]
    )
    hits = np.nonzero(failing)[0]
    if len(hits) == 0:
        return CentralityReport(holds=True)
    return CentralityReport(
        holds=False, counterexample=MatrixQuad.from_row(tuple(rows[hits[0]]))
    )


def commutator_tc(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
    *,
    quads: Optional[np.ndarray] = None,
) -> Partition:
    """
    The commutator [alpha, beta]: the least delta with C(alpha, beta; delta).

    Starting from 0_A, the bottom rows of matrices whose top rows are already related
    are added and the congruence regenerated, until nothing changes.

    :param quads: a precomputed M(alpha, beta), in any order.
    """
    rows = matrix_rows(algebra, alpha, beta, cap) if quads is None else quads
    delta = Partition.discrete(algebra.size)
    while True:
        labels = delta.array
        forced = (labels[rows[:, 0]] == labels[rows[:, 1]]) & (
            labels[rows[:, 2]] != labels[rows[:, 3]]
        )
        if not forced.any():
            return delta
        pairs = np.unique(rows[forced][:, 2:4], axis=0)
        delta = cg(algebra, [(int(a), int(b)) for a, b in pairs], start=delta)


def center(
    algebra: FiniteAlgebra, cap: int = DEFAULT_CLOSURE_CAP, num_jobs: int = 1
) -> Partition:
    """
    The center: the largest alpha with C(alpha, 1_A; 0_A).

    Computed as the join of all principal congruences that centralize 1_A modulo 0_A.
    """
    n = algebra.size
    full = Partition.full(n)
    zero = Partition.discrete(n)
    principals: dict[Partition, None] = {}
    for a in range(n):
        for b in range(a + 1, n):
            principals.setdefault(cg(algebra, [(a, b)]), None)

    def central(p: Partition) -> bool:
        return centralizes(algebra, p, full, zero, cap).holds

    result = zero
    for p, holds in zip(principals, parallel_map(central, principals, num_jobs)):
        if holds:
            result = join(result, p)
    return result


def center_elementwise(
    algebra: FiniteAlgebra, cap: int = DEFAULT_CLOSURE_CAP
) -> Partition:
    """
    The center read off element by element.

    ``(x, y)`` is central when every matrix generated by ``[[x, x], [y, y]]`` and all
    ``[[a, b], [a, b]]`` has equal top entries exactly when it has equal bottom
    entries.
    """
    n = algebra.size
    columns = np.argwhere(np.ones((n, n), dtype=bool))[:, [0, 1, 0, 1]]
    pairs: list[tuple[int, int]] = []
    for x in range(n):
        for y in range(x + 1, n):
            generators = np.concatenate([np.array([[x, x, y, y]]), columns])
            closure = PowerClosure(algebra, 4, generators, cap).run()
            if closure.incomplete:
                raise CapExceededError(
                    f"matrices generated by ({x}, {y}) exceeded {cap}", cap
                )
            rows = closure.rows
            if np.array_equal(rows[:, 0] == rows[:, 1], rows[:, 2] == rows[:, 3]):
                pairs.append((x, y))
    return cg(algebra, pairs)


def pair_algebra(
    algebra: FiniteAlgebra, alpha: Partition
) -> tuple[FiniteAlgebra, tuple[tuple[int, int], ...]]:
    """
    The algebra A_alpha of alpha-pairs, a subalgebra of A^2.

    Pairs are numbered in lexicographic order.
    """
    n = algebra.size
    pairs = tuple((int(a), int(b)) for a, b in np.argwhere(alpha.matrix()))
    m = len(pairs)
    first = np.array([p[0] for p in pairs], dtype=np.intp)
    second = np.array([p[1] for p in pairs], dtype=np.intp)
    position = np.full((n, n), -1, dtype=np.intp)
    position[first, second] = np.arange(m)

    operations: list[OperationTable] = []
    for op, arr in zip(algebra.operations, algebra.arrays):
        if op.arity == 0:
            value = int(arr[()])
            table: tuple[int, ...] = (int(position[value, value]),)
        else:
            grid = np.indices((m,) * op.arity, dtype=np.intp)
            left = arr[tuple(first[g] for g in grid)]
            right = arr[tuple(second[g] for g in grid)]
            table = tuple(int(v) for v in position[left, right].reshape(-1))
        operations.append(OperationTable(symbol=op.symbol, arity=op.arity, table=table))
    name = f"{algebra.name}[{alpha.to_text()}]"
    return FiniteAlgebra(name=name, size=m, operations=tuple(operations)), pairs


def delta_from_matrices(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
    *,
    quads: Optional[np.ndarray] = None,
) -> DeltaRelation:
    """M(alpha, beta) as a relation from left to right columns, closed transitively."""
    rows = matrix_rows(algebra, alpha, beta, cap) if quads is None else quads
    pair_alg, pairs = pair_algebra(algebra, alpha)
    index = {p: i for i, p in enumerate(pairs)}
    parent = list(range(len(pairs)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for tl, tr, bl, br in rows.tolist():
        left, right = find(index[(tl, bl)]), find(index[(tr, br)])
        if left != right:
            parent[max(left, right)] = min(left, right)
    partition = Partition.from_labels([find(i) for i in range(len(pairs))])
    return DeltaRelation(algebra=pair_alg, pairs=pairs, partition=partition)


def delta_rel(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
    *,
    cross_check: bool = False,
) -> DeltaRelation:
    """
    Delta_alpha(beta): the congruence of A_alpha generated by ``((b, b), (b', b'))``.

    :param cross_check: also compare against the transitive closure of M(alpha, beta).

    :raises AxiomViolationError: if the cross check disagrees.
    """
    pair_alg, pairs = pair_algebra(algebra, alpha)
    index = {p: i for i, p in enumerate(pairs)}
    generators = [
        (index[(int(b), int(b))], index[(int(c), int(c))])
        for b, c in np.argwhere(beta.matrix())
        if b < c
    ]
    relation = DeltaRelation(
        algebra=pair_alg, pairs=pairs, partition=cg(pair_alg, generators)
    )
    if cross_check:
        from_matrices = delta_from_matrices(algebra, alpha, beta, cap)
        if from_matrices.partition != relation.partition:
            raise AxiomViolationError(
                f"Delta_{alpha.to_text()}({beta.to_text()}) differs from the closure "
                "of the matrices"
            )
    return relation


def commutator_delta(
    algebra: FiniteAlgebra,
    alpha: Partition,
    beta: Partition,
    *,
    congruence_modular: bool,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> Partition:
    """
    The commutator as ``{(x, y) in alpha : (x, y) Delta_alpha(beta) (y, y)}``.

    Only valid in congruence modular varieties, which the caller must assert.

    :raises NotModularError: if modularity is not asserted, or the relation read off
        Delta is not an equivalence relation.
    """
    if not congruence_modular:
        raise NotModularError(
            f"the Delta commutator of {algebra.name} needs a congruence modular variety"
        )
    relation = delta_rel(algebra, alpha, beta, cap)
    n = algebra.size
    related = np.zeros((n, n), dtype=bool)
    for i, (x, y) in enumerate(relation.pairs):
        related[x, y] = relation.partition.related(i, relation.index(y, y))
    reflexive = bool(np.all(np.diag(related)))
    symmetric = bool(np.array_equal(related, related.T))
    transitive = bool(
        np.all(((related.astype(np.int64) @ related.astype(np.int64)) > 0) <= related)
    )
    if not (reflexive and symmetric and transitive):
        raise NotModularError(
            f"the Delta commutator of {alpha.to_text()} and {beta.to_text()} in "
            f"{algebra.name} is not an equivalence relation"
        )
    return Partition(tuple(int(np.argmax(row)) for row in related))


def abelian_analysis(
    algebra: FiniteAlgebra, cap: int = DEFAULT_CLOSURE_CAP
) -> AbelianAnalysis:
    """
    Decide whether [1_A, 1_A] = 0_A and build A / [1_A, 1_A].

    The diagonal check computes Delta_1(1) on A x A and tests whether the block of a
    diagonal element is exactly the diagonal.
    """
    n = algebra.size
    full = Partition.full(n)
    derived = commutator_tc(algebra, full, full, cap)
    abelianization, projection = quotient_algebra(algebra, derived)

    relation = delta_rel(algebra, full, full, cap)
    block_id = relation.partition.ids[relation.index(0, 0)]
    block = {
        relation.pairs[i] for i, b in enumerate(relation.partition.ids) if b == block_id
    }
    diagonal_coset = block == {(a, a) for a in range(n)}
    return AbelianAnalysis(
        abelian=derived.is_discrete,
        derived=derived,
        abelianization=abelianization,
        projection=projection,
        diagonal_coset_check=diagonal_coset,
    )


def iterated_commutator(
    algebra: FiniteAlgebra,
    alpha: Partition,
    max_n: int,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> SolvabilityReport:
    """
    The derived series ``alpha, [alpha, alpha], [[alpha, alpha], [alpha, alpha]], ...``.

    Stops at 0_A, when the series stabilises, or after ``max_n`` steps.
    """
    series = [alpha]
    if alpha.is_discrete:
        return SolvabilityReport(series=series, degree=0)
    for step in range(1, max_n + 1):
        current = series[-1]
        following = commutator_tc(algebra, current, current, cap)
        series.append(following)
        if following.is_discrete:
            return SolvabilityReport(series=series, degree=step)
        if following == current:
            break
    return SolvabilityReport(series=series, degree=None)
