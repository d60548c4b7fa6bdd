# Python imports
import logging
from collections.abc import Sequence
from typing import Callable, Optional, Union

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_CLOSURE_CAP, DEFAULT_ZERO_ELEMENT
from cohere.commutator.exceptions import (
    AxiomViolationError,
    CapExceededError,
    NotAbelianError,
    NotAffineError,
    TernaryGroupError,
)
from cohere.commutator.models.affine import (
    AffineRepresentation,
    CommutingReport,
    CosetGroupReport,
    DifferenceTermReport,
    GroupStructure,
    OperationDecomposition,
    TernaryGroupWitness,
)
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.config import ComputationConfig
from cohere.commutator.models.partitions import Partition
from cohere.commutator.models.terms import Term, TermChain, TermFamily, Variable
from cohere.commutator.ops.algebra import projection_rows, unary_polynomial_clone
from cohere.commutator.ops.commutator import commutator_tc, matrix_rows
from cohere.commutator.ops.congruence import cg
from cohere.commutator.ops.lattice import con_all
from cohere.commutator.ops.maltsev import find_maltsev_polynomial, find_maltsev_term
from cohere.commutator.ops.terms import substitute, term_table

logger = logging.getLogger(__name__)

X, Y, Z = (Variable(i) for i in range(3))

TernaryTable = Union[np.ndarray, Sequence[int]]


def commutator_day(
    algebra: FiniteAlgebra,
    chain: TermChain,
    alpha: Partition,
    beta: Partition,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> Partition:
    """
    The commutator as the congruence generated by X(alpha, beta).

    X(alpha, beta) holds the pairs ``(m_i(x, x, u, u), m_i(x, y, z, u))`` for every
    Day term ``m_i`` and every matrix ``[[x, y], [u, z]]`` of M(alpha, beta).

    :raises ValueError: if ``chain`` is not a Day chain.
    """
    if chain.family is not TermFamily.Day:
        raise ValueError(f"expected Day terms, got {chain.family.value} terms")
    n = algebra.size
    rows = matrix_rows(algebra, alpha, beta, cap)
    x, y, u, z = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    collapsed = ((x * n + x) * n + u) * n + u
    spread = ((x * n + y) * n + z) * n + u
    pairs: set[tuple[int, int]] = set()
    for m in chain.terms:
        table = term_table(algebra, m, 4)
        left, right = table[collapsed], table[spread]
        differ = left != right
        pairs.update(zip(left[differ].tolist(), right[differ].tolist()))
    return cg(algebra, sorted(pairs))


def difference_term(algebra: FiniteAlgebra, chain: TermChain) -> Term:
    """
    Compose the difference term of a Day chain ``m_0, ..., m_n``.

    ``p_0 = z``, and ``p_{i+1}`` is ``m_{i+1}(p_i, x, y, p_i)`` for even ``i`` and
    ``m_{i+1}(p_i, y, x, p_i)`` for odd ``i``; the result is ``p_n``.

    :raises AxiomViolationError: if ``d(x, x, y) = y`` fails, which only happens for an
        invalid chain.
    """
    if chain.family is not TermFamily.Day:
        raise ValueError(f"expected Day terms, got {chain.family.value} terms")
    p: Term = Z
    for i, m in enumerate(chain.terms[1:]):
        p = substitute(m, (p, X, Y, p) if i % 2 == 0 else (p, Y, X, p))
    if not _idempotent_law(algebra, p):
        raise AxiomViolationError(
            f"the difference term of {algebra.name} fails d(x,x,y) = y"
        )
    return p


def _idempotent_law(algebra: FiniteAlgebra, d: Term) -> bool:
    n = algebra.size
    e = np.arange(n)
    table = term_table(algebra, d, 3).reshape(n, n, n)
    return bool(np.all(table[e[:, None], e[:, None], e[None, :]] == e[None, :]))


def verify_difference_term(
    algebra: FiniteAlgebra,
    d: Term,
    congruences: Optional[Sequence[Partition]] = None,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> DifferenceTermReport:
    """
    Check the two laws of a difference term.

    ``d(x, x, y) = y`` everywhere, and ``d(x, y, y) [alpha, alpha] x`` for the
    alpha-pairs of every congruence alpha.

    :param congruences: the congruences to check; all of Con(A) by default.
    """
    n = algebra.size
    e = np.arange(n)
    table = term_table(algebra, d, 3).reshape(n, n, n)
    collapsed = table[e[:, None], e[None, :], e[None, :]]
    per_congruence: dict[str, bool] = {}
    for alpha in congruences if congruences is not None else con_all(algebra):
        derived = commutator_tc(algebra, alpha, alpha, cap).array
        # collapsed[x, y] is d(x, y, y)
        related = derived[collapsed] == derived[:, None]
        per_congruence[alpha.to_text()] = bool(np.all(related[alpha.matrix()]))
    return DifferenceTermReport(
        term=d,
        idempotent_law=_idempotent_law(algebra, d),
        per_congruence=per_congruence,
    )


def _as_cube(table: TernaryTable, n: int) -> np.ndarray:
    cube = np.asarray(table, dtype=np.intp)
    if cube.size != n**3:
        raise TernaryGroupError(
            f"a ternary operation on {n} elements has {n ** 3} entries, got {cube.size}"
        )
    cube = cube.reshape(n, n, n)
    if cube.size and (cube.min() < 0 or cube.max() >= n):
        raise TernaryGroupError(f"the ternary operation leaves the {n} elements")
    return cube


def _maltsev_violation(cube: np.ndarray) -> Optional[str]:
    n = cube.shape[0]
    for x in range(n):
        for y in range(n):
            if cube[x, x, y] != y:
                return f"t({x},{x},{y}) = {cube[x, x, y]}, expected {y}"
            if cube[x, y, y] != x:
                return f"t({x},{y},{y}) = {cube[x, y, y]}, expected {x}"
    return None


def _self_commuting_violation(cube: np.ndarray) -> Optional[str]:
    """
    Compare ``t`` applied to the rows and then the columns of every 3x3 matrix with the
    other order, one first row at a time.
    """
    n = cube.shape[0]
    b1, b2, b3 = (g[:, None] for g in projection_rows(n, 3))
    c1, c2, c3 = (g[None, :] for g in projection_rows(n, 3))
    rows_b = cube[b1, b2, b3]
    rows_c = cube[c1, c2, c3]
    for a1 in range(n):
        for a2 in range(n):
            for a3 in range(n):
                by_rows = cube[cube[a1, a2, a3], rows_b, rows_c]
                by_columns = cube[cube[a1, b1, c1], cube[a2, b2, c2], cube[a3, b3, c3]]
                bad = np.argwhere(by_rows != by_columns)
                if len(bad):
                    i, j = bad[0]
                    second = (int(b1[i, 0]), int(b2[i, 0]), int(b3[i, 0]))
                    third = (int(c1[0, j]), int(c2[0, j]), int(c3[0, j]))
                    return (
                        f"t does not commute with itself on the matrix with rows "
                        f"{(a1, a2, a3)}, {second}, {third}"
                    )
    return None


def ternary_witness(
    elements: Sequence[int], table: TernaryTable
) -> TernaryGroupWitness:
    """Certify a ternary operation on ``elements``, given on their positions."""
    cube = _as_cube(table, len(elements))
    return TernaryGroupWitness(
        elements=tuple(elements),
        table=tuple(int(v) for v in cube.reshape(-1)),
        maltsev=_maltsev_violation(cube) is None,
        self_commuting=_self_commuting_violation(cube) is None,
    )


def ternary_group(
    algebra: FiniteAlgebra, table: TernaryTable, zero: int = DEFAULT_ZERO_ELEMENT
) -> GroupStructure:
    """
    Read an Abelian group off a ternary Abelian group operation ``t``.

    ``x + y = t(x, 0, y)`` and ``-x = t(0, x, 0)``. The group axioms and
    ``t(x, y, z) = x - y + z`` are checked exhaustively.

    :raises TernaryGroupError: naming the first instance where ``t`` is not Mal'tsev or
        does not commute with itself.
    """
    n = algebra.size
    if not 0 <= zero < n:
        raise TernaryGroupError(f"zero {zero} is not an element of {algebra.name}")
    cube = _as_cube(table, n)
    for violation in (_maltsev_violation(cube), _self_commuting_violation(cube)):
        if violation is not None:
            raise TernaryGroupError(violation)

    plus = cube[:, zero, :]
    neg = cube[zero, :, zero]
    _check_group(plus, neg, zero, cube)
    witness = TernaryGroupWitness(
        elements=tuple(range(n)),
        table=tuple(int(v) for v in cube.reshape(-1)),
        maltsev=True,
        self_commuting=True,
    )
    return GroupStructure(
        zero=zero,
        plus=tuple(tuple(int(v) for v in row) for row in plus),
        neg=tuple(int(v) for v in neg),
        witness=witness,
    )


def _check_group(
    plus: np.ndarray, neg: np.ndarray, zero: int, cube: np.ndarray
) -> None:
    n = len(neg)
    e = np.arange(n)
    axioms = {
        "x + 0 = x": np.array_equal(plus[:, zero], e),
        "x + y = y + x": np.array_equal(plus, plus.T),
        "x + (-x) = 0": bool(np.all(plus[e, neg] == zero)),
        "(x + y) + z = x + (y + z)": np.array_equal(
            plus[plus[:, :, None], e[None, None, :]],
            plus[e[:, None, None], plus[None, :, :]],
        ),
        "t(x, y, z) = x - y + z": np.array_equal(
            plus[plus[e[:, None, None], neg[None, :, None]], e[None, None, :]], cube
        ),
    }
    failed = [name for name, holds in axioms.items() if not holds]
    if failed:
        raise AxiomViolationError(f"group axioms fail: {', '.join(failed)}")


def _maltsev_operation(
    algebra: FiniteAlgebra, config: ComputationConfig
) -> Term:
    result = find_maltsev_term(algebra, config=config)
    if not result.found:
        result = find_maltsev_polynomial(algebra, config.free_algebra_cap_3)
    if not result.found or result.chain is None:
        raise NotAffineError(
            f"{algebra.name} is not affine-eligible: no Mal'tsev polynomial "
            f"({result.reason})"
        )
    return result.chain.terms[0]


def module_reconstruct(
    algebra: FiniteAlgebra,
    zero: Optional[int] = None,
    config: Optional[ComputationConfig] = None,
) -> AffineRepresentation:
    """
    Present an Abelian algebra with a Mal'tsev polynomial as an affine module.

    The group comes from the Mal'tsev operation with the chosen zero; the ring is the
    set of unary polynomials fixing zero, added pointwise and multiplied by composition.
    Every basic operation is then decomposed as
    ``f(x_1, ..., x_k) = r_1(x_1) + ... + r_k(x_k) + f(0, ..., 0)`` and the
    decomposition checked on all arguments.

    :raises NotAbelianError: if ``[1, 1] != 0``.
    :raises NotAffineError: if A has no Mal'tsev polynomial.
    :raises CapExceededError: if the unary polynomials could not all be generated.
    """
    config = config or ComputationConfig()
    zero = config.zero if zero is None else zero
    n = algebra.size
    full = Partition.full(n)
    derived = commutator_tc(algebra, full, full, config.closure_cap)
    if not derived.is_discrete:
        raise NotAbelianError(
            f"{algebra.name} is not Abelian: [1, 1] = {derived.to_text()}"
        )
    p = _maltsev_operation(algebra, config)
    group = ternary_group(algebra, term_table(algebra, p, 3), zero)
    plus = np.asarray(group.plus, dtype=np.intp)
    neg = np.asarray(group.neg, dtype=np.intp)

    clone = unary_polynomial_clone(algebra, config.closure_cap)
    if clone.incomplete:
        raise CapExceededError(
            f"the unary polynomials of {algebra.name} exceeded {config.closure_cap}",
            config.closure_cap,
        )
    tables = clone.tables.astype(np.intp)
    kept = [i for i in range(len(tables)) if tables[i, zero] == zero]
    ring = tables[kept]
    position = {row.tobytes(): i for i, row in enumerate(ring)}

    def ring_index(row: np.ndarray, what: str) -> int:
        index = position.get(np.ascontiguousarray(row, dtype=np.intp).tobytes())
        if index is None:
            raise AxiomViolationError(f"{what} is not a zero-fixing unary polynomial")
        return index

    m = len(ring)
    ring_add = np.array(
        [
            [ring_index(plus[ring[i], ring[j]], "r + s") for j in range(m)]
            for i in range(m)
        ],
        dtype=np.intp,
    ).reshape(m, m)
    ring_mul = np.array(
        [[ring_index(ring[i][ring[j]], "r s") for j in range(m)] for i in range(m)],
        dtype=np.intp,
    ).reshape(m, m)
    _check_module(ring, ring_add, ring_mul, plus)

    representation = AffineRepresentation(
        group=group,
        ring=tuple(tuple(int(v) for v in row) for row in ring),
        ring_terms=tuple(clone.term(i) for i in kept),
        ring_add=tuple(tuple(int(v) for v in row) for row in ring_add),
        ring_mul=tuple(tuple(int(v) for v in row) for row in ring_mul),
        action=tuple(tuple(int(v) for v in row) for row in ring),
        ring_zero=ring_index(np.full(n, zero), "the zero map"),
        ring_one=ring_index(np.arange(n), "the identity"),
        decompositions=tuple(
            _decompose(algebra, op_index, zero, plus, neg, ring, ring_index)
            for op_index in range(len(algebra.operations))
        ),
    )
    logger.info(
        f"{algebra.name} is affine over a ring of {representation.ring_size} elements"
    )
    return representation


def _check_module(
    ring: np.ndarray, ring_add: np.ndarray, ring_mul: np.ndarray, plus: np.ndarray
) -> None:
    m = len(ring)
    r = np.arange(m)
    axioms = {
        "r(a + b) = ra + rb": np.array_equal(
            ring[:, plus], plus[ring[:, :, None], ring[:, None, :]]
        ),
        "(r + s)a = ra + sa": np.array_equal(
            ring[ring_add], plus[ring[:, None, :], ring[None, :, :]]
        ),
        "(rs)a = r(sa)": np.array_equal(
            ring[ring_mul], ring[r[:, None, None], ring[None, :, :]]
        ),
        "r(s + t) = rs + rt": np.array_equal(
            ring_mul[r[:, None, None], ring_add[None, :, :]],
            ring_add[ring_mul[:, :, None], ring_mul[:, None, :]],
        ),
        "(s + t)r = sr + tr": np.array_equal(
            ring_mul[ring_add[:, :, None], r[None, None, :]],
            ring_add[ring_mul[:, None, :], ring_mul[None, :, :]],
        ),
    }
    failed = [name for name, holds in axioms.items() if not holds]
    if failed:
        raise AxiomViolationError(f"module axioms fail: {', '.join(failed)}")


def _decompose(
    algebra: FiniteAlgebra,
    op_index: int,
    zero: int,
    plus: np.ndarray,
    neg: np.ndarray,
    ring: np.ndarray,
    ring_index: Callable[[np.ndarray, str], int],
) -> OperationDecomposition:
    """
    Split ``f`` into ``r_i(x) = f(0, .., x, .., 0) - f(0, .., 0)`` and the constant.

    :raises AxiomViolationError: if ``f`` is not the sum of its parts.
    """
    op = algebra.operations[op_index]
    arr = algebra.arrays[op_index]
    n = algebra.size
    k = op.arity
    constant = int(arr[(zero,) * k])
    coefficients: list[int] = []
    for slot in range(k):
        args = [np.full(n, zero, dtype=np.intp) for _ in range(k)]
        args[slot] = np.arange(n, dtype=np.intp)
        coefficients.append(
            ring_index(plus[arr[tuple(args)], neg[constant]], f"{op.symbol} at {slot}")
        )
    if k:
        grids = projection_rows(n, k)
        total = np.full(n**k, constant, dtype=np.intp)
        for slot, coefficient in enumerate(coefficients):
            total = plus[total, ring[coefficient][grids[slot]]]
        if not np.array_equal(total, arr.reshape(-1)):
            raise AxiomViolationError(
                f"{op.symbol} is not the sum of its unary parts in {algebra.name}"
            )
    return OperationDecomposition(
        symbol=op.symbol, coefficients=tuple(coefficients), constant=constant
    )


def _commuting_failure(
    arr: np.ndarray, arity: int, cube: np.ndarray, rows: np.ndarray
) -> Optional[np.ndarray]:
    """
    Find a ``arity x 3`` matrix with rows from ``rows`` on which ``f`` and ``d`` differ.

    ``f`` applied to the columns and then ``d`` is compared with ``d`` applied to the
    rows and then ``f``. Matrices are enumerated one first row at a time.
    """
    if arity == 0:
        c = int(arr[()])
        return None if cube[c, c, c] == c else np.empty((0, 3), dtype=np.intp)
    m = len(rows)
    if arity == 1:
        chunks = [np.arange(m, dtype=np.intp)[None, :]]
    else:
        rest = np.indices((m,) * (arity - 1), dtype=np.intp).reshape(arity - 1, -1)
        chunks = (
            np.concatenate([np.full((1, rest.shape[1]), first, dtype=np.intp), rest])
            for first in range(m)
        )
    for chosen in chunks:
        matrices = rows[chosen]
        by_rows = arr[tuple(cube[r[:, 0], r[:, 1], r[:, 2]] for r in matrices)]
        by_columns = cube[
            arr[tuple(matrices[:, :, 0])],
            arr[tuple(matrices[:, :, 1])],
            arr[tuple(matrices[:, :, 2])],
        ]
        bad = np.nonzero(by_rows != by_columns)[0]
        if len(bad):
            return matrices[:, bad[0], :]
    return None


def coset_groups(
    algebra: FiniteAlgebra,
    alpha: Partition,
    d: Term,
    cap: int = DEFAULT_CLOSURE_CAP,
) -> CosetGroupReport:
    """
    Certify the blocks of an Abelian congruence as ternary Abelian groups under ``d``.

    Every block gets a witness; every basic operation is then checked to commute with
    ``d`` on all matrices whose rows are alpha-related triples, so that it acts as a
    ternary group homomorphism between blocks.

    :raises NotAbelianError: if ``[alpha, alpha] != 0``.
    """
    derived = commutator_tc(algebra, alpha, alpha, cap)
    if not derived.is_discrete:
        raise NotAbelianError(
            f"{alpha.to_text()} is not Abelian in {algebra.name}: "
            f"[alpha, alpha] = {derived.to_text()}"
        )
    n = algebra.size
    cube = term_table(algebra, d, 3).reshape(n, n, n)
    failure: Optional[str] = None
    cosets: list[TernaryGroupWitness] = []
    for block in alpha.blocks:
        members = np.asarray(block, dtype=np.intp)
        position = np.full(n, -1, dtype=np.intp)
        position[members] = np.arange(len(members))
        local = position[
            cube[members[:, None, None], members[None, :, None], members[None, None, :]]
        ]
        if np.any(local < 0):
            failure = failure or f"d leaves the block {block}"
            cosets.append(
                TernaryGroupWitness(
                    elements=block, table=(), maltsev=False, self_commuting=False
                )
            )
            continue
        cosets.append(ternary_witness(block, local))

    related = alpha.matrix()
    triples = np.argwhere(related[:, :, None] & related[:, None, :])
    homomorphism = True
    for op, arr in zip(algebra.operations, algebra.arrays):
        matrix = _commuting_failure(arr, op.arity, cube, triples)
        if matrix is not None:
            homomorphism = False
            failure = failure or (
                f"{op.symbol} and d do not commute on {matrix.tolist()}"
            )
            break
    return CosetGroupReport(
        congruence=alpha,
        cosets=cosets,
        homomorphism_holds=homomorphism,
        failure=failure,
    )


def difference_term_commutes(
    algebra: FiniteAlgebra, d: Term, alpha: Partition, beta: Partition
) -> CommutingReport:
    """
    Difference-term conditions equivalent to ``[alpha, beta] = 0`` for beta <= alpha.

    (i) ``d`` commutes with every basic operation and with itself on every matrix
    whose rows ``(x, y, z)`` satisfy ``x beta y alpha z``; (ii)
    ``d(y, z, z) = y = d(z, z, y)`` whenever ``y beta z``.

    :raises ValueError: if beta is not below alpha.
    """
    if not beta.leq(alpha):
        raise ValueError(f"{beta.to_text()} is not below {alpha.to_text()}")
    n = algebra.size
    cube = term_table(algebra, d, 3).reshape(n, n, n)
    rows = np.argwhere(beta.matrix()[:, :, None] & alpha.matrix()[None, :, :])

    failure: Optional[str] = None
    operations = [
        (op.symbol, op.arity, arr)
        for op, arr in zip(algebra.operations, algebra.arrays)
    ]
    operations.append(("d", 3, cube))
    commutes = True
    for symbol, arity, arr in operations:
        matrix = _commuting_failure(arr, arity, cube, rows)
        if matrix is not None:
            commutes = False
            failure = f"{symbol} and d do not commute on {matrix.tolist()}"
            break

    pairs = np.argwhere(beta.matrix())
    y, z = pairs[:, 0], pairs[:, 1]
    broken = np.nonzero((cube[y, z, z] != y) | (cube[z, z, y] != y))[0]
    if len(broken):
        a, b = int(y[broken[0]]), int(z[broken[0]])
        failure = failure or f"d({a},{b},{b}) = {a} = d({b},{b},{a}) fails"
    return CommutingReport(
        commutes=commutes, preserves_pairs=len(broken) == 0, failure=failure
    )
