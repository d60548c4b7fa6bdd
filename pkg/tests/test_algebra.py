import numpy as np
import pytest

from cohere.commutator.exceptions import (
    AlgebraValidationError,
    NotACongruenceError,
    NotAHomomorphismError,
)
from cohere.commutator.models import Partition
from cohere.commutator.models.terms import Constant
from cohere.commutator.ops.algebra import (
    check_surjective_homomorphism,
    closure_in_power,
    is_homomorphism,
    make_algebra,
    polynomial_closure,
    product_algebra,
    quotient_algebra,
    subalgebra,
    unary_polynomial_clone,
    validate_algebra,
)
from cohere.commutator.ops.terms import eval_term


def test_validate_algebra_builds_z4_tables(z4):
    assert z4.size == 4
    assert [(op.symbol, op.arity) for op in z4.operations] == [
        ("+", 2),
        ("-", 1),
        ("0", 0),
    ]
    assert z4.apply("+", (3, 2)) == 1
    assert z4.apply("-", (1,)) == 3
    assert z4.operation("0").table == (0,)


@pytest.mark.parametrize(
    "operations, symbol, index",
    [
        ([{"symbol": "f", "arity": 1, "table": [0, 2]}], "f", 1),
        ([{"symbol": "f", "arity": 2, "table": [0, 1, 1]}], "f", None),
        ([{"symbol": "x0", "arity": 0, "table": [0]}], "x0", None),
        ([{"symbol": "@1", "arity": 0, "table": [0]}], "@1", None),
        ([{"symbol": "a b", "arity": 0, "table": [0]}], "a b", None),
        (
            [
                {"symbol": "f", "arity": 0, "table": [0]},
                {"symbol": "f", "arity": 0, "table": [1]},
            ],
            "f",
            None,
        ),
    ],
)
def test_validate_algebra_names_the_violation(operations, symbol, index):
    with pytest.raises(AlgebraValidationError) as e:
        validate_algebra({"name": "bad", "size": 2, "operations": operations})
    assert e.value.symbol == symbol
    assert e.value.index == index


def test_validate_algebra_rejects_empty_universe():
    with pytest.raises(AlgebraValidationError):
        validate_algebra({"name": "empty", "size": 0, "operations": []})


def test_quotient_of_z4_is_z2(z4):
    halves = Partition.from_blocks(4, [[0, 2], [1, 3]])
    quotient, projection = quotient_algebra(z4, halves)
    assert quotient.size == 2
    assert projection == (0, 1, 0, 1)
    assert quotient.operation("+").table == (0, 1, 1, 0)
    assert is_homomorphism(z4, quotient, projection)


def test_quotient_rejects_incompatible_partition(z4):
    with pytest.raises(NotACongruenceError):
        quotient_algebra(z4, Partition.from_blocks(4, [[0, 1], [2, 3]]))


def test_product_of_z2_and_z4(corpus):
    z2, z4 = corpus["Z2"], corpus["Z4"]
    product, first, second = product_algebra(z2, z4)
    assert product.size == 8
    # (1, 3) + (1, 2) = (0, 1)
    assert product.apply("+", (1 * 4 + 3, 1 * 4 + 2)) == 0 * 4 + 1
    assert is_homomorphism(product, z2, first)
    assert is_homomorphism(product, z4, second)


def test_product_needs_same_signature(corpus):
    with pytest.raises(AlgebraValidationError):
        product_algebra(corpus["Z2"], corpus["S3"])


def test_subalgebra_of_z4_generated_by_2(z4):
    sub, embedding = subalgebra(z4, [2])
    assert embedding == (0, 2)
    assert sub.size == 2
    assert is_homomorphism(sub, z4, embedding)


def test_subalgebra_of_s3_generated_by_a_3_cycle(s3):
    # elements are permutations of (0, 1, 2) in lexicographic order; 3 is (1, 2, 0)
    sub, embedding = subalgebra(s3, [3])
    assert embedding == (0, 3, 4)
    assert sub.size == 3


def test_check_surjective_homomorphism_rejects_non_surjections(z4):
    sub, embedding = subalgebra(z4, [2])
    with pytest.raises(NotAHomomorphismError):
        check_surjective_homomorphism(sub, z4, embedding)
    with pytest.raises(NotAHomomorphismError):
        check_surjective_homomorphism(z4, z4, [0, 2, 0, 2])


def test_closure_in_power_generates_the_diagonal_subgroup(z4):
    closure = closure_in_power(z4, 2, [[1, 1]])
    assert sorted(map(tuple, closure.rows.tolist())) == [(a, a) for a in range(4)]
    assert not closure.incomplete


def test_closure_in_power_respects_the_cap(z4):
    closure = closure_in_power(z4, 2, [[1, 0], [0, 1]], cap=5)
    assert closure.incomplete
    assert len(closure) <= 5


def test_closure_terms_evaluate_to_their_rows(s3):
    generators = [(1, 2), (3, 4)]
    closure = closure_in_power(s3, 2, generators)
    for i in range(len(closure)):
        for coordinate in range(2):
            # the leaves stand for the generators, read in one coordinate
            leaves = tuple(Constant(g[coordinate]) for g in generators)
            t = closure.term(i, leaves)
            assert eval_term(s3, t, []) == closure.row(i)[coordinate]


def test_unary_polynomials_of_z4_fixing_zero(z4):
    clone = unary_polynomial_clone(z4)
    tables = clone.tables.astype(int).tolist()
    fixing = {tuple(row) for row in tables if row[0] == 0}
    assert fixing == {tuple((a * x) % 4 for x in range(4)) for a in range(4)}
    assert len(clone) == 16


def test_polynomial_closure_contains_constants_and_projections(corpus):
    lattice = corpus["lattice2"]
    clone = polynomial_closure(lattice, 2)
    tables = {tuple(row) for row in clone.tables.astype(int).tolist()}
    assert (0, 0, 1, 1) in tables
    assert (0, 1, 0, 1) in tables
    assert (0, 0, 0, 0) in tables
    assert (1, 1, 1, 1) in tables
    # meet and join
    assert (0, 0, 0, 1) in tables
    assert (0, 1, 1, 1) in tables
    assert clone.index_of([0, 0, 0, 1]) is not None


def test_make_algebra_accepts_numpy_tables():
    e = np.arange(3)
    table = ((e[:, None] + e[None, :]) % 3).reshape(-1)
    algebra = make_algebra("Z3", 3, [("+", 2, table)])
    assert algebra.apply("+", (2, 2)) == 1
